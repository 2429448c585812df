"""EMC against a PI loop on identical random timing.

Both controllers chase the same shaped reference ȳ over the same sampling
trace.  The EMC tracking command is far smaller in magnitude because the
feedforward and rejection terms carry most of the work.  In this
simulation the RMSE ordering between the two depends on the seed; see the
README for the discussion.
"""

from emcsim import config, harness

cfg = config.load_config("benchmark")
print(" seed   RMSE emc  RMSE pi   ratio   u_trk emc  u_trk pi")
for seed in cfg.benchmark_seeds:
    c = cfg.with_seed(seed)
    (_, me), (_, mp) = harness.run_pair(c.with_controller("emc"), c.with_controller("pi"))
    print(f"{seed:5d} {me.rmse_tracking:9.4f} {mp.rmse_tracking:8.4f} {me.rmse_tracking / mp.rmse_tracking:7.3f}"
          f" {me.rms_u_trk:10.3f} {mp.rms_u_trk:9.3f}")
