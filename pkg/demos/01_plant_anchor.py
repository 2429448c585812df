"""Where the motor parameters come from.

The discrete speed transfer function of the motor at T = 10 ms is known only
through three rounded coefficients.  Inverting the coefficient equations
gives back the physical time constants and gain, and those in turn give the
poles of the sampled model at any period.
"""

from emcsim.plant import PlantParams, encoder_resolution, params_from_coefficients, tf_coefficients, tf_poles

# %% recover (tau_m, tau_a, k_v) from the three coefficients
p = params_from_coefficients(beta0=0.1313, alpha0=-0.1471, alpha1=-0.4835, t=0.01)
print(f"tau_m = {p.tau_m:.6f} s   tau_a = {p.tau_a:.6f} s   k_v = {p.k_v:.6f} V s/rad")

# %% and forward again
beta0, alpha0, alpha1 = tf_coefficients(p, 0.01)
print(f"beta0 = {beta0:.4f}  alpha0 = {alpha0:.4f}  alpha1 = {alpha1:.4f}")

# %% poles move towards the origin as the period grows; the worst case is the shortest period
for t in (0.01, 0.03, 0.08, 0.15):
    d0, d1 = tf_poles(p, t)
    print(f"T = {t:5.2f} s  poles {d0.real:+.4f} {d1.real:+.4f}")

# %% one encoder count over 10 ms, with 720 counts per turn
print(f"encoder speed resolution at 10 ms: {encoder_resolution(PlantParams(), 0.01):.4f} rad/s")
