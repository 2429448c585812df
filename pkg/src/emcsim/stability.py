"""Discrete-time eigenvalue sweep over a range of sampling intervals.

For every grid point the continuous design eigenvalues are mapped through
``exp(mu Ts)``, the gain set is placed, and the eigenvalues of the assembled
closed-loop matrices are recovered independently with
:func:`emcsim.numerics.eigenvalues`.  The motor's own discrete poles are
reported alongside.
"""

import cmath
from dataclasses import dataclass

import numpy as np

from . import emc
from .numerics import eigenvalues
from .plant import tf_poles

__all__ = ["StabilityReport", "sweep"]

GROUPS = ("R", "K", "N", "plant")


@dataclass(frozen=True)
class StabilityReport:
    ts_grid: tuple
    lambda_R: tuple
    lambda_K: tuple
    lambda_N: tuple
    plant_poles: tuple
    placed_R: tuple
    placed_K: tuple
    placed_N: tuple
    all_stable: bool
    max_modulus: float
    placement_error: float

    def group(self, name):
        return {"R": self.lambda_R, "K": self.lambda_K, "N": self.lambda_N, "plant": self.plant_poles}[name]

    def max_group_modulus(self, name):
        return max(abs(z) for per_ts in self.group(name) for z in per_ts)

    def rows(self):
        """CSV header and rows in polar and cartesian form."""
        header = ["ts", "group", "index", "re", "im", "modulus", "argument"]
        body = []
        for i, ts in enumerate(self.ts_grid):
            for name in GROUPS:
                for j, z in enumerate(self.group(name)[i]):
                    z = complex(z)
                    body.append([ts, name, j, z.real, z.imag, abs(z), cmath.phase(z)])
        return header, body


def _match_error(placed, targets):
    return max(abs(a - b) for a, b in zip(placed, sorted(targets)))


def sweep(spec, p, ts_min, ts_max, n_points, options=emc.EmcOptions()):
    if not 0 < ts_min < ts_max:
        raise ValueError(f"need 0 < ts_min < ts_max, got {ts_min}, {ts_max}")
    if n_points < 2:
        raise ValueError(f"n_points must be >= 2, got {n_points}")
    grid = tuple(float(t) for t in np.linspace(ts_min, ts_max, int(n_points)))
    lam_R, lam_K, lam_N, poles = [], [], [], []
    placed_R, placed_K, placed_N = [], [], []
    err = 0.0
    for ts in grid:
        m = emc.build_matrices(p, ts, options.disturbance_pole)
        g = emc.schedule_gains(spec, m, ts)
        lam_R.append((complex(g.lam_R),))
        lam_K.append(tuple(complex(v) for v in g.lam_K))
        lam_N.append(tuple(complex(v) for v in g.lam_N))
        poles.append(tuple(tf_poles(p, ts)))
        pr = eigenvalues(emc.reference_matrix(m, g))
        pk = eigenvalues(emc.controller_matrix(m, g, options.controller_matrix))
        pn = eigenvalues(emc.observer_matrix(m, g))
        placed_R.append(tuple(pr))
        placed_K.append(tuple(pk))
        placed_N.append(tuple(pn))
        err = max(err, _match_error(pr, [g.lam_R]), _match_error(pk, g.lam_K), _match_error(pn, g.lam_N))

    moduli = [abs(z) for group in (lam_R, lam_K, lam_N, poles) for per_ts in group for z in per_ts]
    max_mod = max(moduli)
    return StabilityReport(
        ts_grid=grid,
        lambda_R=tuple(lam_R),
        lambda_K=tuple(lam_K),
        lambda_N=tuple(lam_N),
        plant_poles=tuple(poles),
        placed_R=tuple(placed_R),
        placed_K=tuple(placed_K),
        placed_N=tuple(placed_N),
        all_stable=bool(max_mod < 1.0),
        max_modulus=float(max_mod),
        placement_error=float(err),
    )
