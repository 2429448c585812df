"""Embedded Model Control unit for a single DC-motor speed loop.

The controller embeds a discrete internal model of the motor with a
two-state disturbance generator,

    x_c'  = A_c x_c + B_c u + Ts (w1 + x_d1)
    x_d1' = a_d x_d1 + Ts (x_d2 + w2)
    x_d2' = a_d x_d2 + Ts w3

with ``A_c = 1 - Ts / tau_m``, ``B_c = Ts / (tau_m k_v)`` and ``a_d = 1 + Ts``.
The noise vector ``w = L e_m`` is a static injection of the model error
``e_m = y - x_c``.  On top of the model sit a first-order reference
generator, a PI tracking law on ``x_ref - x_c`` and a disturbance rejection
term ``M x_d``.

Every gain is recomputed at each step from fixed continuous-time
eigenvalues mapped through ``lambda = exp(mu Ts)``, so the closed loops keep
the same continuous-time behaviour whatever the sampling interval.
"""

import math
from dataclasses import dataclass

import numpy as np

from .numerics import poly_from_roots, solve_linear

__all__ = [
    "DEFAULT_SPEC",
    "ContinuousEigenSpec",
    "EmcOptions",
    "EmcState",
    "GainSet",
    "InternalModelMatrices",
    "build_matrices",
    "schedule_gains",
    "place_gains",
    "reference_matrix",
    "controller_matrix",
    "observer_matrix",
    "observer_correct",
    "model_predict",
    "reference_step",
    "control_law",
    "emc_step",
]


@dataclass(frozen=True)
class ContinuousEigenSpec:
    """Continuous-time eigenvalues [1/s] of the three EMC closed loops."""

    mu_R: float
    mu_K: tuple
    mu_N: tuple

    def __post_init__(self):
        object.__setattr__(self, "mu_R", float(self.mu_R))
        object.__setattr__(self, "mu_K", tuple(float(v) for v in self.mu_K))
        object.__setattr__(self, "mu_N", tuple(float(v) for v in self.mu_N))
        if len(self.mu_K) != 2 or len(self.mu_N) != 3:
            raise ValueError("need exactly 2 control-law and 3 predictor eigenvalues")
        if not all(math.isfinite(v) for v in self.values()):
            raise ValueError("eigenvalues must be finite")

    def values(self):
        return (self.mu_R,) + self.mu_K + self.mu_N

    @property
    def left_half_plane(self):
        return all(v < 0 for v in self.values())

    def discrete(self, ts):
        """``(lam_R, lam_K, lam_N)`` for sampling interval ``ts``."""
        return (
            math.exp(self.mu_R * ts),
            tuple(math.exp(m * ts) for m in self.mu_K),
            tuple(math.exp(m * ts) for m in self.mu_N),
        )


DEFAULT_SPEC = ContinuousEigenSpec(
    mu_R=-2.5647,
    mu_K=(-2.5647, -2.5647),
    mu_N=(-14.3842, -14.3842, -14.3839),
)


@dataclass(frozen=True)
class EmcOptions:
    """``controller_matrix`` only changes :func:`controller_matrix` output.

    ``"as_printed"`` reproduces the published controller matrix with ``-A_c``
    in the first block; the implemented loop is always the conventional one.
    ``disturbance_pole="neutral"`` puts the disturbance generator pole at 1
    instead of ``1 + Ts``.
    """

    controller_matrix: str = "conventional"
    disturbance_pole: str = "as_printed"
    ordering: str = "predictor"

    def __post_init__(self):
        if self.controller_matrix not in ("conventional", "as_printed"):
            raise ValueError(f"controller_matrix must be 'conventional' or 'as_printed', got {self.controller_matrix!r}")
        if self.disturbance_pole not in ("as_printed", "neutral"):
            raise ValueError(f"disturbance_pole must be 'as_printed' or 'neutral', got {self.disturbance_pole!r}")
        if self.ordering not in ("predictor", "current"):
            raise ValueError(f"ordering must be 'predictor' or 'current', got {self.ordering!r}")


@dataclass(frozen=True)
class EmcState:
    x_c: float = 0.0
    x_d1: float = 0.0
    x_d2: float = 0.0
    x_ref: float = 0.0
    x_2: float = 0.0

    @property
    def x(self):
        return np.array([self.x_c, self.x_d1, self.x_d2])


@dataclass(frozen=True)
class InternalModelMatrices:
    ts: float
    A_c: float
    B_c: float
    C_c: float
    H_c: tuple
    A_d: tuple
    B_d: tuple
    G: tuple
    C_d: tuple

    @property
    def a_d(self):
        return self.A_d[0][0]

    @property
    def A(self):
        return np.array([
            [self.A_c, self.H_c[0], self.H_c[1]],
            [0.0, self.A_d[0][0], self.A_d[0][1]],
            [0.0, self.A_d[1][0], self.A_d[1][1]],
        ])

    @property
    def B(self):
        return np.array([self.B_c, self.B_d[0], self.B_d[1]])

    @property
    def C(self):
        return np.array([self.C_c, self.C_d[0], self.C_d[1]])

    @property
    def G_mat(self):
        return np.array(self.G)


@dataclass(frozen=True)
class GainSet:
    ts: float
    a_R: float
    b_R: float
    k_R: float
    n_R: float
    k_p: float
    k_i: float
    L: tuple
    M: tuple
    Q: tuple
    lam_R: float
    lam_K: tuple
    lam_N: tuple


def build_matrices(p, ts, disturbance_pole="as_printed"):
    if not ts > 0:
        raise ValueError(f"sampling interval must be positive, got {ts}")
    a_d = 1.0 + ts if disturbance_pole == "as_printed" else 1.0
    return InternalModelMatrices(
        ts=ts,
        A_c=1.0 - ts / p.tau_m,
        B_c=ts / (p.tau_m * p.k_v),
        C_c=1.0,
        H_c=(ts, 0.0),
        A_d=((a_d, ts), (0.0, a_d)),
        B_d=(0.0, 0.0),
        G=((ts, 0.0, 0.0), (0.0, ts, 0.0), (0.0, 0.0, ts)),
        C_d=(0.0, 0.0),
    )


def place_gains(m, lam_R, lam_K, lam_N):
    """Gains placing the three closed loops on the given discrete poles."""
    ts, a_c, b_c = m.ts, m.A_c, m.B_c
    if ts <= 0 or b_c == 0:
        raise ValueError(f"degenerate placement: ts={ts}, B_c={b_c}")

    k_R = (a_c - lam_R) / b_c
    n_R = (1.0 - lam_R) / b_c

    l1, l2 = lam_K
    k_p = (1.0 + a_c - l1 - l2) / b_c
    k_i = (1.0 - l1) * (1.0 - l2) / b_c

    # det(zI - (A - G L C)) = (z - A_c + Ts l1)(z - a)^2 + Ts^2 l2 (z - a) + Ts^3 l3
    a = m.a_d
    c0, c1, c2, _ = poly_from_roots(lam_N)
    lhs = np.array([
        [ts, 0.0, 0.0],
        [-2.0 * a * ts, ts * ts, 0.0],
        [a * a * ts, -a * ts * ts, ts ** 3],
    ])
    rhs = np.array([
        c2 + a_c + 2.0 * a,
        c1 - (2.0 * a * a_c + a * a),
        c0 + a_c * a * a,
    ])
    L = tuple(float(v) for v in solve_linear(lhs, rhs))

    # B_c M = H_c and C_c Q = 0
    M = (m.H_c[0] / b_c, m.H_c[1] / b_c)
    Q = (0.0, 0.0)

    return GainSet(
        ts=ts, a_R=lam_R, b_R=b_c * n_R, k_R=k_R, n_R=n_R, k_p=k_p, k_i=k_i,
        L=L, M=M, Q=Q, lam_R=lam_R, lam_K=tuple(lam_K), lam_N=tuple(lam_N),
    )


def schedule_gains(spec, m, ts=None):
    """Discrete gains for the interval ``ts`` from continuous eigenvalues."""
    ts = m.ts if ts is None else ts
    if not ts > 0:
        raise ValueError(f"degenerate placement: ts={ts}")
    lam_R, lam_K, lam_N = spec.discrete(ts)
    return place_gains(m, lam_R, lam_K, lam_N)


def reference_matrix(m, g):
    return np.array([[m.A_c - m.B_c * g.k_R]])


def controller_matrix(m, g, variant="conventional"):
    """State matrix of the tracking loop on ``[x_c, x_2]``."""
    first = m.A_c if variant == "conventional" else -m.A_c
    return np.array([
        [first - g.k_p * m.B_c, g.k_i * m.B_c],
        [-1.0, 1.0],
    ])


def observer_matrix(m, g):
    return m.A - m.G_mat @ np.outer(g.L, m.C)


def observer_correct(s, m, g, y_meas):
    """Model error ``e_m = y - y_m`` and the injected noise ``w = L e_m``."""
    e_m = y_meas - (m.C_c * s.x_c + m.C_d[0] * s.x_d1 + m.C_d[1] * s.x_d2)
    return np.array(g.L) * e_m, e_m


def model_predict(s, m, u, w_bar):
    w1, w2, w3 = w_bar
    ts = m.ts
    return EmcState(
        x_c=m.A_c * s.x_c + m.B_c * u + m.H_c[0] * s.x_d1 + m.H_c[1] * s.x_d2 + ts * w1,
        x_d1=m.A_d[0][0] * s.x_d1 + m.A_d[0][1] * s.x_d2 + ts * w2,
        x_d2=m.A_d[1][0] * s.x_d1 + m.A_d[1][1] * s.x_d2 + ts * w3,
        x_ref=s.x_ref,
        x_2=s.x_2,
    )


def reference_step(s, g, r_bar):
    """Returns ``(x_ref_next, u_ff, y_ref)``."""
    x_next = g.a_R * s.x_ref + g.b_R * r_bar
    u_ff = -g.k_R * s.x_ref + g.n_R * r_bar
    return x_next, u_ff, s.x_ref


def control_law(s, g, u_ff, v_max=math.inf):
    """Returns ``(u, u_trk, u_d, e_bar, x_2_next)``.

    The integrator is frozen while the command saturates.
    """
    e_bar = (s.x_ref - (g.Q[0] * s.x_d1 + g.Q[1] * s.x_d2)) - s.x_c
    u_trk = g.k_p * e_bar + g.k_i * s.x_2
    u_d = g.M[0] * s.x_d1 + g.M[1] * s.x_d2
    u_raw = u_ff + u_trk - u_d
    u = min(max(u_raw, -v_max), v_max)
    x_2 = s.x_2 + e_bar if u == u_raw else s.x_2
    return u, u_trk, u_d, e_bar, x_2


def emc_step(s, p, spec, ts, r_bar, y_meas, options=EmcOptions()):
    """One controller cycle: correct with ``y_meas``, command, predict.

    Returns ``(next_state, u, telemetry)`` where ``telemetry`` holds the
    signals logged by the scenario runner.
    """
    m = build_matrices(p, ts, options.disturbance_pole)
    g = schedule_gains(spec, m, ts)
    w_bar, e_m = observer_correct(s, m, g, y_meas)
    y_m = s.x_c
    if options.ordering == "current":
        # fold this step's noise estimate into the state before commanding
        s = EmcState(x_c=s.x_c + ts * w_bar[0], x_d1=s.x_d1 + ts * w_bar[1],
                     x_d2=s.x_d2 + ts * w_bar[2], x_ref=s.x_ref, x_2=s.x_2)
        w_bar = np.zeros(3)
    x_ref_next, u_ff, y_ref = reference_step(s, g, r_bar)
    u, u_trk, u_d, e_bar, x_2_next = control_law(s, g, u_ff, p.v_max)
    nxt = model_predict(s, m, u, w_bar)
    nxt = EmcState(x_c=nxt.x_c, x_d1=nxt.x_d1, x_d2=nxt.x_d2, x_ref=x_ref_next, x_2=x_2_next)
    telemetry = {
        "y_ref": y_ref,
        "y_m": y_m,
        "e_m": e_m,
        "e_bar": e_bar,
        "u": u,
        "u_trk": u_trk,
        "u_d": u_d,
        "u_ff": u_ff,
        "x_d1": s.x_d1,
        "x_d2": s.x_d2,
    }
    return nxt, u, telemetry
