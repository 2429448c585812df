"""Truth model of the DC motor used in closed-loop simulation.

The motor is the two-pole continuous model

    omega / V = (1 / k_v) / ((tau_m s + 1) (tau_a s + 1))

realized with the states ``omega`` (speed) and ``omega_dot_aux`` (the
armature lag, in rad/s-equivalent units), plus the true shaft angle so the
encoder can count edges.  Each call to :func:`plant_step` propagates the
state exactly over one sampling interval with the command held constant.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .numerics import zoh_discretize

__all__ = [
    "DEFAULT_TAU_M",
    "DEFAULT_TAU_A",
    "DEFAULT_K_V",
    "PlantParams",
    "PlantState",
    "DisturbanceProfile",
    "tf_coefficients",
    "tf_poles",
    "params_from_coefficients",
    "plant_step",
    "measure_speed",
    "encoder_resolution",
]

# Recovered from beta0 = 0.1313, alpha0 = -0.1471, alpha1 = -0.4835 at T = 0.01 s
# (see params_from_coefficients).
DEFAULT_TAU_M = 0.036053059014618
DEFAULT_TAU_A = 0.002508634930170
DEFAULT_K_V = 1.406702208682407


@dataclass(frozen=True)
class PlantParams:
    tau_m: float = DEFAULT_TAU_M
    tau_a: float = DEFAULT_TAU_A
    k_v: float = DEFAULT_K_V
    v_max: float = 12.0
    encoder_cpr: int = 720

    def __post_init__(self):
        if not (self.tau_m > self.tau_a > 0):
            raise ValueError(f"need tau_m > tau_a > 0, got tau_m={self.tau_m}, tau_a={self.tau_a}")
        if not self.k_v > 0:
            raise ValueError(f"k_v must be positive, got {self.k_v}")
        if not self.v_max > 0:
            raise ValueError(f"v_max must be positive, got {self.v_max}")
        if int(self.encoder_cpr) != self.encoder_cpr or self.encoder_cpr <= 0:
            raise ValueError(f"encoder_cpr must be a positive integer, got {self.encoder_cpr}")


@dataclass(frozen=True)
class PlantState:
    omega: float = 0.0
    omega_dot_aux: float = 0.0
    theta_counts: int = 0
    d_load: float = 0.0
    theta: float = 0.0  # true shaft angle [rad]


@dataclass(frozen=True)
class DisturbanceProfile:
    """Load disturbance in rad/s-equivalent units (unit DC gain on speed).

    ``ramp`` grows at ``magnitude`` per second after ``start_time``;
    ``sinusoid`` has amplitude ``magnitude`` and frequency ``frequency`` Hz.
    """

    kind: str = "none"
    magnitude: float = 0.0
    start_time: float = 0.0
    frequency: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "step", "ramp", "sinusoid"):
            raise ValueError(f"unknown disturbance kind {self.kind!r}")
        if self.magnitude < 0:
            raise ValueError("disturbance magnitude must be >= 0")
        if self.start_time < 0:
            raise ValueError("disturbance start_time must be >= 0")

    def value(self, t):
        if self.kind == "none" or t < self.start_time:
            return 0.0
        if self.kind == "step":
            return self.magnitude
        if self.kind == "ramp":
            return self.magnitude * (t - self.start_time)
        return self.magnitude * math.sin(2.0 * math.pi * self.frequency * (t - self.start_time))


def tf_coefficients(p, t):
    """Discrete motor transfer function ``beta0 (z + 1) / (z^2 + alpha1 z + alpha0)``.

    Returns ``(beta0, alpha0, alpha1)`` for sampling period ``t``.
    """
    if not t > 0:
        raise ValueError(f"sampling period must be positive, got {t}")
    den = p.tau_m * t + 2.0 * p.tau_m * p.tau_a
    beta0 = t * t / (p.k_v * den)
    alpha0 = (t * t - p.tau_m * t + 2.0 * p.tau_m * p.tau_a) / den
    alpha1 = (t * t - 4.0 * p.tau_m * p.tau_a) / den
    return beta0, alpha0, alpha1


def tf_poles(p, t):
    """Roots of ``z^2 + alpha1 z + alpha0``, largest real part first."""
    _, alpha0, alpha1 = tf_coefficients(p, t)
    roots = np.roots([1.0, alpha1, alpha0])
    return sorted((complex(r) for r in roots), key=lambda z: (-z.real, z.imag))


def params_from_coefficients(beta0, alpha0, alpha1, t, **kwargs):
    """Invert :func:`tf_coefficients` for ``tau_m``, ``tau_a`` and ``k_v``.

    With ``S = tau_m t`` and ``P = tau_m tau_a`` the two denominator
    equations are linear in ``(S, P)``.
    """
    # alpha0 (S + 2P) = t^2 - S + 2P ;  alpha1 (S + 2P) = t^2 - 4P
    a = np.array([[alpha0 + 1.0, 2.0 * alpha0 - 2.0], [alpha1, 2.0 * alpha1 + 4.0]])
    s, prod = np.linalg.solve(a, [t * t, t * t])
    tau_m = s / t
    tau_a = prod / tau_m
    k_v = t * t / (beta0 * (s + 2.0 * prod))
    return PlantParams(tau_m=tau_m, tau_a=tau_a, k_v=k_v, **kwargs)


def _continuous_model(p):
    # states [omega, aux, theta], inputs [volts, disturbance]
    a = np.array([
        [-1.0 / p.tau_m, 1.0 / p.tau_m, 0.0],
        [0.0, -1.0 / p.tau_a, 0.0],
        [1.0, 0.0, 0.0],
    ])
    b = np.array([
        [0.0, 1.0 / p.tau_m],
        [1.0 / (p.tau_a * p.k_v), 0.0],
        [0.0, 0.0],
    ])
    return a, b


def plant_step(s, p, v_applied, profile, t_now, dt):
    """Advance the motor by ``dt`` seconds with the voltage held constant.

    The voltage is clamped to ``+-v_max`` and the disturbance is sampled at
    ``t_now`` and held over the interval.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    v = min(max(float(v_applied), -p.v_max), p.v_max)
    d = profile.value(t_now)
    a, b = _continuous_model(p)
    a_d, b_d = zoh_discretize(a, b, dt)
    x = a_d @ np.array([s.omega, s.omega_dot_aux, s.theta]) + b_d @ np.array([v, d])
    counts = math.floor(x[2] * p.encoder_cpr / (2.0 * math.pi))
    return replace(s, omega=float(x[0]), omega_dot_aux=float(x[1]), theta=float(x[2]),
                   theta_counts=int(counts), d_load=d)


def measure_speed(s_prev, s_now, p, dt):
    """Encoder speed estimate: count difference over ``dt`` in rad/s."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    return (s_now.theta_counts - s_prev.theta_counts) * 2.0 * math.pi / p.encoder_cpr / dt


def encoder_resolution(p, dt):
    """Speed represented by a single encoder count over ``dt``."""
    return 2.0 * math.pi / p.encoder_cpr / dt
