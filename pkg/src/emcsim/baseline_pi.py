"""PI speed controller for the benchmark runs.

The integral is accumulated with forward Euler using the actual interval of
each step, and is frozen while the output saturates (conditional
integration).
"""

from dataclasses import dataclass

__all__ = ["PiParams", "PiState", "pi_step", "DEFAULT_PI"]


@dataclass(frozen=True)
class PiParams:
    k_p_pi: float = 1.35
    k_i_pi: float = 11.25
    v_max: float = 12.0

    def __post_init__(self):
        if self.k_p_pi < 0 or self.k_i_pi < 0:
            raise ValueError("PI gains must be non-negative")
        if not self.v_max > 0:
            raise ValueError(f"v_max must be positive, got {self.v_max}")


@dataclass(frozen=True)
class PiState:
    integral: float = 0.0


DEFAULT_PI = PiParams(k_p_pi=1.35, k_i_pi=11.25)


def pi_step(s, p, r_bar, y_meas, ts):
    """Returns ``(next_state, u)``."""
    if not ts > 0:
        raise ValueError(f"ts must be positive, got {ts}")
    e = r_bar - y_meas
    candidate = s.integral + e * ts
    u_raw = p.k_p_pi * e + p.k_i_pi * candidate
    u = min(max(u_raw, -p.v_max), p.v_max)
    if abs(u_raw) <= p.v_max:
        return PiState(candidate), u
    return s, u
