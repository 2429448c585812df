"""Small dense linear algebra for 1x1 to 4x4 control problems.

Matrices are plain 2-D ``numpy`` arrays and polynomials are 1-D arrays of
coefficients in ascending degree order (``c[0] + c[1] z + ... ``), the same
convention as :mod:`numpy.polynomial.polynomial`.

The eigenvalue routine deliberately avoids LAPACK: it forms the
characteristic polynomial of the (at most 3x3) matrix and solves it in closed
form.  It is used as the independent check of every pole-placement result in
the package, so it must not share code with the placement itself.
"""

import math

import numpy as np

__all__ = [
    "SingularMatrixError",
    "as_mat",
    "poly_from_roots",
    "charpoly",
    "poly_roots",
    "eigenvalues",
    "solve_linear",
    "zoh_discretize",
]

_EPS = np.finfo(float).eps
MAX_DIM = 4


class SingularMatrixError(np.linalg.LinAlgError):
    pass


def as_mat(m, square=False):
    """Validate and return ``m`` as a float 2-D array of at most 4x4."""
    a = np.atleast_2d(np.asarray(m, dtype=float))
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    r, c = a.shape
    if not (1 <= r <= MAX_DIM and 1 <= c <= MAX_DIM):
        raise ValueError(f"matrix shape {a.shape} outside 1..{MAX_DIM}")
    if square and r != c:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def poly_from_roots(roots, tol=1e-12):
    """Monic polynomial (ascending coefficients) with the given roots.

    Complex roots must come in conjugate pairs so the result is real.

    >>> poly_from_roots([0.5, 0.5, 0.5])
    array([-0.125,  0.75 , -1.5  ,  1.   ])
    """
    roots = [complex(r) for r in roots]
    scale = max([1.0] + [abs(r) for r in roots])
    unpaired = [r for r in roots if abs(r.imag) > tol * scale]
    while unpaired:
        r = unpaired.pop()
        match = [i for i, s in enumerate(unpaired) if abs(s - r.conjugate()) <= tol * scale]
        if not match:
            raise ValueError(f"complex root {r} has no conjugate partner")
        unpaired.pop(match[0])

    # highest degree first while multiplying, flipped at the end
    coeffs = np.array([1.0 + 0j])
    for r in roots:
        coeffs = np.append(coeffs, 0) - r * np.append(0, coeffs)
    out = coeffs.real[::-1].copy()
    out[-1] = 1.0
    return out


def charpoly(m):
    """Ascending coefficients of det(zI - m) for a square matrix up to 3x3."""
    a = as_mat(m, square=True)
    n = a.shape[0]
    if n == 1:
        return np.array([-a[0, 0], 1.0])
    if n == 2:
        tr = a[0, 0] + a[1, 1]
        det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
        return np.array([det, -tr, 1.0])
    if n == 3:
        tr = a[0, 0] + a[1, 1] + a[2, 2]
        minors = (
            a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
            + a[0, 0] * a[2, 2] - a[0, 2] * a[2, 0]
            + a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1]
        )
        det = (
            a[0, 0] * (a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
            - a[0, 1] * (a[1, 0] * a[2, 2] - a[1, 2] * a[2, 0])
            + a[0, 2] * (a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0])
        )
        return np.array([-det, minors, -tr, 1.0])
    raise ValueError("charpoly supports matrices up to 3x3")


def _quadratic_roots(b, c):
    # z^2 + b z + c
    half = -0.5 * b
    disc = half * half - c
    if disc >= 0:
        s = math.sqrt(disc)
        big = half + math.copysign(s, half) if half != 0 else s
        if big == 0:
            return [0j, 0j]
        return [complex(big), complex(c / big)]
    s = math.sqrt(-disc)
    return [complex(half, s), complex(half, -s)]


def _cbrt(x):
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


def _cubic_roots(b, c, d):
    # z^3 + b z^2 + c z + d, via the depressed cubic t^3 + p t + q, z = t - b/3
    shift = -b / 3.0
    p = c - b * b / 3.0
    q = 2.0 * b ** 3 / 27.0 - b * c / 3.0 + d
    disc = 4.0 * p ** 3 + 27.0 * q * q
    if disc < 0:
        # three distinct real roots (p < 0 here)
        r = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * r)
        phi = math.acos(max(-1.0, min(1.0, arg)))
        return [complex(r * math.cos((phi - 2.0 * math.pi * k) / 3.0) + shift) for k in range(3)]
    s = math.sqrt(disc / 108.0)
    t1 = _cbrt(-0.5 * q + s) + _cbrt(-0.5 * q - s)
    im = math.sqrt(max(0.0, 0.75 * t1 * t1 + p))
    if im == 0.0:
        return [complex(t1 + shift), complex(-0.5 * t1 + shift), complex(-0.5 * t1 + shift)]
    return [complex(t1 + shift), complex(-0.5 * t1 + shift, im), complex(-0.5 * t1 + shift, -im)]


def poly_roots(coeffs):
    """Roots of a real polynomial of degree <= 3 given in ascending order."""
    c = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    if c.size == 0:
        raise ValueError("zero polynomial has no well-defined roots")
    c = c / c[-1]
    deg = c.size - 1
    if deg == 0:
        roots = []
    elif deg == 1:
        roots = [complex(-c[0])]
    elif deg == 2:
        roots = _quadratic_roots(c[1], c[0])
    elif deg == 3:
        roots = _cubic_roots(c[2], c[1], c[0])
    else:
        raise ValueError("closed-form roots only up to degree 3")
    return sorted(roots, key=lambda z: (z.real, z.imag))


def eigenvalues(m):
    """Eigenvalues of a square matrix up to 3x3 as roots of det(zI - m).

    Returned as a list of complex numbers sorted by real part, then by
    imaginary part.  Repeated and tightly clustered eigenvalues are only
    resolved to about ``eps ** (1 / k)`` for a cluster of multiplicity ``k``,
    which is a property of the matrix, not of the formulas.  Triangular
    matrices return their diagonal exactly.
    """
    a = as_mat(m, square=True)
    if not np.tril(a, -1).any() or not np.triu(a, 1).any():
        return sorted((complex(v) for v in np.diag(a)), key=lambda z: (z.real, z.imag))
    return poly_roots(charpoly(a))


def solve_linear(a, b):
    """Solve ``a x = b`` for a nonsingular square matrix up to 3x3.

    Raises :class:`SingularMatrixError` when ``|det(a)|`` is below ``1e-12``
    relative to ``||a||_inf ** n``.
    """
    a = as_mat(a, square=True)
    b = np.asarray(b, dtype=float)
    n = a.shape[0]
    if n > 3:
        raise ValueError("solve_linear supports matrices up to 3x3")
    if b.shape[0] != n:
        raise ValueError(f"right-hand side of length {b.shape[0]} for a {n}x{n} system")
    scale = np.abs(a).sum(axis=1).max()
    det = np.linalg.det(a)
    if scale == 0 or abs(det) <= 1e-12 * scale ** n:
        cond = np.linalg.cond(a) if scale else np.inf
        raise SingularMatrixError(f"matrix is singular to working precision (condition estimate {cond:.3e})")
    return np.linalg.solve(a, b)


def _expm(m, terms=16):
    norm = np.abs(m).sum(axis=1).max()
    squarings = 0
    if norm >= 0.5:
        squarings = int(math.ceil(math.log2(norm / 0.5))) + 1
    x = m / 2.0 ** squarings
    out = np.eye(m.shape[0])
    term = np.eye(m.shape[0])
    for k in range(1, terms + 1):
        term = term @ x / k
        out = out + term
    for _ in range(squarings):
        out = out @ out
    return out


def zoh_discretize(a_ct, b_ct, dt):
    """Zero-order-hold discretization of ``x' = a x + b u`` over ``dt``.

    Returns ``(a_d, b_d)`` with ``a_d = exp(a dt)`` and
    ``b_d = int_0^dt exp(a s) ds b``.  Both come from one exponential of the
    augmented matrix ``[[a, b], [0, 0]] * dt`` evaluated by scaling and
    squaring of a truncated Taylor series.  ``b_ct`` may be a vector or a
    matrix with one column per input; the output keeps its shape.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    a = np.atleast_2d(np.asarray(a_ct, dtype=float))
    b = np.asarray(b_ct, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"expected a square state matrix, got shape {a.shape}")
    b2 = b.reshape(n, -1)
    m = b2.shape[1]
    aug = np.zeros((n + m, n + m))
    aug[:n, :n] = a
    aug[:n, n:] = b2
    e = _expm(aug * dt)
    return e[:n, :n], e[:n, n:].reshape(b.shape)
