"""Kernel functions and kernel-dependent constants.

Everything downstream (asymptotic variance, leading-bias terms, bandwidth
steps) reduces to one-sided moments nu_j = int_0^1 v^j K(v) dv and moments of
K^2. For the three built-in kernels these are rational numbers, so all
constants are computed in exact rational arithmetic and converted to float at
the boundary. ``moment_by_quadrature`` provides the independent numerical
cross-check used by the test suite.

Derivative convention used package-wide: a local polynomial fit of order p
returns raw coefficients of (1, x, ..., x^p); operations that report the v-th
derivative multiply the v-th coefficient by v!. The stored bias constant
``bias_constant(k, v, p, side)`` is v!/(p+1)! times e_v' S^-1 c, so the
leading bias of the v-th derivative estimate is

    h^(p+1-v) * bias_constant * d^(p+1)/dx^(p+1) E[m(x)] at 0^side,

which lets the bandwidth-selection formulas be applied as printed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import numpy as np

KERNEL_KINDS = ("uniform", "triangular", "epanechnikov")


@dataclass(frozen=True)
class KernelSpec:
    """A symmetric density kernel supported on [-1, 1]."""

    kind: str = "triangular"

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"unknown kernel {self.kind!r}; choose from {KERNEL_KINDS}")

    def weights(self, u: np.ndarray) -> np.ndarray:
        """Evaluate K at the rescaled points u; support is the closed interval."""
        u = np.asarray(u, dtype=float)
        a = np.abs(u)
        inside = a <= 1.0
        if self.kind == "uniform":
            vals = 0.5 * inside
        elif self.kind == "triangular":
            vals = np.where(inside, 1.0 - a, 0.0)
        else:  # epanechnikov
            vals = np.where(inside, 0.75 * (1.0 - u * u), 0.0)
        return vals


def kernel_eval(k: KernelSpec, v: float) -> float:
    """K(v) for a scalar argument."""
    return float(k.weights(np.asarray([v]))[0])


def _moment_exact(kind: str, j: int) -> Fraction:
    """nu_j = int_0^1 v^j K(v) dv, exactly."""
    if kind == "uniform":
        return Fraction(1, 2 * (j + 1))
    if kind == "triangular":
        return Fraction(1, (j + 1) * (j + 2))
    # epanechnikov: (3/4) (1/(j+1) - 1/(j+3))
    return Fraction(3, 4) * (Fraction(1, j + 1) - Fraction(1, j + 3))


def _sq_moment_exact(kind: str, j: int) -> Fraction:
    """int_0^1 v^j K(v)^2 dv, exactly."""
    if kind == "uniform":
        return Fraction(1, 4 * (j + 1))
    if kind == "triangular":
        # (1-v)^2 v^j
        return Fraction(1, j + 1) - Fraction(2, j + 2) + Fraction(1, j + 3)
    # (3/4)^2 (1-v^2)^2 v^j
    return Fraction(9, 16) * (Fraction(1, j + 1) - Fraction(2, j + 3) + Fraction(1, j + 5))


def one_sided_moments(k: KernelSpec, j_max: int) -> np.ndarray:
    """nu_0 .. nu_{j_max} as floats (exact rationals underneath)."""
    if j_max < 0:
        raise ValueError("j_max must be >= 0")
    return np.array([float(_moment_exact(k.kind, j)) for j in range(j_max + 1)])


def moment_by_quadrature(k: KernelSpec, j: int, num: int = 200_001) -> float:
    """Composite-Simpson value of int_0^1 v^j K(v) dv (independent cross-check)."""
    v = np.linspace(0.0, 1.0, num)
    f = v**j * k.weights(v)
    return _simpson(f, v)


def _simpson(f: np.ndarray, v: np.ndarray) -> float:
    n = len(v) - 1
    h = (v[-1] - v[0]) / n
    return float(h / 3 * (f[0] + f[-1] + 4 * f[1:-1:2].sum() + 2 * f[2:-1:2].sum()))


def nu_bar_kappa_bar(k: KernelSpec) -> tuple[float, float]:
    """The local linear bias constant nu and variance constant kappa.

    nu = (nu_2^2 - nu_1 nu_3) / (nu_2 nu_0 - nu_1^2)
    kappa = int_0^inf (K(v)(nu_1 v - nu_2))^2 dv / (nu_2 nu_0 - nu_1^2)^2
    """
    n0, n1, n2, n3 = (_moment_exact(k.kind, j) for j in range(4))
    den = n2 * n0 - n1 * n1
    nu = (n2 * n2 - n1 * n3) / den
    # (K(v)(n1 v - n2))^2 = K^2 (n1^2 v^2 - 2 n1 n2 v + n2^2)
    q0, q1, q2 = (_sq_moment_exact(k.kind, j) for j in range(3))
    kappa = (n1 * n1 * q2 - 2 * n1 * n2 * q1 + n2 * n2 * q0) / (den * den)
    return float(nu), float(kappa)


def _solve_exact(a: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    """Gaussian elimination with exact rationals (tiny systems only)."""
    n = len(b)
    m = [row[:] + [b[i]] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular moment matrix (internal defect)")
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[i][n] for i in range(n)]


def _bias_constant_exact(kind: str, v: int, p: int, side: str) -> Fraction:
    if not 0 <= v <= p:
        raise ValueError("need 0 <= v <= p")
    if side not in ("plus", "minus"):
        raise ValueError("side must be 'plus' or 'minus'")
    sgn = 1 if side == "plus" else -1
    mom = [_moment_exact(kind, j) * (sgn**j) for j in range(2 * p + 2)]
    s = [[mom[i + j] for j in range(p + 1)] for i in range(p + 1)]
    c = [mom[p + 1 + j] for j in range(p + 1)]
    raw = _solve_exact(s, c)[v]
    return raw * Fraction(factorial(v), factorial(p + 1))


def bias_constant(k: KernelSpec, v: int, p: int, side: str) -> float:
    """Stored leading-bias constant B*_{v,p} for one side (see module docstring)."""
    return float(_bias_constant_exact(k.kind, v, p, side))


def bias_constant_jump(k: KernelSpec, v: int, p: int) -> float:
    """B_{v,p} = B+_{v,p} - B-_{v,p} (zero whenever p + 1 - v is even)."""
    return float(
        _bias_constant_exact(k.kind, v, p, "plus") - _bias_constant_exact(k.kind, v, p, "minus")
    )
