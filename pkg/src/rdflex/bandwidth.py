"""Data-driven bandwidth selection.

Three policies:

* ``select_cct_mse`` -- the three-step MSE-optimal selector (pilot scale
  v_n, pilot-of-pilot c_n from a global quartic curvature estimate, pilot b_n
  from local-cubic third-derivative objects, final h_n from local-quadratic
  second-derivative objects). Wherever the printed step formulas involve a
  standard-error term, the squared standard error is used: that is the scaling
  under which n h^(1+2v) se^2 converges to a constant and each step's output
  settles to a limit.
* ``select_bias_aware`` -- minimizes the worst-case criterion implied by a
  second-derivative bound over a log-spaced grid with golden-section
  refinement (criterion="mse" minimizes bias_bound^2 + se^2, criterion="flci"
  minimizes the bias-aware interval half-length).
* ``select_undersmooth`` -- n^(-1/20) times an MSE-optimal bandwidth.

All selectors operate on a running variable and an (already adjusted) outcome
column; intermediate quantities are kept for diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Optional

import numpy as np

from .errors import DegenerateCurvature, DegenerateRunning, InsufficientSupport, SingularDesign
from .inference import NnVarianceConfig, bias_bound, nn_sigma2_corrected, standard_error, z_crit
from .kernels import KernelSpec, bias_constant, bias_constant_jump
from .locpoly import local_poly_weights

GRID_SIZE = 60
REFINE_RTOL = 1e-4
CURVATURE_FLOOR = 1e-12


@dataclass
class BandwidthSelection:
    h: float
    method: str
    intermediates: dict = field(default_factory=dict)


def pilot_v_n(x: np.ndarray) -> float:
    """Rule-of-thumb pilot scale 2.58 min(S_X, IQR/1.349) n^(-1/5)."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    if n < 10:
        raise InsufficientSupport("need at least 10 observations for the pilot scale")
    s = float(np.std(x, ddof=1))
    q25, q75 = np.percentile(x, [25.0, 75.0])
    iqr = float(q75 - q25)
    v = 2.58 * min(s, iqr / 1.349) * n ** (-0.2)
    if v <= 0:
        raise DegenerateRunning("running variable has no spread")
    return v


def _feasible_hmin(x: np.ndarray, p: int) -> float:
    """Smallest bandwidth giving each side p+2 points with nonzero kernel weight."""
    need = p + 2
    hs = []
    for mask in (x >= 0, x < 0):
        ax = np.sort(np.abs(x[mask]))
        if len(ax) < need:
            raise InsufficientSupport(f"side has {len(ax)} points, need {need}")
        hs.append(ax[need - 1])
    return max(hs) * (1.0 + 1e-7) + 1e-300


def _clamp(h: float, lo: float, hi: float) -> float:
    return min(max(h, lo), hi)


def _se2(x, m, kernel, h, p, v, sigma2) -> float:
    w = local_poly_weights(x, kernel, h, p, v, "jump")
    return (factorial(v) ** 2) * float(np.sum(w.w**2 * sigma2))


def _beta_side(x, m, kernel, h, p, v, side) -> float:
    w = local_poly_weights(x, kernel, h, p, v, side)
    return factorial(v) * float(w.w @ m)


def _global_quartic_coef(x: np.ndarray, m: np.ndarray, side: str) -> float:
    """Coefficient on x^4/4! in an unweighted global quartic fit on one side."""
    mask = x >= 0 if side == "plus" else x < 0
    if mask.sum() < 6:
        raise InsufficientSupport(f"{side} side too small for a global quartic")
    xs = x[mask]
    basis = np.column_stack([xs**j / factorial(j) for j in range(5)])
    coef, *_ = np.linalg.lstsq(basis, m[mask], rcond=None)
    return float(coef[4])


def select_cct_mse(
    x: np.ndarray,
    m: np.ndarray,
    kernel: KernelSpec,
    cfg: NnVarianceConfig = NnVarianceConfig(),
    sigma2: Optional[np.ndarray] = None,
) -> BandwidthSelection:
    """Three-step MSE-optimal bandwidth on the (adjusted) outcome column."""
    x = np.asarray(x, dtype=float)
    m = np.asarray(m, dtype=float)
    n = len(x)
    if sigma2 is None:
        sigma2 = nn_sigma2_corrected(x, m, cfg)
    xmax = float(np.max(np.abs(x)))

    v_n = _clamp(pilot_v_n(x), _feasible_hmin(x, 3), xmax)

    # Step 0: global quartic curvature and the pilot-of-pilot c_n
    g_plus = _global_quartic_coef(x, m, "plus")
    g_minus = _global_quartic_coef(x, m, "minus")
    gdiff = g_plus - g_minus
    if abs(gdiff) < CURVATURE_FLOOR:
        raise DegenerateCurvature("fourth-derivative difference is numerically zero")
    b33 = bias_constant_jump(kernel, 3, 3)
    c_big = 7.0 * n * v_n**7 * _se2(x, m, kernel, v_n, 3, 3, sigma2) / (2.0 * b33**2 * gdiff**2)
    c_n = _clamp(c_big ** (1.0 / 9.0) * n ** (-1.0 / 9.0), _feasible_hmin(x, 3), xmax)

    # Step 1: pilot b_n for the second-derivative objects
    b22 = bias_constant_jump(kernel, 2, 2)
    bsum = _beta_side(x, m, kernel, c_n, 3, 3, "plus") + _beta_side(x, m, kernel, c_n, 3, 3, "minus")
    b_big = (
        5.0
        * n
        * v_n**5
        * _se2(x, m, kernel, v_n, 2, 2, sigma2)
        / (2.0 * b22**2 * (bsum**2 + 3.0 * _se2(x, m, kernel, c_n, 3, 3, sigma2)))
    )
    b_n = _clamp(b_big ** (1.0 / 7.0) * n ** (-1.0 / 7.0), _feasible_hmin(x, 2), xmax)

    # Step 2: the main bandwidth. The printed difference form of the jump bias
    # constant degenerates to zero for (v=0, p=1); the constant multiplying the
    # estimated curvature difference is the one-sided B+_{0,1}.
    b01 = bias_constant(kernel, 0, 1, "plus")
    bdiff = _beta_side(x, m, kernel, b_n, 2, 2, "plus") - _beta_side(x, m, kernel, b_n, 2, 2, "minus")
    h_big = (
        n
        * v_n
        * _se2(x, m, kernel, v_n, 0, 1, sigma2)
        / (4.0 * b01**2 * (bdiff**2 + 3.0 * _se2(x, m, kernel, b_n, 2, 2, sigma2)))
    )
    h_n = _clamp(h_big ** 0.2 * n ** (-0.2), _feasible_hmin(x, 1), xmax)

    inter = {
        "v_n": v_n,
        "C_n": c_big,
        "c_n": c_n,
        "B_n": b_big,
        "b_n": b_n,
        "H_n": h_big,
        "gamma4_plus": g_plus,
        "gamma4_minus": g_minus,
        "beta3_sum": bsum,
        "beta2_diff": bdiff,
    }
    return BandwidthSelection(h_n, "cct_mse", inter)


def select_bias_aware(
    x: np.ndarray,
    m: np.ndarray,
    kernel: KernelSpec,
    b_y: float,
    alpha: float = 0.05,
    cfg: NnVarianceConfig = NnVarianceConfig(),
    sigma2: Optional[np.ndarray] = None,
    criterion: str = "mse",
) -> BandwidthSelection:
    """Bandwidth minimizing the bias-aware criterion for the given bound b_y."""
    if b_y < 0:
        raise ValueError("smoothness bound must be >= 0")
    if criterion not in ("mse", "flci"):
        raise ValueError("criterion must be 'mse' or 'flci'")
    x = np.asarray(x, dtype=float)
    m = np.asarray(m, dtype=float)
    if sigma2 is None:
        sigma2 = nn_sigma2_corrected(x, m, cfg)
    h_lo = _feasible_hmin(x, 1)
    h_hi = float(np.max(np.abs(x)))
    if h_lo >= h_hi:
        raise DegenerateRunning("no feasible bandwidth range")

    def objective(h: float) -> float:
        try:
            w = local_poly_weights(x, kernel, h, 1, 0, "jump")
        except (InsufficientSupport, SingularDesign):
            return np.inf
        se = standard_error(w, sigma2)
        b = abs(bias_bound(x, w, b_y))
        if criterion == "mse":
            return b * b + se * se
        if se <= 0:
            return b
        return z_crit(alpha, b / se) * se

    grid = np.geomspace(h_lo, h_hi, GRID_SIZE)
    vals = np.array([objective(h) for h in grid])
    k = int(np.argmin(vals))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, GRID_SIZE - 1)]
    h_star, f_star = _golden_section(objective, lo, hi)
    if vals[k] < f_star:
        h_star = float(grid[k])
    return BandwidthSelection(float(h_star), "bias_aware", {"grid_min": float(grid[k])})


def _golden_section(f, lo: float, hi: float) -> tuple[float, float]:
    phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > REFINE_RTOL * b:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


def select_undersmooth(base: BandwidthSelection, n: int) -> BandwidthSelection:
    """Undersmoothing policy: the MSE-optimal bandwidth shrunk by n^(-1/20)."""
    if base.method != "cct_mse":
        raise ValueError("undersmoothing expects an MSE-optimal base bandwidth")
    return BandwidthSelection(base.h * n ** (-1.0 / 20.0), "undersmooth", {"base_h": base.h})
