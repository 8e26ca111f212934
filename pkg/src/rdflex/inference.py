"""Nearest-neighbor variance estimation, standard errors, and confidence intervals.

Three interval constructions are provided: undersmoothing (normal quantile at
an undersmoothed bandwidth), robust bias correction (local quadratic point
estimate and SE at the same bandwidth), and bias-aware (normal-quantile
inflation by the worst-case smoothing bias under a second-derivative bound).

``nn_sigma2`` returns the raw squared deviation of each observation from the
mean of its R nearest same-side neighbors. Under homoskedasticity that raw
quantity has expectation sigma^2 (R+1)/R, so the pipeline standard errors use
``nn_sigma2_corrected`` (scaled by R/(R+1)), matching the convention of the RD
software this estimator interoperates with.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import erf, factorial, sqrt
from typing import Optional

import numpy as np

from .errors import InsufficientNeighbors
from .kernels import KernelSpec
from .locpoly import LocalPolyWeights, RdFit, local_poly_weights


@dataclass(frozen=True)
class NnVarianceConfig:
    """Neighbor count for the nearest-neighbor variance estimator."""

    R: int = 3

    def __post_init__(self):
        if self.R < 1:
            raise ValueError("R must be >= 1")


@dataclass
class ConfidenceInterval:
    lo: float
    hi: float
    level: float
    method: str
    half_length: float
    bias_bound: Optional[float] = None


def norm_cdf(x: float) -> float:
    return 0.5 * (1.0 + erf(x / sqrt(2.0)))


def z_crit(alpha: float, r: float) -> float:
    """Quantile q solving P(|N(r,1)| <= q) = 1 - alpha, by bisection.

    For r = 0 this is the usual two-sided normal quantile; for large r it
    approaches r + (one-sided quantile).
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    if r < 0:
        raise ValueError("r must be >= 0")
    target = 1.0 - alpha

    def cover(q: float) -> float:
        return norm_cdf(q - r) - norm_cdf(-q - r)

    lo, hi = 0.0, r + 10.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if cover(mid) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-13:
            break
    return 0.5 * (lo + hi)


def _side_sigma2(xs: np.ndarray, ms: np.ndarray, orig: np.ndarray, R: int) -> np.ndarray:
    """Raw NN squared deviations for one side; xs sorted ascending (stable)."""
    m = len(xs)
    if m < R + 1:
        raise InsufficientNeighbors(f"side has {m} observations, need at least {R + 1}")
    offs = np.concatenate([np.arange(-(R + 1), 0), np.arange(1, R + 2)])
    pos = np.arange(m)[:, None] + offs[None, :]
    valid = (pos >= 0) & (pos < m)
    pos_c = np.clip(pos, 0, m - 1)
    dist = np.abs(xs[pos_c] - xs[:, None])
    dist[~valid] = np.inf
    order = np.argsort(dist, axis=1, kind="stable")
    dsort = np.take_along_axis(dist, order, axis=1)
    # unique R-th neighbor distance -> selection by distance alone is unambiguous
    clear = dsort[:, R - 1] < dsort[:, R]
    nb_pos = np.take_along_axis(pos_c, order[:, :R], axis=1)
    means = ms[nb_pos].mean(axis=1)
    out = (ms - means) ** 2
    for i in np.nonzero(~clear)[0]:
        d_r = dsort[i, R - 1]
        span = np.nonzero(np.abs(xs - xs[i]) <= d_r)[0]
        cand = [(abs(xs[j] - xs[i]), orig[j], j) for j in span if j != i]
        cand.sort()
        sel = [j for _, _, j in cand[:R]]
        out[i] = (ms[i] - ms[sel].mean()) ** 2
    return out


def nn_sigma2(x: np.ndarray, outcome: np.ndarray, cfg: NnVarianceConfig = NnVarianceConfig()) -> np.ndarray:
    """Per-observation squared deviation from the mean of the R nearest
    same-side neighbors (neighbors exclude the observation itself; ties in
    distance are broken by the smaller original index)."""
    x = np.asarray(x, dtype=float)
    outcome = np.asarray(outcome, dtype=float)
    out = np.empty(len(x))
    for side_mask in (x >= 0, x < 0):
        idx = np.nonzero(side_mask)[0]
        order = np.argsort(x[idx], kind="stable")
        idx = idx[order]
        out[idx] = _side_sigma2(x[idx], outcome[idx], idx, cfg.R)
    return out


def nn_sigma2_corrected(x: np.ndarray, outcome: np.ndarray, cfg: NnVarianceConfig = NnVarianceConfig()) -> np.ndarray:
    """NN variance scaled by R/(R+1) so it is unbiased under homoskedasticity."""
    return nn_sigma2(x, outcome, cfg) * (cfg.R / (cfg.R + 1.0))


def standard_error(weights: LocalPolyWeights, sigma2: np.ndarray) -> float:
    """sqrt(sum_i w_i^2 sigma_i^2), times the v! derivative convention factor."""
    return factorial(weights.v) * float(np.sqrt(np.sum(weights.w**2 * sigma2)))


def bias_bound(x: np.ndarray, weights: LocalPolyWeights, b_y: float) -> float:
    """Worst-case smoothing bias -B_Y/2 sum_i w_i x_i^2 sign(x_i) of the jump."""
    return float(-0.5 * b_y * np.sum(weights.w * x**2 * np.sign(x)))


def _fit_with_se(
    x: np.ndarray,
    outcome: np.ndarray,
    kernel: KernelSpec,
    h: float,
    p: int,
    sigma2: np.ndarray,
) -> RdFit:
    w = local_poly_weights(x, kernel, h, p, 0, "jump")
    tau = float(w.w @ outcome)
    se = standard_error(w, sigma2)
    return RdFit(tau, se, h, p, 0, n_eff_left=w.n_minus, n_eff_right=w.n_plus)


def ci_undersmoothing(fit: RdFit, alpha: float = 0.05) -> ConfidenceInterval:
    """Symmetric normal interval; to be used with an undersmoothed bandwidth."""
    z = z_crit(alpha, 0.0)
    half = z * fit.se
    return ConfidenceInterval(fit.tau_hat - half, fit.tau_hat + half, 1 - alpha, "undersmoothing", half)


def ci_rbc(
    x: np.ndarray,
    outcome: np.ndarray,
    kernel: KernelSpec,
    h: float,
    alpha: float = 0.05,
    cfg: NnVarianceConfig = NnVarianceConfig(),
    sigma2: Optional[np.ndarray] = None,
) -> RdFit:
    """Robust bias-corrected interval: local quadratic estimate and SE at h."""
    if sigma2 is None:
        sigma2 = nn_sigma2_corrected(x, outcome, cfg)
    fit = _fit_with_se(x, outcome, kernel, h, 2, sigma2)
    z = z_crit(alpha, 0.0)
    half = z * fit.se
    fit.ci = ConfidenceInterval(fit.tau_hat - half, fit.tau_hat + half, 1 - alpha, "rbc", half)
    return fit


def ci_bias_aware(
    x: np.ndarray,
    outcome: np.ndarray,
    kernel: KernelSpec,
    h: float,
    alpha: float = 0.05,
    b_y: float = 0.0,
    cfg: NnVarianceConfig = NnVarianceConfig(),
    sigma2: Optional[np.ndarray] = None,
) -> RdFit:
    """Bias-aware interval with the |N(r,1)| critical value at bias ratio r."""
    if b_y < 0:
        raise ValueError("smoothness bound must be >= 0")
    if sigma2 is None:
        sigma2 = nn_sigma2_corrected(x, outcome, cfg)
    w = local_poly_weights(x, kernel, h, 1, 0, "jump")
    tau = float(w.w @ outcome)
    se = standard_error(w, sigma2)
    b = abs(bias_bound(x, w, b_y))
    cv = z_crit(alpha, b / se) if se > 0 else z_crit(alpha, 0.0)
    half = cv * se
    fit = RdFit(tau, se, h, 1, 0, n_eff_left=w.n_minus, n_eff_right=w.n_plus)
    fit.ci = ConfidenceInterval(tau - half, tau + half, 1 - alpha, "bias_aware", half, bias_bound=b)
    return fit
