"""One- and two-sided local polynomial weights and point estimates.

Weights are computed from weighted-least-squares normal equations on the
h-rescaled basis (1, x/h, ..., (x/h)^p); the returned weights extract the raw
coefficient on x^v in original coordinates. Observations at the cutoff
(x == 0) belong to the plus side, matching the treatment rule T = 1{x >= 0}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial
from typing import Optional

import numpy as np

from .errors import InsufficientSupport, SingularDesign
from .kernels import KernelSpec

COND_LIMIT = 1e12

SIDES = ("plus", "minus", "jump")


@dataclass
class Dataset:
    """One RD sample: outcome, running variable (cutoff at 0), covariates, treatment."""

    y: np.ndarray
    x: np.ndarray
    z: np.ndarray
    t: Optional[np.ndarray] = None

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=float)
        self.x = np.asarray(self.x, dtype=float)
        self.z = np.asarray(self.z, dtype=float)
        if self.z.ndim == 1:
            self.z = self.z.reshape(-1, 1) if self.z.size else self.z.reshape(len(self.x), 0)
        n = len(self.x)
        if len(self.y) != n or self.z.shape[0] != n:
            raise ValueError("y, x, z must share the same length")
        if self.t is not None:
            self.t = np.asarray(self.t, dtype=float)
            if len(self.t) != n:
                raise ValueError("t must share the sample length")
            vals = np.unique(self.t)
            if not np.all(np.isin(vals, (0.0, 1.0))):
                raise ValueError("treatment column must contain only 0 and 1")

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def d(self) -> int:
        return self.z.shape[1]


@dataclass
class LocalPolyWeights:
    """Per-observation weights for one (side, v, p, h) local polynomial fit."""

    side: str
    v: int
    p: int
    h: float
    w: np.ndarray
    n_plus: int = 0
    n_minus: int = 0


@dataclass
class RdFit:
    """Point estimate plus inference ingredients for one estimation run."""

    tau_hat: float
    se: float
    h: float
    p: int
    v: int
    n_eff_left: int
    n_eff_right: int
    ci: Optional["object"] = None
    diagnostics: dict = field(default_factory=dict)


def _side_mask(x: np.ndarray, side: str) -> np.ndarray:
    return x >= 0 if side == "plus" else x < 0


def _one_sided_weights(
    x: np.ndarray,
    kernel: KernelSpec,
    h: float,
    p: int,
    v: int,
    side: str,
    subset: Optional[np.ndarray] = None,
) -> tuple[np.ndarray, int]:
    """Weight vector (full length) and the count of nonzero-kernel points used."""
    n = len(x)
    mask = _side_mask(x, side)
    if subset is not None:
        sub = np.zeros(n, dtype=bool)
        sub[subset] = True
        mask = mask & sub
    u = x / h
    kw = kernel.weights(u) * mask
    idx = np.nonzero(kw > 0)[0]
    if len(idx) < p + 1:
        raise InsufficientSupport(
            f"{side} side has {len(idx)} usable points at h={h:.6g}, need {p + 1}"
        )
    ui = u[idx]
    basis = ui[:, None] ** np.arange(p + 1)
    kwi = kw[idx]
    s = (basis * kwi[:, None]).T @ basis
    sv = np.linalg.svd(s, compute_uv=False)
    if sv[-1] <= 0 or sv[0] / sv[-1] > COND_LIMIT:
        raise SingularDesign(
            f"local design on {side} side is rank deficient at h={h:.6g} (p={p})"
        )
    ev = np.zeros(p + 1)
    ev[v] = 1.0
    a = np.linalg.solve(s, ev)
    w = np.zeros(n)
    # coefficient on (x/h)^v maps to the x^v coefficient via h^-v
    w[idx] = (basis @ a) * kwi / h**v
    return w, len(idx)


def local_poly_weights(
    x: np.ndarray,
    kernel: KernelSpec,
    h: float,
    p: int,
    v: int,
    side: str,
    subset: Optional[np.ndarray] = None,
) -> LocalPolyWeights:
    """Weights w*_{i,v,p}(h) for one side, or jump weights w+ - w-.

    ``subset`` restricts the fit to the given observation indices (weights for
    everything else are zero); used for per-fold estimation.
    """
    x = np.asarray(x, dtype=float)
    if h <= 0:
        raise ValueError("bandwidth must be positive")
    if not 0 <= v <= p:
        raise ValueError("need 0 <= v <= p")
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}")
    if side == "jump":
        wp, np_ = _one_sided_weights(x, kernel, h, p, v, "plus", subset)
        wm, nm = _one_sided_weights(x, kernel, h, p, v, "minus", subset)
        return LocalPolyWeights("jump", v, p, h, wp - wm, n_plus=np_, n_minus=nm)
    w, used = _one_sided_weights(x, kernel, h, p, v, side, subset)
    counts = {"n_plus": used} if side == "plus" else {"n_minus": used}
    return LocalPolyWeights(side, v, p, h, w, **counts)


def fold_restricted_weights(
    x: np.ndarray,
    kernel: KernelSpec,
    h: float,
    p: int,
    v: int,
    side: str,
    fold: np.ndarray,
) -> LocalPolyWeights:
    """Weights computed from the given fold's observations only."""
    return local_poly_weights(x, kernel, h, p, v, side, subset=np.asarray(fold))


def point_estimate(
    x: np.ndarray,
    outcome: np.ndarray,
    kernel: KernelSpec,
    h: float,
    p: int = 1,
    v: int = 0,
) -> float:
    """v! times the jump-weight inner product with the outcome column."""
    w = local_poly_weights(x, kernel, h, p, v, "jump")
    return factorial(v) * float(w.w @ outcome)


def rd_point_estimate(
    data: Dataset,
    outcome: str | np.ndarray,
    kernel: KernelSpec,
    h: float,
    p: int = 1,
    v: int = 0,
) -> float:
    """RD jump (or derivative-jump) estimate on a chosen outcome column.

    ``outcome`` may be "y", "t", or an explicit array aligned with the data
    (e.g. cross-fitted adjusted outcomes).
    """
    col = _outcome_column(data, outcome)
    return point_estimate(data.x, col, kernel, h, p, v)


def _outcome_column(data: Dataset, outcome: str | np.ndarray) -> np.ndarray:
    if isinstance(outcome, str):
        if outcome == "y":
            return data.y
        if outcome == "t":
            if data.t is None:
                raise ValueError("dataset has no treatment column")
            return data.t
        raise ValueError(f"unknown outcome selector {outcome!r}")
    col = np.asarray(outcome, dtype=float)
    if len(col) != data.n:
        raise ValueError("outcome column length mismatch")
    return col
