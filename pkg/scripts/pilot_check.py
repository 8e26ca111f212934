"""Throwaway pilot: calibrate selector choices against published targets (L=0)."""

import numpy as np

from rdflex import KernelSpec, NnVarianceConfig
from rdflex.bandwidth import select_bias_aware, select_cct_mse, select_undersmooth
from rdflex.inference import ci_bias_aware, ci_rbc, ci_undersmoothing, nn_sigma2_corrected, standard_error
from rdflex.locpoly import local_poly_weights


def gen_l0(n, rng):
    x = rng.uniform(-1, 1, n)
    phi = np.sign(x) * (x**2 + 0.5 * x)
    y = (x >= 0) + phi + rng.normal(0.0, 0.5, n)
    return x, y


def main(reps=400, n=2000, seed=7):
    k = KernelSpec("triangular")
    cfg = NnVarianceConfig(3)
    rows = {m: [] for m in ("mse", "flci")}
    cct_rows = []
    for r in range(reps):
        rng = np.random.Generator(np.random.Philox(key=[seed, r]))
        x, y = gen_l0(n, rng)
        s2 = nn_sigma2_corrected(x, y, cfg)
        for crit in ("mse", "flci"):
            sel = select_bias_aware(x, y, k, b_y=2.0, cfg=cfg, sigma2=s2, criterion=crit)
            fit = ci_bias_aware(x, y, k, sel.h, 0.05, 2.0, cfg, sigma2=s2)
            rows[crit].append(
                (sel.h, fit.tau_hat, fit.ci.hi - fit.ci.lo, fit.ci.lo <= 1.0 <= fit.ci.hi)
            )
        sel = select_cct_mse(x, y, k, cfg, sigma2=s2)
        rbc = ci_rbc(x, y, k, sel.h, 0.05, cfg, sigma2=s2)
        us = select_undersmooth(sel, n)
        w = local_poly_weights(x, k, us.h, 1, 0, "jump")
        tau_us = float(w.w @ y)
        se_us = standard_error(w, s2)
        from rdflex.locpoly import RdFit

        ci_us = ci_undersmoothing(RdFit(tau_us, se_us, us.h, 1, 0, 0, 0), 0.05)
        cct_rows.append(
            (
                sel.h,
                us.h,
                rbc.tau_hat,
                rbc.ci.hi - rbc.ci.lo,
                rbc.ci.lo <= 1.0 <= rbc.ci.hi,
                ci_us.lo <= 1.0 <= ci_us.hi,
            )
        )
    for crit in ("mse", "flci"):
        a = np.array(rows[crit], dtype=float)
        print(
            f"bias-aware[{crit}]: avg h={a[:,0].mean():.4f}  bias={a[:,1].mean()-1:.4f} "
            f"sd={a[:,1].std():.4f}  len={a[:,2].mean():.4f}  cov={a[:,3].mean():.4f}"
        )
    c = np.array(cct_rows, dtype=float)
    print(
        f"cct: avg h={c[:,0].mean():.4f}  us h={c[:,1].mean():.4f}  rbc bias={c[:,2].mean()-1:.4f} "
        f"rbc len={c[:,3].mean():.4f}  rbc cov={c[:,4].mean():.4f}  us cov={c[:,5].mean():.4f}"
    )
    print("targets: ba h=0.4320 len=0.3258 cov=.949 |bias|=.0369 sd=.0749 ; cct h=0.2978 us h=0.2036 rbc len=.5218 cov=.948/.945")


if __name__ == "__main__":
    main()
