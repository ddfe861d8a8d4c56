"""Model-building diagnostics: sample ACF/PACF, residual dependence checks
against simulated i.i.d. bounds, and stable qq-plot data.

Sample correlations remain informative for order identification even when
the process has infinite variance, which is why the dependence checks
simulate their own null bounds instead of using Bartlett bands.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import stable_dist
from ._parallel import parallel_map
from .exceptions import DomainError, InputError

__all__ = ["acf", "pacf", "dependence_bounds", "qq_points",
           "DiagnosticsReport", "build_report"]


def acf(x, max_lag: int) -> np.ndarray:
    """Mean-corrected sample autocorrelations at lags 0..max_lag."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    if not 0 <= max_lag < n:
        raise DomainError(f"max_lag must be in [0, {n - 1}]")
    xc = x - x.mean()
    denom = float(xc @ xc)
    if denom == 0.0:
        raise InputError("constant series has undefined autocorrelations")
    out = np.empty(max_lag + 1)
    out[0] = 1.0
    for h in range(1, max_lag + 1):
        out[h] = float(xc[h:] @ xc[:n - h]) / denom
    return out


def pacf(x, max_lag: int) -> np.ndarray:
    """Partial autocorrelations at lags 0..max_lag by Durbin-Levinson."""
    rho = acf(x, max_lag)
    out = np.empty(max_lag + 1)
    out[0] = 1.0
    if max_lag == 0:
        return out
    phi_prev = np.array([rho[1]])
    out[1] = rho[1]
    v = 1.0 - rho[1] ** 2
    for k in range(2, max_lag + 1):
        num = rho[k] - float(phi_prev @ rho[k - 1:0:-1])
        a = num / v if v > 0 else 0.0
        out[k] = a
        phi = np.empty(k)
        phi[:k - 1] = phi_prev - a * phi_prev[::-1]
        phi[k - 1] = a
        v *= (1.0 - a * a)
        phi_prev = phi
    return out


def _abs_sq_acfs(z, lags):
    zc = z - z.mean()
    a = acf(np.abs(zc), lags)[1:]
    b = acf(zc ** 2, lags)[1:]
    return a, b


def dependence_bounds(tau: stable_dist.StableParams, n_res: int, lags: int,
                      M: int = 10_000, rng=None, seed: int | None = None):
    """Per-lag 95% null bounds for |residual| and residual^2 correlations.

    Simulates M sets of n_res i.i.d. draws from tau, mean-corrects, computes
    lag-1..lags correlations of absolute values and squares, and returns the
    2.5%/97.5% empirical quantiles: (abs_lo, abs_hi, sq_lo, sq_hi).
    """
    if M < 100:
        raise DomainError("M must be at least 100")
    if rng is None:
        rng = np.random.default_rng(seed)
    elif seed is not None:
        raise DomainError("pass either rng or seed, not both")

    seeds = rng.bit_generator.random_raw(M)

    def one(i):
        r = np.random.default_rng(np.random.SeedSequence(seeds[i]))
        z = stable_dist.sample(n_res, tau, r)
        return _abs_sq_acfs(z, lags)

    pairs = parallel_map(one, range(M))
    abs_mat = np.array([p[0] for p in pairs])
    sq_mat = np.array([p[1] for p in pairs])
    return (np.quantile(abs_mat, 0.025, axis=0),
            np.quantile(abs_mat, 0.975, axis=0),
            np.quantile(sq_mat, 0.025, axis=0),
            np.quantile(sq_mat, 0.975, axis=0))


def qq_points(z, tau: stable_dist.StableParams):
    """(theoretical, empirical) quantile pairs at plotting positions
    (i - 0.5)/N for the order statistics of z."""
    z = np.asarray(z, dtype=float)
    n = len(z)
    if n == 0:
        raise DomainError("residuals must be nonempty")
    table = None
    if tau.alpha < 2.0:
        table = stable_dist.build_density_table(tau.alpha, tau.beta)
    qs = (np.arange(1, n + 1) - 0.5) / n
    theo = np.array([stable_dist.quantile(q, tau, table=table) for q in qs])
    return np.column_stack([theo, np.sort(z)])


@dataclass(frozen=True)
class DiagnosticsReport:
    """Plot-ready diagnostic arrays for one fitted model."""

    acf: np.ndarray
    pacf: np.ndarray
    aic_rows: list
    abs_acf: np.ndarray
    sq_acf: np.ndarray
    abs_lo: np.ndarray
    abs_hi: np.ndarray
    sq_lo: np.ndarray
    sq_hi: np.ndarray
    qq: np.ndarray
    tau: stable_dist.StableParams
    max_lag: int
    M: int
    seed: int | None

    def to_dict(self) -> dict:
        t = self.tau
        return {
            "max_lag": self.max_lag,
            "M": self.M,
            "seed": self.seed,
            "tau": {"alpha": t.alpha, "beta": t.beta, "sigma": t.sigma,
                    "mu": t.mu},
            "acf": self.acf.tolist(),
            "pacf": self.pacf.tolist(),
            "aic": self.aic_rows,
            "abs_acf": self.abs_acf.tolist(),
            "sq_acf": self.sq_acf.tolist(),
            "abs_bounds": [self.abs_lo.tolist(), self.abs_hi.tolist()],
            "sq_bounds": [self.sq_lo.tolist(), self.sq_hi.tolist()],
            "qq_theoretical": self.qq[:, 0].tolist(),
            "qq_empirical": self.qq[:, 1].tolist(),
        }


def build_report(x, residuals, tau: stable_dist.StableParams,
                 max_lag: int = 20, M: int = 10_000, seed: int | None = 0,
                 aic_rows: list | None = None) -> DiagnosticsReport:
    """Assemble the full diagnostics report for a fitted model."""
    x = np.asarray(x, dtype=float)
    residuals = np.asarray(residuals, dtype=float)
    a = acf(x, max_lag)
    p = pacf(x, max_lag)
    zc = residuals - residuals.mean()
    abs_a = acf(np.abs(zc), max_lag)[1:]
    sq_a = acf(zc ** 2, max_lag)[1:]
    lo_a, hi_a, lo_s, hi_s = dependence_bounds(
        tau, len(residuals), max_lag, M=M, seed=seed)
    qq = qq_points(residuals, tau)
    return DiagnosticsReport(
        acf=a, pacf=p, aic_rows=aic_rows or [], abs_acf=abs_a, sq_acf=sq_a,
        abs_lo=lo_a, abs_hi=hi_a, sq_lo=lo_s, sq_hi=hi_s, qq=qq, tau=tau,
        max_lag=max_lag, M=M, seed=seed)
