"""Uncertainty quantification: the m-out-of-n residual bootstrap for the AR
parameters, Fisher-information intervals for the noise parameters, and a
truncated simulator of the limiting objective functional.

The bootstrap resamples fitted residuals, regenerates series through the
fitted factored model with the two-sided recursion, and re-maximizes the
conditional likelihood over theta only (tau held at its estimate).  Scaled
deviations m^{1/alpha_hat} (theta* - theta_hat) approximate the limiting law
of n^{1/alpha} (theta_hat - theta_0), which is why m must grow slower than n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from . import ar_model, stable_dist
from ._parallel import parallel_map
from .exceptions import DomainError, NumericalError
from .likelihood import PENALTY_BASE
from .optimizer import FitResult, nelder_mead

__all__ = ["BootstrapConfig", "BootstrapResult", "WSimConfig",
           "bootstrap_run", "bootstrap_ci", "tau_ci", "simulate_W"]


@dataclass(frozen=True)
class BootstrapConfig:
    """Replicate size m (1 < m < n), replicate count B, and the seed."""

    m: int
    B: int
    seed: int = 0
    burn: int = 500
    starts: int = 16          # theta_hat plus jittered perturbations
    max_iter: int = 400

    def validate(self, n: int):
        if not 1 < self.m < n:
            raise DomainError(
                f"bootstrap size m={self.m} must satisfy 1 < m < n={n} "
                "(the resampling theory requires m/n -> 0)")
        if self.B < 1:
            raise DomainError("B must be >= 1")
        if self.burn < 0:
            raise DomainError("burn must be >= 0")


@dataclass(frozen=True)
class BootstrapResult:
    """Scaled bootstrap deviations and the estimates they are anchored to."""

    theta_devs: np.ndarray      # (n_converged, p)
    phi_devs: np.ndarray        # (n_converged, p)
    converged: np.ndarray       # (B,) bool flags
    alpha_hat: float
    m: int
    theta_hat: np.ndarray
    phi_hat: np.ndarray
    s_hat: int

    @property
    def n_converged(self) -> int:
        return int(self.converged.sum())


def _theta_objective(z_fn, theta, r, s, tab, tau):
    """L*_m at theta with tau fixed; penalized outside the root region."""
    from .likelihood import _root_violation
    if not np.all(np.isfinite(theta)):
        return PENALTY_BASE * 2.0
    viol = _root_violation(theta, r, s)
    if viol > 0.0:
        return PENALTY_BASE * (1.0 + viol)
    z = z_fn(theta)
    ll = float(np.sum(tab.log_pdf((z - tau.mu) / tau.sigma)))
    ll -= len(z) * math.log(tau.sigma)
    if s > 0:
        ll += len(z) * math.log(abs(theta[-1]))
    return ll


def _jitter_feasible(theta, r, s, rng, count):
    """theta plus `count` feasible jittered copies (rejection sampled)."""
    out = [theta.copy()]
    scale = 0.05 * (np.abs(theta) + 0.1)
    tries = 0
    while len(out) < count and tries < 200 * count:
        tries += 1
        cand = theta + scale * rng.standard_normal(len(theta))
        if ar_model.validate_factored(cand, r, s) == ar_model.VALID:
            out.append(cand)
    return out


def bootstrap_run(x, fit: FitResult, cfg: BootstrapConfig) -> BootstrapResult:
    """B bootstrap replicates of the AR-parameter estimator.

    Each replicate resamples m + 2 burn + p residuals i.i.d. from the fitted
    residuals, rebuilds a series through the fitted factored model, and
    maximizes the replicate likelihood over theta with tau held at tau_hat.
    Failed replicate optimizations are dropped and flagged.  Deterministic
    given cfg.seed; replicate substreams do not depend on scheduling.
    """
    x = np.asarray(x, dtype=float)
    n = len(x)
    cfg.validate(n)
    theta_hat = fit.theta_hat.copy()
    s_hat = fit.s_hat
    p = fit.p
    r = p - s_hat
    tau = fit.tau_hat
    alpha_hat = tau.alpha
    resid = np.asarray(fit.residuals, dtype=float)
    if len(resid) < 2:
        raise DomainError("fit carries no residuals to resample")
    tab = stable_dist.build_density_table(tau.alpha, tau.beta)
    scale = cfg.m ** (1.0 / alpha_hat)
    phi_hat = ar_model.g_map(theta_hat, s_hat)
    length = cfg.m + 2 * cfg.burn + p

    def one_rep(b):
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(b,)))
        zstar = rng.choice(resid, size=length, replace=True)
        xstar_full = ar_model.series_from_noise(zstar, theta_hat, r, s_hat)
        xstar = xstar_full[cfg.burn:cfg.burn + cfg.m]

        def z_fn(th):
            return ar_model.residuals(xstar, th, r, s_hat)

        best_v, best_t, ok = -np.inf, None, False
        for th0 in _jitter_feasible(theta_hat, r, s_hat, rng, cfg.starts):
            try:
                tb, vb, it = nelder_mead(
                    lambda th: _theta_objective(z_fn, th, r, s_hat, tab, tau),
                    th0, max_iter=cfg.max_iter, x_tol=1e-7, f_tol=1e-10,
                    step=0.02)
            except (DomainError, NumericalError):
                continue
            if vb > best_v and vb > PENALTY_BASE / 2:
                best_v, best_t = vb, tb
                if it < cfg.max_iter:
                    ok = True
        if (best_t is None or not ok
                or ar_model.validate_factored(best_t, r, s_hat) != ar_model.VALID):
            return None
        return best_t

    reps = parallel_map(one_rep, range(cfg.B))
    converged = np.array([t is not None for t in reps], dtype=bool)
    tdev, pdev = [], []
    for t in reps:
        if t is None:
            continue
        tdev.append(scale * (t - theta_hat))
        pdev.append(scale * (ar_model.g_map(t, s_hat) - phi_hat))
    return BootstrapResult(
        theta_devs=np.asarray(tdev).reshape(-1, p),
        phi_devs=np.asarray(pdev).reshape(-1, p),
        converged=converged, alpha_hat=alpha_hat, m=cfg.m,
        theta_hat=theta_hat, phi_hat=phi_hat, s_hat=s_hat)


def bootstrap_ci(boot: BootstrapResult, n: int, level: float = 0.95):
    """Quantile-pivot intervals for each theta_j and phi_j.

    [est_j - q_{1-g/2} / n^{1/alpha_hat}, est_j - q_{g/2} / n^{1/alpha_hat}]
    with q the empirical quantiles of the scaled deviations, g = 1 - level.
    """
    if not 0.0 < level < 1.0:
        raise DomainError("level must be in (0, 1)")
    if boot.n_converged < 20:
        raise DomainError(
            f"only {boot.n_converged} converged replicates; at least 20 "
            "are required for quantile intervals")
    g = 1.0 - level
    rate = n ** (1.0 / boot.alpha_hat)
    out = {}
    for key, devs, est in (("theta", boot.theta_devs, boot.theta_hat),
                           ("phi", boot.phi_devs, boot.phi_hat)):
        lo_q = np.quantile(devs, g / 2.0, axis=0)
        hi_q = np.quantile(devs, 1.0 - g / 2.0, axis=0)
        out[key] = np.column_stack([est - hi_q / rate, est - lo_q / rate])
    return out["theta"], out["phi"]


def tau_ci(tau_hat: stable_dist.StableParams, n: int, level: float = 0.95):
    """Wald intervals tau_i +- z sqrt([I^{-1}]_ii / n), clipped to the
    parameter space (beta to [-1, 1], alpha to (0, 2])."""
    if n <= 1:
        raise DomainError("n must exceed 1")
    if not 0.0 < level < 1.0:
        raise DomainError("level must be in (0, 1)")
    info = stable_dist.fisher_info(tau_hat)
    se = np.sqrt(np.diag(np.linalg.inv(info)) / n)
    z = float(ndtri(0.5 + level / 2.0))
    est = tau_hat.as_array()
    lo = est - z * se
    hi = est + z * se
    lo[0], hi[0] = max(lo[0], 0.0), min(hi[0], 2.0)
    lo[1], hi[1] = max(lo[1], -1.0), min(hi[1], 1.0)
    lo[2] = max(lo[2], 0.0)
    return np.column_stack([lo, hi])


@dataclass(frozen=True)
class WSimConfig:
    """Truncation settings and seed for one realization of the limit
    functional: K Poisson-arrival terms, lead/lag range J (None selects the
    smallest J with |c_j| below c_tol)."""

    K: int = 2000
    J: int | None = None
    seed: int = 0
    c_tol: float = 1e-10

    def __post_init__(self):
        if self.K < 1 or (self.J is not None and self.J < 1):
            raise DomainError("K and J must be >= 1")


def simulate_W(u, theta, r: int, s: int, tau: stable_dist.StableParams,
               cfg: WSimConfig) -> float:
    """One draw of the truncated limit functional

    W(u) = sum_{k<=K} sum_{0<|j|<=J} [ln f(Z_kj + c~(a)^{1/a} sigma c_j(u)
           delta_k Gamma_k^{-1/a}; tau) - ln f(Z_kj; tau)],

    with Gamma_k cumulative unit exponentials, P(delta_k = 1) = (1+beta)/2,
    and Z_kj i.i.d. draws from tau.  Deterministic given cfg.seed.
    """
    u = np.asarray(u, dtype=float)
    alpha = tau.alpha
    cj = ar_model.cj_coeffs(u, theta, r, s)
    if cfg.J is None:
        # relative cutoff keeps J (and hence the draw layout) invariant
        # under rescaling of u
        mags = np.abs(cj.c)
        js = np.abs(np.arange(-cj.K, cj.K + 1))
        big = mags >= cfg.c_tol * max(mags.max(), 1e-300)
        J = int(max(1, js[big].max())) if big.any() else 1
    else:
        J = cfg.J
    offsets = np.concatenate([np.arange(-J, 0), np.arange(1, J + 1)])
    cvec = np.array([cj.at(j) for j in offsets])

    # separate substreams per component so enlarging K only appends terms
    rng_e = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(0,)))
    rng_d = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(1,)))
    rng_z = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(2,)))
    gammas = np.cumsum(rng_e.standard_exponential(cfg.K))
    delta = np.where(rng_d.uniform(size=cfg.K) < (1.0 + tau.beta) / 2.0, 1.0, -1.0)
    z = stable_dist.sample(cfg.K * len(offsets), tau, rng_z).reshape(cfg.K, len(offsets))

    shift = (stable_dist.tilde_c(alpha) ** (1.0 / alpha) * tau.sigma
             * (delta * gammas ** (-1.0 / alpha)))[:, None] * cvec[None, :]
    tab = stable_dist.build_density_table(alpha, tau.beta)
    zc = (z - tau.mu) / tau.sigma
    base = tab.log_pdf(zc.ravel())
    moved = tab.log_pdf((zc + shift / tau.sigma).ravel())
    return float(np.sum(moved - base))
