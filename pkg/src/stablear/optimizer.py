"""Derivative-free likelihood maximization: random starts, shortlist,
Nelder-Mead polish, scan over the noncausal order s, and an AIC order scan.

The search protocol per order s: draw feasible random starting points,
evaluate the likelihood at all of them, keep the highest few, polish each by
Nelder-Mead in unconstrained coordinates, and keep the best polished point.
The reported fit is the best across s (ties resolved toward smaller s), with
the likelihood re-evaluated at full accuracy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import ar_model, stable_dist
from ._parallel import parallel_map
from .exceptions import DomainError, NumericalError
from .likelihood import (PENALTY_BASE, ParamVector, TableCache, cond_loglik,
                         inverse_transform, objective, transform_raw)

__all__ = ["FitResult", "nelder_mead", "random_starts", "fit", "order_scan",
           "PROFILES"]

#: search-effort profiles; "test" trades start coverage for CI runtime
PROFILES = {
    "full": dict(starts_per_s=1200, shortlist=8, x_tol=1e-6, f_tol=1e-9),
    "test": dict(starts_per_s=120, shortlist=4, x_tol=1e-5, f_tol=1e-8),
}


@dataclass(frozen=True)
class FitResult:
    """Maximizing parameters and bookkeeping for one fitted series."""

    eta_hat: ParamVector
    s_hat: int
    phi_hat: np.ndarray
    loglik: float
    se_tau: np.ndarray
    residuals: np.ndarray
    trace: list
    seed: int | None
    n: int
    p: int

    @property
    def tau_hat(self) -> stable_dist.StableParams:
        return self.eta_hat.tau

    @property
    def theta_hat(self) -> np.ndarray:
        return self.eta_hat.theta


def nelder_mead(f, x0, max_iter: int | None = None, x_tol: float = 1e-6,
                f_tol: float = 1e-9, step: float | np.ndarray = 0.05):
    """Maximize f by the reflect/expand/contract/shrink simplex.

    Terminates when the simplex diameter falls below x_tol, the value spread
    falls below f_tol, or max_iter iterations elapse.  Returns
    (argmax, value, iterations); iterations == max_iter flags non-convergence.
    """
    x0 = np.asarray(x0, dtype=float)
    d = len(x0)
    if max_iter is None:
        max_iter = 250 * d
    step = np.broadcast_to(np.asarray(step, dtype=float), (d,))
    verts = [x0.copy()]
    for i in range(d):
        v = x0.copy()
        v[i] += step[i] * max(abs(x0[i]), 1.0)
        verts.append(v)
    verts = np.array(verts)
    vals = np.array([f(v) for v in verts])
    if not np.isfinite(vals[0]):
        raise DomainError("objective not finite at the starting point")

    it = 0
    while it < max_iter:
        order = np.argsort(-vals)          # descending: best first
        verts, vals = verts[order], vals[order]
        diam = np.max(np.abs(verts[1:] - verts[0]))
        spread = vals[0] - vals[-1]
        if diam <= x_tol or spread <= f_tol:
            break
        it += 1
        centroid = verts[:-1].mean(axis=0)
        xr = centroid + (centroid - verts[-1])
        fr = f(xr)
        if fr > vals[0]:
            xe = centroid + 2.0 * (centroid - verts[-1])
            fe = f(xe)
            if fe > fr:
                verts[-1], vals[-1] = xe, fe
            else:
                verts[-1], vals[-1] = xr, fr
        elif fr > vals[-2]:
            verts[-1], vals[-1] = xr, fr
        else:
            xc = centroid + 0.5 * (verts[-1] - centroid)
            fc = f(xc)
            if fc > vals[-1]:
                verts[-1], vals[-1] = xc, fc
            else:
                for i in range(1, d + 1):
                    verts[i] = verts[0] + 0.5 * (verts[i] - verts[0])
                    vals[i] = f(verts[i])
    order = np.argsort(-vals)
    verts, vals = verts[order], vals[order]
    return verts[0], float(vals[0]), it


def _factor_from_roots(k: int, inside: bool, rng: np.random.Generator) -> np.ndarray:
    """Coefficients c of 1 - c_1 z - ... - c_k z^k with all roots of the
    stated modulus regime, built from random conjugate pairs and reals."""
    roots: list = []
    while len(roots) < k:
        pair = (k - len(roots) >= 2) and (rng.uniform() < 0.5)
        mod = rng.uniform(0.05, 0.95) if inside else rng.uniform(1.05, 5.0)
        if pair:
            ang = rng.uniform(0.05, math.pi - 0.05)
            roots += [mod * np.exp(1j * ang), mod * np.exp(-1j * ang)]
        else:
            sign = 1.0 if rng.uniform() < 0.5 else -1.0
            roots.append(sign * mod)
    poly = np.real(np.poly(roots))      # monic in z^k .. z^0
    poly = poly / poly[-1]              # constant coefficient 1
    return -poly[-2::-1]


def random_starts(x, p: int, s: int, count: int,
                  rng: np.random.Generator) -> list:
    """Feasible starting parameter vectors for order (p, s).

    theta comes from sampling factor roots away from the unit circle; tau
    pairs a uniform (alpha, beta) draw with location/scale read off the
    implied residuals (median, half interquartile range), each jittered by
    +-20%.  Every returned start passes validate_factored.
    """
    if count < 1:
        raise DomainError("count must be >= 1")
    x = np.asarray(x, dtype=float)
    r = p - s
    out = []
    while len(out) < count:
        theta = np.concatenate([
            _factor_from_roots(r, False, rng) if r else np.empty(0),
            _factor_from_roots(s, True, rng) if s else np.empty(0),
        ])
        if ar_model.validate_factored(theta, r, s) != ar_model.VALID:
            continue
        res = ar_model.residuals(x, theta, r, s)
        q25, q50, q75 = np.quantile(res, [0.25, 0.5, 0.75])
        sig0 = max(0.5 * (q75 - q25), 1e-6 * (1.0 + abs(q50)))
        alpha = rng.uniform(0.5, 1.95)
        beta = rng.uniform(-0.9, 0.9)
        sigma = sig0 * rng.uniform(0.8, 1.2)
        mu = q50 + 0.2 * sig0 * rng.uniform(-1.0, 1.0)
        try:
            out.append(ParamVector(
                theta=theta,
                tau=stable_dist.StableParams(alpha, beta, sigma, mu), s=s))
        except (DomainError, Exception):
            continue
    return out


def _safe_objective(x, raw, p, s, cache):
    try:
        return objective(x, raw, p, s, cache=cache)
    except (DomainError, NumericalError, FloatingPointError, OverflowError):
        return PENALTY_BASE


def _fit_one_s(x, p, s, starts_per_s, shortlist, seed, prof, cache, threads):
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(s,)))
    starts = random_starts(x, p, s, starts_per_s, rng)
    raws = [inverse_transform(pv.theta, pv.tau) for pv in starts]
    vals = parallel_map(lambda rw: _safe_objective(x, rw, p, s, cache), raws,
                        threads)
    order = np.argsort(-np.asarray(vals))[:shortlist]

    def polish(idx):
        xb, vb, it = nelder_mead(
            lambda rw: _safe_objective(x, rw, p, s, cache), raws[idx],
            x_tol=prof["x_tol"], f_tol=prof["f_tol"])
        return xb, vb, it

    polished = parallel_map(polish, list(order), threads)
    iters = [it for _, _, it in polished]
    best_raw, best_val, _ = max(polished, key=lambda t: t[1])
    return best_raw, best_val, iters, len(starts)


def fit(x, p: int, starts_per_s: int | None = None, shortlist: int | None = None,
        s_range=None, seed: int | None = None, profile: str = "full",
        threads: int | None = None) -> FitResult:
    """Maximum likelihood fit over eta and the noncausal order s.

    For each s in s_range (default 0..p): generate starts, evaluate the
    likelihood at all of them, Nelder-Mead polish the shortlist, and keep
    the best.  The global best over s (parsimony tie-break toward smaller s)
    is returned with standard errors for tau from the Fisher information.
    """
    x = np.asarray(x, dtype=float)
    if p < 1:
        raise DomainError("p must be >= 1")
    if len(x) <= p + 10:
        raise DomainError("series too short to fit")
    prof = dict(PROFILES[profile])
    if starts_per_s is not None:
        prof["starts_per_s"] = starts_per_s
    if shortlist is not None:
        prof["shortlist"] = shortlist
    if s_range is None:
        s_range = range(0, p + 1)
    else:
        s_range = list(s_range)
        if any(not 0 <= s <= p for s in s_range):
            raise DomainError(f"s values must lie in 0..p={p}")
    search_cache = TableCache(resolution=1e-5)

    trace = []
    candidates = []
    for s in s_range:
        raw_b, val_b, iters, n_starts = _fit_one_s(
            x, p, s, prof["starts_per_s"], prof["shortlist"], seed, prof,
            search_cache, threads)
        theta, alpha, beta, sigma, mu = transform_raw(raw_b, p)
        eta = ParamVector(theta=theta,
                          tau=stable_dist.StableParams(alpha, beta, sigma, mu),
                          s=s)
        ll_full = cond_loglik(x, eta)      # contract-grade re-evaluation
        trace.append(dict(s=int(s), loglik_search=float(val_b),
                          loglik=float(ll_full), nm_iterations=iters,
                          starts=n_starts))
        candidates.append((ll_full, s, eta))

    best_ll, best_s, best_eta = candidates[0]
    for ll, s, eta in candidates[1:]:
        if ll > best_ll + 1e-9:
            best_ll, best_s, best_eta = ll, s, eta

    info = stable_dist.fisher_info(best_eta.tau)
    se_tau = np.sqrt(np.diag(np.linalg.inv(info)) / len(x))
    res = ar_model.residuals(x, best_eta.theta, best_eta.r, best_eta.s)
    return FitResult(
        eta_hat=best_eta, s_hat=int(best_s),
        phi_hat=ar_model.g_map(best_eta.theta, best_eta.s),
        loglik=float(best_ll), se_tau=se_tau, residuals=res, trace=trace,
        seed=seed, n=len(x), p=p)


def order_scan(x, p_max: int, seed: int | None = None, profile: str = "full",
               threads: int | None = None, **fit_kw):
    """AIC(p) = -2 L_hat(p) + 2 (p + 4) over p = 1..p_max.

    Returns (selected_p, rows); each row carries p, AIC, and the FitResult.
    tau's four parameters enter the count; s does not (it is a discrete
    model label, not a continuous parameter).
    """
    if p_max < 1:
        raise DomainError("p_max must be >= 1")
    rows = []
    for p in range(1, p_max + 1):
        f = fit(x, p, seed=seed, profile=profile, threads=threads, **fit_kw)
        aic = -2.0 * f.loglik + 2.0 * (p + 4)
        rows.append(dict(p=p, aic=float(aic), fit=f))
    best = min(rows, key=lambda row: (row["aic"], row["p"]))
    return best["p"], rows
