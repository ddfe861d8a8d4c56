"""Conditional log-likelihood of (theta, tau, s) and the unconstrained,
penalized objective used by the simplex search.

The likelihood (conditioning on the first p observations) is

    L(eta, s) = sum_{t=p+1}^n [ ln f(Z_t(theta, s); tau) + ln|theta_p| 1{s>0} ]

with Z_t the degree-p filter residuals.  One standardized density table per
(alpha, beta) is shared across all evaluations through a keyed cache.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from . import ar_model, stable_dist
from .ar_model import ROOT_MARGIN, _poly_roots, validate_factored
from .exceptions import DomainError, ParameterError

__all__ = ["ParamVector", "cond_loglik", "objective", "transform_raw",
           "inverse_transform", "TableCache", "PENALTY_BASE"]

#: worse than any attainable log-likelihood; violations subtract more
PENALTY_BASE = -1.0e12

_ALPHA_LO, _ALPHA_HI = 0.2, 2.0
_BETA_BOUND = 0.999


@dataclass(frozen=True)
class ParamVector:
    """eta = (theta_1..theta_p, alpha, beta, sigma, mu) with noncausal order s."""

    theta: np.ndarray
    tau: stable_dist.StableParams
    s: int

    def __post_init__(self):
        object.__setattr__(self, "theta", np.asarray(self.theta, dtype=float))
        p = len(self.theta)
        status = validate_factored(self.theta, p - self.s, self.s)
        if status != ar_model.VALID:
            raise DomainError(f"invalid factored AR parameters: {status}")
        if not (self.tau.is_interior() and self.tau.alpha > 0):
            raise ParameterError("tau must lie in the estimation interior")

    @property
    def p(self) -> int:
        return len(self.theta)

    @property
    def r(self) -> int:
        return self.p - self.s

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.theta, self.tau.as_array()])


class TableCache:
    """Read-only DensityTable cache keyed by the standardized (alpha, beta)."""

    def __init__(self, resolution: float = 1e-8, maxsize: int = 128):
        self.resolution = resolution
        self.maxsize = maxsize
        self._tables: dict = {}
        self._lock = threading.Lock()

    def get(self, alpha: float, beta: float) -> stable_dist.DensityTable:
        key = (alpha, beta)
        with self._lock:
            tab = self._tables.get(key)
        if tab is None:
            tab = stable_dist.build_density_table(alpha, beta, self.resolution)
            with self._lock:
                if len(self._tables) >= self.maxsize:
                    self._tables.clear()
                self._tables.setdefault(key, tab)
        return tab


_default_cache = TableCache()


def cond_loglik(x, eta: ParamVector, s: int | None = None,
                cache: TableCache | None = None) -> float:
    """L(eta, s): conditional log-likelihood of the series x."""
    if s is not None and s != eta.s:
        raise DomainError("s disagrees with eta.s")
    x = np.asarray(x, dtype=float)
    if len(x) <= eta.p:
        raise DomainError(f"series too short for order p={eta.p}")
    z = ar_model.residuals(x, eta.theta, eta.r, eta.s)
    cache = cache or _default_cache
    tab = cache.get(eta.tau.alpha, eta.tau.beta)
    ll = float(np.sum(tab.log_pdf((z - eta.tau.mu) / eta.tau.sigma)))
    ll -= len(z) * math.log(eta.tau.sigma)
    if eta.s > 0:
        ll += len(z) * math.log(abs(eta.theta[-1]))
    return ll


def transform_raw(raw, p: int):
    """Map an unconstrained vector to (theta, alpha, beta, sigma, mu).

    theta and mu are identity; alpha and beta go through bounded logistic and
    tanh maps; sigma through exp.  The transforms are smooth bijections onto
    the search region, so round-tripping with inverse_transform is exact to
    floating precision.
    """
    raw = np.asarray(raw, dtype=float)
    if len(raw) != p + 4:
        raise DomainError(f"raw has length {len(raw)}, expected {p + 4}")
    theta = raw[:p].copy()
    a_r, b_r, s_r, m_r = raw[p:]
    alpha = _ALPHA_LO + (_ALPHA_HI - _ALPHA_LO) / (1.0 + math.exp(-min(max(a_r, -60.0), 60.0)))
    beta = _BETA_BOUND * math.tanh(b_r)
    sigma = math.exp(min(max(s_r, -300.0), 300.0))
    return theta, alpha, beta, sigma, m_r


def inverse_transform(theta, tau: stable_dist.StableParams) -> np.ndarray:
    """Unconstrained coordinates of (theta, tau); inverse of transform_raw."""
    a = (tau.alpha - _ALPHA_LO) / (_ALPHA_HI - _ALPHA_LO)
    if not 0.0 < a < 1.0:
        raise DomainError(f"alpha {tau.alpha} outside the search range "
                          f"({_ALPHA_LO}, {_ALPHA_HI})")
    b = tau.beta / _BETA_BOUND
    if not -1.0 < b < 1.0:
        raise DomainError(f"beta {tau.beta} outside the search range")
    return np.concatenate([np.asarray(theta, dtype=float),
                           [math.log(a / (1.0 - a)), math.atanh(b),
                            math.log(tau.sigma), tau.mu]])


def _root_violation(theta, r: int, s: int) -> float:
    """Worst root-margin violation (0 when feasible)."""
    worst = 0.0
    if s > 0 and theta[r + s - 1] == 0.0:
        return 1.0
    if r > 0:
        roots = _poly_roots(theta[:r])
        if len(roots):
            worst = max(worst, (1.0 + ROOT_MARGIN) - np.abs(roots).min())
    if s > 0:
        roots = _poly_roots(theta[r:])
        if len(roots) < 1:
            worst = max(worst, 1.0)
        else:
            worst = max(worst, np.abs(roots).max() - (1.0 - ROOT_MARGIN))
    return max(worst, 0.0)


def objective(x, raw, p: int, s: int, cache: TableCache | None = None) -> float:
    """Penalized log-likelihood over unconstrained coordinates.

    Infeasible points return a large negative value that decreases with the
    worst root-margin violation, so the simplex is repelled rather than
    trapped; feasible points return cond_loglik of the transformed
    parameters exactly.
    """
    raw = np.asarray(raw, dtype=float)
    if not np.all(np.isfinite(raw)):
        return PENALTY_BASE * 2.0
    theta, alpha, beta, sigma, mu = transform_raw(raw, p)
    if not (_ALPHA_LO < alpha < _ALPHA_HI and abs(beta) < 1.0
            and 0.0 < sigma < np.inf and np.isfinite(mu)):
        return PENALTY_BASE * 2.0
    viol = _root_violation(theta, p - s, s)
    if viol > 0.0:
        return PENALTY_BASE * (1.0 + viol)
    eta = ParamVector(theta=theta, tau=stable_dist.StableParams(alpha, beta, sigma, mu), s=s)
    ll = cond_loglik(x, eta, cache=cache)
    if not np.isfinite(ll):
        return PENALTY_BASE
    return ll
