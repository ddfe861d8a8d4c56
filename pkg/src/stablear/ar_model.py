"""AR polynomial algebra in the factored causal/noncausal parameterization.

A degree-p autoregression phi(z) = 1 - phi_1 z - ... - phi_p z^p is handled
as the product of a causal factor (all roots outside the unit circle, first r
coefficients of theta) and a purely noncausal factor (all roots inside, last
s coefficients).  This module validates that factorization, multiplies the
factors out (the g-map) with its analytic Jacobian, filters residuals,
expands the inverse polynomials into Laurent coefficients, and simulates the
two-sided stationary solution.
"""
from __future__ import annotations
from dataclasses import dataclass

import numpy as np

from . import stable_dist
from .exceptions import DomainError, InputError

__all__ = [
    "ROOT_MARGIN", "FactoredArParams", "ArPolynomial", "LaurentCoeffs",
    "CjCoeffs", "validate_factored", "g_map", "sigma_jacobian", "residuals",
    "laurent_coeffs", "cj_coeffs", "series_from_noise", "simulate_series",
]

#: modulus margin making the strict root inequalities testable
ROOT_MARGIN = 1e-6

VALID = "valid"
CAUSAL_ROOT_VIOLATION = "causal-root-violation"
NONCAUSAL_ROOT_VIOLATION = "noncausal-root-violation"
DEGENERATE_TOP = "degenerate-top-coefficient"


def _poly_roots(coefs: np.ndarray) -> np.ndarray:
    """Roots of 1 - c_1 z - ... - c_k z^k (empty for k = 0)."""
    c = np.trim_zeros(np.asarray(coefs, dtype=float), "b")
    if len(c) == 0:
        return np.empty(0, dtype=complex)
    return np.roots(np.concatenate([[-c[k] for k in range(len(c) - 1, -1, -1)], [1.0]]))


def validate_factored(theta, r: int, s: int) -> str:
    """Classify a candidate factored parameter vector.

    Returns one of "valid", "causal-root-violation",
    "noncausal-root-violation", "degenerate-top-coefficient".
    """
    theta = np.asarray(theta, dtype=float)
    if r < 0 or s < 0 or r + s < 1:
        raise DomainError("orders must satisfy r, s >= 0 and r + s >= 1")
    if len(theta) != r + s:
        raise DomainError(f"theta has length {len(theta)}, expected {r + s}")
    if not np.all(np.isfinite(theta)):
        return CAUSAL_ROOT_VIOLATION if r > 0 else NONCAUSAL_ROOT_VIOLATION
    if s > 0 and theta[r + s - 1] == 0.0:
        return DEGENERATE_TOP
    if r > 0:
        roots = _poly_roots(theta[:r])
        if len(roots) and np.abs(roots).min() <= 1.0 + ROOT_MARGIN:
            return CAUSAL_ROOT_VIOLATION
    if s > 0:
        roots = _poly_roots(theta[r:])
        if len(roots) == 0 or np.abs(roots).max() >= 1.0 - ROOT_MARGIN:
            return NONCAUSAL_ROOT_VIOLATION
    return VALID


@dataclass(frozen=True)
class FactoredArParams:
    """theta split into r causal and s purely noncausal coefficients."""

    theta: np.ndarray
    r: int
    s: int

    def __post_init__(self):
        object.__setattr__(self, "theta", np.asarray(self.theta, dtype=float))
        status = validate_factored(self.theta, self.r, self.s)
        if status != VALID:
            raise DomainError(f"invalid factored AR parameters: {status}")

    @property
    def p(self) -> int:
        return self.r + self.s

    @property
    def causal(self) -> np.ndarray:
        return self.theta[:self.r]

    @property
    def noncausal(self) -> np.ndarray:
        return self.theta[self.r:]


@dataclass(frozen=True)
class ArPolynomial:
    """Coefficients phi of phi(z) = 1 - phi_1 z - ... - phi_p z^p."""

    phi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "phi", np.asarray(self.phi, dtype=float))
        roots = _poly_roots(self.phi)
        if len(roots) and np.any(np.abs(np.abs(roots) - 1.0) <= ROOT_MARGIN):
            raise DomainError("AR polynomial has a root on the unit circle")


def _check_valid(theta, r, s):
    status = validate_factored(theta, r, s)
    if status != VALID:
        raise DomainError(f"invalid factored AR parameters: {status}")


def g_map(theta, s: int) -> np.ndarray:
    """Product-polynomial coefficients phi = g(theta, s).

    g_j = theta_j - sum_k theta_{j-k} theta_{p-s+k} with theta_0 = -1 and
    theta_k = 0 outside 1..p; for j > p - s the own-term theta_j drops out.
    """
    theta = np.asarray(theta, dtype=float)
    p = len(theta)
    r = p - s
    _check_valid(theta, r, s)
    if s == 0:
        return theta.copy()

    def th(k):
        if k == 0:
            return -1.0
        if 1 <= k <= p:
            return theta[k - 1]
        return 0.0

    phi = np.empty(p)
    for j in range(1, p + 1):
        if j <= r:
            acc = theta[j - 1]
            lo = 1
        else:
            acc = 0.0
            lo = j - r
        phi[j - 1] = acc - sum(th(j - k) * th(r + k) for k in range(lo, min(j, s) + 1))
    return phi


def sigma_jacobian(theta, s: int) -> np.ndarray:
    """Jacobian d g_i / d theta_j of the g-map, computed analytically.

    With a(z), b(z) the causal and noncausal factors (coefficient arrays
    a_0 = b_0 = 1, a_m = -theta_m, b_m = -theta_{r+m}), the product rule gives
    d phi_j / d theta_i = b_{j-i} for causal i and a_{j-k} for noncausal r+k.
    """
    theta = np.asarray(theta, dtype=float)
    p = len(theta)
    r = p - s
    _check_valid(theta, r, s)
    a = np.concatenate([[1.0], -theta[:r]])
    b = np.concatenate([[1.0], -theta[r:]])
    J = np.zeros((p, p))
    for j in range(1, p + 1):
        for i in range(1, r + 1):
            if 0 <= j - i <= s:
                J[j - 1, i - 1] = b[j - i]
        for k in range(1, s + 1):
            if 0 <= j - k <= r:
                J[j - 1, r + k - 1] = a[j - k]
    return J


def residuals(x, theta, r: int, s: int) -> np.ndarray:
    """Z_t(theta, s) for t = p+1..n: the degree-p filter with coefficients
    g_map(theta, s) applied to the series."""
    x = np.asarray(x, dtype=float)
    p = r + s
    if len(x) <= p:
        raise InputError(f"series of length {len(x)} too short for order {p}")
    phi = g_map(theta, s) if p else np.empty(0)
    kern = np.concatenate([[1.0], -phi])
    return np.convolve(x, kern, mode="valid")


@dataclass(frozen=True)
class LaurentCoeffs:
    """Expansions of 1/theta^dagger (pi_j z^j), 1/theta^* (chi_j z^-j, j >= s)
    and their product 1/phi (two-sided psi_j)."""

    pi: np.ndarray
    chi: np.ndarray          # chi[j] is the coefficient of z^{-(s+j)}, j >= 0
    psi: np.ndarray          # psi[j + K] is the coefficient of z^{j}, |j| <= K
    s: int
    K: int
    remainder: float

    def chi_at(self, j: int) -> float:
        """Coefficient chi_j of z^{-j} (zero for j < s)."""
        return self.chi[j - self.s] if self.s <= j < self.s + len(self.chi) else 0.0

    def psi_at(self, j: int) -> float:
        return self.psi[j + self.K] if abs(j) <= self.K else 0.0


def laurent_coeffs(theta, r: int, s: int, K: int | None = None,
                   tol: float = 1e-10, K_cap: int = 10_000) -> LaurentCoeffs:
    """Laurent coefficients to truncation K (smallest K with remainder <= tol
    when K is not given, capped at K_cap)."""
    theta = np.asarray(theta, dtype=float)
    p = len(theta)
    _check_valid(theta, p - s, s)
    r = p - s
    auto = K is None
    if not auto and K < p:
        raise DomainError(f"K={K} must be at least p={p}")

    def forward(coefs, K_):
        out = np.empty(K_ + 1)
        out[0] = 1.0
        for j in range(1, K_ + 1):
            out[j] = sum(coefs[m - 1] * out[j - m]
                         for m in range(1, min(j, len(coefs)) + 1))
        return out

    K_ = K if not auto else max(2 * p, 16)
    while True:
        pi = forward(theta[:r], K_)
        if s > 0:
            d = theta[r:]
            e = np.empty(s)
            e[:s - 1] = -d[s - 2::-1] / d[s - 1]
            e[s - 1] = 1.0 / d[s - 1]
            gamma = forward(e, K_)
            chi = -gamma / d[s - 1]
        else:
            chi = np.array([1.0])
        rem = max(abs(pi[-1]) if r > 0 else 0.0,
                  abs(chi[-1]) if s > 0 else 0.0)
        if not auto or rem <= tol or K_ >= K_cap:
            break
        K_ = min(2 * K_, K_cap)

    # psi = pi * chi as a polynomial product; conv index v maps to the power
    # v - s - (len(chi) - 1) when chi is reversed to ascending powers
    conv = np.convolve(pi, chi[::-1])
    psi = np.zeros(2 * K_ + 1)
    base = -s - (len(chi) - 1)
    for v in range(len(conv)):
        pw = v + base
        if -K_ <= pw <= K_:
            psi[pw + K_] += conv[v]
    out = LaurentCoeffs(pi=pi, chi=chi, psi=psi, s=s, K=K_, remainder=rem)
    if rem > tol:
        import warnings
        warnings.warn(f"Laurent truncation reached K={K_} with remainder "
                      f"{rem:.2e} > {tol:.0e}", RuntimeWarning)
    return out


@dataclass(frozen=True)
class CjCoeffs:
    """Coefficients c_j(u) of the noise expansion of u' dZ_t/dtheta."""

    u: np.ndarray
    c: np.ndarray            # c[j + K] = c_j(u), |j| <= K
    K: int

    def at(self, j: int) -> float:
        return self.c[j + self.K] if abs(j) <= self.K else 0.0


def cj_coeffs(u, theta, r: int, s: int, K: int | None = None,
              tol: float = 1e-10) -> CjCoeffs:
    """c_j(u) assembled from the Laurent expansions:

    c_m(u) = - sum_{i<=r} u_i pi_{m-i} - sum_{k<=s} u_{r+k} chi_{k-m},
    the second sum over k - m >= s.  Linear in u by construction.
    """
    u = np.asarray(u, dtype=float)
    theta = np.asarray(theta, dtype=float)
    p = len(theta)
    if len(u) != p:
        raise DomainError(f"u has length {len(u)}, expected {p}")
    lc = laurent_coeffs(theta, r, s, K, tol)
    K_ = lc.K
    c = np.zeros(2 * K_ + 1)
    for i in range(1, r + 1):
        if u[i - 1] != 0.0:
            for m in range(i, K_ + 1):
                c[m + K_] -= u[i - 1] * lc.pi[m - i]
    for k in range(1, s + 1):
        if u[r + k - 1] != 0.0:
            for j, chi_j in enumerate(lc.chi):   # chi at power -(s+j)
                m = k - (s + j)
                if -K_ <= m <= K_:
                    c[m + K_] -= u[r + k - 1] * chi_j
    return CjCoeffs(u=u, c=c, K=K_)


def series_from_noise(noise, theta, r: int, s: int) -> np.ndarray:
    """Solve theta^dagger(B) theta^*(B) X_t = Z_t for X given a finite noise
    path, applying 1/theta^dagger forward and 1/theta^* backward (most-lagged
    term solved for, zero-initialized beyond the horizon).

    Boundary effects decay geometrically into the interior; callers keep a
    burn-in margin on both ends.
    """
    noise = np.asarray(noise, dtype=float)
    _check_valid(theta, r, s)
    theta = np.asarray(theta, dtype=float)
    n = len(noise)
    y = noise.copy()
    if r > 0:
        a = theta[:r]
        for t in range(1, n):
            acc = y[t]
            for m in range(1, min(r, t) + 1):
                acc += a[m - 1] * y[t - m]
            y[t] = acc
    if s == 0:
        return y
    d = theta[r:]
    x = np.zeros(n)
    for t in range(n - 1, -1, -1):
        acc = x[t + s] - y[t + s] if t + s < n else 0.0
        for k in range(1, s):
            if t + s - k < n:
                acc -= d[k - 1] * x[t + s - k]
        x[t] = acc / d[s - 1]
    return x


def simulate_series(theta, r: int, s: int, tau: stable_dist.StableParams,
                    n: int, burn: int = 500,
                    rng: np.random.Generator | None = None) -> np.ndarray:
    """Simulate n values of the strictly stationary solution driven by
    alpha-stable noise; deterministic given the generator state."""
    if burn < 0:
        raise DomainError("burn must be nonnegative")
    if n < 0:
        raise DomainError("n must be nonnegative")
    if rng is None:
        rng = np.random.default_rng()
    p = r + s
    noise = stable_dist.sample(n + 2 * burn + p, tau, rng)
    x = series_from_noise(noise, theta, r, s)
    return x[burn:burn + n]
