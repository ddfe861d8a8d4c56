import numpy as np
import pytest

import stablear as sa
from stablear import DomainError, InputError, StableParams
from stablear import ar_model as am

from conftest import simulate


def random_factored(rng, r, s):
    """Random feasible theta for orders (r, s), sampled by factor roots."""
    def factor(k, inside):
        roots = []
        while len(roots) < k:
            if k - len(roots) >= 2 and rng.random() < 0.5:
                m = rng.uniform(0.15, 0.9) if inside else rng.uniform(1.15, 4.0)
                ang = rng.uniform(0.1, np.pi - 0.1)
                roots += [m * np.exp(1j * ang), m * np.exp(-1j * ang)]
            else:
                m = rng.uniform(0.15, 0.9) if inside else rng.uniform(1.15, 4.0)
                roots.append(m * np.sign(rng.random() - 0.3))
        c = np.real(np.poly(roots))
        return -(c / c[-1])[-2::-1]
    return np.concatenate([factor(r, False) if r else np.empty(0),
                           factor(s, True) if s else np.empty(0)])


class TestValidate:
    def test_paper_cases(self):
        assert am.validate_factored([0.5], 1, 0) == "valid"
        assert am.validate_factored([2.0], 0, 1) == "valid"

    def test_boundary_root(self):
        assert am.validate_factored([1.0], 1, 0) == "causal-root-violation"

    def test_noncausal_violation(self):
        assert am.validate_factored([0.5], 0, 1) == "noncausal-root-violation"

    def test_degenerate_top(self):
        assert am.validate_factored([0.5, 0.0], 1, 1) == "degenerate-top-coefficient"

    def test_bad_orders(self):
        with pytest.raises(DomainError):
            am.validate_factored([], 0, 0)


class TestGMap:
    def test_paper_ar2(self):
        assert np.allclose(am.g_map([0.8, -2.0], 1), [-1.2, 1.6], atol=1e-12)

    def test_paper_walmart(self):
        phi = am.g_map([0.7380, -2.8146], 1)
        assert np.max(np.abs(phi - [-2.0766, 2.0772])) < 5e-5

    def test_identity_when_causal(self):
        th = np.array([0.5, -0.2, 0.1])
        assert np.array_equal(am.g_map(th, 0), th)

    def test_matches_polynomial_product(self):
        rng = np.random.default_rng(314)
        for _ in range(60):
            r, s = rng.integers(0, 4), rng.integers(0, 4)
            if r + s == 0:
                continue
            th = random_factored(rng, r, s)
            if am.validate_factored(th, r, s) != "valid":
                continue
            a = np.concatenate([[1.0], -th[:r]])
            b = np.concatenate([[1.0], -th[r:]])
            want = -np.polymul(a[::-1], b[::-1])[::-1][1:]
            assert np.max(np.abs(am.g_map(th, s) - want)) < 1e-12


class TestSigmaJacobian:
    def test_identity_when_causal(self):
        assert np.array_equal(am.sigma_jacobian([0.4, 0.2], 0), np.eye(2))

    def test_hand_ar2(self):
        J = am.sigma_jacobian([0.8, -2.0], 1)
        assert np.allclose(J, [[1.0, 1.0], [2.0, -0.8]], atol=1e-14)

    def test_finite_differences(self):
        rng = np.random.default_rng(2718)
        checked = 0
        while checked < 100:
            r, s = rng.integers(0, 4), rng.integers(0, 4)
            if r + s == 0:
                continue
            th = random_factored(rng, r, s)
            if am.validate_factored(th, r, s) != "valid":
                continue
            J = am.sigma_jacobian(th, s)
            h = 1e-7
            for j in range(r + s):
                up, dn = th.copy(), th.copy()
                up[j] += h
                dn[j] -= h
                col = (am.g_map(up, s) - am.g_map(dn, s)) / (2 * h)
                assert np.max(np.abs(J[:, j] - col)) < 1e-7
            checked += 1


class TestResiduals:
    def test_zero_theta(self):
        # zero causal coefficients have no roots at all: the filter is the
        # identity and residuals collapse to the series
        x = np.array([3.0, -1.0, 4.0, 1.0, -5.0])
        z = am.residuals(x, [0.0, 0.0], 2, 0)
        assert np.array_equal(z, x[2:])

    def test_hand_lag1(self):
        z = am.residuals([1.0, 2.0, 0.5], [0.5], 1, 0)
        assert np.allclose(z, [1.5, -0.5], atol=1e-15)

    def test_too_short(self):
        with pytest.raises(InputError):
            am.residuals([1.0, 2.0], [0.1, 0.2], 2, 0)

    def test_depends_only_on_product_polynomial(self):
        rng = np.random.default_rng(5)
        x = rng.standard_normal(50)
        th = np.array([0.8, -2.0])
        z = am.residuals(x, th, 1, 1)
        phi = am.g_map(th, 1)
        manual = x[2:] - phi[0] * x[1:-1] - phi[1] * x[:-2]
        assert np.max(np.abs(z - manual)) < 1e-12

    def test_roundtrip(self):
        x = simulate([0.8, -2.0], 1, 1, (1.5, 0.0, 1.0, 0.0), 500, seed=7)
        z = am.residuals(x, [0.8, -2.0], 1, 1)
        assert len(z) == 498


class TestLaurent:
    def test_causal_geometric(self):
        lc = am.laurent_coeffs([0.5], 1, 0)
        assert np.allclose(lc.pi[:8], 0.5 ** np.arange(8), atol=1e-15)

    def test_noncausal_hand(self):
        lc = am.laurent_coeffs([2.0], 0, 1)
        for j in (1, 2, 3, 6):
            assert abs(lc.chi_at(j) + 2.0 ** (-j)) < 1e-15
        assert abs(lc.chi_at(1) + 1.0 / 2.0) < 1e-15  # chi_s = -1/theta_p

    def test_product_reconstructs_one(self):
        th = np.array([0.6, -0.1])
        lc = am.laurent_coeffs(th, 2, 0)
        conv = np.convolve(np.concatenate([[1.0], -th]), lc.pi)
        assert abs(conv[0] - 1.0) < 1e-15
        assert np.max(np.abs(conv[1:lc.K])) < 1e-12

    def test_psi_matches_impulse_response(self):
        th = np.array([0.8, -2.0])
        lc = am.laurent_coeffs(th, 1, 1)
        noise = np.zeros(801)
        noise[400] = 1.0
        x = am.series_from_noise(noise, th, 1, 1)
        for j in range(-8, 9):
            assert abs(x[400 + j] - lc.psi_at(j)) < 1e-12

    def test_truncation_warning(self):
        with pytest.warns(RuntimeWarning):
            am.laurent_coeffs([1.0 / (1.0 + 5e-6)], 1, 0, K=200)

    def test_geometric_decay(self):
        lc = am.laurent_coeffs([0.8, -2.0], 1, 1)
        js = np.arange(-lc.K, lc.K + 1)
        nz = np.abs(lc.psi) > 0
        assert np.all(np.abs(lc.psi[nz]) <= 3.0 * 0.81 ** np.abs(js[nz]))


class TestCj:
    def test_c0_identity(self):
        th = np.array([0.8, -2.0])
        cj = am.cj_coeffs([0.0, 1.0], th, 1, 1)
        assert abs(cj.at(0) - 1.0 / (-2.0)) < 1e-15

    def test_c1_identity(self):
        cj = am.cj_coeffs([1.0, 0.0], np.array([0.8, -2.0]), 1, 1)
        assert abs(cj.at(1) + 1.0) < 1e-15

    def test_zero_u(self):
        cj = am.cj_coeffs([0.0, 0.0], np.array([0.8, -2.0]), 1, 1)
        assert np.all(cj.c == 0.0)

    def test_linear_in_u(self):
        th = np.array([0.8, -2.0])
        a = am.cj_coeffs([1.0, 0.5], th, 1, 1).c
        b = am.cj_coeffs([2.0, 1.0], th, 1, 1).c
        assert np.max(np.abs(b - 2.0 * a)) < 1e-14

    def test_decay_bound(self):
        # |c_j(u)| <= C D^{|j|} with fitted C and D < 1
        th = np.array([0.8, -2.0])
        cj = am.cj_coeffs([1.0, 1.0], th, 1, 1)
        js = np.abs(np.arange(-cj.K, cj.K + 1))
        nz = np.abs(cj.c) > 1e-300
        logs = np.log(np.abs(cj.c[nz]))
        D_fit = np.exp(np.polyfit(js[nz], logs, 1)[0])
        assert D_fit < 1.0
        assert np.all(np.abs(cj.c[nz]) <= 5.0 * 0.85 ** js[nz])


class TestSimulate:
    def test_zero_theta_identity(self):
        noise = np.arange(10.0)
        assert np.array_equal(am.series_from_noise(noise, [0.0], 1, 0), noise)

    def test_causal_recursion_identity(self):
        x = simulate([0.5], 1, 0, (1.5, 0.0, 1.0, 0.0), 400, seed=3)
        rng = np.random.default_rng(np.random.SeedSequence(3))
        noise = sa.sample(400 + 1000 + 1, StableParams(1.5, 0.0, 1.0, 0.0), rng)
        full = am.series_from_noise(noise, [0.5], 1, 0)
        lhs = full[1:] - 0.5 * full[:-1]
        assert np.max(np.abs(lhs - noise[1:])) < 1e-10

    def test_impulse_response_noncausal(self):
        noise = np.zeros(300)
        T = 150
        noise[T] = 1.0
        x = am.series_from_noise(noise, [2.0], 0, 1)
        assert np.max(np.abs(x[T:])) == 0.0
        t = np.arange(40, T)
        want = -2.0 ** (-(T - t).astype(float))
        assert np.max(np.abs(x[t] - want)) < 1e-10

    def test_roundtrip_table1_sets(self):
        for theta, r, s in ([np.array([0.5]), 1, 0],
                            [np.array([2.0]), 0, 1],
                            [np.array([0.8, -2.0]), 1, 1]):
            for tau in ((1.5, 0.0, 1.0, 0.0), (0.8, 0.5, 1.0, 0.0)):
                rng = np.random.default_rng(np.random.SeedSequence(88))
                p = r + s
                noise = sa.sample(500 + 1000 + p, StableParams(*tau), rng)
                x = am.series_from_noise(noise, theta, r, s)
                xc = x[500:1000]
                res = am.residuals(xc, theta, r, s)
                truth = noise[500 + p:1000]
                assert np.max(np.abs(res - truth)) <= 1e-8

    def test_deterministic(self):
        a = simulate([2.0], 0, 1, (1.5, 0.5, 1.0, 0.0), 100, seed=5)
        b = simulate([2.0], 0, 1, (1.5, 0.5, 1.0, 0.0), 100, seed=5)
        assert np.array_equal(a, b)

    def test_invalid_params(self):
        with pytest.raises(DomainError):
            am.simulate_series([0.5], 0, 1, StableParams(1.5, 0, 1, 0), 50,
                               rng=np.random.default_rng(0))
