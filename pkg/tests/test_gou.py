"""Gamma-OU operations against closed-form, series and Monte-Carlo oracles."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.stats import ks_2samp

from gammaou.params import (
    ConfigurationError,
    GouParams,
    ParameterError,
    RemainderParams,
)
from gammaou.gou import (
    chf_gou_conditional,
    chf_remainder,
    gou_density_tail_mass,
    gou_moments,
    integer_shape,
    remainder_cumulant,
    remainder_moments,
    sample_remainder_ar,
    sample_remainder_binomial,
    sample_remainder_polya,
    simulate_path,
    simulate_paths,
    transition_density_gou,
)
from gammaou.validation import empirical_chf, gof_mixed, summarize
from gammaou.weights import ar_tables, polya_weight_array

from conftest import make_stream, sample_cumulants

PAPER_ONESTEP = GouParams(k=36.0, lam=10.0, beta=3.0, x0=0.0)
PAPER_TRAJ = GouParams(k=0.5, lam=1.0, beta=1.0, x0=10.0)
DT = 1.0 / 365.0
R_ONESTEP = PAPER_ONESTEP.remainder(DT)


class TestConditionalChf:
    def test_at_zero(self):
        assert chf_gou_conditional(0.0, 0.5, 1.3, PAPER_ONESTEP) == 1.0 + 0.0j

    def test_stationary_limit(self):
        p = PAPER_ONESTEP
        u = np.linspace(-10, 10, 21)
        t = 1000.0 / p.k
        stationary = (p.beta / (p.beta - 1j * u)) ** (p.lam / p.k)
        assert np.abs(chf_gou_conditional(u, t, 3.0, p) - stationary).max() < 1e-6

    def test_matches_remainder_chf_at_zero_start(self):
        u = np.linspace(-30, 30, 61)
        got = chf_gou_conditional(u, DT, 0.0, PAPER_ONESTEP)
        want = chf_remainder(u, R_ONESTEP)
        assert np.abs(got - want).max() == 0.0

    def test_empirical_cf_oracle(self):
        n = 1_000_000
        s = make_stream(40)
        x = simulate_paths(s, PAPER_ONESTEP, [0.0, DT], "lawrence", n)[:, 1]
        u = np.linspace(-20, 20, 41)
        sup = np.abs(
            empirical_chf(x, u) - chf_gou_conditional(u, DT, 0.0, PAPER_ONESTEP)
        ).max()
        assert sup < 4.0 / math.sqrt(n)


class TestRemainderChf:
    def test_at_zero(self):
        assert chf_remainder(0.0, R_ONESTEP) == 1.0 + 0.0j

    def test_degenerate_a(self):
        r = RemainderParams(1.0 - 1e-12, 0.4, 2.0)
        u = np.linspace(-50, 50, 11)
        assert np.abs(chf_remainder(u, r) - 1.0).max() < 1e-9

    def test_polya_series_identity(self):
        r = RemainderParams(0.9061, 10.0 / 36.0, 3.0)
        u = np.linspace(-50, 50, 101)
        w = polya_weight_array(r.alpha, 1.0 - r.a, 200)
        k = np.arange(201)
        erl_cf = (r.beta / (r.beta - 1j * r.a * u[:, None])) ** k[None, :]
        series = (w[None, :] * erl_cf).sum(axis=1)
        assert np.abs(series - chf_remainder(u, r)).max() < 1e-10

    @settings(max_examples=50, deadline=None)
    @given(
        a=st.floats(0.05, 0.99),
        alpha=st.floats(0.05, 8.0),
        beta=st.floats(0.2, 20.0),
        c=st.floats(0.1, 10.0),
    )
    def test_scaling_identity(self, a, alpha, beta, c):
        # c * GAM''(alpha, beta) has the law GAM''(alpha, beta/c)
        u = np.linspace(-5.0, 5.0, 11)
        lhs = chf_remainder(u, RemainderParams(a, alpha, beta / c))
        rhs = chf_remainder(c * u, RemainderParams(a, alpha, beta))
        assert np.abs(lhs - rhs).max() < 1e-12


class TestCumulantsAndMoments:
    def test_first_cumulant_vs_numerical_cf_derivative(self):
        r = RemainderParams(0.90608, 10.0 / 36.0, 3.0)
        h = 1e-5
        num = np.imag(
            np.log(chf_remainder(h, r)) - np.log(chf_remainder(-h, r))
        ) / (2.0 * h)
        assert remainder_cumulant(1, r) == pytest.approx(num, rel=1e-8)
        assert remainder_cumulant(1, r) == pytest.approx(
            (1 - r.a) * r.alpha / r.beta, rel=1e-14
        )

    def test_higher_cumulants_vs_cf_derivatives(self):
        # central differences of log CF at 0: kappa_n = (-i)^n d^n logchf
        r = RemainderParams(0.8, 1.7, 2.5)
        h = 1e-3
        us = np.array([-2, -1, 0, 1, 2]) * h
        logcf = np.log(chf_remainder(us, r))
        d2 = (logcf[3] - 2 * logcf[2] + logcf[1]) / h ** 2
        d3 = (logcf[4] - 2 * logcf[3] + 2 * logcf[1] - logcf[0]) / (2 * h ** 3)
        assert remainder_cumulant(2, r) == pytest.approx(-d2.real, rel=1e-5)
        assert remainder_cumulant(3, r) == pytest.approx(-d3.imag, rel=1e-4)

    def test_degenerate_a_vanishes(self):
        r = RemainderParams(1.0 - 1e-14, 1.0, 1.0)
        for n in range(1, 5):
            assert remainder_cumulant(n, r) == pytest.approx(0.0, abs=1e-12)

    def test_moments_gamma_limit(self):
        r = RemainderParams(1e-12, 2.5, 5.0)
        m = remainder_moments(r)
        assert m.mean == pytest.approx(2.5 / 5.0, rel=1e-10)
        assert m.variance == pytest.approx(2.5 / 25.0, rel=1e-10)
        assert m.skewness == pytest.approx(2.0 / math.sqrt(2.5), rel=1e-10)
        assert m.kurtosis == pytest.approx(6.0 / 2.5 + 3.0, rel=1e-10)

    def test_skewness_scale_free(self):
        m1 = remainder_moments(RemainderParams(0.7, 1.3, 2.0))
        m2 = remainder_moments(RemainderParams(0.7, 1.3, 9.0))
        assert m1.skewness == m2.skewness
        assert m1.kurtosis == m2.kurtosis

    def test_cumulant_transfer_vs_monte_carlo(self):
        # sample cumulants match (1 - a^n) * gamma cumulants, 4 s.e.
        r = R_ONESTEP
        s = make_stream(41)
        x = sample_remainder_polya(s, r, size=2_000_000)
        ks, ses = sample_cumulants(x)
        for n in range(1, 5):
            want = remainder_cumulant(n, r)
            assert abs(ks[n - 1] - want) < 4.0 * ses[n - 1], f"cumulant {n}"

    def test_gou_moments_shifts_mean_only(self):
        p = PAPER_TRAJ
        m = gou_moments(p, 1.0)
        r = remainder_moments(p.remainder(1.0))
        assert m.mean == pytest.approx(p.decay(1.0) * p.x0 + r.mean)
        assert (m.variance, m.skewness, m.kurtosis) == (
            r.variance, r.skewness, r.kurtosis,
        )


class TestRemainderSamplers:
    def test_polya_atom_mass(self):
        n = 1_000_000
        s = make_stream(42)
        x = sample_remainder_polya(s, R_ONESTEP, size=n)
        p0 = R_ONESTEP.atom_prob
        se = math.sqrt(p0 * (1 - p0) / n)
        assert abs((x == 0.0).mean() - p0) < 3.0 * se

    def test_polya_gamma_limit(self):
        # a -> 0 degenerates to the stationary Gamma(alpha, beta) law
        r = RemainderParams(1e-9, 2.5, 5.0)
        s = make_stream(43)
        x = sample_remainder_polya(s, r, size=100_000)
        g = make_stream(44).gamma(2.5, 5.0, size=100_000)
        assert ks_2samp(x, g).pvalue > 0.01

    def test_binomial_single_trial(self):
        n, a, beta = 1, 0.6, 2.0
        s = make_stream(45)
        x = sample_remainder_binomial(s, n, a, beta, size=200_000)
        frac = (x == 0.0).mean()
        assert abs(frac - a) < 3.0 * math.sqrt(a * (1 - a) / x.shape[0])
        e = make_stream(46).exponential(beta, size=200_000)
        assert ks_2samp(x[x > 0], e).pvalue > 0.01

    def test_binomial_matches_polya_at_integer_shape(self):
        n, a, beta = 3, 0.7, 2.0
        x = sample_remainder_binomial(make_stream(47), n, a, beta,
                                      size=1_000_000)
        y = sample_remainder_polya(
            make_stream(48), RemainderParams(a, float(n), beta),
            size=1_000_000,
        )
        assert ks_2samp(x, y).pvalue > 0.01

    def test_binomial_atom_mass(self):
        n, a, beta = 4, 0.8, 1.5
        x = sample_remainder_binomial(make_stream(49), n, a, beta,
                                      size=500_000)
        p0 = a ** n
        se = math.sqrt(p0 * (1 - p0) / x.shape[0])
        assert abs((x == 0.0).mean() - p0) < 3.0 * se

    def test_ar_matches_polya_law(self):
        r = RemainderParams(0.9, 10.0 / 36.0, 3.0)
        x = sample_remainder_ar(make_stream(50), r, trunc=40, size=1_000_000)
        y = sample_remainder_polya(make_stream(51), r, size=1_000_000)
        assert ks_2samp(x, y).pvalue > 0.01

    def test_ar_large_alpha_direct_vs_split(self):
        # direct pseudo-mixture draw at alpha > 1 agrees with the split
        # construction Erl(Bin(floor, 1-a), beta) + fractional remainder
        a, alpha, beta = 0.75, 2.5, 2.0
        r = RemainderParams(a, alpha, beta)
        x = sample_remainder_ar(make_stream(52), r, trunc=60, size=400_000)
        s = make_stream(53)
        whole = sample_remainder_binomial(s, 2, a, beta, size=400_000)
        frac = sample_remainder_ar(
            s, RemainderParams(a, 0.5, beta), trunc=60, size=400_000
        )
        assert ks_2samp(x, whole + frac).pvalue > 0.01

    def test_ar_acceptance_rate(self):
        # replay the proposal/accept decision with the production tables
        alpha, a = 0.1, 0.5
        cdf, cs, cp = ar_tables(alpha, a, trunc=40)
        n = 1_000_000
        s = make_stream(54)
        u = s.uniform(size=n)
        idx = np.searchsorted(cdf[:-1], u, side="right")
        accepted = np.zeros(n, dtype=bool)
        accepted[idx == 0] = True
        live = np.nonzero(idx > 0)[0]
        z = np.empty(live.shape[0])
        for shape in np.unique(idx[live]):
            m = idx[live] == shape
            z[m] = s.gamma(float(shape), 1.0, size=int(m.sum()))
        num = np.polynomial.polynomial.polyval(z, cs)
        den = np.polynomial.polynomial.polyval(z, cp)
        u2 = s.uniform(size=live.shape[0])
        accepted[live] = (den > 0) & (u2 * den <= num)
        rate = accepted.mean()
        assert abs(rate - 0.8841) < 0.01

    def test_ar_domain_error(self):
        from gammaou.params import DomainError
        with pytest.raises(DomainError):
            sample_remainder_ar(
                make_stream(0), RemainderParams(0.4, 0.5, 1.0), size=10
            )


class TestTransitionDensity:
    def test_normalization(self):
        atom, _ = transition_density_gou(0.0, DT, 0.0, PAPER_ONESTEP, 200)
        integral, _ = quad(
            lambda xx: transition_density_gou(xx, DT, 0.0, PAPER_ONESTEP,
                                              200)[1],
            0.0, 20.0, limit=200,
        )
        assert abs(atom + integral - 1.0) < 1e-6
        assert abs(gou_density_tail_mass(DT, PAPER_ONESTEP, 200)) < 1e-12

    def test_zero_below_atom(self):
        y = 1.7
        a = PAPER_ONESTEP.decay(DT)
        xs = np.linspace(a * y - 0.5, a * y - 1e-9, 20)
        _, dens = transition_density_gou(xs, DT, y, PAPER_ONESTEP)
        assert np.all(dens == 0.0)

    def test_shift_in_y(self):
        a = PAPER_ONESTEP.decay(DT)
        x = np.linspace(0.01, 1.0, 50)
        _, d0 = transition_density_gou(x, DT, 0.0, PAPER_ONESTEP)
        _, d2 = transition_density_gou(x + 2.0 * a, DT, 2.0, PAPER_ONESTEP)
        assert np.allclose(d0, d2, rtol=1e-11)

    def test_integer_shape_uses_binomial_form(self):
        p = PAPER_TRAJ  # lam/k = 2
        assert integer_shape(p.alpha) == 2
        atom, _ = transition_density_gou(0.0, 1.0, 0.0, p)
        assert atom == pytest.approx(p.decay(1.0) ** 2, rel=1e-14)
        integral, _ = quad(
            lambda xx: transition_density_gou(xx, 1.0, 0.0, p)[1],
            0.0, 80.0, limit=300,
        )
        assert abs(atom + integral - 1.0) < 1e-8

    def test_matches_sampler_histogram(self):
        n = 1_000_000
        s = make_stream(55)
        x = sample_remainder_polya(s, R_ONESTEP, size=n)
        report = gof_mixed(
            x, 0.0, R_ONESTEP.atom_prob,
            lambda xx: transition_density_gou(xx, DT, 0.0, PAPER_ONESTEP,
                                              200)[1],
            n_bins=50, level=0.01,
        )
        assert report.passed, report


class TestSimulatePath:
    def test_jump_free_decay(self):
        p = GouParams(k=0.5, lam=0.0, beta=1.0, x0=10.0)
        times = np.array([0.0, 0.5, 1.0, 2.0])
        for alg in ("sd_polya", "lawrence", "qu"):
            path = simulate_path(make_stream(56), p, times, alg)
            assert np.allclose(path.values, 10.0 * np.exp(-0.5 * times),
                               rtol=1e-12)

    def test_trajectory_mean(self):
        n = 400_000
        vals = simulate_paths(
            make_stream(57), PAPER_TRAJ, [0.0, 0.25, 0.5, 0.75, 1.0],
            "sd_polya", n,
        )[:, -1]
        stats = summarize(vals)
        want = gou_moments(PAPER_TRAJ, 1.0)
        assert abs(stats.mean - want.mean) < 4.0 * stats.standard_errors[0]
        assert want.mean == pytest.approx(6.8522, abs=5e-4)

    def test_semigroup_in_law(self):
        # four quarterly steps compose to the exact one-step law at t = 1;
        # rounding collapses the atom locations, which differ by float
        # accumulation (a^4 vs e^{-k}) at the 1e-15 scale
        n = 300_000
        multi = simulate_paths(
            make_stream(58), PAPER_TRAJ, [0.0, 0.25, 0.5, 0.75, 1.0],
            "sd_polya", n,
        )[:, -1]
        single = simulate_paths(
            make_stream(59), PAPER_TRAJ, [0.0, 1.0], "sd_polya", n,
        )[:, 1]
        assert ks_2samp(np.round(multi, 9), np.round(single, 9)).pvalue > 0.01

    def test_deterministic_replay(self):
        args = (PAPER_ONESTEP, [0.0, DT, 2 * DT], "qu", 1000)
        a = simulate_paths(make_stream(60), *args)
        b = simulate_paths(make_stream(60), *args)
        assert np.array_equal(a, b)

    def test_skeleton_contract(self):
        path = simulate_path(make_stream(61), PAPER_ONESTEP, [0.0, DT],
                             "sd_polya")
        assert path.values[0] == PAPER_ONESTEP.x0
        assert path.times.shape == path.values.shape

    def test_sd_binomial_requires_integer_shape(self):
        with pytest.raises(ConfigurationError, match="integer lam/k"):
            simulate_paths(make_stream(0), PAPER_ONESTEP, [0.0, DT],
                           "sd_binomial", 10)

    def test_sd_binomial_round_shape_opt_in(self):
        p = GouParams(k=0.5, lam=1.02, beta=1.0, x0=0.0)
        with pytest.raises(ConfigurationError):
            simulate_paths(make_stream(0), p, [0.0, 1.0], "sd_binomial", 10)
        vals = simulate_paths(make_stream(62), p, [0.0, 1.0], "sd_binomial",
                              10, round_shape=True)
        assert vals.shape == (10, 2)

    def test_ar_grid_violation_names_step(self):
        p = GouParams(k=2.0, lam=1.0, beta=1.0, x0=0.0)
        with pytest.raises(ConfigurationError, match="step 2"):
            simulate_paths(make_stream(0), p, [0.0, 0.1, 1.0], "ar_pseudo", 10)

    def test_unknown_algorithm(self):
        with pytest.raises(ConfigurationError):
            simulate_paths(make_stream(0), PAPER_ONESTEP, [0.0, DT],
                           "euler", 10)

    def test_bad_grid(self):
        with pytest.raises(ConfigurationError):
            simulate_paths(make_stream(0), PAPER_ONESTEP, [0.0, DT, DT],
                           "sd_polya", 10)


class TestDistributionalProperties:
    def test_scaling_in_law(self):
        r = RemainderParams(0.8, 1.3, 2.0)
        c = 3.0
        x = sample_remainder_polya(make_stream(63), r, size=300_000)
        y = sample_remainder_polya(
            make_stream(64), RemainderParams(0.8, 1.3, 2.0 / c), size=300_000
        )
        assert ks_2samp(c * x, y).pvalue > 0.01

    def test_summation_in_law(self):
        a, beta = 0.7, 2.0
        x1 = sample_remainder_polya(
            make_stream(65), RemainderParams(a, 0.6, beta), size=300_000
        )
        x2 = sample_remainder_polya(
            make_stream(66), RemainderParams(a, 1.1, beta), size=300_000
        )
        y = sample_remainder_polya(
            make_stream(67), RemainderParams(a, 1.7, beta), size=300_000
        )
        assert ks_2samp(x1 + x2, y).pvalue > 0.01

    def test_cf_consistency_all_algorithms(self):
        n = 400_000
        u = np.linspace(-20, 20, 41)
        want = chf_gou_conditional(u, DT, 0.0, PAPER_ONESTEP)
        for i, alg in enumerate(("sd_polya", "ar_pseudo", "lawrence", "qu")):
            x = simulate_paths(make_stream(70 + i), PAPER_ONESTEP,
                               [0.0, DT], alg, n)[:, 1]
            sup = np.abs(empirical_chf(x, u) - want).max()
            assert sup < 4.0 / math.sqrt(n), alg
