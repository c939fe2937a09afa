"""Tests for the statistical oracle machinery itself."""

import math

import numpy as np
import pytest

from gammaou.params import GouParams, ParameterError
from gammaou.gou import gou_moments, sample_remainder_polya, \
    transition_density_gou
from gammaou.validation import (
    empirical_chf,
    gof_mixed,
    pairwise_deltas,
    summarize,
)

from conftest import make_stream


def _normal(stream, n):
    # Box-Muller from the uniform stream
    u = stream.uniform(size=2 * n)
    return np.sqrt(-2.0 * np.log1p(-u[0::2])) * np.cos(2 * np.pi * u[1::2])


class TestSummarize:
    def test_rejects_short_input(self):
        with pytest.raises(ParameterError):
            summarize([1.0])

    def test_constant_sample_degenerate(self):
        s = summarize(np.full(100, 3.25))
        assert s.degenerate
        assert s.variance == 0.0
        assert math.isnan(s.skewness) and math.isnan(s.kurtosis)

    def test_standard_normal_moments(self):
        x = _normal(make_stream(200), 1_000_000)
        s = summarize(x)
        for got, want, se in zip(s.moments, (0.0, 1.0, 0.0, 3.0),
                                 s.standard_errors):
            assert abs(got - want) < 4.0 * se

    def test_normal_theory_se_recovered(self):
        # influence-function s.e. reduce to sqrt(6/n), sqrt(24/n) for
        # normal data
        n = 1_000_000
        x = _normal(make_stream(201), n)
        s = summarize(x)
        assert s.standard_errors[2] == pytest.approx(math.sqrt(6.0 / n),
                                                     rel=0.05)
        assert s.standard_errors[3] == pytest.approx(math.sqrt(24.0 / n),
                                                     rel=0.05)

    def test_se_shrinks_like_inverse_sqrt_n(self):
        stream = make_stream(202)
        sizes = [50_000, 100_000, 200_000, 400_000]
        ses = []
        for n in sizes:
            ses.append(summarize(_normal(stream, n)).standard_errors)
        for j in range(4):
            ratios = [ses[i][j] / ses[i + 1][j] for i in range(3)]
            for r in ratios:
                assert r == pytest.approx(math.sqrt(2.0), rel=0.1)

    def test_unbiased_variance(self):
        x = np.array([1.0, 2.0, 3.0])
        assert summarize(x).variance == pytest.approx(1.0)

    def test_heavy_tail_se_exceeds_normal_theory(self):
        # for the atom-dominated remainder law the kurtosis s.e. is orders
        # of magnitude above sqrt(24/n); using the normal-theory value
        # would make every 4-s.e. acceptance band unattainable
        p = GouParams(36.0, 10.0, 3.0, 0.0)
        x = sample_remainder_polya(make_stream(203), p.remainder(1 / 365),
                                   size=500_000)
        s = summarize(x)
        assert s.standard_errors[3] > 100.0 * math.sqrt(24.0 / x.shape[0])
        want = gou_moments(p, 1 / 365)
        deltas = s.deltas(want)
        assert all(abs(d) < 4.0 for d in deltas)


class TestPairwiseDeltas:
    def test_identical_samples_zero(self):
        x = _normal(make_stream(204), 50_000)
        s = summarize(x)
        assert pairwise_deltas(s, s) == (0.0, 0.0, 0.0, 0.0)

    def test_same_law_within_bands(self):
        a = summarize(_normal(make_stream(205), 200_000))
        b = summarize(_normal(make_stream(206), 200_000))
        assert all(abs(d) < 4.0 for d in pairwise_deltas(a, b))


class TestEmpiricalChf:
    def test_at_zero_exactly_one(self):
        x = make_stream(207).exponential(1.0, size=1000)
        assert empirical_chf(x, [0.0])[0] == 1.0 + 0.0j

    def test_degenerate_sample(self):
        c = 2.5
        out = empirical_chf(np.full(100, c), [0.7, -1.3])
        assert np.allclose(out, np.exp(1j * np.array([0.7, -1.3]) * c),
                           rtol=1e-12)

    def test_exponential_law_clt_band(self):
        n = 1_000_000
        rate = 2.0
        x = make_stream(208).exponential(rate, size=n)
        u = np.linspace(-10, 10, 21)
        want = rate / (rate - 1j * u)
        sup = np.abs(empirical_chf(x, u) - want).max()
        assert sup < 4.0 / math.sqrt(n)

    def test_empty_rejected(self):
        with pytest.raises(ParameterError):
            empirical_chf([], [0.0])


class TestGofMixed:
    P = GouParams(36.0, 10.0, 3.0, 0.0)
    T = 1.0 / 365.0

    def _samples(self, stream_id, n=400_000):
        return sample_remainder_polya(
            make_stream(stream_id), self.P.remainder(self.T), size=n
        )

    def _density(self, scale=1.0):
        pp = GouParams(self.P.k, self.P.lam, self.P.beta * scale, self.P.x0)
        return lambda xx: transition_density_gou(xx, self.T, 0.0, pp, 200)[1]

    def test_null_calibration(self):
        r = self.P.remainder(self.T)
        report = gof_mixed(self._samples(210), 0.0, r.atom_prob,
                           self._density(), level=0.01)
        assert report.passed
        assert report.n_atom > 0

    def test_power_against_wrong_beta(self):
        r = self.P.remainder(self.T)
        report = gof_mixed(self._samples(211, 1_000_000), 0.0, r.atom_prob,
                           self._density(1.1), level=0.01)
        assert not report.passed
        assert report.chi2_pvalue < 0.01

    def test_atom_counted_exactly(self):
        x = np.concatenate([np.zeros(500), np.full(500, 1e-300),
                            make_stream(212).exponential(1.0, size=1000)])
        report = gof_mixed(x, 0.0, 0.25, lambda xx: np.exp(-xx) * (xx > 0),
                           n_bins=10, level=0.01)
        assert report.n_atom == 500

    def test_wrong_atom_mass_fails(self):
        report = gof_mixed(self._samples(213), 0.0, 0.9,
                           self._density(), level=0.01)
        assert not report.passed
        assert report.atom_pvalue < 0.01

    def test_report_serializable(self):
        import json
        r = self.P.remainder(self.T)
        report = gof_mixed(self._samples(214, 100_000), 0.0, r.atom_prob,
                           self._density(), level=0.01)
        text = json.dumps(report.to_dict())
        assert "chi2_pvalue" in text
