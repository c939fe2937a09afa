"""Statistical oracles: moment summaries with standard errors, empirical
characteristic functions, and goodness-of-fit for mixed atom+continuous
transition laws.

Standard errors are asymptotic and moment-based (empirical influence
functions), so they stay honest for the heavy-tailed laws produced here;
for normal data they reduce to the classical sqrt(6/n) and sqrt(24/n)
values for skewness and kurtosis.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.stats import chi2 as chi2_dist
from scipy.stats import norm as norm_dist

from gammaou.params import Moments, ParameterError


@dataclass(frozen=True)
class SummaryStats:
    """First four sample moments with asymptotic standard errors.

    ``variance`` is the unbiased estimator; ``skewness``/``kurtosis`` are
    standardized central moments (kurtosis non-excess).  A constant sample
    is flagged ``degenerate`` with NaN shape statistics.
    """

    n_samples: int
    mean: float
    variance: float
    skewness: float
    kurtosis: float
    standard_errors: tuple[float, float, float, float]
    degenerate: bool = False

    @property
    def moments(self) -> Moments:
        return Moments(self.mean, self.variance, self.skewness, self.kurtosis)

    def deltas(self, oracle: Moments) -> tuple[float, float, float, float]:
        """Per-moment (sample - oracle) / standard error."""
        obs = self.moments
        return tuple(
            (obs[i] - oracle[i]) / self.standard_errors[i] for i in range(4)
        )


def summarize(samples) -> SummaryStats:
    """Moment summary of a 1-d sample with influence-function standard errors."""
    x = np.asarray(samples, dtype=float).ravel()
    n = x.shape[0]
    if n < 2:
        raise ParameterError(f"need at least 2 samples, got {n}")
    mean = float(x.mean())
    z = x - mean
    z2 = z * z
    m2 = float(z2.mean())
    variance = m2 * n / (n - 1)
    se_mean = math.sqrt(variance / n)
    if m2 == 0.0:
        return SummaryStats(
            n_samples=n, mean=mean, variance=0.0,
            skewness=float("nan"), kurtosis=float("nan"),
            standard_errors=(0.0, 0.0, float("nan"), float("nan")),
            degenerate=True,
        )
    z3 = z2 * z
    z4 = z2 * z2
    m3 = float(z3.mean())
    m4 = float(z4.mean())
    skewness = m3 / m2 ** 1.5
    kurtosis = m4 / m2 ** 2
    se_var = math.sqrt(max(m4 - m2 * m2, 0.0) / n)
    if_skew = (z3 - m3 - 3.0 * m2 * z) / m2 ** 1.5 \
        - 1.5 * (m3 / m2 ** 2.5) * (z2 - m2)
    se_skew = math.sqrt(float((if_skew * if_skew).mean()) / n)
    if_kurt = (z4 - m4 - 4.0 * m3 * z) / m2 ** 2 \
        - 2.0 * (m4 / m2 ** 3) * (z2 - m2)
    se_kurt = math.sqrt(float((if_kurt * if_kurt).mean()) / n)
    return SummaryStats(
        n_samples=n, mean=mean, variance=variance,
        skewness=skewness, kurtosis=kurtosis,
        standard_errors=(se_mean, se_var, se_skew, se_kurt),
    )


def pairwise_deltas(s1: SummaryStats, s2: SummaryStats):
    """Moment differences between two samples in combined-s.e. units."""
    out = []
    for i in range(4):
        se = math.hypot(s1.standard_errors[i], s2.standard_errors[i])
        out.append((s1.moments[i] - s2.moments[i]) / se)
    return tuple(out)


def empirical_chf(samples, u_grid) -> np.ndarray:
    """(1/N) sum_j e^{i u x_j} on each grid point (looped to bound memory)."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise ParameterError("empirical_chf needs a non-empty sample")
    u_grid = np.atleast_1d(np.asarray(u_grid, dtype=float))
    out = np.empty(u_grid.shape[0], dtype=complex)
    for i, u in enumerate(u_grid):
        out[i] = np.exp(1j * u * x).mean()
    return out


@dataclass(frozen=True)
class GofReport:
    """Mixed-law goodness-of-fit result (atom proportion test + chi-square
    on the continuous part)."""

    n_samples: int
    n_atom: int
    atom_prob: float
    atom_zscore: float
    atom_pvalue: float
    chi2_stat: float
    dof: int
    chi2_pvalue: float
    n_bins_used: int
    n_bins_collapsed: int
    level: float
    passed: bool
    notes: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in (
            "n_samples", "n_atom", "atom_prob", "atom_zscore", "atom_pvalue",
            "chi2_stat", "dof", "chi2_pvalue", "n_bins_used",
            "n_bins_collapsed", "level", "passed",
        )}
        d["notes"] = list(self.notes)
        return d


def _collapse_bins(observed, expected, min_expected=5.0):
    """Merge adjacent bins until every expected count clears the floor."""
    obs = list(observed)
    exp = list(expected)
    collapsed = 0
    i = 0
    while i < len(exp):
        if exp[i] < min_expected and len(exp) > 1:
            j = i + 1 if i + 1 < len(exp) else i - 1
            exp[j] += exp[i]
            obs[j] += obs[i]
            del exp[i], obs[i]
            collapsed += 1
            i = 0 if j < i else i
        else:
            i += 1
    return np.asarray(obs, dtype=float), np.asarray(exp, dtype=float), collapsed


def gof_mixed(samples, atom_location: float, atom_prob: float, density,
              n_bins: int = 50, level: float = 0.01) -> GofReport:
    """Test a sample against a mixed law: a point mass of ``atom_prob`` at
    ``atom_location`` plus the continuous ``density`` (a callable).

    Exact floating-point matches with the atom location count as atom
    hits (the samplers produce the atom exactly).  The atom frequency
    gets a binomial z-test; the continuous remainder a chi-square against
    density-integrated bin probabilities on sample-quantile bins, with
    low-expectation bins collapsed automatically.
    """
    if not 0.0 <= atom_prob <= 1.0:
        raise ParameterError(f"atom_prob must lie in [0, 1], got {atom_prob}")
    x = np.asarray(samples, dtype=float).ravel()
    n = x.shape[0]
    if n < 10:
        raise ParameterError("gof_mixed needs at least 10 samples")
    notes = []
    is_atom = x == atom_location
    n_atom = int(is_atom.sum())
    if 0.0 < atom_prob < 1.0:
        se = math.sqrt(atom_prob * (1.0 - atom_prob) / n)
        atom_z = (n_atom / n - atom_prob) / se
    else:
        atom_z = 0.0 if n_atom / n == atom_prob else math.inf
        notes.append("degenerate atom probability")
    atom_pvalue = 2.0 * norm_dist.sf(abs(atom_z))

    cont = x[~is_atom]
    m = cont.shape[0]
    if m < 2 * n_bins:
        raise ParameterError(
            f"too few continuous samples ({m}) for {n_bins} bins"
        )
    edges = np.quantile(cont, np.linspace(0.0, 1.0, n_bins + 1))
    edges = np.unique(edges)
    if edges.shape[0] - 1 < n_bins:
        notes.append("duplicate quantile edges merged")
    observed, _ = np.histogram(cont, bins=edges)
    # outermost bins absorb the tails of the law
    lo = [-np.inf] + list(edges[1:-1])
    hi = list(edges[1:-1]) + [np.inf]
    probs = np.array([
        quad(density, lo_i, hi_i, limit=200)[0] for lo_i, hi_i in zip(lo, hi)
    ])
    probs = np.maximum(probs, 0.0)
    total = probs.sum()
    if total <= 0:
        raise ParameterError("density integrates to zero over the data range")
    expected = m * probs / total
    obs_c, exp_c, collapsed = _collapse_bins(observed, expected)
    if collapsed:
        notes.append(f"{collapsed} low-expectation bins collapsed")
    chi2 = float(((obs_c - exp_c) ** 2 / exp_c).sum())
    dof = max(obs_c.shape[0] - 1, 1)
    chi2_pvalue = float(chi2_dist.sf(chi2, dof))
    passed = bool(atom_pvalue > level and chi2_pvalue > level)
    return GofReport(
        n_samples=n, n_atom=n_atom, atom_prob=atom_prob,
        atom_zscore=float(atom_z), atom_pvalue=float(atom_pvalue),
        chi2_stat=chi2, dof=dof, chi2_pvalue=chi2_pvalue,
        n_bins_used=int(obs_c.shape[0]), n_bins_collapsed=int(collapsed),
        level=level, passed=passed, notes=tuple(notes),
    )
