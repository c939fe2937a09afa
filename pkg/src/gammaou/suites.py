"""Prepackaged validation suites: every closed-form result doubles as an
automated oracle for the samplers.

A suite draws one-step samples from each feasible algorithm and checks

* first four moments against the closed-form values (4 s.e. bands),
* the empirical CF against the conditional CF (sup error 4/sqrt(N)),
* the zero-atom frequency against its exact mass (3 s.e.),
* the mixed transition density via gof_mixed,
* pairwise two-sample KS agreement between algorithms.

``oracle_beta_scale`` perturbs beta inside the oracles only, as a negative
control: a correct sampler must then fail the named tests.
"""

import math

import numpy as np
from scipy.stats import ks_2samp

from gammaou import bgou, gou
from gammaou.params import BgouParams, GouParams
from gammaou.rng import RngStream
from gammaou.validation import empirical_chf, gof_mixed, summarize

U_GRID = np.linspace(-20.0, 20.0, 41)


def _moment_tests(name, stats, oracle, tol_se=4.0):
    labels = ("mean", "variance", "skewness", "kurtosis")
    deltas = stats.deltas(oracle)
    return [{
        "name": f"{name}:moment:{labels[i]}",
        "passed": bool(abs(deltas[i]) <= tol_se),
        "stat": float(deltas[i]),
        "detail": f"delta = {deltas[i]:.3f} s.e. (tolerance {tol_se})",
    } for i in range(4)]


def _cf_test(name, samples, cf_exact):
    ecf = empirical_chf(samples, U_GRID)
    sup = float(np.abs(ecf - cf_exact).max())
    bound = 4.0 / math.sqrt(samples.shape[0])
    return {
        "name": f"{name}:cf",
        "passed": bool(sup <= bound),
        "stat": sup,
        "detail": f"sup |ecf - cf| = {sup:.3e} (bound {bound:.3e})",
    }


def _atom_test(name, samples, atom_location, atom_prob, tol_se=3.0):
    n = samples.shape[0]
    freq = float((samples == atom_location).mean())
    se = math.sqrt(atom_prob * (1.0 - atom_prob) / n)
    z = (freq - atom_prob) / se
    return {
        "name": f"{name}:atom",
        "passed": bool(abs(z) <= tol_se),
        "stat": float(z),
        "detail": f"freq {freq:.6f} vs {atom_prob:.6f} ({z:.2f} s.e.)",
    }


def _ks_tests(prefix, samples_by_alg, level):
    algs = sorted(samples_by_alg)
    out = []
    for i, a in enumerate(algs):
        for b in algs[i + 1:]:
            pv = float(ks_2samp(samples_by_alg[a], samples_by_alg[b]).pvalue)
            out.append({
                "name": f"{prefix}:ks:{a}-vs-{b}",
                "passed": bool(pv > level),
                "stat": pv,
                "detail": f"two-sample KS p = {pv:.4g} (level {level})",
            })
    return out


def feasible_gou_algorithms(p: GouParams, t: float) -> list[str]:
    algs = ["sd_polya", "lawrence", "qu"]
    if gou.integer_shape(p.alpha) is not None:
        algs.insert(1, "sd_binomial")
    if p.decay(t) >= 0.5:
        algs.append("ar_pseudo")
    return algs


def feasible_bgou_algorithms(p: BgouParams, t: float) -> list[str]:
    algs = ["sd_diff", "lawrence_ext"]
    if p.symmetric():
        algs += ["sd_sym", "qu_sym"]
        if p.decay(t) >= 1.0 / math.sqrt(2.0):
            algs.append("ar_sym")
    return algs


def run_gou_suite(p: GouParams, t: float, n_samples: int = 200_000,
                  seed: int = 20260808, level: float = 0.01,
                  trunc: int = 200, oracle_beta_scale: float = 1.0,
                  backend: str | None = None) -> dict:
    """One-step validation of every feasible GOU sampler."""
    p_oracle = GouParams(p.k, p.lam, p.beta * oracle_beta_scale, p.x0)
    oracle = gou.gou_moments(p_oracle, t)
    a = p_oracle.decay(t)
    atom_loc = a * p.x0
    cf_exact = gou.chf_gou_conditional(U_GRID, t, p.x0, p_oracle)
    tests = []
    samples_by_alg = {}
    for i, alg in enumerate(feasible_gou_algorithms(p, t)):
        stream = RngStream(seed, stream_id=i + 1, backend=backend)
        x = gou.simulate_paths(stream, p, [0.0, t], alg, n_samples)[:, 1]
        samples_by_alg[alg] = x
        tests += _moment_tests(alg, summarize(x), oracle)
        tests.append(_cf_test(alg, x, cf_exact))
        tests.append(_atom_test(
            alg, x, atom_loc, p_oracle.decay(t) ** p_oracle.alpha
        ))
    dens = lambda xx: gou.transition_density_gou(  # noqa: E731
        xx, t, p.x0, p_oracle, trunc
    )[1]
    atom_prob = p_oracle.decay(t) ** p_oracle.alpha
    gof = gof_mixed(samples_by_alg["sd_polya"], atom_loc, atom_prob, dens,
                    level=level)
    tests.append({
        # the atom frequency already has its dedicated 3-s.e. test above;
        # gate this entry on the continuous chi-square part only
        "name": "sd_polya:gof_mixed",
        "passed": bool(gof.chi2_pvalue > level),
        "stat": gof.chi2_pvalue,
        "detail": f"chi2 p = {gof.chi2_pvalue:.4g}, atom p = "
                  f"{gof.atom_pvalue:.4g}",
    })
    tests += _ks_tests("gou", samples_by_alg, level)
    return {
        "process": "gou",
        "params": {"k": p.k, "lam": p.lam, "beta": p.beta, "x0": p.x0},
        "t": t, "n_samples": n_samples, "seed": seed, "level": level,
        "oracle_beta_scale": oracle_beta_scale,
        "tests": tests,
        "passed": all(tt["passed"] for tt in tests),
    }


def run_bgou_suite(p: BgouParams, t: float, n_samples: int = 200_000,
                   seed: int = 20260808, level: float = 0.01,
                   trunc: int = 60, oracle_beta_scale: float = 1.0,
                   backend: str | None = None) -> dict:
    """One-step validation of every feasible BGOU sampler."""
    p_oracle = BgouParams(p.k, p.lam1, p.beta1 * oracle_beta_scale,
                          p.lam2, p.beta2 * oracle_beta_scale, p.x0)
    oracle = bgou.bgou_moments(p_oracle, t)
    a = p_oracle.decay(t)
    atom_loc = a * p.x0
    atom_prob = a ** (p_oracle.alpha1 + p_oracle.alpha2)
    cf_exact = bgou.chf_bgou_conditional(U_GRID, t, p.x0, p_oracle)
    tests = []
    samples_by_alg = {}
    for i, alg in enumerate(feasible_bgou_algorithms(p, t)):
        stream = RngStream(seed, stream_id=100 + i, backend=backend)
        x = bgou.simulate_paths_bgou(stream, p, [0.0, t], alg, n_samples)[:, 1]
        samples_by_alg[alg] = x
        tests += _moment_tests(alg, summarize(x), oracle)
        tests.append(_cf_test(alg, x, cf_exact))
        tests.append(_atom_test(alg, x, atom_loc, atom_prob))
    dens = lambda xx: bgou.transition_density_bgou(  # noqa: E731
        xx, t, p.x0, p_oracle, trunc
    )[1]
    ref = "sd_sym" if "sd_sym" in samples_by_alg else "sd_diff"
    gof = gof_mixed(samples_by_alg[ref], atom_loc, atom_prob, dens,
                    level=level)
    tests.append({
        "name": f"{ref}:gof_mixed",
        "passed": bool(gof.chi2_pvalue > level),
        "stat": gof.chi2_pvalue,
        "detail": f"chi2 p = {gof.chi2_pvalue:.4g}, atom p = "
                  f"{gof.atom_pvalue:.4g}",
    })
    tests += _ks_tests("bgou", samples_by_alg, level)
    return {
        "process": "bgou",
        "params": {"k": p.k, "lam1": p.lam1, "beta1": p.beta1,
                   "lam2": p.lam2, "beta2": p.beta2, "x0": p.x0},
        "t": t, "n_samples": n_samples, "seed": seed, "level": level,
        "oracle_beta_scale": oracle_beta_scale,
        "tests": tests,
        "passed": all(tt["passed"] for tt in tests),
    }
