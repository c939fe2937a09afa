"""Benchmark harness: wall-time comparison of the path samplers with
statistical validation attached to every run.

Timing protocol: one untimed warm-up run (JIT compilation, caches), then
``repetitions`` timed runs on fresh substreams; the recorded wall time is
the median.  The timed region covers path generation only; stream
construction and I/O sit outside it.  Terminal-value statistics come from
the first timed run and must sit within 4 standard errors of the
closed-form oracle (a benchmark that is fast but wrong fails loudly);
skewness/kurtosis are only enforced for n_paths >= 10^5 where their
standard-error estimates are solid.
"""

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from gammaou import bgou, gou
from gammaou.params import (
    BgouParams,
    ConfigurationError,
    DomainError,
    GouParams,
    Moments,
)
from gammaou.rng import RngStream
from gammaou.validation import SummaryStats, summarize

DEFAULT_SEED = 20260808

SD_REFERENCE = {"gou": "sd_polya", "bgou": "sd_sym"}


class OracleCheckError(RuntimeError):
    """A benchmark run drifted outside 4 s.e. of its closed-form oracle."""


@dataclass
class BenchRecord:
    algorithm: str
    process: str
    params: dict
    n_paths: int
    n_steps: int
    wall_time: float
    stats: SummaryStats | None
    oracle_deltas: tuple | None
    backend: str
    skipped: str | None = None
    parallel_workers: int = 0
    label: str = ""


def _params_obj(process: str, params: dict):
    if process == "gou":
        return GouParams(**params)
    if process == "bgou":
        if "lam1" in params:
            return BgouParams(**params)
        if "p" in params:
            return BgouParams.from_bdlp(**params)
        return BgouParams.symmetric_from(**params)
    raise ConfigurationError(f"unknown process {process!r}")


def _oracle(process: str, pobj, horizon: float) -> Moments:
    if process == "gou":
        return gou.gou_moments(pobj, horizon)
    return bgou.bgou_moments(pobj, horizon)


def _simulate(stream, process, pobj, times, algorithm, n_paths, workers,
              trunc=40):
    # terminal values only: the timed region is sampling, not skeleton I/O
    if process == "gou":
        fn = gou.simulate_terminal
    else:
        fn = bgou.simulate_terminal_bgou
    if workers <= 1:
        return fn(stream, pobj, times, algorithm, n_paths, trunc=trunc)
    # parallel mode: disjoint substreams per worker, threads only
    # (the numba kernels release the GIL)
    chunks = np.array_split(np.arange(n_paths), workers)
    streams = [
        stream.spawn((stream.stream_id << 8) | (w + 1))
        for w in range(len(chunks))
    ]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(
            lambda args: fn(args[0], pobj, times, algorithm, len(args[1]),
                            trunc=trunc),
            zip(streams, chunks),
        ))
    return np.concatenate(parts)


def check_oracle(stats: SummaryStats, oracle: Moments, n_paths: int,
                 tol_se: float = 4.0):
    """Return per-moment deltas in s.e. units, raising when out of band."""
    deltas = stats.deltas(oracle)
    n_checked = 4 if n_paths >= 100_000 else 2
    for i in range(n_checked):
        if not abs(deltas[i]) <= tol_se:
            raise OracleCheckError(
                f"moment {i} off by {deltas[i]:.2f} s.e. "
                f"(sample {stats.moments[i]!r} vs oracle {oracle[i]!r})"
            )
    return deltas


def run_benchmark(plan, repetitions: int = 5, seed: int = DEFAULT_SEED,
                  backend: str | None = None, check_oracles: bool = True,
                  workers: int = 1) -> list[BenchRecord]:
    """Execute a benchmark plan.

    Each plan entry is a mapping with keys ``process`` ("gou"/"bgou"),
    ``algorithm``, ``params`` (dict), ``times`` (grid) and ``n_paths``.
    Entries whose preconditions fail are recorded as skipped, not raised.
    """
    if repetitions < 1:
        raise ConfigurationError(f"repetitions must be >= 1, got {repetitions}")
    records = []
    for idx, entry in enumerate(plan):
        process = entry["process"]
        algorithm = entry["algorithm"]
        n_paths = int(entry["n_paths"])
        times = np.asarray(entry["times"], dtype=float)
        label = entry.get("label", "")
        trunc = int(entry.get("trunc", 40))
        pobj = _params_obj(process, entry["params"])
        base = RngStream(seed, stream_id=idx + 1, backend=backend)
        try:
            # warm-up run, excluded from timing
            _simulate(base.spawn((idx + 1) * 1000), process, pobj, times,
                      algorithm, min(n_paths, 10_000), 1, trunc)
        except (ConfigurationError, DomainError) as exc:
            records.append(BenchRecord(
                algorithm=algorithm, process=process, params=dict(entry["params"]),
                n_paths=n_paths, n_steps=times.shape[0] - 1, wall_time=float("nan"),
                stats=None, oracle_deltas=None, backend=base.backend,
                skipped=str(exc), parallel_workers=workers, label=label,
            ))
            continue
        elapsed = []
        first_values = None
        for rep in range(repetitions):
            stream = base.spawn((idx + 1) * 1000 + rep + 1)
            t0 = time.perf_counter()
            values = _simulate(stream, process, pobj, times, algorithm,
                               n_paths, workers, trunc)
            elapsed.append(time.perf_counter() - t0)
            if rep == 0:
                first_values = values
        stats = summarize(first_values)
        horizon = float(times[-1] - times[0])
        oracle = _oracle(process, pobj, horizon)
        if check_oracles:
            deltas = check_oracle(stats, oracle, n_paths)
        else:
            deltas = stats.deltas(oracle)
        records.append(BenchRecord(
            algorithm=algorithm, process=process, params=dict(entry["params"]),
            n_paths=n_paths, n_steps=times.shape[0] - 1,
            wall_time=float(np.median(elapsed)), stats=stats,
            oracle_deltas=tuple(deltas), backend=base.backend,
            parallel_workers=workers, label=label,
        ))
    return records


# ----------------------------------------------------------------------
# Tables
# ----------------------------------------------------------------------

COLUMNS = (
    "label", "algorithm", "process", "backend", "workers", "n_paths",
    "n_steps", "wall_time_s", "mean", "var", "skew", "kurt",
    "d_mean_se", "d_var_se", "d_skew_se", "d_kurt_se",
    "ratio_vs_sd", "params", "skipped",
)


def emit_table(records) -> str:
    """Render records as CSV, one row per record.

    ``ratio_vs_sd`` is wall_time(algorithm) / wall_time of the
    self-decomposable reference (sd_polya or sd_sym) within the same
    (process, backend, n_paths, n_steps, label) group.
    """
    records = list(records)
    if not records:
        raise ConfigurationError("emit_table called with no records")
    ref_time = {}
    for r in records:
        key = (r.process, r.backend, r.n_paths, r.n_steps, r.label)
        if r.algorithm == SD_REFERENCE.get(r.process) and r.skipped is None:
            ref_time[key] = r.wall_time
    lines = [",".join(COLUMNS)]
    for r in records:
        key = (r.process, r.backend, r.n_paths, r.n_steps, r.label)
        ratio = ""
        if r.skipped is None and key in ref_time:
            ratio = repr(r.wall_time / ref_time[key])
        if r.stats is None:
            moments = [""] * 4
            deltas = [""] * 4
            wall = ""
        else:
            moments = [repr(v) for v in r.stats.moments]
            deltas = [repr(v) for v in r.oracle_deltas]
            wall = repr(r.wall_time)
        row = [
            r.label, r.algorithm, r.process, r.backend,
            str(r.parallel_workers), str(r.n_paths), str(r.n_steps), wall,
            *moments, *deltas, ratio,
            json.dumps(r.params, sort_keys=True).replace(",", ";"),
            (r.skipped or "").replace(",", ";"),
        ]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def parse_table(text: str) -> list[dict]:
    """Inverse of :func:`emit_table` at the row level (string-valued)."""
    lines = [ln for ln in text.strip().splitlines() if ln]
    header = lines[0].split(",")
    if tuple(header) != COLUMNS:
        raise ConfigurationError("unrecognized benchmark table header")
    return [dict(zip(COLUMNS, ln.split(","))) for ln in lines[1:]]


# ----------------------------------------------------------------------
# Built-in plans
# ----------------------------------------------------------------------

ONESTEP_PARAMS = {"k": 36.0, "lam": 10.0, "beta": 3.0, "x0": 0.0}
TRAJECTORY_PARAMS = {"k": 0.5, "lam": 1.0, "beta": 1.0, "x0": 10.0}

_LADDER = [10_000 * 2 ** j for j in range(9)]  # 1e4 .. 2.56e6


def builtin_plan(name: str) -> list[dict]:
    """Shipped plans: ``stock-onestep`` (single step at dt = 1/365,
    doubling path counts up to 2.56e6), ``stock-trajectory`` (four
    quarterly steps to t = 1) and ``jump-rich`` (coarse grid, ~50 jumps
    per step, where the one-draw samplers shine)."""
    if name == "stock-onestep":
        dt = 1.0 / 365.0
        plan = []
        for n in _LADDER:
            for alg in ("sd_polya", "ar_pseudo", "lawrence", "qu"):
                plan.append({
                    "label": "gou-onestep", "process": "gou",
                    "algorithm": alg, "params": dict(ONESTEP_PARAMS),
                    "times": [0.0, dt], "n_paths": n,
                })
            for alg in bgou.BGOU_ALGORITHMS:
                plan.append({
                    "label": "bgou-onestep", "process": "bgou",
                    "algorithm": alg, "params": dict(ONESTEP_PARAMS),
                    "times": [0.0, dt], "n_paths": n,
                })
        return plan
    if name == "stock-trajectory":
        times = [0.0, 0.25, 0.5, 0.75, 1.0]
        plan = []
        for n in [10_000 * 2 ** j for j in range(8)]:
            for alg in gou.GOU_ALGORITHMS:
                plan.append({
                    "label": "gou-trajectory", "process": "gou",
                    "algorithm": alg, "params": dict(TRAJECTORY_PARAMS),
                    "times": times, "n_paths": n,
                })
            for alg in bgou.BGOU_ALGORITHMS:
                plan.append({
                    "label": "bgou-trajectory", "process": "bgou",
                    "algorithm": alg, "params": dict(TRAJECTORY_PARAMS),
                    "times": times, "n_paths": n,
                })
        return plan
    if name == "jump-rich":
        # coarse grid with ~50 jumps per step: here the one-draw samplers
        # hold their O(1) per-step cost while the jump-time constructions
        # pay O(jumps), so the structural gap is visible
        params = {"k": 0.3, "lam": 50.0, "beta": 2.0, "x0": 0.0}
        return [
            {
                "label": "gou-jump-rich", "process": "gou",
                "algorithm": alg, "params": params,
                "times": [0.0, 1.0], "n_paths": 320_000,
                # the pseudo-mixture bulk sits near k = 58 here
                "trunc": 150,
            }
            for alg in ("sd_polya", "ar_pseudo", "lawrence", "qu")
        ]
    raise ConfigurationError(
        f"unknown built-in plan {name!r}; "
        "choose 'stock-onestep', 'stock-trajectory' or 'jump-rich'"
    )
