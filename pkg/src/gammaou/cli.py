"""Command-line front end.

Subcommands: ``simulate`` (write path skeletons as CSV), ``validate``
(run the statistical suites, exit non-zero on failure), ``density``
(tabulate a transition density plus its atom), ``bench`` (run a benchmark
plan and emit the comparison table).

Configuration lives in a JSON file; command-line flags override file
values.  Every output file gets a ``.meta.json`` sidecar carrying the
provenance needed to reproduce it (params, seed, algorithm, truncation,
backend, version).  Exit codes: 0 success, 1 validation failure,
2 configuration error.
"""

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from gammaou import __version__, _backend, bench, bgou, gou, suites
from gammaou.params import (
    ConfigurationError,
    DomainError,
    GouParams,
    ParameterError,
)
from gammaou.rng import RngStream

SEED_ENV_VAR = "GAMMAOU_SEED"
DEFAULT_SEED = 20260808


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read config {path!r}: {exc}") from exc


def _resolve_seed(config: dict, args) -> tuple[int, str]:
    if getattr(args, "seed", None) is not None:
        return int(args.seed), "flag"
    if "seed" in config:
        return int(config["seed"]), "config"
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        return int(env), "env"
    return DEFAULT_SEED, "default"


def _grid_from_config(config: dict, args) -> np.ndarray:
    grid = dict(config.get("grid", {}))
    if getattr(args, "t_end", None) is not None:
        grid["t_end"] = args.t_end
    if getattr(args, "n_steps", None) is not None:
        grid["n_steps"] = args.n_steps
    if "times" in grid:
        return np.asarray(grid["times"], dtype=float)
    try:
        t_end = float(grid["t_end"])
        n_steps = int(grid["n_steps"])
    except KeyError as exc:
        raise ConfigurationError(
            "grid needs either 'times' or 't_end' and 'n_steps'"
        ) from exc
    t_start = float(grid.get("t_start", 0.0))
    return np.linspace(t_start, t_end, n_steps + 1)


def _process_params(config: dict):
    process = config.get("process", "gou").lower()
    params = config.get("params")
    if params is None:
        raise ConfigurationError("config requires a 'params' mapping")
    return process, bench._params_obj(process, params), dict(params)


def _metadata(config, process, params, seed, seed_source, extra) -> dict:
    meta = {
        "version": __version__,
        "backend": _backend.ACTIVE,
        "process": process,
        "params": params,
        "seed": seed,
        "seed_source": seed_source,
    }
    meta.update(extra)
    return meta


def _write_sidecar(output: Path, meta: dict):
    side = output.with_suffix(output.suffix + ".meta.json")
    side.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


# ----------------------------------------------------------------------
# Subcommands
# ----------------------------------------------------------------------

def cmd_simulate(args) -> int:
    config = _load_config(args.config)
    process, pobj, params_dict = _process_params(config)
    algorithm = args.algorithm or config.get("algorithm", "sd_polya")
    n_paths = int(args.n_paths or config.get("n_paths", 1))
    trunc = int(args.truncation or config.get("truncation", 40))
    seed, seed_source = _resolve_seed(config, args)
    times = _grid_from_config(config, args)
    output = Path(args.output or config.get("output", "paths.csv"))

    stream = RngStream(seed, stream_id=0)
    if process == "gou":
        values = gou.simulate_paths(stream, pobj, times, algorithm, n_paths,
                                    trunc=trunc)
    else:
        values = bgou.simulate_paths_bgou(stream, pobj, times, algorithm,
                                          n_paths, trunc=trunc)
    header = ",".join(repr(float(t)) for t in times)
    with open(output, "w") as fh:
        fh.write(header + "\n")
        for row in values:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
    _write_sidecar(output, _metadata(config, process, params_dict, seed,
                                     seed_source, {
        "command": "simulate",
        "algorithm": algorithm,
        "n_paths": n_paths,
        "truncation": trunc,
        "times": [float(t) for t in times],
    }))
    print(f"wrote {n_paths} paths x {times.shape[0]} grid points to {output}")
    return 0


def cmd_validate(args) -> int:
    config = _load_config(args.config)
    process, pobj, params_dict = _process_params(config)
    seed, seed_source = _resolve_seed(config, args)
    t = float(args.t or config.get("t", 1.0 / 365.0))
    n_samples = int(args.n_samples or config.get("n_samples", 200_000))
    level = float(config.get("level", 0.01))
    trunc = int(args.truncation or config.get(
        "truncation", 200 if process == "gou" else 60
    ))
    beta_scale = float(args.corrupt_oracle_beta or 1.0)
    if process == "gou":
        report = suites.run_gou_suite(
            pobj, t, n_samples=n_samples, seed=seed, level=level,
            trunc=trunc, oracle_beta_scale=beta_scale,
        )
    else:
        report = suites.run_bgou_suite(
            pobj, t, n_samples=n_samples, seed=seed, level=level,
            trunc=trunc, oracle_beta_scale=beta_scale,
        )
    for test in report["tests"]:
        status = "PASS" if test["passed"] else "FAIL"
        print(f"[{status}] {test['name']}: {test['detail']}")
    report["seed_source"] = seed_source
    report["version"] = __version__
    report["backend"] = _backend.ACTIVE
    if args.report:
        Path(args.report).write_text(
            json.dumps(report, indent=2, sort_keys=True) + "\n"
        )
    n_fail = sum(not t_["passed"] for t_ in report["tests"])
    print(f"{len(report['tests']) - n_fail}/{len(report['tests'])} tests passed")
    return 0 if report["passed"] else 1


def cmd_density(args) -> int:
    config = _load_config(args.config)
    process, pobj, params_dict = _process_params(config)
    t = float(args.t or config.get("t", 1.0 / 365.0))
    y = float(args.y if args.y is not None else config.get("y", pobj.x0))
    trunc = int(args.truncation or config.get(
        "truncation", 200 if process == "gou" else 60
    ))
    gridcfg = config.get("x_grid", {})
    x_min = float(args.x_min if args.x_min is not None
                  else gridcfg.get("x_min", -1.0))
    x_max = float(args.x_max if args.x_max is not None
                  else gridcfg.get("x_max", 1.0))
    n_points = int(args.n_points or gridcfg.get("n_points", 401))
    xs = np.linspace(x_min, x_max, n_points)
    if process == "gou":
        atom_prob, dens = gou.transition_density_gou(xs, t, y, pobj, trunc)
        tail = gou.gou_density_tail_mass(t, pobj, trunc)
    else:
        atom_prob, dens = bgou.transition_density_bgou(xs, t, y, pobj, trunc)
        tail = bgou.bgou_density_tail_mass(t, pobj, trunc)
    atom_location = pobj.decay(t) * y
    output = Path(args.output or config.get("output", "density.csv"))
    with open(output, "w") as fh:
        fh.write(f"# atom,{float(atom_location)!r},{float(atom_prob)!r}\n")
        fh.write("x,density\n")
        for xx, dd in zip(xs, dens):
            fh.write(f"{float(xx)!r},{float(dd)!r}\n")
    _write_sidecar(output, _metadata(config, process, params_dict, 0, "n/a", {
        "command": "density",
        "t": t, "y": y, "truncation": trunc,
        "atom_location": atom_location,
        "atom_prob": atom_prob,
        "tail_mass": tail,
    }))
    print(f"wrote density on [{x_min}, {x_max}] ({n_points} points) to {output}")
    return 0


def cmd_bench(args) -> int:
    config = _load_config(args.config) if args.config else {}
    if args.builtin:
        plan = bench.builtin_plan(args.builtin)
    elif args.plan:
        try:
            with open(args.plan) as fh:
                plan = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(
                f"cannot read plan {args.plan!r}: {exc}"
            ) from exc
    elif "plan" in config:
        plan = config["plan"]
    else:
        raise ConfigurationError("bench needs --builtin, --plan or a config plan")
    seed, seed_source = _resolve_seed(config, args)
    backends = (args.backends.split(",") if args.backends
                else [_backend.ACTIVE])
    records = []
    for be in backends:
        records += bench.run_benchmark(
            plan, repetitions=int(args.repetitions), seed=seed,
            backend=be.strip(), check_oracles=not args.no_oracle_check,
            workers=int(args.workers),
        )
    table = bench.emit_table(records)
    output = Path(args.output or config.get("output", "bench.csv"))
    output.write_text(table)
    _write_sidecar(output, {
        "version": __version__,
        "command": "bench",
        "seed": seed,
        "seed_source": seed_source,
        "backends": backends,
        "repetitions": int(args.repetitions),
        "workers": int(args.workers),
        "n_entries": len(plan),
    })
    skipped = [r for r in records if r.skipped]
    print(f"wrote {len(records)} benchmark rows to {output} "
          f"({len(skipped)} skipped)")
    return 0


# ----------------------------------------------------------------------
# Parser
# ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gammaou",
        description="Exact simulation of Gamma-OU and bilateral Gamma-OU "
                    "processes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="simulate path skeletons to CSV")
    sim.add_argument("--config", help="JSON config file")
    sim.add_argument("--seed", type=int)
    sim.add_argument("--n-paths", type=int, dest="n_paths")
    sim.add_argument("--algorithm")
    sim.add_argument("--truncation", type=int)
    sim.add_argument("--t-end", type=float, dest="t_end")
    sim.add_argument("--n-steps", type=int, dest="n_steps")
    sim.add_argument("--output")
    sim.set_defaults(func=cmd_simulate)

    val = sub.add_parser("validate", help="run the statistical oracle suites")
    val.add_argument("--config", help="JSON config file")
    val.add_argument("--seed", type=int)
    val.add_argument("--t", type=float)
    val.add_argument("--n-samples", type=int, dest="n_samples")
    val.add_argument("--truncation", type=int)
    val.add_argument("--report", help="write the JSON report here")
    val.add_argument(
        "--corrupt-oracle-beta", type=float, dest="corrupt_oracle_beta",
        help="negative control: scale beta inside the oracles only",
    )
    val.set_defaults(func=cmd_validate)

    den = sub.add_parser("density", help="tabulate a transition density")
    den.add_argument("--config", help="JSON config file")
    den.add_argument("--t", type=float)
    den.add_argument("--y", type=float)
    den.add_argument("--x-min", type=float, dest="x_min")
    den.add_argument("--x-max", type=float, dest="x_max")
    den.add_argument("--n-points", type=int, dest="n_points")
    den.add_argument("--truncation", type=int)
    den.add_argument("--output")
    den.set_defaults(func=cmd_density)

    ben = sub.add_parser("bench", help="run a benchmark plan")
    ben.add_argument("--config", help="JSON config file")
    ben.add_argument("--plan", help="JSON plan file")
    ben.add_argument("--builtin",
                     help="stock-onestep, stock-trajectory or jump-rich")
    ben.add_argument("--seed", type=int)
    ben.add_argument("--repetitions", type=int, default=5)
    ben.add_argument("--workers", type=int, default=1)
    ben.add_argument("--backends",
                     help="comma-separated backends, e.g. numba,numpy")
    ben.add_argument("--no-oracle-check", action="store_true")
    ben.add_argument("--output")
    ben.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, ParameterError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except bench.OracleCheckError as exc:
        print(f"oracle check failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
