"""Command-line entry point: ``estimate``, ``experiment``, ``bench`` and ``gen``.

Exit status is 0 on success, 1 for configuration errors and 2 for I/O errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .core import CostOracle, DomainError
from .formats import read_pointset, write_pointset
from .harness import (
    BENCH_METHODS,
    METHODS,
    ConfigError,
    ExperimentConfig,
    estimate,
    run_experiment,
    run_scaling_bench,
)
from .instances import GENERATORS, InstanceSpec
from .sampling import EstimatorConfig, RngStream

EXIT_CONFIG = 1
EXIT_IO = 2


def _parse_params(items) -> dict:
    params = {}
    for item in items or []:
        for tok in item.split(","):
            if not tok:
                continue
            key, sep, val = tok.partition("=")
            if not sep:
                raise ConfigError(f"parameter {tok!r} is not key=value")
            try:
                params[key] = json.loads(val)
            except json.JSONDecodeError:
                params[key] = val
    return params


def cmd_estimate(args) -> int:
    A = read_pointset(args.input)
    kw = {"seed": args.seed, "depth_i": args.depth}
    if args.T_slack is not None:
        kw["T_slack"] = args.T_slack
    try:
        cfg = EstimatorConfig.preset(args.preset, args.eps, args.delta, method=args.method, **kw)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    oracle = CostOracle.from_points(A)
    rep = estimate(A, cfg, args.method, RngStream(args.seed), oracle, args.sample_size)
    if args.json:
        out = rep.to_json(include_iterates=args.iterates)
        out.update(eps=cfg.eps, delta=cfg.delta, a=cfg.a, b=cfg.b, batch_size=cfg.batch_size,
                   batches=cfg.num_batches, seed=cfg.seed)
        print(json.dumps(out, indent=2))
    else:
        print(" ".join(repr(float(v)) for v in rep.point))
        print(f"# method={rep.method} samples={rep.samples} ratio={rep.approx_ratio:.6g} "
              f"success={rep.success} t_sample_ns={rep.t_sample_ns} t_agg_ns={rep.t_agg_ns}",
              file=sys.stderr)
    return 0


def cmd_experiment(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    report = run_experiment(cfg, out_dir=args.out)
    for label, s in report.estimators.items():
        print(f"{label}: success_rate={s['success_rate']:.4f} "
              f"mean_ratio={s['approx_ratio']['mean']:.6g} samples={s['samples']}")
    return 0


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",")]
    methods = args.methods.split(",") if args.methods else BENCH_METHODS
    res = run_scaling_bench(sizes, d=args.d, reps=args.reps, methods=methods, seed=args.seed)
    for method, slope in res.slopes.items():
        print(f"{method}: slope={slope:.3f}")
    if args.out:
        res.write(args.out)
    return 0


def cmd_gen(args) -> int:
    params = _parse_params(args.params)
    try:
        A, oracle = InstanceSpec(args.kind, params, args.seed).build()
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    write_pointset(A, args.out, binary=args.binary or None)
    print(f"wrote n={A.n} d={A.d} opt={oracle.opt!r} to {args.out}")
    return 0


class _Parser(argparse.ArgumentParser):
    # usage errors are configuration errors (exit 1); 2 is reserved for I/O failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="meanest", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("estimate", help="estimate the mean of a point set file")
    e.add_argument("--input", required=True)
    e.add_argument("--eps", type=float, required=True)
    e.add_argument("--delta", type=float, required=True)
    e.add_argument("--method", choices=METHODS, default="fastgd")
    e.add_argument("--preset", choices=("paper", "practical"), default="practical")
    e.add_argument("--depth", type=int, default=0, help="recursion depth of the min-sum aggregator")
    e.add_argument("--T-slack", dest="T_slack", type=int, default=None)
    e.add_argument("--sample-size", type=int, default=None, help="sample size for --method empirical")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--json", action="store_true")
    e.add_argument("--iterates", action="store_true", help="include descent iterates in --json output")
    e.set_defaults(func=cmd_estimate)

    x = sub.add_parser("experiment", help="run a Monte Carlo experiment from a JSON config")
    x.add_argument("--config", required=True)
    x.add_argument("--out", required=True)
    x.set_defaults(func=cmd_experiment)

    b = sub.add_parser("bench", help="time aggregators over growing candidate counts")
    b.add_argument("--sizes", default="256,1024,4096")
    b.add_argument("--out", default=None, help=".json for a full report, anything else for CSV")
    b.add_argument("--d", type=int, default=16)
    b.add_argument("--reps", type=int, default=5)
    b.add_argument("--methods", default=None, help=f"comma list from {','.join(BENCH_METHODS)}")
    b.add_argument("--seed", type=int, default=0)
    b.set_defaults(func=cmd_bench)

    g = sub.add_parser("gen", help="write a generated instance to a point set file")
    g.add_argument("--kind", required=True, choices=sorted(GENERATORS))
    g.add_argument("--params", nargs="*", default=[], help="key=value pairs, e.g. n=100 eps=0.5")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--binary", action="store_true", help="force the binary format")
    g.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, DomainError, ValueError) as exc:
        print(f"meanest: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"meanest: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
