"""Command line front end: ``momdil {check,norms,calculus,generate}``.

Exit codes: 0 pass, 2 mathematical failure, 3 bad input, 4 capacity.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import pipeline
from .pipeline import GeneratorSpec, RunConfig

log = logging.getLogger("momdil")


def _grid(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="momdil", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def source(p):
        p.add_argument("--scenario", metavar="PATH", help="scenario file (JSON)")
        p.add_argument("--kind", choices=pipeline.GENERATOR_KINDS,
                       help="generate the ensemble instead of loading one")
        p.add_argument("-d", "--dim", type=int, default=2, dest="d", help="tuple size d")
        p.add_argument("-n", type=int, default=2, help="Hilbert space dimension")
        p.add_argument("-k", type=int, default=3, help="number of scenarios")
        p.add_argument("--slack", type=float, default=0.1)
        p.add_argument("--gen-seed", type=int, default=None,
                       help="generator seed (defaults to --seed)")

    def common(p):
        p.add_argument("--depth", type=int, default=3, help="word depth N")
        p.add_argument("--fock", type=int, default=None, help="Fock truncation M (default N)")
        p.add_argument("--tol", type=float, default=1e-8, help="check tolerance")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", metavar="PATH", help="write the JSON report here")

    p = sub.add_parser("check", help="run the dilation pipeline on an ensemble")
    source(p)
    common(p)
    p.add_argument("--polys", type=int, default=10, help="random polynomials in the vN suite")

    p = sub.add_parser("norms", help="Fock-norm convergence table for a polynomial")
    p.add_argument("--poly", required=True)
    p.add_argument("-d", "--dim", type=int, default=None, dest="d")
    p.add_argument("--levels", type=int, default=6)
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--csv", metavar="PATH")

    p = sub.add_parser("calculus", help="radial diagnostics for a polynomial on an ensemble")
    source(p)
    common(p)
    p.add_argument("--poly", required=True)
    p.add_argument("--rgrid", type=_grid, default=None, help="comma separated radii in (0,1)")
    p.add_argument("--csv", metavar="PATH")

    p = sub.add_parser("generate", help="write a generated scenario file")
    p.add_argument("--kind", required=True)
    p.add_argument("-d", "--dim", type=int, default=2, dest="d")
    p.add_argument("-n", type=int, default=2)
    p.add_argument("-k", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--slack", type=float, default=0.1)
    p.add_argument("--out", metavar="PATH", required=True)
    return parser


def _config(args) -> RunConfig:
    gen = None
    if getattr(args, "scenario", None) is None and getattr(args, "kind", None):
        seed = args.gen_seed if args.gen_seed is not None else args.seed
        gen = GeneratorSpec(args.kind, args.d, args.n, args.k, seed, args.slack)
    cfg = RunConfig(scenario=getattr(args, "scenario", None), generator=gen,
                    N=getattr(args, "depth", 3), M_fock=getattr(args, "fock", None),
                    check_tol=getattr(args, "tol", 1e-8), seed=getattr(args, "seed", 0),
                    poly=getattr(args, "poly", None))
    if getattr(args, "polys", None) is not None:
        cfg.n_polys = args.polys
    if getattr(args, "rgrid", None):
        cfg.r_grid = args.rgrid
    if getattr(args, "levels", None) is not None:
        cfg.levels = args.levels
    if args.command == "norms":
        cfg.d = args.d
    return cfg


def dump_report(report: dict) -> str:
    return json.dumps(report, indent=1, sort_keys=True) + "\n"


def _emit(report: dict, out: str | None):
    text = dump_report(report)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "generate":
            spec = GeneratorSpec(args.kind, args.d, args.n, args.k, args.seed, args.slack)
            _emit(pipeline.run_generate(spec, args.out), None)
            return pipeline.EXIT_PASS
        cfg = _config(args)
        if args.command == "check":
            report, code = pipeline.run_check(cfg)
            _emit(report, args.out)
            return code
        if args.command == "norms":
            report, rows, code = pipeline.run_norms(cfg)
        else:
            report, rows, code = pipeline.run_calculus(cfg)
        if args.csv:
            Path(args.csv).write_text(pipeline.rows_to_csv(rows), encoding="utf-8")
        _emit(report, args.out)
        return code
    except Exception as exc:  # mapped to the documented exit codes
        code = pipeline.exit_code_for(exc)
        log.error("%s: %s", type(exc).__name__, exc)
        _emit({"overall": {2: "math-fail", 3: "input-fail", 4: "capacity"}[code],
               "error": type(exc).__name__, "message": str(exc)}, None)
        return code


if __name__ == "__main__":
    sys.exit(main())
