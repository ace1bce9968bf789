"""End-to-end orchestration behind the command line front end.

Every ``run_*`` function returns a JSON-compatible report dict.  All numbers
that are judged carry the bound they were judged against.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import calculus, dilation, fock, gns as gns_mod, kernel
from .ensemble import (
    OperatorEnsemble,
    gen_coisometry_ensemble,
    gen_row_contraction_ensemble,
    load_ensemble,
    save_ensemble,
)
from .errors import CapacityExceeded, InputError, MathFailure, ValidationError
from .ncpoly import parse_ncpoly, random_ncpoly, render

EXIT_PASS = 0
EXIT_MATH_FAIL = 2
EXIT_INPUT_FAIL = 3
EXIT_CAPACITY = 4

GENERATOR_KINDS = ("row_contraction", "coisometry")
EQUALITY_TRIGGER = 1e-6


@dataclass
class GeneratorSpec:
    kind: str
    d: int = 2
    n: int = 2
    k: int = 3
    seed: int = 0
    slack: float = 0.1

    def build(self) -> OperatorEnsemble:
        if self.kind == "row_contraction":
            return gen_row_contraction_ensemble(self.d, self.n, self.k, self.seed, self.slack)
        if self.kind == "coisometry":
            return gen_coisometry_ensemble(self.d, self.n, self.k, self.seed)
        raise ValidationError(f"unknown generator kind {self.kind!r}; choose from {GENERATOR_KINDS}")


@dataclass
class RunConfig:
    scenario: str | None = None
    generator: GeneratorSpec | None = None
    N: int = 3
    M_fock: int | None = None
    pd_tol: float = 1e-10
    rank_tol: float = 1e-12
    check_tol: float = 1e-8
    seed: int = 0
    n_polys: int = 10
    poly_degree: int = 3
    poly: str | None = None
    d: int | None = None
    levels: int = 6
    r_grid: tuple[float, ...] = field(default_factory=lambda: calculus.dyadic_grid(6))

    def __post_init__(self):
        if self.M_fock is None:
            self.M_fock = self.N

    def validate(self):
        if self.N < 1:
            raise ValidationError(f"depth N must be >= 1, got {self.N}")
        if self.M_fock < self.N:
            raise ValidationError(f"M_fock ({self.M_fock}) must be >= N ({self.N})")
        for name in ("pd_tol", "rank_tol", "check_tol"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive")

    def echo(self) -> dict:
        out = asdict(self)
        out["r_grid"] = list(self.r_grid)
        return out

    def ensemble(self) -> OperatorEnsemble:
        if self.scenario is not None:
            return load_ensemble(self.scenario)
        if self.generator is not None:
            return self.generator.build()
        raise ValidationError("need a scenario file or a generator spec")


def _fro_bound(K: kernel.BlockKernel, rel: float) -> float:
    return rel * (1.0 + float(np.linalg.norm(K.G)))


def _timed(timing: dict, name: str, fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    timing[name] = time.perf_counter() - t0
    return out


def run_check(config: RunConfig) -> tuple[dict, int]:
    """Full pipeline: kernel, domination, GNS, dilation, identities and the vN suite."""
    config.validate()
    timing: dict[str, float] = {}
    E = config.ensemble()
    N, M = config.N, config.M_fock
    report: dict = {"config": config.echo(),
                    "ensemble": {"label": E.label, "d": E.d, "n": E.n, "scenarios": len(E)}}
    stages: dict = {}
    report["stages"] = stages

    K = _timed(timing, "assemble", kernel.assemble_kernel, E, N)
    pd = kernel.pd_check(K, config.pd_tol)
    stages["pd"] = pd.to_json()
    dom = _timed(timing, "domination", kernel.pd_order_check, K, config.pd_tol)
    stages["domination"] = dom.to_json()
    verdicts = {"pd": pd.ok, "domination": dom.ok}

    if dom.ok:
        g = _timed(timing, "gns", gns_mod.kolmogorov_factorize, K, config.rank_tol)
        gns_mod.build_shifts(g, check_domination=False)
        fres = gns_mod.factorization_residual(g)
        fbound = _fro_bound(K, config.check_tol)
        cyc = gns_mod.cyclicity_residual(g)
        stages["gns"] = {"rank": g.r, "factorization_residual": fres, "bound": fbound,
                         "shift_residual": g.shift_residual, "cyclicity_residual": cyc,
                         "cyclicity_bound": config.check_tol}
        verdicts["gns"] = fres <= fbound and g.shift_residual <= config.check_tol \
            and cyc <= config.check_tol
        contraction = gns_mod.column_contraction_check(g, config.check_tol)
        stages["column_contraction"] = contraction.to_json()
        verdicts["column_contraction"] = contraction.ok

        model = _timed(timing, "dilation", dilation.build_dilation, g, M)
        cuntz = dilation.cuntz_residual(model)
        co = dilation.coinvariance_residual(model)
        stages["dilation"] = {**model.summary(), **cuntz.to_json(), **co,
                              "isometry_bound": 1e-10}
        verdicts["dilation"] = cuntz.isometry_residual <= 1e-10 and co["coinvariance"] <= 1e-10

        real = _timed(timing, "realization", dilation.realization_check, K, model, min(N, M),
                      config.check_tol)
        stages["realization"] = real.to_json()
        verdicts["realization"] = real.ok
        a2 = dilation.domination_identity_check(model, K, N - 1, config.check_tol)
        stages["a2_margin"] = a2.to_json()
        verdicts["a2_margin"] = a2.ok

        eq_depth = min(N - 1, M - 1)
        gap = dilation.sigma_gap(K, eq_depth)
        if gap <= EQUALITY_TRIGGER:
            eq = dilation.equality_case_check(K, model, eq_depth)
            stages["equality_case"] = {**eq.to_json(), "sigma_gap_bound": 1e-9,
                                       "a5_bound": 1e-7}
            verdicts["equality_case"] = eq.sigma_gap > 1e-9 or eq.a5_residual <= 1e-7

        rng = np.random.Generator(np.random.PCG64(config.seed))
        vn_rows = []
        for _ in range(config.n_polys):
            p = random_ncpoly(E.d, config.poly_degree, rng)
            rep = calculus.vn_check(E, p, tol=config.check_tol)
            vn_rows.append({"poly": render(p), **rep.to_json()})
        stages["von_neumann"] = vn_rows
        verdicts["von_neumann"] = all(r["verdict"] == "pass" for r in vn_rows)
    else:
        stages["short_circuit"] = "NotDominated: dilation stages skipped"

    report["verdicts"] = verdicts
    ok = all(verdicts.values())
    report["overall"] = "pass" if ok else "math-fail"
    report["timing"] = timing
    return report, EXIT_PASS if ok else EXIT_MATH_FAIL


def run_norms(config: RunConfig) -> tuple[dict, list[dict], int]:
    """Fock-norm convergence table for ``config.poly``."""
    if config.poly is None:
        raise ValidationError("norms needs --poly")
    d = config.d if config.d is not None else _infer_d(config.poly)
    p = parse_ncpoly(config.poly, d)
    rows = fock.convergence_table(p, config.levels)
    report = {"poly": render(p), "d": d, "degree": p.degree,
              "lower_bound": rows[0]["lower_bound"] if rows else None, "table": rows,
              "overall": "pass"}
    return report, rows, EXIT_PASS


def _infer_d(text: str) -> int:
    import re
    ks = [int(k) for k in re.findall(r"Z\s*(\d+)", text)]
    return max(ks, default=1) or 1


def run_calculus(config: RunConfig) -> tuple[dict, list[dict], int]:
    """Radial diagnostics and the radial limit for ``config.poly`` on an ensemble."""
    config.validate()
    if config.poly is None:
        raise ValidationError("calculus needs --poly")
    E = config.ensemble()
    p = parse_ncpoly(config.poly, E.d)
    depth = max(config.N, p.degree, 1)
    K = kernel.assemble_kernel(E, depth)
    dom = kernel.pd_order_check(K, config.pd_tol)
    report: dict = {"config": config.echo(), "poly": render(p),
                    "domination": dom.to_json()}
    if not dom.ok:
        report["overall"] = "math-fail"
        return report, [], EXIT_MATH_FAIL
    g = gns_mod.build_shifts(gns_mod.kolmogorov_factorize(K, config.rank_tol),
                             check_domination=False)
    model = dilation.build_dilation(g, max(config.M_fock, depth))
    probes = calculus.default_probes(E.n, config.seed)
    series = calculus.RadialSeries(p, config.r_grid, probes)
    table = calculus.radial_diagnostic(E, K, model, series)
    _, dist = calculus.ms_sot_limit(E, series)
    vn = calculus.vn_check(E, p, tol=config.check_tol, domination=dom)
    report["radial"] = {k: v for k, v in table.to_json().items() if k != "rows"}
    report["radial"]["identity_bound"] = config.check_tol
    report["radial_limit_distance"] = dist
    report["von_neumann"] = vn.to_json()
    ok = table.cauchy_decay and table.max_identity_gap <= config.check_tol and vn.passed
    report["overall"] = "pass" if ok else "math-fail"
    return report, table.rows, EXIT_PASS if ok else EXIT_MATH_FAIL


def run_generate(spec: GeneratorSpec, out) -> dict:
    if spec.kind not in GENERATOR_KINDS:
        raise ValidationError(f"unknown generator kind {spec.kind!r}; choose from {GENERATOR_KINDS}")
    E = spec.build()
    save_ensemble(E, out)
    return {"written": str(out), "label": E.label, "d": E.d, "n": E.n, "scenarios": len(E)}


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, CapacityExceeded):
        return EXIT_CAPACITY
    if isinstance(exc, MathFailure):
        return EXIT_MATH_FAIL
    if isinstance(exc, (InputError, OSError)):
        return EXIT_INPUT_FAIL
    raise exc


def rows_to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if v is None else repr(v) if isinstance(v, float) else v)
                         for k, v in row.items()})
    return buf.getvalue()
