"""Command line: single-spec reports, cover checks, operator cross-checks, sweeps.

Exit codes: 0 all assertions hold, 1 a verified property is violated
(Newton below Hodge, determinant congruence failure), 2 input or
configuration error, 3 budget or precision exhaustion.  Reports are JSON;
polygons are additionally written as TSV (x_num, x_den, y_num, y_den per
vertex) next to the report for plotting.  Outputs are byte-identical across
runs for identical config and seed.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .arith import ArithError, FieldDesc, Poly, RatFunc, field_desc
from .character import (
    CharacterSpec,
    SpecError,
    euler_poincare_degree,
    hodge_polygon,
    load_spec,
    local_expand,
    naive_degree_estimate,
    parse_spec,
    point_label,
    ramification_data,
    serialize_spec,
)
from .cyclotomic import PrecisionError
from .dwork import CongruenceError, TruncationError, trace_formula_check
from .lfunction import (
    DEFAULT_POINT_BUDGET,
    BudgetError,
    cover_bound_polygon,
    cover_zeta_numerator,
    integer_newton_polygon,
    l_polynomial,
    newton_polygon_of_l,
    verify_newton_over_hodge,
)
from .polygon import PolygonError, RationalPolygon

COMMANDS = ("invariants", "hodge", "lfunction", "verify", "cover", "dwork-check", "sweep")


@dataclass(frozen=True)
class JobConfig:
    command: str
    spec_path: str | None = None
    output: str | None = None
    budget: int = DEFAULT_POINT_BUDGET
    workers: int = 1
    seed: int = 0
    precision: int = 12
    truncation: int = 60
    s_degree: int = 3
    hodge_tsv: str | None = None
    count: int = 0
    p_values: tuple[int, ...] = (3, 5)
    a_max: int = 2
    n_max: int = 2
    pole_max: int = 3
    swan_max: int = 8


def _frac(x: Fraction) -> list[int]:
    return [x.numerator, x.denominator]


def _cyclo_rows(c) -> list[list[int]]:
    return [list(r) for r in c.rows]


def _load(config: JobConfig) -> CharacterSpec:
    if config.spec_path is None:
        raise SpecError("this command needs a spec file")
    return load_spec(config.spec_path)


def _run_invariants(config: JobConfig):
    spec = _load(config)
    ram = ramification_data(spec)
    result = {
        "spec_hash": spec.hash_hex(),
        "q": spec.q,
        "n": spec.n,
        "points": [
            {"point": point_label(pd.point), "swan": pd.swan, "eps": pd.eps, "omega": pd.omega}
            for pd in ram.points
        ],
        "m": ram.m,
        "chi_ramified": ram.chi_ramified,
        "big_omega": _frac(ram.big_omega),
        "omega_integral": ram.omega_integral,
        "degree": euler_poincare_degree(spec),
        "naive_degree": naive_degree_estimate(spec),
    }
    return 0, result, {}


def _run_hodge(config: JobConfig):
    spec = _load(config)
    hp = hodge_polygon(spec)
    result = {"spec_hash": spec.hash_hex(), "q": spec.q, "hp": hp.to_json_dict()}
    return 0, result, {"hp": hp}


def _run_lfunction(config: JobConfig):
    spec = _load(config)
    lp = l_polynomial(spec, budget=config.budget)
    np_poly = newton_polygon_of_l(lp)
    result = {
        "spec_hash": lp.spec_hash,
        "q": lp.q,
        "degree": lp.degree,
        "open_degree": lp.open_degree,
        "coeffs": [_cyclo_rows(c) for c in lp.coeffs],
        "open_coeffs": [_cyclo_rows(c) for c in lp.open_coeffs],
        "removed_values": [[label, _cyclo_rows(v)] for label, v in lp.removed_values],
        "np": np_poly.to_json_dict(),
    }
    return 0, result, {"np": np_poly}


def _run_verify(config: JobConfig):
    spec = _load(config)
    rep = verify_newton_over_hodge(spec, budget=config.budget)
    result = rep.to_json_dict()
    code = 0 if rep.theorem_holds and rep.degree_match else 1
    if config.hodge_tsv is not None:
        given = RationalPolygon.from_tsv(Path(config.hodge_tsv).read_text())
        above = rep.newton.lies_above(given)
        result["external_hp"] = given.to_json_dict()
        result["external_hp_holds"] = above.holds
        result["external_hp_min_margin"] = _frac(above.min_margin)
        if not above.holds:
            code = 1
    return code, result, {"np": rep.newton, "hp": rep.hodge}


def _run_cover(config: JobConfig):
    spec = _load(config)
    numerator = cover_zeta_numerator(spec.field, spec.wild, budget=config.budget)
    np_poly = integer_newton_polygon(numerator, spec.p, spec.a)
    bound = cover_bound_polygon(spec.field, spec.wild)
    above = np_poly.lies_above(bound)
    result = {
        "spec_hash": spec.hash_hex(),
        "q": spec.q,
        "numerator": list(numerator),
        "np": np_poly.to_json_dict(),
        "bound": bound.to_json_dict(),
        "holds": above.holds,
        "min_margin": _frac(above.min_margin),
    }
    return (0 if above.holds else 1), result, {"np": np_poly, "bound": bound}


def _run_dwork_check(config: JobConfig):
    spec = _load(config)
    report = trace_formula_check(
        spec,
        truncation=config.truncation,
        precision=config.precision,
        s_degree=config.s_degree,
        budget=config.budget,
    )
    return 0, report.to_json_dict(), {"np_fredholm": report.np_fredholm, "np_l": report.np_l}


# ---------------------------------------------------------------------------
# sweep generation


def _random_poly(rng: random.Random, field: FieldDesc, degree: int) -> Poly:
    coeffs = [field.element([rng.randrange(field.p) for _ in range(field.m)]) for _ in range(degree + 1)]
    return Poly(field, coeffs)


def _random_tame(rng: random.Random, field: FieldDesc) -> RatFunc:
    # split polynomials only: every ramified point must be rational
    num, den = Poly.constant(field.one()), Poly.constant(field.one())
    for root in rng.sample(list(field.elements()), k=min(rng.randrange(3), field.q)):
        factor = Poly.from_elements(field, [-root, field.one()])
        side = rng.random() < 0.5
        for _ in range(rng.randrange(1, 3)):
            if side:
                num = num * factor
            else:
                den = den * factor
    return RatFunc(num, den)


def random_spec(rng: random.Random, config: JobConfig) -> CharacterSpec:
    """One admissible random spec: ramified somewhere, swan and budget in range."""
    for _ in range(400):
        p = rng.choice(config.p_values)
        a = rng.randrange(1, config.a_max + 1)
        field = field_desc(p, a)
        n = rng.randrange(1, config.n_max + 1)
        pole_cap = max(1, min(config.pole_max, config.swan_max // p ** (n - 1)))
        wild = []
        for _ in range(n):
            num = _random_poly(rng, field, rng.randrange(pole_cap + 1))
            den = Poly.constant(field.one())
            if rng.random() < 0.3:
                root = rng.choice(list(field.elements()))
                den = Poly.from_elements(field, [-root, field.one()])
            wild.append(RatFunc(num, den))
        tame_f = _random_tame(rng, field)
        gamma = rng.randrange(field.q - 1)
        try:
            spec = CharacterSpec(field=field, wild=tuple(wild), tame_f=tame_f, gamma=gamma, genus=0)
            ram = ramification_data(spec)
        except SpecError:
            continue
        if max(pd.swan for pd in ram.points) > config.swan_max:
            continue
        removed = spec.removed_points()
        open_degree = len(removed) - 2 + sum(local_expand(spec, pt).swan for pt in removed)
        if field.q ** (open_degree + 3) > config.budget:
            continue
        return spec
    raise SpecError("could not sample an admissible spec within the attempt cap")


def _sweep_job(payload: tuple[str, int]) -> dict:
    text, budget = payload
    spec = parse_spec(text)
    rep = verify_newton_over_hodge(spec, budget=budget, check_duality=False)
    ok = rep.theorem_holds and rep.degree_match
    return {
        "spec_hash": rep.spec_hash,
        "q": rep.q,
        "degree": rep.degree,
        "min_margin": _frac(rep.above.min_margin),
        "holds": rep.theorem_holds,
        "degree_match": rep.degree_match,
        "ok": ok,
        "spec": text,
    }


def _run_sweep(config: JobConfig):
    if config.count > config.budget:
        raise SpecError("sweep job count exceeds the budget")
    rng = random.Random(config.seed)
    texts = [serialize_spec(random_spec(rng, config)) for _ in range(config.count)]
    fresh = list(dict.fromkeys(texts))
    if config.workers > 1 and fresh:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            rows_fresh = list(pool.map(_sweep_job, [(t, config.budget) for t in fresh]))
    else:
        rows_fresh = [_sweep_job((t, config.budget)) for t in fresh]
    by_text = dict(zip(fresh, rows_fresh))
    rows = [by_text[t] for t in texts]
    cache_hits = len(texts) - len(fresh)
    lines = ["spec_hash\tq\tdegree\tmin_margin\tstatus"]
    for row in rows:
        mm = f"{row['min_margin'][0]}/{row['min_margin'][1]}"
        lines.append(
            f"{row['spec_hash']}\t{row['q']}\t{row['degree']}\t{mm}\t{'pass' if row['ok'] else 'fail'}"
        )
    summary = "\n".join(lines) + "\n"
    failures = [row for row in rows if not row["ok"]]
    result = {
        "count": len(rows),
        "cache_hits": cache_hits,
        "failures": failures,
        "rows": [{k: v for k, v in row.items() if k != "spec"} for row in rows],
    }
    artifacts = {"summary_text": summary, "failures_json": failures}
    return (1 if failures else 0), result, artifacts


# ---------------------------------------------------------------------------
# dispatch and artifact writing


_RUNNERS = {
    "invariants": _run_invariants,
    "hodge": _run_hodge,
    "lfunction": _run_lfunction,
    "verify": _run_verify,
    "cover": _run_cover,
    "dwork-check": _run_dwork_check,
    "sweep": _run_sweep,
}


def _write_artifacts(config: JobConfig, artifacts: dict) -> dict[str, str]:
    if config.output is None:
        return {}
    out = Path(config.output)
    stem = out.name[: -len(".json")] if out.name.endswith(".json") else out.name
    written = {}
    for name, obj in artifacts.items():
        if name == "summary_text":
            path = out.with_name(f"{stem}.summary.tsv")
            path.write_text(obj)
        elif name == "failures_json":
            path = out.with_name(f"{stem}.failures.json")
            path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")
        else:
            path = out.with_name(f"{stem}.{name}.tsv")
            path.write_text(obj.to_tsv())
        written[name] = path.name
    return written


def run(config: JobConfig) -> int:
    """Execute one job; returns the exit status and writes the artifacts."""
    if config.command not in _RUNNERS:
        raise SpecError(f"unknown command {config.command!r}")
    if config.budget <= 0:
        raise SpecError("budget must be positive")
    code, result, artifacts = _RUNNERS[config.command](config)
    report = {
        "command": config.command,
        "seed": config.seed,
        "budget": config.budget,
        "workers": config.workers,
        "ok": code == 0,
        "exit": code,
        "result": result,
        "artifacts": _write_artifacts(config, artifacts),
    }
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if config.output is None:
        sys.stdout.write(text)
    else:
        Path(config.output).write_text(text)
    return code


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="artinl", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name)
        if name != "sweep":
            cmd.add_argument("spec", help="character spec file (TOML)")
        cmd.add_argument("-o", "--output", default=None, help="report JSON path (default: stdout)")
        cmd.add_argument("--budget", type=int, default=DEFAULT_POINT_BUDGET)
        cmd.add_argument("--seed", type=int, default=0)
        cmd.add_argument("--workers", type=int, default=1)
        if name == "verify":
            cmd.add_argument("--hodge-tsv", default=None, help="compare NP against this polygon instead")
        if name == "dwork-check":
            cmd.add_argument("--truncation", type=int, default=60)
            cmd.add_argument("--precision", type=int, default=12)
            cmd.add_argument("--s-degree", type=int, default=3)
        if name == "sweep":
            cmd.add_argument("--count", type=int, required=True)
            cmd.add_argument("--p", default="3,5", help="comma-separated primes")
            cmd.add_argument("--a-max", type=int, default=2)
            cmd.add_argument("--n-max", type=int, default=2)
            cmd.add_argument("--pole-max", type=int, default=3)
            cmd.add_argument("--swan-max", type=int, default=8)
    return parser


def config_from_args(args: argparse.Namespace) -> JobConfig:
    kwargs = {
        "command": args.command,
        "spec_path": getattr(args, "spec", None),
        "output": args.output,
        "budget": args.budget,
        "workers": args.workers,
        "seed": args.seed,
    }
    if args.command == "verify":
        kwargs["hodge_tsv"] = args.hodge_tsv
    if args.command == "dwork-check":
        kwargs.update(truncation=args.truncation, precision=args.precision, s_degree=args.s_degree)
    if args.command == "sweep":
        try:
            p_values = tuple(int(v) for v in args.p.split(","))
        except ValueError as exc:
            raise SpecError(f"bad prime list {args.p!r}") from exc
        kwargs.update(
            count=args.count,
            p_values=p_values,
            a_max=args.a_max,
            n_max=args.n_max,
            pole_max=args.pole_max,
            swan_max=args.swan_max,
        )
    return JobConfig(**kwargs)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return run(config_from_args(args))
    except (BudgetError, PrecisionError, TruncationError) as exc:
        print(f"artinl: resource exhausted: {exc}", file=sys.stderr)
        return 3
    except CongruenceError as exc:
        print(f"artinl: verified property violated: {exc}", file=sys.stderr)
        return 1
    except (SpecError, PolygonError, ArithError, OSError, ValueError) as exc:
        print(f"artinl: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
