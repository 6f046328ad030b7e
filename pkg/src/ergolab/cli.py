"""Command line: one subcommand per object, plus ``run`` for JSON experiment plans.

Exit status is 0 on success, 1 when a check suite finds a violation and 2 for
usage, parse and precondition errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .algebra import format_set, full
from .checks import GROUPS, SUITES, run_group
from .errors import ErgolabError
from .parsing import format_system, parse_set_expr, parse_system_spec
from .phi import (
    DEFAULT_EXPONENT_BUDGET,
    DEFAULT_M_MAX,
    ergodic_decomposition,
    phi,
    phi_star,
    wandering_rate,
)
from .probes import (
    continuity_probe,
    discontinuity_witness,
    phi_star_discontinuity_witness,
    rokhlin_tower,
    verify_tower,
)
from .report import Report, render, write_atomic
from .scalars import format_scalar, parse_scalar

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(ErgolabError):
    pass


# ---------------------------------------------------------------- argument helpers


def _int_list(text: str) -> list[int]:
    """``"0..4"`` or ``"1,2,8"`` (ranges inclusive, may be mixed)."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


def _scalar_list(text: str) -> list:
    return [parse_scalar(p.strip()) for p in text.split(",") if p.strip()]


def _exact_row(task, param, value, steps, certificate) -> dict:
    s = format_scalar(value)
    return {"task": task, "param": param, "lower": s, "upper": s, "exact": "true", "steps": str(steps), "certificate": certificate}


# ---------------------------------------------------------------- tasks


def task_phi(T, rep, expr, m_list=None, m_max=DEFAULT_M_MAX):
    A = parse_set_expr(expr, T.space)
    if m_list:
        rates = wandering_rate(T, A, max(m_list))
        for m in m_list:
            rep.add(_exact_row("phi-table", str(m), rates[m], m, f"union of {m + 1} images"))
    else:
        rep.add(phi(T, A, m_max).row("phi", expr))


def task_phistar(T, rep, expr, exponent_budget=DEFAULT_EXPONENT_BUDGET, m_max=DEFAULT_M_MAX):
    A = parse_set_expr(expr, T.space)
    r, prof = phi_star(T, A, exponent_budget, m_max)
    detail = {
        "k0": prof.k0,
        "K": list(prof.K),
        "kappa": prof.kappa,
        "budget": prof.budget,
        "attained_at": r.attained_at,
    }
    rep.add(r.row("phi-star", expr), detail)


def task_probe(T, rep, expr, radii, samples=16, seed=0, target="phi", m_max=DEFAULT_M_MAX,
               exponent_budget=DEFAULT_EXPONENT_BUDGET):
    A = parse_set_expr(expr, T.space)
    pr = continuity_probe(T, A, radii, samples, seed, target, m_max, exponent_budget)
    rows = pr.csv_rows()
    for row in rows[:-1] if pr.witness is not None else rows:
        rep.add(row)
    if pr.witness is not None:
        rep.add(rows[-1], pr.witness.to_dict())
    for note in pr.notes:
        rep.provenance.setdefault("notes", [])
        rep.provenance["notes"].append(note)


def task_witness(T, rep, expr, eps=Fraction(1, 2), n0=None, radius=None, m_max=DEFAULT_M_MAX):
    A = parse_set_expr(expr, T.space)
    w = discontinuity_witness(T, A, eps, n0, radius, m_max)
    row = _exact_row("witness", format_scalar(w.distance), w.jump, w.n0, f"jump > {format_scalar(w.guarantee)}")
    rep.add(row, w.to_dict())


def task_phistar_witness(T, rep, expr, delta, exponents, exponent_budget=DEFAULT_EXPONENT_BUDGET,
                         m_max=DEFAULT_M_MAX):
    A = parse_set_expr(expr, T.space)
    w = phi_star_discontinuity_witness(T, A, delta, exponents, exponent_budget, m_max)
    for m, _, _, j in w.per_exponent:
        rep.add(_exact_row("phi-star-witness", str(m), j, m, f"jump under T^{m}; guarantee {format_scalar(w.guarantee)}"))
    rep.rows[-1]["detail"] = w.to_dict()


def task_tower(T, rep, region, n0, eps):
    R = full(T.space) if region in (None, "full") else parse_set_expr(region, T.space)
    tower = rokhlin_tower(T, R, n0, eps)
    ok, covered = verify_tower(T, tower)
    detail = {"base": format_set(tower.base), "height": tower.height, "residual": format_scalar(tower.residual_measure)}
    rep.add(
        _exact_row("tower", f"n0={n0} eps={format_scalar(eps)}", covered, n0,
                   "disjoint floors verified" if ok else "FLOORS OVERLAP"),
        detail,
    )
    return ok


def task_decompose(T, rep, granularity=None):
    for i, (part, mu) in enumerate(ergodic_decomposition(T, granularity)):
        rep.add(_exact_row("decompose", str(i), mu, 0, format_set(part)))


def task_check(rep, name, seed=0) -> bool:
    if name not in SUITES and name not in GROUPS:
        raise UsageError(f"unknown suite {name!r}; choose from {', '.join(sorted({*SUITES, *GROUPS}))}")
    ok = True
    for res in run_group(name, seed):
        print(res.line(), file=sys.stderr)
        rep.add(res.row())
        ok &= res.passed
    return ok


# ---------------------------------------------------------------- plans


def _plan_system(plan: dict, base_dir: str):
    if "system_text" in plan:
        return parse_system_spec(plan["system_text"])
    if "system" in plan:
        import os

        path = plan["system"] if os.path.isabs(plan["system"]) else os.path.join(base_dir, plan["system"])
        with open(path, encoding="utf-8") as fh:
            return parse_system_spec(fh.read())
    return None


def run_plan(plan: dict, base_dir: str = ".", seed: int = 0) -> tuple[Report, bool]:
    """Run every task in plan order; budget shortfalls stay in-band as brackets."""
    seed = int(plan.get("seed", seed))
    m_max = int(plan.get("m_max", DEFAULT_M_MAX))
    budget = int(plan.get("exponent_budget", DEFAULT_EXPONENT_BUDGET))
    T = _plan_system(plan, base_dir)
    prov = {"seed": seed, "m_max": m_max, "exponent_budget": budget}
    if T is not None:
        prov["system"] = format_system(T)
    rep = Report(prov, decimal=bool(plan.get("decimal", False)))
    ok = True
    for t in plan.get("tasks", []):
        kind = t.get("task")
        if kind != "check" and T is None:
            raise UsageError(f"task {kind!r} needs a system")
        if kind == "phi-table":
            ms = t["m"] if isinstance(t["m"], list) else _int_list(str(t["m"]))
            task_phi(T, rep, t["set"], ms)
        elif kind == "phi":
            task_phi(T, rep, t["set"], None, int(t.get("budget", m_max)))
        elif kind == "phi-star":
            task_phistar(T, rep, t["set"], int(t.get("budget", budget)), m_max)
        elif kind == "probe":
            task_probe(T, rep, t["set"], _scalar_list(",".join(map(str, t["radii"]))),
                       int(t.get("samples", 16)), int(t.get("seed", seed)), t.get("target", "phi"), m_max, budget)
        elif kind == "witness":
            task_witness(T, rep, t["set"], parse_scalar(str(t.get("eps", "1/2"))), t.get("n0"),
                         parse_scalar(str(t["radius"])) if "radius" in t else None, m_max)
        elif kind == "tower":
            ok &= task_tower(T, rep, t.get("region"), int(t["n0"]), parse_scalar(str(t["eps"])))
        elif kind == "decompose":
            task_decompose(T, rep, t.get("granularity"))
        elif kind == "check":
            ok &= task_check(rep, t["suite"], int(t.get("seed", seed)))
        else:
            raise UsageError(f"unknown task {kind!r}")
    return rep, ok


# ---------------------------------------------------------------- parser


def _load_system(args):
    if args.system_text is not None:
        return parse_system_spec(args.system_text)
    if args.system is not None:
        with open(args.system, encoding="utf-8") as fh:
            return parse_system_spec(fh.read())
    raise UsageError("a system is required (--system FILE or --system-text TEXT)")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--system", metavar="FILE", help="system spec file")
    common.add_argument("--system-text", metavar="TEXT", help="inline system spec")
    common.add_argument("--set", dest="set_expr", metavar="EXPR", default="full", help="set expression")
    common.add_argument("--m-max", type=int, default=DEFAULT_M_MAX, help="iteration budget for limit rates")
    common.add_argument("--exponent-budget", type=int, default=DEFAULT_EXPONENT_BUDGET)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("csv", "json", "markdown"), default="csv")
    common.add_argument("--output", "-o", metavar="FILE", help="write the report here (atomically)")
    common.add_argument("--decimal", action="store_true", help="add decimal columns next to exact values")

    p = argparse.ArgumentParser(prog="ergolab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"ergolab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("phi", parents=[common], help="limit rate, or a table of truncated rates")
    s.add_argument("--m-list", type=_int_list, help="truncations, e.g. 0..4 or 0,1,8")

    sub.add_parser("phistar", parents=[common], help="infimum of limit rates over powers")

    s = sub.add_parser("probe", parents=[common], help="continuity probe around a set")
    s.add_argument("--radii", type=_scalar_list, default="1/8,1/64")
    s.add_argument("--samples", type=int, default=16)
    s.add_argument("--target", choices=("phi", "phi_star"), default="phi")

    s = sub.add_parser("witness", parents=[common], help="discontinuity witness")
    s.add_argument("--eps", type=parse_scalar, default=Fraction(1, 2))
    s.add_argument("--n0", type=int)
    s.add_argument("--radius", type=parse_scalar)
    s.add_argument("--phi-star", action="store_true", help="witness for the infimum over powers")
    s.add_argument("--delta", type=parse_scalar, default=Fraction(1, 16))
    s.add_argument("--exponents", type=_int_list, default=[2, 4, 8])

    s = sub.add_parser("tower", parents=[common], help="Rokhlin tower inside a region")
    s.add_argument("--region", default="full")
    s.add_argument("--n0", type=int, required=True)
    s.add_argument("--eps", type=parse_scalar, required=True)

    s = sub.add_parser("decompose", parents=[common], help="invariant decomposition")
    s.add_argument("--granularity", type=int)

    s = sub.add_parser("check", parents=[common], help="run a property suite")
    s.add_argument("suite", help=f"one of {', '.join(sorted({*SUITES, *GROUPS}))}")

    s = sub.add_parser("run", parents=[common], help="run a JSON experiment plan")
    s.add_argument("plan", metavar="PLAN.json")
    return p


def _execute(args) -> tuple[Report, bool]:
    prov = {"seed": args.seed, "m_max": args.m_max, "exponent_budget": args.exponent_budget}
    if args.command == "run":
        import os

        with open(args.plan, encoding="utf-8") as fh:
            plan = json.load(fh)
        if args.decimal:
            plan["decimal"] = True
        return run_plan(plan, os.path.dirname(os.path.abspath(args.plan)), args.seed)
    if args.command == "check":
        rep = Report(prov, decimal=args.decimal)
        return rep, task_check(rep, args.suite, args.seed)
    T = _load_system(args)
    prov["system"] = format_system(T)
    rep = Report(prov, decimal=args.decimal)
    ok = True
    cmd = args.command
    if cmd == "phi":
        task_phi(T, rep, args.set_expr, args.m_list, args.m_max)
    elif cmd == "phistar":
        task_phistar(T, rep, args.set_expr, args.exponent_budget, args.m_max)
    elif cmd == "probe":
        radii = args.radii if isinstance(args.radii, list) else _scalar_list(args.radii)
        task_probe(T, rep, args.set_expr, radii, args.samples, args.seed, args.target, args.m_max, args.exponent_budget)
    elif cmd == "witness":
        if args.phi_star:
            task_phistar_witness(T, rep, args.set_expr, args.delta, args.exponents, args.exponent_budget, args.m_max)
        else:
            task_witness(T, rep, args.set_expr, args.eps, args.n0, args.radius, args.m_max)
    elif cmd == "tower":
        ok = task_tower(T, rep, args.region, args.n0, args.eps)
    elif cmd == "decompose":
        task_decompose(T, rep, args.granularity)
    return rep, ok


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rep, ok = _execute(args)
    except (ErgolabError, ValueError, KeyError, OSError) as exc:
        print(f"ergolab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    fmt = args.format
    if args.command == "run":
        with open(args.plan, encoding="utf-8") as fh:
            plan = json.load(fh)
        fmt = plan.get("format", fmt)
        out = args.output or plan.get("output")
    else:
        out = args.output
    text = render(rep, fmt)
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
