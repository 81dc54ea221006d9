"""Command-line interface: ``sl-majorant {eig,verify-chain,upper-bound,search,sweep}``.

Exit codes: 0 success, 2 bad input or gamma outside the allowed range,
3 eigenvalue outside the Prufer domain, 4 a chain inequality failed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .bounds import BoundCurve, CurveRow, fmt, reference_facts, upper_bound
from .chain import build_report, overall_status, verify
from .errors import DomainError, OutOfPruferDomain, PotentialError
from .oracles import FdConfig, fd_ground_eigenvalue
from .potentials import check_gamma, normalize_to_admissible, potential_from_json
from .prufer import eigenvalue_dirichlet
from .reporting import RunRecord, plot_data, svg_chart, write_json
from .search import lower_bound

EXIT_OK, EXIT_INPUT, EXIT_DOMAIN, EXIT_CHAIN = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _load_potential(path):
    try:
        obj = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise PotentialError(f"no such file: {path}")
    except json.JSONDecodeError as exc:
        raise PotentialError(f"{path}: not valid JSON ({exc})")
    return potential_from_json(obj)


def _beside(path, suffix):
    p = Path(path)
    return p.with_name(p.stem + suffix)


def cmd_eig(args):
    q = _load_potential(args.potential)
    if args.oracle == "fd":
        lam = fd_ground_eigenvalue(q, FdConfig(args.fd_n, True))
        payload = {"lambda0": lam, "method": "fd", "fd_n": args.fd_n}
    else:
        e = eigenvalue_dirichlet(q, tol=args.tol)
        lam = e.lambda0
        payload = dict(e.summary(), method="prufer")
    payload["potential"] = q.to_dict()
    print(f"lambda0 = {fmt(lam)}")
    out = args.out or _beside(args.potential, ".eig.json")
    RunRecord("eig", _params(args), payload).write(out)
    return EXIT_OK


def cmd_verify_chain(args):
    gamma = check_gamma(args.gamma, chain=True)
    q = _load_potential(args.potential)
    if args.normalize:
        q = normalize_to_admissible(q, gamma)
    e = eigenvalue_dirichlet(q, tol=args.tol)
    report = build_report(e, q, gamma, args.epsilon)
    verdicts = verify(report, args.slack_tol)
    status = overall_status(verdicts)

    print(f"lambda0 = {fmt(report.lambda0)}")
    print(f"gamma = {fmt(gamma)}  epsilon = {fmt(report.epsilon)}  gamma-norm = {fmt(report.gamma_norm_direct)}")
    for name, ok in report.preconditions_met.items():
        print(f"  precondition {name:<28} {'yes' if ok else 'NO'}")
    if status == "NOT APPLICABLE":
        print("NOT APPLICABLE: preconditions of the estimate chain fail; no inequality is claimed")
    else:
        print(f"  {'inequality':<28} {'slack':>24}  verdict")
        for v in verdicts:
            print(f"  {v.name:<28} {fmt(v.slack):>24}  {v.status.upper()}")
        if status == "CONTRADICTION":
            print("CONTRADICTION: a unit gamma-norm is incompatible with this eigenvalue")
        print(status)

    out = args.out or _beside(args.potential, ".chain.json")
    write_json(out, report.to_dict())
    RunRecord("verify-chain", _params(args), {
        "report": report.to_dict(),
        "verdicts": [v.__dict__ for v in verdicts],
        "status": status,
    }).write(_beside(out, ".record.json"))
    return EXIT_OK if status in ("PASS", "NOT APPLICABLE") else EXIT_CHAIN


def cmd_upper_bound(args):
    b = upper_bound(args.gamma)
    fact = reference_facts(args.gamma)
    print(f"gamma = {fmt(b.gamma)}  ({fact.classification.value})")
    print(f"eps_star = {fmt(b.eps_star)}")
    print(f"eps_effective = {fmt(b.eps_effective)}  [{b.flags}]")
    print(f"upper = {fmt(b.upper)}")
    print(f"pi^2 - upper = {fmt(b.upper_gap)}  (strict: {b.is_strict()})")
    payload = dict(b.to_dict(), classification=fact.classification.value, citation=fact.citation)
    RunRecord("upper-bound", _params(args), payload).write(args.out or "upper-bound.json")
    return EXIT_OK


def cmd_search(args):
    gamma = check_gamma(args.gamma)
    r = lower_bound(gamma, budget=args.budget, seeds=args.seeds, n_cells=args.cells)
    print(f"gamma = {fmt(gamma)}")
    print(f"lower = {fmt(r.lower)}  strategy = {r.strategy}  seed = {r.seed}")
    print(f"pi^2 - lower = {fmt(math.pi ** 2 - r.lower)}")
    RunRecord("search", _params(args), r.to_dict()).write(args.out or "search.json")
    return EXIT_OK


def sweep_curve(gammas, budget, seeds, n_cells=16):
    rows, searches = [], []
    for g in gammas:
        fact = reference_facts(g)
        if g < 0.5:
            b = upper_bound(g)
            s = lower_bound(g, budget=budget, seeds=seeds, n_cells=n_cells)
            searches.append(s)
            rows.append(CurveRow(g, s.lower, b.upper, b.eps_star, f"{fact.classification.value};{b.flags}"))
        else:
            rows.append(CurveRow(g, None, None, None, fact.classification.value))
    return BoundCurve(tuple(rows)), searches


def cmd_sweep(args):
    lo, hi, steps = args.gamma_min, args.gamma_max, args.steps
    if not (0.0 < lo < hi) or steps < 1:
        raise UsageError("sweep needs 0 < gamma-min < gamma-max and steps >= 1")
    gammas = [float(g) for g in np.linspace(lo, hi, steps)]
    curve, searches = sweep_curve(gammas, args.budget, args.seeds, args.cells)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "bound_curve.csv").write_text(curve.to_csv())
    (out / "bound_curve.dat").write_text(plot_data(curve))
    if args.svg:
        (out / "bound_curve.svg").write_text(svg_chart(curve))
    for s in searches:
        write_json(out / f"search_gamma_{fmt(s.gamma)}.json", s.to_dict())
    RunRecord("sweep", _params(args), {"csv": curve.to_csv()}).write(out / "run.json")
    sys.stdout.write(curve.to_csv())
    return EXIT_OK


def _params(args):
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in sorted(vars(args).items()) if k != "func"}


def build_parser():
    p = argparse.ArgumentParser(prog="sl-majorant", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eig", help="ground eigenvalue of a potential file")
    e.add_argument("potential")
    e.add_argument("--tol", type=float, default=1e-10)
    e.add_argument("--oracle", choices=("prufer", "fd"), default="prufer")
    e.add_argument("--fd-n", type=int, default=20000)
    e.add_argument("--out")
    e.set_defaults(func=cmd_eig)

    v = sub.add_parser("verify-chain", help="evaluate and verify the estimate chain")
    v.add_argument("potential")
    v.add_argument("--gamma", type=float, required=True)
    v.add_argument("--epsilon", type=float)
    v.add_argument("--normalize", action="store_true", help="scale the potential to unit gamma-norm first")
    v.add_argument("--tol", type=float, default=1e-10, help="eigenvalue bracket width")
    v.add_argument("--slack-tol", type=float, default=1e-6)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify_chain)

    u = sub.add_parser("upper-bound", help="explicit bound U(gamma) < pi^2")
    u.add_argument("--gamma", type=float, required=True)
    u.add_argument("--out")
    u.set_defaults(func=cmd_upper_bound)

    s = sub.add_parser("search", help="lower bound L(gamma) by extremal search")
    s.add_argument("--gamma", type=float, required=True)
    s.add_argument("--budget", type=int, default=200)
    s.add_argument("--seeds", type=int, default=8)
    s.add_argument("--cells", type=int, default=16)
    s.add_argument("--out")
    s.set_defaults(func=cmd_search)

    w = sub.add_parser("sweep", help="tabulate L(gamma) and U(gamma) over a gamma range")
    w.add_argument("--gamma-min", type=float, required=True)
    w.add_argument("--gamma-max", type=float, required=True)
    w.add_argument("--steps", type=int, default=5)
    w.add_argument("--budget", type=int, default=200)
    w.add_argument("--seeds", type=int, default=8)
    w.add_argument("--cells", type=int, default=16)
    w.add_argument("--out", required=True)
    w.add_argument("--svg", action="store_true")
    w.set_defaults(func=cmd_sweep)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OutOfPruferDomain as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (PotentialError, DomainError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
