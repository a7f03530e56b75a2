"""Command-line harness: generate, test, verify, scale, solve.

Exit codes are a stable contract: 0 accept-majority (or all checks passed),
1 reject-majority (or a check failed), 2 usage/processing error.  All
randomness flows from --seed; re-running a command with identical flags
reproduces its output except for the wall-clock field.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import asdict
from functools import partial

import numpy as np

from . import instance_io
from .constraints import Kind, ProblemInstance
from .core import bruteforce_phi, check_lp_type_axioms, phi, sampling_lemma_check
from .errors import LpTestError
from .generators import (
    Family,
    FamilySpec,
    build_meb_family,
    build_separability_family,
    certify_meb_family,
    certify_separability_family,
    empirical_group_discovery,
    random_instance,
)
from .linprog import TolerantConfig, run_linear_feasibility_tester, \
    run_tolerant_feasibility_tester
from .separability import LabeledPointSet, affine_lift, reduce_to_constraints
from .tester import TesterConfig, estimate_verdict_probability, run_lptype_tester
from .verdict import estimate_runs

_GEN_FAMILIES = {f.value: f for f in Family}
_RANDOM_KINDS = {k.value: k for k in
                 (Kind.MEB, Kind.INTERSECTING_BALL, Kind.ANNULUS,
                  Kind.LINEAR_FEASIBILITY)}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lptest",
                                description="Property testing for LP-type problems")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument("--family", required=True, choices=sorted(_GEN_FAMILIES))
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--epsilon", type=float, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--k", type=float, default=None)
    g.add_argument("--kind", choices=sorted(_RANDOM_KINDS), default=None,
                   help="constraint kind for the random families")
    g.add_argument("--feasible", action="store_true",
                   help="random family: plant a feasible instance")
    g.add_argument("-o", "--output", default=None)
    g.set_defaults(func=cmd_gen)

    t = sub.add_parser("test", help="run a tester on an instance file")
    t.add_argument("instance")
    t.add_argument("--epsilon", type=float, required=True)
    t.add_argument("--k", type=float, default=None, help="threshold override")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--trials", type=int, default=1)
    t.add_argument("--tolerant", action="store_true")
    t.add_argument("--c", type=float, default=1.0 / 20.0,
                   help="tolerant closeness constant (must be < 1/15)")
    t.add_argument("--format", choices=("json", "csv"), default="json")
    t.set_defaults(func=cmd_test)

    v = sub.add_parser("verify", help="run exact verification checks")
    v.add_argument("instance")
    v.add_argument("--check", required=True,
                   choices=("sampling-lemma", "axioms", "oracle"))
    v.add_argument("--r", type=int, default=None)
    v.add_argument("--max-size", type=int, default=None)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("scaling", help="query-complexity scaling experiment")
    s.add_argument("--family", default="moment-far",
                   choices=("moment-far", "simplex-far"))
    s.add_argument("--d-list", default="")
    s.add_argument("--epsilon-list", default="")
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--output", default=None)
    s.set_defaults(func=cmd_scaling)

    so = sub.add_parser("solve", help="solve an instance and print the certificate")
    so.add_argument("instance")
    so.set_defaults(func=cmd_solve)
    return p


def _write_output(text: str, path):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_gen(args) -> int:
    family = _GEN_FAMILIES[args.family]
    k = args.k
    kind = None if args.kind is None else _RANDOM_KINDS[args.kind]
    spec = FamilySpec(family, args.d, args.n, args.epsilon, args.seed, k, kind)
    metadata = {"generator": {
        "family": family.value, "d": args.d, "n": args.n,
        "epsilon": args.epsilon, "seed": args.seed, "k": k,
    }}

    if family in (Family.MOMENT_NEAR, Family.MOMENT_FAR):
        pts, info = build_separability_family(spec)
        metadata["construction"] = info
        metadata["epsilon_effective"] = info["epsilon_effective"]
        if 3 * args.d + 1 <= 10:
            metadata["certification"] = certify_separability_family(pts)
        else:
            metadata["certification"] = {"method": "skipped",
                                         "reason": "too many distinct points"}
        inst = ProblemInstance.make(pts.as_constraint_set(), Kind.SEPARABILITY)
    elif family in (Family.SIMPLEX_NEAR, Family.SIMPLEX_FAR):
        cset, k_out, info = build_meb_family(spec)
        metadata["construction"] = info
        metadata["epsilon_effective"] = info["epsilon_effective"]
        metadata["certification"] = certify_meb_family(spec, info)
        inst = ProblemInstance.make(cset, Kind.MEB, k=k_out)
    else:
        if kind is None:
            raise LpTestError("random families need --kind")
        inst, info = random_instance(kind, args.d, args.n,
                                     feasible=(family is Family.RANDOM_FEASIBLE
                                               or args.feasible),
                                     epsilon_target=args.epsilon,
                                     seed=args.seed, k=k)
        metadata["construction"] = info
        if "far_fraction" in info:
            metadata["certification"] = {
                "method": "exhaustive", "far_fraction": info["far_fraction"],
                "far_removals": info["far_removals"]}

    _write_output(instance_io.dumps(inst, metadata), args.output)
    return 0


def _reduced_feasibility_system(inst: ProblemInstance):
    pts = LabeledPointSet(
        tuple(it.coords for it in inst.constraints.items),
        tuple(it.label for it in inst.constraints.items),
        inst.constraints.multiplicities)
    return reduce_to_constraints(affine_lift(pts))


def _plain_trial(system, epsilon, trial_seed):
    return run_linear_feasibility_tester(system, epsilon, seed=trial_seed)


def _tolerant_trial(system, epsilon, c, trial_seed):
    return run_tolerant_feasibility_tester(
        system, TolerantConfig(epsilon, c=c, seed=trial_seed))


def cmd_test(args) -> int:
    inst, metadata = instance_io.load_instance(args.instance)
    inst, norm = instance_io.normalize_instance(inst)
    start = time.monotonic()

    if inst.kind in (Kind.MEB, Kind.INTERSECTING_BALL, Kind.ANNULUS):
        if args.tolerant:
            raise LpTestError("tolerant testing applies to feasibility kinds")
        cfg = TesterConfig(args.epsilon, k=args.k, seed=args.seed)
        if args.trials == 1:
            verdicts = [run_lptype_tester(inst, cfg)]
        else:
            est = estimate_verdict_probability(inst, cfg, args.trials, args.seed)
            verdicts = list(est.verdicts)
    else:
        if inst.kind is Kind.SEPARABILITY:
            system = _reduced_feasibility_system(inst)
        else:
            system = inst.constraints
        if args.tolerant:
            run = partial(_tolerant_trial, system, args.epsilon, args.c)
        else:
            run = partial(_plain_trial, system, args.epsilon)
        if args.trials == 1:
            verdicts = [run(args.seed)]
        else:
            verdicts = list(estimate_runs(run, args.trials, args.seed).verdicts)

    accept_count = sum(1 for v in verdicts if v.accepted)
    trials = len(verdicts)
    rate = accept_count / trials
    mean_q = sum(v.queries_used for v in verdicts) / trials
    ci95 = 1.96 * math.sqrt(rate * (1 - rate) / trials)
    report = {
        "instance": args.instance,
        "kind": inst.kind.value,
        "config": {"epsilon": args.epsilon, "k": args.k, "seed": args.seed,
                   "trials": args.trials, "tolerant": args.tolerant,
                   "c": args.c if args.tolerant else None},
        "normalization": norm,
        "accept_count": accept_count,
        "accept_rate": rate,
        "mean_queries": mean_q,
        "ci95": ci95,
        "trials": [{"trial": i, "decision": v.decision,
                    "queries": v.queries_used, "cause": v.cause}
                   for i, v in enumerate(verdicts)],
        "wall_clock_s": time.monotonic() - start,
    }
    if args.format == "json":
        print(json.dumps(report, indent=1, sort_keys=True))
    else:
        out = io.StringIO()
        w = csv.writer(out)
        w.writerow(["trial", "decision", "queries", "cause"])
        for i, v in enumerate(verdicts):
            w.writerow([i, v.decision, v.queries_used, v.cause])
        sys.stdout.write(out.getvalue())
    return 0 if 2 * accept_count >= trials else 1


def cmd_verify(args) -> int:
    inst, _ = instance_io.load_instance(args.instance)
    if args.check == "sampling-lemma":
        if args.r is None:
            raise LpTestError("--r is required for the sampling-lemma check")
        rep = sampling_lemma_check(inst, args.r)
        print(json.dumps({
            "check": "sampling-lemma", "n": rep.n, "r": rep.r,
            "v_r": str(rep.v_r), "x_r1": str(rep.x_r1),
            "lhs": str(rep.lhs), "rhs": str(rep.rhs), "equal": rep.equal,
            "violator_bound": str(rep.violator_bound), "bound_ok": rep.bound_ok,
        }, indent=1))
        return 0 if rep.equal and rep.bound_ok else 1
    if args.check == "axioms":
        rep = check_lp_type_axioms(inst, max_subset_size=args.max_size)
        print(json.dumps({
            "check": "axioms", "passed": rep.passed,
            "monotonicity_ok": rep.monotonicity_ok,
            "locality_ok": rep.locality_ok,
            "subsets_checked": rep.subsets_checked,
        }, indent=1))
        return 0 if rep.passed else 1
    # oracle: full-set solver value vs brute force
    full = inst.full_subset()
    got = phi(inst, full)
    want = bruteforce_phi(inst, full)
    tol = 1e-6 if inst.kind is Kind.ANNULUS else 1e-9
    if math.isinf(got.value) or math.isinf(want.value):
        ok = got.value == want.value
    else:
        ok = abs(got.value - want.value) <= tol
    print(json.dumps({"check": "oracle", "solver_value": got.value,
                      "bruteforce_value": want.value, "match": ok}, indent=1))
    return 0 if ok else 1


def cmd_scaling(args) -> int:
    ds = [int(v) for v in args.d_list.split(",") if v.strip()]
    epss = [float(v) for v in args.epsilon_list.split(",") if v.strip()]
    family = Family(args.family)
    out = io.StringIO()
    w = csv.writer(out)
    w.writerow(["d", "epsilon", "mean_queries", "ci95", "expected_queries"])
    for d in ds:
        for eps in epss:
            n = int(round(3 * d * 100 / eps))
            spec = FamilySpec(family, d, n, eps, args.seed,
                              k=1.0 if family is Family.SIMPLEX_FAR else None)
            res = empirical_group_discovery(spec, args.trials, seed=args.seed)
            std = float(np.std(res.curve, ddof=1)) if args.trials > 1 else 0.0
            ci = 1.96 * std / math.sqrt(args.trials)
            w.writerow([d, eps, f"{res.mean_queries:.6f}", f"{ci:.6f}",
                        f"{res.expected_queries:.6f}"])
    _write_output(out.getvalue(), args.output)
    return 0


def cmd_solve(args) -> int:
    inst, _ = instance_io.load_instance(args.instance)
    if inst.kind is Kind.SEPARABILITY:
        system = _reduced_feasibility_system(inst)
        from .linprog import solve_lp_max_x1
        lp = solve_lp_max_x1(list(system.items))
        print(json.dumps({"kind": inst.kind.value, "status": lp.status,
                          "separator": None if lp.point is None else list(lp.point)},
                         indent=1))
        return 0
    value = phi(inst, inst.full_subset())
    cert = value.certificate
    doc = {"kind": inst.kind.value, "value": value.value}
    if inst.kind in (Kind.MEB, Kind.INTERSECTING_BALL):
        doc.update(center=list(cert.center), radius=cert.radius,
                   support=list(cert.support))
    elif inst.kind is Kind.ANNULUS:
        doc.update(center=list(cert.center), r_inner=cert.r_inner,
                   r_outer=cert.r_outer, squared_width=cert.squared_width,
                   support=list(cert.support))
    else:
        doc.update(status="infeasible" if value.is_infeasible else "feasible",
                   point=None if value.is_infeasible else list(cert.point),
                   objective=None if value.is_infeasible else cert.objective)
    print(json.dumps(doc, indent=1))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LpTestError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
