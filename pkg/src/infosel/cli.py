"""Command-line interface.

Exit codes: 0 success, 2 invalid input, 3 infeasible brute force.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import bayes, harness
from .algorithms import ALGORITHMS, BudgetError, run_algorithm
from .attack import InfeasibleError, worst_case_attack
from .bounds import h_func, theorem2_factor, theorem3_factor
from .instance import InstanceError, bits_of, load, mask_of, random_instance, save
from .objectives import OBJECTIVES, lambda_value, gamma_obj_value
from .ratios import (DegenerateRatioError, EnumerationRefused, aggregate, c_gamma_value,
                     exact_bipartite, exact_curvature, exact_inverse_curvature,
                     exact_submodularity_ratio, exact_superadditivity)

EXIT_INVALID = 2
EXIT_INFEASIBLE = 3


def parse_set(text: str) -> int:
    """Source set as hex bitmask (``0x2c``) or comma-separated indices (``2,3,5``)."""
    text = text.strip()
    if text.lower().startswith("0x"):
        return int(text, 16)
    if text in ("", "-", "{}"):
        return 0
    return mask_of(int(t) for t in text.split(","))


def _dump(obj) -> None:
    print(json.dumps(obj, indent=2))


def _set_info(mask: int) -> dict:
    return {"mask": f"{mask:#x}", "sources": bits_of(mask)}


def cmd_generate(args) -> int:
    labels = None
    if args.labels:
        lo, _, hi = args.labels.partition(":")
        labels = (int(lo), int(hi or lo))
    inst = random_instance(args.m, args.n, args.seed, enforce_unique=args.unique, block_profile=labels)
    if args.output:
        save(inst, args.output)
    else:
        _dump(inst.to_dict())
    return 0


def cmd_solve(args) -> int:
    inst = load(args.instance)
    out = run_algorithm(args.algorithm, inst, args.K, args.A, args.objective, args.beta)
    result = {
        "algorithm": out.method, "objective": out.objective, "K": args.K, "A": args.A,
        "beta": args.beta, "selected": _set_info(out.selected),
        "attack": _set_info(out.attack.removed), "surviving_value": out.surviving_value,
    }
    if args.compare_optimal and args.algorithm != "optimal":
        opt = run_algorithm("optimal", inst, args.K, args.A, args.objective)
        result["optimal_value"] = opt.surviving_value
        result["ratio"] = out.with_optimum(opt.surviving_value).ratio
    _dump(result)
    return 0


def cmd_attack(args) -> int:
    inst = load(args.instance)
    I = parse_set(args.set)
    res = worst_case_attack(inst, I, args.A, args.objective)
    _dump({"set": _set_info(I), "A": args.A, "objective": args.objective,
           "removed": _set_info(res.removed), "surviving_value": res.surviving_value,
           "evaluations": res.evaluations})
    return 0


def cmd_ratios(args) -> int:
    inst = load(args.instance)
    out = {"c_Gamma": c_gamma_value(inst)}
    try:
        out.update(aggregate(inst).as_dict())
    except DegenerateRatioError as exc:
        out["formula_error"] = str(exc)
    if args.exact:
        out["exact"] = {
            "submodularity_ratio_maxpen": exact_submodularity_ratio(inst),
            "inverse_curvature_maxpen": exact_inverse_curvature(inst),
            "superadditivity_maxpen": exact_superadditivity(inst),
            "bipartite_maxpen": exact_bipartite(inst),
            "submodularity_ratio_totalpen": exact_submodularity_ratio(inst, "totalpen"),
            "curvature_totalpen": exact_curvature(inst, "totalpen"),
        }
    out["lambda_all"] = lambda_value(inst, inst.all_sources)
    out["gamma_all"] = gamma_obj_value(inst, inst.all_sources)
    _dump(out)
    return 0


def cmd_bound(args) -> int:
    if args.which == "alg1":
        c = args.c if args.c is not None else args.A / args.K
        rep = theorem2_factor(args.gamma, args.kappa, args.alpha_check, args.nu_check, args.beta, c)
    else:
        rep = theorem3_factor(args.c_gamma, args.K, args.A)
    _dump({"factor": rep.factor, "valid": rep.valid, "inputs": rep.inputs, "flags": rep.flags,
           "limit_case": rep.limit_case})
    return 0


def cmd_bayes_sim(args) -> int:
    inst = load(args.instance)
    I = parse_set(args.set)
    model = bayes.synthesize_likelihoods(inst, args.epsilon, args.seed)
    trace, verdict = bayes.simulate_convergence(inst, model, I, args.true_state, args.T, args.seed)
    if args.trace:
        bayes.write_trace(trace, args.trace, inst.hypothesis_labels)
    _dump({"set": _set_info(I), "true_state": args.true_state, "T": args.T,
           "equivalent_set": bits_of(verdict.equivalent_set),
           "within_deviation": verdict.within_deviation,
           "outside_mass": verdict.outside_mass, "passed": verdict.passed,
           "final_belief": [float(x) for x in trace[-1]]})
    return 0


def cmd_experiment(args) -> int:
    cfg = harness.ExperimentConfig.load(args.config)
    if args.workers:
        cfg.workers = args.workers
    rows = harness.run_experiment(cfg)
    text = harness.to_csv(rows, cfg.columns, drop_timing=args.no_timing)
    out = args.output or cfg.output
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if cfg.mode != "bayes":
        print(json.dumps(harness.summarize(rows), indent=2), file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="infosel", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a random instance as JSON")
    p.add_argument("--m", type=int, default=10, help="number of hypotheses")
    p.add_argument("--n", type=int, default=10, help="number of sources")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--unique", action="store_true", help="force distinct off-diagonal penalties")
    p.add_argument("--labels", help="labels per partition, 'r' or 'lo:hi'")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="select sources and evaluate them under worst-case attack")
    p.add_argument("instance")
    p.add_argument("K", type=int)
    p.add_argument("A", type=int)
    p.add_argument("--beta", type=float)
    p.add_argument("--objective", choices=OBJECTIVES, default="maxpen")
    p.add_argument("--algorithm", choices=ALGORITHMS, default="alg1")
    p.add_argument("--compare-optimal", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("attack", help="exact worst-case removal from a source set")
    p.add_argument("instance")
    p.add_argument("set", help="hex mask (0x..) or comma-separated indices")
    p.add_argument("A", type=int)
    p.add_argument("--objective", choices=OBJECTIVES, default="maxpen")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("ratios", help="curvature and submodularity ratios")
    p.add_argument("instance")
    p.add_argument("--exact", action="store_true", help="also enumerate exact values")
    p.set_defaults(func=cmd_ratios)

    p = sub.add_parser("bound", help="approximation factor of alg1 or alg2")
    p.add_argument("which", choices=("alg1", "alg2"))
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--A", type=int, required=True)
    p.add_argument("--gamma", type=float)
    p.add_argument("--kappa", type=float)
    p.add_argument("--alpha-check", type=float)
    p.add_argument("--nu-check", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--c", type=float, help="attack fraction (default A/K)")
    p.add_argument("--c-gamma", type=float)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("bayes-sim", help="simulate belief convergence")
    p.add_argument("instance")
    p.add_argument("set")
    p.add_argument("true_state", type=int)
    p.add_argument("T", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=0.2)
    p.add_argument("--trace", help="write the belief trace CSV here")
    p.set_defaults(func=cmd_bayes_sim)

    p = sub.add_parser("experiment", help="run an experiment config and write CSV")
    p.add_argument("config")
    p.add_argument("-o", "--output")
    p.add_argument("--workers", type=int)
    p.add_argument("--no-timing", action="store_true", help="omit timing columns")
    p.set_defaults(func=cmd_experiment)
    return ap


def _check_bound_args(args) -> None:
    if args.command != "bound":
        return
    need = ["gamma", "kappa", "alpha_check", "nu_check", "beta"] if args.which == "alg1" else ["c_gamma"]
    missing = [k for k in need if getattr(args, k) is None]
    if missing:
        raise ValueError(f"bound {args.which} needs --{', --'.join(m.replace('_', '-') for m in missing)}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _check_bound_args(args)
        return args.func(args)
    except InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (InstanceError, BudgetError, EnumerationRefused, ValueError, IndexError,
            KeyError, FileNotFoundError, harness.ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
