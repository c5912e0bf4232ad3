"""Command-line front end.

Subcommands:
  bounds <instance.json>      lower-bound report for one instance
  simulate <experiment.json>  replicated run, regret curve CSV plus summary JSON
  sweep <experiment.json>     several policies on one instance, one CSV each
  lemma-check --slots M --trials K --seed S
                              exhaustive one-slot-per-step scheduling check

Exit codes: 0 success, 1 property-check failure, 2 validation error, 3 runtime error.
Documents are JSON; unknown fields are rejected.  All numbers are printed with
6 significant digits and CSV uses dot decimals regardless of locale.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bounds as bounds_mod
from . import model
from .harness import RunConfig, run_replicated, slope_estimate
from .model import ValidationError
from .policies import POLICY_NAMES

EXIT_CHECK_FAILED = 1
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3


def _fmt(x):
    return format(float(x), ".6g")


def _check_fields(doc, allowed, where):
    unknown = set(doc) - set(allowed)
    if unknown:
        raise ValidationError("unknown field(s) %s in %s" % (sorted(unknown), where))


def parse_instance(doc):
    if not isinstance(doc, dict):
        raise ValidationError("instance must be an object")
    kind = doc.get("kind")
    if kind == model.FACTORIZED:
        _check_fields(doc, {"kind", "exam_probs", "arm_means"}, "instance")
        if "exam_probs" not in doc or "arm_means" not in doc:
            raise ValidationError("factorized instance needs exam_probs and arm_means")
        return model.factorized(doc["exam_probs"], doc["arm_means"])
    if kind == model.PER_SLOT:
        _check_fields(doc, {"kind", "slot_means"}, "instance")
        if "slot_means" not in doc:
            raise ValidationError("per_slot instance needs slot_means")
        return model.per_slot(doc["slot_means"])
    raise ValidationError("instance kind must be %r or %r, got %r"
                          % (model.FACTORIZED, model.PER_SLOT, kind))


def instance_document(instance):
    if instance.kind == model.FACTORIZED:
        return {"kind": instance.kind, "exam_probs": list(instance.exam_probs),
                "arm_means": list(instance.arm_means)}
    return {"kind": instance.kind, "slot_means": [list(r) for r in instance.slot_means]}


def _parse_policy_block(doc):
    if not isinstance(doc, dict):
        raise ValidationError("policy must be an object")
    _check_fields(doc, {"name", "params"}, "policy")
    name = doc.get("name")
    if name not in POLICY_NAMES:
        raise ValidationError("policy name must be one of %s, got %r" % (list(POLICY_NAMES), name))
    params = doc.get("params", {})
    if not isinstance(params, dict):
        raise ValidationError("policy params must be an object")
    return name, params


def parse_experiment(doc, sweep=False):
    if not isinstance(doc, dict):
        raise ValidationError("experiment must be an object")
    key = "policies" if sweep else "policy"
    _check_fields(doc, {"instance", key, "run"}, "experiment")
    for field in ("instance", key, "run"):
        if field not in doc:
            raise ValidationError("experiment is missing the %r block" % field)
    instance = parse_instance(doc["instance"])
    if sweep:
        if not isinstance(doc[key], list) or not doc[key]:
            raise ValidationError("policies must be a non-empty array")
        policy_blocks = [_parse_policy_block(p) for p in doc[key]]
    else:
        policy_blocks = [_parse_policy_block(doc[key])]
    run = doc["run"]
    _check_fields(run, {"horizon", "checkpoints", "replications", "master_seed"}, "run")
    for field in ("horizon", "replications", "master_seed"):
        if field not in run:
            raise ValidationError("run block is missing %r" % field)
    horizon = int(run["horizon"])
    reps = int(run["replications"])
    if horizon < 1:
        raise ValidationError("horizon must be >= 1")
    if reps < 1:
        raise ValidationError("replications must be >= 1")
    checkpoints = tuple(run["checkpoints"]) if "checkpoints" in run else None
    configs = [RunConfig(instance=instance, policy=name, policy_params=params,
                         horizon=horizon, checkpoints=checkpoints,
                         replications=reps, master_seed=int(run["master_seed"]))
               for name, params in policy_blocks]
    return configs


def bounds_document(instance):
    result = bounds_mod.compute_lower_bounds(instance)
    struct = model.optimal_structure(instance)
    doc = {
        "instance": instance_document(instance),
        "lp_bound": float(result.lp_bound),
        "closed_form_bound": float(result.closed_form),
        "optimal": {
            "value": float(struct.optimal_value),
            "lists": sorted(list(pi) for pi in struct.optimal_lists),
            "relevant_arms": sorted(struct.relevant_arms),
            "irrelevant_arms": sorted(struct.irrelevant_arms),
            "slot_winners": [sorted(w) for w in struct.slot_winners],
        },
    }
    if instance.kind == model.FACTORIZED:
        doc["asymptote_with_exam_factor"] = float(result.asymptote_with_exam_factor)
        doc["asymptote_plain"] = float(result.asymptote_plain)
    else:
        doc["per_slot_bound"] = float(result.per_slot)
        doc["play_count_bounds"] = [
            {"slot": k, "arm": j, "rate": float(v)}
            for (k, j), v in sorted(result.play_count_bounds.items())]
    return doc


def _round6(obj):
    if isinstance(obj, float):
        return float(_fmt(obj))
    if isinstance(obj, dict):
        return {k: _round6(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_round6(v) for v in obj]
    return obj


def _write_json(path, doc):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_round6(doc), indent=2, sort_keys=True) + "\n")


def cmd_bounds(args):
    instance = parse_instance(json.loads(Path(args.instance).read_text()))
    doc = bounds_document(instance)
    print("lp_bound           %s" % _fmt(doc["lp_bound"]))
    print("closed_form_bound  %s" % _fmt(doc["closed_form_bound"]))
    if "per_slot_bound" in doc:
        print("per_slot_bound     %s" % _fmt(doc["per_slot_bound"]))
        for row in doc["play_count_bounds"]:
            print("plays[slot=%d, arm=%d] >= %s log T" % (row["slot"], row["arm"], _fmt(row["rate"])))
    if "asymptote_plain" in doc:
        print("asymptote_plain            %s" % _fmt(doc["asymptote_plain"]))
        print("asymptote_with_exam_factor %s" % _fmt(doc["asymptote_with_exam_factor"]))
    print("optimal value      %s" % _fmt(doc["optimal"]["value"]))
    print("optimal lists      %s" % doc["optimal"]["lists"])
    print("irrelevant arms    %s" % doc["optimal"]["irrelevant_arms"])
    _write_json(Path(args.out) / "bounds.json", doc)
    return 0


def _curve_csv(agg):
    lines = ["checkpoint,regret_mean,regret_stderr,regret_over_logt_mean,regret_over_logt_stderr"]
    for i, t in enumerate(agg.checkpoints):
        lines.append(",".join([str(t), _fmt(agg.regret_mean[i]), _fmt(agg.regret_stderr[i]),
                               _fmt(agg.regret_over_logt_mean[i]),
                               _fmt(agg.regret_over_logt_stderr[i])]))
    return "\n".join(lines) + "\n"


def _summary_document(config, agg):
    slope = slope_estimate(agg.checkpoints, agg.regret_mean, config.horizon)
    return {
        "policy": config.policy,
        "horizon": config.horizon,
        "replications": config.replications,
        "master_seed": config.master_seed,
        "slope_estimate": float(slope),
        "final_regret_mean": float(agg.regret_mean[-1]),
        "final_regret_stderr": float(agg.regret_stderr[-1]),
        "mean_slot_arm_counts": [[float(v) for v in row] for row in agg.slot_arm_counts_mean],
        "mean_obs_counts": [float(v) for v in agg.obs_counts_mean],
        "mean_init_steps": float(np.mean([r.init_steps for r in agg.runs])),
    }


def _run_config(config, args, out):
    if args.horizon is not None:
        config = RunConfig(instance=config.instance, policy=config.policy,
                           policy_params=config.policy_params, horizon=args.horizon,
                           checkpoints=None, replications=config.replications,
                           master_seed=config.master_seed)
    if args.replications is not None:
        config = RunConfig(instance=config.instance, policy=config.policy,
                           policy_params=config.policy_params, horizon=config.horizon,
                           checkpoints=config.checkpoints, replications=args.replications,
                           master_seed=config.master_seed)
    if args.seed is not None:
        config = RunConfig(instance=config.instance, policy=config.policy,
                           policy_params=config.policy_params, horizon=config.horizon,
                           checkpoints=config.checkpoints, replications=config.replications,
                           master_seed=args.seed)
    agg = run_replicated(config, workers=args.workers)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / ("%s_curve.csv" % config.policy)
    csv_path.write_text(_curve_csv(agg))
    _write_json(out / ("%s_summary.json" % config.policy), _summary_document(config, agg))
    print("%s: final regret %s +- %s, slope %s (wrote %s)"
          % (config.policy, _fmt(agg.regret_mean[-1]), _fmt(agg.regret_stderr[-1]),
             _fmt(slope_estimate(agg.checkpoints, agg.regret_mean, config.horizon)), csv_path))


def cmd_simulate(args):
    configs = parse_experiment(json.loads(Path(args.experiment).read_text()))
    _run_config(configs[0], args, Path(args.out))
    return 0


def cmd_sweep(args):
    configs = parse_experiment(json.loads(Path(args.experiment).read_text()), sweep=True)
    for config in configs:
        _run_config(config, args, Path(args.out))
    return 0


def cmd_lemma_check(args):
    if not 1 <= args.slots <= 4:
        raise ValidationError("--slots must lie in 1..4 (exhaustive regime)")
    rng = np.random.Generator(np.random.PCG64(args.seed))
    import itertools
    checks = failures = 0
    slots = range(args.slots)
    for _ in range(args.trials):
        rewards = rng.random((args.slots, args.slots))
        for r in range(1, args.slots + 1):
            for subset in itertools.combinations(slots, r):
                report = bounds_mod.verify_slot_closing(rewards, subset)
                checks += 1
                if not report.equal:
                    failures += 1
                    print("FAIL: subset %s, best %s vs one-per-step %s"
                          % (subset, _fmt(report.best_value), _fmt(report.one_per_step_value)))
    print("slot-closing check: %d checks, %d failures" % (checks, failures))
    return EXIT_CHECK_FAILED if failures else 0


def build_parser():
    parser = argparse.ArgumentParser(prog="slotbandits",
                                     description="Bandits with non-equivalent multiple plays: "
                                                 "lower bounds and simulations.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="lower-bound report for an instance file")
    p.add_argument("instance")
    p.add_argument("--out", default=".", help="output directory for bounds.json")
    p.set_defaults(func=cmd_bounds)

    for name, fn in (("simulate", cmd_simulate), ("sweep", cmd_sweep)):
        p = sub.add_parser(name, help="run an experiment document")
        p.add_argument("experiment")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override master_seed")
        p.add_argument("--replications", type=int, default=None)
        p.add_argument("--horizon", type=int, default=None,
                       help="override horizon (checkpoints are re-derived)")
        p.add_argument("--workers", type=int, default=1)
        p.set_defaults(func=fn)

    p = sub.add_parser("lemma-check", help="exhaustive one-slot-per-step scheduling check")
    p.add_argument("--slots", "--m", dest="slots", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_lemma_check)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print("validation error: %s" % exc, file=sys.stderr)
        return EXIT_VALIDATION
    except (OSError, json.JSONDecodeError) as exc:
        print("validation error: %s" % exc, file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # runtime failures (shape mismatches, solver errors)
        print("runtime error: %s" % exc, file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
