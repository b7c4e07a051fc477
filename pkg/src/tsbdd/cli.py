"""Command line interface.

Subcommands: gen, compile, count, posterior, bench, oracle-check,
session, freeze.  Exit codes: 0 success, 1 usage error, 2 validation
error, 3 verification mismatch.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import __version__
from .bench import (
    fit_power_law,
    linear_r2,
    records_to_csv,
    run_benchmark,
    svg_scatter,
    sweep_suite,
)
from .counting import CountingError, card_with_evidence
from .generate import GenSpec, GenerationError, generate_model
from .inference import StrategyMismatchError, TsEvidence, posteriors
from .kernel import (
    FaultMode,
    KernelError,
    compile_kernel,
    parse_fault_mode,
    size_bound,
)
from .model import ModelFormatError, parse_model, serialize_model, validate
from .oracle import OracleBudgetError, build_joint, query_joint
from .sample import SAMPLE_MODEL_TEXT
from .session import EvidenceParseError, parse_ts_evidence, run_session

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_MISMATCH = 3


class UsageError(Exception):
    pass


class ValidationFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); keep our exit codes
        raise UsageError(message)


def _load_model(path: str):
    if path == "sample":
        text = SAMPLE_MODEL_TEXT
    else:
        try:
            with open(path, "r", encoding="utf-8") as handle:
                text = handle.read()
        except OSError as exc:
            raise ValidationFailure(f"cannot read model file: {exc}") from exc
    try:
        model = parse_model(text)
    except ModelFormatError as exc:
        raise ValidationFailure(str(exc)) from exc
    issues = validate(model)
    errors = [i for i in issues if i.severity == "error"]
    if errors:
        raise ValidationFailure("; ".join(i.message for i in errors))
    return model


def _write_output(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _mode(args) -> FaultMode:
    try:
        return parse_fault_mode(args.mode)
    except KernelError as exc:
        raise UsageError(str(exc)) from exc


def cmd_gen(args) -> int:
    spec = GenSpec(
        n_system=args.n_system,
        n_cause=args.n_cause,
        n_action=args.n_action,
        max_subsystems_per_node=args.max_subsystems,
        targets_per_cause=(args.targets_min, args.targets_max),
        seed=args.seed,
    )
    try:
        model = generate_model(spec)
    except GenerationError as exc:
        raise UsageError(str(exc)) from exc
    _write_output(serialize_model(model), args.out)
    return EXIT_OK


def cmd_compile(args) -> int:
    model = _load_model(args.model)
    mode = _mode(args)
    try:
        kernel = compile_kernel(model, mode, force_problem_faulty=args.force_faulty)
    except KernelError as exc:
        raise ValidationFailure(str(exc)) from exc
    nodes = kernel.bdd.node_count(kernel.root)
    bound = size_bound(model, mode)
    info = {
        "variables": len(kernel.order),
        "nodes": nodes,
        "size_bound": bound,
        "mode": str(mode),
        "forced": kernel.force_problem_faulty,
    }
    if args.dump_dot:
        with open(args.dump_dot, "w", encoding="utf-8") as handle:
            handle.write(kernel.bdd.to_dot(kernel.root))
    if args.format == "json":
        _write_output(json.dumps(info, indent=2) + "\n", args.out)
    else:
        _write_output(
            "".join(f"{key}: {value}\n" for key, value in info.items()), args.out
        )
    return EXIT_OK


def _split_evidence(args, model) -> TsEvidence:
    try:
        return parse_ts_evidence(args.evidence or "", model)
    except EvidenceParseError as exc:
        raise UsageError(str(exc)) from exc


def cmd_count(args) -> int:
    model = _load_model(args.model)
    mode = _mode(args)
    kernel = compile_kernel(model, mode, force_problem_faulty=args.force_faulty)
    evidence = _split_evidence(args, model)
    if evidence.actions:
        raise UsageError("count works on kernel variables; use posterior for actions")
    total = card_with_evidence(kernel.bdd, evidence.kernel, root=kernel.root)
    from .inference import cause_counts

    counts = cause_counts(kernel, evidence.kernel)
    if args.format == "json":
        _write_output(
            json.dumps({"card": total, "cause_counts": counts}, indent=2) + "\n", args.out
        )
    else:
        lines = [f"card: {total}"]
        lines += [f"{name}: {count}" for name, count in counts.items()]
        _write_output("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_posterior(args) -> int:
    model = _load_model(args.model)
    mode = _mode(args)
    kernel = compile_kernel(model, mode, force_problem_faulty=True)
    evidence = _split_evidence(args, model)
    try:
        result = posteriors(model, kernel, evidence, strategy=args.strategy)
    except StrategyMismatchError as exc:
        sys.stderr.write(f"verification mismatch: {exc}\n")
        return EXIT_MISMATCH
    except CountingError as exc:
        raise UsageError(str(exc)) from exc
    if args.format == "json":
        payload = {
            "posteriors": result.posteriors,
            "cards": result.cards,
            "evidence_probability": result.evidence_probability,
            "consistent": result.consistent,
        }
        _write_output(json.dumps(payload, indent=2) + "\n", args.out)
    else:
        width = max(len(c) for c in result.posteriors)
        lines = [f"{'cause'.ljust(width)}  {'count':>12}  posterior"]
        for name in model.cause_names():
            lines.append(
                f"{name.ljust(width)}  {result.cards[name]:>12g}  "
                f"{result.posteriors[name]:.6f}"
            )
        if not result.consistent:
            lines.append("status: inconsistent evidence (zero mass)")
        _write_output("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    mode = _mode(args)
    specs = sweep_suite(
        min_total=args.min_total,
        max_total=args.max_total,
        points=args.points,
        models_per_point=args.models_per_point,
        base_seed=args.seed,
    )
    records = run_benchmark(
        specs, mode, actions_observed=args.actions_observed, timing=args.timing
    )
    params = {
        "min_total": args.min_total,
        "max_total": args.max_total,
        "points": args.points,
        "models_per_point": args.models_per_point,
        "base_seed": args.seed,
        "mode": str(mode),
        "actions_observed": args.actions_observed,
        "version": __version__,
    }
    csv_text = records_to_csv(records, params)
    _write_output(csv_text, args.out)
    if args.svg:
        points = [
            (r.n_system + r.n_cause + r.n_action, max(r.ops_total(), 1)) for r in records
        ]
        with open(args.svg, "w", encoding="utf-8") as handle:
            handle.write(svg_scatter(points))
    violations = [r for r in records if r.nodes > r.size_bound]
    if violations:
        sys.stderr.write(f"size bound exceeded on {len(violations)} models\n")
        return EXIT_MISMATCH
    if args.report:
        xs = [float(r.n_system + r.n_cause) for r in records]
        ys = [float(max(r.ops_total(), 1)) for r in records]
        _, exponent = fit_power_law(xs, ys)
        r2 = linear_r2([float(r.nodes) for r in records], ys)
        sys.stderr.write(f"ops ~ n^{exponent:.2f}; ops vs nodes R^2 = {r2:.3f}\n")
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    model = _load_model(args.model)
    mode = _mode(args)
    if model.kernel_variable_count() > 16:
        raise ValidationFailure("oracle-check needs at most 16 kernel variables")
    kernel = compile_kernel(model, mode, force_problem_faulty=True)
    try:
        joint = build_joint(model, mode, True)
    except OracleBudgetError as exc:
        raise ValidationFailure(str(exc)) from exc
    rng = random.Random(args.seed)
    names = [n for n in model.system_names() + model.cause_names() if n != model.problem_var]
    worst = 0.0
    for _ in range(args.trials):
        ev = {n: rng.randint(0, 1) for n in names if rng.random() < 0.2}
        obs = {a: rng.randint(0, 1) for a in model.action_names() if rng.random() < 0.4}
        result = posteriors(model, kernel, TsEvidence(kernel=ev, actions=obs), strategy="both")
        want = query_joint(joint, model, ev, obs)
        for name in result.posteriors:
            worst = max(worst, abs(result.posteriors[name] - want.posteriors[name]))
    sys.stdout.write(f"max posterior deviation over {args.trials} trials: {worst:.3e}\n")
    if worst > 1e-9:
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_session(args) -> int:
    model = _load_model(args.model)
    run_session(model, sys.stdin, sys.stdout, mode=_mode(args))
    return EXIT_OK


def cmd_freeze(args) -> int:
    model = _load_model(args.model)
    mode = _mode(args)
    joint = build_joint(model, mode, True)
    joint_unforced = build_joint(model, mode, False)
    scenarios: dict[str, dict] = {}

    def record(name, kernel_ev, action_obs):
        q = query_joint(joint, model, kernel_ev, action_obs)
        scenarios[name] = {
            "kernel_evidence": kernel_ev,
            "action_observations": action_obs,
            "posteriors": q.posteriors,
            "evidence_mass": q.evidence_mass,
            "consistent": q.consistent,
        }

    record("no-evidence", {}, {})
    for sname in model.system_names():
        if sname != model.problem_var:
            record(f"{sname}-faulty", {sname: 1}, {})
            break
    for aname in model.action_names():
        record(f"{aname}-yes", {}, {aname: 1})
        record(f"{aname}-no", {}, {aname: 0})
        break
    payload = {
        "command": "tsbdd freeze --model "
        + args.model
        + (f" --mode {args.mode}" if args.mode != "exactly-one" else ""),
        "model": serialize_model(model),
        "mode": str(mode),
        "satisfying_forced": len(joint.entries),
        "satisfying_unforced": len(joint_unforced.entries),
        "scenarios": scenarios,
    }
    _write_output(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="tsbdd", description="ROBDD troubleshooting inference engine")
    parser.add_argument("--version", action="version", version=f"tsbdd {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, model=True):
        if model:
            p.add_argument(
                "--model", default="sample", help="model file path, or 'sample'"
            )
        p.add_argument("--mode", default="exactly-one")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--out", default=None)

    p = sub.add_parser("gen", help="generate a random model")
    common(p, model=False)
    p.add_argument("--n-system", type=int, required=True)
    p.add_argument("--n-cause", type=int, required=True)
    p.add_argument("--n-action", type=int, default=0)
    p.add_argument("--max-subsystems", type=int, default=3)
    p.add_argument("--targets-min", type=int, default=1)
    p.add_argument("--targets-max", type=int, default=2)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("compile", help="compile a model and report sizes")
    common(p)
    p.add_argument("--force-faulty", dest="force_faulty", action="store_true", default=True)
    p.add_argument("--no-force-faulty", dest="force_faulty", action="store_false")
    p.add_argument("--dump-dot", default=None)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("count", help="count satisfying configurations")
    common(p)
    p.add_argument("--evidence", default="")
    p.add_argument("--force-faulty", dest="force_faulty", action="store_true", default=True)
    p.add_argument("--no-force-faulty", dest="force_faulty", action="store_false")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("posterior", help="posterior fault probabilities")
    common(p)
    p.add_argument("--evidence", default="")
    p.add_argument("--strategy", choices=("naive", "single-pass", "both"), default="both")
    p.set_defaults(func=cmd_posterior)

    p = sub.add_parser("bench", help="random-model benchmark suite")
    common(p, model=False)
    p.add_argument("--min-total", type=int, default=21)
    p.add_argument("--max-total", type=int, default=322)
    p.add_argument("--points", type=int, default=15)
    p.add_argument("--models-per-point", type=int, default=15)
    p.add_argument("--actions-observed", type=int, default=0)
    p.add_argument("--timing", action="store_true")
    p.add_argument("--svg", default=None)
    p.add_argument("--report", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("oracle-check", help="compare engine with enumeration")
    common(p)
    p.add_argument("--trials", type=int, default=20)
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("session", help="interactive evidence session")
    common(p)
    p.set_defaults(func=cmd_session)

    p = sub.add_parser("freeze", help="emit oracle reference values as JSON")
    common(p)
    p.set_defaults(func=cmd_freeze)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except ValidationFailure as exc:
        sys.stderr.write(f"validation error: {exc}\n")
        return EXIT_VALIDATION
    except (ModelFormatError, KernelError, GenerationError, CountingError) as exc:
        sys.stderr.write(f"validation error: {exc}\n")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
