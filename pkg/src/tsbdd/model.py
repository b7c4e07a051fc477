"""Troubleshooting model structure, validation, and its text format.

A model has three kinds of variables, all binary:

* system variables, one of which is the problem variable ``S``; every
  other system variable reaches ``S`` through the subsystem
  decomposition (``system X subsystems A B`` declares A and B as the
  parts X decomposes into),
* cause variables, each with a set of system targets it can break and a
  prior fault probability,
* action variables, each with system parents and a conditional
  probability table ``P(action = y | parents)``.

The file format is line oriented and human writable; see
``serialize_model`` for the canonical form.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field


class ModelFormatError(ValueError):
    """Raised by the parser; carries a 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class SystemVar:
    name: str
    subsystems: tuple[str, ...] = ()


@dataclass(frozen=True)
class CauseVar:
    name: str
    targets: tuple[str, ...]
    prior_faulty: float


@dataclass(frozen=True)
class ActionVar:
    name: str
    parents: tuple[str, ...]
    cpt: dict[tuple[int, ...], float] = field(hash=False)
    """P(action = y | parents); keys are bit tuples in ``parents`` order."""


@dataclass(frozen=True)
class ModelIssue:
    severity: str  # "error" or "warning"
    code: str
    message: str
    variables: tuple[str, ...] = ()


@dataclass
class TroubleshootingModel:
    problem_var: str
    system_vars: list[SystemVar]
    cause_vars: list[CauseVar]
    action_vars: list[ActionVar]

    def system_names(self) -> list[str]:
        return [s.name for s in self.system_vars]

    def cause_names(self) -> list[str]:
        return [c.name for c in self.cause_vars]

    def action_names(self) -> list[str]:
        return [a.name for a in self.action_vars]

    def system(self, name: str) -> SystemVar:
        for s in self.system_vars:
            if s.name == name:
                return s
        raise KeyError(name)

    def action(self, name: str) -> ActionVar:
        for a in self.action_vars:
            if a.name == name:
                return a
        raise KeyError(name)

    def leaves(self) -> list[str]:
        return [s.name for s in self.system_vars if not s.subsystems]

    def kernel_variable_count(self) -> int:
        return len(self.system_vars) + len(self.cause_vars)


def validate(model: TroubleshootingModel) -> list[ModelIssue]:
    """Check the structural requirements; an empty list means the model is
    usable downstream.  Pure: repeated calls return identical lists."""
    issues: list[ModelIssue] = []

    def error(code: str, message: str, *variables: str) -> None:
        issues.append(ModelIssue("error", code, message, tuple(variables)))

    system = {s.name for s in model.system_vars}
    causes = {c.name for c in model.cause_vars}
    actions = {a.name for a in model.action_vars}

    all_names = (
        [s.name for s in model.system_vars]
        + [c.name for c in model.cause_vars]
        + [a.name for a in model.action_vars]
    )
    for name in sorted({n for n in all_names if all_names.count(n) > 1}):
        error("duplicate-name", f"variable {name!r} declared more than once", name)

    if model.problem_var not in system:
        error(
            "problem-not-declared",
            f"problem variable {model.problem_var!r} is not a declared system variable",
            model.problem_var,
        )

    for s in model.system_vars:
        for sub in s.subsystems:
            if sub in causes:
                error(
                    "cause-has-children",
                    f"cause {sub!r} appears as a subsystem of {s.name!r}; "
                    "causes may only influence targets",
                    sub,
                    s.name,
                )
            elif sub in actions:
                error(
                    "action-has-children",
                    f"action {sub!r} appears as a subsystem of {s.name!r}",
                    sub,
                    s.name,
                )
            elif sub not in system:
                error(
                    "unknown-reference",
                    f"subsystem {sub!r} of {s.name!r} is not declared",
                    sub,
                    s.name,
                )
            if sub == model.problem_var:
                error(
                    "problem-has-children",
                    f"problem variable {sub!r} cannot be a subsystem of {s.name!r}",
                    sub,
                    s.name,
                )
        if len(set(s.subsystems)) != len(s.subsystems):
            error(
                "duplicate-subsystem",
                f"system {s.name!r} lists a subsystem twice",
                s.name,
            )

    # connectivity: every system variable must reach S through the
    # decomposition; walk down from S over subsystem lists
    sub_map = {s.name: s.subsystems for s in model.system_vars}
    reachable: set[str] = set()
    stack = [model.problem_var]
    while stack:
        name = stack.pop()
        if name in reachable or name not in sub_map:
            continue
        reachable.add(name)
        stack.extend(sub_map[name])
    for s in model.system_vars:
        if s.name not in reachable:
            error(
                "disconnected-system",
                f"system variable {s.name!r} has no path to the problem variable",
                s.name,
            )

    # cycle check over the decomposition graph
    state: dict[str, int] = {}

    def dfs(name: str) -> bool:
        state[name] = 1
        for sub in sub_map.get(name, ()):
            if sub not in sub_map:
                continue
            if state.get(sub) == 1:
                return True
            if sub not in state and dfs(sub):
                return True
        state[name] = 2
        return False

    for s in model.system_vars:
        if s.name not in state and dfs(s.name):
            error("subsystem-cycle", "the subsystem decomposition contains a cycle", s.name)
            break

    for c in model.cause_vars:
        if not c.targets:
            error("cause-no-targets", f"cause {c.name!r} has no targets", c.name)
        for t in c.targets:
            if t not in system:
                error(
                    "invalid-target",
                    f"target {t!r} of cause {c.name!r} is not a system variable",
                    c.name,
                    t,
                )
        if len(set(c.targets)) != len(c.targets):
            error("duplicate-target", f"cause {c.name!r} lists a target twice", c.name)
        if not 0.0 <= c.prior_faulty <= 1.0:
            error(
                "prior-out-of-range",
                f"prior of cause {c.name!r} is {c.prior_faulty}, outside [0, 1]",
                c.name,
            )

    for a in model.action_vars:
        for p in a.parents:
            if p not in system:
                error(
                    "invalid-action-parent",
                    f"parent {p!r} of action {a.name!r} is not a system variable",
                    a.name,
                    p,
                )
        if len(set(a.parents)) != len(a.parents):
            error("duplicate-parent", f"action {a.name!r} lists a parent twice", a.name)
        expected = {bits for bits in itertools.product((0, 1), repeat=len(a.parents))}
        if set(a.cpt) != expected:
            error(
                "cpt-incomplete",
                f"action {a.name!r} must have one row per parent configuration",
                a.name,
            )
        for bits, p in a.cpt.items():
            if not 0.0 <= p <= 1.0:
                error(
                    "cpt-out-of-range",
                    f"action {a.name!r} row {bits} has probability {p}, outside [0, 1]",
                    a.name,
                )

    return issues


def _parse_prob(line_no: int, text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ModelFormatError(line_no, f"expected a probability, found {text!r}") from None
    if not 0.0 <= value <= 1.0:
        raise ModelFormatError(line_no, f"probability {value} out of range [0, 1]")
    return value


def parse_model(text: str) -> TroubleshootingModel:
    """Parse model text.  Rejects unknown sections, duplicate names,
    references to undeclared variables, out-of-range probabilities and
    incomplete action tables."""
    problem: str | None = None
    system_vars: list[SystemVar] = []
    cause_rows: list[tuple[int, str, tuple[str, ...], float]] = []
    action_rows: list[tuple[int, str, tuple[str, ...], dict[tuple[int, ...], float]]] = []
    current_action: tuple[int, str, tuple[str, ...], dict[tuple[int, ...], float]] | None = None
    declared: set[str] = set()

    def declare(line_no: int, name: str) -> None:
        if name in declared:
            raise ModelFormatError(line_no, f"duplicate variable {name!r}")
        declared.add(name)

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        keyword = tokens[0]

        if keyword != "row" and current_action is not None:
            action_rows.append(current_action)
            current_action = None

        if keyword == "problem":
            if len(tokens) != 2:
                raise ModelFormatError(line_no, "expected: problem <name>")
            if problem is not None:
                raise ModelFormatError(line_no, "problem variable declared twice")
            problem = tokens[1]
        elif keyword == "system":
            if len(tokens) < 2:
                raise ModelFormatError(line_no, "expected: system <name> [subsystems ...]")
            name = tokens[1]
            declare(line_no, name)
            subsystems: tuple[str, ...] = ()
            if len(tokens) > 2:
                if tokens[2] != "subsystems" or len(tokens) < 4:
                    raise ModelFormatError(
                        line_no, "expected: system <name> subsystems <name>..."
                    )
                subsystems = tuple(tokens[3:])
            system_vars.append(SystemVar(name, subsystems))
        elif keyword == "cause":
            try:
                t_idx = tokens.index("targets")
                p_idx = tokens.index("prior")
            except ValueError:
                raise ModelFormatError(
                    line_no, "expected: cause <name> targets <name>... prior <p>"
                ) from None
            if t_idx != 2 or p_idx != len(tokens) - 2 or p_idx <= t_idx + 1:
                raise ModelFormatError(
                    line_no, "expected: cause <name> targets <name>... prior <p>"
                )
            name = tokens[1]
            declare(line_no, name)
            targets = tuple(tokens[t_idx + 1 : p_idx])
            prior = _parse_prob(line_no, tokens[p_idx + 1])
            cause_rows.append((line_no, name, targets, prior))
        elif keyword == "action":
            if len(tokens) < 4 or tokens[2] != "parents":
                raise ModelFormatError(line_no, "expected: action <name> parents <name>...")
            name = tokens[1]
            declare(line_no, name)
            current_action = (line_no, name, tuple(tokens[3:]), {})
        elif keyword == "row":
            if current_action is None:
                raise ModelFormatError(line_no, "row outside an action declaration")
            _, act_name, parents, cpt = current_action
            if len(tokens) != len(parents) + 3 or tokens[-2] != "p":
                raise ModelFormatError(
                    line_no, f"expected: row {' '.join(p + '=<bit>' for p in parents)} p <value>"
                )
            bits: dict[str, int] = {}
            for tok in tokens[1:-2]:
                if "=" not in tok:
                    raise ModelFormatError(line_no, f"expected <parent>=<bit>, found {tok!r}")
                pname, _, pval = tok.partition("=")
                if pname not in parents:
                    raise ModelFormatError(
                        line_no, f"{pname!r} is not a parent of action {act_name!r}"
                    )
                if pval not in ("0", "1"):
                    raise ModelFormatError(line_no, f"parent value must be 0 or 1, found {pval!r}")
                if pname in bits:
                    raise ModelFormatError(line_no, f"parent {pname!r} assigned twice in row")
                bits[pname] = int(pval)
            if len(bits) != len(parents):
                raise ModelFormatError(line_no, "row does not assign every parent")
            key = tuple(bits[p] for p in parents)
            if key in cpt:
                raise ModelFormatError(line_no, "duplicate row for this configuration")
            cpt[key] = _parse_prob(line_no, tokens[-1])
        else:
            raise ModelFormatError(line_no, f"unknown section {keyword!r}")

    if current_action is not None:
        action_rows.append(current_action)

    if problem is None:
        raise ModelFormatError(0, "missing problem declaration")

    system_names = {s.name for s in system_vars}
    if problem not in system_names:
        raise ModelFormatError(0, f"problem variable {problem!r} is not declared as system")
    for s in system_vars:
        for sub in s.subsystems:
            if sub not in declared:
                raise ModelFormatError(0, f"subsystem {sub!r} of {s.name!r} is not declared")

    cause_vars = []
    for line_no, name, targets, prior in cause_rows:
        for t in targets:
            if t not in system_names:
                raise ModelFormatError(
                    line_no, f"target {t!r} of cause {name!r} is not a declared system variable"
                )
        cause_vars.append(CauseVar(name, targets, prior))

    action_vars = []
    for line_no, name, parents, cpt in action_rows:
        for p in parents:
            if p not in system_names:
                raise ModelFormatError(
                    line_no, f"parent {p!r} of action {name!r} is not a declared system variable"
                )
        if len(cpt) != 2 ** len(parents):
            raise ModelFormatError(line_no, f"incomplete CPT for action {name!r}")
        action_vars.append(ActionVar(name, parents, cpt))

    return TroubleshootingModel(
        problem_var=problem,
        system_vars=system_vars,
        cause_vars=cause_vars,
        action_vars=action_vars,
    )


def _format_prob(p: float) -> str:
    return repr(p) if p != int(p) else str(p)


def serialize_model(model: TroubleshootingModel) -> str:
    """Canonical text form; ``parse_model(serialize_model(m))`` is structurally
    equal to ``m``."""
    lines = [f"problem {model.problem_var}"]
    for s in model.system_vars:
        if s.subsystems:
            lines.append(f"system {s.name} subsystems {' '.join(s.subsystems)}")
        else:
            lines.append(f"system {s.name}")
    for c in model.cause_vars:
        lines.append(
            f"cause {c.name} targets {' '.join(c.targets)} prior {_format_prob(c.prior_faulty)}"
        )
    for a in model.action_vars:
        lines.append(f"action {a.name} parents {' '.join(a.parents)}")
        for bits in sorted(a.cpt, reverse=True):
            cfg = " ".join(f"{p}={b}" for p, b in zip(a.parents, bits))
            lines.append(f"  row {cfg} p {_format_prob(a.cpt[bits])}")
    return "\n".join(lines) + "\n"
