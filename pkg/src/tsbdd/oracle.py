"""Brute-force verification by exhaustive enumeration.

Everything here works directly on formula ASTs and on the model
semantics; none of it touches the diagram or propagation code, so the
results are an independent check of the engine.  Enumeration caps keep
worst-case runs at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .formula import Formula
from .kernel import FaultMode
from .model import TroubleshootingModel
from .robdd import VarOrder

MAX_FORMULA_VARS = 24
MAX_KERNEL_VARS = 16


class OracleBudgetError(ValueError):
    """Enumeration would exceed the configured variable budget."""


def brute_card(formula: Formula, order: VarOrder, evidence: Mapping[str, int] | None = None) -> int:
    """Count satisfying assignments over all order variables, consistent
    with the evidence, by evaluating the AST on every assignment."""
    n = len(order)
    if n > MAX_FORMULA_VARS:
        raise OracleBudgetError(f"{n} variables exceed the enumeration budget of {MAX_FORMULA_VARS}")
    evidence = evidence or {}
    for name in evidence:
        if name not in order:
            raise KeyError(f"evidence on unregistered variable {name!r}")
    names = list(order)
    count = 0
    assignment: dict[str, int] = {}
    for mask in range(2**n):
        ok = True
        for i, name in enumerate(names):
            bit = (mask >> i) & 1
            want = evidence.get(name)
            if want is not None and want != bit:
                ok = False
                break
            assignment[name] = bit
        if ok and formula.evaluate(assignment):
            count += 1
    return count


def kernel_satisfied(
    model: TroubleshootingModel,
    assignment: Mapping[str, int],
    mode: FaultMode | None = None,
    force_problem_faulty: bool = True,
) -> bool:
    """Direct transcription of the kernel semantics from the model: system
    decomposition consistency (exactly one faulty subsystem under a faulty
    parent, in every mode), one broken target per faulty cause, and the
    fault-count rule on the problem variable."""
    lo, hi = (1, 1) if mode is None else mode.cause_range()
    s_faulty = assignment[model.problem_var]
    if force_problem_faulty and not s_faulty:
        return False
    for sv in model.system_vars:
        if not sv.subsystems:
            continue
        broken = sum(assignment[x] for x in sv.subsystems)
        if assignment[sv.name]:
            if broken != 1:
                return False
        elif broken != 0:
            return False
    fault_count = sum(assignment[c.name] for c in model.cause_vars)
    if s_faulty:
        if not lo <= fault_count <= hi:
            return False
    elif fault_count != 0:
        return False
    for c in model.cause_vars:
        if assignment[c.name] and sum(assignment[t] for t in c.targets) != 1:
            return False
    return True


@dataclass
class JointTable:
    """Support of the joint distribution over kernel configurations.

    Only satisfying configurations with positive prior mass appear.  The
    stored mass is the prior product; evidence and action observations are
    applied at query time, so one table serves many queries."""

    variables: tuple[str, ...]
    cause_names: tuple[str, ...]
    entries: dict[tuple[int, ...], float]


@dataclass
class OraclePosteriors:
    posteriors: dict[str, float]
    evidence_mass: float
    consistent: bool


def build_joint(
    model: TroubleshootingModel,
    mode: FaultMode | None = None,
    force_problem_faulty: bool = True,
) -> JointTable:
    n = model.kernel_variable_count()
    if n > MAX_KERNEL_VARS:
        raise OracleBudgetError(f"{n} kernel variables exceed the budget of {MAX_KERNEL_VARS}")
    names = tuple(model.system_names() + model.cause_names())
    priors = {c.name: c.prior_faulty for c in model.cause_vars}
    entries: dict[tuple[int, ...], float] = {}
    assignment: dict[str, int] = {}
    for mask in range(2**n):
        bits = tuple((mask >> i) & 1 for i in range(n))
        for name, bit in zip(names, bits):
            assignment[name] = bit
        if not kernel_satisfied(model, assignment, mode, force_problem_faulty):
            continue
        mass = 1.0
        for cname, prior in priors.items():
            mass *= prior if assignment[cname] else 1.0 - prior
        if mass > 0.0:
            entries[bits] = mass
    return JointTable(variables=names, cause_names=tuple(model.cause_names()), entries=entries)


def query_joint(
    table: JointTable,
    model: TroubleshootingModel,
    kernel_evidence: Mapping[str, int] | None = None,
    action_observations: Mapping[str, int] | None = None,
) -> OraclePosteriors:
    kernel_evidence = kernel_evidence or {}
    action_observations = action_observations or {}
    pos = {name: i for i, name in enumerate(table.variables)}
    for name in kernel_evidence:
        if name not in pos:
            raise KeyError(f"evidence variable {name!r} is not a kernel variable")
    actions = []
    for name, observed in action_observations.items():
        action = model.action(name)
        actions.append((action, 1 if observed else 0))
    total = 0.0
    per_cause = {name: 0.0 for name in table.cause_names}
    for bits, prior_mass in table.entries.items():
        if any(bits[pos[name]] != (1 if v else 0) for name, v in kernel_evidence.items()):
            continue
        mass = prior_mass
        for action, observed in actions:
            p_yes = action.cpt[tuple(bits[pos[p]] for p in action.parents)]
            mass *= p_yes if observed else 1.0 - p_yes
        total += mass
        for name in table.cause_names:
            if bits[pos[name]]:
                per_cause[name] += mass
    consistent = total > 0.0
    if consistent:
        posteriors = {name: per_cause[name] / total for name in per_cause}
    else:
        posteriors = {name: 0.0 for name in per_cause}
    return OraclePosteriors(posteriors=posteriors, evidence_mass=total, consistent=consistent)


def brute_posteriors(
    model: TroubleshootingModel,
    kernel_evidence: Mapping[str, int] | None = None,
    action_observations: Mapping[str, int] | None = None,
    mode: FaultMode | None = None,
    force_problem_faulty: bool = True,
) -> dict[str, float]:
    """Posterior fault probability per cause by full-joint enumeration."""
    table = build_joint(model, mode, force_problem_faulty)
    return query_joint(table, model, kernel_evidence, action_observations).posteriors


def brute_kernel_card(
    model: TroubleshootingModel,
    kernel_evidence: Mapping[str, int] | None = None,
    mode: FaultMode | None = None,
    force_problem_faulty: bool = True,
) -> int:
    """Number of satisfying kernel configurations consistent with the
    evidence, by semantic enumeration."""
    n = model.kernel_variable_count()
    if n > MAX_KERNEL_VARS:
        raise OracleBudgetError(f"{n} kernel variables exceed the budget of {MAX_KERNEL_VARS}")
    kernel_evidence = kernel_evidence or {}
    names = tuple(model.system_names() + model.cause_names())
    count = 0
    assignment: dict[str, int] = {}
    for mask in range(2**n):
        ok = True
        for i, name in enumerate(names):
            bit = (mask >> i) & 1
            want = kernel_evidence.get(name)
            if want is not None and (1 if want else 0) != bit:
                ok = False
                break
            assignment[name] = bit
        if ok and kernel_satisfied(model, assignment, mode, force_problem_faulty):
            count += 1
    return count
