"""Seeded random troubleshooting models for benchmarking and testing.

The generation distribution is fixed so runs are reproducible: a uniform
random rooted tree over the system variables with bounded branching,
cause target sets of uniform size drawn from the non-root system
variables (with every leaf covered by at least one cause afterwards),
action parents drawn uniformly, and all probabilities uniform.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .model import ActionVar, CauseVar, SystemVar, TroubleshootingModel


@dataclass(frozen=True)
class GenSpec:
    n_system: int
    n_cause: int
    n_action: int
    max_subsystems_per_node: int = 3
    targets_per_cause: tuple[int, int] = (1, 2)
    max_action_parents: int = 3
    seed: int = 0

    def total_variables(self) -> int:
        return self.n_system + self.n_cause + self.n_action


class GenerationError(ValueError):
    """The spec cannot produce a valid model."""


def generate_model(spec: GenSpec) -> TroubleshootingModel:
    """Deterministic for a given spec; the result always validates."""
    if spec.n_system < 1:
        raise GenerationError("need at least one system variable")
    if spec.n_cause < 1:
        raise GenerationError("need at least one cause variable")
    if spec.n_action < 0:
        raise GenerationError("action count cannot be negative")
    if spec.max_subsystems_per_node < 1:
        raise GenerationError("branching bound must be at least 1")
    lo, hi = spec.targets_per_cause
    if not 1 <= lo <= hi:
        raise GenerationError("targets_per_cause must be a range with 1 <= lo <= hi")
    non_root_count = max(spec.n_system - 1, 1)
    if lo > non_root_count:
        raise GenerationError(
            f"targets_per_cause lower bound {lo} exceeds the {non_root_count} "
            "available target variables"
        )

    rng = random.Random(spec.seed)
    systems = ["S"] + [f"S{i}" for i in range(1, spec.n_system)]
    children: dict[str, list[str]] = {s: [] for s in systems}
    for i in range(1, spec.n_system):
        eligible = [s for s in systems[:i] if len(children[s]) < spec.max_subsystems_per_node]
        children[rng.choice(eligible)].append(systems[i])
    system_vars = [SystemVar(s, tuple(children[s])) for s in systems]

    target_pool = systems[1:] if spec.n_system > 1 else systems
    cause_targets: list[list[str]] = []
    for _ in range(spec.n_cause):
        k = rng.randint(lo, min(hi, len(target_pool)))
        cause_targets.append(rng.sample(target_pool, k))
    leaves = [s for s in systems if not children[s]]
    covered = {t for targets in cause_targets for t in targets}
    for leaf in leaves:
        if leaf not in covered:
            cause_targets[rng.randrange(spec.n_cause)].append(leaf)
    cause_vars = [
        CauseVar(f"C{i + 1}", tuple(targets), round(rng.uniform(0.01, 0.99), 6))
        for i, targets in enumerate(cause_targets)
    ]

    action_vars = []
    for i in range(spec.n_action):
        k = rng.randint(1, min(spec.max_action_parents, spec.n_system))
        parents = tuple(rng.sample(systems, k))
        cpt = {
            bits: round(rng.uniform(0.0, 1.0), 6)
            for bits in itertools.product((0, 1), repeat=k)
        }
        action_vars.append(ActionVar(f"A{i + 1}", parents, cpt))

    return TroubleshootingModel(
        problem_var="S",
        system_vars=system_vars,
        cause_vars=cause_vars,
        action_vars=action_vars,
    )
