import itertools
import random

import pytest

from tsbdd.formula import FALSE, TRUE, And, Iff, Implies, Not, Or, Var, Xor
from tsbdd.model import (
    ActionVar,
    CauseVar,
    SystemVar,
    TroubleshootingModel,
    parse_model,
)
from tsbdd.sample import SAMPLE_MODEL_TEXT


@pytest.fixture
def sample_text():
    return SAMPLE_MODEL_TEXT


@pytest.fixture
def sample_model():
    return parse_model(SAMPLE_MODEL_TEXT)


def random_formula(rng, names, depth):
    """Random AST over the given variable names."""
    if depth == 0 or rng.random() < 0.3:
        r = rng.random()
        if r < 0.8:
            return Var(rng.choice(names))
        return TRUE if r < 0.9 else FALSE
    kind = rng.choice(["and", "or", "xor", "not", "imp", "iff"])
    if kind == "not":
        return Not(random_formula(rng, names, depth - 1))
    a = random_formula(rng, names, depth - 1)
    b = random_formula(rng, names, depth - 1)
    if kind == "and":
        return And((a, b))
    if kind == "or":
        return Or((a, b))
    if kind == "xor":
        return Xor((a, b))
    if kind == "imp":
        return Implies(a, b)
    return Iff(a, b)


def random_evidence(rng, names, p=0.2):
    return {name: rng.randint(0, 1) for name in names if rng.random() < p}


def random_ts_model(rng, n_system, n_cause, n_action=0, max_sub=3, max_targets=2):
    """Hand-rolled random model, independent of the package generator, so
    generator bugs cannot mask engine bugs."""
    systems = ["S"] + [f"S{i}" for i in range(1, n_system)]
    children = {s: [] for s in systems}
    for i in range(1, n_system):
        parents = [s for s in systems[:i] if len(children[s]) < max_sub]
        children[rng.choice(parents)].append(systems[i])
    svars = [SystemVar(s, tuple(children[s])) for s in systems]
    non_root = systems[1:] if len(systems) > 1 else systems
    causes = []
    for i in range(n_cause):
        k = rng.randint(1, min(max_targets, len(non_root)))
        causes.append(
            CauseVar(f"C{i + 1}", tuple(rng.sample(non_root, k)), round(rng.uniform(0.05, 0.95), 3))
        )
    leaves = [s for s in systems if not children[s]]
    covered = {t for c in causes for t in c.targets}
    for leaf in leaves:
        if leaf not in covered:
            j = rng.randrange(len(causes))
            c = causes[j]
            causes[j] = CauseVar(c.name, c.targets + (leaf,), c.prior_faulty)
    actions = []
    for i in range(n_action):
        k = rng.randint(1, min(3, len(systems)))
        parents = tuple(rng.sample(systems, k))
        cpt = {
            bits: round(rng.uniform(0.05, 0.95), 3)
            for bits in itertools.product((0, 1), repeat=k)
        }
        actions.append(ActionVar(f"A{i + 1}", parents, cpt))
    return TroubleshootingModel("S", svars, causes, actions)
