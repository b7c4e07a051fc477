import random

import pytest

from tsbdd.counting import (
    CountingError,
    OpCounter,
    card,
    card_with_evidence,
    node_values,
)
from tsbdd.formula import FALSE, TRUE, Var, parse_formula
from tsbdd.oracle import brute_card
from tsbdd.robdd import TERM1, VarOrder, build

from conftest import random_evidence, random_formula

EXACTLY_ONE_3 = "(A1 & !A2 & !A3) | (!A1 & A2 & !A3) | (!A1 & !A2 & A3)"


@pytest.fixture
def one_of_three():
    return build(parse_formula(EXACTLY_ONE_3), VarOrder(["A1", "A2", "A3"]))


def test_card_of_true_counts_all_configurations():
    assert card(build(TRUE, VarOrder(["a", "b", "c"]))) == 8


def test_card_of_false_is_zero():
    assert card(build(FALSE, VarOrder(["a", "b", "c"]))) == 0


def test_card_exactly_one_of_three(one_of_three):
    assert card(one_of_three) == 3


def test_card_returns_int(one_of_three):
    assert isinstance(card(one_of_three), int)


def test_evidence_forcing_and_partial(one_of_three):
    assert card_with_evidence(one_of_three, {"A1": 1}) == 1
    assert card_with_evidence(one_of_three, {"A1": 0}) == 2
    assert card_with_evidence(one_of_three, {"A1": 0, "A2": 0}) == 1


def test_empty_evidence_equals_card():
    rng = random.Random(11)
    names = ["x1", "x2", "x3", "x4"]
    order = VarOrder(names)
    for _ in range(30):
        bdd = build(random_formula(rng, names, 4), order)
        assert card_with_evidence(bdd, {}) == card(bdd)


def test_evidence_on_skipped_level():
    # the diagram of x1 never tests x2; evidence on x2 must still halve
    order = VarOrder(["x1", "x2"])
    bdd = build(Var("x1"), order)
    assert card(bdd) == 2
    assert card_with_evidence(bdd, {"x2": 1}) == 1
    assert card_with_evidence(bdd, {"x2": 0}) == 1
    assert card_with_evidence(bdd, {"x1": 0}) == 0


def test_evidence_above_the_root():
    # the diagram of x2 has its root below the skipped level of x1
    order = VarOrder(["x1", "x2"])
    bdd = build(Var("x2"), order)
    assert card(bdd) == 2
    assert card_with_evidence(bdd, {"x1": 1}) == 1


def test_evidence_on_constant_diagram():
    bdd = build(TRUE, VarOrder(["a", "b", "c"]))
    assert card_with_evidence(bdd, {"a": 1}) == 4
    assert card_with_evidence(bdd, {"a": 1, "c": 0}) == 2


def test_evidence_errors():
    bdd = build(Var("x1"), VarOrder(["x1"]))
    with pytest.raises(CountingError):
        card_with_evidence(bdd, {"zz": 1})
    with pytest.raises(CountingError):
        card_with_evidence(bdd, {"x1": 2})


def test_oracle_equivalence_random_formulas():
    rng = random.Random(210)
    names = [f"x{i}" for i in range(1, 11)]
    order = VarOrder(names)
    for _ in range(150):
        f = random_formula(rng, names, 5)
        bdd = build(f, order)
        ev = random_evidence(rng, names)
        assert card_with_evidence(bdd, ev) == brute_card(f, order, ev)


def test_node_values_root_and_terminal(one_of_three):
    nv = node_values(one_of_three)
    assert nv.value(one_of_three.root) == 8.0  # 2^3
    assert nv.value(TERM1) == 3.0


def test_node_values_definitional_recomputation():
    # every internal value equals the sum of its parents' halved
    # contributions, corrected for skipped evidence levels
    rng = random.Random(212)
    names = [f"x{i}" for i in range(1, 7)]
    order = VarOrder(names)
    n = len(order)
    for _ in range(40):
        f = random_formula(rng, names, 4)
        bdd = build(f, order)
        ev = random_evidence(rng, names)
        ev_levels = {order.level(k): v for k, v in ev.items()}
        nv = node_values(bdd, ev)
        internal, _ = bdd._reach(bdd.root)
        incoming = {}
        root_level = bdd.node_level(bdd.root)
        init = float(2**n)
        for lv in range(1, root_level):
            if lv in ev_levels:
                init *= 0.5
        incoming[bdd.root] = init
        for u in internal:
            level = bdd.node_level(u)
            val = incoming.get(u, 0.0)
            assert val == pytest.approx(nv.value(u), abs=1e-12)
            assigned = ev_levels.get(level)
            lo, hi = bdd.node_children(u)
            for b, child in ((0, lo), (1, hi)):
                if assigned is not None and assigned != b:
                    continue
                contrib = val / 2
                for lv in range(level + 1, bdd.node_level(child)):
                    if lv in ev_levels:
                        contrib *= 0.5
                incoming[child] = incoming.get(child, 0.0) + contrib
        assert incoming.get(TERM1, 0.0) == pytest.approx(nv.value(TERM1))


def test_unweighted_values_are_dyadic_exact():
    rng = random.Random(213)
    names = [f"x{i}" for i in range(1, 9)]
    order = VarOrder(names)
    for _ in range(40):
        bdd = build(random_formula(rng, names, 4), order)
        ev = random_evidence(rng, names)
        nv = node_values(bdd, ev)
        scale = 2 ** len(names)
        for value in nv.values.values():
            assert value * scale == int(value * scale)  # dyadic rational


def test_op_counter_counts_and_resets():
    order = VarOrder(["a", "b", "c"])
    bdd = build(parse_formula("a | (b & c)"), order)
    ops = OpCounter()
    card(bdd, ops=ops)
    assert ops.divisions > 0 and ops.additions > 0
    total = ops.total()
    assert total == ops.additions + ops.multiplications + ops.divisions
    ops.reset()
    assert ops.total() == 0


def test_op_counts_are_deterministic():
    order = VarOrder(["a", "b", "c", "d"])
    bdd = build(parse_formula("(a ^ b) & (c | d)"), order)
    ops1, ops2 = OpCounter(), OpCounter()
    card_with_evidence(bdd, {"b": 1}, ops=ops1)
    card_with_evidence(bdd, {"b": 1}, ops=ops2)
    assert (ops1.additions, ops1.multiplications, ops1.divisions) == (
        ops2.additions,
        ops2.multiplications,
        ops2.divisions,
    )
