import itertools
import random

import pytest

from tsbdd.formula import FALSE, TRUE, Const, Var, parse_formula
from tsbdd.robdd import TERM0, TERM1, Robdd, VarOrder, build

from conftest import random_formula

EXACTLY_ONE_3 = "(A1 & !A2 & !A3) | (!A1 & A2 & !A3) | (!A1 & !A2 & A3)"


def all_assignments(names):
    for bits in itertools.product((0, 1), repeat=len(names)):
        yield dict(zip(names, bits))


def test_var_order_bijection():
    order = VarOrder(["x", "y", "z"])
    assert len(order) == 3
    assert order.level("x") == 1 and order.level("z") == 3
    assert order.var(2) == "y"
    assert "y" in order and "w" not in order
    with pytest.raises(ValueError):
        VarOrder(["a", "a"])
    with pytest.raises(KeyError):
        order.level("w")
    with pytest.raises(IndexError):
        order.var(4)


def test_mk_redundant_test_elimination():
    bdd = Robdd(VarOrder(["a"]))
    assert bdd.mk(1, TERM1, TERM1) == TERM1
    assert bdd.mk(1, TERM0, TERM0) == TERM0


def test_mk_hash_consing_returns_identical_ref():
    bdd = Robdd(VarOrder(["a"]))
    first = bdd.mk(1, TERM0, TERM1)
    second = bdd.mk(1, TERM0, TERM1)
    assert first == second


def test_mk_errors():
    bdd = Robdd(VarOrder(["a", "b"]))
    with pytest.raises(ValueError):
        bdd.mk(0, TERM0, TERM1)
    with pytest.raises(ValueError):
        bdd.mk(3, TERM0, TERM1)
    with pytest.raises(ValueError):
        bdd.mk(1, 99, TERM1)
    b = bdd.literal("b")
    with pytest.raises(ValueError):
        bdd.mk(2, b, TERM1)  # child at the same level


def test_exactly_one_of_three_shape():
    order = VarOrder(["A1", "A2", "A3"])
    bdd = build(parse_formula(EXACTLY_ONE_3), order)
    assert len(bdd.layer(1)) == 1
    assert len(bdd.layer(2)) == 2
    assert len(bdd.layer(3)) == 2
    # five internal nodes plus the two terminals
    assert bdd.node_count() == 7


def test_apply_contradiction_and_identity():
    bdd = Robdd(VarOrder(["x"]))
    x = bdd.literal("x")
    assert bdd.apply("and", x, bdd.negate(x)) == TERM0
    assert bdd.apply("or", x, TERM0) == x
    assert bdd.apply("and", x, TERM1) == x
    assert bdd.apply("iff", x, x) == TERM1


def test_apply_xor_shape_and_count():
    bdd = Robdd(VarOrder(["A1", "A2"]))
    r = bdd.apply("xor", bdd.literal("A1"), bdd.literal("A2"))
    bdd.root = r
    assert bdd.node_count() - 2 == 3  # three internal nodes
    sat = sum(
        bdd.evaluate(env) for env in all_assignments(["A1", "A2"])
    )
    assert sat == 2


def test_apply_memoized_on_repeat():
    bdd = Robdd(VarOrder(["a", "b", "c"]))
    f = bdd.apply("or", bdd.literal("a"), bdd.literal("b"))
    g = bdd.apply("and", bdd.literal("b"), bdd.literal("c"))
    first = bdd.apply("and", f, g)
    table_size = len(bdd)
    second = bdd.apply("and", f, g)
    assert first == second
    assert len(bdd) == table_size  # no new nodes on the cached call


def test_apply_unknown_op():
    bdd = Robdd(VarOrder(["a"]))
    with pytest.raises(ValueError):
        bdd.apply("nand", TERM0, TERM1)


def test_build_constants_and_tautology():
    order = VarOrder(["X", "Y"])
    assert build(TRUE, order).root == TERM1
    assert build(FALSE, order).root == TERM0
    taut = parse_formula("(X => Y) <=> (!X | Y)")
    assert build(taut, order).root == TERM1


def test_build_unregistered_variable():
    order = VarOrder(["X"])
    with pytest.raises(KeyError):
        build(Var("Z"), order)


def test_canonicity_equivalent_formulas_share_root():
    rng = random.Random(77)
    names = ["v1", "v2", "v3", "v4"]
    order = VarOrder(names)
    manager = Robdd(order)
    for _ in range(200):
        f = random_formula(rng, names, 4)
        g = random_formula(rng, names, 4)
        equivalent = all(
            f.evaluate(env) == g.evaluate(env) for env in all_assignments(names)
        )
        same_root = manager.build(f) == manager.build(g)
        assert equivalent == same_root


def test_diagram_agrees_with_ast_on_every_assignment():
    rng = random.Random(78)
    names = ["v1", "v2", "v3", "v4", "v5"]
    order = VarOrder(names)
    for _ in range(60):
        f = random_formula(rng, names, 4)
        bdd = build(f, order)
        for env in all_assignments(names):
            assert bdd.evaluate(env) == f.evaluate(env)


def test_restrict_basics():
    order = VarOrder(["X", "Y"])
    bdd = build(Var("X"), order)
    assert bdd.restrict("X", 1) == TERM1
    assert bdd.restrict("X", 0) == TERM0
    # vacuous restriction leaves the function unchanged
    assert bdd.restrict("Y", 1) == bdd.root


def test_restrict_exactly_one():
    order = VarOrder(["A1", "A2", "A3"])
    bdd = build(parse_formula(EXACTLY_ONE_3), order)
    restricted = bdd.restrict("A1", 1)
    expected = bdd.build(parse_formula("!A2 & !A3"))
    assert restricted == expected


def _substitute(formula, name, value):
    from tsbdd.formula import And, Iff, Implies, Ite, Not, Or, Xor

    if isinstance(formula, Var):
        return Const(bool(value)) if formula.name == name else formula
    if isinstance(formula, Const):
        return formula
    if isinstance(formula, Not):
        return Not(_substitute(formula.arg, name, value))
    if isinstance(formula, (And, Or, Xor)):
        return type(formula)(tuple(_substitute(a, name, value) for a in formula.args))
    if isinstance(formula, Implies):
        return Implies(
            _substitute(formula.antecedent, name, value),
            _substitute(formula.consequent, name, value),
        )
    if isinstance(formula, Iff):
        return Iff(
            _substitute(formula.left, name, value), _substitute(formula.right, name, value)
        )
    if isinstance(formula, Ite):
        return Ite(
            _substitute(formula.cond, name, value),
            _substitute(formula.then, name, value),
            _substitute(formula.other, name, value),
        )
    raise TypeError(formula)


def test_restrict_equals_build_of_substituted_formula():
    rng = random.Random(79)
    names = ["v1", "v2", "v3", "v4"]
    order = VarOrder(names)
    for _ in range(80):
        f = random_formula(rng, names, 4)
        name = rng.choice(names)
        bit = rng.randint(0, 1)
        manager = build(f, order)
        restricted = manager.restrict(name, bit)
        substituted = manager.build(_substitute(f, name, bit))
        assert restricted == substituted


def test_restrict_unregistered():
    bdd = build(Var("X"), VarOrder(["X"]))
    with pytest.raises(KeyError):
        bdd.restrict("Q", 1)


def test_node_count_terminal_only():
    assert build(TRUE, VarOrder(["a", "b"])).node_count() == 1


def test_layer_partition_sums_to_node_count():
    rng = random.Random(80)
    names = ["v1", "v2", "v3", "v4", "v5"]
    order = VarOrder(names)
    for _ in range(40):
        bdd = build(random_formula(rng, names, 4), order)
        internal = sum(len(bdd.layer(lv)) for lv in range(1, len(order) + 1))
        assert internal + (bdd.node_count() - internal) == bdd.node_count()
        terminals = bdd.node_count() - internal
        assert terminals in (1, 2)


def test_invariants_hold_after_mixed_operations():
    rng = random.Random(81)
    names = ["v1", "v2", "v3", "v4", "v5", "v6"]
    order = VarOrder(names)
    manager = Robdd(order)
    refs = [manager.build(random_formula(rng, names, 4)) for _ in range(30)]
    for _ in range(60):
        op = rng.choice(["and", "or", "xor", "implies", "iff"])
        refs.append(manager.apply(op, rng.choice(refs), rng.choice(refs)))
    manager.check_invariants()


def test_cardinality_constraint():
    order = VarOrder(["a", "b", "c", "d"])
    bdd = Robdd(order)
    bdd.root = bdd.cardinality([1, 2, 3, 4], 2, 2)
    count = sum(bdd.evaluate(env) for env in all_assignments(["a", "b", "c", "d"]))
    assert count == 6  # 4 choose 2
    with pytest.raises(ValueError):
        bdd.cardinality([1, 1, 2], 1, 1)
    with pytest.raises(ValueError):
        bdd.cardinality([1, 2], 2, 1)


def test_to_dot_conventions():
    order = VarOrder(["A1", "A2", "A3"])
    bdd = build(parse_formula(EXACTLY_ONE_3), order)
    dot = bdd.to_dot()
    assert dot.startswith("digraph")
    assert "style=dashed" in dot  # 0-arcs dashed
    assert 'label="A1"' in dot
    assert 'label="1"' in dot and 'label="0"' in dot


def test_ite_formula_builds():
    order = VarOrder(["c", "t", "e"])
    bdd = build(parse_formula("ite(c, t, e)"), order)
    for env in all_assignments(["c", "t", "e"]):
        assert bdd.evaluate(env) == (env["t"] if env["c"] else env["e"])
