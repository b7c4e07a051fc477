"""Reduced ordered binary decision diagrams with a hash-consed node table.

The construction style follows Bryant's classic recipe: a unique table
guarantees that no two nodes share (level, lo, hi), redundant tests are
never materialized, and every binary connective is computed by a
memoized ``apply``.  Node references are plain ints scoped to the
``Robdd`` that issued them; ``TERM0`` and ``TERM1`` are the two
terminals.  Levels are 1-based, level 1 is tested first, and terminals
sit at the sentinel level ``n + 1``.

A fully built diagram is immutable and may be read concurrently;
construction (``mk``/``apply``/``build``/``restrict``) mutates the
tables and must stay single-writer.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from .formula import And, Const, Formula, Iff, Implies, Ite, Not, Or, Var, Xor

TERM0 = 0
TERM1 = 1

# op -> result bits indexed by 2*f + g, plus commutativity for memo keys
_OP_TABLES = {
    "and": (0, 0, 0, 1),
    "or": (0, 1, 1, 1),
    "xor": (0, 1, 1, 0),
    "implies": (1, 1, 0, 1),
    "iff": (1, 0, 0, 1),
}
_COMMUTATIVE = {"and", "or", "xor", "iff"}


class VarOrder:
    """A fixed linear variable order: name <-> level (1-based) bijection."""

    __slots__ = ("vars", "index")

    def __init__(self, names: Iterable[str]):
        self.vars = tuple(names)
        self.index = {name: i + 1 for i, name in enumerate(self.vars)}
        if len(self.index) != len(self.vars):
            raise ValueError("duplicate variable name in order")

    def level(self, name: str) -> int:
        try:
            return self.index[name]
        except KeyError:
            raise KeyError(f"variable {name!r} is not registered in the order") from None

    def var(self, level: int) -> str:
        if not 1 <= level <= len(self.vars):
            raise IndexError(f"level {level} out of range 1..{len(self.vars)}")
        return self.vars[level - 1]

    def __len__(self) -> int:
        return len(self.vars)

    def __contains__(self, name: str) -> bool:
        return name in self.index

    def __iter__(self):
        return iter(self.vars)

    def __eq__(self, other):
        return isinstance(other, VarOrder) and self.vars == other.vars

    def __hash__(self):
        return hash(self.vars)

    def __repr__(self):
        return f"VarOrder({list(self.vars)!r})"


class Robdd:
    """Node manager plus a designated root.

    Multiple functions can coexist in one manager (every operation
    returns a node reference); ``root`` marks the function of interest.
    References are only meaningful within the manager that created them.
    """

    def __init__(self, order: VarOrder):
        self.order = order
        n = len(order)
        self._terminal_level = n + 1
        # parallel node arrays; slots 0/1 are the terminals
        self._level: list[int] = [n + 1, n + 1]
        self._lo: list[int] = [TERM0, TERM1]
        self._hi: list[int] = [TERM0, TERM1]
        self._unique: dict[tuple[int, int, int], int] = {}
        self._memo: dict[tuple, int] = {}
        self.root: int = TERM0
        self._reach_cache: dict[int, tuple[list[int], int]] = {}

    # -- structural accessors ------------------------------------------------

    def node_level(self, ref: int) -> int:
        """Level of the tested variable; terminals report n + 1."""
        return self._level[ref]

    def node_children(self, ref: int) -> tuple[int, int]:
        return self._lo[ref], self._hi[ref]

    def is_terminal(self, ref: int) -> bool:
        return ref < 2

    def __len__(self) -> int:
        return len(self._level)

    def _check_ref(self, ref: int) -> None:
        if not isinstance(ref, int) or not 0 <= ref < len(self._level):
            raise ValueError(f"invalid node handle {ref!r}")

    # -- construction ----------------------------------------------------------

    def mk(self, level: int, lo: int, hi: int) -> int:
        """Find-or-create the node (level, lo, hi), applying both reduction rules."""
        if not 1 <= level <= len(self.order):
            raise ValueError(f"level {level} out of range 1..{len(self.order)}")
        self._check_ref(lo)
        self._check_ref(hi)
        if lo == hi:
            return lo
        if level >= self._level[lo] or level >= self._level[hi]:
            raise ValueError("node level must be smaller than both child levels")
        key = (level, lo, hi)
        ref = self._unique.get(key)
        if ref is None:
            ref = len(self._level)
            self._level.append(level)
            self._lo.append(lo)
            self._hi.append(hi)
            self._unique[key] = ref
        return ref

    def literal(self, name: str, value: int = 1) -> int:
        """Node for the variable itself (value=1) or its negation (value=0)."""
        level = self.order.level(name)
        if value:
            return self.mk(level, TERM0, TERM1)
        return self.mk(level, TERM1, TERM0)

    def apply(self, op: str, f: int, g: int) -> int:
        """Canonical diagram of (f op g); memoized per (op, f, g) for the
        manager's lifetime."""
        table = _OP_TABLES.get(op)
        if table is None:
            raise ValueError(f"unknown connective {op!r}")
        self._check_ref(f)
        self._check_ref(g)
        # hot path: everything bound locally, children known valid
        levels = self._level
        lo_arr = self._lo
        hi_arr = self._hi
        unique = self._unique
        memo = self._memo
        commutative = op in _COMMUTATIVE
        is_and = op == "and"
        is_or = op == "or"

        def rec(f: int, g: int) -> int:
            if f < 2 and g < 2:
                return table[2 * f + g]
            if is_and:
                if f == 0 or g == 0:
                    return 0
                if f == 1:
                    return g
                if g == 1:
                    return f
                if f == g:
                    return f
            elif is_or:
                if f == 1 or g == 1:
                    return 1
                if f == 0:
                    return g
                if g == 0:
                    return f
                if f == g:
                    return f
            if commutative and f > g:
                f, g = g, f
            key = (op, f, g)
            cached = memo.get(key)
            if cached is not None:
                return cached
            lf, lg = levels[f], levels[g]
            split = lf if lf < lg else lg
            if lf == split:
                f0, f1 = lo_arr[f], hi_arr[f]
            else:
                f0 = f1 = f
            if lg == split:
                g0, g1 = lo_arr[g], hi_arr[g]
            else:
                g0 = g1 = g
            lo = rec(f0, g0)
            hi = rec(f1, g1)
            if lo == hi:
                result = lo
            else:
                node_key = (split, lo, hi)
                result = unique.get(node_key)
                if result is None:
                    result = len(levels)
                    levels.append(split)
                    lo_arr.append(lo)
                    hi_arr.append(hi)
                    unique[node_key] = result
            memo[key] = result
            return result

        return rec(f, g)

    def negate(self, f: int) -> int:
        self._check_ref(f)
        return self._negate_rec(f)

    def _negate_rec(self, f: int) -> int:
        if f < 2:
            return 1 - f
        key = ("not", f)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        result = self.mk(
            self._level[f], self._negate_rec(self._lo[f]), self._negate_rec(self._hi[f])
        )
        self._memo[key] = result
        return result

    def build(self, formula: Formula) -> int:
        """Convert a formula AST to a node reference in this manager."""
        if isinstance(formula, Var):
            if formula.name not in self.order:
                raise KeyError(f"variable {formula.name!r} is not registered in the order")
            return self.literal(formula.name)
        if isinstance(formula, Const):
            return TERM1 if formula.value else TERM0
        if isinstance(formula, Not):
            return self.negate(self.build(formula.arg))
        if isinstance(formula, (And, Or, Xor)):
            op = {And: "and", Or: "or", Xor: "xor"}[type(formula)]
            if not formula.args:
                # empty conjunction is true, empty disjunction/xor is false
                return TERM1 if op == "and" else TERM0
            acc = self.build(formula.args[0])
            for arg in formula.args[1:]:
                acc = self.apply(op, acc, self.build(arg))
            return acc
        if isinstance(formula, Implies):
            return self.apply(
                "implies", self.build(formula.antecedent), self.build(formula.consequent)
            )
        if isinstance(formula, Iff):
            return self.apply("iff", self.build(formula.left), self.build(formula.right))
        if isinstance(formula, Ite):
            cond = self.build(formula.cond)
            then_part = self.apply("and", cond, self.build(formula.then))
            else_part = self.apply("and", self.negate(cond), self.build(formula.other))
            return self.apply("or", then_part, else_part)
        raise TypeError(f"not a formula node: {formula!r}")

    def restrict(self, var: str, value: int, root: int | None = None) -> int:
        """Diagram of the root with ``var`` substituted by ``value``."""
        ref = self.root if root is None else root
        self._check_ref(ref)
        target = self.order.level(var)
        bit = 1 if value else 0
        memo: dict[int, int] = {}

        def rec(f: int) -> int:
            if self._level[f] > target:
                return f
            cached = memo.get(f)
            if cached is not None:
                return cached
            if self._level[f] == target:
                result = self._hi[f] if bit else self._lo[f]
            else:
                result = self.mk(self._level[f], rec(self._lo[f]), rec(self._hi[f]))
            memo[f] = result
            return result

        return rec(ref)

    def cardinality(self, levels: Sequence[int], at_least: int, at_most: int) -> int:
        """Threshold constraint: the number of true variables among the given
        levels lies in [at_least, at_most].  Builds a layered sub-diagram with
        at most (at_most + 1) nodes per level."""
        levels = sorted(levels)
        if len(set(levels)) != len(levels):
            raise ValueError("duplicate level in cardinality constraint")
        if not 0 <= at_least <= at_most:
            raise ValueError("need 0 <= at_least <= at_most")
        k = len(levels)
        memo: dict[tuple[int, int], int] = {}

        def rec(i: int, count: int) -> int:
            if count > at_most:
                return TERM0
            if count + (k - i) < at_least:
                return TERM0
            if count >= at_least and count + (k - i) <= at_most:
                return TERM1
            key = (i, count)
            cached = memo.get(key)
            if cached is not None:
                return cached
            node = self.mk(levels[i], rec(i + 1, count), rec(i + 1, count + 1))
            memo[key] = node
            return node

        return rec(0, 0)

    # -- inspection ------------------------------------------------------------

    def evaluate(self, assignment: Mapping[str, int], root: int | None = None) -> bool:
        ref = self.root if root is None else root
        while ref >= 2:
            name = self.order.var(self._level[ref])
            ref = self._hi[ref] if assignment[name] else self._lo[ref]
        return ref == TERM1

    def _reach(self, root: int) -> tuple[list[int], int]:
        """Reachable internal nodes sorted by (level, ref), plus the number of
        reachable terminals.  Cached per root; safe because nodes are never
        mutated after creation."""
        cached = self._reach_cache.get(root)
        if cached is not None:
            return cached
        seen: set[int] = set()
        stack = [root]
        terminals: set[int] = set()
        internal: list[int] = []
        while stack:
            ref = stack.pop()
            if ref in seen:
                continue
            seen.add(ref)
            if ref < 2:
                terminals.add(ref)
                continue
            internal.append(ref)
            stack.append(self._lo[ref])
            stack.append(self._hi[ref])
        internal.sort(key=lambda r: (self._level[r], r))
        result = (internal, len(terminals))
        self._reach_cache[root] = result
        return result

    def node_count(self, root: int | None = None) -> int:
        """Reachable internal nodes plus reachable terminals."""
        ref = self.root if root is None else root
        self._check_ref(ref)
        internal, terminals = self._reach(ref)
        return len(internal) + terminals

    def layer(self, level: int, root: int | None = None) -> set[int]:
        """All reachable nodes testing the variable at the given level."""
        ref = self.root if root is None else root
        self._check_ref(ref)
        if not 1 <= level <= len(self.order):
            raise ValueError(f"level {level} out of range 1..{len(self.order)}")
        internal, _ = self._reach(ref)
        return {r for r in internal if self._level[r] == level}

    def check_invariants(self) -> None:
        """Full-table scan asserting the ordered and reduced properties."""
        seen: set[tuple[int, int, int]] = set()
        for ref in range(2, len(self._level)):
            level, lo, hi = self._level[ref], self._lo[ref], self._hi[ref]
            assert lo != hi, f"node {ref} has identical children"
            assert level < self._level[lo], f"node {ref} violates the order on its 0-arc"
            assert level < self._level[hi], f"node {ref} violates the order on its 1-arc"
            key = (level, lo, hi)
            assert key not in seen, f"duplicate node for {key}"
            seen.add(key)

    def to_dot(self, root: int | None = None, name: str = "robdd") -> str:
        """Graphviz dump; 0-arcs are dashed, 1-arcs solid."""
        ref = self.root if root is None else root
        self._check_ref(ref)
        internal, _ = self._reach(ref)
        lines = [f"digraph {name} {{"]
        used_terms = set()
        if ref < 2:
            used_terms.add(ref)
        by_level: dict[int, list[int]] = {}
        for u in internal:
            by_level.setdefault(self._level[u], []).append(u)
            for child in (self._lo[u], self._hi[u]):
                if child < 2:
                    used_terms.add(child)
        for t in sorted(used_terms):
            lines.append(f'  n{t} [shape=box, label="{t}"];')
        for level in sorted(by_level):
            nodes = by_level[level]
            var = self.order.var(level)
            for u in nodes:
                lines.append(f'  n{u} [shape=circle, label="{var}"];')
            ranked = " ".join(f"n{u};" for u in nodes)
            lines.append(f"  {{rank=same; {ranked}}}")
        for u in internal:
            lines.append(f"  n{u} -> n{self._lo[u]} [style=dashed];")
            lines.append(f"  n{u} -> n{self._hi[u]};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def build(formula: Formula, order: VarOrder) -> Robdd:
    """Fresh manager whose root is the canonical diagram of the formula."""
    bdd = Robdd(order)
    bdd.root = bdd.build(formula)
    return bdd
