"""Exact model counting on diagrams, with and without evidence and weights.

The propagation sends a value of 2^n from the root toward the terminals,
halving across every arc; the value reaching the 1-terminal is the number
of satisfying configurations over all n order variables.  On fully
reduced diagrams arcs may skip levels.  A skipped level needs no
correction when the variable is free, because the node values carry an
implicit factor of two per untested variable below; a skipped level that
carries evidence admits only one of its two values, so the arc is
multiplied by 1/2 for each such level (and the root value is corrected
the same way for evidence above the root's own level).  Inconsistent
arcs out of a tested evidence variable contribute nothing.

Weighted counting follows the three-part band scheme: propagate normally
above a weight function's variable span, condition on the function's
variables inside the span (one sub-propagation per configuration of all
but the deepest variable, reusing everything computed above the point
where configurations diverge), and inject the weighted values into the
part below.  The value reaching the 1-terminal is then
``sum_w f(w) * Card(w, evidence)``.  Functions whose spans intersect are
first multiplied into one function over the union of their domains.

Operation counting convention (the attribution is fixed here so that
benchmark numbers are reproducible): one division per arc halving, one
multiplication per applied correction factor or weight, one addition per
value accumulated into a node.  Building merged weight tables is not
charged to the propagation counter.
"""

from __future__ import annotations

import itertools
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .robdd import TERM0, TERM1, Robdd, VarOrder

Evidence = Mapping[str, int]


class CountingError(ValueError):
    """Raised for invalid counting inputs (evidence, weights, budgets)."""


@dataclass
class OpCounter:
    """Tally of arithmetic performed by propagations."""

    additions: int = 0
    multiplications: int = 0
    divisions: int = 0

    def total(self) -> int:
        return self.additions + self.multiplications + self.divisions

    def reset(self) -> None:
        self.additions = 0
        self.multiplications = 0
        self.divisions = 0


@dataclass
class NodeValues:
    """Per-node propagation values; the root holds 2^n.

    For weighted propagations, nodes inside a conditioning band carry
    configuration-dependent values and are therefore absent from the map;
    every node outside the bands is present.
    """

    values: dict[int, float]
    root: int

    def value(self, ref: int) -> float:
        return self.values.get(ref, 0.0)

    @property
    def terminal_one(self) -> float:
        return self.values.get(TERM1, 0.0)


@dataclass(frozen=True)
class WeightFunction:
    """A real-valued function over configurations of a variable subset.

    ``table`` maps each configuration tuple (bits in ``variables`` order)
    to a weight.  Weights may be negative; the table must be total.
    """

    variables: tuple[str, ...]
    table: dict[tuple[int, ...], float] = field(hash=False)

    def __post_init__(self):
        if len(set(self.variables)) != len(self.variables):
            raise CountingError("duplicate variable in weight function domain")
        expected = 2 ** len(self.variables)
        if len(self.table) != expected:
            raise CountingError(
                f"weight table has {len(self.table)} entries, expected {expected}"
            )
        for config, w in self.table.items():
            if len(config) != len(self.variables) or any(b not in (0, 1) for b in config):
                raise CountingError(f"bad weight table key {config!r}")
            if w != w or w in (float("inf"), float("-inf")):
                raise CountingError("weight table entries must be finite")

    @classmethod
    def uniform(cls, variables: Sequence[str], weight: float = 1.0) -> "WeightFunction":
        variables = tuple(variables)
        table = {
            bits: weight for bits in itertools.product((0, 1), repeat=len(variables))
        }
        return cls(variables, table)

    def value(self, config: tuple[int, ...]) -> float:
        return self.table[config]

    def total(self) -> float:
        return sum(self.table.values())

    def restricted(self, assignment: Mapping[str, int]) -> "WeightFunction":
        """Pin the overlapping variables to the given assignment and drop them
        from the domain."""
        keep = [i for i, v in enumerate(self.variables) if v not in assignment]
        if len(keep) == len(self.variables):
            return self
        pinned = {
            i: 1 if assignment[v] else 0
            for i, v in enumerate(self.variables)
            if v in assignment
        }
        new_vars = tuple(self.variables[i] for i in keep)
        new_table: dict[tuple[int, ...], float] = {}
        for bits in itertools.product((0, 1), repeat=len(keep)):
            full = [0] * len(self.variables)
            for idx, b in zip(keep, bits):
                full[idx] = b
            for idx, b in pinned.items():
                full[idx] = b
            new_table[bits] = self.table[tuple(full)]
        return WeightFunction(new_vars, new_table)


def _sorted_by_level(order: VarOrder, fn: WeightFunction) -> WeightFunction:
    for v in fn.variables:
        if v not in order:
            raise CountingError(f"weight function variable {v!r} is not in the order")
    ranked = tuple(sorted(fn.variables, key=order.level))
    if ranked == fn.variables:
        return fn
    perm = [fn.variables.index(v) for v in ranked]
    table = {}
    for config, w in fn.table.items():
        table[tuple(config[i] for i in perm)] = w
    return WeightFunction(ranked, table)


def _product(order: VarOrder, f: WeightFunction, g: WeightFunction) -> WeightFunction:
    union = tuple(sorted(set(f.variables) | set(g.variables), key=order.level))
    f_pos = [union.index(v) for v in f.variables]
    g_pos = [union.index(v) for v in g.variables]
    table: dict[tuple[int, ...], float] = {}
    for bits in itertools.product((0, 1), repeat=len(union)):
        fv = f.table[tuple(bits[i] for i in f_pos)]
        gv = g.table[tuple(bits[i] for i in g_pos)]
        table[bits] = fv * gv
    return WeightFunction(union, table)


def merge_overlapping(
    order: VarOrder, fns: Sequence[WeightFunction]
) -> list[WeightFunction]:
    """Multiply together functions whose level spans intersect, until the
    spans are pairwise disjoint; the result is sorted by span."""
    scalars = [f for f in fns if not f.variables]
    ranked = [_sorted_by_level(order, f) for f in fns if f.variables]
    ranked.sort(key=lambda f: order.level(f.variables[0]))
    merged: list[WeightFunction] = []
    for fn in ranked:
        while merged and order.level(fn.variables[0]) <= order.level(
            merged[-1].variables[-1]
        ):
            fn = _sorted_by_level(order, _product(order, merged.pop(), fn))
        merged.append(fn)
    return scalars + merged


def _evidence_levels(order: VarOrder, evidence: Evidence | None) -> dict[int, int]:
    if not evidence:
        return {}
    out: dict[int, int] = {}
    for name, value in evidence.items():
        if name not in order:
            raise CountingError(f"evidence on unregistered variable {name!r}")
        if value not in (0, 1):
            raise CountingError(f"evidence value for {name!r} must be 0 or 1")
        out[order.level(name)] = value
    return out


LiteralWeights = Mapping[str, tuple[float, float]]


def _weight_levels(
    order: VarOrder, weights: LiteralWeights | None
) -> dict[int, tuple[float, float]]:
    if not weights:
        return {}
    out: dict[int, tuple[float, float]] = {}
    for name, (w0, w1) in weights.items():
        if name not in order:
            raise CountingError(f"literal weight on unregistered variable {name!r}")
        out[order.level(name)] = (float(w0), float(w1))
    return out


class _GapTable:
    """Per-arc correction factors for skipped levels.

    A skipped free variable normally contributes an implicit factor of
    two, which the value normalization already carries; a skipped
    evidence variable admits only one value (factor 1/2), and a skipped
    literal-weighted variable contributes half its weight sum (or half
    the weight of its pinned value)."""

    __slots__ = ("ev", "lw", "special")

    def __init__(self, ev: dict[int, int], lw: dict[int, tuple[float, float]]):
        self.ev = ev
        self.lw = lw
        self.special = sorted(set(ev) | set(lw))

    def factor(self, lo: int, hi: int) -> float:
        """Product of corrections for special levels strictly between lo
        and hi; 1.0 when none."""
        start = bisect_right(self.special, lo)
        end = bisect_left(self.special, hi)
        if start == end:
            return 1.0
        f = 1.0
        for idx in range(start, end):
            level = self.special[idx]
            pinned = self.ev.get(level)
            w = self.lw.get(level)
            if w is None:
                f *= 0.5  # evidence-only level: one of two values remains
            elif pinned is None:
                f *= 0.5 * (w[0] + w[1])
            else:
                f *= 0.5 * w[pinned]
        return f

    def arc_weight(self, level: int, b: int) -> float:
        w = self.lw.get(level)
        return 1.0 if w is None else w[b]


class _Band:
    """One conditioning band: a weight function resolved to levels, with
    marginal tables for early exits."""

    __slots__ = ("levels", "lo", "hi", "marg", "total")

    def __init__(self, order: VarOrder, fn: WeightFunction):
        self.levels = tuple(order.level(v) for v in fn.variables)
        self.lo = self.levels[0]
        self.hi = self.levels[-1]
        # marg[prefix] = sum over completions of f(prefix+suffix) / 2^len(suffix)
        marg: dict[tuple[int, ...], float] = dict(fn.table)
        for t in range(len(self.levels) - 1, -1, -1):
            for prefix in itertools.product((0, 1), repeat=t):
                marg[prefix] = 0.5 * (marg[prefix + (0,)] + marg[prefix + (1,)])
        self.marg = marg
        self.total = marg[()]


def weighted_node_values(
    bdd: Robdd,
    fns: Sequence[WeightFunction] = (),
    evidence: Evidence | None = None,
    *,
    literal_weights: LiteralWeights | None = None,
    root: int | None = None,
    ops: OpCounter | None = None,
) -> NodeValues:
    """Top-down propagation with optional evidence, weight functions, and
    per-variable literal weights.

    With no functions this is the plain evidence-conditioned propagation;
    the value at the 1-terminal is the consistent satisfying count.  With
    functions, values at nodes below every band (including the terminal)
    are the weighted sums ``sum_w f(w) * v(node | w, evidence)``.  Literal
    weights multiply every configuration by ``w1`` or ``w0`` per variable
    (free weighted variables contribute the weight sum) and may not fall
    inside a function's span.
    """
    order = bdd.order
    n = len(order)
    start = bdd.root if root is None else root
    bdd._check_ref(start)
    ops = ops if ops is not None else OpCounter()
    ev = _evidence_levels(order, evidence)
    lw = _weight_levels(order, literal_weights)
    gaps = _GapTable(ev, lw)

    merged = merge_overlapping(order, fns)
    scalar = 1.0
    bands: list[_Band] = []
    for fn in merged:
        if not fn.variables:
            scalar *= fn.table[()]
            continue
        band = _Band(order, fn)
        for level in band.levels:
            if level in ev:
                raise CountingError(
                    "weight function domain overlaps the evidence variables"
                )
        for level in range(band.lo, band.hi + 1):
            if level in lw:
                raise CountingError(
                    "literal weights may not fall inside a weight function span"
                )
        bands.append(band)

    internal, _ = bdd._reach(start)
    nodes_by_level: dict[int, list[int]] = {}
    for u in internal:
        nodes_by_level.setdefault(bdd._level[u], []).append(u)

    levels_arr = bdd._level
    lo_arr = bdd._lo
    hi_arr = bdd._hi

    pending: dict[int, float] = {}
    result: dict[int, float] = {}

    def cross_factor(src_level: int, dst_level: int, skip_band: _Band | None) -> float:
        """Correction for everything skipped strictly between two levels:
        evidence and literal-weight corrections, wholly skipped bands, and
        pinned prefixes of a band that the arc lands inside."""
        factor = gaps.factor(src_level, dst_level)
        if factor != 1.0:
            ops.multiplications += 1
        for band in bands:
            if band is skip_band:
                continue
            if src_level < band.lo and band.hi < dst_level:
                factor *= band.total
                ops.multiplications += 1
            elif src_level < band.lo <= dst_level <= band.hi:
                skipped = bisect_left(band.levels, dst_level) - bisect_left(
                    band.levels, src_level + 1
                )
                if skipped:
                    factor *= 0.5**skipped
                    ops.multiplications += 1
        return factor

    # virtual arc into the root: applies corrections for levels above it
    init = float(2**n) * scalar
    init *= cross_factor(0, levels_arr[start], None)
    pending[start] = init

    def plain_sweep(level_from: int, level_to: int) -> None:
        for level in range(level_from, level_to + 1):
            nodes = nodes_by_level.get(level)
            if not nodes:
                continue
            assigned = ev.get(level)
            weights = lw.get(level)
            for u in nodes:
                val = pending.pop(u, 0.0)
                result[u] = val
                if val == 0.0:
                    continue
                for b in (0, 1):
                    if assigned is not None and assigned != b:
                        continue
                    child = hi_arr[u] if b else lo_arr[u]
                    contrib = val * 0.5
                    ops.divisions += 1
                    if weights is not None:
                        contrib *= weights[b]
                        ops.multiplications += 1
                    contrib *= cross_factor(level, levels_arr[child], None)
                    pending[child] = pending.get(child, 0.0) + contrib
                    ops.additions += 1

    def band_sweep(band: _Band) -> None:
        span_levels = [
            level
            for level in range(band.lo, band.hi + 1)
            if nodes_by_level.get(level) or level in band.levels
        ]
        entry: dict[int, float] = {}
        for level in span_levels:
            for u in nodes_by_level.get(level, ()):
                if u in pending:
                    entry[u] = pending.pop(u)
        if not entry:
            # no path enters the band; skipping arcs already carried its weight
            return
        w_levels = band.levels
        last = w_levels[-1]
        w_index = {level: i for i, level in enumerate(w_levels)}

        def process_level(
            idx: int, cur: dict[int, float], prefix: tuple[int, ...]
        ) -> None:
            if idx == len(span_levels):
                return
            level = span_levels[idx]
            if level in w_index and level != last:
                # conditioning variable: branch on both values, reusing
                # everything accumulated above this level
                for b in (0, 1):
                    branch = dict(cur)
                    emit(level, branch, b, prefix + (b,))
                    process_level(idx + 1, branch, prefix + (b,))
                return
            if level == last:
                emit(level, cur, None, prefix)
                process_level(idx + 1, cur, prefix)
                return
            emit(level, cur, ev.get(level), prefix)
            process_level(idx + 1, cur, prefix)

        def emit(
            level: int,
            cur: dict[int, float],
            constraint: int | None,
            prefix: tuple[int, ...],
        ) -> None:
            nodes = nodes_by_level.get(level, ())
            is_last = level == last
            for u in nodes:
                val = entry.get(u, 0.0) + cur.pop(u, 0.0)
                if val == 0.0:
                    continue
                for b in (0, 1):
                    if constraint is not None and constraint != b:
                        continue
                    child = hi_arr[u] if b else lo_arr[u]
                    child_level = levels_arr[child]
                    contrib = val * 0.5
                    ops.divisions += 1
                    if child_level <= band.hi:
                        # stays inside the band
                        gap = gaps.factor(level, child_level)
                        if gap != 1.0:
                            contrib *= gap
                            ops.multiplications += 1
                        skipped = bisect_left(band.levels, child_level) - bisect_left(
                            band.levels, level + 1
                        )
                        if skipped:
                            contrib *= 0.5**skipped
                            ops.multiplications += 1
                        cur[child] = cur.get(child, 0.0) + contrib
                        ops.additions += 1
                    else:
                        # exits the band: weight by the (partial) marginal of
                        # the function given the assigned prefix; only the
                        # deepest function variable extends the prefix here,
                        # conditioning levels already carry their branch bit
                        exit_prefix = prefix + (b,) if is_last else prefix
                        contrib *= band.marg[exit_prefix]
                        ops.multiplications += 1
                        contrib *= cross_factor(level, child_level, band)
                        pending[child] = pending.get(child, 0.0) + contrib
                        ops.additions += 1

        process_level(0, {}, ())

    cursor = 1
    for band in bands:
        if band.lo > cursor:
            plain_sweep(cursor, band.lo - 1)
        band_sweep(band)
        cursor = band.hi + 1
    plain_sweep(cursor, n)

    result[TERM0] = pending.pop(TERM0, 0.0)
    result[TERM1] = pending.pop(TERM1, 0.0)
    assert not pending, "propagation left unconsumed values"
    return NodeValues(values=result, root=start)


def node_values(
    bdd: Robdd,
    evidence: Evidence | None = None,
    *,
    literal_weights: LiteralWeights | None = None,
    root: int | None = None,
    ops: OpCounter | None = None,
) -> NodeValues:
    """Evidence-conditioned propagation values for every reachable node."""
    return weighted_node_values(
        bdd, (), evidence, literal_weights=literal_weights, root=root, ops=ops
    )


def _as_exact_count(value: float) -> int:
    rounded = round(value)
    if abs(value - rounded) >= 1e-6:
        raise CountingError(f"expected an integral count, got {value!r}")
    return int(rounded)


def card_with_evidence(
    bdd: Robdd,
    evidence: Evidence | None = None,
    *,
    root: int | None = None,
    ops: OpCounter | None = None,
) -> int:
    """Number of satisfying configurations consistent with the evidence,
    over all variables of the order."""
    nv = node_values(bdd, evidence, root=root, ops=ops)
    return _as_exact_count(nv.terminal_one)


def card(bdd: Robdd, *, root: int | None = None, ops: OpCounter | None = None) -> int:
    """Number of satisfying configurations over all variables of the order."""
    return card_with_evidence(bdd, None, root=root, ops=ops)


def weighted_card(
    bdd: Robdd,
    fns: Sequence[WeightFunction],
    evidence: Evidence | None = None,
    *,
    root: int | None = None,
    ops: OpCounter | None = None,
) -> float:
    """``sum over configurations w of (prod_k f_k(w_k)) * Card(w, evidence)``
    computed in a single banded propagation."""
    nv = weighted_node_values(bdd, fns, evidence, root=root, ops=ops)
    return nv.terminal_one


def naive_weighted_card(
    bdd: Robdd,
    fns: Sequence[WeightFunction],
    evidence: Evidence | None = None,
    *,
    root: int | None = None,
    ops: OpCounter | None = None,
    configurations: Sequence[Mapping[str, int]] | None = None,
) -> float:
    """Reference implementation: one full conditioned propagation per
    configuration of the union of the function domains.  Exponential in the
    number of weighted variables; used as a cross-check."""
    order = bdd.order
    evidence = dict(evidence or {})
    ranked = [_sorted_by_level(order, f) for f in fns]
    union: list[str] = []
    for fn in ranked:
        for v in fn.variables:
            if v in evidence:
                raise CountingError(
                    "weight function domain overlaps the evidence variables"
                )
            if v not in union:
                union.append(v)
    union.sort(key=order.level)
    if configurations is None:
        configurations = [
            dict(zip(union, bits))
            for bits in itertools.product((0, 1), repeat=len(union))
        ]
    total = 0.0
    ops = ops if ops is not None else OpCounter()
    for config in configurations:
        weight = 1.0
        for fn in ranked:
            weight *= fn.value(tuple(config[v] for v in fn.variables))
            ops.multiplications += 1
        n = card_with_evidence(bdd, {**evidence, **config}, root=root, ops=ops)
        total += weight * n
        ops.multiplications += 1
        ops.additions += 1
    return total
