"""Posterior fault probabilities from a compiled kernel.

For every cause the engine needs the mass of satisfying kernel
configurations in which that cause is faulty, given the evidence.  One
top-down propagation plus one bottom-up completion pass over the
diagram yields these numbers for all causes at once: the mass of cause
``C`` at level ``l`` combines the flow through 1-arcs of ``l``-nodes
(value into the node times consistent completions below its 1-child)
with the ``C = faulty`` share of any arc that skips level ``l``
entirely.

Under the single-fault mode every configuration with ``C_i`` faulty has
all other causes ok, so the prior enters as the constant product
``P(C_i = y) * prod_{k != i} P(C_k = n)`` applied outside the counts.
Multi-fault modes admit configurations whose prior mass differs, so
there the cause priors are pushed into the propagation as literal
weights (faulty arcs weighted by the prior, ok arcs by its complement);
the two treatments coincide exactly in the single-fault case.

Action observations never enter the diagram; an observed action
contributes a weight function ``P(action = obs | parents)`` over its
system parents.  Two interchangeable strategies compute the weighted
masses: a naive expansion (one conditioned propagation per parent
configuration) and the single-pass banded propagation.  They must
agree; a disagreement indicates an implementation bug and raises.
"""

from __future__ import annotations

import itertools
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field

from .counting import (
    CountingError,
    Evidence,
    NodeValues,
    OpCounter,
    WeightFunction,
    _as_exact_count,
    _evidence_levels,
    node_values,
    weighted_node_values,
)
from .kernel import CompiledKernel
from .model import TroubleshootingModel
from .robdd import TERM0, TERM1


class StrategyMismatchError(AssertionError):
    """The naive and single-pass strategies disagreed beyond tolerance."""


@dataclass(frozen=True)
class TsEvidence:
    """Evidence split into kernel assignments and observed action outcomes."""

    kernel: dict[str, int] = field(default_factory=dict)
    actions: dict[str, int] = field(default_factory=dict)

    def is_empty(self) -> bool:
        return not self.kernel and not self.actions


@dataclass
class PosteriorResult:
    posteriors: dict[str, float]
    cards: dict[str, float]
    evidence_probability: float
    consistent: bool


class _CountGaps:
    """Completion-space corrections for levels skipped by an arc: a plain
    free level doubles, an evidence level keeps one value, a weighted level
    contributes its weight sum (or the weight of its pinned value)."""

    __slots__ = ("ev", "lw", "special")

    def __init__(self, ev: dict[int, int], lw: dict[int, tuple[float, float]]):
        self.ev = ev
        self.lw = lw
        self.special = sorted(set(ev) | set(lw))

    def factor(self, lo: int, hi: int) -> float:
        gap = hi - lo - 1
        if gap <= 0:
            return 1.0
        start = bisect_right(self.special, lo)
        end = bisect_left(self.special, hi)
        f = float(2 ** (gap - (end - start)))
        for idx in range(start, end):
            level = self.special[idx]
            pinned = self.ev.get(level)
            w = self.lw.get(level)
            if w is None:
                continue  # evidence keeps one of two values: factor 1
            f *= w[pinned] if pinned is not None else w[0] + w[1]
        return f

    def arc_weight(self, level: int, b: int) -> float:
        w = self.lw.get(level)
        return 1.0 if w is None else w[b]


def _suffix_values(
    kernel: CompiledKernel, gaps: _CountGaps, ops: OpCounter
) -> dict[int, float]:
    """Bottom-up pass: weighted consistent completions from each node to the
    1-terminal over the levels at and below the node."""
    bdd = kernel.bdd
    levels = bdd._level
    lo_arr, hi_arr = bdd._lo, bdd._hi
    internal, _ = bdd._reach(kernel.root)

    suffix: dict[int, float] = {TERM0: 0.0, TERM1: 1.0}
    for u in reversed(internal):
        level = levels[u]
        assigned = gaps.ev.get(level)
        total = 0.0
        for b in (0, 1):
            if assigned is not None and assigned != b:
                continue
            child = hi_arr[u] if b else lo_arr[u]
            t = suffix[child]
            if t:
                w = gaps.arc_weight(level, b)
                if w != 1.0:
                    t *= w
                    ops.multiplications += 1
                g = gaps.factor(level, levels[child])
                if g != 1.0:
                    t *= g
                    ops.multiplications += 1
            total += t
            ops.additions += 1
        suffix[u] = total
    return suffix


def _cause_masses(
    kernel: CompiledKernel,
    top_down: NodeValues,
    ev_levels: dict[int, int],
    ops: OpCounter,
    literal_weights: dict[int, tuple[float, float]] | None = None,
) -> dict[str, float]:
    """Combine a top-down value map with the bottom-up completion counts to
    read off, for every cause, the mass of configurations with that cause
    faulty.  Linear in the diagram size for all causes together."""
    bdd = kernel.bdd
    n = len(kernel.order)
    levels = bdd._level
    lo_arr, hi_arr = bdd._lo, bdd._hi
    internal, _ = bdd._reach(kernel.root)
    gaps = _CountGaps(ev_levels, literal_weights or {})

    suffix = _suffix_values(kernel, gaps, ops)

    # value(u) carries an implicit factor 2 per untested variable at or
    # below u's level; divide it out to get the mass of consistent
    # assignments above u
    def above(u: int) -> float:
        v = top_down.value(u)
        if v == 0.0:
            return 0.0
        ops.multiplications += 1
        return v * 2.0 ** (levels[u] - n - 1)

    # flows of arcs that skip levels, accumulated per skipped level via a
    # difference array so each cause looks up its spanning flow in O(1)
    skip_delta = [0.0] * (n + 3)

    def record_skip(src_level: int, dst_level: int, flow: float) -> None:
        if flow:
            skip_delta[src_level + 1] += flow
            skip_delta[dst_level] -= flow
            ops.additions += 2

    # virtual arc into the root: levels above the root are skipped too
    root_level = levels[kernel.root] if kernel.root >= 2 else n + 1
    if root_level > 1:
        t = suffix.get(kernel.root, 0.0)
        if t:
            flow = t * gaps.factor(0, root_level)
            ops.multiplications += 1
            record_skip(0, root_level, flow)
    for u in internal:
        a = above(u)
        if a == 0.0:
            continue
        level = levels[u]
        assigned = ev_levels.get(level)
        for b in (0, 1):
            if assigned is not None and assigned != b:
                continue
            child = hi_arr[u] if b else lo_arr[u]
            child_level = levels[child]
            if child_level - level <= 1:
                continue
            t = suffix.get(child, 0.0)
            if t == 0.0:
                continue
            flow = a * t * gaps.arc_weight(level, b) * gaps.factor(level, child_level)
            ops.multiplications += 3
            record_skip(level, child_level, flow)
    spanning = [0.0] * (n + 2)
    acc = 0.0
    for lv in range(1, n + 2):
        acc += skip_delta[lv]
        spanning[lv] = acc

    cause_level_set = set(kernel.cause_levels.values())
    nodes_at: dict[int, list[int]] = {level: [] for level in cause_level_set}
    for u in internal:
        level = levels[u]
        if level in cause_level_set:
            nodes_at[level].append(u)

    masses: dict[str, float] = {}
    for cause, level in kernel.cause_levels.items():
        assigned = ev_levels.get(level)
        weights = (literal_weights or {}).get(level)
        mass = 0.0
        if assigned != 0:
            w1 = 1.0 if weights is None else weights[1]
            for u in nodes_at[level]:
                a = above(u)
                if a == 0.0:
                    continue
                child = hi_arr[u]
                t = suffix.get(child, 0.0)
                if t == 0.0:
                    continue
                contrib = a * t * w1
                ops.multiplications += 2
                g = gaps.factor(level, levels[child])
                if g != 1.0:
                    contrib *= g
                    ops.multiplications += 1
                mass += contrib
                ops.additions += 1
        span = spanning[level]
        if span:
            if assigned is None:
                if weights is None:
                    mass += span * 0.5
                    ops.divisions += 1
                else:
                    total_w = weights[0] + weights[1]
                    if total_w:
                        mass += span * (weights[1] / total_w)
                        ops.divisions += 1
                        ops.multiplications += 1
            elif assigned == 1:
                mass += span
            ops.additions += 1
        masses[cause] = mass
    return masses


def cause_counts(
    kernel: CompiledKernel,
    evidence: Evidence | None = None,
    *,
    ops: OpCounter | None = None,
) -> dict[str, int]:
    """For every cause, the number of satisfying kernel configurations with
    that cause faulty, consistent with the evidence.  One propagation plus
    one completion pass serves all causes.  Contradictory evidence yields
    all-zero counts rather than an error."""
    ops = ops if ops is not None else OpCounter()
    ev_levels = _evidence_levels(kernel.order, evidence)
    top_down = node_values(kernel.bdd, evidence, root=kernel.root, ops=ops)
    masses = _cause_masses(kernel, top_down, ev_levels, ops)
    return {name: _as_exact_count(v) for name, v in masses.items()}


def _action_weight_functions(
    model: TroubleshootingModel, observations: dict[str, int], kernel_evidence: Evidence
) -> tuple[list[WeightFunction], float]:
    """One weight function per observed action, with any parents pinned by
    kernel evidence folded in; parent-free remainders collapse to a scalar."""
    fns: list[WeightFunction] = []
    scalar = 1.0
    for name, observed in observations.items():
        try:
            action = model.action(name)
        except KeyError:
            raise CountingError(f"observed action {name!r} is not declared") from None
        if observed not in (0, 1):
            raise CountingError(f"observation for {name!r} must be 0 or 1")
        table = {}
        for bits, p_yes in action.cpt.items():
            table[bits] = p_yes if observed else 1.0 - p_yes
        fn = WeightFunction(action.parents, table).restricted(kernel_evidence)
        if fn.variables:
            fns.append(fn)
        else:
            scalar *= fn.table[()]
    return fns, scalar


def _prior_products(model: TroubleshootingModel) -> dict[str, float]:
    """Single-fault prior split: P(C_i = y) * prod_{k != i} P(C_k = n)."""
    out = {}
    for c in model.cause_vars:
        prod = c.prior_faulty
        for other in model.cause_vars:
            if other.name != c.name:
                prod *= 1.0 - other.prior_faulty
        out[c.name] = prod
    return out


def _prior_literal_weights(
    model: TroubleshootingModel, kernel: CompiledKernel
) -> dict[str, tuple[float, float]]:
    return {
        c.name: (1.0 - c.prior_faulty, c.prior_faulty) for c in model.cause_vars
    }


def _check_fns_above_causes(kernel: CompiledKernel, fns: list[WeightFunction]) -> None:
    if not fns:
        return
    min_cause = min(kernel.cause_levels.values())
    for fn in fns:
        for v in fn.variables:
            if kernel.order.level(v) >= min_cause:
                raise CountingError("weight functions must range over system variables only")


def _masses_single_pass(
    kernel: CompiledKernel,
    fns: list[WeightFunction],
    evidence: Evidence,
    literal_weights: dict[str, tuple[float, float]] | None,
    ops: OpCounter,
) -> tuple[dict[str, float], float]:
    ev_levels = _evidence_levels(kernel.order, evidence)
    _check_fns_above_causes(kernel, fns)
    top_down = weighted_node_values(
        kernel.bdd, fns, evidence, literal_weights=literal_weights, root=kernel.root, ops=ops
    )
    lw_levels = {
        kernel.order.level(name): w for name, w in (literal_weights or {}).items()
    }
    masses = _cause_masses(kernel, top_down, ev_levels, ops, lw_levels or None)
    return masses, top_down.terminal_one


def _masses_naive(
    kernel: CompiledKernel,
    fns: list[WeightFunction],
    evidence: Evidence,
    literal_weights: dict[str, tuple[float, float]] | None,
    ops: OpCounter,
) -> tuple[dict[str, float], float]:
    lw_levels = {
        kernel.order.level(name): w for name, w in (literal_weights or {}).items()
    }
    if not fns:
        ev_levels = _evidence_levels(kernel.order, evidence)
        top_down = node_values(
            kernel.bdd, evidence, literal_weights=literal_weights, root=kernel.root, ops=ops
        )
        masses = _cause_masses(kernel, top_down, ev_levels, ops, lw_levels or None)
        return masses, top_down.terminal_one
    union: list[str] = []
    for fn in fns:
        for v in fn.variables:
            if v not in union:
                union.append(v)
    masses = {name: 0.0 for name in kernel.cause_levels}
    total = 0.0
    for bits in itertools.product((0, 1), repeat=len(union)):
        config = dict(zip(union, bits))
        weight = 1.0
        for fn in fns:
            weight *= fn.value(tuple(config[v] for v in fn.variables))
            ops.multiplications += 1
        combined = {**evidence, **config}
        ev_levels = _evidence_levels(kernel.order, combined)
        top_down = node_values(
            kernel.bdd, combined, literal_weights=literal_weights, root=kernel.root, ops=ops
        )
        total += weight * top_down.terminal_one
        ops.additions += 1
        ops.multiplications += 1
        for name, m in _cause_masses(kernel, top_down, ev_levels, ops, lw_levels or None).items():
            masses[name] += weight * m
            ops.multiplications += 1
            ops.additions += 1
    return masses, total


def posteriors(
    model: TroubleshootingModel,
    kernel: CompiledKernel,
    evidence: TsEvidence | None = None,
    *,
    strategy: str = "both",
    ops: OpCounter | None = None,
    tolerance: float = 1e-9,
) -> PosteriorResult:
    """Posterior fault probability per cause given the evidence.

    ``strategy`` selects how action observations are expanded: "naive"
    (one conditioned propagation per parent configuration), "single-pass"
    (banded weighted propagation), or "both" (run both and verify they
    agree before reporting).  Contradictory evidence is reported through
    ``consistent=False`` with zero masses, never as an error.
    """
    if strategy not in ("naive", "single-pass", "both"):
        raise ValueError(f"unknown strategy {strategy!r}")
    evidence = evidence or TsEvidence()
    ops = ops if ops is not None else OpCounter()
    for name in evidence.kernel:
        if name not in kernel.order:
            raise CountingError(f"evidence variable {name!r} is not a kernel variable")
    fns, scalar = _action_weight_functions(model, evidence.actions, evidence.kernel)

    single_fault = kernel.mode.single_fault
    literal_weights = None if single_fault else _prior_literal_weights(model, kernel)

    masses: dict[str, float] | None = None
    total_mass = 0.0
    if strategy in ("single-pass", "both"):
        masses, total_mass = _masses_single_pass(
            kernel, fns, evidence.kernel, literal_weights, ops
        )
    if strategy in ("naive", "both"):
        naive_ops = ops if strategy == "naive" else OpCounter()
        masses_nv, total_nv = _masses_naive(
            kernel, fns, evidence.kernel, literal_weights, naive_ops
        )
        if strategy == "both":
            assert masses is not None
            for name, a in masses.items():
                b = masses_nv[name]
                if abs(a - b) > tolerance * max(1.0, abs(a), abs(b)):
                    raise StrategyMismatchError(
                        f"strategies disagree on {name!r}: single-pass {a!r}, naive {b!r}"
                    )
            if abs(total_mass - total_nv) > tolerance * max(1.0, abs(total_mass)):
                raise StrategyMismatchError(
                    f"strategies disagree on the total mass: {total_mass!r} vs {total_nv!r}"
                )
        else:
            masses, total_mass = masses_nv, total_nv
    assert masses is not None
    if scalar != 1.0:
        masses = {name: scalar * m for name, m in masses.items()}
        total_mass *= scalar

    if single_fault:
        # every consistent configuration has exactly one faulty cause, so
        # the per-cause masses partition the evidence mass
        prior_products = _prior_products(model)
        unnormalized = {name: prior_products[name] * masses[name] for name in masses}
        total = sum(unnormalized.values())
    else:
        # priors already entered the propagation as literal weights; the
        # fault events overlap, so normalize by the count-once total and
        # let marginals sum to more than one where faults co-occur
        unnormalized = dict(masses)
        total = total_mass
    consistent = total > 0.0
    if consistent:
        post = {name: u / total for name, u in unnormalized.items()}
    else:
        post = {name: 0.0 for name in unnormalized}
    return PosteriorResult(
        posteriors=post,
        cards=dict(masses),
        evidence_probability=total,
        consistent=consistent,
    )


def evidence_probability(
    model: TroubleshootingModel,
    kernel: CompiledKernel,
    evidence: TsEvidence | None = None,
    *,
    strategy: str = "single-pass",
    ops: OpCounter | None = None,
) -> float:
    """Unnormalized evidence mass: the sum over causes of prior-weighted
    counts.  Only ratios of these values are meaningful."""
    return posteriors(model, kernel, evidence, strategy=strategy, ops=ops).evidence_probability
