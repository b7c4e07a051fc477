"""Compile a troubleshooting model into its Boolean kernel diagram.

The kernel constrains the system and cause variables jointly:

* every system variable with subsystems is faulty exactly when its
  subsystem constraint holds (single fault: exactly one subsystem
  faulty; multi-fault modes: at least one),
* a faulty cause breaks exactly one of its targets,
* the problem variable is faulty exactly when the configured number of
  causes is faulty (one, exactly m, or between 1 and m), and ok only in
  the all-ok state.

The variable order puts every system variable before all of its
subsystems (breadth first from the problem variable, ties broken by
declaration order) and all cause variables last, which keeps the
diagram quadratic in the numbers of system and cause variables.  The
conjuncts are applied incrementally: system constraints in order
position, then cause constraints, then the fault-count constraint.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .formula import FALSE, Formula, Var, conjunction, disjunction
from .model import ModelIssue, TroubleshootingModel, validate
from .robdd import TERM1, Robdd, VarOrder


class KernelError(ValueError):
    """Raised for invalid compilation inputs."""

    def __init__(self, message: str, issues: list[ModelIssue] | None = None):
        super().__init__(message)
        self.issues = issues or []


@dataclass(frozen=True)
class FaultMode:
    """Cardinality constraint on simultaneously failed causes."""

    kind: str  # "exactly-one" | "exactly-m" | "at-most-m"
    m: int = 1

    def __post_init__(self):
        if self.kind not in ("exactly-one", "exactly-m", "at-most-m"):
            raise ValueError(f"unknown fault mode {self.kind!r}")
        if self.m < 1:
            raise ValueError("fault count m must be at least 1")

    @classmethod
    def exactly_one(cls) -> "FaultMode":
        return cls("exactly-one", 1)

    @classmethod
    def exactly(cls, m: int) -> "FaultMode":
        return cls("exactly-m", m)

    @classmethod
    def at_most(cls, m: int) -> "FaultMode":
        return cls("at-most-m", m)

    @property
    def single_fault(self) -> bool:
        return self.kind == "exactly-one"

    def cause_range(self) -> tuple[int, int]:
        """(min, max) faulty causes in the device-faulty state."""
        if self.kind == "exactly-one":
            return (1, 1)
        if self.kind == "exactly-m":
            return (self.m, self.m)
        return (1, self.m)

    def __str__(self):
        if self.kind == "exactly-one":
            return "exactly-one"
        return f"{self.kind}={self.m}"


def parse_fault_mode(text: str) -> FaultMode:
    if text == "exactly-one":
        return FaultMode.exactly_one()
    for prefix, ctor in (("exactly-m=", FaultMode.exactly), ("at-most-m=", FaultMode.at_most)):
        if text.startswith(prefix):
            try:
                return ctor(int(text[len(prefix) :]))
            except ValueError as exc:
                raise KernelError(f"bad fault mode {text!r}: {exc}") from None
    raise KernelError(
        f"bad fault mode {text!r}; expected exactly-one, exactly-m=<m> or at-most-m=<m>"
    )


@dataclass
class CompiledKernel:
    bdd: Robdd
    root: int
    order: VarOrder
    mode: FaultMode
    force_problem_faulty: bool
    cause_levels: dict[str, int]


def _require_valid(model: TroubleshootingModel) -> None:
    issues = [i for i in validate(model) if i.severity == "error"]
    if issues:
        raise KernelError(
            "model does not validate: " + "; ".join(i.message for i in issues), issues
        )


def order_variables(model: TroubleshootingModel) -> VarOrder:
    """Breadth-first from the problem variable over the decomposition
    (so parents precede subsystems), then all causes in declaration order."""
    _require_valid(model)
    sub_map = {s.name: s.subsystems for s in model.system_vars}
    ordered: list[str] = []
    seen: set[str] = set()
    queue = [model.problem_var]
    while queue:
        name = queue.pop(0)
        if name in seen:
            continue
        seen.add(name)
        ordered.append(name)
        queue.extend(sub_map[name])
    ordered.extend(model.cause_names())
    return VarOrder(ordered)


def _system_constraint(
    bdd: Robdd, order: VarOrder, parent: str, subsystems: tuple[str, ...]
) -> int:
    """faulty parent <-> exactly one subsystem faulty; ok parent <-> all ok.

    The single-fault rule on system variables applies in every mode; the
    multi-fault relaxation concerns the causes only, so the system layers
    keep their quadratic shape."""
    levels = [order.level(s) for s in subsystems]
    broken = bdd.cardinality(levels, 1, 1)
    all_ok = bdd.cardinality(levels, 0, 0)
    p = bdd.literal(parent)
    return bdd.apply(
        "or", bdd.apply("and", p, broken), bdd.apply("and", bdd.negate(p), all_ok)
    )


def _cause_constraint(bdd: Robdd, order: VarOrder, cause: str, targets: tuple[str, ...]) -> int:
    """faulty cause => exactly one of its targets is faulty."""
    levels = [order.level(t) for t in targets]
    one_target = bdd.cardinality(levels, 1, 1)
    return bdd.apply("implies", bdd.literal(cause), one_target)


def _fault_count_constraint(
    bdd: Robdd, order: VarOrder, model: TroubleshootingModel, mode: FaultMode
) -> int:
    levels = [order.level(c) for c in model.cause_names()]
    lo, hi = mode.cause_range()
    in_range = bdd.cardinality(levels, lo, hi)
    none = bdd.cardinality(levels, 0, 0)
    s = bdd.literal(model.problem_var)
    return bdd.apply(
        "or", bdd.apply("and", s, in_range), bdd.apply("and", bdd.negate(s), none)
    )


def compile_kernel(
    model: TroubleshootingModel,
    mode: FaultMode | None = None,
    force_problem_faulty: bool = True,
) -> CompiledKernel:
    """Build the kernel diagram under the standard order.

    With ``force_problem_faulty`` the problem variable is conjoined in as
    faulty, which removes the all-ok path while keeping it a counted,
    tested variable of the diagram.
    """
    mode = mode or FaultMode.exactly_one()
    _require_valid(model)
    if not mode.single_fault and mode.m > len(model.cause_vars):
        raise KernelError(
            f"fault count m={mode.m} exceeds the number of causes ({len(model.cause_vars)})"
        )
    order = order_variables(model)
    bdd = Robdd(order)
    root = TERM1
    for s in model.system_vars:
        if not s.subsystems:
            continue
        root = bdd.apply("and", root, _system_constraint(bdd, order, s.name, s.subsystems))
    for c in model.cause_vars:
        root = bdd.apply("and", root, _cause_constraint(bdd, order, c.name, c.targets))
    root = bdd.apply("and", root, _fault_count_constraint(bdd, order, model, mode))
    if force_problem_faulty:
        root = bdd.apply("and", root, bdd.literal(model.problem_var))
    bdd.root = root
    cause_levels = {c: order.level(c) for c in model.cause_names()}
    return CompiledKernel(
        bdd=bdd,
        root=root,
        order=order,
        mode=mode,
        force_problem_faulty=force_problem_faulty,
        cause_levels=cause_levels,
    )


def with_problem_forced(kernel: CompiledKernel) -> CompiledKernel:
    """Forced variant sharing the manager; only the designated root differs."""
    if kernel.force_problem_faulty:
        return kernel
    bdd = kernel.bdd
    problem = kernel.order.var(1)
    forced_root = bdd.apply("and", kernel.root, bdd.literal(problem))
    return CompiledKernel(
        bdd=bdd,
        root=forced_root,
        order=kernel.order,
        mode=kernel.mode,
        force_problem_faulty=True,
        cause_levels=dict(kernel.cause_levels),
    )


def size_bound(model: TroubleshootingModel, mode: FaultMode | None = None) -> int:
    """Upper bound on the diagram node count under the standard order:
    a triangular term for the system layers, a mode-dependent term for the
    cause layers, plus the two terminals."""
    mode = mode or FaultMode.exactly_one()
    ns = len(model.system_vars)
    nc = len(model.cause_vars)
    system_part = ns * (ns + 1) // 2
    if mode.single_fault:
        cause_part = nc * nc
    elif mode.kind == "exactly-m":
        cause_part = nc * math.comb(nc, mode.m)
    else:
        cause_part = nc * sum(math.comb(nc, i) for i in range(1, mode.m + 1))
    return system_part + cause_part + 2


def cause_layer_size(kernel: CompiledKernel) -> int:
    """Total number of diagram nodes in the cause layers."""
    return sum(
        len(kernel.bdd.layer(level, kernel.root)) for level in kernel.cause_levels.values()
    )


def _exactly_one_formula(names: tuple[str, ...]) -> Formula:
    terms = []
    for chosen in names:
        parts: list[Formula] = []
        for name in names:
            v: Formula = Var(name)
            parts.append(v if name == chosen else ~v)
        terms.append(conjunction(parts))
    return disjunction(terms)


def _count_in_range_formula(names: tuple[str, ...], lo: int, hi: int) -> Formula:
    if len(names) > 16:
        raise KernelError("cardinality formula expansion limited to 16 variables")
    terms = []
    for k in range(lo, hi + 1):
        for chosen in itertools.combinations(names, k):
            chosen_set = set(chosen)
            parts: list[Formula] = []
            for name in names:
                v: Formula = Var(name)
                parts.append(v if name in chosen_set else ~v)
            terms.append(conjunction(parts))
    if not terms:
        return FALSE
    return disjunction(terms)


def kernel_formula(
    model: TroubleshootingModel,
    mode: FaultMode | None = None,
    force_problem_faulty: bool = True,
) -> Formula:
    """The kernel as an explicit formula (cardinalities expanded), used for
    truth-table cross-checks on small models."""
    mode = mode or FaultMode.exactly_one()
    parts: list[Formula] = []
    for s in model.system_vars:
        if not s.subsystems:
            continue
        t: Formula = Var(s.name)
        broken = _exactly_one_formula(s.subsystems)
        all_ok = conjunction([~Var(x) for x in s.subsystems])
        parts.append((t & broken) | (~t & all_ok))
    for c in model.cause_vars:
        parts.append(Var(c.name).implies(_exactly_one_formula(c.targets)))
    causes = tuple(model.cause_names())
    lo, hi = mode.cause_range()
    s_var: Formula = Var(model.problem_var)
    parts.append(
        (s_var & _count_in_range_formula(causes, lo, hi))
        | (~s_var & conjunction([~Var(c) for c in causes]))
    )
    if force_problem_faulty:
        parts.append(Var(model.problem_var))
    return conjunction(parts)
