"""Benchmark harness: generate, compile, infer, and record costs.

Each record holds the diagram size of the compiled single-fault-forced
kernel, the analytic size bound, and the arithmetic operation counts of
one full posterior computation.  Output is a stable CSV (generator
parameters in ``#`` header lines) and, on request, a log-scale SVG
scatter of operations against model size.  Timing is off by default so
seeded runs emit byte-identical files; ``timing=True`` fills the
``wall_ns`` column instead of zeros.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from typing import Sequence

from .counting import OpCounter
from .generate import GenSpec, generate_model
from .inference import TsEvidence, posteriors
from .kernel import FaultMode, compile_kernel, size_bound
from .oracle import MAX_KERNEL_VARS

CSV_COLUMNS = "model_id,n_system,n_cause,n_action,mode,nodes,size_bound,adds,muls,divs,wall_ns"


@dataclass
class BenchRecord:
    model_id: str
    n_system: int
    n_cause: int
    n_action: int
    mode: str
    nodes: int
    size_bound: int
    adds: int
    muls: int
    divs: int
    wall_ns: int

    def ops_total(self) -> int:
        return self.adds + self.muls + self.divs

    def csv_row(self) -> str:
        return (
            f"{self.model_id},{self.n_system},{self.n_cause},{self.n_action},"
            f"{self.mode},{self.nodes},{self.size_bound},{self.adds},{self.muls},"
            f"{self.divs},{self.wall_ns}"
        )


def run_benchmark(
    specs: Sequence[GenSpec],
    mode: FaultMode | None = None,
    *,
    actions_observed: int = 0,
    strategy: str = "single-pass",
    timing: bool = False,
) -> list[BenchRecord]:
    """Compile every generated model with the problem variable forced
    faulty, compute all posteriors once, and record sizes and operation
    counts."""
    mode = mode or FaultMode.exactly_one()
    records = []
    for idx, spec in enumerate(specs):
        model = generate_model(spec)
        kernel = compile_kernel(model, mode, force_problem_faulty=True)
        obs_rng = random.Random(spec.seed ^ 0x5EED)
        observed: dict[str, int] = {}
        if actions_observed and model.action_vars:
            names = obs_rng.sample(
                model.action_names(), min(actions_observed, len(model.action_vars))
            )
            observed = {name: obs_rng.randint(0, 1) for name in names}
        ops = OpCounter()
        started = time.perf_counter_ns()
        posteriors(model, kernel, TsEvidence(actions=observed), strategy=strategy, ops=ops)
        elapsed = time.perf_counter_ns() - started
        records.append(
            BenchRecord(
                model_id=f"m{idx:04d}-seed{spec.seed}",
                n_system=spec.n_system,
                n_cause=spec.n_cause,
                n_action=spec.n_action,
                mode=str(mode),
                nodes=kernel.bdd.node_count(kernel.root),
                size_bound=size_bound(model, mode),
                adds=ops.additions,
                muls=ops.multiplications,
                divs=ops.divisions,
                wall_ns=elapsed if timing else 0,
            )
        )
    return records


def sweep_suite(
    *,
    min_total: int = 21,
    max_total: int = 322,
    points: int = 15,
    models_per_point: int = 15,
    base_seed: int = 1,
    max_kernel_vars: int | None = None,
) -> list[GenSpec]:
    """Model suite sweeping the total variable count over evenly spaced
    points, several system/cause/action splits per point, a fixed number of
    seeded models each."""
    splits = ((0.40, 0.40, 0.20), (0.50, 0.30, 0.20), (0.35, 0.45, 0.20))
    specs = []
    seed = base_seed
    for p in range(points):
        if points == 1:
            total = min_total
        else:
            total = round(min_total + (max_total - min_total) * p / (points - 1))
        for j in range(models_per_point):
            fs, fc, _ = splits[j % len(splits)]
            n_system = max(2, round(total * fs))
            n_cause = max(1, round(total * fc))
            if max_kernel_vars is not None:
                while n_system + n_cause > max_kernel_vars and n_cause > 1:
                    n_cause -= 1
                while n_system + n_cause > max_kernel_vars and n_system > 2:
                    n_system -= 1
            n_action = max(1, total - n_system - n_cause)
            specs.append(
                GenSpec(n_system=n_system, n_cause=n_cause, n_action=n_action, seed=seed)
            )
            seed += 1
    return specs


def oracle_suite(count: int = 200, base_seed: int = 100) -> list[GenSpec]:
    """Small models within the oracle's enumeration budget."""
    rng = random.Random(base_seed)
    specs = []
    for i in range(count):
        n_system = rng.randint(2, 8)
        n_cause = rng.randint(1, min(6, MAX_KERNEL_VARS - n_system))
        n_action = rng.randint(1, 3)
        specs.append(
            GenSpec(n_system=n_system, n_cause=n_cause, n_action=n_action, seed=base_seed + i)
        )
    return specs


def records_to_csv(records: Sequence[BenchRecord], header_params: dict | None = None) -> str:
    lines = ["# generator: uniform rooted tree, uniform targets, uniform CPTs"]
    for key in sorted(header_params or {}):
        lines.append(f"# {key}={header_params[key]}")
    lines.append(CSV_COLUMNS)
    lines.extend(r.csv_row() for r in records)
    return "\n".join(lines) + "\n"


def parse_csv(text: str) -> list[BenchRecord]:
    records = []
    for line in text.splitlines():
        if not line or line.startswith("#") or line.startswith("model_id"):
            continue
        parts = line.split(",")
        records.append(
            BenchRecord(
                model_id=parts[0],
                n_system=int(parts[1]),
                n_cause=int(parts[2]),
                n_action=int(parts[3]),
                mode=parts[4],
                nodes=int(parts[5]),
                size_bound=int(parts[6]),
                adds=int(parts[7]),
                muls=int(parts[8]),
                divs=int(parts[9]),
                wall_ns=int(parts[10]),
            )
        )
    return records


def fit_power_law(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float]:
    """Least squares of log y against log x; returns (scale, exponent)."""
    pairs = [(x, y) for x, y in zip(xs, ys) if x > 0 and y > 0]
    if len(pairs) < 2:
        raise ValueError("need at least two positive points")
    lx = [math.log(x) for x, _ in pairs]
    ly = [math.log(y) for _, y in pairs]
    mx = sum(lx) / len(lx)
    my = sum(ly) / len(ly)
    sxx = sum((v - mx) ** 2 for v in lx)
    sxy = sum((a - mx) * (b - my) for a, b in zip(lx, ly))
    slope = sxy / sxx
    return math.exp(my - slope * mx), slope


def linear_r2(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Coefficient of determination of the least-squares line y ~ a + b x."""
    n = len(xs)
    if n < 2:
        raise ValueError("need at least two points")
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    syy = sum((y - my) ** 2 for y in ys)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    if sxx == 0 or syy == 0:
        return 1.0
    return (sxy * sxy) / (sxx * syy)


def svg_scatter(
    points: Sequence[tuple[float, float]],
    *,
    title: str = "operations vs variables",
    x_label: str = "total variables",
    y_label: str = "operations",
    width: int = 640,
    height: int = 440,
) -> str:
    """Minimal static scatter with a logarithmic y axis."""
    margin = 56
    xs = [p[0] for p in points]
    ys = [max(p[1], 1.0) for p in points]
    x_lo, x_hi = min(xs), max(xs)
    if x_hi == x_lo:
        x_hi = x_lo + 1
    ly = [math.log10(y) for y in ys]
    y_lo, y_hi = math.floor(min(ly)), math.ceil(max(ly))
    if y_hi == y_lo:
        y_hi = y_lo + 1

    def px(x: float) -> float:
        return margin + (x - x_lo) / (x_hi - x_lo) * (width - 2 * margin)

    def py(y: float) -> float:
        return height - margin - (math.log10(max(y, 1.0)) - y_lo) / (y_hi - y_lo) * (
            height - 2 * margin
        )

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.0f}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>',
        f'<text x="{width / 2:.0f}" y="{height - 12}" text-anchor="middle" '
        f'font-size="12">{x_label}</text>',
        f'<text x="16" y="{height / 2:.0f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 16 {height / 2:.0f})">{y_label} (log scale)</text>',
    ]
    for exp in range(y_lo, y_hi + 1):
        y = py(10.0**exp)
        parts.append(
            f'<line x1="{margin}" y1="{y:.1f}" x2="{width - margin}" y2="{y:.1f}" '
            'stroke="#cccccc" stroke-dasharray="3,3"/>'
        )
        parts.append(
            f'<text x="{margin - 6}" y="{y + 4:.1f}" text-anchor="end" '
            f'font-size="10">1e{exp}</text>'
        )
    for tick in range(5):
        x_val = x_lo + (x_hi - x_lo) * tick / 4
        x = px(x_val)
        parts.append(
            f'<text x="{x:.1f}" y="{height - margin + 16}" text-anchor="middle" '
            f'font-size="10">{x_val:.0f}</text>'
        )
    for x, y in points:
        parts.append(f'<circle cx="{px(x):.1f}" cy="{py(y):.1f}" r="3" fill="#1f6fb2"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
