"""Interactive evidence-entry loop over one model.

Statements, one per line: ``S3=faulty``, ``A=y``, ``retract S3``,
``show``, ``quit``.  After every statement the current cause table is
printed.  Identical statement sequences produce identical transcripts;
malformed statements print a diagnostic and leave the state unchanged.
"""

from __future__ import annotations

from typing import IO

from .inference import TsEvidence, posteriors
from .kernel import CompiledKernel, FaultMode, compile_kernel
from .model import TroubleshootingModel

_VALUE_WORDS = {
    "faulty": 1,
    "ok": 0,
    "y": 1,
    "yes": 1,
    "n": 0,
    "no": 0,
    "1": 1,
    "0": 0,
    "true": 1,
    "false": 0,
}


class EvidenceParseError(ValueError):
    pass


def parse_assignment(token: str, model: TroubleshootingModel) -> tuple[str, str, int]:
    """``name=value`` -> (kind, name, bit) where kind is kernel or action."""
    if "=" not in token:
        raise EvidenceParseError(f"expected name=value, found {token!r}")
    name, _, raw = token.partition("=")
    name = name.strip()
    raw = raw.strip().lower()
    if raw not in _VALUE_WORDS:
        raise EvidenceParseError(f"unknown value {raw!r} (use faulty/ok, y/n, 1/0)")
    bit = _VALUE_WORDS[raw]
    if name in model.system_names() or name in model.cause_names():
        return ("kernel", name, bit)
    if name in model.action_names():
        return ("action", name, bit)
    raise EvidenceParseError(f"unknown variable {name!r}")


def parse_ts_evidence(text: str, model: TroubleshootingModel) -> TsEvidence:
    """Comma separated assignments, e.g. ``S3=faulty,A=y``."""
    kernel: dict[str, int] = {}
    actions: dict[str, int] = {}
    text = text.strip()
    if text:
        for token in text.split(","):
            kind, name, bit = parse_assignment(token.strip(), model)
            if kind == "kernel":
                kernel[name] = bit
            else:
                actions[name] = bit
    return TsEvidence(kernel=kernel, actions=actions)


def _print_state(
    model: TroubleshootingModel,
    kernel: CompiledKernel,
    evidence: TsEvidence,
    out: IO[str],
    strategy: str,
) -> None:
    result = posteriors(model, kernel, evidence, strategy=strategy)
    width = max((len(c) for c in result.posteriors), default=5)
    out.write(f"{'cause'.ljust(width)}  {'count':>12}  posterior\n")
    for name in model.cause_names():
        out.write(
            f"{name.ljust(width)}  {result.cards[name]:>12g}  {result.posteriors[name]:.6f}\n"
        )
    if not result.consistent:
        out.write("status: inconsistent evidence (zero mass)\n")


def run_session(
    model: TroubleshootingModel,
    in_stream: IO[str],
    out_stream: IO[str],
    *,
    mode: FaultMode | None = None,
    strategy: str = "single-pass",
) -> TsEvidence:
    """Read statements until quit or end of input; returns the final
    evidence state."""
    kernel = compile_kernel(model, mode, force_problem_faulty=True)
    ev_kernel: dict[str, int] = {}
    ev_actions: dict[str, int] = {}
    out_stream.write("enter evidence (name=value), retract <name>, show, quit\n")
    for raw in in_stream:
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        out_stream.write(f"> {line}\n")
        if line == "quit":
            break
        try:
            if line == "show":
                pass
            elif line.startswith("retract"):
                parts = line.split()
                if len(parts) != 2:
                    raise EvidenceParseError("expected: retract <name>")
                name = parts[1]
                if name in ev_kernel:
                    del ev_kernel[name]
                elif name in ev_actions:
                    del ev_actions[name]
                else:
                    raise EvidenceParseError(f"no evidence recorded for {name!r}")
            else:
                kind, name, bit = parse_assignment(line, model)
                if kind == "kernel":
                    ev_kernel[name] = bit
                else:
                    ev_actions[name] = bit
        except EvidenceParseError as exc:
            out_stream.write(f"error: {exc}\n")
            continue
        _print_state(
            model,
            kernel,
            TsEvidence(kernel=dict(ev_kernel), actions=dict(ev_actions)),
            out_stream,
            strategy,
        )
    return TsEvidence(kernel=ev_kernel, actions=ev_actions)
