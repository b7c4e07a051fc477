import io

import pytest

from tsbdd.oracle import brute_posteriors
from tsbdd.session import EvidenceParseError, parse_ts_evidence, run_session


def run(model, script):
    out = io.StringIO()
    state = run_session(model, io.StringIO(script), out)
    return out.getvalue(), state


def test_parse_ts_evidence_splits_kinds(sample_model):
    ev = parse_ts_evidence("S3=faulty, A=y, C1=ok", sample_model)
    assert ev.kernel == {"S3": 1, "C1": 0}
    assert ev.actions == {"A": 1}
    assert parse_ts_evidence("", sample_model).is_empty()


def test_parse_ts_evidence_rejects_unknowns(sample_model):
    with pytest.raises(EvidenceParseError):
        parse_ts_evidence("Q=1", sample_model)
    with pytest.raises(EvidenceParseError):
        parse_ts_evidence("S3=maybe", sample_model)


def test_session_leaf_evidence_pins_cause(sample_model):
    output, state = run(sample_model, "S3=faulty\nshow\nquit\n")
    assert "C1" in output and "1.000000" in output
    assert "C2" in output and "0.000000" in output
    assert state.kernel == {"S3": 1}


def test_session_action_matches_oracle(sample_model):
    output, _ = run(sample_model, "A=y\nquit\n")
    want = brute_posteriors(sample_model, {}, {"A": 1})
    for value in want.values():
        assert f"{value:.6f}" in output


def test_session_retract_restores_baseline(sample_model):
    with_retract, state = run(sample_model, "S3=faulty\nretract S3\nquit\n")
    baseline, _ = run(sample_model, "show\nquit\n")
    assert baseline.splitlines()[-3:] == with_retract.splitlines()[-3:]
    assert state.is_empty()


def test_session_malformed_statement_keeps_state(sample_model):
    output, state = run(sample_model, "S3=banana\nwhatever\nretract S9\nquit\n")
    assert output.count("error:") == 3
    assert state.is_empty()


def test_session_transcripts_are_deterministic(sample_model):
    script = "S3=faulty\nA=y\nshow\nretract A\nquit\n"
    first, _ = run(sample_model, script)
    second, _ = run(sample_model, script)
    assert first == second


def test_session_inconsistent_evidence_status(sample_model):
    output, _ = run(sample_model, "S=ok\nquit\n")
    assert "inconsistent evidence" in output


def test_session_ends_on_eof(sample_model):
    output, state = run(sample_model, "S4=faulty\n")
    assert "posterior" in output
    assert state.kernel == {"S4": 1}
