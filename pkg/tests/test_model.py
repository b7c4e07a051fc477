import pytest

from tsbdd.model import (
    ActionVar,
    CauseVar,
    ModelFormatError,
    SystemVar,
    TroubleshootingModel,
    parse_model,
    serialize_model,
    validate,
)


def test_parse_sample_model(sample_model):
    assert sample_model.problem_var == "S"
    assert sample_model.system_names() == ["S", "S1", "S2", "S3", "S4"]
    assert sample_model.cause_names() == ["C1", "C2"]
    assert sample_model.system("S").subsystems == ("S1", "S2")
    assert sample_model.system("S1").subsystems == ("S3", "S4")
    a = sample_model.action("A")
    assert a.parents == ("S2", "S4")
    assert a.cpt[(1, 1)] == 0.3
    assert a.cpt[(0, 0)] == 0.4
    assert sample_model.leaves() == ["S2", "S3", "S4"]


def test_sample_model_validates(sample_model):
    assert validate(sample_model) == []


def test_validate_is_pure(sample_model):
    assert validate(sample_model) == validate(sample_model)


def test_round_trip(sample_model):
    text = serialize_model(sample_model)
    again = parse_model(text)
    assert again == sample_model
    assert serialize_model(again) == text


def test_round_trip_odd_probabilities():
    model = TroubleshootingModel(
        problem_var="S",
        system_vars=[SystemVar("S", ("S1",)), SystemVar("S1", ())],
        cause_vars=[CauseVar("C1", ("S1",), 0.123456)],
        action_vars=[ActionVar("A", ("S1",), {(0,): 0.0, (1,): 1.0})],
    )
    assert parse_model(serialize_model(model)) == model


def test_parse_comments_and_blank_lines():
    text = """
# a comment
problem S

system S subsystems S1  # trailing comment
system S1
cause C1 targets S1 prior 0.5
"""
    model = parse_model(text)
    assert model.system("S").subsystems == ("S1",)


def test_parse_prior_out_of_range():
    text = "problem S\nsystem S subsystems S1\nsystem S1\ncause C1 targets S1 prior 1.3\n"
    with pytest.raises(ModelFormatError, match="out of range"):
        parse_model(text)


def test_parse_incomplete_cpt():
    text = (
        "problem S\nsystem S subsystems S1\nsystem S1\n"
        "cause C1 targets S1 prior 0.5\n"
        "action A parents S1\n  row S1=1 p 0.5\n"
    )
    with pytest.raises(ModelFormatError, match="incomplete CPT"):
        parse_model(text)


def test_parse_duplicate_name():
    text = "problem S\nsystem S\nsystem S\ncause C1 targets S prior 0.5\n"
    with pytest.raises(ModelFormatError, match="duplicate"):
        parse_model(text)


def test_parse_undeclared_reference():
    text = "problem S\nsystem S subsystems S9\ncause C1 targets S prior 0.5\n"
    with pytest.raises(ModelFormatError, match="not declared"):
        parse_model(text)


def test_parse_unknown_section():
    with pytest.raises(ModelFormatError, match="unknown section"):
        parse_model("problem S\nsystem S\nwidget W\n")


def test_parse_error_carries_line_number():
    text = "problem S\nsystem S subsystems S1\nsystem S1\ncause C1 targets S1 prior 2.0\n"
    with pytest.raises(ModelFormatError) as info:
        parse_model(text)
    assert info.value.line_no == 4


def test_parse_row_outside_action():
    with pytest.raises(ModelFormatError, match="row outside"):
        parse_model("problem S\nsystem S\n  row S=1 p 0.4\n")


def test_validate_cause_as_subsystem():
    model = TroubleshootingModel(
        problem_var="S",
        system_vars=[SystemVar("S", ("C1",)), SystemVar("S1", ())],
        cause_vars=[CauseVar("C1", ("S1",), 0.5)],
        action_vars=[],
    )
    codes = {i.code for i in validate(model)}
    assert "cause-has-children" in codes


def test_validate_disconnected_system():
    model = TroubleshootingModel(
        problem_var="S",
        system_vars=[SystemVar("S", ()), SystemVar("S1", ())],
        cause_vars=[CauseVar("C1", ("S",), 0.5)],
        action_vars=[],
    )
    codes = {i.code for i in validate(model)}
    assert "disconnected-system" in codes


def test_validate_problem_with_children():
    model = TroubleshootingModel(
        problem_var="S",
        system_vars=[SystemVar("S", ("S1",)), SystemVar("S1", ("S",))],
        cause_vars=[CauseVar("C1", ("S1",), 0.5)],
        action_vars=[],
    )
    codes = {i.code for i in validate(model)}
    assert "problem-has-children" in codes
    assert "subsystem-cycle" in codes


def test_validate_prior_and_cpt_ranges():
    model = TroubleshootingModel(
        problem_var="S",
        system_vars=[SystemVar("S", ("S1",)), SystemVar("S1", ())],
        cause_vars=[CauseVar("C1", ("S1",), 1.5)],
        action_vars=[ActionVar("A", ("S1",), {(0,): -0.1, (1,): 0.5})],
    )
    codes = {i.code for i in validate(model)}
    assert "prior-out-of-range" in codes
    assert "cpt-out-of-range" in codes


def test_validate_cause_without_targets():
    model = TroubleshootingModel(
        problem_var="S",
        system_vars=[SystemVar("S", ())],
        cause_vars=[CauseVar("C1", (), 0.5)],
        action_vars=[],
    )
    codes = {i.code for i in validate(model)}
    assert "cause-no-targets" in codes


def test_validate_incomplete_cpt_structurally():
    model = TroubleshootingModel(
        problem_var="S",
        system_vars=[SystemVar("S", ())],
        cause_vars=[CauseVar("C1", ("S",), 0.5)],
        action_vars=[ActionVar("A", ("S",), {(0,): 0.5})],
    )
    codes = {i.code for i in validate(model)}
    assert "cpt-incomplete" in codes


def test_validate_duplicate_names_across_kinds():
    model = TroubleshootingModel(
        problem_var="S",
        system_vars=[SystemVar("S", ()), SystemVar("X", ())],
        cause_vars=[CauseVar("X", ("S",), 0.5)],
        action_vars=[],
    )
    codes = {i.code for i in validate(model)}
    assert "duplicate-name" in codes
