import pytest

from tsbdd.generate import GenSpec, GenerationError, generate_model
from tsbdd.kernel import compile_kernel, size_bound
from tsbdd.model import serialize_model, validate


def test_generated_models_validate_across_many_seeds():
    for seed in range(1000):
        spec = GenSpec(
            n_system=2 + seed % 7,
            n_cause=1 + seed % 5,
            n_action=seed % 4,
            seed=seed,
        )
        model = generate_model(spec)
        assert validate(model) == [], seed


def test_same_seed_gives_identical_models():
    spec = GenSpec(n_system=6, n_cause=4, n_action=3, seed=99)
    assert serialize_model(generate_model(spec)) == serialize_model(generate_model(spec))


def test_different_seeds_differ():
    a = generate_model(GenSpec(n_system=6, n_cause=4, n_action=3, seed=1))
    b = generate_model(GenSpec(n_system=6, n_cause=4, n_action=3, seed=2))
    assert serialize_model(a) != serialize_model(b)


def test_branching_bound_respected():
    for seed in range(50):
        model = generate_model(
            GenSpec(n_system=12, n_cause=3, n_action=0, max_subsystems_per_node=2, seed=seed)
        )
        for s in model.system_vars:
            assert len(s.subsystems) <= 2


def test_every_leaf_is_covered():
    for seed in range(50):
        model = generate_model(GenSpec(n_system=8, n_cause=3, n_action=0, seed=seed))
        covered = {t for c in model.cause_vars for t in c.targets}
        for leaf in model.leaves():
            assert leaf in covered


def test_infeasible_specs_rejected():
    with pytest.raises(GenerationError):
        generate_model(GenSpec(n_system=0, n_cause=1, n_action=0))
    with pytest.raises(GenerationError):
        generate_model(GenSpec(n_system=3, n_cause=0, n_action=0))
    with pytest.raises(GenerationError):
        generate_model(GenSpec(n_system=3, n_cause=1, n_action=0, targets_per_cause=(5, 6)))
    with pytest.raises(GenerationError):
        generate_model(GenSpec(n_system=3, n_cause=1, n_action=0, targets_per_cause=(2, 1)))


def test_smallest_suite_size_compiles_within_bound():
    # the smallest benchmark configuration has 21 variables in total
    spec = GenSpec(n_system=8, n_cause=8, n_action=5, seed=7)
    assert spec.total_variables() == 21
    model = generate_model(spec)
    kernel = compile_kernel(model)
    assert kernel.bdd.node_count(kernel.root) <= size_bound(model)
