"""Normalized gate sets: closure counts, invariants and the catalogue."""

import pytest

from ringsynth.canon import vertex_key
from ringsynth.exactlinalg import ExactMatrix
from ringsynth.gates import standard_gate
from ringsynth.normalize import (
    InvalidSeedError,
    UnsupportedGateSetError,
    catalogue_seeds,
    cost_zero_generators,
    gate_set_from_generators,
    named_gate_set,
    normalize_gate_set,
)
from ringsynth.numberfield import field_spec


def test_cost_zero_generator_lists():
    f = field_spec("Qzeta8")
    labels1 = [lab for lab, _ in cost_zero_generators("clifford", 1, f)]
    assert labels1 == ["Htilde[0]", "S[0]"]
    labels2 = [lab for lab, _ in cost_zero_generators("clifford", 2, f)]
    assert len(labels2) == 6  # Htilde x2, S x2, CX x2
    fr = field_spec("Qsqrt2")
    labels_r = [lab for lab, _ in cost_zero_generators("real_clifford", 2, fr)]
    assert len(labels_r) == 10  # H, X, Sy on each qubit + CX, CZ both ways
    with pytest.raises(UnsupportedGateSetError):
        cost_zero_generators("pauli", 1, f)


def test_cost_zero_generators_have_nu_zero():
    # every generator reduces to an integral matrix in its basis
    from ringsynth.gates import basis_matrix
    for fname, kind in (("Qzeta8", "clifford"), ("Qsqrt2", "real_clifford")):
        f = field_spec(fname)
        basis = "real" if kind == "real_clifford" else "complex"
        b, b_inv = basis_matrix(basis, 2, f)
        for _, g in cost_zero_generators(kind, 2, f):
            assert (b_inv @ g @ b).denom_exp == 0


def test_normalized_counts_match_lattice_neighbour_numbers():
    assert len(named_gate_set("clifford+t", 1).generators) == 3
    assert len(named_gate_set("clifford+cs", 2).generators) == 15
    assert len(named_gate_set("clifford+ch", 2).generators) == 9


def test_normalized_count_t_seed_two_qubits():
    f = field_spec("Qzeta8")
    seed = standard_gate("T", 2, (0,), f)
    gs = normalize_gate_set([("T", seed)], "clifford", 2, f)
    assert len(gs.generators) == 15


def test_generators_have_distinct_keys_and_positive_nu():
    gs = named_gate_set("clifford+cs", 2)
    keys = {g.key for g in gs.generators}
    assert len(keys) == len(gs.generators)
    assert all(g.reduced.denom_exp > 0 for g in gs.generators)


def test_closure_under_clifford_conjugation():
    gs = named_gate_set("clifford+t", 1)
    keys = {g.key for g in gs.generators}
    for _, c in cost_zero_generators("clifford", 1, gs.field):
        for g in gs.generators:
            conj = c @ g.matrix @ c.dagger()
            assert vertex_key(conj, gs.b_inv, gs.b) in keys


def test_orbit_shares_coords_and_cost():
    gs = named_gate_set("clifford+cs", 2)
    assert len({g.coords.values for g in gs.generators}) == 1
    assert len({g.cost for g in gs.generators}) == 1


def test_renormalizing_is_idempotent():
    gs = named_gate_set("clifford+t", 1)
    again = normalize_gate_set(
        [(g.label, g.matrix) for g in gs.generators[:1]],
        "clifford", 1, gs.field)
    assert {g.key for g in again.generators} == {g.key for g in gs.generators}


def test_cost_zero_seed_rejected():
    f = field_spec("Qzeta8")
    s = standard_gate("S", 1, (0,), f)
    with pytest.raises(InvalidSeedError):
        normalize_gate_set([("S", s)], "clifford", 1, f)


def test_duplicate_seed_rejected():
    f = field_spec("Qzeta8")
    t = standard_gate("T", 1, (0,), f)
    with pytest.raises(InvalidSeedError):
        normalize_gate_set([("T", t), ("T2", t)], "clifford", 1, f)


def test_cost_override_applies_to_whole_orbit():
    f = field_spec("Qzeta8")
    t = standard_gate("T", 1, (0,), f)
    gs = normalize_gate_set([("T", t)], "clifford", 1, f,
                            cost_override={"T": 1})
    assert all(g.cost == 1 for g in gs.generators)


def test_catalogue_bounds_and_unknown_names():
    with pytest.raises(UnsupportedGateSetError):
        named_gate_set("clifford+v", 1)
    with pytest.raises(UnsupportedGateSetError):
        named_gate_set("clifford+cs", 1)  # needs two qubits
    f, kind, seeds = catalogue_seeds("clifford+t", 1)
    assert f.name == "Qzeta8" and kind == "clifford"
    assert [lab for lab, _ in seeds] == ["T"]


def test_gate_set_from_generators_round_trip():
    gs = named_gate_set("clifford+t", 1)
    rebuilt = gate_set_from_generators(
        [(g.label, g.matrix, g.cost) for g in gs.generators],
        gs.cost_zero_kind, gs.n, gs.field, gs.name)
    assert [g.label for g in rebuilt.generators] == \
        [g.label for g in gs.generators]
    assert [g.key for g in rebuilt.generators] == \
        [g.key for g in gs.generators]
    assert [g.cost for g in rebuilt.generators] == \
        [g.cost for g in gs.generators]


def test_by_label_lookup():
    gs = named_gate_set("clifford+t", 1)
    assert gs.by_label("T#0").label == "T#0"
    with pytest.raises(KeyError):
        gs.by_label("nope")
