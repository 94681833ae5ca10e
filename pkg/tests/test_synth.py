"""A* and best-first synthesis plus exact circuit verification.

The heavier optimality and termination properties live in the acceptance
suite; this module covers the mechanics on small instances.
"""

import random

import pytest

from ringsynth.exactlinalg import ExactMatrix
from ringsynth.gates import pad_isometry, standard_gate, v_isometry
from ringsynth.normalize import named_gate_set
from ringsynth.synth import (
    Circuit,
    NoReducingGeneratorError,
    SearchExhaustedError,
    astar_synthesize,
    best_first_synthesize,
    verify_circuit,
)

GS_T1 = named_gate_set("clifford+t", 1)
GS_T2 = named_gate_set("clifford+t", 2)


def test_t_gate_needs_one_generator():
    t = standard_gate("T", 1, (0,), GS_T1.field)
    c = astar_synthesize(t, GS_T1, scale=1)
    assert len(c.labels) == 1
    assert verify_circuit(t, c, GS_T1)


def test_clifford_input_gives_empty_circuit():
    h = standard_gate("Htilde", 2, (0,), GS_T2.field)
    c = astar_synthesize(h, GS_T2, scale=1)
    assert c.labels == [] and c.cost == 0
    assert c.remainder == h
    assert verify_circuit(h, c, GS_T2)


def test_cs_costs_three_t_generators():
    cs = standard_gate("CS", 2, (0, 1), GS_T2.field)
    c = astar_synthesize(cs, GS_T2, scale=1)
    assert len(c.labels) == 3
    assert c.cost == 3 * GS_T2.generators[0].cost
    assert verify_circuit(cs, c, GS_T2)


def test_circuit_orientation_is_remainder_times_generators():
    cs = standard_gate("CS", 2, (0, 1), GS_T2.field)
    c = astar_synthesize(cs, GS_T2, scale=10)
    prod = c.remainder
    for lab in c.labels:
        prod = prod @ GS_T2.by_label(lab).matrix
    assert prod == cs


def test_isometry_orientation_applies_daggers_to_remainder():
    v = v_isometry(1, 1, 1, 0, GS_T2.field)
    c = astar_synthesize(v, GS_T2, scale=10)
    assert len(c.labels) == 4
    prod = c.remainder
    for lab in reversed(c.labels):
        prod = GS_T2.by_label(lab).matrix.dagger() @ prod
    assert prod == v
    assert verify_circuit(v, c, GS_T2)


def test_state_synthesis_single_column():
    f = GS_T2.field
    plus = standard_gate("Htilde", 2, (0,), f) @ standard_gate("Htilde", 2, (1,), f)
    state = (standard_gate("CS", 2, (0, 1), f) @ plus).columns([0])
    c = astar_synthesize(state, GS_T2, scale=1)
    assert len(c.labels) == 3
    assert verify_circuit(state, c, GS_T2)


def test_tampered_circuits_fail_verification():
    cs = standard_gate("CS", 2, (0, 1), GS_T2.field)
    c = astar_synthesize(cs, GS_T2, scale=10)
    dropped = Circuit(c.gateset_id, c.labels[1:], c.remainder, c.cost)
    assert not verify_circuit(cs, dropped, GS_T2)
    wrong_rem = Circuit(c.gateset_id, c.labels,
                        standard_gate("T", 2, (0,), GS_T2.field), c.cost)
    assert not verify_circuit(cs, wrong_rem, GS_T2)
    bad_label = Circuit(c.gateset_id, ["nope"] + c.labels[1:], c.remainder, c.cost)
    with pytest.raises(KeyError):
        verify_circuit(cs, bad_label, GS_T2)


def test_node_cap_raises_search_exhausted():
    cs = standard_gate("CS", 2, (0, 1), GS_T2.field)
    with pytest.raises(SearchExhaustedError) as exc:
        astar_synthesize(cs, GS_T2, scale=1, node_cap=1)
    assert exc.value.best_f is not None


def test_dimension_mismatch_rejected():
    t = standard_gate("T", 1, (0,), GS_T1.field)
    with pytest.raises(ValueError):
        astar_synthesize(t, GS_T2)


def test_best_first_on_clifford_is_empty():
    h = standard_gate("Htilde", 2, (0,), GS_T2.field)
    c = best_first_synthesize(h, GS_T2)
    assert c.labels == [] and c.remainder == h


def test_best_first_resynthesizes_generator_products():
    gs = named_gate_set("clifford+t,tt,ct", 2)
    rng = random.Random(2024)
    for _ in range(5):
        gens = [rng.choice(gs.generators) for _ in range(4)]
        u = gens[0].matrix
        for g in gens[1:]:
            u = u @ g.matrix
        c = best_first_synthesize(u, gs)
        assert verify_circuit(u, c, gs)
        # square-form orientation: remainder times labelled generators
        prod = c.remainder
        for lab in c.labels:
            prod = prod @ gs.by_label(lab).matrix
        assert prod == u


def test_key_digest_partitions_like_vertex_key():
    # the fast digest path and the exact vertex key induce the same
    # partition of search states
    import numpy as np
    from ringsynth.canon import vertex_key_array
    from ringsynth.synth import _key_digest
    f = GS_T2.field
    rng = random.Random(31)
    seen = {}
    for _ in range(60):
        k = rng.randrange(0, 4)
        u = ExactMatrix.identity(f, 4)
        for _ in range(k):
            u = u @ rng.choice(GS_T2.generators).matrix
        red = GS_T2.b_inv @ u @ GS_T2.b
        x = np.array(red.num, dtype=np.int64)
        key = vertex_key_array(x, red.denom_exp, f)
        dig = _key_digest(x, red.denom_exp, f, True)
        assert seen.setdefault(key, dig) == dig
    assert len(set(seen.values())) == len(seen)


def test_best_first_requires_square_input():
    v = v_isometry(1, 1, 1, 0, GS_T2.field)
    with pytest.raises(ValueError):
        best_first_synthesize(v, GS_T2)
