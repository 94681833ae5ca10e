"""Standard gate constructors, basis matrices and the V-gate isometries."""

import pytest

from ringsynth.exactlinalg import ExactMatrix, ExactScalar
from ringsynth.gates import (
    FieldMismatchError,
    basis_matrix,
    embed,
    pad_isometry,
    permutation_unitary,
    standard_gate,
    v_isometry,
)
from ringsynth.numberfield import field_spec


def gate_power(g, k):
    out = g
    for _ in range(k - 1):
        out = out @ g
    return out


def test_single_qubit_gate_orders():
    f = field_spec("Qzeta8")
    ident = ExactMatrix.identity(f, 2)
    t = standard_gate("T", 1, (0,), f)
    s = standard_gate("S", 1, (0,), f)
    assert gate_power(t, 2) == s
    assert gate_power(t, 8) == ident
    assert gate_power(standard_gate("X", 1, (0,), f), 2) == ident


def test_all_gates_are_isometries():
    cases = [
        ("Qzeta8", ["X", "Z", "S", "T", "H", "Htilde", "CX", "CZ", "CS",
                    "CH", "CT", "SWAP"]),
        ("Qzeta16", ["T", "sqrtT", "Htilde", "S"]),
        ("Qi", ["X", "Z", "S", "CX", "CZ", "CS", "CCZ", "CCS"]),
        ("Qsqrt2", ["X", "H", "Sy", "CX", "CZ", "CH"]),
        ("Qcos_pi8", ["X", "H", "Sy", "Ty", "CSy", "CTy"]),
    ]
    for fname, names in cases:
        f = field_spec(fname)
        for name in names:
            k = 3 if name.startswith("CC") else (2 if name[0] == "C" or
                                                 name == "SWAP" else 1)
            g = standard_gate(name, k, tuple(range(k)), f)
            assert g.is_isometry(), (fname, name)


def test_gate_needs_supported_field():
    with pytest.raises(FieldMismatchError):
        standard_gate("T", 1, (0,), field_spec("Qi"))


def test_cs_squares_to_cz_and_ccz_diagonal():
    f = field_spec("Qi")
    cs = standard_gate("CS", 2, (0, 1), f)
    cz = standard_gate("CZ", 2, (0, 1), f)
    assert gate_power(cs, 2) == cz
    ccz = standard_gate("CCZ", 3, (0, 1, 2), f)
    one = ExactScalar(f, f.one)
    minus = ExactScalar(f, f.neg(f.one))
    zero = ExactScalar(f, f.zero)
    for i in range(8):
        for j in range(8):
            if i != j:
                assert ccz.entry(i, j) == zero
        assert ccz.entry(i, i) == (minus if i == 7 else one)


def test_embed_uses_big_endian_targets():
    f = field_spec("Qi")
    # X on qubit 0 of two (big-endian): flips the high bit
    x0 = standard_gate("X", 2, (0,), f)
    one = ExactScalar(f, f.one)
    assert x0.entry(2, 0) == one and x0.entry(0, 2) == one
    # X on qubit 1: flips the low bit
    x1 = standard_gate("X", 2, (1,), f)
    assert x1.entry(1, 0) == one and x1.entry(0, 1) == one
    # CX with control 1, target 0 maps |01> -> |11>
    cx10 = standard_gate("CX", 2, (1, 0), f)
    assert cx10.entry(3, 1) == one


def test_embed_rejects_bad_targets():
    f = field_spec("Qi")
    g = standard_gate("X", 1, (0,), f)
    with pytest.raises(ValueError):
        embed(g, 2, (2,))
    with pytest.raises(ValueError):
        embed(standard_gate("CX", 2, (0, 1), f), 2, (0, 0))


@pytest.mark.parametrize("kind,fnames", [
    ("complex", ["Qi", "Qzeta8", "Qzeta16"]),
    ("real", ["Qsqrt2", "Qcos_pi8"]),
])
def test_basis_matrix_inverse_pairs(kind, fnames):
    for fname in fnames:
        f = field_spec(fname)
        for n in (1, 2):
            b, b_inv = basis_matrix(kind, n, f)
            assert b_inv @ b == ExactMatrix.identity(f, 1 << n)
            assert b @ b_inv == ExactMatrix.identity(f, 1 << n)


def test_pad_isometry_selects_leading_columns():
    f = field_spec("Qi")
    cs = standard_gate("CS", 2, (0, 1), f)
    p = pad_isometry(cs, 1, 2)
    assert (p.rows, p.cols) == (4, 2)
    for i in range(4):
        for j in range(2):
            assert p.entry(i, j) == cs.entry(i, j)
    assert p.is_isometry()


def test_permutation_unitary():
    f = field_spec("Qi")
    sigma = [0, 1, 2, 7, 4, 5, 6, 3]
    m = permutation_unitary(sigma, f)
    one = ExactScalar(f, f.one)
    for j, i in enumerate(sigma):
        assert m.entry(i, j) == one
    assert m.is_isometry()
    with pytest.raises(ValueError):
        permutation_unitary([0, 0, 1], f)


@pytest.mark.parametrize("fname", ["Qi", "Qzeta8"])
@pytest.mark.parametrize("abcd", [(1, 1, 1, 0), (2, 1, 1, 1), (3, 2, 1, 1)])
def test_v_isometries_are_isometries(fname, abcd):
    f = field_spec(fname)
    v = v_isometry(*abcd, f)
    assert (v.rows, v.cols) == (4, 2)
    assert v.is_isometry()


def test_v_isometry_rejects_bad_norm():
    f = field_spec("Qi")
    with pytest.raises(ValueError):
        v_isometry(1, 1, 0, 0, f)  # 2 is not of the form 2^k - 1
