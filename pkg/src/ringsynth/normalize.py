"""Normalized gate sets: closure of seed generators under conjugation by
the cost-zero (Clifford) group, deduplicated by canonical vertex key.

A normalized set has one generator per problem-graph edge direction, so
search neighbor generation never enumerates cosets at runtime.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field as dc_field

import numpy as np

from .canon import Coords, VertexKey, coords_of_reduced_unitary, heuristic_value, \
    vertex_key_of_reduced
from .exactlinalg import ExactMatrix
from .gates import basis_matrix, standard_gate
from .numberfield import FieldSpec, field_spec, z_of_matrix


class InvalidSeedError(ValueError):
    """Seed generator is cost-zero or duplicates another seed."""


class UnsupportedGateSetError(ValueError):
    pass


COST_ZERO_KINDS = ("clifford", "real_clifford")


def cost_zero_generators(kind, n, f: FieldSpec):
    """Labelled generators of the cost-zero group on n qubits."""
    if kind not in COST_ZERO_KINDS:
        raise UnsupportedGateSetError(f"unknown cost-zero kind {kind!r}")
    out = []
    if kind == "clifford":
        singles = ("Htilde", "S")
        pairs = ("CX",)
    else:
        singles = ("H", "X", "Sy")
        pairs = ("CX", "CZ")
    for name in singles:
        for j in range(n):
            out.append((f"{name}[{j}]", standard_gate(name, n, (j,), f)))
    for name in pairs:
        for j in range(n):
            for k in range(n):
                if j != k:
                    out.append((f"{name}[{j},{k}]",
                                standard_gate(name, n, (j, k), f)))
    return out


@dataclass
class Generator:
    label: str
    matrix: ExactMatrix      # original computational-basis unitary
    reduced: ExactMatrix     # xi^nu B^-1 g B, integral numerators
    key: VertexKey
    coords: Coords
    cost: int
    zform: np.ndarray = None        # Z(reduced numerators), int64
    reduced_dagger: ExactMatrix = None
    red_np: np.ndarray = None       # reduced numerators, int64 (R, R, d)
    red_nu: int = 0
    dag_np: np.ndarray = None       # reduced dagger numerators
    dag_nu: int = 0

    def __repr__(self):
        return f"Generator({self.label!r}, nu={self.reduced.denom_exp}, cost={self.cost})"


@dataclass
class GateSet:
    field: FieldSpec
    n: int
    cost_zero_kind: str
    basis_kind: str
    b: ExactMatrix
    b_inv: ExactMatrix
    generators: list = dc_field(default_factory=list)
    name: str = ""

    def basis_pair(self, n_in):
        """(B_out_inv, B_in) for synthesizing 2^n x 2^n_in isometries."""
        if n_in == self.n:
            return self.b_inv, self.b
        b_in, _ = basis_matrix(self.basis_kind, n_in, self.field) if n_in else \
            (ExactMatrix.identity(self.field, 1), None)
        return self.b_inv, b_in

    def by_label(self, label):
        for g in self.generators:
            if g.label == label:
                return g
        raise KeyError(f"unknown generator label {label!r}")


def _reduce(u: ExactMatrix, b_inv, b) -> ExactMatrix:
    return b_inv @ u @ b


def normalize_gate_set(seeds, kind, n, f: FieldSpec, cost_override=None,
                       name="") -> GateSet:
    """BFS closure of the seeds under Clifford conjugation.

    seeds: list of (label, ExactMatrix).  cost_override: optional mapping
    seed label -> edge cost; default is the packed heuristic of the seed's
    coordinate vector at scale 1.
    """
    basis_kind = "real" if kind == "real_clifford" else "complex"
    b, b_inv = basis_matrix(basis_kind, n, f)
    czs = []
    for _, c in cost_zero_generators(kind, n, f):
        cr = _reduce(c, b_inv, b)
        cir = _reduce(c.dagger(), b_inv, b)
        if cr.denom_exp or cir.denom_exp:
            raise InvalidSeedError("cost-zero generator with nonzero nu")
        czs.append((cr, cir))

    gs = GateSet(f, n, kind, basis_kind, b, b_inv, [], name)
    seen = {}
    for label, seed in seeds:
        red = _reduce(seed, b_inv, b)
        if red.denom_exp == 0:
            raise InvalidSeedError(f"seed {label!r} is cost-zero")
        key = vertex_key_of_reduced(red.num, red.denom_exp, (seed.rows, seed.cols), f)
        if key in seen:
            raise InvalidSeedError(f"seed {label!r} duplicates {seen[key]}")
        coords = coords_of_reduced_unitary(red.num, red.denom_exp, f)
        if cost_override and label in cost_override:
            cost = cost_override[label]
        else:
            cost = heuristic_value(coords, 1)
        idx = 0
        queue = deque([(seed, red, key)])
        seen[key] = label
        while queue:
            mat, red, key = queue.popleft()
            gen = Generator(f"{label}#{idx}", mat, red, key, coords, cost)
            gs.generators.append(gen)
            idx += 1
            for (cr, cir), (_, corig) in zip(czs, cost_zero_generators(kind, n, f)):
                nred = cr @ red @ cir
                nkey = vertex_key_of_reduced(
                    nred.num, nred.denom_exp, (mat.rows, mat.cols), f)
                if nkey not in seen:
                    seen[nkey] = label
                    nmat = corig @ mat @ corig.dagger()
                    queue.append((nmat, nred, nkey))
    for g in gs.generators:
        g.zform = np.array(z_of_matrix(g.reduced.num, f), dtype=np.int64)
        g.reduced_dagger = _reduce(g.matrix.dagger(), b_inv, b)
        g.red_np = np.array(g.reduced.num, dtype=np.int64)
        g.red_nu = g.reduced.denom_exp
        g.dag_np = np.array(g.reduced_dagger.num, dtype=np.int64)
        g.dag_nu = g.reduced_dagger.denom_exp
    return gs


# -- named gate-set catalogue ----------------------------------------------

GATE_SET_CATALOG = {
    # name: (field, kind, min_n, seed spec [(label, gate, targets)])
    "clifford+t": ("Qzeta8", "clifford", 1, [("T", "T", (0,))]),
    "clifford+t+sqrtT": ("Qzeta16", "clifford", 1,
                         [("T", "T", (0,)), ("sqrtT", "sqrtT", (0,))]),
    "clifford+cs": ("Qi", "clifford", 2, [("CS", "CS", (0, 1))]),
    "clifford+ch": ("Qsqrt2", "real_clifford", 2, [("CH", "CH", (0, 1))]),
    "clifford+t,tt,ct": ("Qzeta8", "clifford", 2,
                         [("T", "T", (0,)), ("TT", "TT", (0, 1)),
                          ("CT", "CT", (0, 1))]),
    "clifford+ty,csy,cty": ("Qcos_pi8", "real_clifford", 2,
                            [("Ty", "Ty", (0,)), ("CSy", "CSy", (0, 1)),
                             ("CTy", "CTy", (0, 1))]),
    "clifford+ccz": ("Qi", "clifford", 3, [("CCZ", "CCZ", (0, 1, 2))]),
    "clifford+cs,ccz,ccs": ("Qi", "clifford", 3,
                            [("CS", "CS", (0, 1)), ("CCZ", "CCZ", (0, 1, 2)),
                             ("CCS", "CCS", (0, 1, 2))]),
}


def catalogue_seeds(name, n):
    """(field, cost-zero kind, [(label, seed matrix)]) for a catalogued set."""
    if name not in GATE_SET_CATALOG:
        raise UnsupportedGateSetError(f"unknown gate set {name!r}")
    fname, kind, min_n, seed_spec = GATE_SET_CATALOG[name]
    if n < min_n:
        raise UnsupportedGateSetError(f"{name} needs at least {min_n} qubits")
    f = field_spec(fname)
    seeds = []
    for label, gate, targets in seed_spec:
        if gate == "TT":
            m = standard_gate("T", n, (0,), f) @ standard_gate("T", n, (1,), f)
        else:
            m = standard_gate(gate, n, targets, f)
        seeds.append((label, m))
    return f, kind, seeds


def named_gate_set(name, n, cost_override=None) -> GateSet:
    """Build (normalize) one of the catalogued gate sets on n qubits."""
    f, kind, seeds = catalogue_seeds(name, n)
    return normalize_gate_set(seeds, kind, n, f, cost_override, name)


def gate_set_from_generators(labeled, kind, n, f: FieldSpec, name="") -> GateSet:
    """Rebuild a GateSet from stored (label, matrix, cost) triples.

    Used when loading a normalized set from cache; all derived per-generator
    data (reduced forms, keys, coordinates) is recomputed exactly.
    """
    basis_kind = "real" if kind == "real_clifford" else "complex"
    b, b_inv = basis_matrix(basis_kind, n, f)
    gs = GateSet(f, n, kind, basis_kind, b, b_inv, [], name)
    for label, mat, cost in labeled:
        red = _reduce(mat, b_inv, b)
        key = vertex_key_of_reduced(red.num, red.denom_exp, (mat.rows, mat.cols), f)
        coords = coords_of_reduced_unitary(red.num, red.denom_exp, f)
        gs.generators.append(Generator(label, mat, red, key, coords, cost))
    for g in gs.generators:
        g.zform = np.array(z_of_matrix(g.reduced.num, f), dtype=np.int64)
        g.reduced_dagger = _reduce(g.matrix.dagger(), b_inv, b)
        g.red_np = np.array(g.reduced.num, dtype=np.int64)
        g.red_nu = g.reduced.denom_exp
        g.dag_np = np.array(g.reduced_dagger.num, dtype=np.int64)
        g.dag_nu = g.reduced_dagger.denom_exp
    return gs
