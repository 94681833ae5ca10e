"""Exact synthesis of quantum circuits over Clifford+non-Clifford gate sets.

All arithmetic is exact, over rings of integers of small cyclotomic-flavoured
number fields; search is A* (optimal counts) or greedy best-first (fast, with
a provable termination bound) guided by Smith-normal-form coordinates.
"""

from .numberfield import FieldSpec, field_spec
from .exactlinalg import ExactMatrix, ExactScalar
from .gates import basis_matrix, pad_isometry, permutation_unitary, \
    standard_gate, v_isometry
from .canon import Coords, VertexKey, coords_isometry, coords_unitary, \
    heuristic_value, nu, vertex_key
from .normalize import GateSet, Generator, named_gate_set, normalize_gate_set
from .synth import Circuit, NoReducingGeneratorError, SearchExhaustedError, \
    astar_synthesize, best_first_synthesize, verify_circuit

__version__ = "0.1.0"

__all__ = [
    "FieldSpec", "field_spec",
    "ExactMatrix", "ExactScalar",
    "basis_matrix", "pad_isometry", "permutation_unitary", "standard_gate",
    "v_isometry",
    "Coords", "VertexKey", "coords_isometry", "coords_unitary",
    "heuristic_value", "nu", "vertex_key",
    "GateSet", "Generator", "named_gate_set", "normalize_gate_set",
    "Circuit", "NoReducingGeneratorError", "SearchExhaustedError",
    "astar_synthesize", "best_first_synthesize", "verify_circuit",
    "__version__",
]
