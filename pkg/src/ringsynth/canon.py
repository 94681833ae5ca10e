"""Vertex canonicalization and heuristic coordinates.

A search vertex is an isometry up to right multiplication by restricted
cost-zero factors.  Its canonical key is the Hermite normal form of the
integer representation of the transposed numerator matrix, together with
the denominator exponent nu.  Coordinate vectors are read off the
xi-local Smith normal form and feed the packed search heuristic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exactlinalg import ExactMatrix, hnf_integer, hnf_pow2_array, \
    np_repr_tensor, snf_valuations_array, xi_local_snf_valuations
from .numberfield import z_of_matrix


class InternalConsistencyError(RuntimeError):
    """A structural invariant failed; indicates a precondition violation."""


class CoordinateOverflowError(ValueError):
    """A coordinate does not fit in a 32-bit heuristic lane."""


@dataclass(frozen=True)
class VertexKey:
    """Canonical label of a search vertex."""

    dims: tuple  # (rows, cols) of the isometry
    nu: int
    hnf_bytes: bytes

    def __repr__(self):
        return f"VertexKey(dims={self.dims}, nu={self.nu}, hash={hash(self.hnf_bytes):#x})"


@dataclass(frozen=True)
class Coords:
    values: tuple
    kind: str  # "unitary" or "isometry"


def _reduced(u: ExactMatrix, b_out_inv: ExactMatrix, b_in: ExactMatrix) -> ExactMatrix:
    """B_out^-1 U B_in with minimal denominator exponent (= nu)."""
    return b_out_inv @ u @ b_in


def nu(u: ExactMatrix, b_out_inv: ExactMatrix, b_in: ExactMatrix) -> int:
    """Smallest k such that xi^k B_out^-1 U B_in has integral entries.

    Zero exactly on the cost-zero group (and its isometry cosets).
    """
    return _reduced(u, b_out_inv, b_in).denom_exp


_SER_MEMO = {}


def _ser_int(v: int) -> bytes:
    hit = _SER_MEMO.get(v)
    if hit is not None:
        return hit
    n = max(1, (v.bit_length() + 8) // 8)  # minimal two's-complement width
    b = v.to_bytes(n, "big", signed=True)
    while len(b) > 1 and (
        (b[0] == 0 and b[1] < 0x80) or (b[0] == 0xFF and b[1] >= 0x80)
    ):
        b = b[1:]
    out = len(b).to_bytes(2, "big") + b
    if -(1 << 20) < v < (1 << 20):
        _SER_MEMO[v] = out
    return out


def serialize_rows(rows) -> bytes:
    """Canonical bytes of an integer matrix.

    Entries within int64 use a fixed-width encoding (tag b"A"), anything
    larger falls back to variable-width big integers (tag b"B").  The tag
    depends only on the entry values, so equal matrices always serialize
    identically regardless of which container they arrive in.
    """
    if len(rows):
        try:
            arr = np.asarray(rows, dtype=np.int64)
        except OverflowError:
            arr = None
        if arr is not None and arr.ndim == 2:
            return (b"A" + arr.shape[0].to_bytes(4, "big")
                    + arr.shape[1].to_bytes(4, "big") + arr.tobytes())
    out = [b"B", len(rows).to_bytes(4, "big"),
           (len(rows[0]) if len(rows) else 0).to_bytes(4, "big")]
    for row in rows:
        for v in row:
            out.append(_ser_int(int(v)))
    return b"".join(out)


def vertex_key(u: ExactMatrix, b_out_inv: ExactMatrix, b_in: ExactMatrix) -> VertexKey:
    ut = _reduced(u, b_out_inv, b_in)
    return vertex_key_of_reduced(ut.num, ut.denom_exp, (u.rows, u.cols), ut.field)


def vertex_key_of_reduced(num, nu_val, dims, f) -> VertexKey:
    """Key from the integral numerator of xi^nu B_out^-1 U B_in."""
    rows = len(num)
    cols = len(num[0])
    transposed = [[num[i][j] for i in range(rows)] for j in range(cols)]
    z = z_of_matrix(transposed, f)
    modulus = None
    if rows == cols:
        # |det Z| = |Norm(det)| = 2^(nu * dim) for a reduced unitary
        modulus = 1 << (nu_val * rows)
        if modulus == 1:
            modulus = None
    h = hnf_integer(z, modulus=modulus)
    return VertexKey((rows, cols), nu_val, serialize_rows(h))


def vertex_key_array(x, nu_val, f) -> VertexKey:
    """vertex_key_of_reduced for an exact int64 coordinate array (R, C, d)."""
    rows, cols, d = x.shape
    rt = np_repr_tensor(f)
    z = np.einsum("rct,tab->carb", x, rt).reshape(cols * d, rows * d)
    if rows == cols and nu_val:
        modulus = 1 << (nu_val * rows)
        if modulus <= (1 << 62):
            h = hnf_pow2_array(z, modulus)
        else:
            h = hnf_integer(z.tolist(), modulus=modulus)
    else:
        h = hnf_integer(z.tolist())
    return VertexKey((rows, cols), nu_val, serialize_rows(h))


def coords_unitary_array(x, nu_val, f) -> Coords:
    """coords_of_reduced_unitary for an exact int64 array (dim, dim, d)."""
    dim = x.shape[0]
    n_half = dim // 2
    if nu_val == 0:
        return Coords((0,) * n_half, "unitary")
    vals = snf_valuations_array(x, f, 2 * nu_val)
    ks = []
    for i in range(n_half):
        lo, hi = vals[i], vals[dim - 1 - i]
        if lo + hi != 2 * nu_val:
            raise InternalConsistencyError(
                f"invariant factors not symmetric around nu={nu_val}: {vals}"
            )
        ks.append(nu_val - lo)
    return Coords(tuple(ks), "unitary")


def coords_isometry_array(x, nu_val, f) -> Coords:
    """coords_isometry for an exact int64 array (rows, cols, d)."""
    cols = x.shape[1]
    if nu_val == 0:
        return Coords((0,) * cols, "isometry")
    # individual coordinates may be negative (factor integral beyond
    # xi^nu), so the valuation window must stretch past nu itself
    vals = snf_valuations_array(x, f, 2 * nu_val * cols)
    ks = tuple(sorted(nu_val - v for v in vals))
    if vals[0] != 0:
        raise InternalConsistencyError(
            f"reduced isometry has nonzero content: {vals}"
        )
    return Coords(ks, "isometry")


_COORD_CACHE = {}


def coords_unitary(u: ExactMatrix, b_inv: ExactMatrix, b: ExactMatrix,
                   key: VertexKey = None) -> Coords:
    """Non-increasing coordinate vector (k_1, ..., k_N) of a 2N x 2N unitary.

    Invariant factors of the reduced matrix come in pairs xi^(nu-k) and
    xi^(nu+k); the pairing is checked and any asymmetry is a hard error.
    """
    if key is not None:
        hit = _COORD_CACHE.get(("u", key))
        if hit is not None:
            return hit
    ut = _reduced(u, b_inv, b)
    out = coords_of_reduced_unitary(ut.num, ut.denom_exp, ut.field)
    if key is not None:
        _COORD_CACHE[("u", key)] = out
    return out


def coords_of_reduced_unitary(num, nu_val, f) -> Coords:
    dim = len(num)
    if dim % 2:
        raise InternalConsistencyError("unitary dimension must be even")
    n_half = dim // 2
    if nu_val == 0:
        return Coords((0,) * n_half, "unitary")
    vals = xi_local_snf_valuations(ExactMatrix(f, num), 2 * nu_val)
    ks = []
    for i in range(n_half):
        lo, hi = vals[i], vals[dim - 1 - i]
        if lo + hi != 2 * nu_val:
            raise InternalConsistencyError(
                f"invariant factors not symmetric around nu={nu_val}: {vals}"
            )
        ks.append(nu_val - lo)
    return Coords(tuple(ks), "unitary")


def coords_isometry(u: ExactMatrix, b_out_inv: ExactMatrix, b_in: ExactMatrix,
                    key: VertexKey = None) -> Coords:
    """Non-decreasing coordinates (k_1, ..., k_N') of a 2N x N' isometry,
    read from the invariant factor pattern xi^(nu - k_j)."""
    if key is not None:
        hit = _COORD_CACHE.get(("i", key))
        if hit is not None:
            return hit
    ut = _reduced(u, b_out_inv, b_in)
    cols = ut.cols
    if cols > ut.rows // 2:
        raise InternalConsistencyError("isometry has more than N columns")
    if ut.denom_exp == 0:
        out = Coords((0,) * cols, "isometry")
    else:
        vals = xi_local_snf_valuations(ExactMatrix(ut.field, ut.num),
                                       2 * ut.denom_exp * cols)
        ks = tuple(sorted(ut.denom_exp - v for v in vals))
        if vals[0] != 0:
            raise InternalConsistencyError(
                f"reduced isometry has nonzero content: {vals}"
            )
        out = Coords(ks, "isometry")
    if key is not None:
        _COORD_CACHE[("i", key)] = out
    return out


def heuristic_value(c: Coords, scale: int = 10) -> int:
    """Packed heuristic: scale * sum_j 2^(32(j-1)) * c_j.

    With scale 1 this is the search heuristic whose lane comparisons the
    A* cost model is built on; larger scales trade optimality for speed.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")
    total = 0
    for j, v in enumerate(c.values):
        if not -(1 << 31) < v < (1 << 32):
            raise CoordinateOverflowError(f"coordinate {v} outside 32-bit lane")
        if v < 0 and c.kind != "isometry":
            raise CoordinateOverflowError(f"negative unitary coordinate {v}")
        total += v << (32 * j)
    # isometry coordinates may go negative in low lanes; the packed value
    # is still a lower bound, clamped so the heuristic stays non-negative
    return max(0, scale * total)
