"""Exact circuit synthesis: A* search over canonical vertices and the
coordinate-reducing best-first search, plus exact circuit verification.

Circuit orientation (labels are leftmost-applied-last):
  * square target U:    U = remainder @ g[labels[0]] @ ... @ g[labels[-1]]
  * isometry target U:  U = dagger(g[labels[0]]) @ ... @ dagger(g[labels[-1]]) @ remainder
In both forms the remainder has nu = 0 (it is cost-zero) and the product
reproduces the target entrywise exactly.

The search state is the integer numerator array of the reduced matrix
xi^nu B_out^-1 U B_in, so neighbor generation is integer matrix
multiplication followed by stripping the spare xi power.
"""

from __future__ import annotations

import heapq
import time
from array import array
from dataclasses import dataclass, field as dc_field
from hashlib import blake2b

import numpy as np

from .canon import Coords, InternalConsistencyError, coords_isometry_array, \
    coords_unitary_array, heuristic_value, vertex_key_array
from .exactlinalg import ExactMatrix, ValuationBoundError, \
    _batch_step_kernel, _hnf_pow2_kernel, _mul_strip_kernel, \
    _np_mul_sparse, _np_ring_tables, np_mul_table, np_repr_tensor, \
    np_strip_xi, strictly_weakly_majorizes
from .gates import basis_matrix
from .normalize import GateSet


class SearchExhaustedError(RuntimeError):
    """Node or time budget ran out; carries the best frontier f-value."""

    def __init__(self, msg, best_f=None, nodes=0):
        super().__init__(msg)
        self.best_f = best_f
        self.nodes = nodes


class NoReducingGeneratorError(RuntimeError):
    """Best-first sweep found no coordinate reduction (invariant violation)."""

    def __init__(self, msg, stuck=None):
        super().__init__(msg)
        self.stuck = stuck


@dataclass
class Circuit:
    gateset_id: str
    labels: list
    remainder: ExactMatrix
    cost: int
    stats: dict = dc_field(default_factory=dict)


def _in_basis_pair(gs: GateSet, u: ExactMatrix):
    """Reduced form of u plus the inverse input basis for the round trip."""
    dim = 1 << gs.n
    if u.rows != dim:
        raise ValueError(f"matrix is {u.rows}x{u.cols}, gate set acts on {dim}")
    if u.cols == dim:
        b_in, b_in_inv = gs.b, gs.b_inv
    else:
        n_in = u.cols.bit_length() - 1
        if (1 << n_in) != u.cols:
            raise ValueError(f"column count {u.cols} is not a power of two")
        if n_in == 0:
            b_in = b_in_inv = ExactMatrix.identity(gs.field, 1)
        else:
            b_in, b_in_inv = basis_matrix(gs.basis_kind, n_in, gs.field)
    return gs.b_inv @ u @ b_in, b_in_inv


def _coords_arr(x, nu_val, f, square) -> Coords:
    if square:
        return coords_unitary_array(x, nu_val, f)
    return coords_isometry_array(x, nu_val, f)


_GROWTH_CAP = 1 << 52  # einsum inputs stay well inside int64


def _node_store(x):
    """Shrink a node's coordinate array to the narrowest safe dtype."""
    m = int(np.abs(x).max()) if x.size else 0
    if m < (1 << 15):
        return x.astype(np.int16)
    if m < (1 << 31):
        return x.astype(np.int32)
    return x


def _key_digest(x, nu_val, f, square):
    """16-byte digest identifying the canonical vertex of a reduced state.

    The branch taken depends only on (shape, nu), so two states of the same
    vertex always hash the same payload.
    """
    rows, cols = x.shape[0], x.shape[1]
    if (square and nu_val and _hnf_pow2_kernel is not None
            and nu_val * rows <= 62):
        rt = np_repr_tensor(f)
        z = np.einsum("rct,tab->carb", x, rt).reshape(cols * f.degree,
                                                      rows * f.degree)
        payload = np.ascontiguousarray(
            _hnf_pow2_kernel(np.ascontiguousarray(z), nu_val * rows)).tobytes()
    else:
        payload = vertex_key_array(x, nu_val, f).hnf_bytes
    return blake2b(payload + b"|%d|%d|%d" % (rows, cols, nu_val),
                   digest_size=16).digest()


def astar_synthesize(u: ExactMatrix, gs: GateSet, scale=10,
                     node_cap=10_000_000, time_cap=None) -> Circuit:
    """Shortest-path synthesis of an isometry over a normalized gate set.

    With scale 1 the returned generator cost is minimal; larger scales
    weight the heuristic and may trade optimality for speed.  Search runs
    on the dagger for square targets so the circuit comes out in
    remainder-times-generators order.
    """
    square = u.rows == u.cols
    w0 = u.dagger() if square else u
    red0, b_in_inv = _in_basis_pair(gs, w0)
    f = gs.field
    mt = np_mul_table(f)
    start = time.monotonic()

    _, mcof_t = _np_ring_tables(f)
    mul_nnz, mul_ts, mul_vs = _np_mul_sparse(f)
    x0 = np.ascontiguousarray(np.array(red0.num, dtype=np.int64))
    nu0 = red0.denom_exp
    h0 = heuristic_value(_coords_arr(x0, nu0, f, square), scale)
    gens = gs.generators
    ngens = len(gens)
    gen_stack = np.ascontiguousarray(np.stack([g.red_np for g in gens]))
    gen_nus = np.array([g.red_nu for g in gens], dtype=np.int64)
    gen_costs = [g.cost for g in gens]
    use_kernels = _batch_step_kernel is not None and square
    dim = x0.shape[0]
    half = dim // 2

    # Vertex keys are only computed when an entry is popped: duplicates
    # wait in the frontier as packed (parent id, generator index) ints, and
    # a better g arriving later simply reopens the vertex.  The frontier is
    # a bucket queue keyed by (f, -g) with FIFO order inside a bucket, so
    # tie-breaking is deterministic and entries cost eight bytes each.
    nodes = []       # id -> (stored x, nu, parent id, gen index)
    best_g = {}      # vertex digest -> best g seen
    buckets = {}     # (f, -g) -> [array of packed entries, head index]
    order = []       # heap of live bucket keys

    def push(fval, gval, packed):
        bkey = (fval, -gval)
        b = buckets.get(bkey)
        if b is None:
            b = [array("q"), 0]
            buckets[bkey] = b
            heapq.heappush(order, bkey)
        b[0].append(packed)

    push(h0, 0, -1)
    expanded = 0

    while order:
        bkey = order[0]
        b = buckets[bkey]
        if b[1] >= len(b[0]):
            heapq.heappop(order)
            del buckets[bkey]
            continue
        packed = b[0][b[1]]
        b[1] += 1
        fval = bkey[0]
        gcost = -bkey[1]
        if packed < 0:
            x, nu_val = x0, nu0
            pid = gi = -1
        else:
            pid, gi = divmod(packed, ngens)
            px, pnu, _, _ = nodes[pid]
            if px.dtype != np.int64:
                px = px.astype(np.int64)
            if _mul_strip_kernel is not None:
                x, strips = _mul_strip_kernel(gen_stack[gi], px,
                                              mul_nnz, mul_ts, mul_vs, mcof_t)
            else:
                raw = np.einsum("rka,kcb,abt->rct", gens[gi].red_np, px, mt)
                x, strips = np_strip_xi(raw, f)
            nu_val = gens[gi].red_nu + pnu - strips
        dig = _key_digest(x, nu_val, f, square)
        old = best_g.get(dig)
        if old is not None and old <= gcost:
            continue
        best_g[dig] = gcost
        nid = len(nodes)
        nodes.append((_node_store(x), nu_val, pid, gi))
        if nu_val == 0:
            labels = []
            k = nid
            while True:
                _, _, pk, gidx = nodes[k]
                if gidx < 0:
                    break
                labels.append(gens[gidx].label)
                k = pk
            red = ExactMatrix(f, [[tuple(int(c) for c in e) for e in row]
                                  for row in x.tolist()])
            if square:
                remainder = (gs.b @ red @ gs.b_inv).dagger()
            else:
                labels.reverse()
                remainder = gs.b @ red @ b_in_inv
            stats = {"nodes_expanded": expanded,
                     "wall_ms": int(1000 * (time.monotonic() - start))}
            return Circuit(gs.name, labels, remainder, gcost, stats)
        expanded += 1
        if expanded > node_cap:
            raise SearchExhaustedError(
                f"node cap {node_cap} exhausted", best_f=fval, nodes=expanded)
        if time_cap is not None and time.monotonic() - start > time_cap:
            raise SearchExhaustedError(
                f"time cap {time_cap}s exhausted", best_f=fval, nodes=expanded)
        if x.max() > _GROWTH_CAP or x.min() < -_GROWTH_CAP:
            raise SearchExhaustedError("numerators outgrew the integer window",
                                       best_f=fval, nodes=expanded)
        if use_kernels:
            nnus, valrows = _batch_step_kernel(gen_stack, gen_nus, x, nu_val,
                                               mul_nnz, mul_ts, mul_vs,
                                               mcof_t)
            for gi2 in range(ngens):
                nnu = int(nnus[gi2])
                if nnu < -(10 ** 8):
                    raise ValuationBoundError(
                        "neighbor invariant factors exceed the window")
                if nnu == 0:
                    co = Coords((0,) * half, "unitary")
                else:
                    vr = valrows[gi2]
                    ks = []
                    for i in range(half):
                        lo = int(vr[i])
                        if lo + int(vr[dim - 1 - i]) != 2 * nnu:
                            raise InternalConsistencyError(
                                "invariant factors not symmetric around "
                                f"nu={nnu}")
                        ks.append(nnu - lo)
                    co = Coords(tuple(ks), "unitary")
                ng = gcost + gen_costs[gi2]
                push(ng + heuristic_value(co, scale), ng, nid * ngens + gi2)
        else:
            batch = np.einsum("grka,kcb,abt->grct", gen_stack, x, mt)
            for gi2 in range(ngens):
                nx, strips = np_strip_xi(batch[gi2], f)
                nnu = gens[gi2].red_nu + nu_val - strips
                nh = heuristic_value(_coords_arr(nx, nnu, f, square), scale)
                ng = gcost + gen_costs[gi2]
                push(ng + nh, ng, nid * ngens + gi2)
    raise SearchExhaustedError("frontier exhausted without reaching a goal",
                               nodes=expanded)


def best_first_synthesize(u: ExactMatrix, gs: GateSet) -> Circuit:
    """Coordinate-descent synthesis of a unitary: repeatedly strip one
    generator whose removal strictly weak-majorizes down the coordinate
    vector.  Terminates in a number of sweeps linear in max nu."""
    if u.rows != u.cols:
        raise ValueError("best-first synthesis expects a square unitary")
    f = gs.field
    mt = np_mul_table(f)
    start = time.monotonic()
    red, _ = _in_basis_pair(gs, u)
    x, nu_val = np.array(red.num, dtype=np.int64), red.denom_exp
    v = u
    seq = []  # generator labels in the order stripped
    iterations = 0
    coords = coords_unitary_array(x, nu_val, f)
    while any(coords.values):
        for gen in gs.generators:
            raw = np.einsum("rka,kcb,abt->rct", x, gen.dag_np, mt)
            cx, strips = np_strip_xi(raw, f)
            cnu = nu_val + gen.dag_nu - strips
            ccoords = coords_unitary_array(cx, cnu, f)
            if strictly_weakly_majorizes(coords.values, ccoords.values):
                x, nu_val, coords = cx, cnu, ccoords
                v = v @ gen.matrix.dagger()
                seq.append(gen.label)
                iterations += 1
                break
        else:
            raise NoReducingGeneratorError(
                "no generator strictly reduces the coordinates", stuck=v)
    cost = sum(gs.by_label(lab).cost for lab in seq)
    stats = {"iterations": iterations,
             "wall_ms": int(1000 * (time.monotonic() - start))}
    return Circuit(gs.name, list(reversed(seq)), v, cost, stats)


def verify_circuit(u: ExactMatrix, c: Circuit, gs: GateSet) -> bool:
    """Exact re-multiplication check of a synthesized circuit."""
    mats = [gs.by_label(lab).matrix for lab in c.labels]  # KeyError on bad label
    rem = c.remainder
    if rem.rows == rem.cols:
        prod = rem
        for m in mats:
            prod = prod @ m
        if u.cols != u.rows:
            prod = prod.columns(range(u.cols))
    else:
        prod = rem
        for m in reversed(mats):
            prod = m.dagger() @ prod
    if prod != u:
        return False
    red, _ = _in_basis_pair(gs, rem)
    return red.denom_exp == 0
