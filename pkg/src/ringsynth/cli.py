"""Command-line front end: gate construction, gate-set normalization,
synthesis, coordinate reports and circuit verification.

Exit codes: 0 success, 2 parse error, 3 field mismatch, 4 budget exhausted,
5 verification failure, 6 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import files
from .canon import CoordinateOverflowError, InternalConsistencyError, nu
from .exactlinalg import ExactMatrix
from .gates import FieldMismatchError, basis_matrix, permutation_unitary, \
    standard_gate, v_isometry
from .normalize import UnsupportedGateSetError, named_gate_set
from .numberfield import field_spec
from .synth import NoReducingGeneratorError, SearchExhaustedError, \
    astar_synthesize, best_first_synthesize, verify_circuit

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_FIELD = 3
EXIT_BUDGET = 4
EXIT_VERIFY = 5
EXIT_INTERNAL = 6


def _emit(obj, args):
    if getattr(args, "json", False):
        print(json.dumps(obj))
    else:
        for k, v in obj.items():
            print(f"{k}: {v}")


def _load_gate_set(args):
    return files.cached_gate_set(args.gate_set, args.qubits,
                                 cache_dir=args.cache_dir)


def cmd_normalize(args):
    t0 = time.monotonic()
    gs = _load_gate_set(args)
    ms = int(1000 * (time.monotonic() - t0))
    out = {
        "gate_set": gs.name,
        "field": gs.field.name,
        "qubits": gs.n,
        "generators": len(gs.generators),
        "precompute_ms": ms,
    }
    if args.json:
        out["coords"] = {g.label: list(g.coords.values) for g in gs.generators}
    _emit(out, args)
    return EXIT_OK


def cmd_synth(args):
    u = files.read_matrix(args.input)
    t0 = time.monotonic()
    gs = _load_gate_set(args)
    precompute_ms = int(1000 * (time.monotonic() - t0))
    if u.field.name != gs.field.name:
        print(f"error: matrix field {u.field.name} does not match "
              f"gate set field {gs.field.name}", file=sys.stderr)
        return EXIT_FIELD
    if args.mode == "bestfirst":
        if u.rows != u.cols:
            print("error: bestfirst mode needs a square unitary", file=sys.stderr)
            return EXIT_PARSE
        circuit = best_first_synthesize(u, gs)
    else:
        circuit = astar_synthesize(u, gs, scale=args.scale,
                                   node_cap=args.node_cap,
                                   time_cap=args.time_cap)
    circuit.stats["precompute_ms"] = precompute_ms
    if not verify_circuit(u, circuit, gs):
        print("error: synthesized circuit failed exact verification",
              file=sys.stderr)
        return EXIT_VERIFY
    if args.output:
        files.write_circuit(args.output, circuit, gs)
    _emit({
        "gate_set": gs.name,
        "labels": circuit.labels if args.json else " ".join(circuit.labels),
        "gates": len(circuit.labels),
        "cost": circuit.cost,
        "stats": circuit.stats,
    }, args)
    return EXIT_OK


def cmd_coords(args):
    u = files.read_matrix(args.input)
    f = u.field
    n_out = u.rows.bit_length() - 1
    if (1 << n_out) != u.rows:
        print(f"error: {u.rows} rows is not a power of two", file=sys.stderr)
        return EXIT_PARSE
    kind = "real" if args.basis == "real" else "complex"
    b_out, b_out_inv = basis_matrix(kind, n_out, f)
    if u.cols == u.rows:
        b_in = b_out
    else:
        n_in = u.cols.bit_length() - 1
        b_in = basis_matrix(kind, n_in, f)[0] if n_in else \
            ExactMatrix.identity(f, 1)
    from .canon import coords_isometry, coords_unitary
    nv = nu(u, b_out_inv, b_in)
    if u.cols == u.rows:
        co = coords_unitary(u, b_out_inv, b_out)
    else:
        co = coords_isometry(u, b_out_inv, b_in)
    _emit({"field": f.name, "nu": nv, "coords": list(co.values),
           "kind": co.kind}, args)
    return EXIT_OK


def cmd_verify(args):
    u = files.read_matrix(args.input)
    circuit, gs_name, gs_hash = files.read_circuit(args.circuit)
    gs = files.cached_gate_set(gs_name, args.qubits, cache_dir=args.cache_dir)
    if gs_hash != files.gate_set_hash(gs):
        print("error: circuit was produced with a different gate-set content",
              file=sys.stderr)
        return EXIT_FIELD
    ok = verify_circuit(u, circuit, gs)
    _emit({"verified": ok}, args)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_gate(args):
    f = field_spec(args.field)
    if args.name == "permutation":
        perm = json.loads(args.targets[0])
        m = permutation_unitary(perm, f)
    elif args.name == "v":
        a, b, c, d = (int(t) for t in args.targets)
        m = v_isometry(a, b, c, d, f)
    else:
        targets = tuple(int(t) for t in args.targets)
        m = standard_gate(args.name, args.qubits, targets, f)
    if args.output:
        files.write_matrix(args.output, m)
        _emit({"written": args.output, "rows": m.rows, "cols": m.cols}, args)
    else:
        print(json.dumps(files.matrix_to_obj(m)))
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="ringsynth",
                                description="exact circuit synthesis over xi-rings")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--cache-dir", default=None,
                   help="directory for normalized gate-set caches")
    sub = p.add_subparsers(dest="command", required=True)

    def common_gs(sp):
        sp.add_argument("--gate-set", required=True)
        sp.add_argument("--qubits", type=int, required=True)

    sp = sub.add_parser("normalize", help="precompute a normalized gate set")
    common_gs(sp)
    sp.set_defaults(func=cmd_normalize)

    sp = sub.add_parser("synth", help="synthesize a circuit for a matrix file")
    common_gs(sp)
    sp.add_argument("input")
    sp.add_argument("--mode", choices=("astar", "bestfirst"), default="astar")
    sp.add_argument("--scale", type=int, default=10,
                    help="heuristic weight (1 = certified optimal)")
    sp.add_argument("--threads", type=int, default=1,
                    help="accepted for compatibility; execution is sequential")
    sp.add_argument("--node-cap", type=int, default=10_000_000)
    sp.add_argument("--time-cap", type=float, default=None)
    sp.add_argument("--output", default=None, help="circuit JSON path")
    sp.set_defaults(func=cmd_synth)

    sp = sub.add_parser("coords", help="print nu and SNF coordinates")
    sp.add_argument("input")
    sp.add_argument("--basis", choices=("complex", "real"), default="complex")
    sp.set_defaults(func=cmd_coords)

    sp = sub.add_parser("verify", help="re-check a circuit file exactly")
    sp.add_argument("input")
    sp.add_argument("circuit")
    sp.add_argument("--qubits", type=int, required=True)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("gate", help="write a standard gate or isometry file")
    sp.add_argument("name", help="gate name, 'permutation', or 'v'")
    sp.add_argument("targets", nargs="*",
                    help="qubit indices; permutation list; or a b c d for 'v'")
    sp.add_argument("--qubits", type=int, default=1)
    sp.add_argument("--field", required=True)
    sp.add_argument("--output", default=None)
    sp.set_defaults(func=cmd_gate)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (files.FileFormatError, json.JSONDecodeError, ValueError,
            KeyError, OSError) as exc:
        if isinstance(exc, (FieldMismatchError, UnsupportedGateSetError)):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_FIELD
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SearchExhaustedError as exc:
        print(f"error: {exc} (best frontier f = {exc.best_f}, "
              f"{exc.nodes} nodes expanded)", file=sys.stderr)
        return EXIT_BUDGET
    except (InternalConsistencyError, NoReducingGeneratorError,
            CoordinateOverflowError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
