"""Constructors for standard gates, basis-change matrices, isometry padding,
permutation unitaries and the V-isometry family.

Qubit ordering is big-endian: qubit 0 is the leftmost tensor factor.
"""

from __future__ import annotations

from fractions import Fraction

from .exactlinalg import ExactMatrix, ExactScalar, DimensionMismatchError
from .numberfield import FieldSpec, field_spec


class FieldMismatchError(ValueError):
    """Gate entries do not exist in the requested field."""


# -- named constants per field ---------------------------------------------

def _solve_integral(f: FieldSpec, mat, rhs):
    d = f.degree
    m = [[Fraction(v) for v in row] for row in mat]
    r = [Fraction(v) for v in rhs]
    for col in range(d):
        piv = next(i for i in range(col, d) if m[i][col] != 0)
        m[col], m[piv] = m[piv], m[col]
        r[col], r[piv] = r[piv], r[col]
        inv = 1 / m[col][col]
        m[col] = [v * inv for v in m[col]]
        r[col] *= inv
        for i in range(d):
            if i != col and m[i][col]:
                fac = m[i][col]
                m[i] = [a - fac * b for a, b in zip(m[i], m[col])]
                r[i] -= fac * r[col]
    if any(v.denominator != 1 for v in r):
        return None
    return tuple(int(v) for v in r)


def scalar_div(f: FieldSpec, a: ExactScalar, b: ExactScalar) -> ExactScalar:
    """a / b when the quotient lies in the xi-ring (b supported only at xi)."""
    vb = f.xi_valuation(b.num)
    unit = f.divide_by_xi(b.num, vb)
    q = _solve_integral(f, f.repr_matrix(unit), a.num)
    if q is None:
        raise FieldMismatchError("quotient not integral: divisor is not xi-local")
    return ExactScalar(f, q, a.denom_exp - b.denom_exp + vb)


def _consts(f: FieldSpec):
    """Named field constants as ExactScalars; missing names mean the value
    does not exist in the field."""
    cached = getattr(f, "_gate_consts", None)
    if cached is not None:
        return cached
    d = f.degree

    def s(coords, k=0):
        return ExactScalar(f, tuple(coords) + (0,) * (d - len(coords)), k)

    one = s([1])
    c = {"0": s([0]), "1": one, "-1": s([-1])}
    if f.name == "Qi":
        c["i"] = s([0, 1])
    elif f.name == "Qsqrt2":
        c["sqrt2"] = s([0, 1])
    elif f.name == "Qzeta8":
        c["zeta8"] = s([0, 1, 0, 0])
        c["i"] = s([0, 0, 1, 0])
        c["sqrt2"] = s([0, 1, 0, -1])  # zeta8 - zeta8^3
    elif f.name == "Qzeta16":
        c["zeta16"] = s([0, 1, 0, 0, 0, 0, 0, 0])
        c["zeta8"] = s([0, 0, 1, 0, 0, 0, 0, 0])
        c["i"] = s([0, 0, 0, 0, 1, 0, 0, 0])
        c["sqrt2"] = s([0, 0, 1, 0, 0, 0, -1, 0])
    elif f.name == "Qcos_pi8":
        # c0 = 2 cos(pi/8); sqrt2 = c0^2 - 2
        c["c0"] = s([0, 1])
        c["sqrt2"] = s([-2, 0, 1, 0])
    two = s([2])
    if "sqrt2" in c:
        c["inv_sqrt2"] = scalar_div(f, one, c["sqrt2"])
    if "i" in c:
        # 1/(1+i)
        onepi = ExactScalar(f, f.add(f.one, c["i"].num))
        c["inv_one_plus_i"] = scalar_div(f, one, onepi)
    if f.name == "Qcos_pi8":
        c["cos_pi8"] = scalar_div(f, c["c0"], two)  # c0/2
        # sin(pi/8) = sqrt2 / (2 c0)
        denom = ExactScalar(f, f.mul(two.num, c["c0"].num))
        c["sin_pi8"] = scalar_div(f, c["sqrt2"], denom)
    if "inv_sqrt2" in c:
        c["cos_pi4"] = c["inv_sqrt2"]
    f._gate_consts = c
    return c


def _need(f, *names):
    c = _consts(f)
    missing = [n for n in names if n not in c]
    if missing:
        raise FieldMismatchError(
            f"gate entries {missing} not representable in field {f.name}"
        )
    return [c[n] for n in names]


def _mat(f, scalars):
    return ExactMatrix.from_scalars(f, scalars)


def _base_gate(name: str, f: FieldSpec) -> ExactMatrix:
    """The unpadded gate matrix (1, 2 or 3 qubits)."""
    c = _consts(f)
    zero, one, neg = c["0"], c["1"], c["-1"]
    if name == "X":
        return _mat(f, [[zero, one], [one, zero]])
    if name == "Z":
        return _mat(f, [[one, zero], [zero, neg]])
    if name == "S":
        (i,) = _need(f, "i")
        return _mat(f, [[one, zero], [zero, i]])
    if name == "T":
        (z8,) = _need(f, "zeta8")
        return _mat(f, [[one, zero], [zero, z8]])
    if name == "sqrtT":
        (z16,) = _need(f, "zeta16")
        return _mat(f, [[one, zero], [zero, z16]])
    if name == "H":
        (w,) = _need(f, "inv_sqrt2")
        negw = ExactScalar(f, f.neg(w.num), w.denom_exp)
        return _mat(f, [[w, w], [w, negw]])
    if name == "Htilde":
        (w,) = _need(f, "inv_one_plus_i")
        negw = ExactScalar(f, f.neg(w.num), w.denom_exp)
        return _mat(f, [[w, w], [w, negw]])
    if name == "Sy":
        (w,) = _need(f, "cos_pi4")
        negw = ExactScalar(f, f.neg(w.num), w.denom_exp)
        return _mat(f, [[w, negw], [w, w]])
    if name == "Ty":
        co, si = _need(f, "cos_pi8", "sin_pi8")
        nsi = ExactScalar(f, f.neg(si.num), si.denom_exp)
        return _mat(f, [[co, nsi], [si, co]])
    if name == "SWAP":
        return permutation_unitary([0, 2, 1, 3], f)
    if name.startswith("CC"):
        return controlled(controlled(_base_gate(name[2:], f)))
    if name.startswith("C"):
        inner = "X" if name == "CX" else name[1:]
        return controlled(_base_gate(inner, f))
    raise ValueError(f"unknown gate {name!r}")


STANDARD_GATES = (
    "X", "Z", "S", "T", "sqrtT", "H", "Htilde", "Sy", "Ty",
    "CX", "CZ", "CS", "CH", "CT", "CSy", "CTy",
    "CCZ", "CCS", "CCSy", "SWAP",
)


def controlled(u: ExactMatrix) -> ExactMatrix:
    """Controlled-U with the control as the leading qubit."""
    f = u.field
    n = u.rows
    num = [[f.zero] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        num[i][i] = f.one
    if u.denom_exp:
        xik = f.one
        for _ in range(u.denom_exp):
            xik = f.mul(xik, f.xi)
        for i in range(n):
            num[i][i] = xik
    for i in range(n):
        for j in range(n):
            num[n + i][n + j] = u.num[i][j]
    return ExactMatrix(f, num, u.denom_exp)


def standard_gate(name, n, targets, f: FieldSpec) -> ExactMatrix:
    """The 2^n x 2^n matrix with the named gate on `targets` and identity
    elsewhere."""
    g = _base_gate(name, f)
    k = g.rows.bit_length() - 1
    if len(targets) != k:
        raise ValueError(f"{name} acts on {k} qubits, got targets {targets}")
    if len(set(targets)) != k or any(t < 0 or t >= n for t in targets):
        raise ValueError(f"targets {targets} invalid for {n} qubits")
    return embed(g, n, targets)


def embed(g: ExactMatrix, n, targets) -> ExactMatrix:
    """Place a k-qubit gate on the given qubits of an n-qubit register."""
    f = g.field
    k = len(targets)
    if len(set(targets)) != k or any(not 0 <= q < n for q in targets):
        raise ValueError(f"bad target qubits {targets} for n={n}")
    if g.rows != (1 << k):
        raise ValueError(f"gate is {g.rows}x{g.cols}, expected {1 << k} rows")
    dim = 1 << n
    rest = [q for q in range(n) if q not in targets]
    num = [[f.zero] * dim for _ in range(dim)]
    xik = f.one
    for _ in range(g.denom_exp):
        xik = f.mul(xik, f.xi)

    def bits(x, qs):
        return tuple((x >> (n - 1 - q)) & 1 for q in qs)

    def gidx(bts):
        out = 0
        for b in bts:
            out = (out << 1) | b
        return out

    for row in range(dim):
        rb = bits(row, targets)
        rrest = bits(row, rest)
        for col in range(dim):
            if bits(col, rest) != rrest:
                continue
            e = g.num[gidx(rb)][gidx(bits(col, targets))]
            num[row][col] = e
    return ExactMatrix(f, num, g.denom_exp)


def basis_matrix(kind, n, f: FieldSpec):
    """(B, B_inverse) for B the n-fold tensor power of the complex or real
    single-qubit basis-change matrix. n = 0 gives the 1x1 identity."""
    c = _consts(f)
    if kind == "complex":
        (w,) = _need(f, "inv_one_plus_i")
        b1 = _mat(f, [[w, c["0"]], [w, c["1"]]])
        # inverse of [[1/(1+i),0],[1/(1+i),1]] is [[1+i,0],[-1,1]]
        onepi = ExactScalar(f, f.add(f.one, c["i"].num))
        b1i = _mat(f, [[onepi, c["0"]], [c["-1"], c["1"]]])
    elif kind == "real":
        (w,) = _need(f, "inv_sqrt2")
        b1 = _mat(f, [[w, c["0"]], [w, c["1"]]])
        b1i = _mat(f, [[c["sqrt2"], c["0"]], [c["-1"], c["1"]]])
    else:
        raise ValueError(f"unknown basis kind {kind!r}")
    b = ExactMatrix.identity(f, 1)
    binv = ExactMatrix.identity(f, 1)
    for _ in range(n):
        b = b.kron(b1)
        binv = binv.kron(b1i)
    return b, binv


def pad_isometry(u: ExactMatrix, n_in, n_out) -> ExactMatrix:
    """Restrict a 2^n_out unitary to its first 2^n_in columns (U * I_pad)."""
    if u.rows != (1 << n_out) or u.cols != (1 << n_out) or n_in > n_out:
        raise DimensionMismatchError("pad_isometry dimension mismatch")
    return u.columns(range(1 << n_in))


def permutation_unitary(sigma, f: FieldSpec) -> ExactMatrix:
    """0/1 matrix mapping basis state j to sigma(j)."""
    dim = len(sigma)
    if sorted(sigma) != list(range(dim)):
        raise ValueError("sigma is not a bijection")
    num = [[f.zero] * dim for _ in range(dim)]
    for j, sj in enumerate(sigma):
        num[sj][j] = f.one
    return ExactMatrix(f, num)


def v_isometry(a, b, c, d, f: FieldSpec) -> ExactMatrix:
    """The 4x2 isometry (1/sqrt(2^k)) [aI + ibX + icY + idZ ; I] with
    a^2+b^2+c^2+d^2 = 2^k - 1."""
    s = a * a + b * b + c * c + d * d
    k = (s + 1).bit_length() - 1
    if s == 0 or (1 << k) - 1 != s:
        raise ValueError(f"a^2+b^2+c^2+d^2 = {s} is not of the form 2^k - 1")
    (i,) = _need(f, "i")
    iv = i.num
    one = f.one
    # top block aI + ibX + icY + idZ with Y = [[0,-i],[i,0]]
    m00 = f.add(f.scal(a, one), f.scal(d, iv))
    m01 = f.add(f.scal(b, iv), f.scal(c, one))  # ib*X(0,1) + ic*(-i) = ib + c
    m10 = f.add(f.scal(b, iv), f.scal(-c, one))  # ib + ic*i = ib - c
    m11 = f.sub(f.scal(a, one), f.scal(d, iv))
    num = [
        [m00, m01],
        [m10, m11],
        [one, f.zero],
        [f.zero, one],
    ]
    # Overall scale: a ring element r with r * conj(r) = 2^k and full xi
    # support, namely r = xi^(k*d/2) / s^k where the unit s satisfies
    # s * conj(s) = (xi * conj(xi))^(d/2) / 2.  The synthesized isometry is
    # the textbook one up to a global phase.
    if f.name == "Qi":
        s = one
    elif f.name == "Qzeta8":
        s = (1, 1, 0, -1)  # 1 + sqrt(2)
    else:
        raise FieldMismatchError(f"v_isometry requires Qi or Qzeta8, got {f.name}")
    denom = k * f.degree // 2
    sk = one
    for _ in range(k):
        sk = f.mul(sk, s)
    num2 = [[f.mul(e, sk) for e in row] for row in num]
    return ExactMatrix(f, num2, denom)
