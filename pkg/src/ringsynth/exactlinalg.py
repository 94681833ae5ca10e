"""Exact matrices over xi-rings, integer HNF, xi-local Smith valuations,
and weak-majorization utilities."""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np

try:  # optional accelerator; everything falls back to plain numpy
    from numba import njit
except ImportError:  # pragma: no cover
    njit = None

from .numberfield import FieldSpec, NotDivisibleError, z_of_matrix


class DimensionMismatchError(ValueError):
    pass


class ValuationBoundError(ArithmeticError):
    """Raised when the local SNF working modulus is exhausted."""


class ExactScalar:
    """A xi-ring element num / xi^k, kept fully reduced."""

    __slots__ = ("field", "num", "denom_exp")

    def __init__(self, field: FieldSpec, num, denom_exp=0):
        while denom_exp > 0:
            y = field.try_divide_by_xi(num)
            if y is None:
                break
            num = y
            denom_exp -= 1
        if not any(num):
            denom_exp = 0
        self.field = field
        self.num = tuple(num)
        self.denom_exp = denom_exp

    def __eq__(self, other):
        return (
            isinstance(other, ExactScalar)
            and self.field is other.field
            and self.num == other.num
            and self.denom_exp == other.denom_exp
        )

    def __hash__(self):
        return hash((self.field.name, self.num, self.denom_exp))

    def __repr__(self):
        return f"ExactScalar({self.num}, xi^-{self.denom_exp})"


class ExactMatrix:
    """Matrix over a xi-ring, stored as a ring-integer numerator matrix plus
    one global denominator exponent (minimal: zero, or some entry has
    xi-valuation zero)."""

    __slots__ = ("field", "rows", "cols", "num", "denom_exp")

    def __init__(self, field, num, denom_exp=0):
        rows = len(num)
        cols = len(num[0]) if rows else 0
        num = [[tuple(e) for e in r] for r in num]
        if denom_exp > 0:
            shift = denom_exp
            for r in num:
                for e in r:
                    v = field.xi_valuation(e, cap=shift)
                    if v is not math.inf:
                        shift = min(shift, v)
                    if shift == 0:
                        break
                if shift == 0:
                    break
            if all(not any(e) for r in num for e in r):
                denom_exp = 0
            elif shift:
                num = [[field.divide_by_xi(e, shift) for e in r] for r in num]
                denom_exp -= shift
        self.field = field
        self.rows = rows
        self.cols = cols
        self.num = num
        self.denom_exp = denom_exp

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_scalars(cls, field, scalars):
        k = max((s.denom_exp for row in scalars for s in row), default=0)
        num = []
        for row in scalars:
            out = []
            for s in row:
                x = s.num
                for _ in range(k - s.denom_exp):
                    x = field.mul(x, field.xi)
                out.append(x)
            num.append(out)
        return cls(field, num, k)

    @classmethod
    def identity(cls, field, n):
        return cls(
            field,
            [[field.one if i == j else field.zero for j in range(n)] for i in range(n)],
        )

    @classmethod
    def zeros(cls, field, rows, cols):
        return cls(field, [[field.zero] * cols for _ in range(rows)])

    def entry(self, i, j):
        return ExactScalar(self.field, self.num[i][j], self.denom_exp)

    # -- algebra ----------------------------------------------------------

    def __matmul__(self, other):
        if self.cols != other.rows or self.field is not other.field:
            raise DimensionMismatchError(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        f = self.field
        a, b = self.num, other.num
        out = []
        for i in range(self.rows):
            arow = a[i]
            orow = []
            for j in range(other.cols):
                acc = f.zero
                for k in range(self.cols):
                    if any(arow[k]) and any(b[k][j]):
                        acc = f.add(acc, f.mul(arow[k], b[k][j]))
                orow.append(acc)
            out.append(orow)
        return ExactMatrix(f, out, self.denom_exp + other.denom_exp)

    def dagger(self):
        """Conjugate transpose; exact over the field's conjugation."""
        f = self.field
        k = self.denom_exp
        # 1 / conj(xi)^k = w^k / xi^k with w = xi / conj(xi), a unit.
        w = _xi_over_conj_xi(f)
        wk = f.one
        for _ in range(k):
            wk = f.mul(wk, w)
        out = [
            [f.mul(f.conj(self.num[i][j]), wk) for i in range(self.rows)]
            for j in range(self.cols)
        ]
        return ExactMatrix(f, out, k)

    def transpose(self):
        out = [[self.num[i][j] for i in range(self.rows)] for j in range(self.cols)]
        return ExactMatrix(self.field, out, self.denom_exp)

    def kron(self, other):
        f = self.field
        out = []
        for i in range(self.rows):
            for k in range(other.rows):
                row = []
                for j in range(self.cols):
                    for l in range(other.cols):
                        row.append(f.mul(self.num[i][j], other.num[k][l]))
                out.append(row)
        return ExactMatrix(f, out, self.denom_exp + other.denom_exp)

    def scale(self, s: ExactScalar):
        f = self.field
        out = [[f.mul(s.num, e) for e in r] for r in self.num]
        return ExactMatrix(f, out, self.denom_exp + s.denom_exp)

    def columns(self, js):
        out = [[r[j] for j in js] for r in self.num]
        return ExactMatrix(self.field, out, self.denom_exp)

    def __eq__(self, other):
        return (
            isinstance(other, ExactMatrix)
            and self.field is other.field
            and self.denom_exp == other.denom_exp
            and self.num == other.num
        )

    def __hash__(self):
        return hash(
            (self.field.name, self.denom_exp, tuple(tuple(r) for r in self.num))
        )

    def is_identity(self):
        f = self.field
        return (
            self.rows == self.cols
            and self.denom_exp == 0
            and all(
                self.num[i][j] == (f.one if i == j else f.zero)
                for i in range(self.rows)
                for j in range(self.cols)
            )
        )

    def is_isometry(self):
        """True iff dagger(A) @ A is exactly the identity."""
        if self.rows < self.cols:
            return False
        return (self.dagger() @ self).is_identity()

    def integral(self):
        """The ring-integer entry matrix; requires denominator exponent 0."""
        if self.denom_exp != 0:
            raise ValueError("matrix has a nontrivial xi denominator")
        return self.num

    def __repr__(self):
        return f"ExactMatrix({self.rows}x{self.cols} over {self.field.name}, xi^-{self.denom_exp})"


def _xi_over_conj_xi(f: FieldSpec):
    """Unit w with xi = w * conj(xi) (xi generates a totally ramified prime),
    solved exactly over the rationals and cached on the field."""
    cached = getattr(f, "_xi_conj_unit", None)
    if cached is not None:
        return cached
    from fractions import Fraction

    d = f.degree
    xc = f.conj(f.xi)
    m = [[Fraction(v) for v in row] for row in f.repr_matrix(xc)]
    rhs = [Fraction(v) for v in f.xi]
    for col in range(d):
        piv = next(r for r in range(col, d) if m[r][col] != 0)
        m[col], m[piv] = m[piv], m[col]
        rhs[col], rhs[piv] = rhs[piv], rhs[col]
        inv = 1 / m[col][col]
        m[col] = [v * inv for v in m[col]]
        rhs[col] *= inv
        for r in range(d):
            if r != col and m[r][col]:
                fac = m[r][col]
                m[r] = [a - fac * b for a, b in zip(m[r], m[col])]
                rhs[r] -= fac * rhs[col]
    assert all(v.denominator == 1 for v in rhs)
    w = tuple(int(v) for v in rhs)
    f._xi_conj_unit = w
    return w


# ---------------------------------------------------------------------------
# Integer Hermite Normal Form


def _hnf_modular_pow2(rows, ncols, modulus):
    """Modular row HNF for a power-of-two modulus D = 2^m.

    Valid when D * Z^ncols lies in the row lattice.  Every pivot is then a
    power of two, so one normalization (odd-unit inverse mod D) and one
    elimination pass settle each column.
    """
    m = modulus.bit_length() - 1
    nbase = len(rows)
    h = [[x % modulus for x in row] for row in rows]
    r = 0
    for c in range(ncols):
        best_k = m
        piv = None
        for i in range(r, len(h)):
            x = h[i][c]
            if x:
                k = (x & -x).bit_length() - 1
                if k < best_k:
                    best_k = k
                    piv = i
                    if k == 0:
                        break
        if piv is None:
            # column is zero mod D; the canonical pivot is D itself
            row = [0] * ncols
            row[c] = modulus
            h.insert(r, row)
            r += 1
            continue
        k = best_k
        prow = h[piv]
        unit = prow[c] >> k
        if unit != 1:
            uinv = pow(unit, -1, modulus)
            prow = [(v * uinv) % modulus for v in prow]
        h[piv] = h[r]
        h[r] = prow
        for i in range(len(h)):
            if i == r:
                continue
            q = h[i][c] >> k
            if q:
                hi = h[i]
                h[i] = [(a - q * b) % modulus for a, b in zip(hi, prow)]
        r += 1
    return h[:nbase]


_MASK31 = (1 << 31) - 1


def _mulmod_pow2(a, b, mask):
    """a * b mod 2^m on int64 arrays with m <= 62, overflow-free.

    Splits both factors at 31 bits so every intermediate product stays
    below 2^62 and the final sum below 2^63.
    """
    a0 = a & _MASK31
    b0 = b & _MASK31
    cross = (a0 * (b >> 31) + (a >> 31) * b0) & (mask >> 31)
    return (a0 * b0 + (cross << 31)) & mask


def hnf_pow2_array(z, modulus):
    """_hnf_modular_pow2 on an int64 array, for modulus up to 2^62."""
    m = modulus.bit_length() - 1
    mask = modulus - 1
    wide = m > 31
    nbase, ncols = z.shape
    buf = np.zeros((nbase + ncols, ncols), dtype=np.int64)
    buf[:nbase] = z & mask
    nrows = nbase
    r = 0
    for c in range(ncols):
        col = buf[r:nrows, c]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            buf[r + 1:nrows + 1] = buf[r:nrows].copy()
            buf[r] = 0
            buf[r, c] = modulus
            nrows += 1
            r += 1
            continue
        lows = col[nz]
        ks = np.log2((lows & -lows).astype(np.float64)).astype(np.int64)
        j = int(np.argmin(ks))
        k = int(ks[j])
        piv = r + int(nz[j])
        if piv != r:
            buf[[r, piv]] = buf[[piv, r]]
        unit = int(buf[r, c]) >> k
        if unit != 1:
            uinv = pow(unit, -1, modulus)
            if wide:
                buf[r] = _mulmod_pow2(buf[r],
                                      np.int64(uinv), mask)
            else:
                buf[r] = (buf[r] * uinv) & mask
        q = buf[:nrows, c] >> k
        q[r] = 0
        nzq = np.nonzero(q)[0]
        if nzq.size:
            # touch only rows with a nonzero quotient; a blanket reduction
            # would fold inserted pivots equal to the modulus down to zero
            if wide:
                buf[nzq] = (buf[nzq] -
                            _mulmod_pow2(q[nzq, None], buf[r], mask)) & mask
            else:
                buf[nzq] = (buf[nzq] - q[nzq, None] * buf[r]) & mask
        r += 1
    return buf[:nbase]


def hnf_integer(a, modulus=None):
    """Row-style Hermite Normal Form H = U A for unimodular U.

    Upper-triangular profile with positive pivots; entries above each pivot
    reduced into [0, pivot). Zero rows sort last. With `modulus` D set
    (valid only when D * Z^cols is contained in the row lattice, e.g. square
    A with |det A| dividing D), all entries are kept reduced mod D.

    Accepts and returns a list of lists of ints.
    """
    h = [list(row) for row in a]
    if not h:
        return h
    ncols = len(h[0])
    if modulus is not None and modulus & (modulus - 1) == 0 and modulus > 1:
        return _hnf_modular_pow2(h, ncols, modulus)
    if modulus is not None:
        h = [[x % modulus for x in row] for row in h]
    nrows = len(h)
    r = 0
    for c in range(ncols):
        if modulus is not None:
            # a fresh modulus row guarantees the column gcd divides D and
            # keeps every reduction lattice-preserving
            row = [0] * ncols
            row[c] = modulus
            h.append(row)
            nrows = len(h)
        if r >= nrows:
            break
        while True:
            nz = [i for i in range(r, nrows) if h[i][c]]
            if not nz:
                break
            # pivot: smallest absolute value, then lowest row index
            piv = min(nz, key=lambda i: (abs(h[i][c]), i))
            h[r], h[piv] = h[piv], h[r]
            done = True
            p = h[r][c]
            for i in range(r + 1, nrows):
                if h[i][c]:
                    q = h[i][c] // p
                    if q:
                        h[i] = [x - q * y for x, y in zip(h[i], h[r])]
                    if h[i][c]:
                        done = False
            if modulus is not None:
                for i in range(r + 1, nrows):
                    h[i] = [x % modulus for x in h[i]]
            if done:
                break
        if r < nrows and h[r][c]:
            if h[r][c] < 0:
                h[r] = [-x for x in h[r]]
            p = h[r][c]
            for i in range(r):
                q = h[i][c] // p
                if q:
                    h[i] = [x - q * y for x, y in zip(h[i], h[r])]
            r += 1
    if modulus is not None:
        h = h[: len(a)]
    return h


# ---------------------------------------------------------------------------
# xi-local Smith Normal Form valuations


_UNIT_INV_MEMO = {}


def _unit_inverse_mod(f: FieldSpec, w, kexp):
    """Inverse of w in O_E / 2^kexp plus its transposed repr matrix.

    Starts from the inverse mod 2 (linear solve over GF(2)) and Newton-lifts.
    """
    memo_key = (f.name, w, kexp)
    hit = _UNIT_INV_MEMO.get(memo_key)
    if hit is not None:
        return hit
    d = f.degree
    # solve repr_matrix(w) y = e1 over GF(2)
    m = [list(row) + [1 if i == 0 else 0] for i, row in enumerate(f.repr_matrix(w))]
    m = [[x & 1 for x in row] for row in m]
    r = 0
    piv_cols = []
    for c in range(d):
        piv = next((i for i in range(r, d) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(d):
            if i != r and m[i][c]:
                m[i] = [x ^ y for x, y in zip(m[i], m[r])]
        piv_cols.append(c)
        r += 1
    if r < d:
        raise ValuationBoundError("element not invertible mod 2")
    y = [0] * d
    for i, c in enumerate(piv_cols):
        y[c] = m[i][d]
    y = tuple(y)
    mexp = 1
    two = (2,) + (0,) * (d - 1)
    while mexp < kexp:
        mexp = min(2 * mexp, kexp)
        mod = 1 << mexp
        wy = f.mul(w, y)
        corr = f.sub(two, wy)
        y = tuple(c % mod for c in f.mul(y, corr))
    out = (y, np.array(f.repr_matrix(y), dtype=np.int64).T)
    _UNIT_INV_MEMO[memo_key] = out
    return out


def xi_local_snf_valuations(a: ExactMatrix, vmax):
    """xi-adic valuations of the invariant factors of a matrix over O_E,
    sorted non-decreasing.

    Works by Gaussian elimination over O_E / 2^K with the pivot chosen as an
    entry of minimal xi-valuation; valid when every invariant factor is a
    power of xi with valuation <= vmax.
    """
    return snf_valuations_array(np.array(a.integral(), dtype=np.int64),
                                a.field, vmax)


if njit is not None:
    @njit(cache=True)
    def _snf_kernel(x, nnz, ts, vs, mcof_t, kexp, cap):  # pragma: no cover
        """Jitted xi-local elimination on a (n, m, d) int64 block mod 2^kexp.

        Pivot rows are never divided: the other rows are scaled by the
        pivot unit instead, which is an equally unimodular move and keeps
        the whole kernel inversion-free.  Returns (valuations, flag) with
        flag < 0 when every remaining entry exhausts the cap.
        """
        mod = np.int64(1) << kexp
        mask = mod - 1
        n, m, d = x.shape
        steps = min(n, m)
        vals = np.empty(steps, np.int64)
        tmp = np.empty(d, np.int64)
        y = np.empty(d, np.int64)
        w = np.empty(d, np.int64)
        ci = np.empty(d, np.int64)
        nrow = np.empty(d, np.int64)
        for s in range(steps):
            bestv = cap
            bi = -1
            bj = -1
            for i in range(s, n):
                for j in range(s, m):
                    zero = True
                    for t in range(d):
                        if x[i, j, t] != 0:
                            zero = False
                            break
                    if zero:
                        continue
                    for t in range(d):
                        tmp[t] = x[i, j, t]
                    v = 0
                    while v < bestv:
                        odd = False
                        for t in range(d):
                            acc = np.int64(0)
                            for a in range(d):
                                acc += tmp[a] * mcof_t[a, t]
                            y[t] = acc
                            if acc & 1:
                                odd = True
                        if odd:
                            break
                        for t in range(d):
                            tmp[t] = (y[t] >> 1) & mask
                        v += 1
                    if v < bestv:
                        bestv = v
                        bi = i
                        bj = j
            if bi < 0:
                return vals, -1
            vals[s] = bestv
            if bi != s:
                for j in range(m):
                    for t in range(d):
                        h = x[s, j, t]
                        x[s, j, t] = x[bi, j, t]
                        x[bi, j, t] = h
            if bj != s:
                for i in range(n):
                    for t in range(d):
                        h = x[i, s, t]
                        x[i, s, t] = x[i, bj, t]
                        x[i, bj, t] = h
            # pivot unit w = pivot / xi^bestv
            for t in range(d):
                w[t] = x[s, s, t]
            for _ in range(bestv):
                for t in range(d):
                    acc = np.int64(0)
                    for a in range(d):
                        acc += w[a] * mcof_t[a, t]
                    y[t] = acc
                for t in range(d):
                    w[t] = (y[t] >> 1) & mask
            for i in range(s + 1, n):
                zero = True
                for t in range(d):
                    if x[i, s, t] != 0:
                        zero = False
                        break
                if zero:
                    continue
                for t in range(d):
                    ci[t] = x[i, s, t]
                for _ in range(bestv):
                    for t in range(d):
                        acc = np.int64(0)
                        for a in range(d):
                            acc += ci[a] * mcof_t[a, t]
                        y[t] = acc
                    for t in range(d):
                        ci[t] = (y[t] >> 1) & mask
                for j in range(s, m):
                    for t in range(d):
                        nrow[t] = 0
                    for a in range(d):
                        wa = w[a]
                        ca = ci[a]
                        if wa == 0 and ca == 0:
                            continue
                        for b in range(d):
                            q = wa * x[i, j, b] - ca * x[s, j, b]
                            if q == 0:
                                continue
                            for u in range(nnz[a, b]):
                                nrow[ts[a, b, u]] += q * vs[a, b, u]
                    for t in range(d):
                        x[i, j, t] = nrow[t] & mask
        return vals, 0
    @njit(cache=True)
    def _mul_strip_kernel(gen, x, nnz, ts, vs, mcof_t):  # pragma: no cover
        """(gen @ x, strips) for (R, R, d) x (R, C, d) coordinate blocks,
        with the product divided by the largest possible power of xi."""
        R, C, d = x.shape
        raw = np.zeros((R, C, d), np.int64)
        for r in range(R):
            for k in range(R):
                live = False
                for a in range(d):
                    if gen[r, k, a] != 0:
                        live = True
                        break
                if not live:
                    continue
                for c in range(C):
                    for a in range(d):
                        ga = gen[r, k, a]
                        if ga == 0:
                            continue
                        for b in range(d):
                            xb = x[k, c, b]
                            if xb == 0:
                                continue
                            p = ga * xb
                            for u in range(nnz[a, b]):
                                raw[r, c, ts[a, b, u]] += p * vs[a, b, u]
        strips = 0
        y = np.empty((R, C, d), np.int64)
        while True:
            nonzero = False
            alleven = True
            for r in range(R):
                for c in range(C):
                    for t in range(d):
                        acc = np.int64(0)
                        for a in range(d):
                            acc += raw[r, c, a] * mcof_t[a, t]
                        y[r, c, t] = acc
                        if acc & 1:
                            alleven = False
                        if raw[r, c, t] != 0:
                            nonzero = True
            if not nonzero or not alleven:
                break
            for r in range(R):
                for c in range(C):
                    for t in range(d):
                        raw[r, c, t] = y[r, c, t] >> 1
            strips += 1
        return raw, strips

    @njit(cache=True)
    def _batch_step_kernel(gens, gnus, x, nu_val, nnz, ts, vs, mcof_t):  # pragma: no cover
        """For every generator: nu of the product with x and the sorted
        invariant-factor valuations of its reduced form.

        A flag value below -10^8 in the nu slot marks a valuation-bound
        failure for that neighbor.
        """
        G = gens.shape[0]
        R = x.shape[0]
        d = x.shape[2]
        nnus = np.empty(G, np.int64)
        vals = np.zeros((G, R), np.int64)
        for g in range(G):
            nx, strips = _mul_strip_kernel(gens[g], x, nnz, ts, vs, mcof_t)
            nnu = gnus[g] + nu_val - strips
            nnus[g] = nnu
            if nnu == 0:
                continue
            kexp = (2 * nnu + d) // d + 2
            cap = d * kexp - d
            mask = (np.int64(1) << kexp) - 1
            work = np.empty((R, R, d), np.int64)
            for r in range(R):
                for c in range(R):
                    for t in range(d):
                        work[r, c, t] = nx[r, c, t] & mask
            v, flag = _snf_kernel(work, nnz, ts, vs, mcof_t, kexp, cap)
            if flag < 0:
                nnus[g] = np.int64(-10**9)
                continue
            v.sort()
            for i in range(R):
                vals[g, i] = v[i]
        return nnus, vals

    @njit(cache=True)
    def _mulmod62(a, b, mask):  # pragma: no cover
        a0 = a & np.int64(0x7FFFFFFF)
        b0 = b & np.int64(0x7FFFFFFF)
        cross = (a0 * (b >> 31) + (a >> 31) * b0) & (mask >> 31)
        return (a0 * b0 + (cross << 31)) & mask

    @njit(cache=True)
    def _inv_odd_mod(u, mask):  # pragma: no cover
        # Newton lifting from the inverse mod 2; six rounds cover 64 bits
        inv = np.int64(1)
        for _ in range(6):
            t = (np.int64(2) - _mulmod62(u, inv, mask)) & mask
            inv = _mulmod62(inv, t, mask)
        return inv

    @njit(cache=True)
    def _hnf_pow2_kernel(z, mexp):  # pragma: no cover
        """hnf_pow2_array as a jitted kernel, mexp <= 62."""
        modulus = np.int64(1) << mexp
        mask = modulus - 1
        nbase, ncols = z.shape
        buf = np.zeros((nbase + ncols, ncols), np.int64)
        for i in range(nbase):
            for j in range(ncols):
                buf[i, j] = z[i, j] & mask
        nrows = nbase
        r = 0
        for c in range(ncols):
            bestk = mexp + 1
            piv = -1
            for i in range(r, nrows):
                v = buf[i, c]
                if v != 0:
                    k = 0
                    while (v >> k) & 1 == 0:
                        k += 1
                    if k < bestk:
                        bestk = k
                        piv = i
                        if k == 0:
                            break
            if piv < 0:
                for i in range(nrows, r, -1):
                    for j in range(ncols):
                        buf[i, j] = buf[i - 1, j]
                for j in range(ncols):
                    buf[r, j] = 0
                buf[r, c] = modulus
                nrows += 1
                r += 1
                continue
            k = bestk
            if piv != r:
                for j in range(ncols):
                    h = buf[r, j]
                    buf[r, j] = buf[piv, j]
                    buf[piv, j] = h
            unit = buf[r, c] >> k
            if unit != 1:
                uinv = _inv_odd_mod(unit, mask)
                for j in range(ncols):
                    buf[r, j] = _mulmod62(buf[r, j], uinv, mask)
            for i in range(nrows):
                if i == r:
                    continue
                q = buf[i, c] >> k
                if q != 0:
                    # rows with a zero quotient keep any modulus-pivots intact
                    for j in range(ncols):
                        buf[i, j] = (buf[i, j] -
                                     _mulmod62(q, buf[r, j], mask)) & mask
            r += 1
        return buf[:nbase]
else:  # pragma: no cover
    _snf_kernel = None
    _mul_strip_kernel = None
    _batch_step_kernel = None
    _hnf_pow2_kernel = None


def snf_valuations_array(x, f: FieldSpec, vmax):
    """xi_local_snf_valuations on a raw (rows, cols, degree) int64 array."""
    d = f.degree
    mt, mcof_t = _np_ring_tables(f)
    kexp = (vmax + 1 + d - 1) // d + 2
    mod = 1 << kexp
    cap = d * kexp - d
    if _snf_kernel is not None:
        nnz, ts, vs = _np_mul_sparse(f)
        vals, flag = _snf_kernel(np.ascontiguousarray(x % mod), nnz, ts, vs,
                                 mcof_t, kexp, cap)
        if flag < 0:
            raise ValuationBoundError(
                "all remaining entries exhausted the working modulus; "
                "vmax too small or invariant factors not powers of xi"
            )
        return tuple(sorted(int(v) for v in vals))
    return _snf_valuations_numpy(x, f, vmax)


def _snf_valuations_numpy(x, f: FieldSpec, vmax):
    """Pure-numpy fallback for snf_valuations_array."""
    d = f.degree
    mt, mcof_t = _np_ring_tables(f)
    kexp = (vmax + 1 + d - 1) // d + 2
    mod = 1 << kexp
    cap = d * kexp - d
    x = x % mod  # (rows, cols, d)
    nrows, ncols = x.shape[0], x.shape[1]
    steps = min(nrows, ncols)
    vals = []

    for s in range(steps):
        v, fi = _np_min_valuation(x[s:, s:], mcof_t, cap, mod)
        if fi < 0:
            raise ValuationBoundError(
                "all remaining entries exhausted the working modulus; "
                "vmax too small or invariant factors not powers of xi"
            )
        vals.append(v)
        si, sj = divmod(fi, ncols - s)
        # swap the pivot into the leading corner (a permutation equivalence)
        if si:
            x[[s, s + si]] = x[[s + si, s]]
        if sj:
            x[:, [s, s + sj]] = x[:, [s + sj, s]]
        w = tuple(int(c) for c in _np_div_xi(x[s, s], mcof_t, v, mod))
        _, mw_t = _unit_inverse_mod(f, w, kexp)
        # clear the pivot column with row operations; the pivot row then
        # clears by column operations that touch nothing else, so dropping
        # to the trailing block is equivalent
        colv = x[s + 1:, s]                           # (r, d)
        if colv.size:
            q = (_np_div_xi(colv, mcof_t, v, mod) @ mw_t) % mod
            delta = np.einsum("ra,cb,abt->rct", q, x[s, s:], mt)
            x[s + 1:, s:] = (x[s + 1:, s:] - delta) % mod
    return tuple(sorted(vals))


def _np_ring_tables(f: FieldSpec):
    """(mul table, transposed xi-cofactor repr matrix) as int64 arrays."""
    cached = getattr(f, "_np_tables", None)
    if cached is not None:
        return cached
    d = f.degree
    mt = np.zeros((d, d, d), dtype=np.int64)
    for i in range(d):
        for j in range(d):
            mt[i, j] = f.mul_table[i][j]
    mcof_t = np.array(f.repr_matrix(f._xi_cofactor), dtype=np.int64).T
    f._np_tables = (mt, mcof_t)
    return f._np_tables


def _np_mul_sparse(f: FieldSpec):
    """Sparse structure constants: (counts (d,d), targets, coefficients).

    For the monomial power bases here most basis products reduce to a
    single term, so the kernels iterate nonzeros instead of scanning t.
    """
    cached = getattr(f, "_np_mul_sparse", None)
    if cached is not None:
        return cached
    mt, _ = _np_ring_tables(f)
    d = f.degree
    nnz = np.zeros((d, d), dtype=np.int64)
    ts = np.zeros((d, d, d), dtype=np.int64)
    vs = np.zeros((d, d, d), dtype=np.int64)
    for a in range(d):
        for b in range(d):
            k = 0
            for t in range(d):
                if mt[a, b, t]:
                    ts[a, b, k] = t
                    vs[a, b, k] = mt[a, b, t]
                    k += 1
            nnz[a, b] = k
    f._np_mul_sparse = (nnz, ts, vs)
    return f._np_mul_sparse


def np_repr_tensor(f: FieldSpec):
    """Stacked representation matrices of the power basis, int64 (d, d, d):
    rt[t] = repr_matrix(b_t), so repr(x) = sum_t x_t rt[t]."""
    cached = getattr(f, "_np_repr", None)
    if cached is not None:
        return cached
    d = f.degree
    rt = np.zeros((d, d, d), dtype=np.int64)
    basis = [tuple(1 if i == t else 0 for i in range(d)) for t in range(d)]
    for t in range(d):
        rt[t] = f.repr_matrix(basis[t])
    f._np_repr = rt
    return rt


def np_mul_table(f: FieldSpec):
    """Structure constants as int64 (d, d, d): (xy)_t = x_i y_j mt[i,j,t]."""
    return _np_ring_tables(f)[0]


def np_strip_xi(x, f: FieldSpec):
    """Divide an exact int64 coordinate array (..., d) by the largest
    possible power of xi; returns (reduced array, power stripped)."""
    _, mcof_t = _np_ring_tables(f)
    strips = 0
    while x.any():
        y = x @ mcof_t
        if ((y & 1) != 0).any():
            break
        x = y >> 1
        strips += 1
    return x, strips


def _np_div_xi(arr, mcof_t, t, mod):
    """Divide coordinate vectors (..., d) by xi^t; valuations must allow it."""
    for _ in range(t):
        arr = ((arr @ mcof_t) >> 1) % mod
    return arr


def _np_valuations(x, mcof_t, cap, mod):
    """Capped xi-valuation of every coordinate vector in x (..., d)."""
    shape = x.shape[:-1]
    out = np.full(shape, cap, dtype=np.int64)
    cur = x.reshape(-1, x.shape[-1]).copy()
    flat = out.reshape(-1)
    active = cur.any(axis=1)
    for v in range(cap):
        if not active.any():
            break
        y = cur @ mcof_t
        div = ((y & 1) == 0).all(axis=1)
        stop = active & ~div
        flat[stop] = v
        active &= div
        cur[active] = (y[active] >> 1) % mod
    return out


def _np_min_valuation(x, mcof_t, cap, mod):
    """(min xi-valuation, first row-major flat index attaining it) over x.

    Returns (cap, -1) when every entry is zero or exceeds the cap, so the
    caller can treat the block as exhausted.
    """
    flat = x.reshape(-1, x.shape[-1])
    if not flat.any():
        return cap, -1
    v = 0
    while v < cap:
        y = flat @ mcof_t
        odd = (y & 1).any(axis=1)
        if odd.any():
            return v, int(np.argmax(odd))
        # zero rows stay zero under division, so no aliveness tracking
        flat = (y >> 1) % mod
        v += 1
    return cap, -1


def invariant_factor_oracle_minors(a: ExactMatrix):
    """Invariant-factor valuations via gcd of j-rowed minors (oracle).

    Exhaustive minor enumeration; dimensions at most 4.
    """
    f = a.field
    ent = a.integral()
    nrows, ncols = a.rows, a.cols
    if max(nrows, ncols) > 4:
        raise ValueError("oracle limited to dimension <= 4")
    r = min(nrows, ncols)
    deltas = []
    for j in range(1, r + 1):
        best = math.inf
        for rs in combinations(range(nrows), j):
            for cs in combinations(range(ncols), j):
                det = _det([[ent[i][k] for k in cs] for i in rs], f)
                v = f.xi_valuation(det)
                if v < best:
                    best = v
        deltas.append(best)
    out = []
    prev = 0
    for v in deltas:
        out.append(v - prev)
        prev = v
    return tuple(out)


def _det(m, f: FieldSpec):
    n = len(m)
    if n == 1:
        return m[0][0]
    acc = f.zero
    for j in range(n):
        if not any(m[0][j]):
            continue
        minor = [row[:j] + row[j + 1 :] for row in m[1:]]
        term = f.mul(m[0][j], _det(minor, f))
        acc = f.add(acc, term) if j % 2 == 0 else f.sub(acc, term)
    return acc


# ---------------------------------------------------------------------------
# Majorization


def weakly_majorizes(y, x):
    """True iff every prefix sum of x is <= that of y (vectors non-increasing,
    equal length)."""
    if len(x) != len(y):
        raise ValueError("length mismatch")
    sx = sy = 0
    for a, b in zip(x, y):
        sx += a
        sy += b
        if sx > sy:
            return False
    return True


def strictly_weakly_majorizes(y, x):
    """weakly_majorizes plus at least one strictly smaller prefix sum."""
    if len(x) != len(y):
        raise ValueError("length mismatch")
    sx = sy = 0
    strict = False
    for a, b in zip(x, y):
        sx += a
        sy += b
        if sx > sy:
            return False
        if sx < sy:
            strict = True
    return strict


def z_of_exact(a: ExactMatrix):
    """Z(A) for a matrix with O_E entries, as list of lists of ints."""
    return z_of_matrix(a.integral(), a.field)
