"""Exact arithmetic in rings of integers of the supported number fields.

Elements are integer coordinate vectors over a fixed integral power basis
(1, g, g^2, ...) of the field.  Each supported field comes with a ramified
element xi whose d-th power is 2 times a unit; all denominators appearing
elsewhere in the package are powers of xi.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import product

RingElem = tuple  # length-d tuple of ints

SUPPORTED_FIELDS = ("Qi", "Qsqrt2", "Qzeta8", "Qzeta16", "Qcos_pi8")


class UnsupportedFieldError(ValueError):
    pass


class NotDivisibleError(ArithmeticError):
    pass


class FieldSpec:
    """A fixed number field: power-basis structure constants plus the
    ramified element xi with xi^d = 2 * unit."""

    def __init__(self, name, reduction, xi, conj_gen):
        """reduction: coords of g^d in the power basis (g = basis generator);
        conj_gen: coords of the conjugate of g."""
        self.name = name
        self.degree = len(reduction)
        self.p = 2
        self._reduction = tuple(reduction)
        self.xi = tuple(xi)
        d = self.degree
        self.zero = (0,) * d
        self.one = (1,) + (0,) * (d - 1)
        # power basis images g^0 .. g^(2d-2), reduced
        powers = [self.one]
        for _ in range(2 * d - 2):
            powers.append(self._shift(powers[-1]))
        self._powers = powers
        self.mul_table = tuple(
            tuple(powers[i + j] for j in range(d)) for i in range(d)
        )
        conj_cols = [self._pow_of(tuple(conj_gen), j) for j in range(d)]
        self.conj_matrix = tuple(
            tuple(conj_cols[j][i] for j in range(d)) for i in range(d)
        )
        xi_pow = self.one
        for _ in range(d):
            xi_pow = self.mul(xi_pow, self.xi)
        if any(c % self.p for c in xi_pow):
            raise ValueError(f"{name}: xi^d is not divisible by {self.p}")
        self.unit = tuple(c // self.p for c in xi_pow)
        self.unit_inv = self.inv_unit(self.unit)
        # x / xi = x * xi^(d-1) * unit_inv / p
        t = self.unit_inv
        for _ in range(d - 1):
            t = self.mul(t, self.xi)
        self._xi_cofactor = t
        self._validate()

    # -- basic ring operations ------------------------------------------

    def _shift(self, x):
        """Multiply by the basis generator g and reduce via g^d."""
        d = self.degree
        carry = x[d - 1]
        out = [0] + list(x[: d - 1])
        if carry:
            for i in range(d):
                out[i] += carry * self._reduction[i]
        return tuple(out)

    def _pow_of(self, x, e):
        out = self.one
        for _ in range(e):
            out = self.mul(out, x)
        return out

    def mul(self, x, y):
        d = self.degree
        out = [0] * d
        powers = self._powers
        for i in range(d):
            xi_c = x[i]
            if not xi_c:
                continue
            for j in range(d):
                c = xi_c * y[j]
                if c:
                    pw = powers[i + j]
                    for t in range(d):
                        out[t] += c * pw[t]
        return tuple(out)

    def add(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def sub(self, x, y):
        return tuple(a - b for a, b in zip(x, y))

    def neg(self, x):
        return tuple(-a for a in x)

    def scal(self, c, x):
        return tuple(c * a for a in x)

    def conj(self, x):
        d = self.degree
        cm = self.conj_matrix
        return tuple(sum(cm[i][j] * x[j] for j in range(d)) for i in range(d))

    def is_zero(self, x):
        return not any(x)

    # -- xi valuation and division --------------------------------------

    def try_divide_by_xi(self, x):
        """Return x / xi if exactly divisible, else None."""
        y = self.mul(x, self._xi_cofactor)
        if any(c % self.p for c in y):
            return None
        return tuple(c // self.p for c in y)

    def divide_by_xi(self, x, t=1):
        for _ in range(t):
            y = self.try_divide_by_xi(x)
            if y is None:
                raise NotDivisibleError(f"element not divisible by xi^{t}")
            x = y
        return x

    def xi_valuation(self, x, cap=None):
        """Largest t with xi^t dividing x; math.inf for x = 0.

        With cap set, returns cap as soon as the valuation reaches it.
        """
        if not any(x):
            return math.inf
        v = 0
        while cap is None or v < cap:
            y = self.try_divide_by_xi(x)
            if y is None:
                return v
            x = y
            v += 1
        return cap

    # -- integer representation matrices --------------------------------

    def repr_matrix(self, x):
        """Integer matrix M with M @ vec(y) = vec(x*y); columns are x*b_j."""
        d = self.degree
        cols = [self.mul(x, self._powers[j]) for j in range(d)]
        return tuple(tuple(cols[j][i] for j in range(d)) for i in range(d))

    def inv_unit(self, u):
        """Inverse of a unit of the ring of integers (exact rational solve)."""
        d = self.degree
        m = [[Fraction(v) for v in row] for row in self.repr_matrix(u)]
        rhs = [Fraction(1 if i == 0 else 0) for i in range(d)]
        for col in range(d):
            piv = next(r for r in range(col, d) if m[r][col] != 0)
            m[col], m[piv] = m[piv], m[col]
            rhs[col], rhs[piv] = rhs[piv], rhs[col]
            inv = 1 / m[col][col]
            m[col] = [v * inv for v in m[col]]
            rhs[col] *= inv
            for r in range(d):
                if r != col and m[r][col]:
                    f = m[r][col]
                    m[r] = [a - f * b for a, b in zip(m[r], m[col])]
                    rhs[r] -= f * rhs[col]
        if any(v.denominator != 1 for v in rhs):
            raise NotDivisibleError("element is not a unit of the ring of integers")
        return tuple(int(v) for v in rhs)

    # -- startup validation ----------------------------------------------

    def _validate(self):
        d = self.degree
        basis = [tuple(1 if i == j else 0 for i in range(d)) for j in range(d)]
        for i, j in product(range(d), repeat=2):
            assert self.mul(basis[i], basis[j]) == self.mul(basis[j], basis[i])
        for i, j, k in product(range(d), repeat=3):
            lhs = self.mul(self.mul(basis[i], basis[j]), basis[k])
            rhs = self.mul(basis[i], self.mul(basis[j], basis[k]))
            assert lhs == rhs, f"{self.name}: mul_table not associative"
        for b in basis:
            assert self.conj(self.conj(b)) == b, f"{self.name}: conj not an involution"
        assert self.mul(self.unit, self.unit_inv) == self.one

    def __repr__(self):
        return f"FieldSpec({self.name!r}, degree={self.degree})"


@lru_cache(maxsize=None)
def field_spec(name):
    """The fixed FieldSpec for one of the supported field names."""
    if name == "Qi":
        # basis (1, i), i^2 = -1
        return FieldSpec("Qi", reduction=(-1, 0), xi=(1, 1), conj_gen=(0, -1))
    if name == "Qsqrt2":
        # basis (1, sqrt2), sqrt2^2 = 2, totally real
        return FieldSpec("Qsqrt2", reduction=(2, 0), xi=(0, 1), conj_gen=(0, 1))
    if name == "Qzeta8":
        # basis (1, z, z^2, z^3), z^4 = -1, conj z = -z^3
        return FieldSpec(
            "Qzeta8",
            reduction=(-1, 0, 0, 0),
            xi=(1, 1, 0, 0),
            conj_gen=(0, 0, 0, -1),
        )
    if name == "Qzeta16":
        # basis (1, z, ..., z^7), z^8 = -1, conj z = -z^7
        return FieldSpec(
            "Qzeta16",
            reduction=(-1,) + (0,) * 7,
            xi=(1, 1) + (0,) * 6,
            conj_gen=(0,) * 7 + (-1,),
        )
    if name == "Qcos_pi8":
        # basis (1, c, c^2, c^3) with c = 2*cos(pi/8), c^4 = 4c^2 - 2
        return FieldSpec(
            "Qcos_pi8",
            reduction=(-2, 0, 4, 0),
            xi=(2, 1, 0, 0),
            conj_gen=(0, 1, 0, 0),
        )
    raise UnsupportedFieldError(f"unsupported field {name!r}")


# Module-level aliases matching the functional surface.

def mul(x, y, f: FieldSpec):
    return f.mul(x, y)


def conj(x, f: FieldSpec):
    return f.conj(x)


def xi_valuation(x, f: FieldSpec):
    return f.xi_valuation(x)


def divide_by_xi(x, t, f: FieldSpec):
    return f.divide_by_xi(x, t)


def repr_matrix(x, f: FieldSpec):
    return f.repr_matrix(x)


def z_of_matrix(entries, f: FieldSpec):
    """Replace each ring entry of a nested list by its representation matrix.

    Returns a (d*rows) x (d*cols) list of lists of ints.
    """
    d = f.degree
    rows = len(entries)
    cols = len(entries[0]) if rows else 0
    out = [[0] * (d * cols) for _ in range(d * rows)]
    for i in range(rows):
        for j in range(cols):
            m = f.repr_matrix(entries[i][j])
            for a in range(d):
                row = out[i * d + a]
                mb = m[a]
                for b in range(d):
                    row[j * d + b] = mb[b]
    return out
