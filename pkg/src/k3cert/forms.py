"""Homogeneous trivariate forms over Z and over F_q, plus binary forms.

Trivariate forms are sparse maps from exponent triples (a, b, c) with
a + b + c = degree to coefficients; a degree-6 form has at most 28
monomials.  Binary forms (restrictions to lines) are dense coefficient
vectors.  Integer lifts use representatives in [0, p) throughout.

Canonical text serialization lists monomials in descending graded reverse
lexicographic order as ``c*x^a*y^b*z^c`` joined by ``+``; it feeds reports
and cache fingerprints, so it must never change.
"""

from __future__ import annotations

from typing import Iterable

from .errors import NotDivisibleError
from .ffield import FieldCtx, FieldElem, Poly, embed_subfield, quad_char


def _grevlex_sort_key(mono):
    # within one total degree, descending grevlex is ascending (c, b)
    a, b, c = mono
    return (c, b)


def _check_homogeneous(coeffs, degree):
    for mono in coeffs:
        if len(mono) != 3 or any(e < 0 for e in mono):
            raise ValueError(f"bad exponent triple {mono!r}")
        if sum(mono) != degree:
            raise ValueError(
                f"monomial {mono!r} has degree {sum(mono)}, expected {degree}")


class IntForm:
    """Homogeneous form in x, y, z with integer coefficients."""

    __slots__ = ("degree", "coeffs")
    nvars = 3

    def __init__(self, coeffs: dict, degree: int | None = None):
        clean = {tuple(m): int(c) for m, c in coeffs.items() if c}
        if degree is None:
            if not clean:
                raise ValueError("zero form needs an explicit degree")
            degree = sum(next(iter(clean)))
        _check_homogeneous(clean, degree)
        self.degree = degree
        self.coeffs = clean

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        return (isinstance(other, IntForm) and other.degree == self.degree
                and other.coeffs == self.coeffs)

    __hash__ = None

    def __add__(self, other):
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, 0) + c
        return IntForm(out, self.degree)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return IntForm({m: -c for m, c in self.coeffs.items()}, self.degree)

    def __mul__(self, other):
        out: dict = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                m = (m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2])
                out[m] = out.get(m, 0) + c1 * c2
        return IntForm(out, self.degree + other.degree)

    def scale(self, k: int):
        return IntForm({m: k * c for m, c in self.coeffs.items()}, self.degree)

    def square(self):
        return self * self

    def apply_int_matrix(self, rows):
        """Substitute variable i by the integer linear form rows[i]."""
        out = IntForm({}, self.degree)
        lin = [IntForm({(1, 0, 0): r[0], (0, 1, 0): r[1], (0, 0, 1): r[2]}, 1)
               for r in rows]
        pows = [{0: IntForm({(0, 0, 0): 1}, 0)} for _ in range(3)]
        for m, c in self.coeffs.items():
            term = IntForm({(0, 0, 0): c}, 0)
            for i, e in enumerate(m):
                memo = pows[i]
                if e not in memo:
                    top = max(memo)
                    cur = memo[top]
                    for k in range(top + 1, e + 1):
                        cur = cur * lin[i]
                        memo[k] = cur
                term = term * memo[e]
            out = out + term
        return out

    def serialize(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for (a, b, c) in sorted(self.coeffs, key=_grevlex_sort_key):
            parts.append(f"{self.coeffs[(a, b, c)]}*x^{a}*y^{b}*z^{c}")
        return "+".join(parts)

    def __repr__(self):
        return f"IntForm({self.serialize()})"


class ModForm:
    """Homogeneous form in x, y, z with coefficients in one FieldCtx."""

    __slots__ = ("ctx", "degree", "coeffs")
    nvars = 3

    def __init__(self, ctx: FieldCtx, coeffs: dict, degree: int | None = None):
        clean = {}
        for m, c in coeffs.items():
            if not isinstance(c, FieldElem):
                raise TypeError("ModForm coefficients must be FieldElem")
            if c.ctx is not ctx:
                raise ValueError("field context mismatch")
            if not c.is_zero():
                clean[tuple(m)] = c
        if degree is None:
            if not clean:
                raise ValueError("zero form needs an explicit degree")
            degree = sum(next(iter(clean)))
        _check_homogeneous(clean, degree)
        self.ctx = ctx
        self.degree = degree
        self.coeffs = clean

    @classmethod
    def from_int_coeffs(cls, ctx, coeffs: dict, degree: int | None = None):
        return cls(ctx, {m: ctx.from_int(c) for m, c in coeffs.items()}, degree)

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        return (isinstance(other, ModForm) and other.ctx is self.ctx
                and other.degree == self.degree and other.coeffs == self.coeffs)

    __hash__ = None

    def _check(self, other):
        if other.ctx is not self.ctx:
            raise ValueError("field context mismatch")

    def __add__(self, other):
        self._check(other)
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            s = out.get(m)
            out[m] = c if s is None else s + c
        return ModForm(self.ctx, out, self.degree)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return ModForm(self.ctx, {m: -c for m, c in self.coeffs.items()}, self.degree)

    def __mul__(self, other):
        self._check(other)
        out: dict = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                m = (m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2])
                s = out.get(m)
                prod = c1 * c2
                out[m] = prod if s is None else s + prod
        return ModForm(self.ctx, out, self.degree + other.degree)

    def scale(self, k: FieldElem):
        return ModForm(self.ctx, {m: c * k for m, c in self.coeffs.items()},
                       self.degree)

    def square(self):
        return self * self

    def eval(self, point) -> FieldElem:
        return eval_form(self, point)

    def partial(self, var: int) -> "ModForm":
        """Formal partial derivative in variable var (0, 1 or 2)."""
        out = {}
        for m, c in self.coeffs.items():
            e = m[var]
            if e == 0:
                continue
            coef = c * self.ctx.from_int(e)
            if coef.is_zero():
                continue
            m2 = list(m)
            m2[var] -= 1
            out[tuple(m2)] = coef
        return ModForm(self.ctx, out, max(self.degree - 1, 0))

    def lift(self) -> IntForm:
        """Integer lift with coefficients in [0, p); prime-field forms only."""
        if self.ctx.d != 1:
            raise ValueError("lift is defined over prime fields only")
        return IntForm({m: c.to_int() for m, c in self.coeffs.items()}, self.degree)

    def embed(self, target: FieldCtx) -> "ModForm":
        """Coefficientwise embedding into an extension field."""
        return ModForm(target, {m: embed_subfield(c, target)
                                for m, c in self.coeffs.items()}, self.degree)

    def serialize(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for (a, b, c) in sorted(self.coeffs, key=_grevlex_sort_key):
            parts.append(f"{self.coeffs[(a, b, c)].to_int()}*x^{a}*y^{b}*z^{c}")
        return "+".join(parts)

    def __repr__(self):
        return f"ModForm(F{self.ctx.q}; {self.serialize()})"


class BinaryForm:
    """Homogeneous form in two variables (u, v) over a FieldCtx.

    coeffs[i] is the coefficient of u^(degree-i) v^i, stored densely.
    """

    __slots__ = ("ctx", "degree", "coeffs")

    def __init__(self, ctx: FieldCtx, coeffs: Iterable[FieldElem]):
        cs = tuple(coeffs)
        if not cs:
            raise ValueError("binary form needs at least one coefficient")
        for c in cs:
            if not isinstance(c, FieldElem) or c.ctx is not ctx:
                raise ValueError("field context mismatch")
        self.ctx = ctx
        self.degree = len(cs) - 1
        self.coeffs = cs

    @classmethod
    def from_ints(cls, ctx, ints):
        return cls(ctx, [ctx.from_int(n) for n in ints])

    @classmethod
    def from_poly(cls, poly: Poly, degree: int):
        """Rehomogenize a univariate polynomial g(t) = g(v/u) u^(-degree)."""
        if poly.degree > degree:
            raise ValueError("degree too small for the given polynomial")
        ctx = poly.ctx
        return cls(ctx, [poly[i] for i in range(degree + 1)])

    def to_poly(self) -> Poly:
        """Dehomogenize at u = 1: the polynomial sum coeffs[i] t^i."""
        return Poly(self.ctx, list(self.coeffs))

    def is_zero(self):
        return all(c.is_zero() for c in self.coeffs)

    def __eq__(self, other):
        return (isinstance(other, BinaryForm) and other.ctx is self.ctx
                and other.coeffs == self.coeffs)

    __hash__ = None

    def __mul__(self, other):
        z = self.ctx.zero()
        out = [z] * (self.degree + other.degree + 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return BinaryForm(self.ctx, out)

    def __sub__(self, other):
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        return BinaryForm(self.ctx, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __add__(self, other):
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        return BinaryForm(self.ctx, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def scale(self, k: FieldElem):
        return BinaryForm(self.ctx, [a * k for a in self.coeffs])

    def eval(self, u: FieldElem, v: FieldElem) -> FieldElem:
        acc = self.ctx.zero()
        n = self.degree
        for i, c in enumerate(self.coeffs):
            if not c.is_zero():
                acc = acc + c * u ** (n - i) * v ** i
        return acc

    def u_multiplicity(self) -> int:
        """Largest k with u^k dividing the form (degree+1 if zero)."""
        for i in range(self.degree, -1, -1):
            if not self.coeffs[i].is_zero():
                return self.degree - i
        return self.degree + 1

    def serialize(self) -> str:
        if self.is_zero():
            return "0"
        n = self.degree
        parts = [f"{c.to_int()}*u^{n - i}*v^{i}"
                 for i, c in enumerate(self.coeffs) if not c.is_zero()]
        return "+".join(parts)

    def __repr__(self):
        return f"BinaryForm(F{self.ctx.q}; {self.serialize()})"


class LinearChange:
    """Invertible 3x3 change of coordinates over a FieldCtx.

    Acting on a form f gives f(T v): variable i is replaced by the linear
    form rows[i] in the new variables.
    """

    __slots__ = ("ctx", "rows")

    def __init__(self, ctx: FieldCtx, rows):
        rows = tuple(tuple(r) for r in rows)
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise ValueError("need a 3x3 matrix")
        for r in rows:
            for c in r:
                if not isinstance(c, FieldElem) or c.ctx is not ctx:
                    raise ValueError("field context mismatch")
        self.ctx = ctx
        self.rows = rows
        if self.det().is_zero():
            raise ValueError("singular change of coordinates")

    @classmethod
    def from_int_rows(cls, ctx, rows):
        return cls(ctx, [[ctx.from_int(c) for c in r] for r in rows])

    @classmethod
    def identity(cls, ctx):
        return cls.from_int_rows(ctx, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])

    def det(self) -> FieldElem:
        r = self.rows
        return (r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
                - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
                + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]))

    def inverse(self) -> "LinearChange":
        r = self.rows
        dinv = self.det().inverse()
        cof = [[None] * 3 for _ in range(3)]
        idx = [(0, 1, 2), (1, 2, 0), (2, 0, 1)]
        for i in range(3):
            for j in range(3):
                i1, i2 = [k for k in range(3) if k != i]
                j1, j2 = [k for k in range(3) if k != j]
                minor = r[i1][j1] * r[i2][j2] - r[i1][j2] * r[i2][j1]
                sign = self.ctx.from_int(1 if (i + j) % 2 == 0 else -1)
                cof[j][i] = minor * sign * dinv  # transposed: adjugate
        return LinearChange(self.ctx, cof)

    def compose(self, other: "LinearChange") -> "LinearChange":
        """Matrix product self @ other."""
        a, b = self.rows, other.rows
        rows = [[sum((a[i][k] * b[k][j] for k in range(3)), self.ctx.zero())
                 for j in range(3)] for i in range(3)]
        return LinearChange(self.ctx, rows)

    def apply_to_point(self, point):
        return tuple(sum((self.rows[i][k] * point[k] for k in range(3)),
                         self.ctx.zero()) for i in range(3))

    def int_rows(self):
        return tuple(tuple(c.to_int() for c in r) for r in self.rows)

    def __repr__(self):
        return f"LinearChange({self.int_rows()})"


def line_coeffs(line) -> tuple:
    """Coefficient triple of a linear form given as ModForm or triple."""
    if isinstance(line, ModForm):
        if line.degree != 1:
            raise ValueError("not a linear form")
        ctx = line.ctx
        vec = [ctx.zero(), ctx.zero(), ctx.zero()]
        for m, c in line.coeffs.items():
            vec[m.index(1)] = c
        return tuple(vec)
    vec = tuple(line)
    if len(vec) != 3:
        raise ValueError("need three coefficients")
    return vec


def line_form(ctx, vec) -> ModForm:
    return ModForm(ctx, {(1, 0, 0): vec[0], (0, 1, 0): vec[1], (0, 0, 1): vec[2]}, 1)


def line_to_x(line) -> LinearChange:
    """A change of coordinates T with (line o T) = x.

    Complete the line's coefficient vector to an invertible matrix M by
    standard basis vectors (skipping the pivot column), then T = M^{-1}.
    """
    vec = line_coeffs(line)
    ctx = vec[0].ctx
    pivot = next((i for i, c in enumerate(vec) if not c.is_zero()), None)
    if pivot is None:
        raise ValueError("zero linear form")
    rows = [list(vec)]
    for j in range(3):
        if j != pivot:
            e = [ctx.zero()] * 3
            e[j] = ctx.one()
            rows.append(e)
    return LinearChange(ctx, rows).inverse()


# ---------------------------------------------------------------------------
# operations


def eval_form(f: ModForm, point) -> FieldElem:
    """Evaluate f at a projective point given as a triple of FieldElem."""
    x, y, z = point
    if x.ctx is not f.ctx or y.ctx is not f.ctx or z.ctx is not f.ctx:
        raise ValueError("field context mismatch")
    if x.is_zero() and y.is_zero() and z.is_zero():
        raise ValueError("(0, 0, 0) is not a projective point")
    ctx = f.ctx
    maxes = [max((m[i] for m in f.coeffs), default=0) for i in range(3)]
    pows = []
    for var, e_max in zip(point, maxes):
        cur = [ctx.one()]
        for _ in range(e_max):
            cur.append(cur[-1] * var)
        pows.append(cur)
    acc = ctx.zero()
    for (a, b, c), coef in f.coeffs.items():
        acc = acc + coef * pows[0][a] * pows[1][b] * pows[2][c]
    return acc


def reduce_mod(f: IntForm, ctx: FieldCtx) -> ModForm:
    """Coefficientwise reduction of an integer form into F_p."""
    if ctx.d != 1:
        raise ValueError("reduction targets a prime field")
    return ModForm.from_int_coeffs(ctx, f.coeffs, f.degree)


def apply_linear_change(f: ModForm, T: LinearChange) -> ModForm:
    """The form f(T v); degree is preserved."""
    if T.ctx is not f.ctx:
        raise ValueError("field context mismatch")
    ctx = f.ctx
    lin = [line_form(ctx, T.rows[i]) for i in range(3)]
    one_form = ModForm(ctx, {(0, 0, 0): ctx.one()}, 0)
    memo = [{0: one_form} for _ in range(3)]

    def power(i, e):
        m = memo[i]
        if e not in m:
            top = max(m)
            cur = m[top]
            for k in range(top + 1, e + 1):
                cur = cur * lin[i]
                m[k] = cur
        return m[e]

    out = ModForm(ctx, {}, f.degree)
    for (a, b, c), coef in f.coeffs.items():
        term = power(0, a) * power(1, b) * power(2, c)
        out = out + term.scale(coef)
    return out


def line_kernel_basis(line):
    """Reduced echelon basis (v1, v2) of the kernel of the line's coefficients."""
    vec = line_coeffs(line)
    ctx = vec[0].ctx
    pivot = next((i for i, c in enumerate(vec) if not c.is_zero()), None)
    if pivot is None:
        raise ValueError("zero linear form")
    inv = vec[pivot].inverse()
    basis = []
    for j in range(3):
        if j == pivot:
            continue
        v = [ctx.zero()] * 3
        v[j] = ctx.one()
        v[pivot] = -(vec[j] * inv)
        basis.append(tuple(v))
    return tuple(basis)


def restrict_to_line(f: ModForm, line) -> BinaryForm:
    """Restriction of f to the projective line {line = 0}.

    The line is parametrized by the reduced echelon basis (v1, v2) of its
    kernel; the result is f(s v1 + t v2), a binary form of the same degree
    (identically zero exactly when the line divides f).
    """
    v1, v2 = line_kernel_basis(line)
    ctx = f.ctx
    zero = ctx.zero()
    out = [zero] * (f.degree + 1)
    # per-coordinate binomial expansions of (s v1[i] + t v2[i])^e, cached
    memo = [{0: (ctx.one(),)} for _ in range(3)]

    def expand(i, e):
        m = memo[i]
        if e not in m:
            prev = expand(i, e - 1)
            cur = [zero] * (e + 1)
            for k, c in enumerate(prev):
                if c.is_zero():
                    continue
                cur[k] = cur[k] + c * v1[i]
                cur[k + 1] = cur[k + 1] + c * v2[i]
            m[e] = tuple(cur)
        return m[e]

    for (a, b, c), coef in f.coeffs.items():
        ea, eb, ec = expand(0, a), expand(1, b), expand(2, c)
        for i, ca in enumerate(ea):
            if ca.is_zero():
                continue
            for j, cb in enumerate(eb):
                if cb.is_zero():
                    continue
                pref = ca * cb
                for k, cc in enumerate(ec):
                    if cc.is_zero():
                        continue
                    idx = i + j + k
                    out[idx] = out[idx] + coef * pref * cc
    return BinaryForm(ctx, out)


def _lead_monomial(coeffs):
    return min(coeffs, key=_grevlex_sort_key)


def exact_divide(f, g):
    """Exact division f / g of forms of the same kind; errors if g does not
    divide f (a broken decomposition upstream).  Integer forms also require
    every coefficient quotient to be exact."""
    if isinstance(f, IntForm) != isinstance(g, IntForm):
        raise TypeError("operands must be the same kind of form")
    integer = isinstance(f, IntForm)
    if not integer and f.ctx is not g.ctx:
        raise ValueError("field context mismatch")
    if g.is_zero():
        raise ZeroDivisionError("division by the zero form")
    if f.is_zero():
        if integer:
            return IntForm({}, max(f.degree - g.degree, 0))
        return ModForm(f.ctx, {}, max(f.degree - g.degree, 0))
    if f.degree < g.degree:
        raise NotDivisibleError("degree of divisor exceeds degree of dividend")
    lead_g = _lead_monomial(g.coeffs)
    cg = g.coeffs[lead_g]
    rem = dict(f.coeffs)
    quo: dict = {}
    while rem:
        lead_r = _lead_monomial(rem)
        mono = tuple(lead_r[i] - lead_g[i] for i in range(3))
        if any(e < 0 for e in mono):
            raise NotDivisibleError(
                f"leading monomial {lead_r} not divisible by {lead_g}")
        cr = rem[lead_r]
        if integer:
            if cr % cg:
                raise NotDivisibleError(
                    f"coefficient {cr} not divisible by {cg}")
            coef = cr // cg
        else:
            coef = cr / cg
        quo[mono] = coef
        for m2, c2 in g.coeffs.items():
            m = (mono[0] + m2[0], mono[1] + m2[1], mono[2] + m2[2])
            if integer:
                val = rem.get(m, 0) - coef * c2
                if val:
                    rem[m] = val
                else:
                    rem.pop(m, None)
            else:
                val = rem.get(m)
                val = (-(coef * c2)) if val is None else val - coef * c2
                if val.is_zero():
                    rem.pop(m, None)
                else:
                    rem[m] = val
    deg = f.degree - g.degree
    if integer:
        return IntForm(quo, deg)
    return ModForm(f.ctx, quo, deg)


class SquareSplit:
    """Result of perfect_square_split: g = unit * h^2."""

    __slots__ = ("h", "unit", "split_field_degree")

    def __init__(self, h: BinaryForm, unit: FieldElem, split_field_degree: int):
        self.h = h
        self.unit = unit
        self.split_field_degree = split_field_degree

    def __repr__(self):
        return (f"SquareSplit(unit={self.unit.to_int()}, "
                f"e={self.split_field_degree}, h={self.h.serialize()})")


def perfect_square_split(g: BinaryForm):
    """Decide whether g = u * h^2 for a unit u and a binary form h.

    Returns a SquareSplit with h normalized to leading coefficient 1 and
    split_field_degree 1 when u is a square in the coefficient field
    (rational splits) or 2 otherwise; returns None when g is not of this
    shape.  Solved coefficient by coefficient from the leading end, then
    verified by exact re-expansion, so the cost is quadratic in the degree.
    """
    if g.is_zero():
        raise ValueError("zero form")
    ctx = g.ctx
    n = g.degree
    if n % 2:
        return None
    k = n // 2
    c = g.coeffs
    i0 = next(i for i in range(n + 1) if not c[i].is_zero())
    if i0 % 2:
        return None
    j0 = i0 // 2
    u = c[i0]
    uinv = u.inverse()
    two_inv = (ctx.from_int(2)).inverse()
    zero = ctx.zero()
    h = [zero] * (k + 1)
    h[j0] = ctx.one()
    for j in range(j0 + 1, k + 1):
        i = j + j0
        inner = zero
        for a in range(j0 + 1, j):
            b = i - a
            if j0 < b <= k:
                inner = inner + h[a] * h[b]
        # g_i / u = 2 h_j + (terms strictly between j0 and j)
        h[j] = (c[i] * uinv - inner) * two_inv
    # verify u * h^2 == g on all coefficients
    hh = [zero] * (n + 1)
    for a in range(k + 1):
        if h[a].is_zero():
            continue
        for b in range(k + 1):
            if h[b].is_zero():
                continue
            hh[a + b] = hh[a + b] + h[a] * h[b]
    for i in range(n + 1):
        if hh[i] * u != c[i]:
            return None
    e = 1 if quad_char(u) == 1 else 2
    return SquareSplit(BinaryForm(ctx, h), u, e)
