"""Tangency geometry of the branch sextic over F_p.

A line is a tritangent exactly when the restriction of f6 to it is a unit
times the square of a binary cubic; the cubic's roots are the contact
points.  Lines are canonicalized by scaling the last nonzero coefficient
to 1 and searched in a deterministic dual-point order, exhaustively over
P^2(F_{p^e}) for the requested field degrees.

The decomposition f6 = f3^2 + l f5 (mod p) along a tritangent l is
canonicalized by moving l to the coordinate x, taking the principal
square root of f6 mod (p, x) (leading coefficient the smaller of the two
representatives in [0, p)), and dividing out x.

Smoothness of the sextic (good reduction of the double cover for odd p)
is decided by resultant elimination: project the common zeros of f6 and
its partials along one variable, collect candidates as roots of the gcd
of pairwise Sylvester resultants, lift each candidate over its residue
field, and verify.  Degenerate eliminations fall back to the other
variables and finally to a bounded brute-force search.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MathError, SingularReductionError
from .ffield import (
    FieldCtx,
    FieldElem,
    Poly,
    embed_subfield,
    factor_univariate,
    field_create,
    poly_roots,
)
from .forms import (
    BinaryForm,
    IntForm,
    ModForm,
    apply_linear_change,
    exact_divide,
    eval_form,
    line_coeffs,
    line_form,
    line_kernel_basis,
    line_to_x,
    perfect_square_split,
    reduce_mod,
    restrict_to_line,
)


# ---------------------------------------------------------------------------
# lines and binary-form utilities


def normalize_line(vec):
    """Scale a nonzero coefficient triple so its last nonzero entry is 1."""
    last = next((i for i in range(2, -1, -1) if not vec[i].is_zero()), None)
    if last is None:
        raise ValueError("zero linear form")
    inv = vec[last].inverse()
    return tuple(c * inv for c in vec)


def normalize_point(pt):
    """Scale a projective point so its first nonzero coordinate is 1."""
    first = next((i for i in range(3) if not pt[i].is_zero()), None)
    if first is None:
        raise ValueError("(0,0,0) is not a projective point")
    inv = pt[first].inverse()
    return tuple(c * inv for c in pt)


def enumerate_lines(ctx: FieldCtx):
    """All lines of P^2(F_q) in deterministic dual-point order, each with
    its last nonzero coefficient scaled to 1."""
    one, zero = ctx.one(), ctx.zero()
    for ea in range(ctx.q):
        a = ctx.from_enc(ea)
        for eb in range(ctx.q):
            yield (a, ctx.from_enc(eb), one)
    for ea in range(ctx.q):
        yield (ctx.from_enc(ea), one, zero)
    yield (one, zero, zero)


def _in_proper_subfield(elems, e: int, p: int) -> bool:
    """Whether all elements lie in a common proper subfield of F_{p^e}."""
    for e1 in range(1, e):
        if e % e1:
            continue
        power = p ** e1
        if all(x ** power == x for x in elems):
            return True
    return False


def binary_roots(bf: BinaryForm):
    """Projective roots of a nonzero binary form with multiplicities.

    Returns a list of ((u0, v0), multiplicity, root_ctx) with the points
    living over the smallest extension of the coefficient field that
    contains them, sorted deterministically.  The root at (0 : 1) shows up
    through the degree drop of the dehomogenization.
    """
    ctx = bf.ctx
    if bf.is_zero():
        raise ValueError("zero binary form has no well-defined roots")
    poly = bf.to_poly()
    out = []
    inf_mult = bf.degree - poly.degree  # u-multiplicity: the root (0 : 1)
    if inf_mult > 0:
        out.append(((ctx.zero(), ctx.one()), inf_mult, ctx))
    if poly.degree > 0:
        for irr, mult in factor_univariate(poly):
            e = irr.degree
            if e == 1:
                root = -irr[0]
                out.append(((ctx.one(), root), mult, ctx))
            else:
                ext = field_create(ctx.p, ctx.d * e, ctx.zech_limit)
                lifted = Poly(ext, [embed_subfield(c, ext) for c in irr.c])
                for root, _ in poly_roots(lifted):
                    out.append(((ext.one(), root), mult, ext))
    out.sort(key=lambda r: (r[2].d, r[0][0].to_int(), r[0][1].to_int()))
    return out


def _binary_gcd(a: BinaryForm, b: BinaryForm) -> BinaryForm:
    """gcd of binary forms over the same field (monic dehomogenization,
    plus the common power of the first variable)."""
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    ctx = a.ctx
    g = a.to_poly().gcd(b.to_poly())
    u_mult = min(a.u_multiplicity(), b.u_multiplicity())
    return BinaryForm.from_poly(g, g.degree + u_mult)


def _scalar_det(mat, ctx) -> FieldElem:
    """Determinant of a square matrix of field elements (Gaussian)."""
    n = len(mat)
    m = [row[:] for row in mat]
    det = ctx.one()
    for k in range(n):
        piv = next((i for i in range(k, n) if not m[i][k].is_zero()), None)
        if piv is None:
            return ctx.zero()
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            det = -det
        det = det * m[k][k]
        inv = m[k][k].inverse()
        for i in range(k + 1, n):
            if m[i][k].is_zero():
                continue
            f = m[i][k] * inv
            for j in range(k, n):
                m[i][j] = m[i][j] - f * m[k][j]
    return det


def _lagrange_interpolate(xs, ys, ctx) -> Poly:
    """Newton-form interpolation through distinct points over a field."""
    n = len(xs)
    coeffs = list(ys)  # divided differences, built in place
    for level in range(1, n):
        for i in range(n - 1, level - 1, -1):
            coeffs[i] = (coeffs[i] - coeffs[i - 1]) / (xs[i] - xs[i - level])
    poly = Poly(ctx, [])
    for i in range(n - 1, -1, -1):
        poly = poly * Poly(ctx, [-xs[i], ctx.one()]) + Poly(ctx, [coeffs[i]])
    return poly


def _var_coeff_polys(f: ModForm, perm):
    """Write f as a polynomial in variable perm[2]; coefficient of the k-th
    power is returned as the dehomogenized polynomial in t = perm[1]/perm[0].

    Returns (coeff_polys ascending in k, total_degree)."""
    ctx = f.ctx
    n = f.degree
    buckets: dict[int, dict[int, FieldElem]] = {}
    for mono, c in f.coeffs.items():
        k = mono[perm[2]]
        i = mono[perm[1]]  # exponent of the dehomogenization variable
        row = buckets.setdefault(k, {})
        row[i] = row.get(i, ctx.zero()) + c
    out = []
    for k in range(n + 1):
        row = buckets.get(k, {})
        deg = max(row, default=-1)
        out.append(Poly(ctx, [row.get(i, ctx.zero()) for i in range(deg + 1)]))
    while len(out) > 1 and out[-1].is_zero():
        out.pop()
    return out, n


def _subfield_retraction(base: FieldCtx, ext: FieldCtx):
    """Map elements of ext that lie in the image of base back to base."""
    table = {embed_subfield(x, ext).v: x for x in base.elements()}

    def down(c):
        try:
            return table[c.v]
        except KeyError:
            raise AssertionError("value does not lie in the base field")
    return down


def _sylvester_resultant(a_coeffs, a_total, b_coeffs, b_total, ctx):
    """Resultant of two homogeneous forms along the eliminated variable.

    Inputs are the dehomogenized coefficient polynomials (ascending in the
    eliminated variable); output is a BinaryForm in the two remaining
    variables, of the graded determinant degree.  The determinant is
    evaluated pointwise over an extension with enough points and
    interpolated back, which is much faster than elimination over the
    polynomial ring."""
    m = len(a_coeffs) - 1
    n = len(b_coeffs) - 1
    size = m + n
    if size == 0:
        return BinaryForm(ctx, [ctx.one()])
    # graded degree of the determinant
    deg = (n * (a_total - m) - n * (n - 1) // 2
           + m * (b_total - n) - m * (m - 1) // 2
           + (m + n - 1) * (m + n) // 2)
    npts = deg + 1
    e = 1
    while ctx.q ** e < npts:
        e += 1
    ext = ctx if e == 1 else field_create(ctx.p, ctx.d * e, ctx.zech_limit)
    xs = [ext.from_enc(i) for i in range(npts)]
    zero = ext.zero()
    a_ext = [Poly(ext, [embed_subfield(c, ext) for c in cp.c]) if ext is not ctx
             else cp for cp in a_coeffs]
    b_ext = [Poly(ext, [embed_subfield(c, ext) for c in cp.c]) if ext is not ctx
             else cp for cp in b_coeffs]
    ys = []
    for t in xs:
        av = [cp.eval(t) for cp in a_ext]
        bv = [cp.eval(t) for cp in b_ext]
        mat = [[zero] * size for _ in range(size)]
        for r in range(n):
            for k in range(m + 1):
                mat[r][r + k] = av[m - k]
        for r in range(m):
            for k in range(n + 1):
                mat[n + r][r + k] = bv[n - k]
        ys.append(_scalar_det(mat, ext))
    det_ext = _lagrange_interpolate(xs, ys, ext)
    if det_ext.is_zero():
        return BinaryForm(ctx, [ctx.zero()] * (deg + 1))
    if ext is ctx:
        det = det_ext
    else:
        down = _subfield_retraction(ctx, ext)
        det = Poly(ctx, [down(c) for c in det_ext.c])
    return BinaryForm.from_poly(det, deg)


# ---------------------------------------------------------------------------
# certificates


@dataclass
class TritangentCert:
    """A line whose restriction of f6 is a unit times a perfect square.

    f3 and f5 realize f6 = f3^2 + line*f5 over the line's field and are
    present only for rational splits (the decomposition needs a square
    unit); contact points carry multiplicities and may live in extension
    fields."""

    line: tuple  # normalized coefficient triple
    line_field_degree: int
    split_field_degree: int  # 1 when the splits are rational, else 2
    unit: FieldElem
    contact_points: tuple  # ((x, y, z), multiplicity) with points normalized
    f3: ModForm | None
    f5: ModForm | None

    def line_str(self) -> str:
        return "+".join(f"{c.to_int()}*{v}" for c, v in
                        zip(self.line, "xyz") if not c.is_zero())


@dataclass
class ConicCert:
    """Exact integer identity f6 = scale * q3^2 + q2 * q4 exhibiting a
    conic q2 with six-fold tangency."""

    scale: int
    q2: IntForm
    q3: IntForm
    q4: IntForm


@dataclass
class SingularityReport:
    verdict: str  # smooth | singular | inconclusive
    witness: tuple | None = None
    field_degree: int | None = None
    reason: str | None = None


# ---------------------------------------------------------------------------
# tritangent search and decomposition


def _contact_points(split_h: BinaryForm, line, ctx):
    """Map the roots of h through the line parametrization, normalized."""
    v1, v2 = line_kernel_basis(line)
    out = []
    for (u0, v0), mult, root_ctx in binary_roots(split_h):
        if root_ctx is ctx:
            w1, w2 = v1, v2
        else:
            w1 = tuple(embed_subfield(c, root_ctx) for c in v1)
            w2 = tuple(embed_subfield(c, root_ctx) for c in v2)
        pt = tuple(u0 * w1[i] + v0 * w2[i] for i in range(3))
        out.append((normalize_point(pt), mult))
    return tuple(out)


def _sqrt_in_field(u: FieldElem) -> FieldElem:
    """Principal square root: the root whose encoding is smaller."""
    ctx = u.ctx
    f = Poly(ctx, [-u, ctx.zero(), ctx.one()])
    roots = poly_roots(f)
    if not roots:
        raise MathError("element is not a square")
    return roots[0][0]


def _decompose_mod_line(f6: ModForm, line):
    """f6 = f3^2 + line*f5 over the coefficient field of the line.

    Canonical choice: send the line to x, take the principal square root
    of the restriction, divide the rest by x, and transform back."""
    ctx = f6.ctx
    vec = line_coeffs(line)
    T = line_to_x(vec)
    g = apply_linear_change(f6, T)
    x_form = line_form(ctx, (ctx.one(), ctx.zero(), ctx.zero()))
    restriction = restrict_to_line(g, x_form)
    split = perfect_square_split(restriction)
    if split is None:
        raise MathError(
            "restriction to the line is not a perfect square: not a tritangent")
    if split.split_field_degree != 1:
        raise MathError(
            "tritangent splits only over the quadratic extension "
            "(non-square unit); the decomposition needs a rational split")
    s = _sqrt_in_field(split.unit)
    # pick the square root of the restriction with the smaller leading
    # coefficient representative
    lead_pos = next(i for i in range(split.h.degree + 1)
                    if not split.h.coeffs[i].is_zero())
    cand = s * split.h.coeffs[lead_pos]
    if (-cand).to_int() < cand.to_int():
        s = -s
    # the restriction lives in (y, z) after the change of coordinates
    b3 = ModForm(ctx, {(0, 3 - i, i): s * c
                       for i, c in enumerate(split.h.coeffs)
                       if not c.is_zero()}, 3)
    diff = g - b3 * b3
    f5_t = exact_divide(diff, x_form)
    T_inv = T.inverse()
    f3 = apply_linear_change(b3, T_inv)
    f5 = apply_linear_change(f5_t, T_inv)
    ell = line_form(ctx, vec)
    assert f3 * f3 + ell * f5 == f6
    return f3, f5


def _line_vec_over(ctx, line):
    """Coefficient triple over ctx from a ModForm, elements, or integers."""
    if isinstance(line, ModForm):
        return line_coeffs(line)
    vec = tuple(line)
    if isinstance(vec[0], FieldElem):
        return vec
    return tuple(ctx.from_int(int(c)) for c in vec)


def decompose_along_line(f6: IntForm, line, p: int):
    """Integer lifts (f3, f5) in [0, p) with f6 = f3^2 + line*f5 (mod p).

    The line must be a tritangent of f6 mod p with rational splits."""
    ctx = field_create(p, 1)
    f6p = reduce_mod(f6, ctx)
    vec = _line_vec_over(ctx, line)
    f3m, f5m = _decompose_mod_line(f6p, vec)
    return f3m.lift(), f5m.lift()


def find_tritangents(f6: ModForm, search_field_degree: int = 1):
    """All tritangent lines of f6 over F_{p^e} for e up to the requested
    degree, with contact data; exhaustive over the dual plane.

    A line whose restriction vanishes identically (a line component of the
    branch locus) is skipped; that configuration is singular and belongs
    to smoothness_check."""
    base = f6.ctx
    out = []
    for e in range(1, search_field_degree + 1):
        ctx = field_create(base.p, base.d * e, base.zech_limit)
        f = f6 if ctx is base else f6.embed(ctx)
        for vec in enumerate_lines(ctx):
            if e > 1 and _in_proper_subfield([c for c in vec], e, base.p ** base.d):
                continue  # already reported over the smaller field
            r = restrict_to_line(f, vec)
            if r.is_zero():
                continue
            split = perfect_square_split(r)
            if split is None:
                continue
            f3 = f5 = None
            if split.split_field_degree == 1:
                f3, f5 = _decompose_mod_line(f, vec)
            out.append(TritangentCert(
                line=normalize_line(vec),
                line_field_degree=e,
                split_field_degree=split.split_field_degree,
                unit=split.unit,
                contact_points=_contact_points(split.h, vec, ctx),
                f3=f3,
                f5=f5,
            ))
    return out


def verify_conic_identity(cert: ConicCert, f6: IntForm) -> bool:
    """Exact check of f6 = scale * q3^2 + q2 * q4 over Z."""
    rhs = cert.q3 * cert.q3
    rhs = IntForm({m: cert.scale * c for m, c in rhs.coeffs.items()},
                  rhs.degree) + cert.q2 * cert.q4
    return rhs == f6


# ---------------------------------------------------------------------------
# smoothness


def _brute_force_singular(system, base: FieldCtx, max_degree: int = 3):
    """Search P^2(F_{p^e}) for a common zero of the system, e small."""
    for e in range(1, max_degree + 1):
        ctx = field_create(base.p, base.d * e, base.zech_limit)
        polys = [f if ctx is base else f.embed(ctx) for f in system]
        one, zero = ctx.one(), ctx.zero()
        pts = [(one, y, z) for y in ctx.elements() for z in ctx.elements()]
        pts += [(zero, one, z) for z in ctx.elements()]
        pts.append((zero, zero, one))
        for pt in pts:
            if all(f.is_zero() or eval_form(f, pt).is_zero() for f in polys):
                return normalize_point(pt), e
    return None


def _specialize_at(f: ModForm, perm, pt_u, pt_v, ctx_ext):
    """f with perm[0], perm[1] fixed at (pt_u, pt_v): a Poly in perm[2]."""
    coeff_polys, _ = _var_coeff_polys(f, perm)
    # dehomogenized coefficients need the u-part restored: coefficient k of
    # the eliminated variable is a binary form of degree n - k in (u, v)
    n = f.degree
    out = []
    for k, cp in enumerate(coeff_polys):
        deg = n - k
        acc = ctx_ext.zero()
        for i in range(cp.degree + 1):
            c = cp[i]
            if c.is_zero():
                continue
            acc = acc + embed_subfield(c, ctx_ext) * pt_u ** (deg - i) * pt_v ** i
        out.append(acc)
    return Poly(ctx_ext, out)


def _poly_gcd_list(polys, ctx):
    g = Poly(ctx, [])
    for f in polys:
        g = f.gcd(g) if g.is_zero() else g.gcd(f)
    return g


def smoothness_check(f6: ModForm) -> SingularityReport:
    """Decide whether f6 and its partials share a projective zero over the
    algebraic closure (singular branch locus means bad reduction)."""
    ctx = f6.ctx
    if f6.is_zero():
        raise ValueError("zero form")
    partials = [f6.partial(v) for v in range(3)]
    system = [f6] + [fp for fp in partials if not fp.is_zero()]
    all_polys = [f6] + partials

    if len(system) < 2:
        # all partials vanish identically: f6 is a p-th power and every
        # zero of the underlying form is singular
        hit = _brute_force_singular(all_polys, ctx)
        if hit is not None:
            pt, e = hit
            return SingularityReport("singular", pt, e)
        return SingularityReport(
            "inconclusive", reason="non-reduced sextic without a zero over "
            "F_{p^e}, e <= 3")

    for perm in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        report = _smoothness_via_elimination(f6, all_polys, system, perm)
        if report is not None:
            return report
    hit = _brute_force_singular(all_polys, ctx)
    if hit is not None:
        pt, e = hit
        return SingularityReport("singular", pt, e)
    return SingularityReport(
        "inconclusive", reason="all three eliminations degenerate and no "
        "singular point over F_{p^e}, e <= 3")


def _smoothness_via_elimination(f6, all_polys, system, perm):
    """One elimination round; None signals a degenerate elimination."""
    ctx = f6.ctx
    pool = []
    with_var = []
    for f in system:
        coeffs, total = _var_coeff_polys(f, perm)
        if len(coeffs) == 1:
            # no dependence on the eliminated variable: the form itself
            # constrains the projection
            bf = BinaryForm.from_poly(coeffs[0], total)
            if not bf.is_zero():
                pool.append(bf)
        else:
            with_var.append((coeffs, total))
    for i in range(len(with_var)):
        for j in range(i + 1, len(with_var)):
            res = _sylvester_resultant(with_var[i][0], with_var[i][1],
                                       with_var[j][0], with_var[j][1], ctx)
            if not res.is_zero():
                pool.append(res)
    if not pool:
        return None  # degenerate: try another variable
    g = pool[0]
    for bf in pool[1:]:
        g = _binary_gcd(g, bf)
        if g.degree == 0 and not g.is_zero():
            break
    candidates = []
    if g.degree > 0:
        candidates = binary_roots(g)
    # candidate projections plus the point where the projection is undefined
    for (u0, v0), _, root_ctx in candidates:
        specials = [_specialize_at(f, perm, u0, v0, root_ctx)
                    for f in all_polys]
        if all(sp.is_zero() for sp in specials):
            pt = _assemble_point(perm, u0, v0, root_ctx.zero(), root_ctx)
            return SingularityReport("singular", normalize_point(pt),
                                     root_ctx.d // ctx.d)
        gz = _poly_gcd_list([sp for sp in specials if not sp.is_zero()],
                            root_ctx)
        if gz.degree <= 0:
            continue
        for irr, _ in factor_univariate(gz):
            e2 = irr.degree
            if e2 == 1:
                w_ctx, w = root_ctx, -irr[0]
            else:
                w_ctx = field_create(ctx.p, root_ctx.d * e2, ctx.zech_limit)
                lifted = Poly(w_ctx, [embed_subfield(c, w_ctx) for c in irr.c])
                w = poly_roots(lifted)[0][0]
            pt = _assemble_point(perm, embed_subfield(u0, w_ctx),
                                 embed_subfield(v0, w_ctx), w, w_ctx)
            femb = [f if w_ctx is ctx else f.embed(w_ctx) for f in all_polys]
            if all(f.is_zero() or eval_form(f, pt).is_zero() for f in femb):
                return SingularityReport("singular", normalize_point(pt),
                                         w_ctx.d // ctx.d)
    # the single point not covered by the projection
    special = [ctx.zero()] * 3
    special[perm[2]] = ctx.one()
    special = tuple(special)
    if all(f.is_zero() or eval_form(f, special).is_zero() for f in all_polys):
        return SingularityReport("singular", special, 1)
    return SingularityReport("smooth")


def _assemble_point(perm, u0, v0, w, ctx):
    pt = [ctx.zero()] * 3
    pt[perm[0]] = u0
    pt[perm[1]] = v0
    pt[perm[2]] = w
    return tuple(pt)


def assert_good_reduction(f6: IntForm, p: int) -> SingularityReport:
    """Raise SingularReductionError unless the sextic is smooth mod p."""
    ctx = field_create(p, 1)
    f6p = reduce_mod(f6, ctx)
    if f6p.is_zero():
        raise SingularReductionError(f"f6 vanishes identically mod {p}")
    report = smoothness_check(f6p)
    if report.verdict == "singular":
        wit = tuple(c.to_int() for c in report.witness)
        raise SingularReductionError(
            f"branch sextic is singular mod {p}: witness {wit} over "
            f"F_{p}^{report.field_degree}")
    if report.verdict == "inconclusive":
        raise SingularReductionError(
            f"smoothness mod {p} could not be decided: {report.reason}")
    return report
