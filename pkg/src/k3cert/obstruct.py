"""Second-order lifting obstruction for a tritangent split class.

Given integer lifts with f6 = f3^2 + l*f5 (mod p), the integer form
G = (f6 - f3^2 - l*f5)/p decides whether the split class extends to the
thickening mod p^2: it does exactly when G lies in the ideal
(p, l, f3, f5).  After moving l to the coordinate x and reducing mod
(p, x), membership collapses to the degree-6 graded piece in two
variables: is Gbar a combination f3bar*b3 + f5bar*c1 with b3 a binary
cubic and c1 a binary linear form?  That is a linear system of seven
equations (the binary sextic's coefficients) in six unknowns over F_p.

The verdict is independent of the integer lifts (they shift G by ideal
members) and of the choice of coordinates; the test suite checks both.
A nonvanishing obstruction blocks the lift, which is what certificates
build on.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CommonZeroOnLineError, NotDivisibleError
from .ffield import field_create
from .forms import (
    BinaryForm,
    IntForm,
    ModForm,
    apply_linear_change,
    exact_divide,
    line_form,
    line_to_x,
    reduce_mod,
    restrict_to_line,
)
from .geom import _binary_gcd, _line_vec_over, decompose_along_line


@dataclass
class ObstructionReport:
    """Audit record of one obstruction computation."""

    p: int
    G: IntForm
    g_bar: BinaryForm   # G mod (p, line), in the line's two coordinates
    f3_bar: BinaryForm
    f5_bar: BinaryForm
    matrix: tuple       # 7 rows x 6 columns over F_p
    rhs: tuple          # 7 entries
    verdict: str        # vanishes | nonvanishing
    witness: tuple | None  # (b3 coefficients, c1 coefficients) when solvable

    @property
    def vanishes(self) -> bool:
        return self.verdict == "vanishes"


def obstruction_G(f6: IntForm, line, f3: IntForm, f5: IntForm, p: int) -> IntForm:
    """G = (f6 - f3^2 - l*f5)/p, exact over Z.

    The decomposition identity mod p is checked first; a failed division
    signals a broken decomposition upstream."""
    ctx = field_create(p, 1)
    ell_vec = _line_vec_over(ctx, line)
    ell_int = IntForm({(1, 0, 0): ell_vec[0].to_int(),
                       (0, 1, 0): ell_vec[1].to_int(),
                       (0, 0, 1): ell_vec[2].to_int()}, 1)
    numerator = f6 - f3 * f3 - ell_int * f5
    if not reduce_mod(numerator, ctx).is_zero():
        raise NotDivisibleError(
            "f6 - f3^2 - l*f5 is not divisible by p: invalid decomposition")
    return exact_divide(numerator, IntForm({(0, 0, 0): p}, 0))


def _restrict_mod_line(form: ModForm, T) -> BinaryForm:
    """Apply the line-to-x change and read off the form mod x, as a binary
    form in the two remaining coordinates."""
    ctx = form.ctx
    moved = apply_linear_change(form, T)
    x_form = line_form(ctx, (ctx.one(), ctx.zero(), ctx.zero()))
    return restrict_to_line(moved, x_form)


def _solve_mod_p(matrix, rhs, p):
    """Gaussian elimination over F_p; a solution tuple or None."""
    rows, cols = len(matrix), len(matrix[0])
    a = [list(matrix[r]) + [rhs[r]] for r in range(rows)]
    piv_cols = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c] % p), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], p - 2, p)
        a[r] = [(v * inv) % p for v in a[r]]
        for i in range(rows):
            if i != r and a[i][c] % p:
                f = a[i][c]
                a[i] = [(a[i][j] - f * a[r][j]) % p for j in range(cols + 1)]
        piv_cols.append(c)
        r += 1
    for i in range(r, rows):
        if a[i][cols] % p:
            return None
    sol = [0] * cols
    for i, c in enumerate(piv_cols):
        sol[c] = a[i][cols]
    return tuple(sol)


def obstruction_vanishes(G: IntForm, line, f3: IntForm, f5: IntForm,
                         p: int) -> ObstructionReport:
    """Decide membership of G in (p, l, f3, f5) by the 7x6 linear system.

    Raises CommonZeroOnLineError when f3 and f5 share a projective zero on
    the line; that configuration contradicts the smoothness the obstruction
    formula assumes and must be surfaced, not absorbed."""
    ctx = field_create(p, 1)
    ell_vec = _line_vec_over(ctx, line)
    T = line_to_x(ell_vec)
    g_bar = _restrict_mod_line(reduce_mod(G, ctx), T)
    f3_bar = _restrict_mod_line(reduce_mod(f3, ctx), T)
    f5_bar = _restrict_mod_line(reduce_mod(f5, ctx), T)
    if not f3_bar.is_zero() and not f5_bar.is_zero():
        common = _binary_gcd(f3_bar, f5_bar)
        if common.degree > 0:
            raise CommonZeroOnLineError(
                "f3 and f5 share a zero on the line; the surface would be "
                "singular there and the obstruction formula does not apply")
    elif f3_bar.is_zero() or f5_bar.is_zero():
        raise CommonZeroOnLineError(
            "f3 or f5 vanishes identically on the line")
    a3 = [c.to_int() for c in f3_bar.coeffs]
    a5 = [c.to_int() for c in f5_bar.coeffs]
    g = [c.to_int() for c in g_bar.coeffs]
    # unknowns: 4 coefficients of a binary cubic b3, 2 of a linear c1
    matrix = [[0] * 6 for _ in range(7)]
    for j in range(4):
        for m in range(7):
            if 0 <= m - j <= 3:
                matrix[m][j] = a3[m - j]
    for m in range(7):
        if m <= 5:
            matrix[m][4] = a5[m]
        if m >= 1:
            matrix[m][5] = a5[m - 1]
    sol = _solve_mod_p(matrix, g, p)
    witness = None
    verdict = "nonvanishing"
    if sol is not None:
        verdict = "vanishes"
        b3 = BinaryForm.from_ints(ctx, sol[:4])
        c1 = BinaryForm.from_ints(ctx, sol[4:])
        recombined = f3_bar * b3 + f5_bar * c1
        assert recombined == g_bar, "witness failed exact re-verification"
        witness = (b3, c1)
    return ObstructionReport(
        p=p, G=G, g_bar=g_bar, f3_bar=f3_bar, f5_bar=f5_bar,
        matrix=tuple(tuple(r) for r in matrix), rhs=tuple(g),
        verdict=verdict, witness=witness)


def lifts_to_second_order(f6: IntForm, line, p: int) -> ObstructionReport:
    """Full pipeline: canonical decomposition along the line, then G, then
    the membership verdict."""
    f3, f5 = decompose_along_line(f6, line, p)
    G = obstruction_G(f6, line, f3, f5, p)
    return obstruction_vanishes(G, line, f3, f5, p)
