import random

import pytest

from k3cert.errors import BudgetExceededError
from k3cert.ffield import (
    Poly,
    embed_subfield,
    factor_univariate,
    field_create,
    minimal_polynomial,
    poly_roots,
    quad_char,
)


def test_create_prime_field():
    F5 = field_create(5, 1)
    assert F5.q == 5
    assert F5.modulus == (0, 1)  # the polynomial t


def test_create_f25_generator_order():
    F25 = field_create(5, 2)
    g = F25.multiplicative_generator()
    assert g ** 24 == F25.one()
    for k in range(1, 24):
        assert g ** k != F25.one()


def test_create_rejects_composite_and_two():
    with pytest.raises(ValueError):
        field_create(4, 1)
    with pytest.raises(ValueError):
        field_create(2, 3)
    with pytest.raises(ValueError):
        field_create(5, 0)


def test_zech_limit_budget():
    with pytest.raises(BudgetExceededError):
        field_create(5, 4, zech_limit=100, rep="zech")
    # auto falls back to poly
    ctx = field_create(5, 4, zech_limit=100)
    assert ctx.rep == "poly"


def test_prime_field_arithmetic():
    F5 = field_create(5, 1)
    three, four, two = F5.from_int(3), F5.from_int(4), F5.from_int(2)
    assert (three + four).to_int() == 2
    assert (two ** 4) == F5.one()
    assert (three - four).to_int() == 4
    assert (three * four).to_int() == 2
    assert (three / four).to_int() == 2  # 3 * 4^{-1} = 3 * 4 = 12 = 2


def test_f9_all_units_satisfy_inverse_identity():
    F9 = field_create(3, 2)
    for a in F9.elements():
        if a.is_zero():
            continue
        assert a * a ** (F9.q - 2) == F9.one()


def test_context_mismatch_raises():
    F5 = field_create(5, 1)
    F25 = field_create(5, 2)
    with pytest.raises(ValueError):
        F5.from_int(1) + F25.from_int(1)


def test_division_by_zero():
    F5 = field_create(5, 1)
    with pytest.raises(ZeroDivisionError):
        F5.from_int(1) / F5.zero()


def test_quad_char_examples():
    F5 = field_create(5, 1)
    assert quad_char(F5.zero()) == 0
    assert quad_char(F5.from_int(4)) == 1
    # squares mod 5 are {1, 4}
    assert quad_char(F5.from_int(2)) == -1
    assert quad_char(F5.from_int(3)) == -1


@pytest.mark.parametrize("p,d", [(3, 2), (5, 1), (5, 2), (7, 1)])
def test_quad_char_multiplicative(p, d):
    ctx = field_create(p, d)
    els = [a for a in ctx.elements() if not a.is_zero()]
    for a in els:
        for b in els:
            assert quad_char(a * b) == quad_char(a) * quad_char(b)
        assert quad_char(a ** 6) == 1


def test_exp_log_tables_inverse_bijections():
    import numpy as np
    for p, d in [(3, 3), (5, 2), (7, 1)]:
        ctx = field_create(p, d)
        q1 = ctx.q - 1
        assert np.array_equal(ctx._log[ctx._exp], np.arange(q1))
        assert sorted(ctx._exp.tolist()) == list(range(1, ctx.q))


def test_poly_rep_matches_zech_rep():
    Fz = field_create(5, 2)
    Fp = field_create(5, 2, rep="poly")
    rng = random.Random(7)
    for _ in range(200):
        x, y = rng.randrange(25), rng.randrange(25)
        az, bz = Fz.from_enc(x), Fz.from_enc(y)
        ap, bp = Fp.from_enc(x), Fp.from_enc(y)
        assert (az + bz).to_int() == (ap + bp).to_int()
        assert (az * bz).to_int() == (ap * bp).to_int()
        assert (az - bz).to_int() == (ap - bp).to_int()
        assert quad_char(az) == quad_char(ap)


def test_frobenius_is_additive_and_multiplicative():
    rng = random.Random(11)
    for p, d in [(3, 3), (5, 2)]:
        ctx = field_create(p, d)
        for _ in range(100):
            a = ctx.from_enc(rng.randrange(ctx.q))
            b = ctx.from_enc(rng.randrange(ctx.q))
            assert (a + b).frobenius() == a.frobenius() + b.frobenius()
            assert (a * b).frobenius() == a.frobenius() * b.frobenius()


def test_embed_constant():
    F5 = field_create(5, 1)
    F25 = field_create(5, 2)
    img = embed_subfield(F5.from_int(2), F25)
    assert img == F25.from_int(2)


def test_embed_preserves_multiplicative_order():
    F9 = field_create(3, 2)
    F81 = field_create(3, 4)
    g = F9.multiplicative_generator()
    img = embed_subfield(g, F81)
    assert img ** 8 == F81.one()
    for k in range(1, 8):
        assert img ** k != F81.one()


def test_embed_is_ring_homomorphism():
    F9 = field_create(3, 2)
    F81 = field_create(3, 4)
    rng = random.Random(3)
    for _ in range(50):
        a = F9.from_enc(rng.randrange(9))
        b = F9.from_enc(rng.randrange(9))
        assert embed_subfield(a + b, F81) == embed_subfield(a, F81) + embed_subfield(b, F81)
        assert embed_subfield(a * b, F81) == embed_subfield(a, F81) * embed_subfield(b, F81)


def test_embed_roundtrip_minimal_polynomials():
    F25 = field_create(5, 2)
    F625 = field_create(5, 4)
    rng = random.Random(19)
    for _ in range(50):
        a = F25.from_enc(rng.randrange(25))
        img = embed_subfield(a, F625)
        assert minimal_polynomial(a) == minimal_polynomial(img)


def test_embed_rejects_bad_degrees():
    F25 = field_create(5, 2)
    F125 = field_create(5, 3)
    with pytest.raises(ValueError):
        embed_subfield(F25.gen(), F125)


def test_factor_t2_minus_1_over_f3():
    F3 = field_create(3, 1)
    f = Poly.from_ints(F3, [-1, 0, 1])
    facs = factor_univariate(f)
    assert len(facs) == 2
    assert all(m == 1 for _, m in facs)
    prods = sorted(g.c[0].to_int() for g, _ in facs)
    assert prods == [1, 2]  # t - 1 = t + 2 and t + 1


def test_factor_t2_plus_1_over_f3_irreducible():
    F3 = field_create(3, 1)
    f = Poly.from_ints(F3, [1, 0, 1])
    facs = factor_univariate(f)
    assert facs == [(f, 1)]


def test_factor_recovers_random_product_over_f5():
    F5 = field_create(5, 1)
    irs = [
        Poly.from_ints(F5, [2, 1]),          # t + 2
        Poly.from_ints(F5, [3, 1]),          # t + 3
        Poly.from_ints(F5, [2, 0, 1]),       # t^2 + 2 (irreducible)
        Poly.from_ints(F5, [1, 1, 0, 1]),    # t^3 + t + 1 (irreducible mod 5)
    ]
    prod = Poly.from_ints(F5, [3])
    mults = [2, 1, 1, 3]
    for g, m in zip(irs, mults):
        for _ in range(m):
            prod = prod * g
    facs = factor_univariate(prod)
    assert sorted((g.enc_key(), m) for g, m in facs) == \
        sorted((g.enc_key(), m) for g, m in zip(irs, mults))


def test_factor_remultiplies_to_input():
    rng = random.Random(23)
    for p, d in [(3, 1), (5, 1), (3, 2)]:
        ctx = field_create(p, d)
        for _ in range(20):
            deg = rng.randrange(1, 9)
            coeffs = [ctx.from_enc(rng.randrange(ctx.q)) for _ in range(deg)]
            coeffs.append(ctx.from_enc(rng.randrange(1, ctx.q)))
            f = Poly(ctx, coeffs)
            facs = factor_univariate(f)
            prod = Poly(ctx, [f.c[-1]])
            for g, m in facs:
                for _ in range(m):
                    prod = prod * g
            assert prod == f


def test_factor_zero_rejected():
    F3 = field_create(3, 1)
    with pytest.raises(ValueError):
        factor_univariate(Poly(F3, []))


def test_poly_roots_with_multiplicity():
    F7 = field_create(7, 1)
    # (t - 2)^2 (t - 3)
    f = Poly.from_ints(F7, [-2, 1]) * Poly.from_ints(F7, [-2, 1]) * Poly.from_ints(F7, [-3, 1])
    roots = poly_roots(f)
    assert [(r.to_int(), m) for r, m in roots] == [(2, 2), (3, 1)]


def test_deterministic_modulus_and_tables():
    # same parameters give the identical cached context
    a = field_create(3, 5)
    b = field_create(3, 5)
    assert a is b
    # the modulus is the lex-least irreducible: recompute independently
    from k3cert.ffield import _is_irreducible_zp
    found = None
    p, d = 3, 5
    for code in range(p ** d):
        digits = []
        x = code
        for _ in range(d):
            digits.append(x % p)
            x //= p
        m = list(reversed(digits)) + [1]
        if _is_irreducible_zp(m, p, d):
            found = tuple(m)
            break
    assert a.modulus == found
