"""Exact arithmetic in F_p and F_{p^d} for odd primes p.

A FieldCtx fixes the prime, the extension degree d and a deterministic
modulus: the monic irreducible of degree d over F_p whose coefficient
vector (c_{d-1}, ..., c_0) is lexicographically least.  Fields with
q = p^d below the table limit use the "zech" representation: a nonzero
element is stored as the exponent of a fixed multiplicative generator,
multiplication is index addition, addition goes through the Zech
logarithm table, and the quadratic character is the parity of the index.
Larger fields fall back to the "poly" representation (dense coefficient
vectors reduced mod the modulus).

Contexts are immutable after construction and cached by field_create, so
they can be shared across threads and forked worker processes.  Element
operations are pure.

Every element has a canonical integer encoding enc(a) = sum a_i p^i over
its coefficient vector; encodings order elements deterministically and
index the log table.
"""

from __future__ import annotations

import functools

import numpy as np

from .errors import BudgetExceededError

DEFAULT_ZECH_LIMIT = 1 << 22

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin (exact for n < 3.3 * 10^24)."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division; fine at desk scale."""
    out: dict[int, int] = {}
    f = 2
    while f * f <= n:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


# ---------------------------------------------------------------------------
# dense polynomials over Z/p (plain int lists, ascending), used only for the
# modulus search and for "poly" representation arithmetic


def _zp_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _zp_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _zp_trim(out)


def _zp_mod(a, m, p):
    # m monic
    a = list(a)
    dm = len(m) - 1
    while len(a) - 1 >= dm:
        c = a[-1]
        if c:
            off = len(a) - 1 - dm
            for i in range(dm):
                a[off + i] = (a[off + i] - c * m[i]) % p
        a.pop()
    return _zp_trim(a)


def _zp_powmod(a, n, m, p):
    r = [1]
    a = _zp_mod(a, m, p)
    while n:
        if n & 1:
            r = _zp_mod(_zp_mul(r, a, p), m, p)
        a = _zp_mod(_zp_mul(a, a, p), m, p)
        n >>= 1
    return r


def _zp_monic(a, p):
    inv = pow(a[-1], p - 2, p)
    return [(c * inv) % p for c in a]


def _zp_gcd2(a, b, p):
    a, b = _zp_trim(list(a)), _zp_trim(list(b))
    while b:
        a, b = b, _zp_mod(a, _zp_monic(b, p), p)
    return _zp_monic(a, p) if a else a


def _zp_sub(a, b, p):
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p
           for i in range(n)]
    return _zp_trim(out)


def _is_irreducible_zp(m, p, d):
    # m monic of degree d; test x^{p^d} == x mod m and
    # gcd(x^{p^{d/r}} - x, m) == 1 for every prime r | d
    x = [0, 1]
    frob = [x]
    cur = x
    for _ in range(d):
        cur = _zp_powmod(cur, p, m, p)
        frob.append(cur)
    if frob[d] != _zp_mod(x, m, p):
        return False
    for r in factorize(d):
        diff = _zp_sub(frob[d // r], x, p)
        if len(_zp_gcd2(diff, m, p)) != 1:
            return False
    return True


def _lex_least_irreducible(p, d):
    """Monic irreducible t^d + c_{d-1} t^{d-1} + ... + c_0 with the
    lexicographically least (c_{d-1}, ..., c_0).  Returns ascending tuple
    including the leading 1."""
    if d == 1:
        return (0, 1)  # t itself
    for code in range(p ** d):
        digits = []
        x = code
        for _ in range(d):
            digits.append(x % p)
            x //= p
        # digits[0] is the least significant digit of code; code ascending
        # means (c_{d-1}, ..., c_0) ascending when c_{d-1} is the most
        # significant digit
        coeffs = list(reversed(digits))  # (c_0, ..., c_{d-1})
        m = coeffs + [1]
        if _is_irreducible_zp(m, p, d):
            return tuple(m)
    raise AssertionError("no irreducible found")  # impossible


# ---------------------------------------------------------------------------


class FieldElem:
    """Element of a FieldCtx.  Value is a log index (zech, -1 for zero)
    or a coefficient tuple (poly)."""

    __slots__ = ("ctx", "v")

    def __init__(self, ctx, v):
        self.ctx = ctx
        self.v = v

    def _check(self, other):
        if not isinstance(other, FieldElem) or other.ctx is not self.ctx:
            raise ValueError("field context mismatch")

    def __add__(self, other):
        self._check(other)
        return FieldElem(self.ctx, self.ctx._add(self.v, other.v))

    def __sub__(self, other):
        self._check(other)
        return FieldElem(self.ctx, self.ctx._add(self.v, self.ctx._neg(other.v)))

    def __neg__(self):
        return FieldElem(self.ctx, self.ctx._neg(self.v))

    def __mul__(self, other):
        self._check(other)
        return FieldElem(self.ctx, self.ctx._mul(self.v, other.v))

    def __truediv__(self, other):
        self._check(other)
        return self * other.inverse()

    def __pow__(self, n):
        return FieldElem(self.ctx, self.ctx._pow(self.v, n))

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return FieldElem(self.ctx, self.ctx._inv(self.v))

    def is_zero(self):
        return self.ctx._is_zero(self.v)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        return (isinstance(other, FieldElem) and other.ctx is self.ctx
                and other.v == self.v)

    def __hash__(self):
        return hash((id(self.ctx), self.v))

    def to_int(self) -> int:
        """Canonical integer encoding sum a_i p^i of the coefficient vector."""
        return self.ctx._enc(self.v)

    def coeffs(self) -> tuple[int, ...]:
        """Coefficient vector (a_0, ..., a_{d-1}) over F_p."""
        return self.ctx._coeff_vector(self.v)

    def lift(self) -> int:
        """Integer representative in [0, p) (prime fields only)."""
        if self.ctx.d != 1:
            raise ValueError("lift is defined for prime fields only")
        return self.to_int()

    def frobenius(self):
        """x -> x^p."""
        return self ** self.ctx.p

    def __repr__(self):
        return f"F{self.ctx.q}:{self.to_int()}"


class FieldCtx:
    """Arithmetic context for F_{p^d}; build via field_create."""

    __slots__ = ("p", "d", "q", "modulus", "rep", "zech_limit",
                 "_exp", "_log", "_zech", "_pvec", "_reduc", "_gen_cache",
                 "_key")

    def __init__(self, p, d, zech_limit=DEFAULT_ZECH_LIMIT, rep="auto"):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if p == 2:
            raise ValueError("p = 2 is excluded (the method requires an odd prime)")
        if d < 1:
            raise ValueError("extension degree must be >= 1")
        q = p ** d
        if rep == "auto":
            rep = "zech" if q <= zech_limit else "poly"
        if rep == "zech" and q > zech_limit:
            raise BudgetExceededError(
                f"q = {q} exceeds the zech table memory budget ({zech_limit})")
        if rep not in ("zech", "poly"):
            raise ValueError(f"unknown representation {rep!r}")
        self.p, self.d, self.q = p, d, q
        self.zech_limit = zech_limit
        self.rep = rep
        self.modulus = _lex_least_irreducible(p, d)
        self._pvec = tuple(p ** i for i in range(d))
        self._gen_cache = None
        self._key = (p, d, zech_limit, rep)
        if rep == "zech":
            self._build_tables()
            self._reduc = None
        else:
            self._exp = self._log = self._zech = None
            # reduction rows: coefficients of t^{d+k} mod modulus, k = 0..d-2
            rows = []
            cur = [-c % p for c in self.modulus[:d]]  # t^d
            rows.append(tuple(cur))
            for _ in range(d - 2):
                cur = self._poly_shift_reduce(cur)
                rows.append(tuple(cur))
            self._reduc = tuple(rows)

    # -- construction helpers ------------------------------------------------

    def _poly_shift_reduce(self, cur):
        # cur holds coeffs of t^k mod modulus; return t^{k+1} mod modulus
        p, d = self.p, self.d
        top = cur[d - 1]
        nxt = [0] + list(cur[:d - 1])
        if top:
            for i in range(d):
                nxt[i] = (nxt[i] - top * self.modulus[i]) % p
        else:
            nxt = [c % p for c in nxt]
        return nxt

    def _find_generator_coeffs(self):
        """Smallest (by encoding) multiplicative generator, as coefficients."""
        p, d, q = self.p, self.d, self.q
        prime_divs = list(factorize(q - 1))
        m = list(self.modulus)
        for enc in range(2, q):
            cand = []
            x = enc
            for _ in range(d):
                cand.append(x % p)
                x //= p
            cand = _zp_trim(list(cand))
            ok = True
            for r in prime_divs:
                if _zp_powmod(cand, (q - 1) // r, m, p) == [1]:
                    ok = False
                    break
            if ok:
                return cand
        raise AssertionError("no generator found")

    def _build_tables(self):
        p, d, q = self.p, self.d, self.q
        q1 = q - 1
        gen = self._find_generator_coeffs()
        # multiply-by-generator matrix: column j = gen * t^j mod modulus
        cols = []
        for j in range(d):
            col = _zp_mod(_zp_mul(gen, [0] * j + [1], p), list(self.modulus), p)
            cols.append(col + [0] * (d - len(col)))
        mg = np.array(cols, dtype=np.int64).T  # acts on coefficient columns
        pvec = np.array(self._pvec, dtype=np.int64)
        exp = np.empty(q1, dtype=np.int64)
        block = min(q1, 4096)
        x = np.zeros((block, d), dtype=np.int64)
        x[0, 0] = 1
        for i in range(1, min(block, q1)):
            x[i] = mg.dot(x[i - 1]) % p
        n0 = min(block, q1)
        exp[:n0] = x[:n0].dot(pvec)
        if q1 > block:
            mb = np.eye(d, dtype=np.int64)
            for _ in range(block):
                mb = mg.dot(mb) % p
            pos = block
            cur = x
            while pos < q1:
                cur = cur.dot(mb.T) % p
                take = min(block, q1 - pos)
                exp[pos:pos + take] = cur[:take].dot(pvec)
                pos += take
        log = np.full(q, -1, dtype=np.int64)
        log[exp] = np.arange(q1, dtype=np.int64)
        # 1 + g^k: bump the constant coefficient, with wraparound at p-1
        c0 = exp % p
        e_plus = np.where(c0 == p - 1, exp - (p - 1), exp + 1)
        zech = log[e_plus].copy()
        self._exp = exp
        self._log = log
        self._zech = zech
        for a in (exp, log, zech):
            a.setflags(write=False)

    # -- raw value operations ------------------------------------------------

    def _is_zero(self, v):
        if self.rep == "zech":
            return v < 0
        return not any(v)

    def _add(self, a, b):
        if self.rep == "zech":
            if a < 0:
                return b
            if b < 0:
                return a
            t = (a - b) % (self.q - 1)
            z = int(self._zech[t])
            return -1 if z < 0 else (b + z) % (self.q - 1)
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def _neg(self, a):
        if self.rep == "zech":
            if a < 0:
                return a
            return (a + (self.q - 1) // 2) % (self.q - 1)
        p = self.p
        return tuple((-x) % p for x in a)

    def _mul(self, a, b):
        if self.rep == "zech":
            if a < 0 or b < 0:
                return -1
            return (a + b) % (self.q - 1)
        prod = _zp_mul(list(a), list(b), self.p)
        return self._poly_canon(prod)

    def _poly_canon(self, coeffs):
        p, d = self.p, self.d
        coeffs = list(coeffs)
        if len(coeffs) > d:
            out = coeffs[:d]
            for k in range(len(coeffs) - d):
                c = coeffs[d + k]
                if c:
                    row = self._reduc[k]
                    for i in range(d):
                        out[i] = (out[i] + c * row[i]) % p
            coeffs = out
        coeffs = [c % p for c in coeffs]
        return tuple(coeffs + [0] * (d - len(coeffs)))

    def _inv(self, a):
        if self.rep == "zech":
            return (-a) % (self.q - 1)
        return self._pow(a, self.q - 2)

    def _pow(self, a, n):
        if self._is_zero(a):
            if n == 0:
                return self._one_v()
            if n < 0:
                raise ZeroDivisionError("0 to a negative power")
            return a
        q1 = self.q - 1
        n %= q1
        if self.rep == "zech":
            return (a * n) % q1
        r = self._one_v()
        base = a
        while n:
            if n & 1:
                r = self._mul(r, base)
            base = self._mul(base, base)
            n >>= 1
        return r

    def _one_v(self):
        return 0 if self.rep == "zech" else (1,) + (0,) * (self.d - 1)

    def _enc(self, v):
        if self.rep == "zech":
            return 0 if v < 0 else int(self._exp[v])
        return sum(c * w for c, w in zip(v, self._pvec))

    def _coeff_vector(self, v):
        if self.rep == "poly":
            return tuple(v)
        e = self._enc(v)
        p = self.p
        out = []
        for _ in range(self.d):
            out.append(e % p)
            e //= p
        return tuple(out)

    # -- element constructors ------------------------------------------------

    def zero(self):
        return FieldElem(self, -1 if self.rep == "zech" else (0,) * self.d)

    def one(self):
        return FieldElem(self, self._one_v())

    def from_int(self, n: int) -> FieldElem:
        """The image of the integer n (an element of the prime subfield)."""
        return self.from_enc(n % self.p)

    def from_enc(self, e: int) -> FieldElem:
        """Element with canonical encoding e in [0, q)."""
        if not 0 <= e < self.q:
            raise ValueError("encoding out of range")
        if self.rep == "zech":
            return FieldElem(self, int(self._log[e]))
        p = self.p
        out = []
        for _ in range(self.d):
            out.append(e % p)
            e //= p
        return FieldElem(self, tuple(out))

    def from_coeffs(self, coeffs) -> FieldElem:
        """Element sum coeffs[i] * t^i from integer coefficients."""
        coeffs = [c % self.p for c in coeffs]
        if len(coeffs) > self.d:
            raise ValueError("too many coefficients")
        coeffs += [0] * (self.d - len(coeffs))
        return self.from_enc(sum(c * w for c, w in zip(coeffs, self._pvec)))

    def gen(self) -> FieldElem:
        """The class of t (a root of the modulus); d = 1 gives 0."""
        return self.from_coeffs([0, 1]) if self.d > 1 else self.zero()

    def multiplicative_generator(self) -> FieldElem:
        """Deterministic generator of the multiplicative group."""
        if self._gen_cache is None:
            if self.rep == "zech":
                self._gen_cache = FieldElem(self, 1)
            else:
                g = self._find_generator_coeffs()
                self._gen_cache = self.from_coeffs(g)
        return self._gen_cache

    def elements(self):
        """All field elements in canonical encoding order."""
        for e in range(self.q):
            yield self.from_enc(e)

    def __repr__(self):
        return f"FieldCtx(p={self.p}, d={self.d}, rep={self.rep})"


@functools.lru_cache(maxsize=None)
def _field_create_cached(p, d, zech_limit, rep):
    return FieldCtx(p, d, zech_limit, rep)


def field_create(p: int, d: int, zech_limit: int = DEFAULT_ZECH_LIMIT,
                 rep: str = "auto") -> FieldCtx:
    """Create (or fetch the cached) F_{p^d} context, p an odd prime.

    Equal parameters always return the identical context object, so
    element contexts can be compared by identity."""
    return _field_create_cached(int(p), int(d), int(zech_limit), str(rep))


def field_arith(a: FieldElem, b: FieldElem, op: str, n: int | None = None) -> FieldElem:
    """Dispatch form of the basic operations: add, sub, mul, div, pow(n)."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "pow":
        return a ** n
    raise ValueError(f"unknown op {op!r}")


def quad_char(a: FieldElem) -> int:
    """Quadratic character: 0 at zero, +1 on squares, -1 on non-squares.

    Under the zech representation this is the parity of the log; otherwise
    a^((q-1)/2) compared against 1.
    """
    if a.is_zero():
        return 0
    ctx = a.ctx
    if ctx.rep == "zech":
        return -1 if (a.v & 1) else 1
    r = a ** ((ctx.q - 1) // 2)
    return 1 if r == ctx.one() else -1


# ---------------------------------------------------------------------------
# univariate polynomials over a FieldCtx


class Poly:
    """Dense univariate polynomial over a FieldCtx, ascending coefficients.

    Immutable; the zero polynomial has an empty coefficient tuple.
    """

    __slots__ = ("ctx", "c")

    def __init__(self, ctx, coeffs):
        cs = list(coeffs)
        while cs and cs[-1].is_zero():
            cs.pop()
        self.ctx = ctx
        self.c = tuple(cs)

    @classmethod
    def from_ints(cls, ctx, ints):
        return cls(ctx, [ctx.from_int(n) for n in ints])

    @classmethod
    def x(cls, ctx):
        return cls(ctx, [ctx.zero(), ctx.one()])

    @property
    def degree(self):
        return len(self.c) - 1

    def is_zero(self):
        return not self.c

    def __getitem__(self, i):
        if 0 <= i < len(self.c):
            return self.c[i]
        return self.ctx.zero()

    def __eq__(self, other):
        return (isinstance(other, Poly) and other.ctx is self.ctx
                and other.c == self.c)

    def __hash__(self):
        return hash((id(self.ctx), self.c))

    def __add__(self, other):
        n = max(len(self.c), len(other.c))
        return Poly(self.ctx, [self[i] + other[i] for i in range(n)])

    def __sub__(self, other):
        n = max(len(self.c), len(other.c))
        return Poly(self.ctx, [self[i] - other[i] for i in range(n)])

    def __neg__(self):
        return Poly(self.ctx, [-a for a in self.c])

    def __mul__(self, other):
        if self.is_zero() or other.is_zero():
            return Poly(self.ctx, [])
        z = self.ctx.zero()
        out = [z] * (len(self.c) + len(other.c) - 1)
        for i, a in enumerate(self.c):
            if a.is_zero():
                continue
            for j, b in enumerate(other.c):
                out[i + j] = out[i + j] + a * b
        return Poly(self.ctx, out)

    def scale(self, k: FieldElem):
        return Poly(self.ctx, [a * k for a in self.c])

    def shift(self, n: int):
        """Multiply by t^n."""
        return Poly(self.ctx, [self.ctx.zero()] * n + list(self.c))

    def __divmod__(self, other):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if self.degree < other.degree:
            return Poly(self.ctx, []), self
        inv = other.c[-1].inverse()
        rem = list(self.c)
        out = [self.ctx.zero()] * (len(self.c) - len(other.c) + 1)
        db = other.degree
        for i in range(len(rem) - 1, db - 1, -1):
            coef = rem[i] * inv
            if not coef.is_zero():
                out[i - db] = coef
                for j, b in enumerate(other.c):
                    rem[i - db + j] = rem[i - db + j] - coef * b
        return Poly(self.ctx, out), Poly(self.ctx, rem[:db])

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def monic(self):
        """(monic multiple, leading coefficient)."""
        if self.is_zero():
            return self, self.ctx.one()
        lead = self.c[-1]
        if lead == self.ctx.one():
            return self, lead
        return self.scale(lead.inverse()), lead

    def derivative(self):
        out = []
        for i in range(1, len(self.c)):
            out.append(self.c[i] * self.ctx.from_int(i))
        return Poly(self.ctx, out)

    def pow_mod(self, n: int, mod: "Poly"):
        r = Poly(self.ctx, [self.ctx.one()])
        base = self % mod
        while n:
            if n & 1:
                r = (r * base) % mod
            base = (base * base) % mod
            n >>= 1
        return r

    def gcd(self, other):
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()[0]

    def eval(self, x: FieldElem):
        acc = self.ctx.zero()
        for a in reversed(self.c):
            acc = acc * x + a
        return acc

    def enc_key(self):
        """Sort key: degree, then coefficients leading-to-constant by encoding."""
        return (self.degree, tuple(a.to_int() for a in reversed(self.c)))

    def __repr__(self):
        if self.is_zero():
            return "Poly(0)"
        terms = [f"{a.to_int()}*t^{i}" for i, a in enumerate(self.c) if not a.is_zero()]
        return "Poly(" + " + ".join(terms) + ")"


def _pth_root_poly(f: Poly) -> Poly:
    """For f with f' = 0, the g with g^p = f."""
    ctx = f.ctx
    p = ctx.p
    root_exp = p ** (ctx.d - 1)  # inverse of Frobenius on F_{p^d}
    out = []
    for i in range(0, f.degree + 1, p):
        out.append(f[i] ** root_exp)
    return Poly(ctx, out)


def _squarefree_decomposition(f: Poly) -> list[tuple[Poly, int]]:
    # f monic; classic characteristic-p algorithm
    ctx = f.ctx
    p = ctx.p
    one = Poly(ctx, [ctx.one()])
    out: list[tuple[Poly, int]] = []
    fp = f.derivative()
    if fp.is_zero():
        for g, m in _squarefree_decomposition(_pth_root_poly(f)):
            out.append((g, m * p))
        return out
    c = f.gcd(fp)
    w = (f // c).monic()[0]
    i = 1
    while w != one:
        y = w.gcd(c)
        z = (w // y).monic()[0]
        if z != one:
            out.append((z, i))
        i += 1
        w = y
        c = (c // y).monic()[0]
    if c != one:
        for g, m in _squarefree_decomposition(_pth_root_poly(c)):
            out.append((g, m * p))
    return out


def _distinct_degree(f: Poly) -> list[tuple[Poly, int]]:
    # f monic squarefree; returns (product of irreducibles of degree e, e)
    ctx = f.ctx
    out = []
    x = Poly.x(ctx)
    h = x
    rest = f
    e = 0
    while rest.degree > 0:
        e += 1
        if 2 * e > rest.degree:
            out.append((rest, rest.degree))
            break
        h = h.pow_mod(ctx.q, rest)
        g = (h - x).gcd(rest)
        if g.degree > 0:
            out.append((g, e))
            rest = (rest // g).monic()[0]
            h = h % rest
    return out


def _counter_poly(ctx, n: int, cap_degree: int) -> Poly:
    """n-th polynomial in the deterministic candidate sequence: base-q digits
    of n, coefficients decoded through the canonical encoding."""
    digits = []
    while n:
        digits.append(ctx.from_enc(n % ctx.q))
        n //= ctx.q
    u = Poly(ctx, digits)
    return u


def _equal_degree(f: Poly, e: int) -> list[Poly]:
    # f monic squarefree, all irreducible factors of degree e
    ctx = f.ctx
    if f.degree == e:
        return [f]
    exp = (ctx.q ** e - 1) // 2
    one = Poly(ctx, [ctx.one()])
    n = ctx.q  # first non-constant candidate in the counter sequence
    while True:
        u = _counter_poly(ctx, n, f.degree)
        n += 1
        if u.degree < 1:
            continue
        g = u.gcd(f)
        if 0 < g.degree < f.degree:
            rest = (f // g).monic()[0]
            return sorted(_equal_degree(g, e) + _equal_degree(rest, e),
                          key=Poly.enc_key)
        s = u.pow_mod(exp, f) - one
        g = s.gcd(f)
        if 0 < g.degree < f.degree:
            rest = (f // g).monic()[0]
            return sorted(_equal_degree(g, e) + _equal_degree(rest, e),
                          key=Poly.enc_key)


def factor_univariate(f: Poly) -> list[tuple[Poly, int]]:
    """Factor a nonzero univariate polynomial into monic irreducibles.

    Squarefree decomposition, then distinct-degree, then equal-degree
    splitting driven by a counter-based deterministic candidate sequence.
    Output sorted by degree, then by coefficients (leading to constant,
    compared through the canonical integer encoding).
    """
    if f.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    fm, _ = f.monic()
    out: list[tuple[Poly, int]] = []
    if fm.degree == 0:
        return out
    for g, m in _squarefree_decomposition(fm):
        for prod, e in _distinct_degree(g):
            for irr in _equal_degree(prod, e):
                out.append((irr, m))
    out.sort(key=lambda fm_: fm_[0].enc_key())
    return out


def poly_roots(f: Poly) -> list[tuple[FieldElem, int]]:
    """Roots of f in its own field, with multiplicities, sorted by encoding."""
    out = []
    for g, m in factor_univariate(f):
        if g.degree == 1:
            out.append((-g[0], m))
    out.sort(key=lambda rm: rm[0].to_int())
    return out


# ---------------------------------------------------------------------------
# subfield embeddings


_EMBED_CACHE: dict[tuple, tuple] = {}


def _embedding_powers(src: FieldCtx, target: FieldCtx):
    key = (src._key, target._key)
    hit = _EMBED_CACHE.get(key)
    if hit is not None:
        return hit
    # root of the source modulus inside the target, least by encoding
    mod_poly = Poly.from_ints(target, src.modulus)
    roots = poly_roots(mod_poly)
    if not roots:
        raise AssertionError("source modulus has no root in target field")
    beta = roots[0][0]
    powers = [target.one()]
    for _ in range(src.d - 1):
        powers.append(powers[-1] * beta)
    _EMBED_CACHE[key] = tuple(powers)
    return _EMBED_CACHE[key]


def embed_subfield(a: FieldElem, target: FieldCtx) -> FieldElem:
    """Embed a in F_{p^d} into F_{p^(de)} along the canonical ring map.

    The map fixes F_p and sends the class of t to the least root (by
    encoding) of the source modulus in the target; the image satisfies the
    same minimal polynomial over F_p.
    """
    src = a.ctx
    if src is target:
        return a
    if target.p != src.p:
        raise ValueError("different characteristic")
    if target.d % src.d:
        raise ValueError(
            f"F_p^{src.d} does not embed into F_p^{target.d}: degree not divisible")
    if src.d == 1:
        return target.from_int(a.to_int())
    powers = _embedding_powers(src, target)
    acc = target.zero()
    for digit, pw in zip(a.coeffs(), powers):
        if digit:
            acc = acc + pw * target.from_int(digit)
    return acc


def minimal_polynomial(a: FieldElem) -> Poly:
    """Minimal polynomial of a over F_p, returned over the prime field."""
    ctx = a.ctx
    prime = field_create(ctx.p, 1, ctx.zech_limit)
    orbit = [a]
    b = a.frobenius()
    while b != a:
        orbit.append(b)
        b = b.frobenius()
    poly = Poly(ctx, [ctx.one()])
    for r in orbit:
        poly = poly * Poly(ctx, [-r, ctx.one()])
    ints = []
    for coef in poly.c:
        vec = coef.coeffs()
        if any(vec[1:]):
            raise AssertionError("minimal polynomial coefficient outside F_p")
        ints.append(vec[0])
    return Poly.from_ints(prime, ints)
