"""High-throughput point counts of w^2 = f6(x, y, z) over F_{p^d}.

The count is N = #P^2(F_q) + sum over P^2(F_q) of chi(f6(P)), which is
well defined on projective points because chi(lambda^6 f) = chi(f).  The
sum is taken chart by chart: (1 : y : z) with q^2 points, (0 : 1 : z)
with q points, and (0 : 0 : 1).

The hot loop works entirely in the discrete-log domain of the zech
representation: for fixed y the sextic f6(1, y, z) collapses to seven
per-y coefficients, each z-monomial value is a log gather, and additions
run through the Zech table.  Everything is vectorized with numpy over
blocks of (y, z) pairs; log values are kept unreduced modulo q - 1
(which is even, so character parity survives) and -1 marks zero.

Work is partitioned by disjoint ranges of y; worker subtotals are exact
integers, so the total is independent of worker count and scheduling.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import BudgetExceededError, WeilBoundError
from .ffield import FieldCtx, field_create
from .forms import IntForm, ModForm, reduce_mod

H2_DIM = 22  # second Betti number of a K3 surface
MANDATORY_Q2_LIMIT = 4_000_000_000  # desk-scale policy: q^2 at most 4e9
_BLOCK_ELEMS = 1 << 20


def fingerprint_mod_p(f6: IntForm, p: int) -> str:
    """SHA-256 of the canonical serialization of f6 mod p, so cache entries
    survive equivalent integer lifts."""
    ctx = field_create(p, 1)
    return hashlib.sha256(reduce_mod(f6, ctx).serialize().encode()).hexdigest()


@dataclass(frozen=True)
class CountRecord:
    p: int
    d: int
    N: int
    fingerprint: str
    wall_time_ms: float = field(compare=False, default=0.0)

    @property
    def q(self) -> int:
        return self.p ** self.d

    @property
    def trace(self) -> int:
        return trace_from_count(self.N, self.q)


@dataclass
class CountSeries:
    p: int
    dmax: int
    records: tuple
    sources: tuple  # per-d tag: computed | cached | external

    def counts(self):
        return [r.N for r in self.records]

    def traces(self):
        return [r.trace for r in self.records]


def trace_from_count(N: int, q: int) -> int:
    """Frobenius trace on H^2: t = N - 1 - q^2, with the Weil sanity bound."""
    t = N - 1 - q * q
    if abs(t) > H2_DIM * q:
        raise WeilBoundError(
            f"trace {t} violates |t| <= {H2_DIM} q = {H2_DIM * q}; the count is wrong")
    return t


# ---------------------------------------------------------------------------
# log-domain kernel


def _coef_log_matrix(ctx: FieldCtx, f: ModForm) -> np.ndarray:
    """M[b, c] = log of the coefficient of x^(n-b-c) y^b z^c, -1 when absent.

    The form may live over ctx itself or over its prime subfield."""
    if f.ctx is not ctx and (f.ctx.p != ctx.p or f.ctx.d != 1):
        raise ValueError("form is not defined over this field or its prime subfield")
    n = f.degree
    m = np.full((n + 1, n + 1), -1, dtype=np.int64)
    for (a, b, c), coef in f.coeffs.items():
        m[b, c] = ctx._log[coef.to_int()]
    return m


def _vmul(a, b):
    # log-domain product; -1 is zero
    return np.where((a < 0) | (b < 0), -1, a + b)


def _zadd(a, b, q1, zech):
    # log-domain sum via the Zech table; inputs may be unreduced mod q1
    t = (a - b) % q1
    zt = zech[t]
    r = np.where(zt < 0, -1, b + zt)
    r = np.where(a < 0, b, r)
    r = np.where(b < 0, a, r)
    return r


def _chi_sum(logs) -> int:
    """Sum of the quadratic character over an array of log values."""
    valid = logs >= 0
    odd = int(np.count_nonzero(logs[valid] & 1))
    return int(np.count_nonzero(valid)) - 2 * odd


def _poly_logs(ctx, coef_logs_1d, xlogs):
    """Horner evaluation in the log domain of sum_i c_i x^i over an array."""
    q1 = ctx.q - 1
    zech = ctx._zech
    acc = np.full(xlogs.shape, -1, dtype=np.int64)
    for c in coef_logs_1d[::-1]:
        acc = _zadd(_vmul(acc, xlogs), np.int64(c), q1, zech)
    return acc


def _affine_chart_sum(ctx, coef, y_lo, y_hi, block_elems=_BLOCK_ELEMS) -> int:
    """Character sum over the chart (1 : y : z) for y indices in [y_lo, y_hi).

    y index 0 is y = 0 and index 1 + k is g^k; z runs over all of F_q.
    """
    n = coef.shape[0] - 1
    q = ctx.q
    q1 = q - 1
    zech = ctx._zech
    ylogs = np.arange(y_lo, y_hi, dtype=np.int64) - 1  # index 0 -> -1 (zero)
    # per-y coefficient logs of f(1, y, z) as a polynomial in z
    lc = np.empty((n + 1, len(ylogs)), dtype=np.int64)
    for j in range(n + 1):
        lc[j] = _poly_logs(ctx, coef[:, j], ylogs)
    total = _chi_sum(lc[0])  # the z = 0 column
    if q1 == 0:
        return total
    k = np.arange(q1, dtype=np.int64)
    rows_per_block = max(1, block_elems // q1)
    for r0 in range(0, len(ylogs), rows_per_block):
        r1 = min(r0 + rows_per_block, len(ylogs))
        acc = None
        for j in range(n + 1):
            cj = lc[j, r0:r1, None]
            m = np.where(cj < 0, -1, cj + j * k[None, :])
            acc = m if acc is None else _zadd(acc, m, q1, zech)
        total += _chi_sum(acc)
    return total


def _line_chart_sum(ctx, coef) -> int:
    """Character sum over the chart (0 : 1 : z)."""
    n = coef.shape[0] - 1
    cz = [int(coef[n - c, c]) for c in range(n + 1)]
    zlogs = np.arange(ctx.q, dtype=np.int64) - 1
    return _chi_sum(_poly_logs(ctx, cz, zlogs))


def _point_chart_sum(ctx, coef) -> int:
    """Character value at (0 : 0 : 1)."""
    n = coef.shape[0] - 1
    c = int(coef[0, n])
    return 0 if c < 0 else (1 - 2 * (c & 1))


def chart_value_logs(form: ModForm, ctx: FieldCtx, chart: int) -> np.ndarray:
    """Log values of the form over one chart, for oracles and diagnostics.

    chart 0: (1 : y : z), flat array in y-major order over all (y, z);
    chart 1: (0 : 1 : z); chart 2: the single point (0 : 0 : 1).
    Element order within a chart follows the log-index enumeration
    (zero first, then powers of the generator).  Small fields only.
    """
    q = ctx.q
    if chart == 0 and q * q > (1 << 26):
        raise BudgetExceededError("chart materialization is for small fields")
    coef = _coef_log_matrix(ctx, form)
    n = coef.shape[0] - 1
    q1 = q - 1
    if chart == 2:
        c = int(coef[0, n])
        return np.array([c], dtype=np.int64)
    if chart == 1:
        cz = [int(coef[n - c, c]) for c in range(n + 1)]
        return _poly_logs(ctx, cz, np.arange(q, dtype=np.int64) - 1)
    ylogs = np.arange(q, dtype=np.int64) - 1
    lc = np.stack([_poly_logs(ctx, coef[:, j], ylogs) for j in range(n + 1)])
    out = np.empty((q, q), dtype=np.int64)
    out[:, 0] = lc[0]
    if q1:
        k = np.arange(q1, dtype=np.int64)
        acc = None
        for j in range(n + 1):
            cj = lc[j][:, None]
            m = np.where(cj < 0, -1, cj + j * k[None, :])
            acc = m if acc is None else _zadd(acc, m, q1, ctx._zech)
        out[:, 1:] = acc
    return out.reshape(-1)


def chart_points(ctx: FieldCtx, chart: int):
    """The projective points of a chart in the order used by chart_value_logs."""
    elems = [ctx.zero()] + [ctx.from_enc(int(e)) for e in ctx._exp] \
        if ctx.rep == "zech" else list(ctx.elements())
    one, zero = ctx.one(), ctx.zero()
    if chart == 2:
        return [(zero, zero, one)]
    if chart == 1:
        return [(zero, one, z) for z in elems]
    return [(one, y, z) for y in elems for z in elems]


# ---------------------------------------------------------------------------
# public counting API


def _require_zech(p, d, deep):
    q = p ** d
    if q * q > MANDATORY_Q2_LIMIT and not deep:
        raise BudgetExceededError(
            f"q^2 = {q * q} exceeds the desk-scale budget; pass deep=True "
            "(--deep) or inject the count as an external value")
    ctx = field_create(p, d)
    if ctx.rep != "zech":
        raise BudgetExceededError(
            f"q = {q} exceeds the zech table limit; counting this deep is "
            "not supported")
    return ctx


def _count_worker(args):
    coeffs, p, d, lo, hi = args
    ctx = field_create(p, d)
    f6p = ModForm.from_int_coeffs(field_create(p, 1), coeffs)
    coef = _coef_log_matrix(ctx, f6p)
    return _affine_chart_sum(ctx, coef, lo, hi)


def count_points(f6: IntForm, p: int, d: int, *, deep: bool = False,
                 workers: int = 1) -> CountRecord:
    """Exact #S(F_{p^d}) for the double cover w^2 = f6."""
    start = time.perf_counter()
    prime_ctx = field_create(p, 1)
    f6p = reduce_mod(f6, prime_ctx)
    if f6p.is_zero():
        raise ValueError(f"f6 vanishes mod {p}")
    if f6p.degree != 6:
        raise ValueError("f6 must be a sextic")
    ctx = _require_zech(p, d, deep)
    q = ctx.q
    coef = _coef_log_matrix(ctx, f6p)
    if workers > 1 and q >= 64:
        import multiprocessing as mp
        from concurrent.futures import ProcessPoolExecutor
        bounds = np.linspace(0, q, workers + 1, dtype=int)
        jobs = [(dict(f6p.lift().coeffs), p, d, int(lo), int(hi))
                for lo, hi in zip(bounds, bounds[1:]) if lo != hi]
        with ProcessPoolExecutor(max_workers=workers,
                                 mp_context=mp.get_context("fork")) as ex:
            s_affine = sum(ex.map(_count_worker, jobs))
    else:
        s_affine = _affine_chart_sum(ctx, coef, 0, q)
    s = s_affine + _line_chart_sum(ctx, coef) + _point_chart_sum(ctx, coef)
    n_pts = (q * q + q + 1) + s
    rec = CountRecord(p=p, d=d, N=int(n_pts),
                      fingerprint=fingerprint_mod_p(f6, p),
                      wall_time_ms=(time.perf_counter() - start) * 1e3)
    rec.trace  # Weil sanity check
    return rec


class CacheStore:
    """Append-only newline-delimited count cache keyed by
    (fingerprint, p, d); values are exact decimal integers."""

    def __init__(self, path):
        self.path = Path(path)
        self._mem: dict[tuple, int] = {}
        if self.path.exists():
            for line in self.path.read_text().splitlines():
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                self._mem[(rec["fingerprint"], rec["p"], rec["d"])] = int(rec["N"])

    def get(self, fingerprint: str, p: int, d: int):
        return self._mem.get((fingerprint, p, d))

    def put(self, fingerprint: str, p: int, d: int, N: int, source: str):
        key = (fingerprint, p, d)
        if key in self._mem:
            return
        self._mem[key] = N
        with self.path.open("a") as fh:
            fh.write(json.dumps({"fingerprint": fingerprint, "p": p, "d": d,
                                 "N": N, "source": source}) + "\n")


def count_series(f6: IntForm, p: int, dmax: int, cache: CacheStore | None = None,
                 *, deep: bool = False, workers: int = 1,
                 external: dict[int, int] | None = None) -> CountSeries:
    """Counts for d = 1..dmax with cache reuse and external injection.

    External values (for example published deep counts) are accepted for
    any d and tagged `external`; cache hits are tagged `cached`.
    """
    external = external or {}
    fp = fingerprint_mod_p(f6, p)
    records = []
    sources = []
    for d in range(1, dmax + 1):
        q = p ** d
        if d in external:
            rec = CountRecord(p=p, d=d, N=int(external[d]), fingerprint=fp)
            rec.trace  # Weil validation also for injected values
            src = "external"
        else:
            hit = cache.get(fp, p, d) if cache is not None else None
            if hit is not None:
                rec = CountRecord(p=p, d=d, N=hit, fingerprint=fp)
                rec.trace
                src = "cached"
            else:
                rec = count_points(f6, p, d, deep=deep, workers=workers)
                src = "computed"
        if cache is not None:
            cache.put(fp, p, d, rec.N, src)
        records.append(rec)
        sources.append(src)
    return CountSeries(p=p, dmax=dmax, records=tuple(records),
                       sources=tuple(sources))
