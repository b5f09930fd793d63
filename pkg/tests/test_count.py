import random

import pytest

from k3cert.count import (
    CacheStore,
    chart_points,
    chart_value_logs,
    count_points,
    count_series,
    fingerprint_mod_p,
    trace_from_count,
)
from k3cert.errors import BudgetExceededError, WeilBoundError
from k3cert.ffield import field_create, quad_char
from k3cert.forms import IntForm, eval_form, reduce_mod

import data


def _slow_count(f6: IntForm, p: int, d: int) -> int:
    """Independent oracle: direct enumeration with FieldElem arithmetic."""
    ctx = field_create(p, d)
    f = reduce_mod(f6, field_create(p, 1)).embed(ctx)
    els = list(ctx.elements())
    one, zero = ctx.one(), ctx.zero()
    s = 0
    for y in els:
        for z in els:
            s += quad_char(eval_form(f, (one, y, z)))
    for z in els:
        s += quad_char(eval_form(f, (zero, one, z)))
    s += quad_char(eval_form(f, (zero, zero, one)))
    q = ctx.q
    return q * q + q + 1 + s


def test_surface_a_small_counts():
    f6 = IntForm(data.F6_A)
    assert count_points(f6, 5, 1).N == 41
    assert count_points(f6, 5, 2).N == 751
    assert count_points(f6, 5, 3).N == 15626


def test_surface_b_small_counts():
    f6 = IntForm(data.F6_B)
    assert count_points(f6, 3, 1).N == 19
    assert count_points(f6, 3, 2).N == 127
    assert count_points(f6, 3, 3).N == 676


def test_matches_slow_oracle_on_random_forms():
    rng = random.Random(99)
    for p, d in [(3, 1), (5, 1), (3, 2), (7, 1)]:
        for _ in range(4):
            coeffs = {}
            for a in range(7):
                for b in range(7 - a):
                    if rng.random() < 0.5:
                        coeffs[(a, b, 6 - a - b)] = rng.randrange(-10, 11)
            if not any(v % p for v in coeffs.values()):
                coeffs[(6, 0, 0)] = 1
            f6 = IntForm(coeffs, 6)
            assert count_points(f6, p, d).N == _slow_count(f6, p, d)


def test_trace_examples():
    assert trace_from_count(41, 5) == 15
    assert trace_from_count(751, 25) == 125
    assert trace_from_count(1 + 49, 7) == 0
    with pytest.raises(WeilBoundError):
        trace_from_count(10 ** 6, 5)


def test_counts_invariant_under_variable_permutation():
    rng = random.Random(7)
    f6 = IntForm({(a, b, 6 - a - b): rng.randrange(1, 9)
                  for a in range(7) for b in range(7 - a) if rng.random() < 0.6},
                 6)
    perms = [(0, 1, 2), (1, 2, 0), (2, 0, 1), (0, 2, 1)]
    for p, d in [(5, 1), (3, 2)]:
        vals = set()
        for perm in perms:
            g = IntForm({tuple(m[perm[i]] for i in range(3)): c
                         for m, c in f6.coeffs.items()}, 6)
            vals.add(count_points(g, p, d).N)
        assert len(vals) == 1


def test_chart_subtotals_sum_to_full_count():
    f6 = IntForm(data.F6_A)
    p, d = 5, 1
    ctx = field_create(p, d)
    f = reduce_mod(f6, field_create(p, 1))
    total = 0
    npts = 0
    for chart in (0, 1, 2):
        logs = chart_value_logs(f, ctx, chart)
        npts += len(logs)
        for v in logs:
            total += 0 if v < 0 else (1 - 2 * (int(v) & 1))
    assert npts == ctx.q ** 2 + ctx.q + 1
    assert npts + total == count_points(f6, p, d).N


def test_chart_points_align_with_chart_logs():
    f6 = IntForm(data.F6_B)
    ctx = field_create(3, 2)
    f = reduce_mod(f6, field_create(3, 1))
    for chart in (0, 1, 2):
        logs = chart_value_logs(f, ctx, chart)
        pts = chart_points(ctx, chart)
        assert len(logs) == len(pts)
        femb = f.embed(ctx)
        for v, pt in zip(logs, pts):
            val = eval_form(femb, pt)
            assert (v < 0) == val.is_zero()
            if v >= 0:
                assert quad_char(val) == (1 - 2 * (int(v) & 1))


def test_parallel_equals_serial():
    f6 = IntForm(data.F6_A)
    serial = count_points(f6, 5, 2, workers=1)
    parallel = count_points(f6, 5, 2, workers=3)
    assert serial.N == parallel.N


def test_budget_policy():
    f6 = IntForm(data.F6_A)
    with pytest.raises(BudgetExceededError):
        count_points(f6, 5, 8)  # q^2 = 5^16 > 4e9 without deep


def test_zero_reduction_rejected():
    f6 = IntForm({(6, 0, 0): 5})
    with pytest.raises(ValueError):
        count_points(f6, 5, 1)


def test_fingerprint_survives_equivalent_lifts():
    f6 = IntForm(data.F6_A)
    g6 = f6 + IntForm({(3, 3, 0): 5, (0, 0, 6): 25}, 6)
    assert fingerprint_mod_p(f6, 5) == fingerprint_mod_p(g6, 5)
    assert fingerprint_mod_p(f6, 5) != fingerprint_mod_p(f6, 3)
    assert count_points(g6, 5, 1).N == 41


def test_series_cache_and_external(tmp_path):
    f6 = IntForm(data.F6_A)
    cache = CacheStore(tmp_path / "counts.jsonl")
    s1 = count_series(f6, 5, 3, cache)
    assert s1.counts() == [41, 751, 15626]
    assert s1.sources == ("computed", "computed", "computed")
    cache2 = CacheStore(tmp_path / "counts.jsonl")
    s2 = count_series(f6, 5, 3, cache2)
    assert s2.counts() == s1.counts()
    assert s2.sources == ("cached", "cached", "cached")
    ext = {4: data.COUNTS_A[3]}
    s3 = count_series(f6, 5, 4, cache2, external=ext)
    assert s3.sources == ("cached", "cached", "cached", "external")
    assert s3.counts()[3] == data.COUNTS_A[3]


def test_series_traces():
    f6 = IntForm(data.F6_B)
    s = count_series(f6, 3, 3)
    assert s.traces() == [data.COUNTS_B[i] - 1 - 9 ** (i + 1) for i in range(3)]
