from __future__ import annotations

import numpy as np
import pytest

from wdist import formulas
from wdist.cyclotomic import Cyclotomic, gauss_sum, gauss_sum_square_check
from wdist.errors import MemoryCapExceeded, NonRationalNorm, UnclassifiableCounts
from wdist.expsums import (
    SumClass,
    batch_counts_over_epsilon,
    classify_histogram,
    classify_sum,
    enumerate_counts_over_epsilon,
    exp_sum_counts,
    magnitude_squared,
    moment_checks,
    s_distribution,
    transform_counts,
    triple_histogram,
)


def _complex_sum(params, ctx, eps, gamma, delta):
    """Float oracle: sum of zeta^Tr(...) over the field, from pow and trace only."""
    x = np.arange(ctx.q)
    k = params.k
    arg = ctx.sum([
        ctx.mul(eps, x),
        ctx.mul(gamma, ctx.pow(x, params.p**k + 1)),
        ctx.mul(delta, ctx.pow(x, params.p ** (3 * k) + 1)),
    ])
    t = ctx.trace(arg)
    return np.exp(2j * np.pi * t / params.p).sum()


# --- Cyclotomic arithmetic -----------------------------------------------------

@pytest.mark.parametrize("p,expected", [(3, -3), (5, 5), (7, -7), (11, -11), (13, 13)])
def test_gauss_sum_square(p, expected):
    assert gauss_sum_square_check(p) == expected == (-1) ** ((p - 1) // 2) * p


def test_gauss_sum_3_expansion():
    # (zeta - zeta^2)^2 = zeta^2 - 2 + zeta = -3 in Z[zeta_3]
    g = Cyclotomic.zeta(3, 1) - Cyclotomic.zeta(3, 2)
    assert g == gauss_sum(3)
    assert (g * g).to_int() == -3


def test_cyclotomic_relations():
    p = 5
    z = Cyclotomic.zeta(p)
    assert z**p == 1
    assert sum((z**r for r in range(p)), Cyclotomic.integer(p, 0)) == 0
    assert (z * z.conj()).to_int() == 1
    assert z.galois(2) == z**2
    assert abs(gauss_sum(p).to_complex() - np.sqrt(5)) < 1e-12
    with pytest.raises(NonRationalNorm):
        z.to_int()


def test_cyclotomic_galois_is_ring_map(rng):
    p = 7
    for _ in range(50):
        a = Cyclotomic.of(p, rng.integers(-5, 6, p))
        b = Cyclotomic.of(p, rng.integers(-5, 6, p))
        for t in range(1, p):
            assert (a * b).galois(t) == a.galois(t) * b.galois(t)
            assert (a + b).galois(t) == a.galois(t) + b.galois(t)


# --- count vectors -------------------------------------------------------------------

def test_trivial_count_vectors(setup):
    params, ctx = setup(3, 3, 1)
    assert exp_sum_counts(params, ctx, 0, 0, 0).tolist() == [27, 0, 0]
    for eps in range(1, ctx.q):
        assert exp_sum_counts(params, ctx, eps, 0, 0).tolist() == [9, 9, 9]


@pytest.mark.parametrize("pnk", [(3, 3, 1), (5, 3, 1), (3, 6, 2)])
def test_counts_match_complex_oracle(setup, pnk, rng):
    params, ctx = setup(*pnk)
    for _ in range(30):
        e, g, d = (int(v) for v in rng.integers(0, ctx.q, 3))
        counts = exp_sum_counts(params, ctx, e, g, d)
        assert counts.sum() == ctx.q
        s = _complex_sum(params, ctx, e, g, d)
        assert abs(Cyclotomic.of(params.p, counts).to_complex() - s) < 1e-6
        assert abs(classify_sum(params, counts).value(params.p).to_complex() - s) < 1e-6
        assert magnitude_squared(counts) == round(abs(s) ** 2)


def test_batch_equals_oracle_on_full_cube(setup):
    params, ctx = setup(3, 3, 1)
    for g in range(ctx.q):
        for d in range(ctx.q):
            batch = batch_counts_over_epsilon(params, ctx, g, d)
            oracle = np.array([exp_sum_counts(params, ctx, e, g, d) for e in range(ctx.q)])
            assert np.array_equal(batch, oracle)


@pytest.mark.parametrize("pnk", [(5, 3, 1), (3, 5, 1), (3, 6, 2)])
def test_batch_equals_enumeration_sampled(setup, pnk, rng):
    params, ctx = setup(*pnk)
    for g, d in rng.integers(0, ctx.q, size=(4, 2)):
        batch = batch_counts_over_epsilon(params, ctx, int(g), int(d))
        assert np.array_equal(batch, enumerate_counts_over_epsilon(params, ctx, int(g), int(d)))
        for e in rng.integers(0, ctx.q, 5):
            assert np.array_equal(batch[e], exp_sum_counts(params, ctx, int(e), int(g), int(d)))


def test_batch_zero_form_is_uniform_off_origin(setup):
    params, ctx = setup(5, 3, 1)
    table = batch_counts_over_epsilon(params, ctx, 0, 0)
    assert table[0].tolist() == [125, 0, 0, 0, 0]
    assert np.all(table[1:] == 25)


def test_transform_memory_cap(setup):
    params, ctx = setup(3, 5, 1)
    with pytest.raises(MemoryCapExceeded):
        batch_counts_over_epsilon(params, ctx, 1, 1, mem_cap=1000)
    vals = np.zeros((2, ctx.q), dtype=np.int64)
    assert transform_counts(vals, ctx).shape == (2, ctx.q, ctx.p)


# --- magnitude and classification ------------------------------------------------------

def test_magnitude_examples(setup):
    params, ctx = setup(3, 3, 1)
    assert magnitude_squared([27, 0, 0]) == 729
    assert magnitude_squared([9, 9, 9]) == 0
    for g in range(1, ctx.q):
        assert magnitude_squared(exp_sum_counts(params, ctx, 0, g, 0)) == 27
    with pytest.raises(NonRationalNorm):
        magnitude_squared([3, 1, 0, 0, 0])


def test_classify_templates(setup):
    p3, _ = setup(3, 3, 1)
    p5, _ = setup(5, 3, 1)
    assert classify_sum(p3, [27, 0, 0]) == SumClass("full", 1, 6, 0)
    assert classify_sum(p3, [9, 9, 9]) == SumClass("zero")
    # A + (p-1)B at rho0, A - B elsewhere
    assert classify_sum(p5, [45, 20, 20, 20, 20]) == SumClass("rational", 1, 4, 0)
    assert classify_sum(p5, [20, 20, 45, 20, 20]) == SumClass("rational", 1, 4, 2)
    assert classify_sum(p5, [30, 30, 30, 5, 30]) == SumClass("rational", -1, 4, 3)
    # A + B eta(rho - rho0); squares mod 5 are {1, 4}
    assert classify_sum(p5, [25, 30, 20, 20, 30]) == SumClass("gauss", 1, 3, 0)
    # 25 - 5 eta(rho - 1)
    assert classify_sum(p5, [20, 25, 20, 30, 30]) == SumClass("gauss", -1, 3, 1)
    with pytest.raises(UnclassifiableCounts):
        classify_sum(p5, [26, 25, 25, 25, 24])


def test_classify_gauss_value(setup):
    params, _ = setup(3, 3, 1)
    # [9, 9 + 3, 9 - 3] = 9 + 3(zeta - zeta^2) = 3 G
    cls = classify_sum(params, [9, 12, 6])
    assert cls == SumClass("gauss", 1, 3, 0)
    assert cls.value(3) == Cyclotomic.of(3, [9, 12, 6])


def test_singletons_are_gauss(setup):
    params, ctx = setup(3, 3, 1)
    for g in range(1, ctx.q):
        cls = classify_sum(params, exp_sum_counts(params, ctx, 0, g, 0))
        assert cls.kind == "gauss" and cls.exp2 == 3


def test_bentness(setup):
    params, ctx = setup(3, 3, 1)
    for g in range(1, ctx.q):
        table = batch_counts_over_epsilon(params, ctx, g, 0)
        assert all(magnitude_squared(row) == 27 for row in table)
        table = batch_counts_over_epsilon(params, ctx, 0, g)
        assert all(magnitude_squared(row) == 27 for row in table)


@pytest.mark.parametrize("pnk", [(3, 3, 1), (3, 6, 2)])
def test_magnitudes_in_allowed_set(setup, pnk, rng):
    params, ctx = setup(*pnk)
    p, n, d = params.p, params.n, params.d
    allowed = {0, p**n, p ** (n + d), p ** (n + 2 * d)}
    for g, dl in rng.integers(0, ctx.q, size=(20, 2)):
        for row in batch_counts_over_epsilon(params, ctx, int(g), int(dl))[1:]:
            assert magnitude_squared(row) in allowed


def test_galois_conjugacy(setup, rng):
    params, ctx = setup(5, 3, 1)
    for e, g, d in rng.integers(0, ctx.q, size=(200, 3)):
        base = classify_sum(params, exp_sum_counts(params, ctx, int(e), int(g), int(d)))
        for t in range(2, params.p):
            te, tg, td = (int(ctx.scale(t, int(v))) for v in (e, g, d))
            cls = classify_sum(params, exp_sum_counts(params, ctx, te, tg, td))
            assert (cls.kind, cls.exp2) == (base.kind, base.exp2)


# --- moments and distributions -----------------------------------------------------------

@pytest.mark.parametrize("pnk,first,second", [
    ((3, 3, 1), 729, 729),
    ((5, 3, 1), 5**6, 5**6 * (2 * 5**3 - 1)),
    ((3, 5, 1), 3**10, 3**10),
])
def test_moments(setup, pnk, first, second):
    params, ctx = setup(*pnk)
    report = moment_checks(params, ctx)
    assert (report.first, report.second) == (first, second)
    assert report.passed
    assert formulas.expected_moments(params) == (first, second)


def test_pair_sum_classes_3_3_1(setup):
    params, ctx = setup(3, 3, 1)
    report = s_distribution(params, ctx, "gamma_delta_only")
    assert report.passed
    freqs = [f for _, f in report.observed.items()]
    assert sorted(freqs, reverse=True) == [234, 234, 156, 78, 13, 13]
    assert report.observed.total() == 3**6 - 1


@pytest.mark.parametrize("pnk", [(3, 3, 1), (5, 3, 1)])
def test_triple_sum_distribution(setup, pnk):
    params, ctx = setup(*pnk)
    report = s_distribution(params, ctx, "full")
    assert report.passed, report.divergences()
    p, n, d = params.p, params.n, params.d
    zero = (p**n - 1) * (p ** (2 * n - d) - p ** (2 * n - 2 * d) + p ** (2 * n - 3 * d) - p ** (n - 2 * d) + 1)
    assert report.observed[SumClass("zero")] == zero == formulas.zero_sum_count(params)


def test_enumerate_and_transform_histograms_agree(setup):
    params, ctx = setup(3, 3, 1)
    a = triple_histogram(params, ctx, method="enumerate")
    b = triple_histogram(params, ctx, method="transform")
    assert a == b
    assert classify_histogram(params, a) == formulas.triple_sum_distribution(params)


def test_parallel_sweep_is_deterministic(setup):
    params, ctx = setup(3, 3, 1)
    assert triple_histogram(params, ctx, workers=2) == triple_histogram(params, ctx, workers=1)
