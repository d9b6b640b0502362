from __future__ import annotations

import numpy as np
import pytest

from wdist import formulas
from wdist.errors import InvalidForm
from wdist.expsums import pair_values
from wdist.field import validate_params
from wdist.forms import (
    apply_linearized,
    kernel_dim_m,
    kernel_dims,
    kernel_size_brute_force,
    linearized_matrix,
    null_space_mod_p,
    pair_sweep,
    phi_eval,
    rank_distribution,
    rank_mod_p,
    rank_report,
    rank_table_from_joint,
    sign_class_distribution,
)

PARAM_SETS = [(3, 3, 1), (5, 3, 1), (3, 5, 1), (7, 3, 1), (3, 6, 2)]


def _direct_L(params, ctx, gamma, delta, z):
    """L(z) written out term by term with pow; no shared code with the library operator."""
    p, n, k = params.p, params.n, params.k

    def fr(x, j):
        return ctx.pow(x, p ** (j % n))

    return ctx.sum([
        ctx.mul(gamma, fr(z, k)),
        ctx.mul(fr(gamma, -k), fr(z, -k)),
        ctx.mul(delta, fr(z, 3 * k)),
        ctx.mul(fr(delta, -3 * k), fr(z, -3 * k)),
    ])


def test_zero_form_matrix(setup):
    params, ctx = setup(3, 3, 1)
    assert not linearized_matrix(params, ctx, 0, 0).any()


@pytest.mark.parametrize("pnk", PARAM_SETS[:4])
def test_matrix_matches_direct_evaluation(setup, pnk, rng):
    params, ctx = setup(*pnk)
    for _ in range(20):
        g, d = (int(v) for v in rng.integers(0, ctx.q, 2))
        mat = linearized_matrix(params, ctx, g, d)
        z = rng.integers(0, ctx.q, size=5)
        via_matrix = ctx.from_coeffs((mat @ ctx.to_coeffs(z).T).T % params.p)
        assert np.array_equal(via_matrix, np.array([_direct_L(params, ctx, g, d, int(x)) for x in z]))
        assert np.array_equal(apply_linearized(params, ctx, g, d, z), via_matrix)


def test_rank_mod_p_small_cases():
    # determinant -3: singular mod 3, invertible mod 5
    assert rank_mod_p(np.array([[[1, 2], [2, 1]]]), 3)[0] == 1
    assert rank_mod_p(np.array([[[1, 2], [2, 1]]]), 5)[0] == 2
    assert rank_mod_p(np.eye(4, dtype=int)[None], 7)[0] == 4
    mat = np.array([[1, 1, 0], [0, 1, 1], [1, 2, 1]])
    basis = null_space_mod_p(mat, 3)
    assert len(basis) == 1 and not ((mat @ basis[0]) % 3).any()


@pytest.mark.parametrize("pnk", [(3, 3, 1), (5, 3, 1), (3, 6, 2)])
def test_kernel_dim_matches_brute_force(setup, pnk, rng):
    params, ctx = setup(*pnk)
    pairs = [tuple(int(v) for v in rng.integers(0, ctx.q, 2)) for _ in range(40)]
    pairs = [pr for pr in pairs if pr != (0, 0)]
    for g, d in pairs:
        m = kernel_dim_m(params, ctx, g, d)
        assert kernel_size_brute_force(params, ctx, g, d) == params.p ** (params.d * m)
        # and against the term-by-term operator
        z = np.arange(ctx.q)
        assert np.count_nonzero(_direct_L(params, ctx, g, d, z) == 0) == params.p ** (params.d * m)


def test_kernel_dim_rejects_zero_form(setup):
    params, ctx = setup(3, 3, 1)
    with pytest.raises(InvalidForm):
        kernel_dim_m(params, ctx, 0, 0)


@pytest.mark.parametrize("pnk", [(3, 3, 1), (5, 3, 1), (3, 5, 1), (3, 6, 2)])
def test_kernel_dims_exhaustive_in_range(setup, pnk):
    params, ctx = setup(*pnk)
    g = np.repeat(np.arange(ctx.q), ctx.q)
    d = np.tile(np.arange(ctx.q), ctx.q)
    keep = (g != 0) | (d != 0)
    dims = kernel_dims(params, ctx, g[keep], d[keep])
    assert set(np.unique(dims).tolist()) <= {0, 1, 2}


@pytest.mark.parametrize("pnk", [(3, 3, 1), (5, 3, 1)])
def test_singleton_forms_have_full_rank(setup, pnk):
    params, ctx = setup(*pnk)
    nz = np.arange(1, ctx.q)
    zero = np.zeros_like(nz)
    assert not kernel_dims(params, ctx, nz, zero).any()
    assert not kernel_dims(params, ctx, zero, nz).any()


@pytest.mark.parametrize("pnk", PARAM_SETS)
def test_phi_identities_random(setup, pnk, rng):
    """Phi + Phi^(p^-k) = z L(z) and Tr(Phi) = Tr(form) on 10^4 random triples."""
    params, ctx = setup(*pnk)
    p, n, k = params.p, params.n, params.k
    for _ in range(100):
        g, d = (int(v) for v in rng.integers(0, ctx.q, 2))
        z = rng.integers(0, ctx.q, size=100)
        phi = phi_eval(params, ctx, g, d, z)
        lhs = ctx.add(phi, ctx.pow(phi, p ** ((-k) % n)))
        assert np.array_equal(lhs, ctx.mul(z, _direct_L(params, ctx, g, d, z)))
        form = ctx.add(ctx.mul(g, ctx.pow(z, p**k + 1)), ctx.mul(d, ctx.pow(z, p ** (3 * k) + 1)))
        assert np.array_equal(ctx.trace(phi), ctx.trace(form))


def test_phi_vanishes_on_kernel(setup, rng):
    params, ctx = setup(3, 3, 1)
    assert phi_eval(params, ctx, 5, 7, 0) == 0
    hits = 0
    for g in range(ctx.q):
        for d in range(1, ctx.q, 5):
            basis = null_space_mod_p(linearized_matrix(params, ctx, g, d), params.p)
            for v in basis:
                hits += 1
                assert phi_eval(params, ctx, g, d, ctx.from_coeffs(v)) == 0
    assert hits > 0


def test_rank_distribution_3_3_1(setup):
    params, ctx = setup(3, 3, 1)
    table = rank_distribution(params, ctx)
    assert table.as_dict() == {0: 468, 1: 234, 2: 26}
    assert table == formulas.rank_counts(params)
    assert table.total() == 3**6 - 1


def test_rank_distribution_brute_force_kernels(setup):
    """Independent path: count kernel elements by direct evaluation for every pair."""
    params, ctx = setup(3, 3, 1)
    z = np.arange(ctx.q)
    counts = {0: 0, 1: 0, 2: 0}
    for g in range(ctx.q):
        for d in range(ctx.q):
            if g == d == 0:
                continue
            size = int(np.count_nonzero(_direct_L(params, ctx, g, d, z) == 0))
            counts[{1: 0, 3: 1, 9: 2}[size]] += 1
    assert counts == {0: 468, 1: 234, 2: 26}


@pytest.mark.parametrize("pnk", [(5, 3, 1), (3, 5, 1), (3, 6, 2)])
def test_rank_and_sign_distribution_match_closed_form(setup, pnk):
    params, ctx = setup(*pnk)
    joint = pair_sweep(params, ctx)
    assert rank_table_from_joint(joint) == formulas.rank_counts(params)
    assert sign_class_distribution(params, ctx, joint=joint) == formulas.sign_class_counts(params)


def test_rank_counts_5_3_1(setup):
    params, _ = setup(5, 3, 1)
    assert formulas.rank_counts(params).as_dict() == {0: 12400, 1: 3100, 2: 124}


@pytest.mark.parametrize("pnk", [(3, 3, 1), (5, 3, 1), (3, 5, 1), (3, 6, 2), (3, 9, 3), (5, 6, 2)])
def test_m2_count_formula(pnk):
    p, n, k = pnk
    params = validate_params(p, n, k)
    d = params.d
    expected = (p ** (n - d) - 1) * (p**n - 1) // (p ** (2 * d) - 1)
    assert formulas.r2_count(params) == expected
    assert formulas.rank_counts(params)[2] == expected


def test_sign_classes_3_3_1(setup):
    params, ctx = setup(3, 3, 1)
    table = sign_class_distribution(params, ctx)
    assert table.as_dict() == {(0, 1): 234, (0, -1): 234, (1, 1): 156, (1, -1): 78, (2, 1): 13, (2, -1): 13}
    for i in (0, 2):
        assert table[(i, 1)] == table[(i, -1)]


def test_rank_report_fields(setup):
    params, ctx = setup(3, 6, 2)
    r = rank_report(params, ctx, 1, 0)
    assert (r.m, r.rank_over_subfield, r.rank_over_prime) == (0, 3, 6)
    assert r.sign_class[1] in (1, -1)
    assert params.d * r.rank_over_subfield == r.rank_over_prime


@pytest.mark.parametrize("pnk", [(3, 3, 1), (5, 3, 1)])
def test_nonsquare_scaling(setup, pnk, rng):
    """Scaling both coefficients by a non-square of the subfield keeps m and flips the sign for m in {0, 2}."""
    params, ctx = setup(*pnk)
    u = ctx.subfield_generator(params.d)
    pairs = [tuple(int(v) for v in rng.integers(0, ctx.q, 2)) for _ in range(1000)]
    # random sampling rarely lands in R_2, so add every m = 2 pair explicitly
    g = np.repeat(np.arange(ctx.q), ctx.q)[1:]
    d = np.tile(np.arange(ctx.q), ctx.q)[1:]
    dims = kernel_dims(params, ctx, g, d)
    pairs += [(int(a), int(b)) for a, b in zip(g[dims == 2], d[dims == 2])][:100]
    for gamma, delta in pairs:
        if gamma == delta == 0:
            continue
        a = rank_report(params, ctx, gamma, delta)
        b = rank_report(params, ctx, int(ctx.mul(u, gamma)), int(ctx.mul(u, delta)))
        assert a.m == b.m
        flip = a.sign_class[1] * b.sign_class[1]
        assert flip == (1 if a.m == 1 else -1)


def test_form_values_match_pow(setup, rng):
    params, ctx = setup(3, 5, 1)
    gs = rng.integers(0, ctx.q, 3)
    ds = rng.integers(0, ctx.q, 3)
    vals = pair_values(params, ctx, gs, ds)
    x = np.arange(ctx.q)
    for i, g in enumerate(gs):
        for j, d in enumerate(ds):
            form = ctx.add(ctx.mul(int(g), ctx.pow(x, 3 + 1)), ctx.mul(int(d), ctx.pow(x, 27 + 1)))
            assert np.array_equal(vals[i, j], ctx.trace(form))
