"""The linearized operator L_{gamma,delta}, its kernel, and form ranks.

For the form Tr_d^n(gamma x^(p^k+1) + delta x^(p^3k+1)) the radical is the
kernel of

    L(z) = gamma z^(p^k) + gamma^(p^-k) z^(p^-k) + delta z^(p^3k) + delta^(p^-3k) z^(p^-3k),

an F_p-linear map. Its kernel is a vector space over GF(p^d) of dimension
m in {0, 1, 2}, and the form has rank s - m over GF(p^d).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import ClassificationMismatch, InvalidForm, NonDivisibleKernel, TableLimitExceeded
from .expsums import classify_sum, counts_from_values, pair_values
from .field import CodeParams, FieldCtx
from .sweep import run_sweep
from .tables import DistributionTable

DEFAULT_PAIR_LIMIT = 2**24


def _frob_powers(params: CodeParams) -> list[int]:
    """p^k, p^-k, p^3k, p^-3k as exponents modulo p^n - 1."""
    p, n, k = params.p, params.n, params.k
    return [pow(p, j % n) for j in (k, -k, 3 * k, -3 * k)]


def _operator_coeffs(params: CodeParams, ctx: FieldCtx, gammas, deltas):
    k = params.k
    g = np.asarray(gammas, dtype=np.int64).reshape(-1)
    d = np.asarray(deltas, dtype=np.int64).reshape(-1)
    return [g, ctx.frobenius(g, -k), d, ctx.frobenius(d, -3 * k)]


def apply_linearized(params: CodeParams, ctx: FieldCtx, gamma: int, delta: int, z):
    """L_{gamma,delta}(z) evaluated term by term."""
    k = params.k
    terms = [
        ctx.mul(gamma, ctx.frobenius(z, k)),
        ctx.mul(ctx.frobenius(gamma, -k), ctx.frobenius(z, -k)),
        ctx.mul(delta, ctx.frobenius(z, 3 * k)),
        ctx.mul(ctx.frobenius(delta, -3 * k), ctx.frobenius(z, -3 * k)),
    ]
    return ctx.sum(terms)


def linearized_matrices(params: CodeParams, ctx: FieldCtx, gammas, deltas) -> np.ndarray:
    """Matrices of L over F_p in the polynomial basis, shape (B, n, n).

    Column j holds the coordinates of L(alpha^j).
    """
    coeffs = _operator_coeffs(params, ctx, gammas, deltas)
    basis = ctx.digit_weights  # alpha^j is encoded as p^j
    images = None
    for c, e in zip(coeffs, _frob_powers(params)):
        term = ctx.mul_power(c[:, None], basis[None, :], e)
        images = term if images is None else ctx.add(images, term)
    images = np.asarray(images).reshape(len(coeffs[0]), ctx.n)
    return np.swapaxes(ctx.to_coeffs(images), 1, 2)


def linearized_matrix(params: CodeParams, ctx: FieldCtx, gamma: int, delta: int) -> np.ndarray:
    return linearized_matrices(params, ctx, [gamma], [delta])[0]


def rank_mod_p(mats, p: int) -> np.ndarray:
    """Ranks over F_p of a stack of matrices, by batched Gaussian elimination."""
    A = np.array(mats, dtype=np.int64) % p
    if A.ndim == 2:
        A = A[None]
    nb, nrows, ncols = A.shape
    rank = np.zeros(nb, dtype=np.int64)
    inverse = np.array([0] + [pow(a, -1, p) for a in range(1, p)], dtype=np.int64)
    rows = np.arange(nrows)
    for col in range(ncols):
        cand = (A[:, :, col] != 0) & (rows[None, :] >= rank[:, None])
        live = np.nonzero(cand.any(axis=1))[0]
        if not len(live):
            continue
        piv = cand[live].argmax(axis=1)
        r = rank[live]
        prow = A[live, piv].copy()
        A[live, piv] = A[live, r]
        prow = prow * inverse[prow[:, col]][:, None] % p
        A[live, r] = prow
        factors = A[live, :, col].copy()
        factors[np.arange(len(live)), r] = 0
        A[live] = (A[live] - factors[:, :, None] * prow[:, None, :]) % p
        rank[live] += 1
    return rank


def null_space_mod_p(mat, p: int) -> list[np.ndarray]:
    """A basis of the right null space of one matrix over F_p."""
    A = np.array(mat, dtype=np.int64) % p
    nrows, ncols = A.shape
    pivots = []
    r = 0
    for col in range(ncols):
        nz = [i for i in range(r, nrows) if A[i, col]]
        if not nz:
            continue
        A[[r, nz[0]]] = A[[nz[0], r]]
        A[r] = A[r] * pow(int(A[r, col]), -1, p) % p
        for i in range(nrows):
            if i != r and A[i, col]:
                A[i] = (A[i] - A[i, col] * A[r]) % p
        pivots.append(col)
        r += 1
        if r == nrows:
            break
    basis = []
    for free in (c for c in range(ncols) if c not in pivots):
        v = np.zeros(ncols, dtype=np.int64)
        v[free] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-A[i, free]) % p
        basis.append(v)
    return basis


def kernel_dims(params: CodeParams, ctx: FieldCtx, gammas, deltas) -> np.ndarray:
    """Kernel dimension m over GF(p^d) for each pair (gammas[i], deltas[i])."""
    mats = linearized_matrices(params, ctx, gammas, deltas)
    null = ctx.n - rank_mod_p(mats, ctx.p)
    if np.any(null % params.d):
        bad = int(np.nonzero(null % params.d)[0][0])
        raise NonDivisibleKernel(f"null space of dimension {null[bad]} is not a multiple of d={params.d}")
    return null // params.d


def kernel_dim_m(params: CodeParams, ctx: FieldCtx, gamma: int, delta: int) -> int:
    if gamma == 0 and delta == 0:
        raise InvalidForm("(gamma, delta) = (0, 0) has no rank class")
    return int(kernel_dims(params, ctx, [gamma], [delta])[0])


def kernel_size_brute_force(params: CodeParams, ctx: FieldCtx, gamma: int, delta: int) -> int:
    """Number of roots of L in the field, by evaluating L everywhere."""
    z = np.arange(ctx.q)
    return int(np.count_nonzero(apply_linearized(params, ctx, gamma, delta, z) == 0))


def phi_eval(params: CodeParams, ctx: FieldCtx, gamma: int, delta: int, x):
    """gamma x^(p^k+1) + delta x^(p^3k+1) - delta^(p^-k) x^(p^2k+p^-k) + delta^(p^-2k) x^(p^k+p^-2k).

    Under ``python -O`` the two postconditions (same absolute trace as the
    form; Phi + Phi^(p^-k) = x L(x)) are skipped.
    """
    p, n, k = params.p, params.n, params.k

    def pw(j):
        return pow(p, j % n)

    x = np.asarray(x, dtype=np.int64)
    terms = [
        ctx.mul_power(gamma, x, pw(k) + 1),
        ctx.mul_power(delta, x, pw(3 * k) + 1),
        ctx.neg(ctx.mul_power(ctx.frobenius(delta, -k), x, pw(2 * k) + pw(-k))),
        ctx.mul_power(ctx.frobenius(delta, -2 * k), x, pw(k) + pw(-2 * k)),
    ]
    phi = ctx.sum(terms)
    if __debug__:
        form = ctx.add(ctx.mul_power(gamma, x, pw(k) + 1), ctx.mul_power(delta, x, pw(3 * k) + 1))
        assert np.array_equal(ctx.trace(phi), ctx.trace(form))
        lhs = ctx.add(phi, ctx.frobenius(phi, -k))
        assert np.array_equal(lhs, ctx.mul(x, apply_linearized(params, ctx, gamma, delta, x)))
    return phi


@dataclass(frozen=True)
class RankReport:
    m: int
    d: int
    s: int
    n: int
    sign_class: tuple[int, int] | None = None

    @property
    def rank_over_subfield(self) -> int:
        return self.s - self.m

    @property
    def rank_over_prime(self) -> int:
        return self.n - self.d * self.m

    def as_dict(self) -> dict:
        return {
            "m": self.m,
            "rank_over_subfield": self.rank_over_subfield,
            "rank_over_prime": self.rank_over_prime,
            "sign_class": list(self.sign_class) if self.sign_class else None,
        }


def rank_report(params: CodeParams, ctx: FieldCtx, gamma: int, delta: int, with_sign: bool = True) -> RankReport:
    m = kernel_dim_m(params, ctx, gamma, delta)
    sign = None
    if with_sign:
        vals = pair_values(params, ctx, [gamma], [delta])[0, 0]
        counts = np.bincount(vals, minlength=ctx.p)
        sign = sign_classification(params, ctx, gamma, delta, counts, m=m)
    return RankReport(m, params.d, params.s, params.n, sign)


def sign_classification(params: CodeParams, ctx: FieldCtx, gamma: int, delta: int, s0_counts, m: int | None = None):
    """(i, j): rank class i = m and the sign j of S(0, gamma, delta)."""
    if m is None:
        m = kernel_dim_m(params, ctx, gamma, delta)
    return _sign_from_counts(params, m, s0_counts)


def _sign_from_counts(params: CodeParams, m: int, counts) -> tuple[int, int]:
    cls = classify_sum(params, counts)
    if cls.kind not in ("gauss", "rational") or cls.rho0 != 0 or cls.exp2 != params.n + params.d * m:
        raise ClassificationMismatch(f"m={m} but S(0, gamma, delta) has shape {cls.label}")
    return (m, cls.sign)


def _pair_task(params: CodeParams, ctx: FieldCtx, gammas, *, with_counts: bool) -> Counter:
    deltas = ctx.elements_log_order
    G = np.repeat(gammas, len(deltas))
    D = np.tile(deltas, len(gammas))
    keep = (G != 0) | (D != 0)
    G, D = G[keep], D[keep]
    m = kernel_dims(params, ctx, G, D)
    if not with_counts:
        return Counter({int(k): int(v) for k, v in zip(*np.unique(m, return_counts=True))})
    vals = pair_values(params, ctx, gammas, deltas).reshape(-1, ctx.q)[keep]
    counts = counts_from_values(vals, ctx.p)
    joint = np.concatenate([m[:, None], counts], axis=1)
    uniq, freq = np.unique(joint, axis=0, return_counts=True)
    return Counter({(int(r[0]), tuple(int(v) for v in r[1:])): int(f) for r, f in zip(uniq, freq)})


def _check_pairs(params: CodeParams, pair_limit: int) -> None:
    if params.q**2 > pair_limit:
        raise TableLimitExceeded(f"p^(2n) = {params.q**2} pairs exceed the limit {pair_limit}")


def pair_sweep(params: CodeParams, ctx: FieldCtx, *, workers: int = 1, pair_limit: int = DEFAULT_PAIR_LIMIT) -> Counter:
    """Joint multiset of (m, count vector of S(0, gamma, delta)) over pairs != (0, 0)."""
    _check_pairs(params, pair_limit)
    return run_sweep(_pair_task, params, ctx, cells_per_gamma=ctx.q * ctx.q * 2, workers=workers, with_counts=True)


def rank_distribution(params: CodeParams, ctx: FieldCtx, *, workers: int = 1, pair_limit: int = DEFAULT_PAIR_LIMIT) -> DistributionTable:
    """Pairs (gamma, delta) != (0, 0) by kernel dimension m, via Gaussian elimination."""
    _check_pairs(params, pair_limit)
    hist = run_sweep(_pair_task, params, ctx, cells_per_gamma=ctx.q * ctx.n * ctx.n * 4, workers=workers, with_counts=False)
    return DistributionTable(hist, key_name="m")


def sign_class_distribution(params: CodeParams, ctx: FieldCtx, *, workers: int = 1, joint: Counter | None = None) -> DistributionTable:
    """Pairs by (rank class i, sign j)."""
    if joint is None:
        joint = pair_sweep(params, ctx, workers=workers)
    table = DistributionTable(key_name="class")
    for (m, counts), freq in joint.items():
        table.add(_sign_from_counts(params, m, counts), freq)
    return table


def rank_table_from_joint(joint: Counter) -> DistributionTable:
    table = DistributionTable(key_name="m")
    for (m, _), freq in joint.items():
        table.add(m, freq)
    return table
