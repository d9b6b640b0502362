"""Exact evaluation and classification of the exponential sums

    S(eps, gamma, delta) = sum_x zeta^Tr(eps x + gamma x^(p^k+1) + delta x^(p^3k+1)).

A sum is held as its count vector N[r] = #{x : Tr(...) = r}, so that
S = sum_r N[r] zeta^r exactly.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .cyclotomic import Cyclotomic, gauss_sum, gauss_sum_square_check  # noqa: F401
from .errors import (
    BudgetExceeded,
    MemoryCapExceeded,
    NonRationalNorm,
    UnclassifiableCounts,
)
from .field import CodeParams, FieldCtx, quadratic_character
from .sweep import run_sweep
from .tables import DistributionTable

DEFAULT_MEMORY_CAP = 1 << 30  # bytes

KIND_ORDER = {"full": 0, "zero": 1, "gauss": 2, "rational": 2}


@dataclass(frozen=True)
class SumClass:
    """Shape of one exponential sum.

    ``exp2`` is the exponent of p in |S|^2. For ``rational`` the value is
    sign * p^(exp2/2) * zeta^rho0; for ``gauss`` it is
    sign * p^((exp2-1)/2) * G * zeta^rho0 with G the quadratic Gauss sum.
    """

    kind: str
    sign: int = 0
    exp2: int = 0
    rho0: int = 0

    @property
    def sort_key(self):
        return (KIND_ORDER[self.kind], self.exp2, -self.sign, self.rho0)

    @property
    def label(self) -> str:
        if self.kind in ("zero", "full"):
            return self.kind
        sign = "+" if self.sign > 0 else "-"
        return f"{self.kind}{sign} p^({self.exp2}/2) zeta^{self.rho0}"

    def as_dict(self) -> dict:
        return {"kind": self.kind, "sign": self.sign, "exp2": self.exp2, "rho0": self.rho0}

    def value(self, p: int) -> Cyclotomic:
        if self.kind == "zero":
            return Cyclotomic.integer(p, 0)
        if self.kind == "full":
            return Cyclotomic.integer(p, p ** (self.exp2 // 2))
        if self.kind == "rational":
            scale = self.sign * p ** (self.exp2 // 2)
            return scale * Cyclotomic.zeta(p, self.rho0)
        scale = self.sign * p ** ((self.exp2 - 1) // 2)
        return scale * gauss_sum(p) * Cyclotomic.zeta(p, self.rho0)


def form_exponents(params: CodeParams) -> tuple[int, int]:
    p, k = params.p, params.k
    return p**k + 1, p ** (3 * k) + 1


# --- values of the quadratic part ------------------------------------------

def pair_values(params: CodeParams, ctx: FieldCtx, gammas, deltas) -> np.ndarray:
    """Tr(gamma x^(p^k+1) + delta x^(p^3k+1)) for all gammas x deltas x field.

    Shape (len(gammas), len(deltas), p^n).
    """
    e1, e2 = form_exponents(params)
    g = ctx.trace_monomial(gammas, e1)
    d = ctx.trace_monomial(deltas, e2)
    return (g[:, None, :] + d[None, :, :]) % ctx.p


def counts_from_values(values: np.ndarray, p: int) -> np.ndarray:
    """Histogram along the last axis into p bins."""
    return np.stack([(values == r).sum(axis=-1) for r in range(p)], axis=-1)


def exp_sum_counts(params: CodeParams, ctx: FieldCtx, eps: int, gamma: int, delta: int) -> np.ndarray:
    """Count vector of S(eps, gamma, delta) by one pass over the field."""
    e1, e2 = form_exponents(params)
    vals = (
        ctx.trace_monomial([eps], 1)[0]
        + ctx.trace_monomial([gamma], e1)[0]
        + ctx.trace_monomial([delta], e2)[0]
    ) % ctx.p
    return np.bincount(vals, minlength=ctx.p).astype(np.int64)


# --- all eps at once -------------------------------------------------------

@lru_cache(maxsize=16)
def _dual_permutation(ctx: FieldCtx) -> np.ndarray:
    """perm[eps] = coordinates e with Tr(eps x) = <e, x> for every x."""
    n, p = ctx.n, ctx.p
    i = np.arange(n)
    gram = ctx.trace_of_power[(i[:, None] + i[None, :]) % ctx.order].astype(np.int64)
    digits = ctx.to_coeffs(np.arange(ctx.q))
    return ((digits @ gram) % p) @ ctx.digit_weights


@lru_cache(maxsize=16)
def _eps_trace_table(ctx: FieldCtx) -> np.ndarray:
    return ctx.trace_monomial(np.arange(ctx.q), 1).astype(np.int8)


def _check_memory(ctx: FieldCtx, batch: int, mem_cap: int) -> None:
    need = 3 * batch * ctx.q * ctx.p * 8
    if need > mem_cap:
        raise MemoryCapExceeded(f"transform needs {need} bytes, cap is {mem_cap}")


def transform_counts(values: np.ndarray, ctx: FieldCtx) -> np.ndarray:
    """Count vectors N_eps for every eps, for a batch of quadratic parts.

    ``values`` has shape (B, p^n). Each cell of the F_p^n grid holds an
    element of the group ring Z[C_p] (a length-p integer vector); n passes
    of a size-p transform whose twiddle factor is a cyclic shift turn the
    indicator of the values into sum_x y^(f(x) + <e, x>) for every e, which
    is the count vector itself. Everything stays in exact integers.
    """
    p, n, q = ctx.p, ctx.n, ctx.q
    B = values.shape[0]
    dtype = np.int16 if q < 2**15 else np.int32
    cells = np.zeros((B, q, p), dtype=dtype)
    cells[np.arange(B)[:, None], np.arange(q)[None, :], values] = 1
    grid = cells.reshape((B,) + (p,) * n + (p,))
    for axis in range(1, n + 1):
        grid = _shift_pass(grid, axis, p)
    out = grid.reshape(B, q, p)
    return out[:, _dual_permutation(ctx), :]


def _shift_pass(grid: np.ndarray, axis: int, p: int) -> np.ndarray:
    src = np.moveaxis(grid, axis, 0)
    dst = np.zeros(src.shape, dtype=src.dtype)
    for e in range(p):
        acc = dst[e]
        for x in range(p):
            s = (e * x) % p
            row = src[x]
            if s == 0:
                acc += row
            else:
                acc[..., s:] += row[..., : p - s]
                acc[..., :s] += row[..., p - s:]
    return np.ascontiguousarray(np.moveaxis(dst, 0, axis))


def batch_counts_over_epsilon(
    params: CodeParams, ctx: FieldCtx, gamma: int, delta: int, *, mem_cap: int = DEFAULT_MEMORY_CAP
) -> np.ndarray:
    """Table of count vectors of S(eps, gamma, delta), indexed by eps. Shape (p^n, p)."""
    _check_memory(ctx, 1, mem_cap)
    vals = pair_values(params, ctx, [gamma], [delta])[:, 0, :]
    out = transform_counts(vals, ctx)[0].astype(np.int64)
    if np.any(out.sum(axis=1) != ctx.q):
        raise AssertionError("count rows do not sum to p^n")
    return out


def enumerate_counts_over_epsilon(params: CodeParams, ctx: FieldCtx, gamma: int, delta: int) -> np.ndarray:
    """Same table as ``batch_counts_over_epsilon``, by direct enumeration."""
    vals = pair_values(params, ctx, [gamma], [delta])[0, 0]
    q = (_eps_trace_table(ctx) + vals[None, :]) % ctx.p
    return counts_from_values(q, ctx.p).astype(np.int64)


# --- norms and classification ----------------------------------------------

def magnitude_squared(counts) -> int:
    """|S|^2 from a count vector, as an exact integer."""
    c = [int(v) for v in counts]
    p = len(c)
    auto = [sum(c[r] * c[(r - t) % p] for r in range(p)) for t in range(p)]
    if len(set(auto[1:])) > 1:
        raise NonRationalNorm(f"|S|^2 of {c} is not rational")
    return auto[0] - auto[1]


def _exact_log(value: int, p: int) -> int | None:
    if value <= 0:
        return None
    e = 0
    while value % p == 0:
        value //= p
        e += 1
    return e if value == 1 else None


def classify_sum(params: CodeParams, counts) -> SumClass:
    """Match a count vector against the value shapes a sum can take."""
    p = params.p
    c = [int(v) for v in counts]
    if len(c) != p:
        raise ValueError(f"count vector must have length {p}")
    total = sum(c)
    if len(set(c)) == 1:
        return SumClass("zero")
    if c[0] == total:
        e = _exact_log(total, p)
        if e is None:
            raise UnclassifiableCounts(f"{c}")
        return SumClass("full", 1, 2 * e, 0)
    found = None
    for rho0 in range(p):
        rest = {c[r] for r in range(p) if r != rho0}
        if len(rest) == 1:
            diff = c[rho0] - rest.pop()
            if diff % p:
                continue
            b = diff // p
            e = _exact_log(abs(b), p)
            if e is not None:
                found = SumClass("rational", 1 if b > 0 else -1, 2 * e + 2, rho0)
            break
        a = c[rho0]
        sq = {c[(rho0 + r) % p] - a for r in range(1, p) if quadratic_character(p, r) == 1}
        nsq = {a - c[(rho0 + r) % p] for r in range(1, p) if quadratic_character(p, r) == -1}
        if len(sq) == 1 and sq == nsq:
            b = sq.pop()
            e = _exact_log(abs(b), p)
            if e is not None:
                found = SumClass("gauss", 1 if b > 0 else -1, 2 * e + 1, rho0)
            break
    if found is None:
        raise UnclassifiableCounts(f"count vector {c} fits no value shape")
    if p**found.exp2 != magnitude_squared(c):
        raise UnclassifiableCounts(f"{c}: template {found.label} disagrees with |S|^2")
    return found


# --- histograms over sweeps ------------------------------------------------

def count_histogram(counts: np.ndarray) -> Counter:
    """Multiset of the rows of a (..., p) array of count vectors."""
    rows = np.asarray(counts, dtype=np.int64).reshape(-1, counts.shape[-1])
    p = rows.shape[1]
    base = int(rows.max()) + 1
    if base ** (p - 1) < 2**62:
        keys = rows[:, : p - 1] @ (base ** np.arange(p - 1, dtype=np.int64))
        uniq, idx, freq = np.unique(keys, return_index=True, return_counts=True)
        uniq_rows = rows[idx]
    else:
        uniq_rows, freq = np.unique(rows, axis=0, return_counts=True)
    return Counter({tuple(int(v) for v in r): int(f) for r, f in zip(uniq_rows, freq)})


def _triple_task(params: CodeParams, ctx: FieldCtx, gammas, *, method: str) -> Counter:
    q = ctx.q
    deltas = ctx.elements_log_order
    vals = pair_values(params, ctx, gammas, deltas).reshape(-1, q)
    hist: Counter = Counter()
    if method == "transform":
        step = max(1, (1 << 21) // (q * ctx.p))
        for i in range(0, len(vals), step):
            hist.update(count_histogram(transform_counts(vals[i:i + step], ctx)))
    elif method == "enumerate":
        eps_tr = _eps_trace_table(ctx)
        step = max(1, (1 << 22) // (q * q))
        for i in range(0, len(vals), step):
            block = (eps_tr[None, :, :] + vals[i:i + step, None, :]) % ctx.p
            hist.update(count_histogram(counts_from_values(block, ctx.p)))
    else:
        raise ValueError(f"unknown method {method!r}")
    return hist


METHOD_BUDGETS = {
    # rough element-operation counts allowed per method
    "enumerate": 2 * 10**9,
    "transform": 10**11,
}


def sweep_cost(params: CodeParams, method: str) -> int:
    q, p, n = params.q, params.p, params.n
    if method == "enumerate":
        return q**4
    return q * q * n * p ** (n + 2)


def triple_histogram(
    params: CodeParams,
    ctx: FieldCtx,
    *,
    method: str = "transform",
    workers: int = 1,
    budget: int | None = None,
    mem_cap: int = DEFAULT_MEMORY_CAP,
) -> Counter:
    """Multiset of count vectors of S(eps, gamma, delta) over all p^(3n) triples."""
    if method not in METHOD_BUDGETS:
        raise ValueError(f"unknown method {method!r}")
    limit = METHOD_BUDGETS[method] if budget is None else budget
    cost = sweep_cost(params, method)
    if cost > limit:
        raise BudgetExceeded(f"{method} sweep at {params} costs ~{cost:.3g} > budget {limit:.3g}")
    if method == "transform":
        _check_memory(ctx, 1, mem_cap)
    per_gamma = ctx.q * ctx.q * (ctx.p if method == "transform" else ctx.q)
    return run_sweep(_triple_task, params, ctx, cells_per_gamma=per_gamma, workers=workers, method=method)


def _s0_task(params: CodeParams, ctx: FieldCtx, gammas) -> Counter:
    vals = pair_values(params, ctx, gammas, ctx.elements_log_order)
    return count_histogram(counts_from_values(vals, ctx.p))


def s0_histogram(params: CodeParams, ctx: FieldCtx, *, workers: int = 1) -> Counter:
    """Multiset of count vectors of S(0, gamma, delta) over all p^(2n) pairs, origin included."""
    return run_sweep(_s0_task, params, ctx, cells_per_gamma=ctx.q * ctx.q * 2, workers=workers)


def classify_histogram(params: CodeParams, hist: Counter) -> DistributionTable:
    table = DistributionTable(key_name="class")
    for counts, freq in hist.items():
        table.add(classify_sum(params, counts), freq)
    return table


# --- moments ---------------------------------------------------------------

@dataclass
class MomentReport:
    first: int
    second: int
    expected_first: int
    expected_second: int

    @property
    def passed(self) -> bool:
        return self.first == self.expected_first and self.second == self.expected_second


def moments_from_histogram(p: int, hist: Counter) -> tuple[int, int]:
    """Sum of S and of S^2 over a multiset of count vectors, reduced to integers."""
    first = Cyclotomic.integer(p, 0)
    second = Cyclotomic.integer(p, 0)
    for counts, freq in hist.items():
        s = Cyclotomic.of(p, counts)
        first = first + freq * s
        second = second + freq * (s * s)
    return first.to_int(), second.to_int()


def moment_checks(params: CodeParams, ctx: FieldCtx, *, workers: int = 1, hist: Counter | None = None) -> MomentReport:
    """First and second moments of S(0, gamma, delta) over all pairs."""
    from .formulas import expected_moments

    if hist is None:
        hist = s0_histogram(params, ctx, workers=workers)
    first, second = moments_from_histogram(params.p, hist)
    exp_first, exp_second = expected_moments(params)
    return MomentReport(first, second, exp_first, exp_second)


# --- distributions ----------------------------------------------------------

@dataclass
class SumDistributionReport:
    sweep: str
    observed: DistributionTable
    expected: DistributionTable

    @property
    def passed(self) -> bool:
        return self.observed == self.expected

    def divergences(self):
        return self.observed.diff(self.expected)


def s_distribution(
    params: CodeParams,
    ctx: FieldCtx,
    sweep: str = "gamma_delta_only",
    *,
    method: str = "transform",
    workers: int = 1,
    hist: Counter | None = None,
) -> SumDistributionReport:
    """Empirical distribution of S against the closed form.

    ``gamma_delta_only`` runs over pairs != (0, 0) with eps = 0; ``full``
    runs over all triples.
    """
    from . import formulas

    if sweep == "gamma_delta_only":
        if hist is None:
            hist = s0_histogram(params, ctx, workers=workers)
        hist = Counter(hist)
        origin = (ctx.q,) + (0,) * (ctx.p - 1)
        hist[origin] -= 1
        observed = classify_histogram(params, +hist)
        expected = formulas.pair_sum_distribution(params)
    elif sweep == "full":
        if hist is None:
            hist = triple_histogram(params, ctx, method=method, workers=workers)
        observed = classify_histogram(params, hist)
        expected = formulas.triple_sum_distribution(params)
    else:
        raise ValueError(f"unknown sweep {sweep!r}")
    return SumDistributionReport(sweep, observed, expected)
