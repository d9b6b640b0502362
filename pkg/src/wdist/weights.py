"""Weights of the cyclic code with codewords

    c(eps, gamma, delta) = (Tr(eps x + gamma x^(p^k+1) + delta x^(p^3k+1)))  for x != 0,

and the two routes to its weight distribution: enumeration and closed form.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import formulas
from .expsums import exp_sum_counts, form_exponents, triple_histogram
from .field import CodeParams, FieldCtx
from .tables import DistributionTable


def codeword(params: CodeParams, ctx: FieldCtx, eps: int, gamma: int, delta: int) -> np.ndarray:
    """Symbols of c(eps, gamma, delta) at x = alpha^0, alpha^1, ..., alpha^(p^n - 2)."""
    e1, e2 = form_exponents(params)
    x = ctx.exp_table
    return (
        ctx.trace_monomial([eps], 1)[0, x]
        + ctx.trace_monomial([gamma], e1)[0, x]
        + ctx.trace_monomial([delta], e2)[0, x]
    ) % ctx.p


def codeword_weight(params: CodeParams, ctx: FieldCtx, eps: int, gamma: int, delta: int) -> int:
    # x = 0 always contributes a zero of the trace form, so it drops out
    return ctx.q - int(exp_sum_counts(params, ctx, eps, gamma, delta)[0])


def weights_from_histogram(params: CodeParams, hist: Counter) -> DistributionTable:
    table = DistributionTable(key_name="weight")
    for counts, freq in hist.items():
        table.add(params.q - counts[0], freq)
    return table


def empirical_weight_distribution(
    params: CodeParams,
    ctx: FieldCtx,
    method: str = "transform",
    *,
    workers: int = 1,
    budget: int | None = None,
) -> DistributionTable:
    """Weight distribution by running over all p^(3n) codewords."""
    hist = triple_histogram(params, ctx, method=method, workers=workers, budget=budget)
    return weights_from_histogram(params, hist)


def closed_form_weight_distribution(params: CodeParams) -> DistributionTable:
    return formulas.weight_distribution(params)


def weight_table_invariants(params: CodeParams, table: DistributionTable) -> dict[str, bool]:
    p, n, q = params.p, params.n, params.q
    return {
        "total": table.total() == p ** (3 * n),
        "weight0": table[0] == 1,
        "first_moment": sum(w * f for w, f in table.items()) == (q - 1) * (p - 1) * p ** (3 * n - 1),
        "nonnegative": all(f > 0 for _, f in table.items()),
    }


def minimum_weight(table: DistributionTable) -> int | None:
    positive = [w for w, f in table.items() if w > 0 and f > 0]
    return min(positive) if positive else None


@dataclass
class WeightReport:
    params: CodeParams
    closed: DistributionTable
    empirical: DistributionTable
    method: str
    invariants: dict = field(default_factory=dict)

    @property
    def divergences(self) -> list[tuple[int, int, int]]:
        """(weight, closed-form frequency, empirical frequency) where they differ."""
        return self.closed.diff(self.empirical)

    @property
    def passed(self) -> bool:
        return not self.divergences and all(self.invariants.values())


def verify_weight_distribution(
    params: CodeParams,
    ctx: FieldCtx,
    method: str = "transform",
    *,
    workers: int = 1,
    hist: Counter | None = None,
) -> WeightReport:
    if hist is None:
        hist = triple_histogram(params, ctx, method=method, workers=workers)
    empirical = weights_from_histogram(params, hist)
    closed = closed_form_weight_distribution(params)
    inv = {}
    for name, ok in weight_table_invariants(params, closed).items():
        inv[f"closed.{name}"] = ok
    for name, ok in weight_table_invariants(params, empirical).items():
        inv[f"empirical.{name}"] = ok
    return WeightReport(params, closed, empirical, method, inv)
