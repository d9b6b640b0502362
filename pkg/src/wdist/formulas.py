"""Closed-form counts: rank classes, sum distributions, weight distribution.

Every quantity is an exact Python integer. Divisions go through ``_exact``,
which refuses to round.
"""

from __future__ import annotations

from .errors import NegativeFrequency, NonIntegralFrequency
from .expsums import SumClass
from .field import CodeParams, quadratic_character
from .tables import DistributionTable


def _exact(num: int, den: int) -> int:
    if num % den:
        raise NonIntegralFrequency(f"{num}/{den} is not an integer")
    return num // den


def _half_power(p: int, num: int) -> int:
    """p^(num/2) for even num."""
    if num % 2:
        raise NonIntegralFrequency(f"p^({num}/2) is irrational")
    return p ** (num // 2)


def _v(p: int, rho: int) -> int:
    return p - 1 if rho % p == 0 else -1


def _common(params: CodeParams):
    p, n, d = params.p, params.n, params.d
    q = p**n
    r0_core = p ** (n + 2 * d) - p ** (n + d) - p**n + p ** (2 * d)
    return p, n, d, q, r0_core


def r2_count(params: CodeParams) -> int:
    """Number of pairs whose form has rank s - 2."""
    p, n, d, q, _ = _common(params)
    return _exact((p ** (n - d) - 1) * (q - 1), p ** (2 * d) - 1)


def rank_counts(params: CodeParams) -> DistributionTable:
    """Pairs (gamma, delta) != (0, 0) by kernel dimension m (rank s - m)."""
    p, n, d, q, core = _common(params)
    return DistributionTable(
        {
            0: _exact(core * (q - 1), p ** (2 * d) - 1),
            1: p ** (n - d) * (q - 1),
            2: r2_count(params),
        },
        key_name="m",
    )


def sign_class_counts(params: CodeParams) -> DistributionTable:
    """Pairs by (i, j): rank s - i and sign j of S(0, gamma, delta)."""
    p, n, d, q, core = _common(params)
    r0 = _exact(core * (q - 1), 2 * (p ** (2 * d) - 1))
    h = _half_power(p, n - d)
    r2 = _exact((p ** (n - d) - 1) * (q - 1), 2 * (p ** (2 * d) - 1))
    return DistributionTable(
        {
            (0, 1): r0,
            (0, -1): r0,
            (1, 1): _exact((p ** (n - d) + h) * (q - 1), 2),
            (1, -1): _exact((p ** (n - d) - h) * (q - 1), 2),
            (2, 1): r2,
            (2, -1): r2,
        },
        key_name="class",
    )


def sum_class_for(params: CodeParams, i: int, j: int, rho0: int = 0) -> SumClass:
    """Shape of S for a pair in rank class i with sign j.

    For odd d the classes i = 0, 2 carry a factor sqrt((-1)^((p-1)/2) p),
    i.e. a Gauss sum; everything else is a rational multiple of a root of 1.
    """
    n, d = params.n, params.d
    exp2 = n + i * d
    kind = "gauss" if exp2 % 2 else "rational"
    return SumClass(kind, j, exp2, rho0)


def pair_sum_distribution(params: CodeParams) -> DistributionTable:
    """S(0, gamma, delta) over pairs != (0, 0)."""
    signs = sign_class_counts(params)
    return DistributionTable(
        {sum_class_for(params, i, j): freq for (i, j), freq in signs.items()},
        key_name="class",
    )


def zero_sum_count(params: CodeParams) -> int:
    p, n, d, q, _ = _common(params)
    return (q - 1) * (p ** (2 * n - d) - p ** (2 * n - 2 * d) + p ** (2 * n - 3 * d) - p ** (n - 2 * d) + 1)


def triple_sum_distribution(params: CodeParams) -> DistributionTable:
    """S(eps, gamma, delta) over all triples, the phase zeta^rho folded into rho0."""
    p, n, d, q, core = _common(params)
    table = DistributionTable(key_name="class")
    table.add(SumClass("full", 1, 2 * n, 0), 1)
    table.add(SumClass("zero"), zero_sum_count(params))
    r0_half = _exact(core * (q - 1), 2 * (p ** (2 * d) - 1))
    r2_half = _exact((p ** (n - d) - 1) * (q - 1), 2 * (p ** (2 * d) - 1))
    h1 = _half_power(p, n - d)
    for rho in range(p):
        v = _v(p, rho)
        # rank class 1: always rational
        table.add(SumClass("rational", 1, n + d, rho),
                  _exact((p ** (n - d - 1) + v * _half_power(p, n - d - 2)) * (p ** (n - d) + h1) * (q - 1), 2))
        table.add(SumClass("rational", -1, n + d, rho),
                  _exact((p ** (n - d - 1) - v * _half_power(p, n - d - 2)) * (p ** (n - d) - h1) * (q - 1), 2))
        if d % 2:
            eta = quadratic_character(p, -rho)
            for sign in (1, -1):
                table.add(SumClass("gauss", sign, n, rho),
                          (p ** (n - 1) + sign * eta * _half_power(p, n - 1)) * r0_half)
                table.add(SumClass("gauss", sign, n + 2 * d, rho),
                          (p ** (n - 2 * d - 1) + sign * eta * _half_power(p, n - 2 * d - 1)) * r2_half)
        else:
            for sign in (1, -1):
                table.add(SumClass("rational", sign, n, rho),
                          (p ** (n - 1) + sign * v * _half_power(p, n - 2)) * r0_half)
                table.add(SumClass("rational", sign, n + 2 * d, rho),
                          (p ** (n - 2 * d - 1) + sign * v * _half_power(p, n - 2 * d - 2)) * r2_half)
    return table


def weight_rows(params: CodeParams) -> list[tuple[int, int]]:
    """The (weight, frequency) rows as listed, before merging equal weights.

    Ten rows for odd d, fourteen for even d.
    """
    p, n, d, q, core = _common(params)
    D2 = p ** (2 * d) - 1
    base = (p - 1) * p ** (n - 1)
    a1 = _half_power(p, n - d - 2)    # p^((n-d-2)/2)
    b1 = _half_power(p, n + d - 2)    # p^((n+d-2)/2)
    h1 = _half_power(p, n - d)        # p^((n-d)/2)
    rows = [(0, 1)]
    r1 = [
        ((p - 1) * (p ** (n - 1) - b1),
         _exact((p ** (n - d - 1) + (p - 1) * a1) * (p ** (n - d) + h1) * (q - 1), 2)),
        ((p - 1) * (p ** (n - 1) + b1),
         _exact((p ** (n - d - 1) - (p - 1) * a1) * (p ** (n - d) - h1) * (q - 1), 2)),
        (base - b1,
         _exact((p - 1) * (p ** (n - d - 1) + a1) * (p ** (n - d) - h1) * (q - 1), 2)),
        (base + b1,
         _exact((p - 1) * (p ** (n - d - 1) - a1) * (p ** (n - d) + h1) * (q - 1), 2)),
    ]
    if d % 2:
        c0 = _half_power(p, n - 1)            # p^((n-1)/2)
        c2 = _half_power(p, n - 2 * d - 1)    # p^((n-2d-1)/2)
        e2 = _half_power(p, n + 2 * d - 1)    # p^((n+2d-1)/2)
        rows.append((base, (q - 1) * (
            p ** (2 * n - 1) + (p - 1) * p ** (2 * n - d - 1) - p ** (2 * n - 2 * d)
            + (p - 1) * p ** (2 * n - 3 * d - 1) + p ** (n - 1) - (p - 1) * p ** (n - 2 * d - 1) + 1)))
        rows.append((base - c0, _exact((p - 1) * (p ** (n - 1) + c0) * core * (q - 1), 2 * D2)))
        rows.append((base + c0, _exact((p - 1) * (p ** (n - 1) - c0) * core * (q - 1), 2 * D2)))
        rows.extend(r1)
        rows.append((base - e2, _exact((p - 1) * (p ** (n - 2 * d - 1) + c2) * (p ** (n - d) - 1) * (q - 1), 2 * D2)))
        rows.append((base + e2, _exact((p - 1) * (p ** (n - 2 * d - 1) - c2) * (p ** (n - d) - 1) * (q - 1), 2 * D2)))
    else:
        c0 = _half_power(p, n - 2)            # p^((n-2)/2)
        c2 = _half_power(p, n - 2 * d - 2)    # p^((n-2d-2)/2)
        e2 = _half_power(p, n + 2 * d - 2)    # p^((n+2d-2)/2)
        rows.append((base, zero_sum_count(params)))
        rows.append(((p - 1) * (p ** (n - 1) - c0), _exact((p ** (n - 1) + (p - 1) * c0) * core * (q - 1), 2 * D2)))
        rows.append(((p - 1) * (p ** (n - 1) + c0), _exact((p ** (n - 1) - (p - 1) * c0) * core * (q - 1), 2 * D2)))
        rows.append((base - c0, _exact((p - 1) * (p ** (n - 1) + c0) * core * (q - 1), 2 * D2)))
        rows.append((base + c0, _exact((p - 1) * (p ** (n - 1) - c0) * core * (q - 1), 2 * D2)))
        rows.extend(r1)
        tail = (p ** (n - d) - 1) * (q - 1)
        rows.append(((p - 1) * (p ** (n - 1) - e2), _exact((p ** (n - 2 * d - 1) + (p - 1) * c2) * tail, 2 * D2)))
        rows.append(((p - 1) * (p ** (n - 1) + e2), _exact((p ** (n - 2 * d - 1) - (p - 1) * c2) * tail, 2 * D2)))
        rows.append((base - e2, _exact((p - 1) * (p ** (n - 2 * d - 1) + c2) * tail, 2 * D2)))
        rows.append((base + e2, _exact((p - 1) * (p ** (n - 2 * d - 1) - c2) * tail, 2 * D2)))
    for w, f in rows:
        if f < 0:
            raise NegativeFrequency(f"weight {w} gets frequency {f}")
    return rows


def weight_distribution(params: CodeParams) -> DistributionTable:
    """Weight distribution with coinciding weights merged."""
    table = DistributionTable(key_name="weight")
    for w, f in weight_rows(params):
        table.add(w, f)
    return table


def expected_moments(params: CodeParams) -> tuple[int, int]:
    """Sum over all pairs of S(0, gamma, delta) and of its square."""
    p, n, d = params.p, params.n, params.d
    first = p ** (2 * n)
    second = p ** (2 * n) * (2 * p**n - 1) if p**d % 4 == 1 else p ** (2 * n)
    return first, second
