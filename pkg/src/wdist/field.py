"""Arithmetic in GF(p) and GF(p^n) for odd p.

Elements of GF(p^n) are plain integers in [0, p^n): the base-p digits of the
integer are the coefficients of the element in the polynomial basis
1, a, a^2, ..., a^(n-1), lowest digit first. ``a`` is the class of the
indeterminate modulo a primitive modulus, so it is also the primitive
element used for the exp/log tables.

All element operations accept scalars or numpy arrays.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import (
    DivisionByZero,
    EvenCharacteristic,
    EvenS,
    NotADivisor,
    NotPrime,
    NotPrimitive,
    NTooSmall,
    ParameterError,
    ReduciblePolynomial,
    TableLimitExceeded,
)

DEFAULT_TABLE_LIMIT = 2**24
MODULUS_CACHE_VERSION = 1


def is_prime(m: int) -> bool:
    if m < 2:
        return False
    if m % 2 == 0:
        return m == 2
    f = 3
    while f * f <= m:
        if m % f == 0:
            return False
        f += 2
    return True


def prime_factors(m: int) -> list[int]:
    out = []
    f = 2
    while f * f <= m:
        if m % f == 0:
            out.append(f)
            while m % f == 0:
                m //= f
        f += 1
    if m > 1:
        out.append(m)
    return out


def check_characteristic(p: int) -> None:
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if p == 2:
        raise EvenCharacteristic("characteristic 2 is not supported")


def quadratic_character(p: int, a: int) -> int:
    """Legendre symbol of ``a`` mod ``p``, with the value 0 at 0."""
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


# --- polynomials over F_p, ascending coefficient lists ---------------------

def _trim(f: list[int]) -> list[int]:
    while f and f[-1] == 0:
        f.pop()
    return f


def _poly_mod(f: list[int], g: list[int], p: int) -> list[int]:
    f = _trim([c % p for c in f])
    g = _trim(list(g))
    inv_lead = pow(g[-1], -1, p)
    while len(f) >= len(g):
        c = f[-1] * inv_lead % p
        shift = len(f) - len(g)
        for i, gc in enumerate(g):
            f[shift + i] = (f[shift + i] - c * gc) % p
        _trim(f)
    return f


def _poly_mulmod(a: list[int], b: list[int], g: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] += x * y
    return _poly_mod(prod, g, p)


def _poly_powmod(base: list[int], e: int, g: list[int], p: int) -> list[int]:
    result = [1]
    base = _poly_mod(base, g, p)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, g, p)
        base = _poly_mulmod(base, base, g, p)
        e >>= 1
    return result


def _poly_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a = _trim([c % p for c in a])
    b = _trim([c % p for c in b])
    while b:
        a, b = b, _poly_mod(a, b, p)
    return a


def is_irreducible(modulus: list[int], p: int) -> bool:
    """Rabin's test for a monic polynomial over F_p."""
    n = len(modulus) - 1
    x = [0, 1]
    if _poly_mod(_poly_sub(_poly_powmod(x, p**n, modulus, p), x, p), modulus, p):
        return False
    for r in prime_factors(n):
        h = _poly_sub(_poly_powmod(x, p ** (n // r), modulus, p), x, p)
        if len(_poly_gcd(modulus, h, p)) > 1:
            return False
    return True


def _poly_sub(a: list[int], b: list[int], p: int) -> list[int]:
    out = [0] * max(len(a), len(b))
    for i, c in enumerate(a):
        out[i] += c
    for i, c in enumerate(b):
        out[i] -= c
    return _trim([c % p for c in out])


def is_primitive(modulus: list[int], p: int) -> bool:
    """True when the class of x has order p^n - 1 modulo ``modulus``."""
    n = len(modulus) - 1
    order = p**n - 1
    x = [0, 1]
    if _poly_powmod(x, order, modulus, p) != [1]:
        return False
    return all(_poly_powmod(x, order // r, modulus, p) != [1] for r in prime_factors(order))


def find_primitive_modulus(p: int, n: int) -> tuple[int, ...]:
    """Smallest primitive monic polynomial of degree ``n``.

    Candidates are compared lexicographically on the ascending coefficient
    vector (c0, c1, ..., c_{n-1}, 1).
    """
    for low in itertools.product(range(p), repeat=n):
        if low[0] == 0:
            continue
        mod = list(low) + [1]
        if is_primitive(mod, p):
            return tuple(mod)
    raise AssertionError(f"no primitive polynomial of degree {n} over F_{p}")


def parse_modulus(text: str) -> tuple[int, ...]:
    """Parse ``"1,2,0,1"`` (ascending coefficients) into a tuple."""
    try:
        return tuple(int(tok) for tok in text.replace(" ", "").split(",") if tok != "")
    except ValueError as exc:
        raise ParameterError(f"bad modulus string {text!r}") from exc


def format_modulus(modulus) -> str:
    return ",".join(str(int(c)) for c in modulus)


def _modulus_cache_file(cache_dir: Path, p: int, n: int) -> Path:
    return Path(cache_dir) / f"modulus_p{p}_n{n}.txt"


def _read_cached_modulus(cache_dir, p: int, n: int) -> tuple[int, ...] | None:
    path = _modulus_cache_file(cache_dir, p, n)
    try:
        header, body = path.read_text().splitlines()[:2]
    except (OSError, ValueError):
        return None
    if header != f"wdist-modulus v{MODULUS_CACHE_VERSION} p={p} n={n}":
        return None
    try:
        mod = parse_modulus(body)
    except ParameterError:
        return None
    if len(mod) != n + 1 or mod[-1] != 1 or not is_primitive(list(mod), p):
        return None
    return mod


def _write_cached_modulus(cache_dir, p: int, n: int, modulus) -> None:
    path = _modulus_cache_file(cache_dir, p, n)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(
            f"wdist-modulus v{MODULUS_CACHE_VERSION} p={p} n={n}\n{format_modulus(modulus)}\n"
        )
        tmp.replace(path)
    except OSError:
        pass


# --- the field -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FieldCtx:
    """GF(p^n) with exp/log tables. Immutable; safe to share between workers."""

    p: int
    n: int
    modulus: tuple[int, ...]
    exp_table: np.ndarray = field(repr=False)
    log_table: np.ndarray = field(repr=False)
    trace_table: np.ndarray = field(repr=False)

    @property
    def q(self) -> int:
        return self.p**self.n

    @property
    def order(self) -> int:
        return self.q - 1

    @property
    def alpha(self) -> int:
        return int(self.exp_table[1 % self.order])

    @cached_property
    def digit_weights(self) -> np.ndarray:
        return self.p ** np.arange(self.n, dtype=np.int64)

    @cached_property
    def trace_of_power(self) -> np.ndarray:
        """Tr(alpha^i) for i in [0, p^n - 1)."""
        return self.trace_table[self.exp_table]

    @cached_property
    def elements_log_order(self) -> np.ndarray:
        """0 followed by alpha^0, alpha^1, ... (the sweep order)."""
        return np.concatenate([[0], self.exp_table]).astype(np.int64)

    def __reduce__(self):
        return (make_field, (self.p, self.n, self.modulus))

    # conversions
    def to_coeffs(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        return (x[..., None] // self.digit_weights) % self.p

    def from_coeffs(self, coeffs) -> np.ndarray | int:
        c = np.asarray(coeffs, dtype=np.int64) % self.p
        out = c @ self.digit_weights
        return int(out) if np.ndim(out) == 0 else out

    def element(self, coeffs) -> int:
        coeffs = list(coeffs)
        if len(coeffs) > self.n:
            raise ParameterError("too many coefficients")
        return int(self.from_coeffs(coeffs + [0] * (self.n - len(coeffs))))

    # additive structure
    def add(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        p = self.p
        for w in self.digit_weights:
            out += ((a // w + b // w) % p) * w
        return _unwrap(out)

    def neg(self, a):
        a = np.asarray(a, dtype=np.int64)
        out = np.zeros(a.shape, dtype=np.int64)
        p = self.p
        for w in self.digit_weights:
            out += ((-(a // w)) % p) * w
        return _unwrap(out)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def scale(self, c: int, a):
        """Multiply by an element of the prime field."""
        a = np.asarray(a, dtype=np.int64)
        out = np.zeros(a.shape, dtype=np.int64)
        for w in self.digit_weights:
            out += ((c * (a // w)) % self.p) * w
        return _unwrap(out)

    def sum(self, terms):
        terms = list(terms)
        acc = terms[0]
        for t in terms[1:]:
            acc = self.add(acc, t)
        return acc

    # multiplicative structure
    def log(self, a):
        return _unwrap(self.log_table[np.asarray(a, dtype=np.int64)])

    def exp(self, i):
        return _unwrap(self.exp_table[np.asarray(i, dtype=np.int64) % self.order])

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        la = self.log_table[a]
        lb = self.log_table[b]
        out = self.exp_table[(la + lb) % self.order]
        return _unwrap(np.where((a == 0) | (b == 0), 0, out))

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise DivisionByZero("0 has no inverse")
        return _unwrap(self.exp_table[(-self.log_table[a]) % self.order])

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e: int):
        a = np.asarray(a, dtype=np.int64)
        if e < 0:
            return self.pow(self.inv(a), -e)
        if e == 0:
            return _unwrap(np.ones(a.shape, dtype=np.int64))
        la = self.log_table[a]
        out = self.exp_table[(la * (e % self.order)) % self.order]
        return _unwrap(np.where(a == 0, 0, out))

    def mul_power(self, c, x, e: int):
        """c * x^e for e >= 1, vectorised over both arguments."""
        c = np.asarray(c, dtype=np.int64)
        x = np.asarray(x, dtype=np.int64)
        idx = (self.log_table[c] + (e % self.order) * self.log_table[x]) % self.order
        return _unwrap(np.where((c == 0) | (x == 0), 0, self.exp_table[idx]))

    def frobenius(self, x, j: int):
        """x^(p^j); negative j means the inverse automorphism."""
        return self.pow(x, pow(self.p, j % self.n))

    # trace
    def trace(self, x):
        """Absolute trace as an integer in [0, p)."""
        return _unwrap(self.trace_table[np.asarray(x, dtype=np.int64)].astype(np.int64))

    def trace_to(self, m: int, x):
        """Tr_m^n(x) = sum of x^(p^(m i)) for i < n/m, as a field element."""
        if m <= 0 or self.n % m:
            raise NotADivisor(f"{m} does not divide {self.n}")
        return self.sum(self.frobenius(x, m * i) for i in range(self.n // m))

    def trace_monomial(self, coeffs, e: int) -> np.ndarray:
        """Tr(c * x^e) for every c in ``coeffs`` (rows) and every x (columns)."""
        c = np.asarray(coeffs, dtype=np.int64).reshape(-1)
        lx = self.log_table[np.arange(1, self.q)]
        idx = (self.log_table[c][:, None] + (e % self.order) * lx[None, :]) % self.order
        out = np.zeros((len(c), self.q), dtype=np.int64)
        out[:, 1:] = self.trace_of_power[idx]
        out[c == 0] = 0
        return out

    def subfield_generator(self, d: int) -> int:
        """A generator of GF(p^d)*, hence a non-square there."""
        if self.n % d:
            raise NotADivisor(f"{d} does not divide {self.n}")
        return int(self.exp_table[self.order // (self.p**d - 1)])


def _unwrap(arr):
    arr = np.asarray(arr)
    return int(arr) if arr.ndim == 0 else arr


def _build_tables(p: int, n: int, modulus: tuple[int, ...]):
    q = p**n
    order = q - 1
    weights = [p**i for i in range(n)]
    exp_table = np.empty(order, dtype=np.int64)
    log_table = np.full(q, -1, dtype=np.int64)
    coeffs = [1] + [0] * (n - 1)
    low = modulus[:n]
    for i in range(order):
        code = sum(c * w for c, w in zip(coeffs, weights))
        exp_table[i] = code
        log_table[code] = i
        top = coeffs[-1]
        coeffs = [0] + coeffs[:-1]
        if top:
            coeffs = [(c - top * m) % p for c, m in zip(coeffs, low)]
    # traces of the polynomial basis; the trace is F_p-linear in the digits
    basis_trace = []
    for j in range(n):
        lj = j % order
        tot = [0] * n
        for i in range(n):
            e = exp_table[(lj * p**i) % order]
            for t in range(n):
                tot[t] += (int(e) // weights[t]) % p
        tot = [c % p for c in tot]
        if any(tot[1:]):
            raise AssertionError("trace left the prime field")
        basis_trace.append(tot[0])
    digits = (np.arange(q, dtype=np.int64)[:, None] // np.array(weights)) % p
    trace_table = ((digits @ np.array(basis_trace, dtype=np.int64)) % p).astype(np.uint8)
    return exp_table, log_table, trace_table


def make_field(
    p: int,
    n: int,
    modulus=None,
    *,
    table_limit: int = DEFAULT_TABLE_LIMIT,
    cache_dir=None,
) -> FieldCtx:
    """Build GF(p^n).

    Without ``modulus`` the smallest primitive polynomial is searched for
    (and remembered in ``cache_dir`` when one is given).
    """
    check_characteristic(p)
    if n < 1:
        raise ParameterError("extension degree must be >= 1")
    if p**n > table_limit:
        raise TableLimitExceeded(f"p^n = {p**n} exceeds the table limit {table_limit}")
    if modulus is not None:
        if isinstance(modulus, str):
            modulus = parse_modulus(modulus)
        modulus = tuple(int(c) for c in modulus)
        if len(modulus) != n + 1 or modulus[-1] != 1 or any(not 0 <= c < p for c in modulus):
            raise ParameterError(f"modulus must be monic of degree {n} with coefficients in [0, {p})")
        if not is_irreducible(list(modulus), p):
            raise ReduciblePolynomial(f"{format_modulus(modulus)} is reducible over F_{p}")
        if not is_primitive(list(modulus), p):
            raise NotPrimitive(f"{format_modulus(modulus)} is irreducible but not primitive")
    else:
        modulus = _read_cached_modulus(cache_dir, p, n) if cache_dir else None
        if modulus is None:
            modulus = find_primitive_modulus(p, n)
            if cache_dir:
                _write_cached_modulus(cache_dir, p, n, modulus)
    exp_table, log_table, trace_table = _field_tables(p, n, modulus)
    return FieldCtx(p, n, modulus, exp_table, log_table, trace_table)


_TABLES: dict = {}


def _field_tables(p, n, modulus):
    key = (p, n, modulus)
    if key not in _TABLES:
        tables = _build_tables(p, n, modulus)
        for t in tables:
            t.flags.writeable = False
        _TABLES[key] = tables
    return _TABLES[key]


@dataclass(frozen=True)
class CodeParams:
    p: int
    n: int
    k: int

    @property
    def d(self) -> int:
        return math.gcd(self.n, self.k)

    @property
    def s(self) -> int:
        return self.n // self.d

    @property
    def q(self) -> int:
        return self.p**self.n

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.p, self.n, self.k)

    def __str__(self) -> str:
        return f"(p={self.p}, n={self.n}, k={self.k})"


def validate_params(p: int, n: int, k: int) -> CodeParams:
    check_characteristic(p)
    if k < 1:
        raise ParameterError("k must be a positive integer")
    if n < 3:
        raise NTooSmall(f"n = {n} < 3")
    params = CodeParams(p, n, k)
    if params.s % 2 == 0:
        raise EvenS(f"s = n/gcd(n,k) = {params.s} is even")
    return params
