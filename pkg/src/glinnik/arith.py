"""Prime generation and elementary multiplicative arithmetic.

Everything here is exact integer arithmetic.  Prime ranges come from a
segmented Eratosthenes sieve (ranges near 10^9 never allocate O(N) memory),
isolated 64-bit primality queries use a deterministic strong-pseudoprime
test, and factorizations feed the Mobius and Euler-phi functions consumed
by the local-density module.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import DomainError, ResourceError
from .parallel import map_ordered

DEFAULT_SEGMENT_SIZE = 1 << 20
DEFAULT_MAX_SPAN = 1 << 31
_MAX_BASE_LIMIT = 1 << 26

# Deterministic for every n < 3.317e24 (Sorenson-Webster witness set),
# which covers all 64-bit inputs this toolkit handles.
MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_CACHE_HEADER = re.compile(r"^# primes lo=(\d+) hi=(\d+)$")


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """Ascending primes in the inclusive range [lo, hi].

    Attributes:
        lo: inclusive lower bound of the sieved range
        hi: inclusive upper bound of the sieved range
        primes: strictly increasing int64 array of every prime in [lo, hi]
    """

    lo: int
    hi: int
    primes: np.ndarray

    def __len__(self) -> int:
        return int(self.primes.size)

    def log_weights(self) -> np.ndarray:
        """Natural-log weights log p, one per table entry."""
        return np.log(self.primes.astype(np.float64))


@dataclass(frozen=True)
class Factorization:
    """Prime factorization n = prod p^e with ascending distinct primes."""

    n: int
    factors: tuple[tuple[int, int], ...]

    def value(self) -> int:
        out = 1
        for p, e in self.factors:
            out *= p**e
        return out


def _simple_sieve(limit: int) -> np.ndarray:
    flags = np.ones(limit + 1, dtype=bool)
    flags[: min(2, limit + 1)] = False
    for i in range(2, math.isqrt(limit) + 1):
        if flags[i]:
            flags[i * i :: i] = False
    return flags


@lru_cache(maxsize=4)
def _base_primes(limit: int) -> np.ndarray:
    return np.nonzero(_simple_sieve(limit))[0].astype(np.int64)


def _round_pow2(n: int) -> int:
    return 1 << max(4, (n - 1).bit_length())


def _sieve_segment(lo: int, hi: int, base: np.ndarray) -> np.ndarray:
    """Primes in [lo, hi] given base primes covering sqrt(hi)."""
    lo = max(lo, 2)
    if hi < lo:
        return np.empty(0, dtype=np.int64)
    flags = np.ones(hi - lo + 1, dtype=bool)
    for p in base:
        p = int(p)
        if p * p > hi:
            break
        start = max(p * p, ((lo + p - 1) // p) * p)
        flags[start - lo :: p] = False
    return (np.nonzero(flags)[0] + lo).astype(np.int64)


def sieve_range(
    lo: int,
    hi: int,
    *,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    max_span: int = DEFAULT_MAX_SPAN,
    threads: int = 1,
) -> PrimeTable:
    """Sieve every prime in the inclusive range [lo, hi].

    Segments of length `segment_size` are sieved independently (optionally
    in parallel) and merged in ascending order, so the result is
    deterministic for every thread count.

    Raises:
        DomainError: lo/hi outside 0 <= lo <= hi < 2^63
        ResourceError: range longer than the `max_span` budget
    """
    if not (0 <= lo <= hi < (1 << 63)):
        raise DomainError(f"sieve bounds must satisfy 0 <= lo <= hi < 2^63, got [{lo}, {hi}]")
    span = hi - lo + 1
    if span > max_span:
        raise ResourceError(
            f"sieve range of {span} integers exceeds the max_span budget ({max_span})"
        )
    root = math.isqrt(hi)
    if root > _MAX_BASE_LIMIT:
        raise ResourceError(
            f"base sieve up to {root} exceeds the base-prime budget ({_MAX_BASE_LIMIT})"
        )
    if hi < 2:
        return PrimeTable(lo, hi, np.empty(0, dtype=np.int64))

    base = _base_primes(_round_pow2(max(root, 16)))
    bounds = []
    a = max(lo, 2)
    while a <= hi:
        b = min(a + segment_size - 1, hi)
        bounds.append((a, b))
        a = b + 1
    chunks = map_ordered(lambda ab: _sieve_segment(ab[0], ab[1], base), bounds, threads)
    primes = np.concatenate(chunks) if chunks else np.empty(0, dtype=np.int64)
    return PrimeTable(lo, hi, primes)


def dyadic_range(x: float) -> tuple[int, int]:
    """Integer bounds of the half-open dyadic block (x, 2x]."""
    return math.floor(x) + 1, math.floor(2 * x)


def dyadic_table(x: float, **kwargs) -> PrimeTable:
    """Primes p with x < p <= 2x."""
    lo, hi = dyadic_range(x)
    if hi < lo:
        return PrimeTable(lo, max(lo, hi), np.empty(0, dtype=np.int64))
    return sieve_range(lo, hi, **kwargs)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for 64-bit integers."""
    if n < 2:
        return False
    for p in MR_WITNESSES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = (x * x) % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    """A nontrivial factor of odd composite n (deterministic parameter scan)."""
    if n % 2 == 0:
        return 2
    for c in range(1, 100):
        y, m, g, r, q = 2, 128, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"factor scan exhausted for {n}")


def _factor_into(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _pollard_brent(n)
    _factor_into(d, out)
    _factor_into(n // d, out)


def multiplicative(n: int) -> tuple[Factorization, int, int]:
    """Factor n and return (factorization, mobius, phi).

    mobius is 0 iff some exponent is >= 2, else (-1)^(number of primes);
    phi is the Euler totient.

    Raises:
        DomainError: n < 1
    """
    if n < 1:
        raise DomainError(f"multiplicative() requires n >= 1, got {n}")
    found: dict[int, int] = {}
    m = n
    for p in _base_primes(1 << 14):
        p = int(p)
        if p * p > m:
            break
        while m % p == 0:
            found[p] = found.get(p, 0) + 1
            m //= p
        if m == 1:
            break
    if m > 1:
        _factor_into(m, found)
    factors = tuple(sorted(found.items()))
    mobius = 0 if any(e >= 2 for _, e in factors) else (-1) ** len(factors)
    phi = 1
    for p, e in factors:
        phi *= p ** (e - 1) * (p - 1)
    return Factorization(n, factors), mobius, phi


def modpow(base: int, exp: int, modulus: int) -> int:
    """base^exp mod modulus, in [0, modulus).

    Raises:
        DomainError: exp < 0 or modulus < 1
    """
    if exp < 0:
        raise DomainError(f"modpow() requires exp >= 0, got {exp}")
    if modulus < 1:
        raise DomainError(f"modpow() requires modulus >= 1, got {modulus}")
    return pow(base, exp, modulus)


def write_prime_cache(path: str | Path, table: PrimeTable) -> None:
    """Write the plain-text cache: header line, then one prime per line."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# primes lo={table.lo} hi={table.hi}\n")
        for p in table.primes:
            fh.write(f"{int(p)}\n")


def read_prime_cache(path: str | Path) -> PrimeTable:
    """Read a cache file written by write_prime_cache.

    Raises:
        DomainError: malformed header or non-ascending entries
    """
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        m = _CACHE_HEADER.match(header)
        if m is None:
            raise DomainError(f"bad prime cache header: {header!r}")
        lo, hi = int(m.group(1)), int(m.group(2))
        primes = np.array([int(line) for line in fh if line.strip()], dtype=np.int64)
    if primes.size and (np.any(np.diff(primes) <= 0) or primes[0] < lo or primes[-1] > hi):
        raise DomainError("prime cache entries must be strictly increasing inside [lo, hi]")
    return PrimeTable(lo, hi, primes)
