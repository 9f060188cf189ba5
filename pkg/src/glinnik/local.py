"""Complete exponential sums mod q and the truncated singular series.

The local density at modulus q is

    A(n, q) = B(n, q) / phi(q)^5,
    B(n, q) = sum over (a,q)=1 of C1(q,a) * C3(q,a)^4 * e(-a n / q),

where C1 is the Ramanujan sum and C3 the cubic complete sum over reduced
residues.  Every term of B carries the factor C1(q, a) = mu(q), so the
density vanishes off squarefree q, and the series

    sum over q >= 1 of A(n, q)

is evaluated as an Euler product over primes p <= cutoff of
1 + sum over t of A(n, p^t).

For squarefree q the a-sum is computed with two length-q DFTs: C3(q, .)
is the transform of the cube-residue histogram, and transforming the
masked fourth power back yields B(m, q) for every residue class m at
once.  Rows are cached per modulus, so evaluating the series for many n
costs one table lookup per prime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import _base_primes, multiplicative
from .errors import DomainError, NumericalIntegrityError

_IMAG_RAISE_TOL = 1e-6
_ROW_CACHE_MAX_Q = 1 << 16

_b_rows: dict[int, np.ndarray] = {}
_a_prime_rows: dict[int, np.ndarray] = {}
_verified_vanishing: set[tuple[int, int]] = set()


@dataclass(frozen=True)
class LocalFactor:
    """A(n, q) together with the complex B(n, q) it came from."""

    n: int
    q: int
    B: complex
    A: float


@dataclass(frozen=True)
class TruncatedSeries:
    """Euler product over p <= prime_cutoff of 1 + sum_t A(n, p^t)."""

    n: int
    prime_cutoff: int
    t_max: int
    factors: tuple[tuple[int, float], ...]
    value: float
    largest_t: tuple[tuple[int, int], ...]
    anomalies: tuple[tuple[int, float], ...]


def ramanujan_C1(q: int, a: int) -> int:
    """Ramanujan sum over reduced residues h mod q of e(a h / q).

    Uses the closed form mu(q/g) * phi(q) / phi(q/g) with g = gcd(a, q),
    which is exact in integers.
    """
    if q < 1:
        raise DomainError(f"modulus must be >= 1, got {q}")
    if not 1 <= a <= q:
        raise DomainError(f"need 1 <= a <= q, got a={a}, q={q}")
    g = math.gcd(a, q)
    d = q // g
    _, mu_d, phi_d = multiplicative(d)
    _, _, phi_q = multiplicative(q)
    return mu_d * (phi_q // phi_d)


def cubic_C3(q: int, a: int) -> complex:
    """Cubic complete sum over reduced residues h mod q of e(a h^3 / q)."""
    if q < 1:
        raise DomainError(f"modulus must be >= 1, got {q}")
    if not 1 <= a <= q:
        raise DomainError(f"need 1 <= a <= q, got a={a}, q={q}")
    if q == 1:
        return 1 + 0j
    acc = 0j
    for h in range(1, q + 1):
        if math.gcd(h, q) == 1:
            acc += np.exp(2j * math.pi * ((a * pow(h, 3, q) % q) / q))
    return complex(acc)


def _b_row(q: int, mu: int) -> np.ndarray:
    """Complex array of B(m, q) over all residues m, for squarefree q."""
    h = np.arange(q, dtype=np.int64)
    mask = np.gcd(h, q) == 1
    cubes = (h * h % q) * h % q
    r = np.bincount(cubes[mask], minlength=q).astype(np.float64)
    c3 = np.fft.ifft(r) * q
    g = np.where(mask, c3**4, 0.0)
    return mu * np.fft.fft(g)


def _b_value(n: int, q: int, mu: int) -> complex:
    if q <= _ROW_CACHE_MAX_Q:
        row = _b_rows.get(q)
        if row is None:
            row = _b_row(q, mu)
            _b_rows[q] = row
        return complex(row[n % q])
    return complex(_b_row(q, mu)[n % q])


def local_A(n: int, q: int) -> LocalFactor:
    """Local density A(n, q) = B(n, q) / phi(q)^5.

    Raises:
        NumericalIntegrityError: B(n, q) fails its realness check, judged
            against the natural magnitude of the whole residue row
    """
    if q < 1:
        raise DomainError(f"modulus must be >= 1, got {q}")
    _, mu, phi = multiplicative(q)
    if q == 1:
        return LocalFactor(n=n, q=1, B=1 + 0j, A=1.0)
    if mu == 0:
        # every term of the a-sum carries C1(q, a) = mu(q) = 0
        return LocalFactor(n=n, q=q, B=0j, A=0.0)
    b = _b_value(n, q, mu)
    scale = max(1.0, (q - 1.0) ** 2.5)  # generic size of the row's entries
    if abs(b.imag) > _IMAG_RAISE_TOL * max(abs(b.real), scale):
        raise NumericalIntegrityError(f"B({n},{q}) = {b} is not numerically real")
    return LocalFactor(n=n, q=q, B=b, A=b.real / phi**5)


def _a_prime_row(p: int) -> np.ndarray:
    """Real array of A(m, p) over residues m, with a build-time realness check."""
    row = _a_prime_rows.get(p)
    if row is not None:
        return row
    b = _b_row(p, -1)
    scale = max(1.0, float(np.abs(b).max()))
    worst = float(np.abs(b.imag).max())
    if worst > _IMAG_RAISE_TOL * scale:
        raise NumericalIntegrityError(f"B(., {p}) row has imaginary residue {worst}")
    row = b.real / float(p - 1) ** 5
    _a_prime_rows[p] = row
    return row


def _verify_power_vanishes(n: int, p: int, t: int) -> None:
    """One-time runtime check that A(n, p^t) = 0 for t >= 2 (any n)."""
    if (p, t) in _verified_vanishing:
        return
    if local_A(n, p**t).A != 0.0:
        raise NumericalIntegrityError(f"A(n, {p}^{t}) unexpectedly nonzero")
    _verified_vanishing.add((p, t))


def singular_series(n: int, prime_cutoff: int = 10_000, t_max: int = 4) -> TruncatedSeries:
    """Truncated series value as a product of per-prime local factors.

    Each factor is 1 + sum over t = 1..t_max of A(n, p^t); factors are
    multiplied in ascending-p order for reproducibility.  The largest t
    with a nonzero contribution is recorded per prime, and a non-positive
    factor at odd n is flagged as an anomaly rather than raised
    (positivity is expected, so a flag marks either a bug or a genuinely
    exceptional n worth reporting verbatim).
    """
    if prime_cutoff < 3:
        raise DomainError("prime_cutoff must be >= 3")
    if t_max < 2:
        raise DomainError("t_max must be >= 2")
    limit = 1 << max(14, prime_cutoff.bit_length())
    primes = [int(p) for p in _base_primes(limit) if p <= prime_cutoff]
    factors: list[tuple[int, float]] = []
    largest: list[tuple[int, int]] = []
    anomalies: list[tuple[int, float]] = []
    value = 1.0
    odd = n % 2 == 1
    for p in primes:
        a1 = float(_a_prime_row(p)[n % p])
        for t in range(2, t_max + 1):
            _verify_power_vanishes(n, p, t)
        f = 1.0 + a1
        factors.append((p, f))
        largest.append((p, 1 if a1 != 0.0 else 0))
        if odd and f <= 0.0:
            anomalies.append((p, f))
        value *= f
    return TruncatedSeries(
        n=n,
        prime_cutoff=prime_cutoff,
        t_max=t_max,
        factors=tuple(factors),
        value=value,
        largest_t=tuple(largest),
        anomalies=tuple(anomalies),
    )
