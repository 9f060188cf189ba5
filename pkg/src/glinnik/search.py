"""Brute-force representation witnesses and cube-difference counts.

A witness for N is a tuple (p1; p2..p5; v1..vk) with

    N = p1 + p2^3 + p3^3 + p4^3 + p5^3 + 2^(v1) + ... + 2^(vk),

all p prime and every v >= 1.  The search hashes sums of two prime cubes
and, for each shift multiset and cube-pair combination, tests primality
of the residual p1 against a sieve bitset.  Searches are exhaustive over
the active mode's ranges, so a None result is definitive.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .arith import dyadic_table, is_prime, sieve_range
from .errors import DomainError, ResourceError

log = logging.getLogger(__name__)

DEFAULT_N_CAP = 10**7
DEFAULT_PAIR_BUDGET = 1 << 24
DEFAULT_DIFF_BUDGET = 1 << 24
_MIN_WITNESS = 2 + 4 * 8  # smallest possible p1 + four cubes


@dataclass(frozen=True)
class RepWitness:
    """One concrete solution of the representation equation."""

    N: int
    p1: int
    cubes: tuple[int, int, int, int]
    powers: tuple[int, ...]

    def residual(self) -> int:
        return self.N - self.p1 - sum(p**3 for p in self.cubes) - sum(
            1 << v for v in self.powers
        )

    def validate(self) -> bool:
        return (
            self.residual() == 0
            and is_prime(self.p1)
            and all(is_prime(p) for p in self.cubes)
            and all(v >= 1 for v in self.powers)
        )


@dataclass(frozen=True)
class PairWitness:
    """Witnesses for two targets sharing one powers-of-two multiset."""

    w1: RepWitness
    w2: RepWitness

    def validate(self) -> bool:
        return (
            self.w1.validate()
            and self.w2.validate()
            and sorted(self.w1.powers) == sorted(self.w2.powers)
        )


@dataclass(frozen=True)
class RhoCounts:
    """Cube-difference representation counts and the reported density ratio."""

    U: int
    V: int
    counts: dict[int, int]
    quadruples: int
    max_count: int
    n_ref: float
    bound_ratio: float


def _prime_bitset(limit: int) -> np.ndarray:
    isp = np.zeros(limit + 1, dtype=bool)
    isp[sieve_range(2, limit).primes] = True
    return isp


def _cube_pairs(primes) -> tuple[list[int], dict[int, tuple[int, int]]]:
    """Sorted distinct two-cube sums and one witness pair per sum."""
    sums: dict[int, tuple[int, int]] = {}
    ps = [int(p) for p in primes]
    for ai, a in enumerate(ps):
        a3 = a**3
        for b in ps[ai:]:
            s = a3 + b**3
            if s not in sums:
                sums[s] = (a, b)
    return sorted(sums), sums


def _shift_multisets(k: int, v_max: int, s_allow: int):
    """Non-decreasing exponent tuples (v1..vk) with sum of 2^v <= s_allow."""

    def rec(v_start: int, remaining: int, partial: int, prefix: tuple[int, ...]):
        if remaining == 0:
            yield partial, prefix
            return
        for v in range(v_start, v_max + 1):
            s = partial + (1 << v)
            if s + (remaining - 1) * (1 << v) > s_allow:
                return
            yield from rec(v, remaining - 1, s, prefix + (v,))

    yield from rec(1, k, 0, ())


def _complete_cubes_and_prime(
    target: int,
    d_sums: list[int],
    d_pairs: dict[int, tuple[int, int]],
    isp: np.ndarray,
    p1_lo: float,
    p1_hi: float,
    d2_sums: list[int] | None = None,
    d2_pairs: dict[int, tuple[int, int]] | None = None,
) -> tuple[int, tuple[int, int, int, int]] | None:
    """Find p1 + (two cubes) + (two cubes) = target, or None (exhaustive)."""
    if d2_sums is None:
        d2_sums, d2_pairs = d_sums, d_pairs
    for c1 in d_sums:
        if c1 + d2_sums[0] + 2 > target:
            break
        for c2 in d2_sums:
            r = target - c1 - c2
            if r < 2:
                break
            if r <= p1_lo or r > p1_hi:
                continue
            if isp[r]:
                a, b = d_pairs[c1]
                c, d = d2_pairs[c2]
                return r, tuple(sorted((a, b, c, d)))
    return None


def _search_sets(N: int, mode: str, delta: float, omega: float):
    """Cube-pair tables, p1 window, and shift cap for one target."""
    if mode == "free":
        cube_primes = sieve_range(2, max(2, math.floor((N - 34) ** (1 / 3)) + 1)).primes
        cube_primes = [int(p) for p in cube_primes if p**3 <= N - 34 + 8]
        sums, pairs = _cube_pairs(cube_primes)
        v_max = max((N - _MIN_WITNESS).bit_length() - 1, 1) if N > _MIN_WITNESS else 1
        return (sums, pairs), (sums, pairs), 0.0, float(N), v_max
    if mode == "paper_ranges":
        u = (N / (16.0 * (1.0 + delta))) ** (1.0 / 3.0)
        v = u ** (5.0 / 6.0)
        tu = dyadic_table(u)
        tv = dyadic_table(v)
        for name, t in (("cube-u", tu), ("cube-v", tv)):
            if len(t) == 0:
                log.warning("paper_ranges: %s prime range (%d, %d] is empty", name, t.lo - 1, t.hi)
        l_cap = max(1, math.floor(math.log2(N / math.log(N))))
        su, pu = _cube_pairs(tu.primes)
        sv, pv = _cube_pairs(tv.primes)
        return (su, pu), (sv, pv), omega * N, float(N), l_cap
    raise DomainError(f"unknown search mode {mode!r}")


def find_witness(
    N: int,
    k: int,
    mode: str = "free",
    params=None,
    *,
    n_cap: int = DEFAULT_N_CAP,
) -> RepWitness | None:
    """A witness for N, or a definitive None (search is exhaustive).

    Free mode searches every prime and every shift exponent that fits;
    paper_ranges mode restricts the cube primes to their dyadic blocks,
    p1 to (omega N, N], and shift exponents to the log-scale cap, logging
    any desk-scale-empty range.

    Raises:
        ResourceError: N beyond the configured cap
    """
    if N % 2 == 0:
        raise DomainError("N must be odd")
    if k < 1:
        raise DomainError("k must be >= 1")
    if N > n_cap:
        raise ResourceError(f"witness search needs N <= n_cap ({n_cap})")
    delta = params.delta if params is not None else 1e-4
    omega = params.omega if params is not None else 1e-5
    (su, pu), (sv, pv), p1_lo, p1_hi, v_max = _search_sets(N, mode, delta, omega)
    if not su or not sv:
        return None
    isp = _prime_bitset(N)
    for s, prefix in _shift_multisets(k, v_max, N - _MIN_WITNESS):
        hit = _complete_cubes_and_prime(N - s, su, pu, isp, p1_lo, p1_hi, sv, pv)
        if hit is not None:
            p1, cubes = hit
            w = RepWitness(N=N, p1=p1, cubes=cubes, powers=prefix)
            assert w.validate()
            return w
    return None


def find_pair_witness(
    N1: int,
    N2: int,
    k: int,
    mode: str = "free",
    params=None,
    *,
    n_cap: int = DEFAULT_N_CAP,
) -> PairWitness | None:
    """Witnesses for N1 and N2 sharing one shift multiset, or None."""
    if N1 % 2 == 0 or N2 % 2 == 0:
        raise DomainError("N1 and N2 must be odd")
    if N1 < N2:
        raise DomainError("pair search requires N1 >= N2")
    if k < 1:
        raise DomainError("k must be >= 1")
    if N1 > n_cap:
        raise ResourceError(f"witness search needs N <= n_cap ({n_cap})")
    delta = params.delta if params is not None else 1e-4
    omega = params.omega if params is not None else 1e-5
    sets1 = _search_sets(N1, mode, delta, omega)
    sets2 = _search_sets(N2, mode, delta, omega)
    if not sets1[0][0] or not sets1[1][0] or not sets2[0][0] or not sets2[1][0]:
        return None
    isp = _prime_bitset(N1)
    v_max = min(sets1[4], sets2[4])
    for s, prefix in _shift_multisets(k, v_max, N2 - _MIN_WITNESS):
        hit1 = _complete_cubes_and_prime(
            N1 - s, sets1[0][0], sets1[0][1], isp, sets1[2], sets1[3], sets1[1][0], sets1[1][1]
        )
        if hit1 is None:
            continue
        hit2 = _complete_cubes_and_prime(
            N2 - s, sets2[0][0], sets2[0][1], isp, sets2[2], sets2[3], sets2[1][0], sets2[1][1]
        )
        if hit2 is None:
            continue
        w1 = RepWitness(N=N1, p1=hit1[0], cubes=hit1[1], powers=prefix)
        w2 = RepWitness(N=N2, p1=hit2[0], cubes=hit2[1], powers=prefix)
        pw = PairWitness(w1=w1, w2=w2)
        assert pw.validate()
        return pw
    return None


def rho_counts_from_primes(
    primes_u,
    primes_v,
    *,
    U: int | None = None,
    V: int | None = None,
    delta: float = 1e-4,
    pair_budget: int = DEFAULT_PAIR_BUDGET,
    diff_budget: int = DEFAULT_DIFF_BUDGET,
) -> RhoCounts:
    """Representation counts of n = (a^3+b^3+c^3+d^3) - (a'^3+b'^3+c'^3+d'^3).

    a, a' run over primes_u (two per side) and c, c' over primes_v, all
    ordered; quadruple sums are hashed (meet in the middle) and counts of
    every difference of two sums accumulated exactly.
    """
    pu = np.asarray(sorted(int(p) for p in primes_u), dtype=np.int64)
    pv = np.asarray(sorted(int(p) for p in primes_v), dtype=np.int64)
    if pu.size == 0 or pv.size == 0:
        raise DomainError("both prime sets must be non-empty")
    if (pu.size * pv.size) ** 2 > pair_budget:
        raise ResourceError(f"quadruple table exceeds the pair budget ({pair_budget})")
    cu = pu**3
    cv = pv**3
    su = (cu[:, None] + cu[None, :]).ravel()
    sv = (cv[:, None] + cv[None, :]).ravel()
    quad = (su[:, None] + sv[None, :]).ravel()
    values, counts = np.unique(quad, return_counts=True)
    if values.size**2 > diff_budget:
        raise ResourceError(f"difference table exceeds the diff budget ({diff_budget})")
    diffs = (values[:, None] - values[None, :]).ravel()
    prods = (counts[:, None] * counts[None, :]).ravel()
    dvals, inverse = np.unique(diffs, return_inverse=True)
    dcounts = np.bincount(inverse, weights=prods.astype(np.float64)).astype(np.int64)
    table = {int(n): int(c) for n, c in zip(dvals, dcounts)}

    u_scale = float(U) if U is not None else float(pu[0])
    v_scale = float(V) if V is not None else float(pv[0])
    n_ref = 16.0 * (1.0 + delta) * u_scale**3
    max_count = int(dcounts.max())
    bound_ratio = max_count * math.log(n_ref) ** 8 / (u_scale * v_scale**4)
    return RhoCounts(
        U=int(u_scale),
        V=int(v_scale),
        counts=table,
        quadruples=int(quad.size),
        max_count=max_count,
        n_ref=n_ref,
        bound_ratio=bound_ratio,
    )


def rho_counts(U: int, V: int, **kwargs) -> RhoCounts:
    """rho over the dyadic prime blocks (U, 2U] and (V, 2V].

    The reported ratio max rho * (log N)^8 / (U V^4), with N recovered
    from the cube-scale relation N = 16 (1 + delta) U^3, is diagnostic
    only; the density constant it shadows is asymptotic.
    """
    tu = dyadic_table(U)
    tv = dyadic_table(V)
    if len(tu) == 0 or len(tv) == 0:
        raise DomainError(f"empty dyadic prime block for U={U} or V={V}")
    return rho_counts_from_primes(tu.primes, tv.primes, U=U, V=V, **kwargs)
