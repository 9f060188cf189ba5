"""Powers-of-2 combinatorics: admissible shift sets, level-set measure, pair sums.

enum_Xi enumerates n = N - 2^(v1) - ... - 2^(vk) with v_j in 1..floor(L)
that land in the window [(1-eta) N, N], with exact ordered-tuple
multiplicities.  measure_sigma estimates the measure of the set where the
binary sum is large.  j_sum_exact evaluates the exact prime-difference
pair sum over all shift quadruples at desk scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import sieve_range
from .errors import DomainError, ResourceError
from .expsums import ProblemParams, eval_G
from .parallel import map_ordered

DEFAULT_NODE_BUDGET = 5_000_000
MAX_JSUM_N = 10**7
MAX_JSUM_LCAP = 24

_measure_grid_cache: dict[tuple[int, int], np.ndarray] = {}


@dataclass(frozen=True)
class XiSet:
    """Window values with ordered-tuple multiplicities, ascending in n."""

    N: int
    k: int
    eta: float
    L: float
    entries: tuple[tuple[int, int], ...]

    @property
    def values(self) -> tuple[int, ...]:
        return tuple(n for n, _ in self.entries)

    def total_multiplicity(self) -> int:
        return sum(c for _, c in self.entries)


@dataclass(frozen=True)
class MeasureEstimate:
    lam: float
    L: float
    grid: int
    measure: float
    empirical_exponent: float | None


@dataclass(frozen=True)
class JSumExact:
    n1: int
    n2: int
    l_cap: int
    omega: float
    value: float
    ratio: float
    diagonal: float


def _power_multisets(k: int, v_max: int, s_allow: float, node_budget: int):
    """Yield (sum, ordered-count) per multiset v1 <= ... <= vk of exponents.

    Exponents range over 1..v_max; branches are pruned once the smallest
    possible completion exceeds s_allow; the ordered count of a multiset
    with run lengths c_1..c_m is k! / (c_1! ... c_m!).
    """
    fact = math.factorial(k)
    nodes = 0

    def rec(v_start: int, remaining: int, partial: int, denom: int):
        nonlocal nodes
        if remaining == 0:
            yield partial, fact // denom
            return
        for v in range(v_start, v_max + 1):
            step = 1 << v
            if partial + remaining * step > s_allow:
                return  # larger v only raises the minimal completion
            for c in range(1, remaining + 1):
                s = partial + c * step
                if s > s_allow:
                    break
                left = remaining - c
                if left > 0 and (v == v_max or s + left * (step * 2) > s_allow):
                    continue  # cannot finish with exactly c copies of v
                nodes += 1
                if nodes > node_budget:
                    raise ResourceError(
                        f"shift-multiset enumeration exceeded the node budget ({node_budget})"
                    )
                yield from rec(v + 1, left, s, denom * math.factorial(c))

    yield from rec(1, k, 0, 1)


def enum_Xi(
    N: int, k: int, eta: float, L: float, *, node_budget: int = DEFAULT_NODE_BUDGET
) -> XiSet:
    """Exact enumeration of window members with ordered multiplicities.

    Raises:
        DomainError: invalid N/k/L
        ResourceError: enumeration exceeds the node budget
    """
    if N % 2 == 0:
        raise DomainError("N must be odd")
    if k < 1:
        raise DomainError("k must be >= 1")
    if L < 1:
        raise DomainError("L must be >= 1")
    v_max = math.floor(L)
    window_lo = (1.0 - eta) * N
    counts: dict[int, int] = {}
    # the +1 slack keeps pruning strictly weaker than the exact window test
    for s, mult in _power_multisets(k, v_max, eta * N + 1.0, node_budget):
        n = N - s
        if n >= window_lo:
            counts[n] = counts.get(n, 0) + mult
    entries = tuple(sorted(counts.items()))
    return XiSet(N=N, k=k, eta=eta, L=L, entries=entries)


def count_pairs(
    N1: int,
    N2: int,
    k: int,
    eta: float,
    L: float,
    *,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> int:
    """Ordered tuples whose shift sum is admissible for both N1 and N2."""
    if N1 % 2 == 0 or N2 % 2 == 0:
        raise DomainError("N1 and N2 must be odd")
    if k < 1 or L < 1:
        raise DomainError("k must be >= 1 and L >= 1")
    v_max = math.floor(L)
    s_allow = min(eta * N1, eta * N2) + 1.0
    total = 0
    for s, mult in _power_multisets(k, v_max, s_allow, node_budget):
        if N1 - s >= (1.0 - eta) * N1 and N2 - s >= (1.0 - eta) * N2:
            total += mult
    return total


def _abs_g_chunk(args) -> np.ndarray:
    start, stop, grid, shifts = args
    j = np.arange(start, stop, dtype=np.int64)
    re = np.zeros(stop - start)
    im = np.zeros(stop - start)
    for c in shifts:
        theta = ((j * c) % grid) * (2.0 * math.pi / grid)
        re += np.cos(theta)
        im += np.sin(theta)
    return np.hypot(re, im)


def _abs_g_grid(v_max: int, grid: int, threads: int) -> np.ndarray:
    key = (v_max, grid)
    cached = _measure_grid_cache.get(key)
    if cached is not None:
        return cached
    shifts = [pow(2, v, grid) for v in range(1, v_max + 1)]
    chunk = 1 << 21
    bounds = [(a, min(a + chunk, grid), grid, shifts) for a in range(0, grid, chunk)]
    out = np.concatenate(map_ordered(_abs_g_chunk, bounds, threads))
    _measure_grid_cache.clear()  # keep at most one grid resident
    _measure_grid_cache[key] = out
    return out


def measure_sigma(lam: float, L: float, grid: int, *, threads: int = 1) -> MeasureEstimate:
    """Measure of the set of alpha in [0, 1) where the binary sum >= lam * L.

    Grid cells are judged by their endpoints; cells whose endpoints
    disagree are refined one bisection level with a pointwise midpoint
    evaluation.  The empirical exponent -log(measure)/log(2^L * L) is
    diagnostic only.
    """
    if grid < (1 << 10):
        raise DomainError("grid must be >= 2^10")
    if L < 1:
        raise DomainError("L must be >= 1")
    if lam < 0:
        raise DomainError("lambda must be >= 0")
    v_max = math.floor(L)
    threshold = lam * L
    absg = _abs_g_grid(v_max, grid, threads)
    ind = absg >= threshold
    crossing = ind != np.roll(ind, -1)
    measure = int(np.count_nonzero(ind & ~crossing)) / grid
    for j in np.nonzero(crossing)[0]:
        mid_in = abs(eval_G(L, (2 * int(j) + 1) / (2 * grid))) >= threshold
        measure += (0.5 * bool(ind[j]) + 0.5 * mid_in) / grid
    n_star = 2.0**L * L
    exponent = None if measure <= 0.0 else -math.log(measure) / math.log(n_star)
    return MeasureEstimate(lam=lam, L=L, grid=grid, measure=measure, empirical_exponent=exponent)


def _difference_count(isp: np.ndarray, lo: int, hi: int, d: int) -> int:
    """Pairs p1 - p2 = d with both primes in (lo, hi], d >= 0."""
    a, b = lo + 1, hi - d
    if b < a:
        return 0
    return int(np.count_nonzero(isp[a : b + 1] & isp[a + d : hi + 1]))


def j_sum_exact(params: ProblemParams, L_cap: int, *, threads: int = 1) -> JSumExact:
    """Exact shift-quadruple pair sum over both prime ranges.

    For every (m1..m4) in [1, L_cap]^4 the term is the product over i of
    the number of prime pairs in (omega N_i, N_i] differing by
    2^m1 + 2^m2 - 2^m3 - 2^m4; tuples are grouped by difference value and
    the counts come from sliced-AND lookups on prime indicator bitsets.
    The ratio against N1 N2 L^4 / (log N1 log N2)^2 is reported only,
    never asserted (L here is L_cap, the actual shift range used).
    """
    if params.n(1) > MAX_JSUM_N or params.n(2) > MAX_JSUM_N:
        raise ResourceError(f"pair-sum tables need N_i <= {MAX_JSUM_N}")
    if not 1 <= L_cap <= MAX_JSUM_LCAP:
        raise ResourceError(f"L_cap must be in [1, {MAX_JSUM_LCAP}]")

    tables = {}
    for i in (1, 2):
        n = params.n(i)
        lo = math.floor(params.omega * n)
        isp = np.zeros(n + 1, dtype=bool)
        isp[sieve_range(max(2, lo + 1), n).primes] = True
        tables[i] = (isp, lo, n)

    pair_sums: dict[int, int] = {}
    for m1 in range(1, L_cap + 1):
        for m2 in range(m1, L_cap + 1):
            s = (1 << m1) + (1 << m2)
            pair_sums[s] = pair_sums.get(s, 0) + (1 if m1 == m2 else 2)

    diff_counts: dict[int, int] = {}
    for s1, c1 in pair_sums.items():
        for s2, c2 in pair_sums.items():
            d = s1 - s2
            diff_counts[d] = diff_counts.get(d, 0) + c1 * c2

    r_cache: dict[tuple[int, int], int] = {}

    def r(i: int, d: int) -> int:
        key = (i, abs(d))
        val = r_cache.get(key)
        if val is None:
            isp, lo, n = tables[i]
            val = _difference_count(isp, lo, n, abs(d))
            r_cache[key] = val
        return val

    distinct = sorted(diff_counts)
    counts1 = map_ordered(lambda d: r(1, d), distinct, threads)
    total = 0.0
    for d, c1 in zip(distinct, counts1):
        total += diff_counts[d] * c1 * r(2, d)

    m = L_cap
    diagonal = float((2 * m * m - m) * r(1, 0) * r(2, 0))
    n1, n2 = params.n(1), params.n(2)
    ratio = total * (math.log(n1) * math.log(n2)) ** 2 / (n1 * n2 * float(L_cap) ** 4)
    return JSumExact(
        n1=n1,
        n2=n2,
        l_cap=L_cap,
        omega=params.omega,
        value=total,
        ratio=ratio,
        diagonal=diagonal,
    )
