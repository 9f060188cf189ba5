"""Generating functions, rational approximation, arcs, and exact moments.

Four families of exponential sums are evaluated here, writing e(x) for
exp(2*pi*i*x):

    linear   sum of (log p) e(p a)      over omega*N < p <= N
    cube_u   sum of (log p) e(p^3 a)    over p in (U, 2U]
    cube_v   same with the smaller dyadic scale V = U^(5/6)
    binary   sum of e(2^v a)            over integer v = 1 .. floor(L)

Phase reduction is exact: a float argument is treated as the dyadic
rational it is, and m*a mod 1 is computed in integer arithmetic for the
few-term sums (cube, binary) or with a compensated double-double product
for the long linear sums.  Either way the phase error per term stays at
the rounding level, which the periodicity/conjugacy property tests rely
on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .arith import PrimeTable, dyadic_table, sieve_range
from .errors import DomainError, ResourceError
from .parallel import map_ordered

KINDS = ("linear", "cube_u", "cube_v", "binary")

DEFAULT_GRID_BUDGET = 1 << 24
DEFAULT_PAIR_BUDGET = 1 << 24

_TWO_PI = 2.0 * math.pi
_SPLIT = 134217729.0  # 2^27 + 1, Dekker splitting constant


@dataclass(frozen=True)
class ProblemParams:
    """Problem sizes and tunables, with every derived scale recomputed.

    n1 >= n2 are the two odd targets.  Derived quantities (never stored):

        u(i) = (n_i / (16 (1 + delta)))^(1/3)     cube dyadic scale
        v(i) = u(i)^(5/6)                          small cube dyadic scale
        L    = log2(n1 / log n1)                   powers-of-two cutoff
        p_max(i) = n_i^(1/9 - 2 eps)               major-arc denominator cap
        q_max(i) = n_i^(8/9 + eps)                 rational-approximation cap
    """

    n1: int
    n2: int
    delta: float = 1e-4
    omega: float = 1e-5
    eta: float = 5e-5
    lam: float = 0.961917
    epsilon: float = 1e-10
    k: int = 231
    max_ratio: float = 1e6

    def __post_init__(self):
        if self.n1 % 2 == 0 or self.n2 % 2 == 0:
            raise DomainError("n1 and n2 must be odd")
        if self.n1 < self.n2:
            raise DomainError("params require n1 >= n2")
        if self.n1 > self.max_ratio * self.n2:
            raise DomainError(f"n1/n2 exceeds the configured max_ratio ({self.max_ratio})")
        if not 0.0 < self.omega < 1.0:
            raise DomainError("omega must lie in (0, 1)")
        if not 0.0 < self.eta < 1.0:
            raise DomainError("eta must lie in (0, 1)")
        if not self.eta < self.delta / (1.0 + self.delta):
            raise DomainError(
                "constraint violated: eta < delta/(1+delta) "
                f"(eta={self.eta}, delta/(1+delta)={self.delta / (1 + self.delta)})"
            )
        if self.k < 2:
            raise DomainError("k must be >= 2")
        for i in (1, 2):
            if 2.0 * self.p_max(i) > self.q_max(i):
                raise DomainError(f"arc dissection needs 2 P_{i} <= Q_{i}")

    def n(self, i: int) -> int:
        if i == 1:
            return self.n1
        if i == 2:
            return self.n2
        raise DomainError(f"index must be 1 or 2, got {i}")

    def u(self, i: int) -> float:
        return (self.n(i) / (16.0 * (1.0 + self.delta))) ** (1.0 / 3.0)

    def v(self, i: int) -> float:
        return self.u(i) ** (5.0 / 6.0)

    @property
    def L(self) -> float:
        return math.log2(self.n1 / math.log(self.n1))

    def p_max(self, i: int) -> float:
        return self.n(i) ** (1.0 / 9.0 - 2.0 * self.epsilon)

    def q_max(self, i: int) -> float:
        return self.n(i) ** (8.0 / 9.0 + self.epsilon)


@dataclass(frozen=True)
class DirichletApprox:
    """Rational approximation alpha = a/q + theta with |theta| <= 1/(qQ)."""

    a: int
    q: int
    theta: float
    Q: int

    def __post_init__(self):
        if not (1 <= self.a <= self.q <= self.Q):
            raise DomainError(f"need 1 <= a <= q <= Q, got a={self.a} q={self.q} Q={self.Q}")
        if math.gcd(self.a, self.q) != 1:
            raise DomainError("a and q must be coprime")


@dataclass(frozen=True)
class ArcLabel:
    kind: str  # "major" | "minor"
    a: int | None = None
    q: int | None = None

    @property
    def is_major(self) -> bool:
        return self.kind == "major"


@dataclass(frozen=True)
class ExpSumValue:
    """One pointwise evaluation, for CLI/CSV plumbing."""

    alpha: float
    value: complex
    kind: str


@dataclass(frozen=True)
class MinorArcReport:
    """Max observed |sum| / (N^exponent * (log N)^c) over seeded minor-arc samples."""

    i: int
    n: int
    samples: int
    seed: int
    c: float
    linear_exponent: float
    cube_exponent: float
    linear_ratio_max: float
    cube_ratio_max: float
    alphas: tuple[float, ...] = field(repr=False, default=())


# ---------------------------------------------------------------------------
# phase reduction


def _frac_exact(m: int, num: int, den: int) -> float:
    # (m * num/den) mod 1, exact until the final correctly-rounded division
    return ((m * num) % den) / den


def _alpha_fraction(alpha) -> tuple[int, int]:
    fr = alpha if isinstance(alpha, Fraction) else Fraction(alpha)
    return fr.numerator, fr.denominator


def _phase_sum_exact(args, weights, alpha) -> complex:
    num, den = _alpha_fraction(alpha)
    acc = 0j
    for m, w in zip(args, weights):
        acc += w * np.exp(2j * math.pi * _frac_exact(int(m), num, den))
    return complex(acc)


def _frac_dekker(p: np.ndarray, alpha: float) -> np.ndarray:
    """(p * alpha) mod 1 for exactly-representable p, error ~ 1 ulp."""
    x = p * alpha
    c = _SPLIT * p
    phi = c - (c - p)
    plo = p - phi
    c = _SPLIT * alpha
    ahi = c - (c - alpha)
    alo = alpha - ahi
    err = ((phi * ahi - x) + phi * alo + plo * ahi) + plo * alo
    f = np.fmod(np.fmod(x, 1.0) + err, 1.0)
    f[f < 0.0] += 1.0
    return f


def _weighted_phase_sum(p: np.ndarray, w: np.ndarray, alpha: float) -> complex:
    f = _frac_dekker(p.astype(np.float64), float(alpha))
    theta = _TWO_PI * f
    return complex(np.dot(w, np.cos(theta)), np.dot(w, np.sin(theta)))


# ---------------------------------------------------------------------------
# pointwise sums


def linear_table(params: ProblemParams, i: int, **kwargs) -> PrimeTable:
    """Primes p with omega*N_i < p <= N_i."""
    n = params.n(i)
    lo = max(2, math.floor(params.omega * n) + 1)
    return sieve_range(lo, n, **kwargs)


def eval_linear(params: ProblemParams, i: int, alpha, *, table: PrimeTable | None = None) -> complex:
    """sum of (log p) e(p alpha) over omega*N_i < p <= N_i."""
    if table is None:
        table = linear_table(params, i)
    if len(table) == 0:
        return 0j
    if isinstance(alpha, Fraction):
        num, den = alpha.numerator, alpha.denominator
        if 0 < den <= 1 << 31 and table.hi * den < (1 << 62):
            # exact reduction stays inside int64
            rem = (table.primes % den) * (num % den) % den
            theta = _TWO_PI * (rem / den)
            w = table.log_weights()
            return complex(np.dot(w, np.cos(theta)), np.dot(w, np.sin(theta)))
        alpha = float(alpha)
    return _weighted_phase_sum(table.primes, table.log_weights(), alpha)


def eval_cube(table: PrimeTable, alpha) -> complex:
    """sum of (log p) e(p^3 alpha) over the table's primes."""
    if len(table) == 0:
        return 0j
    cubes = [int(p) ** 3 for p in table.primes]
    return _phase_sum_exact(cubes, table.log_weights(), alpha)


def eval_G(L: float, alpha) -> complex:
    """sum of e(2^v alpha) over integer v = 1 .. floor(L)."""
    if L < 1:
        raise DomainError(f"binary sum needs L >= 1, got {L}")
    m = math.floor(L)
    return _phase_sum_exact([1 << v for v in range(1, m + 1)], np.ones(m), alpha)


# ---------------------------------------------------------------------------
# grid evaluation (bucket by argument mod M, then one length-M DFT)


def _grid_buckets(kind: str, source, M: int) -> np.ndarray:
    if kind == "binary":
        m = math.floor(float(source))
        idx = np.array([pow(2, v, M) for v in range(1, m + 1)], dtype=np.int64)
        w = np.ones(m)
    elif kind == "linear":
        idx = source.primes % M
        w = source.log_weights()
    elif kind in ("cube_u", "cube_v"):
        pm = source.primes % M
        idx = (pm * pm % M) * pm % M  # stepwise reduction keeps int64 exact
        w = source.log_weights()
    else:
        raise DomainError(f"unknown sum kind {kind!r}")
    return np.bincount(idx, weights=w, minlength=M)


def eval_grid(kind: str, source, M: int, *, budget: int = DEFAULT_GRID_BUDGET) -> np.ndarray:
    """Values at alpha = j/M for j = 0..M-1, as one complex array.

    Weights are bucketed by (argument mod M) and transformed with a single
    length-M DFT; entry j then equals the pointwise sum at j/M exactly (up
    to rounding), because e(b j / M) only depends on b mod M.
    """
    if M < 2:
        raise DomainError(f"grid size must be >= 2, got {M}")
    if M > budget:
        raise ResourceError(f"grid size {M} exceeds the grid budget ({budget})")
    buckets = _grid_buckets(kind, source, M)
    return np.fft.ifft(buckets) * M


def grid_rows(kind: str, grid: np.ndarray):
    """(j, alpha, re, im) rows for CSV output."""
    M = len(grid)
    for j, z in enumerate(grid):
        yield j, j / M, float(z.real), float(z.imag)


# ---------------------------------------------------------------------------
# rational approximation and arc dissection


def _convergents(num: int, den: int):
    """Continued-fraction convergents p/q of num/den, in order."""
    p0, q0, p1, q1 = 0, 1, 1, 0
    a, b = num, den
    while b:
        t = a // b
        a, b = b, a - t * b
        p0, q0, p1, q1 = p1, q1, t * p1 + p0, t * q1 + q0
        yield p1, q1


def dirichlet_approx(alpha, Q: int) -> DirichletApprox:
    """Best rational a/q with 1 <= a <= q <= Q and |alpha - a/q| <= 1/(qQ).

    Computed from the continued-fraction convergents of the exact value of
    alpha; validity of the returned pair is checked in exact rational
    arithmetic.

    Raises:
        DomainError: Q < 1 or alpha outside [1/Q, 1 + 1/Q]
    """
    if Q < 1:
        raise DomainError(f"Q must be >= 1, got {Q}")
    fr = alpha if isinstance(alpha, Fraction) else Fraction(alpha)
    lo, hi = Fraction(1, Q), 1 + Fraction(1, Q)
    # a float that is the rounded endpoint counts as the endpoint
    if fr != lo and math.isclose(float(fr), 1.0 / Q, rel_tol=4e-16, abs_tol=0.0):
        fr = lo
    elif fr != hi and math.isclose(float(fr), 1.0 + 1.0 / Q, rel_tol=4e-16, abs_tol=0.0):
        fr = hi
    if not lo <= fr <= hi:
        raise DomainError(f"alpha={float(fr)} outside [1/Q, 1+1/Q] for Q={Q}")

    def valid(p: int, q: int) -> bool:
        return 1 <= p <= q <= Q and abs(fr - Fraction(p, q)) <= Fraction(1, q * Q)

    seen: list[tuple[int, int]] = []
    for p, q in _convergents(fr.numerator, fr.denominator):
        if q > Q:
            break
        seen.append((p, q))
    for p, q in reversed(seen):
        if valid(p, q):
            theta = float(fr - Fraction(p, q))
            return DirichletApprox(a=p, q=q, theta=theta, Q=Q)
    # alpha in (1, 1+1/Q] can leave only the trivial approximation valid
    if valid(1, 1):
        return DirichletApprox(a=1, q=1, theta=float(fr - 1), Q=Q)
    raise DomainError(f"no admissible rational approximation for alpha={float(fr)}, Q={Q}")


def classify_arc(params: ProblemParams, i: int, alpha) -> ArcLabel:
    """Major(a, q) iff |alpha - a/q| <= 1/(q Q_i) for some q <= P_i, (a,q)=1.

    Since 2 P_i <= Q_i, any admissible a/q is a continued-fraction
    convergent of alpha, so scanning convergents with q <= P_i decides
    membership; the arcs are disjoint, so at most one label can match.
    """
    q_cap = params.q_max(i)
    fr = alpha if isinstance(alpha, Fraction) else Fraction(alpha)
    lo, hi = 1.0 / q_cap, 1.0 + 1.0 / q_cap
    x = float(fr)
    if not (lo <= x <= hi):
        raise DomainError(f"alpha={x} outside [1/Q_{i}, 1+1/Q_{i}]")
    p_cap = math.floor(params.p_max(i))
    for p, q in _convergents(fr.numerator, fr.denominator):
        if q > p_cap:
            break
        if p < 1 or p > q:
            continue
        if abs(float(fr - Fraction(p, q))) <= 1.0 / (q * q_cap):
            return ArcLabel("major", a=p, q=q)
    return ArcLabel("minor")


# ---------------------------------------------------------------------------
# exact moments


def moment2_exact(table: PrimeTable, kind: str = "linear") -> float:
    """Exact value of the 0..1 mean-square integral of the weighted sum.

    By orthogonality this is sum of log^2 p: the frequencies (p for the
    linear kind, p^3 for the cube kinds) are distinct integers, so the
    value does not depend on `kind`.
    """
    if kind not in KINDS:
        raise DomainError(f"unknown sum kind {kind!r}")
    w = table.log_weights()
    return float(np.dot(w, w))


def moment_ST4_exact(U: int, V: int, *, pair_budget: int = DEFAULT_PAIR_BUDGET) -> float:
    """Exact fourth moment of the product of the two cube sums.

    Equals the log-weighted count of solutions of

        p1^3 + p2^3 + q1^3 + q2^3 = p3^3 + p4^3 + q3^3 + q4^3

    with p_j in (U, 2U] and q_j in (V, 2V], computed by bucketing the
    weighted left-side sums (meet in the middle) and summing the squares
    of the bucket weights.
    """
    tu = dyadic_table(U)
    tv = dyadic_table(V)
    if len(tu) == 0 or len(tv) == 0:
        return 0.0
    if (len(tu) * len(tv)) ** 2 > pair_budget:
        raise ResourceError(
            f"{(len(tu) * len(tv)) ** 2} four-tuples exceed the pair budget ({pair_budget})"
        )
    cu = tu.primes.astype(np.int64) ** 3
    cv = tv.primes.astype(np.int64) ** 3
    wu = tu.log_weights()
    wv = tv.log_weights()
    su = (cu[:, None] + cu[None, :]).ravel()
    pu = (wu[:, None] * wu[None, :]).ravel()
    sv = (cv[:, None] + cv[None, :]).ravel()
    pv = (wv[:, None] * wv[None, :]).ravel()
    sums = (su[:, None] + sv[None, :]).ravel()
    wts = (pu[:, None] * pv[None, :]).ravel()
    _, inverse = np.unique(sums, return_inverse=True)
    bucket = np.bincount(inverse, weights=wts)
    return float(np.dot(bucket, bucket))


# ---------------------------------------------------------------------------
# minor-arc diagnostics

_LINEAR_EXPONENT = 1.0 - 1.0 / 18.0
_CUBE_EXPONENT = 1.0 / 3.0 - 1.0 / 42.0


def minor_arc_diagnostic(
    params: ProblemParams,
    i: int,
    samples: int,
    seed: int,
    *,
    c: float = 4.0,
    threads: int = 1,
) -> MinorArcReport:
    """Max of |sum|/(N^e (log N)^c) over seeded pseudo-random minor-arc points.

    Purely diagnostic: nothing is asserted about the ratios; they are
    recorded so regressions can be spotted against a frozen baseline.
    """
    if samples < 1:
        raise DomainError("samples must be >= 1")
    n = params.n(i)
    q_cap = params.q_max(i)
    rng = np.random.default_rng(seed)
    alphas: list[float] = []
    while len(alphas) < samples:
        x = rng.uniform(1.0 / q_cap, 1.0 + 1.0 / q_cap)
        if not classify_arc(params, i, x).is_major:
            alphas.append(float(x))

    lin = linear_table(params, i)
    cube = dyadic_table(params.u(i))
    w = lin.log_weights()
    p = lin.primes.astype(np.float64)

    def f_abs(x: float) -> float:
        return abs(_weighted_phase_sum(p, w, x))

    f_vals = map_ordered(f_abs, alphas, threads)
    s_vals = [abs(eval_cube(cube, x)) for x in alphas]
    log_n = math.log(n)
    lin_scale = n**_LINEAR_EXPONENT * log_n**c
    cube_scale = n**_CUBE_EXPONENT * log_n**c
    return MinorArcReport(
        i=i,
        n=n,
        samples=samples,
        seed=seed,
        c=c,
        linear_exponent=_LINEAR_EXPONENT,
        cube_exponent=_CUBE_EXPONENT,
        linear_ratio_max=max(f_vals) / lin_scale,
        cube_ratio_max=max(s_vals) / cube_scale,
        alphas=tuple(alphas),
    )
