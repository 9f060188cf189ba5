"""Assemble the proof constants and reproduce the k = 231 threshold.

The two coefficients compared in the end are

    r1 = (sigma_min * j_const)^2 / 3^8      main-term coefficient
    r3 = sqrt(jsum_const) * st_moment_const  error-term coefficient

and the threshold is the least k >= 2 with r1 - r3 * lam^(k-2) > 0.
The exponent k-2 follows the derivation that assembles r3 (the stated
form of that bound says k-3; the report flags the mismatch and follows
the derivation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import binary, local, search
from .binary import count_pairs, enum_Xi, measure_sigma
from .errors import DomainError
from .expsums import ProblemParams
from .sint import jn_closed_form, jn_monte_carlo

SIGMA_MIN = 0.8842495063
J_CONST = 2.7335671
JSUM_CONST = 305.8869
ST_MOMENT_CONST = 0.359127
CUBE_DIFF_B = 268096
LAMBDA_DEFAULT = 0.961917
E_LAMBDA_BOUND = 113.0 / 126.0 + 1e-10

EXPONENT_NOTE = (
    "the error-term bound is applied with exponent lam^(k-2), as in the "
    "derivation that assembles it; the stated form of the same bound "
    "carries lam^(k-3) and is not used"
)
REGIME_NOTE = (
    "the asymptotic count (1-eps) L^k for admissible shift tuples needs "
    "k <= eta*log2(N); desk-scale parameters sit outside that regime, so "
    "exact enumeration counts are reported and checked against oracles "
    "instead of the asymptotic inequality"
)


@dataclass(frozen=True)
class ConstantsLedger:
    """Every named constant of the pipeline; derived values are recomputed."""

    sigma_min: float = SIGMA_MIN
    j_const: float = J_CONST
    jsum_const: float = JSUM_CONST
    st_moment_const: float = ST_MOMENT_CONST
    b: int = CUBE_DIFF_B
    lam: float = LAMBDA_DEFAULT
    e_lambda_bound: float = E_LAMBDA_BOUND

    @property
    def r1_coeff(self) -> float:
        return r1_coefficient(self.sigma_min, self.j_const)

    @property
    def r3_coeff(self) -> float:
        return r3_coefficient(self.jsum_const, self.st_moment_const)

    @property
    def k_threshold(self) -> int:
        return k_threshold(self.r1_coeff, self.r3_coeff, self.lam)


def r1_coefficient(sigma_min: float, j_const: float) -> float:
    """(sigma_min * j_const)^2 / 3^8."""
    if sigma_min <= 0 or j_const <= 0:
        raise DomainError("coefficient inputs must be positive")
    return (sigma_min * j_const) ** 2 / 3**8


def r3_coefficient(jsum_const: float, st_moment_const: float) -> float:
    """sqrt(jsum_const) * st_moment_const."""
    if jsum_const <= 0 or st_moment_const <= 0:
        raise DomainError("coefficient inputs must be positive")
    return math.sqrt(jsum_const) * st_moment_const


def k_threshold(c1: float, c2: float, lam: float) -> int:
    """Least integer k >= 2 with c1 - c2 * lam^(k-2) > 0.

    A logarithm bracket locates the candidate; direct floating evaluation
    at the candidate and its neighbors is authoritative.
    """
    if c1 <= 0 or c2 <= 0:
        raise DomainError("coefficients must be positive")
    if not 0.0 < lam < 1.0:
        raise DomainError("lambda must lie in (0, 1)")

    def positive(k: int) -> bool:
        return c1 - c2 * lam ** (k - 2) > 0.0

    if c1 > c2:
        k = 2
    else:
        k = 2 + max(0, math.floor(math.log(c1 / c2) / math.log(lam)) - 1)
    while not positive(k):
        k += 1
    while k > 2 and positive(k - 1):
        k -= 1
    return k


@dataclass(frozen=True)
class ReportBudgets:
    """Desk-scale knobs for the end-to-end report."""

    sigma_samples: int = 24
    sigma_cutoff: int = 2000
    sigma_window: tuple[int, int] = (100_001, 9_999_999)
    mc_n: int = 10**12 + 1
    mc_samples: int = 200_000
    measure_grid: int = 1 << 18
    measure_L: float = 20.0
    measure_lambdas: tuple[float, ...] = (0.9, LAMBDA_DEFAULT)
    jsum_n: int = 100_003
    jsum_l_cap: int = 10
    rho_u: int = 10
    rho_v: int = 5
    witness_start: int = 10_001
    witness_count: int = 21
    witness_k: int = 2
    xi_n: tuple[int, int] = (101, 103)
    xi_k: int = 2
    xi_eta: float = 0.1
    xi_vmax: float = 3.0


def _annotate(value, method: str, seed: int | None = None, **extra) -> dict:
    out = {"value": value, "method": method, "seed": seed}
    out.update(extra)
    return out


def full_report(
    params: ProblemParams,
    budgets: ReportBudgets | None = None,
    *,
    seed: int = 20240901,
    threads: int = 1,
) -> dict:
    """End-to-end JSON-ready report; deterministic at fixed seeds.

    Every numeric block carries its method and seed (null for
    deterministic computations), so identical inputs reproduce the report
    bit for bit at any thread count.
    """
    b = budgets or ReportBudgets()
    ledger = ConstantsLedger(lam=params.lam)

    rng_step = max(1, (b.sigma_window[1] - b.sigma_window[0]) // max(1, b.sigma_samples))
    sigma_ns = [b.sigma_window[0] + j * rng_step for j in range(b.sigma_samples)]
    sigma_ns = [n if n % 2 == 1 else n + 1 for n in sigma_ns]
    sigma_vals = [local.singular_series(n, b.sigma_cutoff).value for n in sigma_ns]
    sigma_violations = [
        {"n": n, "value": v}
        for n, v in zip(sigma_ns, sigma_vals)
        if v < ledger.sigma_min - 0.003
    ]

    mc_params = ProblemParams(
        n1=b.mc_n,
        n2=b.mc_n,
        delta=params.delta,
        omega=params.omega,
        eta=params.eta,
        lam=params.lam,
        epsilon=params.epsilon,
        k=params.k,
    )
    mc = jn_monte_carlo(b.mc_n, mc_params, 1, b.mc_samples, seed, threads=threads)

    measures = [
        measure_sigma(lam, b.measure_L, b.measure_grid, threads=threads)
        for lam in b.measure_lambdas
    ]

    jsum_params = ProblemParams(n1=b.jsum_n, n2=b.jsum_n, k=params.k)
    jsum = binary.j_sum_exact(jsum_params, b.jsum_l_cap, threads=threads)

    rho = search.rho_counts(b.rho_u, b.rho_v)

    missing = []
    found = 0
    for n in range(b.witness_start, b.witness_start + 2 * b.witness_count, 2):
        w = search.find_witness(n, b.witness_k, "free")
        if w is None:
            missing.append(n)
        else:
            found += 1

    xi1 = enum_Xi(b.xi_n[0], b.xi_k, b.xi_eta, b.xi_vmax)
    pairs = count_pairs(b.xi_n[0], b.xi_n[1], b.xi_k, b.xi_eta, b.xi_vmax)

    return {
        "schema": 1,
        "config": {
            "n1": params.n1,
            "n2": params.n2,
            "delta": params.delta,
            "omega": params.omega,
            "eta": params.eta,
            "lambda": params.lam,
            "epsilon": params.epsilon,
            "k": params.k,
            "seed": seed,
            "budgets": {
                "sigma_samples": b.sigma_samples,
                "sigma_cutoff": b.sigma_cutoff,
                "mc_n": b.mc_n,
                "mc_samples": b.mc_samples,
                "measure_grid": b.measure_grid,
                "jsum_n": b.jsum_n,
                "jsum_l_cap": b.jsum_l_cap,
                "rho_u": b.rho_u,
                "rho_v": b.rho_v,
                "witness_start": b.witness_start,
                "witness_count": b.witness_count,
                "witness_k": b.witness_k,
            },
        },
        "constants": _annotate(
            {
                "sigma_min": ledger.sigma_min,
                "j_const": ledger.j_const,
                "jsum_const": ledger.jsum_const,
                "st_moment_const": ledger.st_moment_const,
                "b": ledger.b,
                "lambda": ledger.lam,
                "e_lambda_bound": ledger.e_lambda_bound,
                "r1_coeff": ledger.r1_coeff,
                "r3_coeff": ledger.r3_coeff,
                "k_threshold": ledger.k_threshold,
            },
            method="ledger_arithmetic",
        ),
        "k_threshold": ledger.k_threshold,
        "exponent_note": EXPONENT_NOTE,
        "regime_note": REGIME_NOTE,
        "singular_series": _annotate(
            {
                "count": len(sigma_ns),
                "cutoff": b.sigma_cutoff,
                "min": min(sigma_vals),
                "mean": sum(sigma_vals) / len(sigma_vals),
                "max": max(sigma_vals),
                "bound": ledger.sigma_min,
                "tail_allowance": 0.003,
                "violations": sigma_violations,
            },
            method="euler_product",
        ),
        "singular_integral": {
            "closed_form": _annotate(jn_closed_form(params.delta), method="closed_form"),
            "monte_carlo": _annotate(
                {
                    "n": mc.n,
                    "N": mc.N,
                    "value": mc.value,
                    "normalized": mc.normalized,
                    "stderr": mc.stderr,
                    "samples": mc.samples,
                },
                method="monte_carlo",
                seed=seed,
            ),
        },
        "measure": [
            _annotate(
                {
                    "lambda": m.lam,
                    "L": m.L,
                    "grid": m.grid,
                    "measure": m.measure,
                    "empirical_exponent": m.empirical_exponent,
                },
                method="grid_bisection",
            )
            for m in measures
        ],
        "jsum": _annotate(
            {
                "n1": jsum.n1,
                "n2": jsum.n2,
                "l_cap": jsum.l_cap,
                "value": jsum.value,
                "ratio": jsum.ratio,
                "bound_const": ledger.jsum_const,
                "asserted": False,
            },
            method="bitset_difference_counts",
        ),
        "rho": _annotate(
            {
                "u": rho.U,
                "v": rho.V,
                "max_count": rho.max_count,
                "bound_ratio": rho.bound_ratio,
                "bound_const": ledger.b,
                "asserted": False,
            },
            method="meet_in_the_middle",
        ),
        "witness_density": _annotate(
            {
                "start": b.witness_start,
                "count": b.witness_count,
                "k": b.witness_k,
                "found": found,
                "missing": missing,
            },
            method="exhaustive_search",
        ),
        "xi": _annotate(
            {
                "n": xi1.N,
                "k": xi1.k,
                "eta": xi1.eta,
                "vmax": xi1.L,
                "values": list(xi1.values),
                "total_multiplicity": xi1.total_multiplicity(),
                "pair_count": pairs,
            },
            method="pruned_enumeration",
        ),
    }
