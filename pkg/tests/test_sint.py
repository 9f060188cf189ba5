import math

import pytest

from glinnik import (
    DomainError,
    ProblemParams,
    ResourceError,
    jn_closed_form,
    jn_exact_small,
    jn_monte_carlo,
    jn_monte_carlo_box,
)


def test_single_factor_integral_is_three():
    # midpoint-rule oracle for the one-dimensional dyadic block integral
    steps = 200_000
    h = 7.0 / steps
    total = sum((1.0 + (j + 0.5) * h) ** (-2.0 / 3.0) for j in range(steps)) * h
    assert total == pytest.approx(3.0, rel=1e-9)


def test_closed_form_reference_value():
    assert jn_closed_form(1e-4) == pytest.approx(2.7335671, rel=1e-4)


def test_closed_form_at_zero_delta():
    v0 = jn_closed_form(0.0)
    assert v0 == pytest.approx(2.7339, rel=1e-4)
    assert v0 > jn_closed_form(1e-4)


def test_closed_form_strictly_decreasing_in_delta():
    values = [jn_closed_form(d) for d in (0.0, 1e-4, 1e-3, 5e-3)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_closed_form_domain():
    with pytest.raises(DomainError):
        jn_closed_form(0.5)


def test_monte_carlo_matches_closed_form_at_large_scale():
    n = 10**15 + 1
    params = ProblemParams(n1=n, n2=n)
    est = jn_monte_carlo(n, params, 1, samples=100_000, seed=7)
    cf = jn_closed_form(params.delta)
    stderr_norm = est.stderr / n ** (11.0 / 9.0)
    assert stderr_norm < 0.003 * cf
    assert abs(est.normalized - cf) <= 3.0 * stderr_norm
    assert 2.5 <= est.normalized <= 3.0


def test_monte_carlo_deterministic_and_thread_invariant():
    n = 10**9 + 1
    params = ProblemParams(n1=n, n2=n)
    a = jn_monte_carlo(n, params, 1, samples=50_000, seed=3)
    b = jn_monte_carlo(n, params, 1, samples=50_000, seed=3)
    c = jn_monte_carlo(n, params, 1, samples=50_000, seed=3, threads=4)
    assert a == b == c
    d = jn_monte_carlo(n, params, 1, samples=50_000, seed=4)
    assert d.value != a.value


def test_monte_carlo_scale_relation():
    vals = {}
    for n in (10**6 + 1, 10**9 + 1):
        params = ProblemParams(n1=n, n2=n)
        est = jn_monte_carlo(n, params, 1, samples=100_000, seed=11)
        vals[n] = (est.normalized, est.stderr / n ** (11.0 / 9.0))
    (v1, s1), (v2, s2) = vals.values()
    assert abs(v1 - v2) <= 3.0 * math.hypot(s1, s2)


def test_monte_carlo_omega_monotone():
    n = 10**6 + 1
    results = []
    for omega in (1e-5, 0.3, 0.6):
        params = ProblemParams(n1=n, n2=n, omega=omega)
        results.append(jn_monte_carlo(n, params, 1, samples=200_000, seed=13).value)
    assert results[0] > results[1] > results[2]


def test_monte_carlo_domain_errors():
    n = 10**6 + 1
    params = ProblemParams(n1=n, n2=n)
    with pytest.raises(DomainError):
        jn_monte_carlo(n - 2000, params, 1, samples=1000, seed=1)  # below the window
    huge_omega = ProblemParams(n1=n, n2=n, omega=0.999)
    with pytest.raises(DomainError, match="zero admissible volume"):
        jn_monte_carlo(n, huge_omega, 1, samples=1000, seed=1)


def test_lattice_separable_product():
    s = sum(m ** (-2.0 / 3.0) for m in range(9, 65))
    val = jn_exact_small(10**9, 2, 2, (0.0, 10**9))
    assert val == pytest.approx(s**4, rel=1e-9)


def test_lattice_binding_is_smaller():
    free = jn_exact_small(10**9, 2, 2, (0.0, 10**9))
    # window that cuts into the reachable sums: m1 = n - sum in (lo, hi]
    n = 300
    bound = jn_exact_small(n, 2, 2, (0.0, 120.0))
    assert 0.0 < bound < free


def test_lattice_brute_force_oracle_tiny():
    n, U, V = 500, 2, 2
    lo, hi = 50.0, 400.0
    brute = 0.0
    for m2 in range(9, 65):
        for m3 in range(9, 65):
            for m4 in range(9, 65):
                for m5 in range(9, 65):
                    m1 = n - (m2 + m3 + m4 + m5)
                    if lo < m1 <= hi:
                        brute += (m2 * m3 * m4 * m5) ** (-2.0 / 3.0)
    assert jn_exact_small(n, U, V, (lo, hi)) == pytest.approx(brute, rel=1e-9)


def test_lattice_vs_monte_carlo_same_box():
    U = V = 8
    box = (float(U**3), 8.0 * U**3, float(V**3), 8.0 * V**3)
    n = 4 * 8 * U**3  # comfortably non-binding window
    window = (0.0, float(n))
    lattice = jn_exact_small(n, U, V, window)
    mc, stderr = jn_monte_carlo_box(n, box, window, samples=400_000, seed=19)
    assert abs(mc - lattice) <= 3.0 * stderr + 0.02 * lattice


def test_lattice_budget():
    with pytest.raises(ResourceError, match="budget"):
        jn_exact_small(10**9, 51, 2, (0.0, 10**9))
