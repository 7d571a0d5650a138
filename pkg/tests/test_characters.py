from fractions import Fraction

import mpmath
import pytest

from vvmf import catalog as cat
from vvmf.characters import (
    INTEGRAL_NONNEG,
    NEGATIVE,
    NON_INTEGRAL,
    AmbiguityUnresolved,
    ConsistencyFailure,
    classify,
    covariance_residual,
    d_series,
    first_column,
    recurrence,
    resolve_gauge,
    t_covariance_holds,
    unfold,
)
from vvmf.connection import solve_connection
from vvmf.golden import golden_rows
from vvmf.extremal import enumerate_extremal, trace_inputs
from vvmf.scan import COVARIANCE_POINTS, ScanConfig, compute

F = Fraction
SU2_EXPONENTS = (F(23, 24), F(5, 24))


def _partitions(n):
    p = [1] + [0] * (n - 1)
    for k in range(1, n):
        for m in range(k, n):
            p[m] += p[m - k]
    return p


def _theta_over_eta(offset, n):
    # sum_m q^((m + offset)^2) / prod(1 - q^k), for offset 0 or 1/2, as powers
    # relative to the smallest exponent
    exps = sorted({(F(m) + offset) ** 2 for m in range(-n, n + 1)})
    base = exps[0]
    theta = [0] * n
    for m in range(-n, n + 1):
        e = (F(m) + offset) ** 2 - base
        if e < n:
            theta[int(e)] += 1
    p = _partitions(n)
    return [sum(theta[i] * p[k - i] for i in range(k + 1)) for k in range(n)]


@pytest.fixture(scope="module")
def su2():
    (sol,) = solve_connection(SU2_EXPONENTS)
    xi = recurrence(SU2_EXPONENTS, sol.chi, 30)
    spec = cat.GenusSpec(cat.get("su2_1"), 1)
    (cand,) = enumerate_extremal(spec)
    rho_S, _ = trace_inputs(cand)
    return sol, xi, rho_S


def test_d_series_leading_terms():
    F_, G = d_series(4)
    assert F_[:2] == (1, 0) and G[:2] == (0, 1)
    F_, _ = d_series(4, j_shift=24)
    assert F_[1] == 216


def test_recurrence_refuses_wrong_shift():
    (sol,) = solve_connection(SU2_EXPONENTS)
    with pytest.raises(ConsistencyFailure):
        recurrence(SU2_EXPONENTS, sol.chi, 5, j_shift=24)


def test_recurrence_is_causal(su2):
    sol, xi, _ = su2
    short = recurrence(SU2_EXPONENTS, sol.chi, 10)
    for n in range(-1, 11):
        assert (short[n] == xi[n]).all()
    assert xi.N == 30 and xi.d == 2
    with pytest.raises(IndexError):
        xi[-2]


def test_gauge_ratio_for_su2(su2):
    _, xi, rho_S = su2
    gauge = resolve_gauge(xi, rho_S)
    assert gauge.kernel_dim == 1
    assert gauge.ratios == (1, F(-1, 56))
    fixed = xi.conjugate(gauge.ratios)
    assert fixed.chi[0, 0] == 3 and fixed.chi[1, 0] == 2


def test_su2_characters_match_lattice_theta(su2):
    _, xi, rho_S = su2
    fixed = xi.conjugate(resolve_gauge(xi, rho_S).ratios)
    vac, mod = first_column(fixed, 29)
    assert vac == _theta_over_eta(F(0), 30)
    assert mod == _theta_over_eta(F(1, 2), 30)


def test_fixed_expansion_is_covariant(su2):
    _, xi, rho_S = su2
    fixed = xi.conjugate(resolve_gauge(xi, rho_S).ratios)
    res = covariance_residual(fixed, rho_S, COVARIANCE_POINTS, nterms=30, check_tail=False)
    assert res < mpmath.mpf(10) ** -12


@pytest.mark.parametrize("delta", [F(1), F(1, 3), F(-7, 2)])
def test_perturbed_chi_is_caught(delta):
    (sol,) = solve_connection(SU2_EXPONENTS)
    chi = sol.chi.copy()
    chi[0, 1] += delta
    chi[0, 0] += delta
    xi = recurrence(SU2_EXPONENTS, chi, 30)
    spec = cat.GenusSpec(cat.get("su2_1"), 1)
    rho_S, _ = trace_inputs(enumerate_extremal(spec)[0])
    try:
        gauge = resolve_gauge(xi, rho_S)
    except AmbiguityUnresolved:
        return
    assert gauge.residual >= mpmath.mpf(10) ** -3 or gauge.ratios is None


def test_classify():
    assert classify([[1, 3], [2, 2]]) == (INTEGRAL_NONNEG, "")
    assert classify([[1, F(1, 2)], [-1]])[0] == NON_INTEGRAL
    status, reason = classify([[1, 3], [2, -245]])
    assert status == NEGATIVE and "-245" in reason


def test_unfold():
    su3 = cat.get("su3_1")
    out = unfold(su3, [[1, 8], [3, 9]])
    assert out == [[1, 8], [3, 9], [3, 9]]
    assert out[1] is not out[2]
    assert unfold(cat.get("ising"), [[1], [2], [3]]) == [[1], [2], [3]]


def test_t_covariance():
    spec = cat.GenusSpec(cat.get("su2_1"), 1)
    assert t_covariance_holds(spec, SU2_EXPONENTS)
    assert t_covariance_holds(spec, (F(23, 24), F(5, 24) + 2))
    assert not t_covariance_holds(spec, (F(23, 24), F(5, 24) + F(1, 2)))


def test_rejections():
    row, _ = compute("su2_1", 25, (F(9, 4),), ScanConfig(terms=20))
    assert row.status == NEGATIVE and "-245" in row.reason
    row, _ = compute("ising", F(33, 2), (F(1, 16), F(5, 2)), ScanConfig(terms=20))
    assert row.status == NON_INTEGRAL and "7766/15" in row.reason


@pytest.mark.slow
@pytest.mark.parametrize("family,c", [("b2_1", F(85, 2)), ("b7_1", F(95, 2))])
def test_high_charge_rows_are_covariant_with_more_terms(family, c):
    config = ScanConfig(covariance_terms=100)
    golden = next(g for g in golden_rows() if g.family == family and g.c == c and g.kind == "omitted")
    row, _ = compute(family, c, golden.h, config)
    assert row.status == INTEGRAL_NONNEG
    assert mpmath.mpf(row.residuals["covariance"]) < mpmath.mpf(10) ** -20
    assert "covariance_precision" not in row.residuals
