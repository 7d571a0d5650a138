from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from vvmf.numeric import (
    ReconstructionUncertain,
    SingularMatrix,
    default_prec,
    format_fraction,
    linear_solve,
    mpf_of,
    nullspace,
    rational_reconstruct,
    to_fraction,
)

small_fractions = st.fractions(min_value=-10**6, max_value=10**6, max_denominator=10**4)


@given(st.integers(-10**30, 10**30), st.integers(-200, 200))
def test_to_fraction_is_exact_on_dyadics(m, e):
    with mpmath.workprec(256):
        x = mpmath.mpf(m) * mpmath.mpf(2) ** e
    assert to_fraction(x) == Fraction(m) * Fraction(2) ** e


def test_to_fraction_keeps_sign():
    assert to_fraction(mpmath.mpf(-0.75)) == Fraction(-3, 4)


@given(small_fractions)
def test_reconstruct_roundtrip(q):
    value, residual = rational_reconstruct(mpf_of(q, 200), 10**9, prec=200)
    assert value == q
    assert residual < mpmath.mpf(10) ** -50


def test_reconstruct_third_at_200_bits():
    value, _ = rational_reconstruct(mpf_of(Fraction(1, 3), 200), 10**9, prec=200)
    assert value == Fraction(1, 3)


def test_reconstruct_rejects_transcendental():
    with mpmath.workprec(256):
        pi = +mpmath.pi
    with pytest.raises(ReconstructionUncertain):
        rational_reconstruct(pi, 10**6, prec=256)


def test_large_bound_admits_close_convergents():
    # with denominators up to 1e9 a convergent of pi lies within 1e-15; callers
    # verify reconstructed values exactly afterwards
    with mpmath.workprec(256):
        pi = +mpmath.pi
    value, _ = rational_reconstruct(pi, 10**9, prec=256)
    assert value.denominator > 10**7


def test_reconstruct_rejects_bad_bound():
    with pytest.raises(ValueError):
        rational_reconstruct(mpmath.mpf(1), 0)


@settings(max_examples=50)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(
    st.lists(st.lists(small_fractions, min_size=n, max_size=n), min_size=n, max_size=n),
    st.lists(small_fractions, min_size=n, max_size=n))))
def test_exact_solve_satisfies_system(system):
    M, b = system
    try:
        x = linear_solve(M, b)
    except SingularMatrix:
        return
    for row, rhs in zip(M, b):
        assert sum(a * v for a, v in zip(row, x)) == rhs


def test_numeric_solve():
    x = linear_solve([[2, 1j], [1, 3]], [1, 2], prec=256)
    with mpmath.workprec(256):
        assert abs(2 * x[0] + 1j * x[1] - 1) < mpmath.mpf(10) ** -60
        assert abs(x[0] + 3 * x[1] - 2) < mpmath.mpf(10) ** -60


def test_singular_matrix_reports_pivot():
    with pytest.raises(SingularMatrix) as err:
        linear_solve([[1, 2], [2, 4]], [1, 1])
    assert err.value.pivot == 1


def test_nullspace_of_rank_one():
    basis = nullspace([[1, 2, 3]])
    assert len(basis) == 2
    for v in basis:
        with mpmath.workprec(256):
            assert abs(v[0] + 2 * v[1] + 3 * v[2]) < mpmath.mpf(10) ** -60


def test_nullspace_of_invertible_is_empty():
    assert nullspace([[1, 0], [0, 1]]) == []


def test_env_precision(monkeypatch):
    monkeypatch.setenv("VVMF_PREC_BITS", "300")
    assert default_prec() == 300
    monkeypatch.setenv("VVMF_PREC_BITS", "10")
    with pytest.raises(ValueError):
        default_prec()


def test_format_fraction():
    assert format_fraction(Fraction(-3, 4)) == "-3/4"
    assert format_fraction(Fraction(10**30)) == str(10**30)
