"""Exact rational and high-precision complex arithmetic helpers.

Rationals are :class:`fractions.Fraction` (always reduced, positive
denominator).  High-precision reals and complexes are :mod:`mpmath` values;
every function that does floating-point work takes an explicit ``prec``
(bits) and runs inside ``mpmath.workprec`` so callers never depend on the
global mpmath context.
"""

from __future__ import annotations

import os
from fractions import Fraction
from typing import Sequence

import mpmath
import numpy as np

DEFAULT_PREC = 256
MIN_PREC = 64
RECONSTRUCT_RTOL = Fraction(1, 10**15)


class ReconstructionUncertain(ValueError):
    """No rational with a small enough denominator is close enough."""

    def __init__(self, x, max_denominator: int, best: Fraction, residual):
        self.x = x
        self.max_denominator = max_denominator
        self.best = best
        self.residual = residual
        super().__init__(
            f"best approximation {best} with denominator <= {max_denominator} "
            f"is off by {mpmath.nstr(residual, 5)}"
        )


class SingularMatrix(ZeroDivisionError):
    def __init__(self, pivot: int):
        self.pivot = pivot
        super().__init__(f"matrix is singular (no pivot in column {pivot})")


def default_prec() -> int:
    """Working precision in bits; ``VVMF_PREC_BITS`` overrides the default."""
    raw = os.environ.get("VVMF_PREC_BITS")
    if raw is None:
        return DEFAULT_PREC
    prec = int(raw)
    if prec < MIN_PREC:
        raise ValueError(f"VVMF_PREC_BITS must be >= {MIN_PREC}, got {prec}")
    return prec


def to_fraction(x) -> Fraction:
    """Exact rational value of an int, Fraction, string like '3/4', or mpf."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    if isinstance(x, mpmath.mpf):
        sign, man, exp, _ = x._mpf_
        if not man:
            if exp:
                raise ValueError(f"cannot convert {x} to Fraction")
            return Fraction(0)
        value = Fraction(man) * Fraction(2) ** exp
        return -value if sign else value
    if isinstance(x, float):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


def mpf_of(x: Fraction, prec: int):
    with mpmath.workprec(prec):
        return mpmath.mpf(x.numerator) / x.denominator


def rational_reconstruct(x, max_denominator: int, prec: int | None = None) -> tuple[Fraction, mpmath.mpf]:
    """Closest rational to ``x`` with denominator at most ``max_denominator``.

    Returns ``(p/q, |x - p/q|)``.  Raises :class:`ReconstructionUncertain` when
    the residual exceeds ``1e-15 * max(1, |x|)``.
    """
    if max_denominator < 1:
        raise ValueError("max_denominator must be >= 1")
    prec = prec or default_prec()
    with mpmath.workprec(prec):
        if isinstance(x, mpmath.mpc):
            x = x.real
        x = mpmath.mpf(x)
        exact = to_fraction(x)
        best = exact.limit_denominator(max_denominator)
        residual = abs(x - mpf_of(best, prec))
        bound = mpmath.mpf(RECONSTRUCT_RTOL.numerator) / RECONSTRUCT_RTOL.denominator
        if residual > bound * max(1, abs(x)):
            raise ReconstructionUncertain(x, max_denominator, best, residual)
        return best, residual


def _is_exact(entries) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in entries)


def linear_solve(M, b, prec: int | None = None) -> list:
    """Solve ``M x = b`` for a square system of dimension at most 4.

    Rational inputs are solved exactly by Gaussian elimination; anything else
    is solved in mpmath complex arithmetic at ``prec`` bits with partial
    pivoting.  Raises :class:`SingularMatrix` carrying the failing column.
    """
    n = len(M)
    if any(len(row) != n for row in M) or len(b) != n:
        raise ValueError("linear_solve needs a square matrix and matching vector")
    if _is_exact([v for row in M for v in row] + list(b)):
        a = [[Fraction(v) for v in row] + [Fraction(rhs)] for row, rhs in zip(M, b)]
        return _eliminate(a, tol=0)
    prec = prec or default_prec()
    with mpmath.workprec(prec):
        a = [[mpmath.mpc(v) for v in row] + [mpmath.mpc(rhs)] for row, rhs in zip(M, b)]
        scale = max(abs(v) for row in a for v in row[:n])
        return _eliminate(a, tol=scale * mpmath.mpf(2) ** (8 - prec))


def _eliminate(a: list[list], tol) -> list:
    n = len(a)
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(a[r][col]))
        if abs(a[pivot][col]) <= tol:
            raise SingularMatrix(col)
        a[col], a[pivot] = a[pivot], a[col]
        for r in range(col + 1, n):
            f = a[r][col] / a[col][col]
            if f != 0:
                for k in range(col, n + 1):
                    a[r][k] -= f * a[col][k]
    x = [None] * n
    for r in reversed(range(n)):
        s = a[r][n]
        for k in range(r + 1, n):
            s -= a[r][k] * x[k]
        x[r] = s / a[r][r]
    return x


def nullspace(M: Sequence[Sequence], prec: int | None = None) -> list[list]:
    """Orthonormal basis of the numerical kernel of a complex matrix.

    A singular value counts as zero when it is below
    ``2**-(prec/8) * sigma_max`` (absolute ``2**-(prec/8)`` for a zero matrix).
    """
    prec = prec or default_prec()
    with mpmath.workprec(prec):
        A = mpmath.matrix([[mpmath.mpc(v) for v in row] for row in M])
        ncols = A.cols
        # svd_c only returns V for rows >= cols; pad with zero rows otherwise
        if A.rows < ncols:
            padded = mpmath.zeros(ncols, ncols)
            for i in range(A.rows):
                for j in range(ncols):
                    padded[i, j] = A[i, j]
            A = padded
        _, sigma, V = mpmath.svd_c(A)
        sig = [sigma[i] for i in range(len(sigma))]
        smax = max(sig) if sig else mpmath.mpf(0)
        tol = mpmath.mpf(2) ** (-(prec // 8)) * (smax if smax > 0 else 1)
        basis = []
        for k in range(ncols):
            s = sig[k] if k < len(sig) else mpmath.mpf(0)
            if s <= tol:
                basis.append([mpmath.conj(V[k, j]) for j in range(ncols)])
        return basis


def frac_matrix(rows) -> np.ndarray:
    """Object array of Fractions (exact matrix arithmetic via numpy ``@``)."""
    return np.array([[Fraction(v) for v in row] for row in rows], dtype=object)


def frac_diag(values) -> np.ndarray:
    n = len(values)
    m = np.full((n, n), Fraction(0), dtype=object)
    for i, v in enumerate(values):
        m[i, i] = Fraction(v)
    return m


def frac_eye(n: int) -> np.ndarray:
    return frac_diag([1] * n)


def frac_zeros(n: int, m: int | None = None) -> np.ndarray:
    return np.full((n, n if m is None else m), Fraction(0), dtype=object)


def is_zero_matrix(m: np.ndarray) -> bool:
    return all(v == 0 for v in m.flat)


def format_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
