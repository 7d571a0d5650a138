"""Residue matrices of the hypergeometric connection for a bijective exponent.

The fundamental matrix satisfies ``dXi/dj = Xi (A/(2j) + B/(3(j-1)))`` in the
Hauptmodul ``j = (984 - J)/1728``.  Its two finite singular points are the
elliptic points of orders 2 and 3, so the local monodromies have finite order
and we look for ``A`` with spectrum in {0, 1} and ``B`` with spectrum in
{0, 1, 2}, tied together by ``A/2 + B/3 = I - Lambda``.  For ``d <= 3`` the
idempotent ``A`` is 0, I, rank one or corank one; rank-one pieces are written
in the gauge where every row is the same vector ``x`` and ``x`` is fixed by
matching the characteristic polynomial of ``B`` (a linear problem by the
matrix determinant lemma).  Every solution is checked exactly against the
cubic matrix identity below before it is returned.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .numeric import (
    SingularMatrix,
    frac_diag,
    frac_eye,
    frac_zeros,
    is_zero_matrix,
    linear_solve,
)


class NoSolution(ValueError):
    def __init__(self, exponents, attempts):
        self.exponents = exponents
        self.attempts = attempts
        detail = "; ".join(f"{m}: {why}" for m, why in attempts) or "no admissible multiplicity data"
        super().__init__(f"no connection for Lambda={[str(x) for x in exponents]} ({detail})")


class ResonantExponents(ZeroDivisionError):
    pass


@dataclass(frozen=True)
class ConnectionSolution:
    exponents: tuple
    A: np.ndarray
    B: np.ndarray
    chi: np.ndarray
    rank_A: int
    multiplicities_B: tuple
    gauge: str
    degenerate: bool = False

    @property
    def Lambda(self) -> np.ndarray:
        return frac_diag(self.exponents)

    @property
    def multiplicities(self) -> tuple:
        return (self.rank_A, self.multiplicities_B)


def commutator_term(Lam: np.ndarray, chi: np.ndarray) -> np.ndarray:
    """``chi + [Lambda, chi]``."""
    return chi + Lam @ chi - chi @ Lam


def chi_from_A(exponents, A: np.ndarray) -> np.ndarray:
    lam = [Fraction(x) for x in exponents]
    d = len(lam)
    Lam = frac_diag(lam)
    target = 864 * (Fraction(31, 36) * (frac_eye(d) - Lam) - A)
    chi = frac_zeros(d)
    for i in range(d):
        for j in range(d):
            div = 1 + lam[i] - lam[j]
            if div == 0:
                if target[i, j] != 0:
                    raise ResonantExponents(f"1 + Lambda_{i} - Lambda_{j} = 0")
                continue
            chi[i, j] = target[i, j] / div
    return chi


def B_from_chi(exponents, chi: np.ndarray) -> np.ndarray:
    Lam = frac_diag(exponents)
    d = len(exponents)
    return Fraction(41, 24) * (frac_eye(d) - Lam) + commutator_term(Lam, chi) / 576


def A_from_chi(exponents, chi: np.ndarray) -> np.ndarray:
    Lam = frac_diag(exponents)
    d = len(exponents)
    return Fraction(31, 36) * (frac_eye(d) - Lam) - commutator_term(Lam, chi) / 864


def verify_cubic(exponents, A: np.ndarray) -> np.ndarray:
    """Exact residual ``LHS - RHS`` of the cubic identity for ``A``."""
    Lam = frac_diag(exponents)
    I = frac_eye(len(exponents))
    L2 = Lam @ Lam
    lhs = A @ Lam @ A
    rhs = (
        Fraction(-17, 18) * A
        - 2 * (A @ L2 + Lam @ A @ Lam + L2 @ A)
        + 3 * (A @ Lam + Lam @ A)
        - 4 * (L2 @ Lam)
        + 8 * L2
        - Fraction(44, 9) * Lam
        + Fraction(8, 9) * I
    )
    return lhs - rhs


def check_solution(sol: ConnectionSolution) -> dict:
    """Exact residual of every identity a connection must satisfy (all zero when valid)."""
    d = len(sol.exponents)
    I = frac_eye(d)
    Lam = sol.Lambda
    A, B = sol.A, sol.B
    return {
        "A_idempotent": A @ A - A,
        "B_spectrum": B @ (B - I) @ (B - 2 * I),
        "A_B_sum": A / 2 + B / 3 - (I - Lam),
        "cubic": verify_cubic(sol.exponents, A),
        "A_from_chi": A_from_chi(sol.exponents, sol.chi) - A,
        "B_from_chi": B_from_chi(sol.exponents, sol.chi) - B,
    }


def is_valid(sol: ConnectionSolution) -> bool:
    return all(is_zero_matrix(m) for m in check_solution(sol).values())


def _charpoly_target(mu: Fraction, mults: tuple) -> Fraction:
    b0, b1, b2 = mults
    return mu**b0 * (mu - 1) ** b1 * (mu - 2) ** b2


def _rank_one_weights(beta: list, mults: tuple, sign: int) -> list:
    """Solve ``prod(mu - beta) + sign*(3/2) sum_i x_i prod_{j!=i}(mu - beta_j) = target``."""
    d = len(beta)
    points = [Fraction(k) - Fraction(1, 7) for k in range(d)]
    M, rhs = [], []
    for mu in points:
        row = []
        for i in range(d):
            prod = Fraction(1)
            for j in range(d):
                if j != i:
                    prod *= mu - beta[j]
            row.append(sign * Fraction(3, 2) * prod)
        M.append(row)
        base = Fraction(1)
        for b in beta:
            base *= mu - b
        rhs.append(_charpoly_target(mu, mults) - base)
    return linear_solve(M, rhs)


def _multiplicity_data(exponents):
    d = len(exponents)
    target = d - sum(exponents, Fraction(0))
    for a in range(d + 1):
        for b1 in range(d + 1):
            for b2 in range(d + 1 - b1):
                b0 = d - b1 - b2
                if Fraction(a, 2) + Fraction(b1 + 2 * b2, 3) == target:
                    yield a, (b0, b1, b2)


def solve_connection(exponents) -> list:
    """All residue-matrix solutions for ``Lambda = diag(exponents)``.

    Raises :class:`NoSolution` if no multiplicity datum gives an exact solution.
    """
    lam = tuple(Fraction(x) for x in exponents)
    d = len(lam)
    if len(set(lam)) != d:
        raise ValueError("Lambda must have pairwise distinct diagonal entries")
    if d > 3:
        raise ValueError("only d <= 3 is supported")
    Lam = frac_diag(lam)
    I = frac_eye(d)
    beta = [3 * (1 - x) for x in lam]
    solutions, attempts = [], []
    for a, mults in _multiplicity_data(lam):
        candidates = []
        if a == 0:
            candidates.append((frac_zeros(d), "diagonal", False))
        elif a == d:
            candidates.append((frac_eye(d), "diagonal", False))
        elif a == 1 or a == d - 1:
            corank = a != 1
            shifted = [b - Fraction(3, 2) for b in beta] if corank else beta
            try:
                x = _rank_one_weights(shifted, mults, sign=-1 if corank else 1)
            except SingularMatrix as exc:
                attempts.append(((a, mults), f"rank-one system singular at pivot {exc.pivot}"))
                continue
            row_matrix = np.array([list(x) for _ in range(d)], dtype=object)
            A = I - row_matrix if corank else row_matrix
            candidates.append((A, "corank-one rows-equal" if corank else "rank-one rows-equal",
                               any(v == 0 for v in x)))
        else:
            attempts.append(((a, mults), "idempotent rank not covered for d <= 3"))
            continue
        for A, gauge, degenerate in candidates:
            B = 3 * (I - Lam) - Fraction(3, 2) * A
            try:
                chi = chi_from_A(lam, A)
            except ResonantExponents as exc:
                attempts.append(((a, mults), str(exc)))
                continue
            sol = ConnectionSolution(lam, A, B, chi, a, mults, gauge, degenerate)
            failed = [k for k, m in check_solution(sol).items() if not is_zero_matrix(m)]
            if failed:
                attempts.append(((a, mults), "fails " + ", ".join(failed)))
                continue
            solutions.append(sol)
    if not solutions:
        raise NoSolution(lam, attempts)
    return solutions
