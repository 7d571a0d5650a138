"""Extremal exponent candidates and the bijectivity trace test."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import mpmath

from .catalog import GenusSpec, ModularDatum, effective, rho
from .numeric import default_prec, mpf_of

TRACE_TOL_EXP10 = -20


class NonIntegralResidue(ValueError):
    pass


@dataclass(frozen=True)
class ExponentCandidate:
    spec: GenusSpec
    h: tuple
    ell: int
    p: int

    @property
    def datum(self) -> ModularDatum:
        """Datum the pipeline runs on (folded for conjugate-pair families)."""
        return effective(self.spec.datum)

    @property
    def c(self) -> Fraction:
        return self.spec.c

    @property
    def exponents(self) -> tuple:
        """Diagonal of Lambda: ``delta_i0 + h_i - c/24`` with ``h_0 = 0``."""
        shift = self.spec.c / 24
        return (1 - shift,) + tuple(hi - shift for hi in self.h)

    def full_h(self) -> tuple:
        """Minimal energies of every module of the unfolded category."""
        datum = self.spec.datum
        if datum.fold_pair:
            return (self.h[0],) * 2
        return self.h


def ell(c, h, p: int) -> Fraction:
    """``binom(p, 2) + p c / 4 - 6 sum(h)``; integral for genuine VOAs."""
    if p < 1:
        raise ValueError("p must be >= 1")
    return comb(p, 2) + Fraction(p) * Fraction(c) / 4 - 6 * sum((Fraction(x) for x in h), Fraction(0))


def is_extremal(candidate_or_ell) -> bool:
    value = candidate_or_ell.ell if isinstance(candidate_or_ell, ExponentCandidate) else candidate_or_ell
    return 0 <= value < 6


def enumerate_extremal(spec: GenusSpec) -> list:
    """Every lifting ``h_i = t_i + k_i`` (``k_i >= 0``) with the minimal ell."""
    datum = effective(spec.datum)
    p = datum.rank
    t = datum.twists[1:]
    base = ell(spec.c, t, p)
    if base.denominator != 1:
        raise NonIntegralResidue(
            f"{spec.datum.label} at c={spec.c}: ell residue {base} is not an integer"
        )
    ell_star = int(base) % 6
    total_h = (comb(p, 2) + Fraction(p) * spec.c / 4 - ell_star) / 6
    excess = total_h - sum(t, Fraction(0))
    if excess < 0:
        return []
    assert excess.denominator == 1
    excess = int(excess)
    out = []
    for ks in _compositions(excess, len(t)):
        h = tuple(ti + k for ti, k in zip(t, ks))
        out.append(ExponentCandidate(spec, h, ell_star, p))
    out.sort(key=lambda cand: cand.h)
    return out


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for ks in itertools.product(range(total + 1), repeat=parts - 1):
        rest = total - sum(ks)
        if rest >= 0:
            yield ks + (rest,)


def trace_rhs(rho_S: mpmath.matrix, rho_ST_inv: mpmath.matrix, prec: int | None = None):
    """Right-hand side of the bijectivity trace identity."""
    prec = prec or default_prec()
    with mpmath.workprec(prec):
        d = rho_S.rows
        tr_s = sum(rho_S[i, i] for i in range(d))
        tr_u = sum(rho_ST_inv[i, i] for i in range(d))
        return (mpmath.mpf(5 * d) / 12 + tr_s.real / 4
                + 2 / (3 * mpmath.sqrt(3)) * (mpmath.expjpi(mpmath.mpf(-1) / 6) * tr_u).real)


def trace_condition(candidate: ExponentCandidate, rho_S=None, rho_ST_inv=None,
                    prec: int | None = None) -> bool:
    """True when ``Tr(Lambda)`` equals the trace formula to ``1e-20``."""
    prec = prec or default_prec()
    return abs(trace_defect(candidate, rho_S, rho_ST_inv, prec)) < mpmath.mpf(10) ** TRACE_TOL_EXP10


def trace_defect(candidate: ExponentCandidate, rho_S=None, rho_ST_inv=None,
                 prec: int | None = None):
    prec = prec or default_prec()
    with mpmath.workprec(prec):
        if rho_S is None or rho_ST_inv is None:
            rho_S, rho_ST_inv = trace_inputs(candidate, prec)
        lhs = mpf_of(sum(candidate.exponents, Fraction(0)), prec)
        return lhs - trace_rhs(rho_S, rho_ST_inv, prec)


def trace_inputs(candidate: ExponentCandidate, prec: int | None = None):
    """``rho(S)`` and ``rho(S) rho(T)^-1`` for the candidate's effective datum."""
    prec = prec or default_prec()
    spec = GenusSpec(candidate.datum, candidate.c)
    with mpmath.workprec(prec):
        s = rho(spec, "S", prec)
        t = rho(spec, "T", prec)
        return s, s * mpmath.inverse(t)
