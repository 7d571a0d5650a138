"""q-expansion of the fundamental matrix and extraction of character vectors.

Writing ``Xi = q**Lambda * sum_{n>=-1} Xi[n] q**n`` with ``Xi[-1] = I`` and
``Xi[0] = chi``, the equation ``q dXi/dq = Xi D`` with

    D = (Delta/E10) * ((J - 240)(Lambda - I) + chi + [Lambda, chi])

becomes, entrywise,

    Xi[n]_ij * (n + 1 + Lambda_i - Lambda_j) = sum_{m=1}^{n+1} (Xi[n-m] D[m])_ij.

The expansion is determined up to conjugation by a diagonal matrix; that
freedom is fixed by requiring ``Xi(i) = rho(S) Xi(i)`` at the fixed point of S.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .catalog import GenusSpec, ModularDatum, rho
from .connection import ConnectionSolution, commutator_term
from .numeric import (
    ReconstructionUncertain,
    default_prec,
    frac_diag,
    frac_eye,
    mpf_of,
    nullspace,
    rational_reconstruct,
)
from .qseries import PrecisionLoss, delta, eisenstein, invert, jay, mul

# The normalization of D that makes the q^1 order of the recurrence
# self-consistent; see characters.consistency_constant tests.
J_SHIFT = 240
RATIO_MAX_DENOMINATOR = 10**9
COVARIANCE_TOL_EXP10 = -20
SCREEN_RTOL = mpmath.mpf(10) ** -10

INTEGRAL_NONNEG = "IntegralNonneg"
NON_INTEGRAL = "NonIntegral"
NEGATIVE = "NegativeCoefficient"
SOLVER_FAILURE = "SolverFailure"


class ResonantStep(ZeroDivisionError):
    pass


class ConsistencyFailure(ArithmeticError):
    pass


class AmbiguityUnresolved(ArithmeticError):
    pass


@lru_cache(maxsize=None)
def d_series(nterms: int, j_shift: int = J_SHIFT) -> tuple:
    """Integer coefficient lists ``(F, G)`` with ``F = (Delta/E10)(J - j_shift)`` and ``G = Delta/E10``.

    Both are indexed from ``q**0``; ``G[0] = 0``.
    """
    g = mul(delta(nterms), invert(eisenstein(10, nterms)))  # q^1 * ...
    f = mul(g, jay(nterms) - j_shift)  # q^0 * ...
    G = (Fraction(0),) + g.coefficients[: nterms - 1]
    F = f.coefficients[:nterms]
    return F, G


@dataclass(frozen=True)
class FundamentalExpansion:
    """``Xi[n]`` for ``n = -1 .. N`` (``terms[k]`` holds ``Xi[k-1]``)."""

    exponents: tuple
    terms: tuple = field(repr=False)

    @property
    def N(self) -> int:
        return len(self.terms) - 2

    @property
    def d(self) -> int:
        return len(self.exponents)

    def __getitem__(self, n: int) -> np.ndarray:
        if n < -1:
            raise IndexError(n)
        return self.terms[n + 1]

    @property
    def chi(self) -> np.ndarray:
        return self[0]

    def conjugate(self, ratios) -> "FundamentalExpansion":
        """``Xi_hat[n]_ij = (r_i / r_j) Xi[n]_ij``."""
        d = self.d
        scale = np.array([[Fraction(ratios[i]) / Fraction(ratios[j]) for j in range(d)]
                          for i in range(d)], dtype=object)
        return FundamentalExpansion(self.exponents, tuple(t * scale for t in self.terms))

    def column_series(self, j: int = 0) -> list:
        """Coefficient lists of column ``j``; entry ``i`` starts at ``q**(Lambda_i - 1)``."""
        return [[t[i, j] for t in self.terms] for i in range(self.d)]


def recurrence(exponents, chi: np.ndarray, N: int, j_shift: int = J_SHIFT) -> FundamentalExpansion:
    """Exact coefficients ``Xi[-1..N]`` from the characteristic matrix."""
    lam = tuple(Fraction(x) for x in exponents)
    d = len(lam)
    Lam = frac_diag(lam)
    I = frac_eye(d)
    K = commutator_term(Lam, chi)
    F, G = d_series(N + 2, j_shift)
    if F[0] != 1 or G[0] != 0:
        raise ConsistencyFailure("D[0] != Lambda - I")
    if F[1] != 0 or G[1] != 1:
        raise ConsistencyFailure(
            f"D[1] != chi + [Lambda, chi] (J shift {j_shift} leaves {F[1]} (Lambda - I))"
        )
    LmI = Lam - I
    zero = 0 * I
    terms = [I, chi.copy()]
    for n in range(1, N + 1):
        P = zero.copy()
        Q = zero.copy()
        for m in range(1, n + 2):
            prev = terms[n - m + 1]
            if F[m]:
                P += F[m] * prev
            if G[m]:
                Q += G[m] * prev
        rhs = P @ LmI + Q @ K
        nxt = np.empty((d, d), dtype=object)
        for i in range(d):
            for j in range(d):
                div = n + 1 + lam[i] - lam[j]
                if div == 0:
                    if rhs[i, j] != 0:
                        raise ResonantStep(f"resonance at n={n}, (i, j)=({i}, {j})")
                    nxt[i, j] = Fraction(0)
                else:
                    nxt[i, j] = rhs[i, j] / div
        terms.append(nxt)
    return FundamentalExpansion(lam, tuple(terms))


def _numeric_terms(expansion: FundamentalExpansion, prec: int, nterms: int | None = None):
    terms = expansion.terms if nterms is None else expansion.terms[: nterms + 2]
    return [[[mpf_of(Fraction(t[i, j]), prec) for j in range(expansion.d)]
             for i in range(expansion.d)] for t in terms]


def evaluate_matrix(expansion: FundamentalExpansion, tau, prec: int | None = None,
                    nterms: int | None = None, numeric=None, check_tail: bool = True):
    """Numeric ``Xi(tau)`` as an mpmath matrix, plus the worst tail bound."""
    prec = prec or default_prec()
    with mpmath.workprec(prec):
        tau = mpmath.mpc(tau)
        if tau.imag <= 0:
            raise ValueError("tau must lie in the upper half-plane")
        numeric = numeric or _numeric_terms(expansion, prec, nterms)
        d = expansion.d
        two_pi_i_tau = 2j * mpmath.pi * tau
        q = mpmath.exp(two_pi_i_tau)
        powers = [mpmath.exp(-two_pi_i_tau)]
        for _ in range(len(numeric) - 1):
            powers.append(powers[-1] * q)
        out = mpmath.matrix(d, d)
        worst = mpmath.mpf(0)
        for i in range(d):
            lead = mpmath.exp(two_pi_i_tau * mpf_of(expansion.exponents[i], prec))
            for j in range(d):
                acc = mpmath.mpc(0)
                biggest = mpmath.mpf(1)
                for k, row in enumerate(numeric):
                    v = row[i][j]
                    if v:
                        acc += v * powers[k]
                        biggest = max(biggest, abs(v))
                out[i, j] = lead * acc
                worst = max(worst, abs(lead) * abs(powers[-1] * q) * biggest)
        if check_tail and worst > mpmath.mpf(10) ** COVARIANCE_TOL_EXP10:
            raise PrecisionLoss(f"tail bound {mpmath.nstr(worst, 5)} at tau={mpmath.nstr(tau, 5)}")
        return out, worst


@dataclass(frozen=True)
class GaugeResolution:
    ratios: tuple  # exact Fractions, or None when reconstruction failed
    numeric_ratios: tuple
    residual: object
    kernel_dim: int


def resolve_gauge(expansion: FundamentalExpansion, rho_S, tau0=1j, prec: int | None = None,
                  max_denominator: int = RATIO_MAX_DENOMINATOR) -> GaugeResolution:
    """Diagonal rescaling ``r`` with ``D Xi D^-1`` covariant under S at ``tau0``.

    Raises :class:`AmbiguityUnresolved` unless the stacked linear system has a
    one-dimensional kernel.  ``ratios`` is ``None`` if some ``r_i / r_0`` is
    not a (verifiably) small-denominator rational.
    """
    prec = prec or default_prec()
    d = expansion.d
    with mpmath.workprec(prec):
        Y, _ = evaluate_matrix(expansion, tau0, prec, check_tail=False)
        rows = []
        for i in range(d):
            for j in range(d):
                rows.append([rho_S[i, k] * Y[k, j] - (Y[i, j] if k == i else 0) for k in range(d)])
        kernel = nullspace(rows, prec)
        if len(kernel) != 1:
            raise AmbiguityUnresolved(f"gauge kernel has dimension {len(kernel)}")
        v = kernel[0]
        if abs(v[0]) == 0:
            raise AmbiguityUnresolved("gauge vector has vanishing vacuum entry")
        numeric = tuple(x / v[0] for x in v)
        residual = _gauge_residual(Y, rho_S, numeric)
        ratios = None
        try:
            ratios = tuple(rational_reconstruct(x, max_denominator, prec)[0] for x in numeric)
            if any(abs(x.imag) > abs(x) * mpmath.mpf(10) ** -30 for x in numeric):
                ratios = None
        except ReconstructionUncertain:
            ratios = None
        if ratios is not None and 0 not in ratios:
            exact_r = tuple(mpf_of(r, prec) for r in ratios)
            exact_residual = _gauge_residual(Y, rho_S, exact_r)
            if exact_residual >= mpmath.mpf(10) ** COVARIANCE_TOL_EXP10 * max(1, _norm(Y)):
                ratios = None  # spurious rational approximation of an irrational ratio
            else:
                residual = exact_residual
        elif ratios is not None:
            ratios = None
        return GaugeResolution(ratios, numeric, residual, len(kernel))


def _norm(M) -> mpmath.mpf:
    return max(abs(M[i, j]) for i in range(M.rows) for j in range(M.cols))


def _gauge_residual(Y, rho_S, r) -> mpmath.mpf:
    d = Y.rows
    D = mpmath.diag(list(r))
    Dinv = mpmath.diag([1 / x for x in r])
    Yh = D * Y * Dinv
    return _norm(Yh - rho_S * Yh)


def s_image(tau):
    return -1 / mpmath.mpc(tau)


def covariance_residual(expansion: FundamentalExpansion, rho_S, tau_list=(1j, 2j, 0.5 + 1j),
                        prec: int | None = None, nterms: int | None = None,
                        check_tail: bool = True) -> mpmath.mpf:
    """``max_tau ||Xi(S tau) - rho(S) Xi(tau)||_inf`` from the truncated expansion.

    Raises :class:`PrecisionLoss` when the truncation tail at some evaluation
    point exceeds ``1e-20`` (unless ``check_tail`` is false).
    """
    prec = prec or default_prec()
    with mpmath.workprec(prec):
        numeric = _numeric_terms(expansion, prec, nterms)
        worst = mpmath.mpf(0)
        for tau in tau_list:
            tau = _exact_tau(tau)
            left, _ = evaluate_matrix(expansion, s_image(tau), prec, numeric=numeric, check_tail=check_tail)
            right, _ = evaluate_matrix(expansion, tau, prec, numeric=numeric, check_tail=check_tail)
            worst = max(worst, _norm(left - rho_S * right))
        return worst


def _exact_tau(tau):
    # 0.5 is exact in binary; keep user-supplied strings exact too
    if isinstance(tau, str):
        return mpmath.mpc(complex(tau)) if "j" in tau else mpmath.mpc(tau)
    return mpmath.mpc(tau)


def t_covariance_holds(spec: GenusSpec, exponents) -> bool:
    """``exp(2 pi i Lambda_ii) = exp(-2 pi i c/24) theta_i`` compared exactly mod 1."""
    return all(
        (lam - (t - spec.c / 24)) % 1 == 0
        for lam, t in zip(exponents, spec.datum.twists)
    )


@dataclass
class CharacterCandidate:
    family: str
    c: Fraction
    h: tuple
    ell: int
    p: int
    status: str
    reason: str = ""
    leading_exponents: tuple = ()
    coefficients: tuple = ()
    dim_v1: int | None = None
    covariance_residual: object = None
    gauge_residual: object = None
    chi_hat: object = None
    connection: ConnectionSolution | None = None
    ratios: tuple | None = None
    expansion: FundamentalExpansion | None = field(default=None, repr=False)

    @property
    def accepted(self) -> bool:
        return self.status == INTEGRAL_NONNEG


def first_column(expansion: FundamentalExpansion, N: int) -> list:
    """Per-component coefficient lists of length ``N + 1`` (component ``i`` starts at ``q**(h_i - c/24)``)."""
    cols = expansion.column_series(0)
    out = []
    for i, series in enumerate(cols):
        start = 0 if i == 0 else 1  # non-vacuum rows have Xi[-1]_i0 = 0
        out.append(series[start : start + N + 1])
    return out


def classify(coefficients) -> tuple:
    """Status and reason for exact first-column coefficients."""
    for i, comp in enumerate(coefficients):
        for k, v in enumerate(comp):
            if Fraction(v).denominator != 1:
                return NON_INTEGRAL, f"component {i}, coefficient {k} = {v}"
    for i, comp in enumerate(coefficients):
        for k, v in enumerate(comp):
            if v < 0:
                return NEGATIVE, f"component {i}, coefficient {k} = {v}"
    return INTEGRAL_NONNEG, ""


def classify_numeric(values) -> tuple | None:
    """Pre-screen with a relative integrality tolerance; ``None`` if everything looks integral."""
    for i, comp in enumerate(values):
        for k, v in enumerate(comp):
            x = v.real
            if abs(x - mpmath.nint(x)) >= SCREEN_RTOL * max(1, abs(x)) or abs(v.imag) > SCREEN_RTOL * max(1, abs(x)):
                return NON_INTEGRAL, f"component {i}, coefficient {k} ~ {mpmath.nstr(v, 12)}"
    return None


def unfold(datum: ModularDatum, components: list) -> list:
    """Duplicate the folded row back onto both members of the conjugate pair."""
    if not datum.fold_pair:
        return components
    a, b = datum.fold_pair
    out = [components[0], None, None]
    out[a] = components[1]
    out[b] = list(components[1])
    return out


def screen_first_column(expansion: FundamentalExpansion, gauge: GaugeResolution,
                        datum: ModularDatum, N: int, prec: int | None = None) -> tuple:
    """Classify the gauge-fixed first column.

    Returns ``(status, reason, components, fixed_expansion)``; ``components``
    are unfolded and exact when the gauge ratios are rational, ``None``
    otherwise.
    """
    prec = prec or default_prec()
    if gauge.ratios is None:
        with mpmath.workprec(prec):
            raw = first_column(expansion, N)
            values = [[gauge.numeric_ratios[i] * mpf_of(Fraction(v), prec) for v in comp]
                      for i, comp in enumerate(raw)]
            verdict = classify_numeric(values)
        if verdict is not None:
            return verdict[0], verdict[1], None, None
        return SOLVER_FAILURE, "ReconstructionUncertain: gauge ratios look rational but did not reconstruct", None, None
    fixed = expansion.conjugate(gauge.ratios)
    components = unfold(datum, first_column(fixed, N))
    status, reason = classify(components)
    return status, reason, components, fixed
