"""Truncated q-expansions with exact rational coefficients.

A :class:`QSeries` stores ``q**e * (a_0 + a_1 q + ... + a_{N-1} q**(N-1))``
with a single rational offset ``e``.  Products and quotients keep the
smaller truncation of their operands, so every stored coefficient is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

from .numeric import default_prec, mpf_of

DEFAULT_TERMS = 105
TAIL_LIMIT_EXP10 = -20


class UnsupportedWeight(ValueError):
    pass


class NonUnitSeries(ZeroDivisionError):
    pass


class PrecisionLoss(ArithmeticError):
    pass


@dataclass(frozen=True)
class QSeries:
    leading_exponent: Fraction
    coefficients: tuple

    def __post_init__(self):
        object.__setattr__(self, "leading_exponent", Fraction(self.leading_exponent))
        object.__setattr__(self, "coefficients", tuple(self.coefficients))

    @classmethod
    def from_list(cls, coefficients, leading_exponent=0) -> "QSeries":
        return cls(Fraction(leading_exponent), tuple(Fraction(c) for c in coefficients))

    @property
    def truncation_order(self) -> int:
        return len(self.coefficients)

    def __len__(self):
        return len(self.coefficients)

    def coeff(self, exponent) -> Fraction:
        """Coefficient of ``q**exponent`` (zero below the leading exponent)."""
        k = Fraction(exponent) - self.leading_exponent
        if k.denominator != 1 or k < 0:
            return Fraction(0)
        if k >= len(self.coefficients):
            raise IndexError(f"q^{exponent} is beyond the truncation order")
        return self.coefficients[int(k)]

    def truncate(self, n: int) -> "QSeries":
        return QSeries(self.leading_exponent, self.coefficients[:n])

    def _aligned(self, other: "QSeries"):
        shift = other.leading_exponent - self.leading_exponent
        if shift.denominator != 1:
            raise ValueError("series live on different q-grids")
        return int(shift)

    def __add__(self, other):
        if not isinstance(other, QSeries):
            return self._add_constant(Fraction(other))
        shift = self._aligned(other)
        base = min(0, shift)
        # exclusive upper end, measured in steps from self.leading_exponent
        top = min(len(self), len(other) + shift)
        out = []
        for k in range(base, top):
            a = self.coefficients[k] if 0 <= k < len(self) else 0
            b = other.coefficients[k - shift] if 0 <= k - shift < len(other) else 0
            out.append(a + b)
        return QSeries(self.leading_exponent + base, out)

    def _add_constant(self, value: Fraction) -> "QSeries":
        if self.leading_exponent.denominator != 1:
            raise ValueError("cannot add a constant to a series with fractional exponents")
        k = -int(self.leading_exponent)
        coeffs = list(self.coefficients)
        if k < 0:
            coeffs = [Fraction(0)] * (-k) + coeffs
            k = 0
            lead = Fraction(0)
        else:
            lead = self.leading_exponent
        if k >= len(coeffs):
            raise IndexError("constant term lies beyond the truncation order")
        coeffs[k] += value
        return QSeries(lead, coeffs)

    __radd__ = __add__

    def __neg__(self):
        return QSeries(self.leading_exponent, [-c for c in self.coefficients])

    def __sub__(self, other):
        return self + (-other if isinstance(other, QSeries) else -Fraction(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, k) -> "QSeries":
        return QSeries(self.leading_exponent, [k * c for c in self.coefficients])

    def shift(self, e) -> "QSeries":
        """Multiply by ``q**e``."""
        return QSeries(self.leading_exponent + Fraction(e), self.coefficients)

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            return self.scale(other)
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, QSeries):
            return self.scale(Fraction(1) / Fraction(other))
        return mul(self, invert(other))

    def __pow__(self, n: int):
        result = QSeries(0, [Fraction(1)] + [Fraction(0)] * (len(self) - 1))
        for _ in range(n):
            result = result * self
        return result

    def __repr__(self):
        terms = ", ".join(str(c) for c in self.coefficients[:6])
        more = ", ..." if len(self) > 6 else ""
        return f"QSeries(q^{self.leading_exponent} * [{terms}{more}], N={len(self)})"


def mul(a: QSeries, b: QSeries) -> QSeries:
    """Cauchy product; exponents add, truncation is the smaller of the two."""
    n = min(len(a), len(b))
    ac, bc = a.coefficients, b.coefficients
    out = []
    for k in range(n):
        s = 0
        for i in range(k + 1):
            x = ac[i]
            if x:
                s += x * bc[k - i]
        out.append(Fraction(s))
    return QSeries(a.leading_exponent + b.leading_exponent, out)


def invert(a: QSeries) -> QSeries:
    c = a.coefficients
    if not c or c[0] == 0:
        raise NonUnitSeries("leading coefficient is zero; series is not a unit")
    inv0 = 1 / Fraction(c[0])
    out = [inv0]
    for k in range(1, len(c)):
        s = sum(c[i] * out[k - i] for i in range(1, k + 1))
        out.append(-s * inv0)
    return QSeries(-a.leading_exponent, out)


def q_derivative(a: QSeries) -> QSeries:
    """``q d/dq``, i.e. ``(1/2 pi i) d/dtau`` on q-expansions."""
    e = a.leading_exponent
    return QSeries(e, [(e + k) * c for k, c in enumerate(a.coefficients)])


def _sigma(k: int, n: int) -> int:
    total = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            total += d**k
            if d * d != n:
                total += (n // d) ** k
        d += 1
    return total


@lru_cache(maxsize=None)
def _eisenstein(weight: int, nterms: int) -> QSeries:
    if weight == 4:
        return QSeries.from_list([1] + [240 * _sigma(3, n) for n in range(1, nterms)])
    if weight == 6:
        return QSeries.from_list([1] + [-504 * _sigma(5, n) for n in range(1, nterms)])
    if weight == 10:
        return mul(_eisenstein(4, nterms), _eisenstein(6, nterms))
    raise UnsupportedWeight(f"weight {weight} is not one of 4, 6, 10")


def eisenstein(weight: int, nterms: int = DEFAULT_TERMS) -> QSeries:
    """Normalized Eisenstein series ``E_4``, ``E_6`` or ``E_10 = E_4 E_6``."""
    if nterms < 1:
        raise ValueError("nterms must be >= 1")
    return _eisenstein(weight, nterms)


@lru_cache(maxsize=None)
def _delta(nterms: int) -> QSeries:
    e4 = _eisenstein(4, nterms + 1)
    e6 = _eisenstein(6, nterms + 1)
    d = (e4 * e4 * e4 - e6 * e6) / 1728
    assert d.coefficients[0] == 0
    return QSeries(1, d.coefficients[1 : nterms + 1])


def delta(nterms: int = DEFAULT_TERMS) -> QSeries:
    """Discriminant ``(E_4^3 - E_6^2)/1728 = q - 24 q^2 + ...``."""
    if nterms < 1:
        raise ValueError("nterms must be >= 1")
    return _delta(nterms)


@lru_cache(maxsize=None)
def _jay(nterms: int) -> QSeries:
    e4 = _eisenstein(4, nterms)
    j = (e4 * e4 * e4) / _delta(nterms)
    coeffs = list(j.coefficients)
    if len(coeffs) > 1:
        coeffs[1] -= 744
    return QSeries(-1, coeffs)


def jay(nterms: int = DEFAULT_TERMS) -> QSeries:
    """Hauptmodul ``J = E_4^3/Delta - 744 = q^-1 + 196884 q + ...``."""
    if nterms < 1:
        raise ValueError("nterms must be >= 1")
    return _jay(nterms)


def frak_j(nterms: int = DEFAULT_TERMS) -> QSeries:
    """Affine rescaling ``(984 - J)/1728`` sending ``tau = i`` to 0."""
    return (984 - jay(nterms)) / 1728


def euler_product_power(power: int, nterms: int) -> list[int]:
    """Coefficients of ``prod_{n>=1} (1 - q^n)^power`` up to ``q^(nterms-1)``.

    Computed by repeated multiplication by binomial factors, independently of
    the Eisenstein-series route.
    """
    coeffs = [0] * nterms
    coeffs[0] = 1
    for n in range(1, nterms):
        for _ in range(abs(power)):
            if power > 0:
                # multiply by (1 - q^n)
                for k in range(nterms - 1, n - 1, -1):
                    coeffs[k] -= coeffs[k - n]
            else:
                # divide by (1 - q^n): multiply by 1 + q^n + q^2n + ...
                for k in range(n, nterms):
                    coeffs[k] += coeffs[k - n]
    return coeffs


def evaluate(a: QSeries, tau, prec: int | None = None):
    """Numeric value of ``a`` at ``tau`` with ``q = exp(2 pi i tau)``.

    Returns ``(value, tail_bound)``.  The tail bound is
    ``|q|**(last exponent + 1) * max|coeff|``; :class:`PrecisionLoss` is raised
    when it exceeds ``1e-20``.
    """
    prec = prec or default_prec()
    with mpmath.workprec(prec):
        tau = mpmath.mpc(tau)
        if tau.imag <= 0:
            raise ValueError("tau must lie in the upper half-plane")
        value, bound = _evaluate(a.leading_exponent, a.coefficients, tau, prec)
        if bound > mpmath.mpf(10) ** TAIL_LIMIT_EXP10:
            raise PrecisionLoss(f"tail bound {mpmath.nstr(bound, 5)} exceeds 1e-20")
        return value, bound


def _evaluate(leading_exponent: Fraction, coefficients, tau, prec: int):
    two_pi_i = 2j * mpmath.pi
    q = mpmath.exp(two_pi_i * tau)
    lead = mpmath.exp(two_pi_i * mpf_of(leading_exponent, prec) * tau)
    acc = mpmath.mpc(0)
    qn = mpmath.mpc(1)
    biggest = mpmath.mpf(0)
    for c in coefficients:
        if c:
            cf = mpf_of(Fraction(c), prec)
            acc += cf * qn
            biggest = max(biggest, abs(cf))
        qn *= q
    # qn now holds q**len(coefficients)
    tail = abs(lead) * abs(qn) * max(biggest, 1)
    return lead * acc, tail
