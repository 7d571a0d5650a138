"""Closed-form character vectors used as independent checks on the pipeline."""

from __future__ import annotations

from fractions import Fraction

from .qseries import eisenstein, euler_product_power


def _poly_mul(a: list, b: list, n: int) -> list:
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j, y in enumerate(b[: n - i]):
                out[i + j] += x * y
    return out


def _poly_pow(a: list, e: int, n: int) -> list:
    result = [1] + [0] * (n - 1)
    base = list(a[:n]) + [0] * max(0, n - len(a))
    while e:
        if e & 1:
            result = _poly_mul(result, base, n)
        base = _poly_mul(base, base, n)
        e >>= 1
    return result


def free_fermion_characters(n: int, nterms: int) -> list:
    """Characters of ``B_{n,1}`` (``2n+1`` free Majorana fermions).

    Returns three integer lists (vacuum, spinor, vector), each indexed from
    the module's own leading power, ``nterms`` entries long.
    """
    N = 2 * n + 1
    size = 2 * nterms + 2  # work in s = q^(1/2)
    plus = [1] + [0] * (size - 1)
    minus = [1] + [0] * (size - 1)
    for k in range(1, size, 2):
        factor_p = [0] * size
        factor_m = [0] * size
        factor_p[0] = factor_m[0] = 1
        factor_p[k] = 1
        factor_m[k] = -1
        plus = _poly_mul(plus, factor_p, size)
        minus = _poly_mul(minus, factor_m, size)
    plus = _poly_pow(plus, N, size)
    minus = _poly_pow(minus, N, size)
    even = [(p + m) // 2 for p, m in zip(plus, minus)]
    odd = [(p - m) // 2 for p, m in zip(plus, minus)]
    vacuum = even[0::2][:nterms]
    vector = odd[1::2][:nterms]
    spinor_base = [1] + [0] * (nterms - 1)
    for k in range(1, nterms):
        factor = [0] * nterms
        factor[0] = 1
        factor[k] = 1
        spinor_base = _poly_mul(spinor_base, factor, nterms)
    spinor = [2**n * v for v in _poly_pow(spinor_base, N, nterms)]
    return [vacuum, spinor, vector]


def b_series_rank(c: Fraction) -> int:
    """``n`` with ``c = (2n+1)/2``."""
    c = Fraction(c)
    if c.denominator != 2:
        raise ValueError(f"c = {c} is not half-integral")
    return (c.numerator - 1) // 2


def e6_over_eta12(nterms: int) -> list:
    """Coefficients of ``q^(1/2) E6 / eta^12``, the scalar form with exponent 1/2."""
    e6 = [int(v) for v in eisenstein(6, nterms).coefficients[:nterms]]
    return _poly_mul(e6, euler_product_power(-12, nterms), nterms)
