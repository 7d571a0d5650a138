"""Modular data of the rank-2 and rank-3 unitary modular categories.

Each S-matrix entry is kept as a short symbolic string over a fixed
vocabulary (``sqrt``, ``phi``, ``psi``, ``omega``, ``sin``, ``pi``) and as a
300-bit complex number.  Twists are stored as exponents ``t_i`` with
``theta_i = exp(2 pi i t_i)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce

import mpmath

from .numeric import format_fraction, rational_reconstruct

CATALOG_PREC = 300


class NotFoldable(ValueError):
    pass


class InadmissibleCharge(ValueError):
    pass


def _symbols(prec: int) -> dict:
    with mpmath.workprec(prec):
        return {
            "sqrt": mpmath.sqrt,
            "sin": mpmath.sin,
            "cos": mpmath.cos,
            "pi": +mpmath.pi,
            "phi": (1 + mpmath.sqrt(5)) / 2,
            "psi": 2 * mpmath.cos(mpmath.pi / 7),
            "omega": mpmath.expjpi(mpmath.mpf(2) / 3),
        }


def eval_symbolic(expr: str, prec: int = CATALOG_PREC) -> mpmath.mpc:
    """Numeric value of one catalog S-matrix entry."""
    with mpmath.workprec(prec + 20):
        value = eval(expr, {"__builtins__": {}}, _symbols(prec + 20))  # noqa: S307 - fixed vocabulary
        value = mpmath.mpc(value)
    with mpmath.workprec(prec):
        return +value


@dataclass(frozen=True)
class ModularDatum:
    label: str
    name: str
    S_symbolic: tuple
    twists: tuple
    base_charge: Fraction
    self_dual: bool = True
    fold_pair: tuple | None = None
    folded_from: str | None = None
    S: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "twists", tuple(Fraction(t) for t in self.twists))
        object.__setattr__(self, "base_charge", Fraction(self.base_charge))
        if not self.S:
            numeric = tuple(tuple(eval_symbolic(e) for e in row) for row in self.S_symbolic)
            object.__setattr__(self, "S", numeric)

    @property
    def rank(self) -> int:
        return len(self.twists)

    def S_matrix(self, prec: int = CATALOG_PREC) -> mpmath.matrix:
        with mpmath.workprec(prec):
            return mpmath.matrix([[+v for v in row] for row in self.S])

    def dims(self) -> list:
        """Quantum dimensions ``S_0i / S_00``."""
        with mpmath.workprec(CATALOG_PREC):
            return [self.S[0][i] / self.S[0][0] for i in range(self.rank)]

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "name": self.name,
            "rank": self.rank,
            "S": [
                [{"symbolic": e, "decimal": mpmath.nstr(v, 40)} for e, v in zip(srow, vrow)]
                for srow, vrow in zip(self.S_symbolic, self.S)
            ],
            "twists": [format_fraction(t) for t in self.twists],
            "c0": format_fraction(self.base_charge),
            "self_dual": self.self_dual,
            "fold_pair": list(self.fold_pair) if self.fold_pair else None,
        }


@dataclass(frozen=True)
class GenusSpec:
    datum: ModularDatum
    c: Fraction

    def __post_init__(self):
        c = Fraction(self.c)
        object.__setattr__(self, "c", c)
        if c <= 0:
            raise InadmissibleCharge(f"central charge must be positive, got {c}")
        if (c - self.datum.base_charge) % 8 != 0:
            raise InadmissibleCharge(
                f"c = {c} is not congruent to {self.datum.base_charge} mod 8 for {self.datum.label}"
            )


_R2 = "1/sqrt(2)"
_FIB = "1/sqrt(2+phi)"
_ISING_S = (
    ("1/2", "sqrt(2)/2", "1/2"),
    ("sqrt(2)/2", "0", "-sqrt(2)/2"),
    ("1/2", "-sqrt(2)/2", "1/2"),
)
_HALF_SU2_5 = "2*sin(pi/7)/sqrt(7)"
_HALF_SU2_5_S = (
    (f"{_HALF_SU2_5}", f"{_HALF_SU2_5}*psi", f"{_HALF_SU2_5}*(psi**2-1)"),
    (f"{_HALF_SU2_5}*psi", f"{_HALF_SU2_5}*(1-psi**2)", f"{_HALF_SU2_5}"),
    (f"{_HALF_SU2_5}*(psi**2-1)", f"{_HALF_SU2_5}", f"-{_HALF_SU2_5}*psi"),
)
_ISING_NAMES = ["ising", "su2_2", "b2_1", "b3_1", "b4_1", "b5_1", "b6_1", "b7_1"]
_ISING_PRETTY = ["Ising", "Rep(SU(2)_2)", "Rep(B_2,1)", "Rep(B_3,1)", "Rep(B_4,1)",
                 "Rep(B_5,1)", "Rep(B_6,1)", "Rep(B_7,1)"]


def _build() -> tuple:
    entries = [
        ModularDatum("su2_1", "Rep(SU(2)_1)", ((_R2, _R2), (_R2, f"-{_R2}")), (0, "1/4"), 1),
        ModularDatum("e7_1", "Rep(E_7,1)", ((_R2, _R2), (_R2, f"-{_R2}")), (0, "3/4"), 7),
        ModularDatum("g2_1", "Rep(G_2,1)", ((_FIB, f"{_FIB}*phi"), (f"{_FIB}*phi", f"-{_FIB}")),
                     (0, "2/5"), "14/5"),
        ModularDatum("f4_1", "Rep(F_4,1)", ((_FIB, f"{_FIB}*phi"), (f"{_FIB}*phi", f"-{_FIB}")),
                     (0, "3/5"), "26/5"),
    ]
    for n, (label, pretty) in enumerate(zip(_ISING_NAMES, _ISING_PRETTY)):
        entries.append(
            ModularDatum(label, pretty, _ISING_S, (0, Fraction(2 * n + 1, 16), "1/2"), Fraction(2 * n + 1, 2))
        )
    entries += [
        ModularDatum("half_su2_5", "1/2 Rep(SU(2)_5)", _HALF_SU2_5_S, (0, "1/7", "5/7"), "48/7"),
        ModularDatum("half_su2_5_bar", "conj(1/2 Rep(SU(2)_5))", _HALF_SU2_5_S, (0, "6/7", "2/7"), "8/7"),
        ModularDatum(
            "su3_1", "Rep(SU(3)_1)",
            (("1/sqrt(3)",) * 3,
             ("1/sqrt(3)", "omega/sqrt(3)", "omega**2/sqrt(3)"),
             ("1/sqrt(3)", "omega**2/sqrt(3)", "omega/sqrt(3)")),
            (0, "1/3", "1/3"), 2, self_dual=False, fold_pair=(1, 2),
        ),
        ModularDatum(
            "e6_1", "Rep(E_6,1)",
            (("1/sqrt(3)",) * 3,
             ("1/sqrt(3)", "omega**2/sqrt(3)", "omega/sqrt(3)"),
             ("1/sqrt(3)", "omega/sqrt(3)", "omega**2/sqrt(3)")),
            (0, "2/3", "2/3"), 6, self_dual=False, fold_pair=(1, 2),
        ),
    ]
    return tuple(entries)


@lru_cache(maxsize=1)
def catalog() -> tuple:
    """All 16 modular data, in table order."""
    return _build()


def get(label: str) -> ModularDatum:
    for datum in catalog():
        if datum.label == label:
            return datum
    raise KeyError(f"unknown family {label!r}; known: {', '.join(d.label for d in catalog())}")


def rho(spec: GenusSpec, generator: str, prec: int = CATALOG_PREC) -> mpmath.matrix:
    """``rho(S)`` or ``rho(T) = exp(-2 pi i c/24) diag(theta_i)`` at the genus' c."""
    datum = spec.datum
    with mpmath.workprec(prec):
        if generator == "S":
            return datum.S_matrix(prec)
        if generator == "T":
            d = datum.rank
            m = mpmath.zeros(d, d)
            for i, t in enumerate(datum.twists):
                m[i, i] = mpmath.expjpi(2 * (mpmath.mpf(t.numerator) / t.denominator)
                                        - mpmath.mpf(spec.c.numerator) / (12 * spec.c.denominator))
            return m
    raise ValueError(f"generator must be 'S' or 'T', got {generator!r}")


def admissible_charges(datum: ModularDatum, cmax) -> list:
    cmax = Fraction(cmax)
    out = []
    c = datum.base_charge
    while c <= cmax:
        out.append(c)
        c += 8
    return out


def gauss_sum_charge(datum: ModularDatum) -> Fraction:
    """Central charge in (0, 8] read off from the normalized Gauss sum."""
    with mpmath.workprec(CATALOG_PREC):
        total = mpmath.mpc(0)
        for d, t in zip(datum.dims(), datum.twists):
            total += abs(d) ** 2 * mpmath.expjpi(2 * mpmath.mpf(t.numerator) / t.denominator)
        angle = mpmath.arg(total)  # in (-pi, pi]
        c = 4 * angle / mpmath.pi
        if c <= 0:
            c += 8
        den = 2 * reduce(math.lcm, (t.denominator for t in datum.twists), 1)
        value, _ = rational_reconstruct(c, den, prec=CATALOG_PREC)
    if den % value.denominator:
        raise ValueError(f"reconstructed charge {value} has unexpected denominator")
    return value


def fold(datum: ModularDatum) -> ModularDatum:
    """Restrict to the span of ``e_0`` and ``e_a + e_b`` for the conjugate pair ``(a, b)``."""
    if not datum.fold_pair:
        raise NotFoldable(f"{datum.label} has no conjugate pair to fold")
    a, b = datum.fold_pair
    if datum.twists[a] != datum.twists[b]:
        raise NotFoldable(f"{datum.label}: paired twists differ")
    S = datum.S_symbolic
    sym = (
        (S[0][0], f"2*({S[0][a]})"),
        (S[a][0], f"({S[a][a]})+({S[a][b]})"),
    )
    return ModularDatum(
        datum.label + "_folded",
        datum.name + " (folded)",
        sym,
        (0, datum.twists[a]),
        datum.base_charge,
        self_dual=True,
        folded_from=datum.label,
    )


def effective(datum: ModularDatum) -> ModularDatum:
    """The datum the character pipeline runs on (folded when a conjugate pair exists)."""
    return fold(datum) if datum.fold_pair else datum


def catalog_json() -> str:
    return json.dumps([d.to_json() for d in catalog()], indent=2)
