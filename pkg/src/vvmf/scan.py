"""Genus scans: enumerate extremal candidates and run each through the pipeline."""

from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import mpmath

from . import catalog as cat
from .characters import (
    INTEGRAL_NONNEG,
    J_SHIFT,
    RATIO_MAX_DENOMINATOR,
    SOLVER_FAILURE,
    AmbiguityUnresolved,
    CharacterCandidate,
    ConsistencyFailure,
    ResonantStep,
    covariance_residual,
    recurrence,
    resolve_gauge,
    screen_first_column,
    t_covariance_holds,
)
from .connection import NoSolution, ResonantExponents, solve_connection
from .extremal import ExponentCandidate, enumerate_extremal, trace_condition, trace_inputs
from .numeric import default_prec, format_fraction
from .qseries import PrecisionLoss

COVARIANCE_POINTS = (1j, 2j, 0.5 + 1j)
COVARIANCE_TERMS = 60


@dataclass(frozen=True)
class ScanConfig:
    terms: int = 100
    prec_bits: int = field(default_factory=default_prec)
    max_denominator: int = RATIO_MAX_DENOMINATOR
    covariance_terms: int = COVARIANCE_TERMS
    j_shift: int = J_SHIFT
    pair_convention: str = "sum"  # how folded conjugate pairs are reported: "sum" or "individual"
    check_covariance: bool = True

    def fingerprint(self) -> dict:
        data = asdict(self)
        data["digest"] = hashlib.sha256(json.dumps(data, sort_keys=True).encode()).hexdigest()[:16]
        return data


@dataclass
class ScanRow:
    family: str
    c: Fraction
    h: tuple
    ell: int
    p: int
    status: str
    reason: str
    dim_v1: int | None
    leading_exponents: tuple
    components: tuple  # full coefficient lists (ints), possibly empty
    chi_hat: list | None
    A: list | None
    B: list | None
    residuals: dict
    trace_ok: bool
    config: dict
    seconds: float = 0.0
    realization: str | None = None

    @property
    def sort_key(self):
        return (family_order(self.family), self.c, self.h)

    def leading(self, k: int = 3) -> list:
        return [list(comp[:k]) for comp in self.components]

    def to_json(self, full: bool = True) -> dict:
        out = {
            "family": self.family,
            "c": format_fraction(self.c),
            "h": [format_fraction(x) for x in self.h],
            "ell": self.ell,
            "p": self.p,
            "status": self.status,
            "reason": self.reason,
            "dim_v1": None if self.dim_v1 is None else str(self.dim_v1),
            "components": [
                {
                    "leading_exponent": format_fraction(e),
                    "coefficients": [str(v) for v in (comp if full else comp[:3])],
                }
                for e, comp in zip(self.leading_exponents, self.components)
            ],
            "chi_hat": _matrix_json(self.chi_hat),
            "residuals": self.residuals,
            "trace_condition": self.trace_ok,
            "realization": self.realization,
            "config": self.config,
        }
        if self.A is not None:
            out["connection"] = {"A": _matrix_json(self.A), "B": _matrix_json(self.B)}
        return out


def _matrix_json(m):
    if m is None:
        return None
    return [[format_fraction(Fraction(v)) for v in row] for row in m]


def family_order(label: str) -> int:
    for k, d in enumerate(cat.catalog()):
        if d.label == label:
            return k
    return len(cat.catalog())


def _leading_exponents(candidate: ExponentCandidate) -> tuple:
    c = candidate.c
    hs = (Fraction(0),) + tuple(candidate.full_h())
    return tuple(h - c / 24 for h in hs)


def _pair_report(datum: cat.ModularDatum, components: list, convention: str) -> list:
    if not datum.fold_pair or convention == "individual":
        return components
    a, b = datum.fold_pair
    out = list(components)
    for idx in (a, b):
        out[idx] = [2 * v for v in components[idx]]
    return out


def run_candidate(candidate: ExponentCandidate, config: ScanConfig, keep_expansion: bool = False) -> tuple:
    """Full pipeline for one candidate: ``(ScanRow, CharacterCandidate)``."""
    start = time.perf_counter()
    prec = config.prec_bits
    datum = candidate.spec.datum
    eff = candidate.datum
    N = config.terms
    result = CharacterCandidate(
        family=datum.label, c=candidate.c, h=candidate.full_h(), ell=candidate.ell, p=candidate.p,
        status=SOLVER_FAILURE, leading_exponents=_leading_exponents(candidate),
    )
    residuals: dict = {}
    rho_S, rho_ST_inv = trace_inputs(candidate, prec)
    trace_ok = trace_condition(candidate, rho_S, rho_ST_inv, prec)
    eff_spec = cat.GenusSpec(eff, candidate.c)
    if not t_covariance_holds(eff_spec, candidate.exponents):
        result.reason = "T-covariance fails: exp(2 pi i Lambda) != rho(T)"
    else:
        try:
            _pipeline(candidate, config, rho_S, result, residuals, keep_expansion)
        except NoSolution as exc:
            result.reason = f"NoSolution: {exc}"
        except (ResonantExponents, ResonantStep) as exc:
            result.reason = f"{type(exc).__name__}: {exc}"
        except ConsistencyFailure as exc:
            result.reason = f"ConsistencyFailure: {exc}"
        except AmbiguityUnresolved as exc:
            result.reason = f"AmbiguityUnresolved: {exc}"
    if not trace_ok:
        result.reason = (result.reason + "; " if result.reason else "") + "trace condition violated"
    components = result.coefficients or ()
    reported = _pair_report(datum, [list(map(int, comp)) if result.accepted else list(comp) for comp in components],
                            config.pair_convention) if components else []
    row = ScanRow(
        family=datum.label, c=candidate.c, h=tuple(candidate.full_h()), ell=candidate.ell, p=candidate.p,
        status=result.status, reason=result.reason, dim_v1=result.dim_v1,
        leading_exponents=result.leading_exponents if reported else (),
        components=tuple(tuple(_plain(v) for v in comp) for comp in reported),
        chi_hat=None if result.chi_hat is None else result.chi_hat.tolist(),
        A=None if result.connection is None else result.connection.A.tolist(),
        B=None if result.connection is None else result.connection.B.tolist(),
        residuals=residuals, trace_ok=trace_ok, config=config.fingerprint(),
        seconds=time.perf_counter() - start,
    )
    return row, result


def _plain(v):
    v = Fraction(v)
    return int(v) if v.denominator == 1 else format_fraction(v)


def _pipeline(candidate, config, rho_S, result, residuals, keep_expansion):
    prec = config.prec_bits
    solutions = solve_connection(candidate.exponents)
    accepted = []
    outcomes = []
    # the gauge fit and covariance check need the full covariance length even
    # when fewer coefficients are reported
    depth = max(config.terms, config.covariance_terms)
    for sol in solutions:
        expansion = recurrence(candidate.exponents, sol.chi, depth, config.j_shift)
        gauge = resolve_gauge(expansion, rho_S, prec=prec, max_denominator=config.max_denominator)
        status, reason, components, fixed = screen_first_column(
            expansion, gauge, candidate.spec.datum, config.terms, prec)
        outcomes.append((sol, gauge, status, reason, components, fixed))
        if status == INTEGRAL_NONNEG:
            accepted.append(outcomes[-1])
    if len(accepted) > 1:
        result.reason = f"{len(accepted)} connection solutions pass; reporting the first"
    sol, gauge, status, reason, components, fixed = (accepted or outcomes)[0]
    result.connection = sol
    result.status = status
    result.reason = reason if not accepted or len(accepted) == 1 else result.reason
    result.ratios = gauge.ratios
    residuals["gauge"] = mpmath.nstr(gauge.residual, 5)
    if components is not None:
        result.coefficients = tuple(tuple(comp) for comp in components)
        result.dim_v1 = int(components[0][1]) if Fraction(components[0][1]).denominator == 1 else None
    if fixed is not None:
        result.chi_hat = fixed.chi
        if keep_expansion:
            result.expansion = fixed
        if config.check_covariance and status == INTEGRAL_NONNEG:
            try:
                cov = covariance_residual(fixed, rho_S, COVARIANCE_POINTS, prec, config.covariance_terms)
                result.covariance_residual = cov
                residuals["covariance"] = mpmath.nstr(cov, 5)
            except PrecisionLoss as exc:
                cov = covariance_residual(fixed, rho_S, COVARIANCE_POINTS, prec, config.covariance_terms,
                                          check_tail=False)
                result.covariance_residual = cov
                residuals["covariance"] = mpmath.nstr(cov, 5)
                residuals["covariance_precision"] = f"PrecisionLoss: {exc}"


def candidates_for(family: str, cmax) -> list:
    families = cat.catalog() if family == "all" else (cat.get(family),)
    out = []
    for datum in families:
        for c in cat.admissible_charges(datum, cmax):
            out.extend(enumerate_extremal(cat.GenusSpec(datum, c)))
    return out


def _work(args):
    family, c, h, config = args
    candidate = _find(family, c, h)
    row, _ = run_candidate(candidate, config)
    return row


def _find(family: str, c: Fraction, h: tuple) -> ExponentCandidate:
    spec = cat.GenusSpec(cat.get(family), c)
    for cand in enumerate_extremal(spec):
        if tuple(cand.full_h()) == tuple(h) or tuple(cand.h) == tuple(h):
            return cand
    raise ValueError(f"(c={c}, h={[str(x) for x in h]}) is not an extremal candidate for {family}")


def scan(family: str, cmax, config: ScanConfig | None = None, jobs: int = 1) -> list:
    """One row per extremal candidate for every admissible c <= cmax, sorted deterministically."""
    config = config or ScanConfig()
    cmax = Fraction(cmax)
    if cmax <= 0:
        raise ValueError("cmax must be positive")
    work = [(cand.spec.datum.label, cand.c, cand.h, config) for cand in candidates_for(family, cmax)]
    if jobs <= 1 or len(work) <= 1:
        rows = [_work(w) for w in work]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_work, work, chunksize=1))
    rows.sort(key=lambda r: r.sort_key)
    return rows


def compute(family: str, c, h, config: ScanConfig | None = None, keep_expansion: bool = False):
    """Single-candidate drill-down."""
    config = config or ScanConfig()
    candidate = _find(family, Fraction(c), tuple(Fraction(x) for x in h))
    return run_candidate(candidate, config, keep_expansion)


def default_jobs() -> int:
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)
