"""How the S-covariance residual of the accepted rows shrinks with truncation order.

The worst evaluation point is tau = i/2 (the S-image of 2i), where |q| = e^-pi,
so the residual at order N falls roughly like e^(-pi N) times the coefficient
growth.  Prints one line per (row, N).
"""

import argparse
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from vvmf.characters import covariance_residual
from vvmf.extremal import trace_inputs
from vvmf.golden import golden_rows
from vvmf.scan import COVARIANCE_POINTS, ScanConfig, _find, run_candidate


@dataclass(frozen=True)
class Horizon:
    orders: tuple = (40, 60, 80, 100)
    min_c: Fraction = Fraction(40)


def main(argv=None):
    p = argparse.ArgumentParser()
    p.add_argument("--min-c", type=Fraction, default=Horizon.min_c)
    p.add_argument("--orders", default=",".join(map(str, Horizon.orders)))
    args = p.parse_args(argv)
    exp = Horizon(orders=tuple(int(x) for x in args.orders.split(",")), min_c=args.min_c)
    config = ScanConfig(terms=max(exp.orders), covariance_terms=max(exp.orders))
    seen = set()
    for g in golden_rows():
        if g.c < exp.min_c or g.key() in seen:
            continue
        seen.add(g.key())
        cand = _find(g.family, g.c, g.h)
        _, result = run_candidate(cand, config, keep_expansion=True)
        if result.expansion is None:
            continue
        rho_S, _ = trace_inputs(cand, config.prec_bits)
        for n in exp.orders:
            res = covariance_residual(result.expansion, rho_S, COVARIANCE_POINTS, config.prec_bits, n,
                                      check_tail=False)
            print(f"{g.family:14s} c={str(g.c):6s} N={n:3d} residual={mpmath.nstr(res, 3)}")


if __name__ == "__main__":
    main()
