"""Scan every catalog family and write the results table.

    python scripts/scan_all.py --out results/scan.md --format md
"""

import argparse
import sys
import time
from dataclasses import dataclass

from vvmf import catalog as cat
from vvmf.golden import SCOPE_CMAX
from vvmf.report import write_rows
from vvmf.scan import ScanConfig, default_jobs, scan


@dataclass(frozen=True)
class Experiment:
    terms: int = 100
    rank2_cmax: int = 72
    rank3_cmax: int = 48
    fmt: str = "md"
    jobs: int = default_jobs()


def main(argv=None):
    p = argparse.ArgumentParser()
    p.add_argument("--terms", type=int, default=Experiment.terms)
    p.add_argument("--format", dest="fmt", default="md", choices=["json", "csv", "md"])
    p.add_argument("--out", default=None)
    p.add_argument("--jobs", type=int, default=default_jobs())
    args = p.parse_args(argv)
    exp = Experiment(terms=args.terms, fmt=args.fmt, jobs=args.jobs,
                     rank2_cmax=int(SCOPE_CMAX[2]), rank3_cmax=int(SCOPE_CMAX[3]))
    config = ScanConfig(terms=exp.terms)
    rows = []
    start = time.perf_counter()
    for datum in cat.catalog():
        cmax = exp.rank2_cmax if datum.rank == 2 else exp.rank3_cmax
        got = scan(datum.label, cmax, config, exp.jobs)
        rows.extend(got)
        accepted = sum(r.status == "IntegralNonneg" for r in got)
        print(f"{datum.label:16s} {len(got):3d} candidates, {accepted:2d} accepted", file=sys.stderr)
    print(f"{len(rows)} candidates in {time.perf_counter() - start:.0f}s", file=sys.stderr)
    text = write_rows(rows, exp.fmt)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()
