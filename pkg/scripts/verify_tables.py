"""Recompute the reference tables and write the verification report to a file."""

import argparse
import sys

from vvmf.golden import verify
from vvmf.scan import ScanConfig, default_jobs


def main(argv=None):
    p = argparse.ArgumentParser()
    p.add_argument("--scope", default="all", choices=["rank2", "rank3", "all"])
    p.add_argument("--out", default=None)
    p.add_argument("--jobs", type=int, default=default_jobs())
    args = p.parse_args(argv)
    report = verify(args.scope, ScanConfig(), args.jobs)
    text = report.text() + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text.splitlines()[-1] + "\n")
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
