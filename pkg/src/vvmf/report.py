"""Serializers for scan results: JSON (full fidelity), CSV and a markdown table."""

from __future__ import annotations

import csv
import io
import json

from .golden import golden_rows
from .numeric import format_fraction

CSV_LEADING = 3


def realization_for(row) -> str | None:
    for g in golden_rows():
        if g.key() == (row.family, row.c, row.h) and g.realization:
            return g.realization
    return None


def _annotate(rows):
    for r in rows:
        if r.realization is None:
            r.realization = realization_for(r)
    return rows


def to_json(rows) -> str:
    rows = _annotate(list(rows))
    config = rows[0].config if rows else None
    doc = {"config": config, "rows": [r.to_json(full=True) for r in rows]}
    return json.dumps(doc, indent=1, ensure_ascii=False) + "\n"


def to_csv(rows) -> str:
    rows = _annotate(list(rows))
    width = max((len(r.components) for r in rows), default=1)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["family", "c", "h", "ell", "p", "status", "dim_v1", "realization"]
    for i in range(width):
        header += [f"comp{i}_exponent"] + [f"comp{i}_a{k}" for k in range(CSV_LEADING)]
    header += ["covariance_residual", "reason", "config_digest"]
    w.writerow(header)
    for r in rows:
        line = [r.family, format_fraction(r.c), " ".join(format_fraction(x) for x in r.h), r.ell, r.p,
                r.status, "" if r.dim_v1 is None else r.dim_v1, r.realization or ""]
        for i in range(width):
            if i < len(r.components):
                comp = list(r.components[i][:CSV_LEADING])
                comp += [""] * (CSV_LEADING - len(comp))
                line += [format_fraction(r.leading_exponents[i])] + [str(v) for v in comp]
            else:
                line += [""] * (CSV_LEADING + 1)
        line += [r.residuals.get("covariance", ""), r.reason, r.config["digest"]]
        w.writerow(line)
    return buf.getvalue()


def _series(exponent, coeffs) -> str:
    terms = []
    for k, v in enumerate(coeffs[:CSV_LEADING]):
        terms.append(str(v) if k == 0 else f"{v}q" if k == 1 else f"{v}q^{k}")
    body = " + ".join(terms) + " + ..."
    return f"q^({format_fraction(exponent)})({body})"


def to_markdown(rows) -> str:
    rows = _annotate(list(rows))
    out = []
    family = None
    for r in rows:
        if r.family != family:
            family = r.family
            if out:
                out.append("")
            out.append(f"### {family}")
            out.append("")
            hs = " | ".join(f"h{i + 1}" for i in range(len(r.h)))
            out.append(f"| c | {hs} | ell | dim V1 | status | realization | character vector |")
            out.append("|" + "---|" * (len(r.h) + 6))
        vec = "<br>".join(_series(e, comp) for e, comp in zip(r.leading_exponents, r.components))
        hs = " | ".join(format_fraction(x) for x in r.h)
        dim = "" if r.dim_v1 is None else str(r.dim_v1)
        out.append(f"| {format_fraction(r.c)} | {hs} | {r.ell} | {dim} | {r.status} | "
                   f"{r.realization or ''} | {vec} |")
    return "\n".join(out) + "\n"


def write_rows(rows, fmt: str) -> str:
    writers = {"json": to_json, "csv": to_csv, "md": to_markdown}
    try:
        return writers[fmt](rows)
    except KeyError:
        raise ValueError(f"unknown format {fmt!r}") from None
