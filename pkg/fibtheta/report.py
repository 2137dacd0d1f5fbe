"""
Render check reports and relation results for stdout.

Supported formats:
- JSON lines: one object per check, then nothing else
- Plain text table with a summary line
"""

import json
from typing import Iterable, TextIO

from fibtheta.checks import CheckReport, RunSummary
from fibtheta.relations import RelationResult

_STATUS_LABEL = {"pass": "PASS", "fail": "FAIL", "inconclusive": "????"}


def write_json_lines(reports: Iterable[CheckReport], stream: TextIO) -> None:
    for report in reports:
        stream.write(report.to_json() + "\n")


def format_report_line(report: CheckReport, width: int = 24) -> str:
    label = _STATUS_LABEL[report.status.value]
    return (
        f"  {label}  {report.name:<{width}}  gap {report.gap_bound:<9}  "
        f"{report.elapsed_ms:>6} ms"
    )


def format_report_detail(report: CheckReport) -> list[str]:
    return [
        f"  {report.name}",
        f"    lhs: {report.lhs_decimal}",
        f"    rhs: {report.rhs_decimal}",
        f"    status: {report.status.value}   gap bound: {report.gap_bound}   "
        f"precision: {report.precision_digits}",
    ]


def format_summary(summary: RunSummary) -> str:
    counts = summary.counts
    return (
        f"{len(summary.reports)} checks: {counts['pass']} pass, {counts['fail']} fail, "
        f"{counts['inconclusive']} inconclusive"
    )


def write_text(summary: RunSummary, stream: TextIO, detailed: bool = False) -> None:
    width = max((len(r.name) for r in summary.reports), default=10)
    for report in summary.reports:
        if detailed:
            stream.write("\n".join(format_report_detail(report)) + "\n")
        else:
            stream.write(format_report_line(report, width) + "\n")
    stream.write(format_summary(summary) + "\n")


def _term(coeff: int, label: str, first: bool) -> str:
    sign = "-" if coeff < 0 else ("" if first else "+")
    mag = abs(coeff)
    if label == "1":
        body = str(mag)
    elif mag == 1:
        body = label
    else:
        body = f"{mag}*{label}"
    return f"{sign}{body}" if first else f" {sign} {body}"


def format_relation(result: RelationResult) -> str:
    """Human-readable relation, e.g. 'x^2 - 2*x - 4 = 0', highest monomial first."""
    if not result.found:
        return result.note
    parts = []
    pairs = [(c, l) for c, l in zip(result.coefficients, result.labels) if c]
    for i, (c, label) in enumerate(reversed(pairs)):
        parts.append(_term(c, label, i == 0))
    return "".join(parts) + " = 0"


def write_relation(result: RelationResult, stream: TextIO, as_json: bool = False) -> None:
    if as_json:
        stream.write(json.dumps(result.to_dict()) + "\n")
        return
    params = result.search_params
    stream.write(
        f"search: dimension {params.dimension}, height <= {params.max_height}, "
        f"{params.precision_digits} digits, {params.method}\n"
    )
    if result.found:
        stream.write(f"found (degree {result.degree}): {format_relation(result)}\n")
        stream.write(f"coefficients: {list(result.coefficients)}\n")
        stream.write(f"certified residual < {result.to_dict()['residual_bound']}\n")
    else:
        stream.write(f"not found. {result.note}\n")
