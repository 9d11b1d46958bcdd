"""
Formatting component for the Davenport lab
Renders records, weight sets, reports and suite results for stdout
"""

from typing import Any, Iterable, List, Optional

from services.davenport_search import ConstantRecord
from services.extremal_lab import ExtremalReport
from services.result_cache import dumps
from services.verify_suite import SuiteResult
from services.weight_sets import WeightSet, index_in_units


def format_terms(terms: Iterable[int]) -> str:
    return "(" + ", ".join(str(t) for t in terms) + ")"


def format_set(values: Iterable[int]) -> str:
    return "{" + ", ".join(str(v) for v in sorted(values)) + "}"


def format_symbol(value: int) -> str:
    return f"{value:+d}" if value else "0"


def format_record(record: ConstantRecord) -> str:
    """Value line plus witness; timing stays out of stdout"""
    bound = "=" if record.is_exact else ">="
    lines = [
        f"{record.constant_kind}_{record.weight_spec}({record.n}) {bound} {record.value} [{record.status}]",
        f"witness: {format_terms(record.witness)}",
    ]
    return "\n".join(lines)


def format_weights(weights: WeightSet, show_orbits: bool = False) -> str:
    lines = [f"{weights.spec} mod {weights.n}: {format_set(weights.members)}"]
    summary = f"size {len(weights)}, group: {'yes' if weights.is_group else 'no'}"
    if weights.is_group:
        summary += f", index {index_in_units(weights)}"
    lines.append(summary)
    if show_orbits and weights.is_group:
        lines.append(f"orbit representatives: {format_set(weights.orbit_representatives(include_zero=True))}")
    return "\n".join(lines)


def format_report(report: ExtremalReport) -> str:
    lines = [f"{report.weight_spec}-extremal classes mod {report.n} "
             f"(D = {report.davenport_value}): {len(report.classes)}"]
    for terms, labels in zip(report.classes, report.labels):
        tag = ", ".join(labels) if labels else "-"
        lines.append(f"  {format_terms(terms)}  {tag}")
    if not report.covered:
        lines.append("no structural forms known for this modulus")
    elif report.unmatched:
        lines.append("unmatched: " + ", ".join(format_terms(t) for t in report.unmatched))
    else:
        lines.append("unmatched: none")
    if report.overlaps:
        lines.append("several forms: " + ", ".join(format_terms(t) for t in report.overlaps))
    if report.partial:
        lines.append("PARTIAL: search budget ran out")
    return "\n".join(lines)


def _shown(value: Any) -> str:
    if value is None:
        return "?"
    if isinstance(value, (list, tuple)):
        return format_terms(value)
    return str(value)


def format_suite(result: SuiteResult) -> str:
    lines: List[str] = []
    for outcome in result.outcomes:
        mark = "PASS" if outcome.passed else "FAIL"
        line = f"{mark} {outcome.check_id}: expected {_shown(outcome.expected)}, got {_shown(outcome.actual)}"
        if outcome.note:
            line += f" ({outcome.note})"
        lines.append(line)
    passed = len(result.outcomes) - len(result.failures)
    lines.append(f"{result.suite}: {passed}/{len(result.outcomes)} checks passed")
    return "\n".join(lines)


def write_json(data: Any, path: Optional[str]) -> str:
    """Deterministic JSON text; also written to path when one is given"""
    text = dumps(data)
    if path:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    return text
