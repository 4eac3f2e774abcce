"""Human and machine renderings of analysis reports.

Machine output is `key=value` lines followed by whitespace-separated tables, with
every real printed to 15 significant digits, so identical inputs give
byte-identical reports.
"""

from collections import Counter
from typing import Any, Literal

from pydantic import BaseModel

from ..config.constants import REAL_FORMAT
from ..core.models import ConservationReport, DensityReport, ResidualReport, VerificationReport

type OutputFormat = Literal["human", "machine"]

# Rows shown per table in human output
HUMAN_TABLE_ROWS = 11

type TableSpec = tuple[str, tuple[tuple[str, str], ...]]

_CONSERVATION_TABLES: tuple[TableSpec, ...] = (
    ("conserved_quantity", (("x", "samples"), ("c", "c_values"), ("dc_dx", "residuals"))),
    ("gauge", (("x", "gauge_nodes"), ("f", "gauge_values"))),
    ("tau", (("x", "tau_table.nodes"), ("tau", "tau_table.values"))),
)
_RESIDUAL_TABLES: tuple[TableSpec, ...] = (("residuals", (("x", "samples"), ("residual", "residuals"))),)
_DENSITY_TABLES: tuple[TableSpec, ...] = (("density", (("x", "nodes"), ("f", "values"))),)


def format_real(value: float) -> str:
    return format(value, REAL_FORMAT)


def _tables_for(report: BaseModel) -> tuple[TableSpec, ...]:
    if isinstance(report, ConservationReport):
        return _CONSERVATION_TABLES
    if isinstance(report, ResidualReport):
        return _RESIDUAL_TABLES
    if isinstance(report, DensityReport):
        return _DENSITY_TABLES
    return ()


def _lookup(report: BaseModel, path: str) -> list[float]:
    value: Any = report
    for part in path.split("."):
        value = getattr(value, part, None) if value is not None else None
    return list(value) if value is not None else []


def _machine_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_real(value)
    if value is None:
        return "none"
    return str(value)


def _flatten(prefix: str, value: Any, skip: set[str], lines: list[str]) -> None:
    if prefix in skip:
        return
    if isinstance(value, BaseModel):
        for name, item in value:
            _flatten(f"{prefix}.{name}" if prefix else name, item, skip, lines)
    elif isinstance(value, list):
        lines.append(f"{prefix}.count={len(value)}")
        for index, item in enumerate(value):
            _flatten(f"{prefix}.{index}", item, skip, lines)
    else:
        lines.append(f"{prefix}={_machine_value(value)}")


def render_machine(report: BaseModel) -> str:
    tables = _tables_for(report)
    tabled = {path for _, columns in tables for _, path in columns}
    lines: list[str] = []
    _flatten("", report, tabled, lines)
    for title, columns in tables:
        data = [_lookup(report, path) for _, path in columns]
        if not data[0]:
            continue
        lines.append(f"# {title} " + " ".join(header for header, _ in columns))
        for row in zip(*data, strict=True):
            lines.append(" ".join(format_real(v) for v in row))
    return "\n".join(lines) + "\n"


def _fmt(value: float) -> str:
    return f"{value:.6g}"


def _table(headers: list[str], rows: list[list[str]]) -> list[str]:
    widths = [max(len(h), *(len(row[i]) for row in rows)) if rows else len(h) for i, h in enumerate(headers)]
    lines = ["  " + "  ".join(h.ljust(w) for h, w in zip(headers, widths, strict=True))]
    for row in rows:
        lines.append("  " + "  ".join(cell.ljust(w) for cell, w in zip(row, widths, strict=True)))
    return lines


def _thin(count: int, rows: int = HUMAN_TABLE_ROWS) -> list[int]:
    if count <= rows:
        return list(range(count))
    return sorted({round(i * (count - 1) / (rows - 1)) for i in range(rows)})


def _verdict(passed: bool) -> str:
    return "PASSED" if passed else "FAILED"


def _residual_lines(report: ResidualReport) -> list[str]:
    reasons = Counter(point.reason for point in report.excluded)
    excluded = ", ".join(f"{reason}: {count}" for reason, count in sorted(reasons.items()))
    lines = [
        f"Residual check: {report.which} (mode {report.mode})",
        f"  samples: {len(report.samples)}  excluded: {len(report.excluded)}" + (f" ({excluded})" if excluded else ""),
        f"  sup-norm: {_fmt(report.sup_norm)}  rms: {_fmt(report.rms)}  tolerance: {_fmt(report.tolerance)}",
    ]
    if report.functional_value is not None:
        lines.append(f"  functional value: {_fmt(report.functional_value)}")
    if report.pieces:
        rows = [
            [f"[{_fmt(p.lower)}, {_fmt(p.upper)}]", _fmt(p.sup_norm), _fmt(p.rms), str(p.count)]
            for p in report.pieces
        ]
        lines += _table(["piece", "sup-norm", "rms", "count"], rows)
    return lines


def _conservation_lines(report: ConservationReport) -> list[str]:
    lines = [
        f"Conservation check (mode {report.mode})",
        f"  tau: {report.tau}  xi: {report.xi}",
        f"  samples: {len(report.samples)}  excluded: {len(report.excluded)}",
        f"  max |C|: {_fmt(report.max_abs_c)}  sup |dC/dx|: {_fmt(report.dc_dx_sup)}"
        f"  tolerance: {_fmt(report.tolerance)}",
    ]
    rows = [
        [f"[{_fmt(p.lower)}, {_fmt(p.upper)}]", _fmt(p.variation), str(p.count), "flagged" if p.flagged else ""]
        for p in report.pieces_variation
    ]
    lines += _table(["piece", "variation", "count", ""], rows)

    if report.samples:
        lines.append("  C along the candidate:")
        picks = _thin(len(report.samples))
        lines += _table(
            ["x", "C", "dC/dx"],
            [[_fmt(report.samples[i]), _fmt(report.c_values[i]), _fmt(report.residuals[i])] for i in picks],
        )
    if report.gauge_nodes:
        lines.append("  gauge f:")
        picks = _thin(len(report.gauge_nodes))
        lines += _table(["x", "f"], [[_fmt(report.gauge_nodes[i]), _fmt(report.gauge_values[i])] for i in picks])
    if report.tau_table is not None:
        table = report.tau_table
        lines.append(f"  sampled tau (tau({_fmt(table.x_ref)}) = 1):")
        picks = _thin(len(table.nodes))
        lines += _table(["x", "tau"], [[_fmt(table.nodes[i]), _fmt(table.values[i])] for i in picks])
    lines.append(f"  verdict: {report.verdict}")
    return lines


def _density_lines(report: DensityReport) -> list[str]:
    lines = [
        f"Invariant density ({report.mode}, n={report.iterations}, N={max(len(report.nodes) - 1, 0)})",
        f"  fixed-point residual: {_fmt(report.fixed_point_residual)}  tolerance: {_fmt(report.tolerance)}",
        f"  mass: {_fmt(report.mass)}",
    ]
    if report.chaos_value is not None:
        lines.append(f"  chaos functional: {_fmt(report.chaos_value)}")
    picks = _thin(len(report.nodes))
    lines += _table(["x", "f"], [[_fmt(report.nodes[i]), _fmt(report.values[i])] for i in picks])
    return lines


def _verification_lines(report: VerificationReport) -> list[str]:
    rows = [
        [c.name, c.mode, _fmt(c.value), _fmt(c.bound), "pass" if c.passed else "FAIL", "yes" if c.fidelity else "no"]
        for c in report.checks
    ]
    lines = ["Worked example"]
    lines += _table(["check", "mode", "value", "bound", "result", "counts"], rows)
    if report.notes:
        lines.append("  notes:")
        lines += [f"    - {note}" for note in report.notes]
    return lines


def render_human(report: BaseModel) -> str:
    if isinstance(report, ConservationReport):
        lines = _conservation_lines(report)
    elif isinstance(report, ResidualReport):
        lines = _residual_lines(report)
    elif isinstance(report, DensityReport):
        lines = _density_lines(report)
    elif isinstance(report, VerificationReport):
        lines = _verification_lines(report)
    else:
        lines = [f"{name}: {value}" for name, value in report]
    error = getattr(report, "error", None)
    if error:
        lines.append(f"  error: {error}")
    passed = getattr(report, "passed", None)
    if passed is not None:
        lines.append(f"Result: {_verdict(bool(passed))}")
    return "\n".join(lines) + "\n"


def render(report: BaseModel, output_format: OutputFormat = "human") -> str:
    if output_format == "machine":
        return render_machine(report)
    return render_human(report)
