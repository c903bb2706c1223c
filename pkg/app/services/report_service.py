"""
报告服务：渲染单份验证报告（json / csv / text），合并多份报告为汇总表
"""
import csv
import io
import logging
from pathlib import Path
from typing import List, Sequence, Tuple
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table
from app.errors import ConfigError, ReportParseError
from app.schemas.response import MergedSummary, ReportRow, VerificationReport
from app.utils.validation import CHECK_NAMES, OUTPUT_FORMATS

logger = logging.getLogger(__name__)

CSV_COLUMNS = (
    "name", "status", "residual", "tolerance", "witness", "witness_min",
    "points", "worst_component", "worst_point", "errors", "detail",
)

STATUS_STYLE = {"pass": "green", "fail": "bold red", "error": "red", "skipped": "dim"}


def _number(value) -> str:
    return "" if value is None else f"{value:.6e}"


def _joined(values) -> str:
    if values is None:
        return ""
    return " ".join(f"{v:.6g}" if isinstance(v, float) else str(v) for v in values)


def render_json(report: VerificationReport) -> str:
    return report.model_dump_json(indent=2)


def render_csv(report: VerificationReport) -> str:
    """每项检查一行；列为 CSV_COLUMNS"""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for check in report.checks:
        writer.writerow([
            check.name,
            check.status,
            _number(check.residual),
            _number(check.tolerance),
            _number(check.witness),
            _number(check.witness_min),
            check.points,
            _joined(check.worst_component),
            _joined(check.worst_point),
            " | ".join(check.errors),
            check.detail,
        ])
    return buffer.getvalue()


def _recording_console() -> Console:
    return Console(record=True, width=140, file=io.StringIO(), color_system=None)


def render_text(report: VerificationReport) -> str:
    """rich 表格：每项检查的状态、残差 / 容差、最坏分量与最坏点"""
    console = _recording_console()
    title = f"{report.instance_id}"
    if report.classification:
        title += f"  λ = {report.lam}（{report.classification}）"
    table = Table(title=title, show_lines=False)
    table.add_column("检查")
    table.add_column("状态")
    table.add_column("残差 / 幅度", justify="right")
    table.add_column("容差 / 下限", justify="right")
    table.add_column("点数", justify="right")
    table.add_column("最坏分量")
    table.add_column("最坏点")
    for check in report.checks:
        if check.residual is not None:
            measured, bound = _number(check.residual), _number(check.tolerance)
        else:
            measured, bound = _number(check.witness), _number(check.witness_min)
        table.add_row(
            check.name,
            f"[{STATUS_STYLE[check.status]}]{check.status}[/]",
            measured,
            bound,
            str(check.points),
            _joined(check.worst_component),
            _joined(check.worst_point),
        )
    console.print(table)
    for check in report.checks:
        for error in check.errors:
            console.print(f"  {check.name}: {error}")
    verdict = "通过" if report.passed else "未通过"
    console.print(f"seed={report.seed} points={report.points} ode_fed={report.ode_fed}  结论：{verdict}")
    return console.export_text()


RENDERERS = {"json": render_json, "csv": render_csv, "text": render_text}


def render_report(report: VerificationReport, fmt: str = "json") -> str:
    if fmt not in OUTPUT_FORMATS:
        raise ConfigError(f"未知的输出格式: {fmt}")
    return RENDERERS[fmt](report)


def write_output(text: str, out: str = None) -> None:
    """写到文件，或在 out 为空时写到标准输出"""
    if out is None:
        print(text, end="" if text.endswith("\n") else "\n")
        return
    try:
        Path(out).write_text(text, encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"无法写入 {out}: {e}")
    logger.info(f"报告已写入 {out}")


# ---- 合并 ----

def load_report(path: str) -> VerificationReport:
    """
    读取一份 JSON 报告

    异常：
    - ReportParseError: 文件不可读，或不符合报告结构
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ReportParseError(path, str(e))
    try:
        return VerificationReport.model_validate_json(text)
    except ValidationError as e:
        raise ReportParseError(path, f"{e.error_count()} 处结构错误: {e.errors()[0]['msg']}")


def merge_reports(paths: Sequence[str]) -> Tuple[MergedSummary, List[ReportParseError]]:
    """
    合并多份报告：每份报告一行、每项检查一列

    返回：
    - (MergedSummary, 解析失败的错误列表)
    """
    rows: List[ReportRow] = []
    failures: List[ReportParseError] = []
    seen = set()
    for path in paths:
        try:
            report = load_report(path)
        except ReportParseError as e:
            logger.error(e.detail)
            failures.append(e)
            continue
        rows.append(ReportRow(
            source=str(path),
            family=report.family,
            instance_id=report.instance_id,
            passed=report.passed,
            checks={c.name: c.status for c in report.checks},
        ))
        seen.update(c.name for c in report.checks)
    check_names = [name for name in CHECK_NAMES if name in seen]
    summary = MergedSummary(
        check_names=check_names,
        rows=rows,
        errors=[e.detail for e in failures],
        passed=not failures and all(row.passed for row in rows),
    )
    return summary, failures


def render_summary(summary: MergedSummary, fmt: str = "text") -> str:
    if fmt == "json":
        return summary.model_dump_json(indent=2)
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["source", "instance_id", "passed", *summary.check_names])
        for row in summary.rows:
            writer.writerow([row.source, row.instance_id, row.passed,
                             *(row.checks.get(name, "") for name in summary.check_names)])
        return buffer.getvalue()
    if fmt != "text":
        raise ConfigError(f"未知的输出格式: {fmt}")
    console = _recording_console()
    table = Table(title="验证汇总")
    table.add_column("实例")
    for name in summary.check_names:
        table.add_column(name)
    for row in summary.rows:
        table.add_row(row.instance_id, *(
            f"[{STATUS_STYLE[s]}]{s}[/]" if (s := row.checks.get(name)) else "-"
            for name in summary.check_names
        ))
    console.print(table)
    for error in summary.errors:
        console.print(f"[red]{error}[/]")
    return console.export_text()
