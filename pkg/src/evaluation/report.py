# Vulnerability Report
# MMPMR table with "morphs as references | morphs as probes" cells per dataset

import io
import logging
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import pandas as pd

from common.errors import IoFailure, ParseError
from common.tables import format_float, iter_rows, read_table, write_table
from evaluation.metrics import EvalReport, MmpmrRule, ScenarioMode

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ["tool", "model", "dataset", "mode", "threshold", "fmr", "fnmr", "mmpmr",
                  "n_morphs", "n_genuine", "n_impostor", "n_morph_comparisons", "rule", "target_fmr"]

MISSING_CELL = "-"
MODE_ORDER = {ScenarioMode.MORPHS_AS_REFERENCES: 0, ScenarioMode.MORPHS_AS_PROBES: 1}


class ReportFormat(Enum):
    CSV = "csv"
    TEXT = "text"

    @classmethod
    def from_path(cls, path: Union[str, Path]) -> "ReportFormat":
        return cls.CSV if Path(path).suffix.lower() == ".csv" else cls.TEXT


@dataclass(frozen=True)
class ReportEntry:
    """Evaluation of one (tool, model, dataset, mode) cell"""
    tool: str
    model: str
    dataset: str
    report: EvalReport

    @property
    def mode(self) -> ScenarioMode:
        return self.report.mode

    def sort_key(self) -> Tuple[str, str, str, int]:
        return (self.tool, self.model, self.dataset, MODE_ORDER[self.mode])


def percent(rate: float) -> str:
    """Rate as a percentage with one decimal, rounding halves away from zero"""
    value = Decimal(repr(float(rate))) * 100
    return str(value.quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def format_cell(refs: Optional[float], probes: Optional[float]) -> str:
    """'83.3 | 72.0' from the two MMPMR rates; a missing scenario shows '-'"""
    left = percent(refs) if refs is not None else MISSING_CELL
    right = percent(probes) if probes is not None else MISSING_CELL
    return f"{left} | {right}"


def _joined(values) -> str:
    return ", ".join(sorted(set(values))) or MISSING_CELL


def header_note(entries: Sequence[ReportEntry]) -> List[str]:
    rules = _joined(e.report.rule.value for e in entries)
    targets = _joined(f"{percent(e.report.target_fmr)}%" for e in entries)
    return [
        f"# MMPMR (%) at FMR = {targets}, rule: {rules}",
        "# Scores are cosine similarities; a comparison is accepted when score >= threshold",
        "# Cells: morphs as references | morphs as probes",
    ]


def _csv_rows(entries: Sequence[ReportEntry]) -> List[Dict[str, object]]:
    rows = []
    for entry in sorted(entries, key=ReportEntry.sort_key):
        r = entry.report
        rows.append({
            "tool": entry.tool,
            "model": entry.model,
            "dataset": entry.dataset,
            "mode": r.mode.value,
            "threshold": format_float(r.threshold),
            "fmr": format_float(r.fmr_at_threshold),
            "fnmr": format_float(r.fnmr_at_threshold),
            "mmpmr": MISSING_CELL if r.mmpmr is None else format_float(r.mmpmr),
            "n_morphs": r.n_morphs,
            "n_genuine": r.n_genuine,
            "n_impostor": r.n_impostor,
            "n_morph_comparisons": r.n_morph_comparisons,
            "rule": r.rule.value,
            "target_fmr": format_float(r.target_fmr),
        })
    return rows


def _table(entries: Sequence[ReportEntry]) -> str:
    datasets = sorted({e.dataset for e in entries})
    cells: Dict[Tuple[str, str], Dict[str, Dict[ScenarioMode, Optional[float]]]] = {}
    for entry in entries:
        row = cells.setdefault((entry.tool, entry.model), {})
        row.setdefault(entry.dataset, {})[entry.mode] = entry.report.mmpmr

    header = ["Tool", "Model"] + datasets
    if not cells:
        return "  ".join(header)

    records = []
    for (tool, model), by_dataset in sorted(cells.items()):
        record = [tool, model]
        for dataset in datasets:
            modes = by_dataset.get(dataset, {})
            record.append(format_cell(modes.get(ScenarioMode.MORPHS_AS_REFERENCES),
                                      modes.get(ScenarioMode.MORPHS_AS_PROBES)))
        records.append(record)
    return pd.DataFrame(records, columns=header).to_string(index=False, justify="left")


def emit_report(entries: Sequence[ReportEntry], fmt: ReportFormat = ReportFormat.TEXT) -> str:
    """Render entries as CSV or as the aligned text table (rows sorted by tool, model)"""
    if fmt is ReportFormat.CSV:
        buffer = io.StringIO()
        pd.DataFrame(_csv_rows(entries), columns=REPORT_COLUMNS).to_csv(
            buffer, index=False, lineterminator="\n")
        return buffer.getvalue()
    return "\n".join(header_note(entries) + [_table(entries)]) + "\n"


def write_report(entries: Sequence[ReportEntry], path: Union[str, Path],
                 fmt: Optional[ReportFormat] = None) -> Path:
    path = Path(path)
    fmt = fmt or ReportFormat.from_path(path)
    if fmt is ReportFormat.CSV:
        return write_table(_csv_rows(entries), REPORT_COLUMNS, path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(emit_report(entries, fmt), encoding="utf-8")
    except OSError as e:
        raise IoFailure(f"cannot write {path}: {e}") from e
    return path


def load_report(path: Union[str, Path]) -> List[ReportEntry]:
    """Read a report CSV back into entries"""
    path = Path(path)
    frame = read_table(path, REPORT_COLUMNS)
    entries = []
    for line, row in iter_rows(frame):
        try:
            report = EvalReport(
                threshold=float(row.threshold),
                fmr_at_threshold=float(row.fmr),
                fnmr_at_threshold=float(row.fnmr),
                mmpmr=None if row.mmpmr.strip() == MISSING_CELL else float(row.mmpmr),
                n_genuine=int(row.n_genuine),
                n_impostor=int(row.n_impostor),
                n_morphs=int(row.n_morphs),
                n_morph_comparisons=int(row.n_morph_comparisons),
                mode=ScenarioMode(row.mode),
                rule=MmpmrRule(row.rule),
                target_fmr=float(row.target_fmr),
            )
        except ValueError as e:
            raise ParseError(f"bad report row: {e}", line=line, path=str(path))
        entries.append(ReportEntry(row.tool, row.model, row.dataset, report))
    return entries
