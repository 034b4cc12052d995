# Tabular Files
# Fixed-header CSV tables read and written through pandas

from pathlib import Path
from typing import Iterable, List, Mapping, Sequence, Union

import pandas as pd

from common.errors import IoFailure, ParseError

# Header is line 1, so data row i (0-based) sits on file line i + 2
FIRST_DATA_LINE = 2


def read_table(path: Union[str, Path], columns: Sequence[str]) -> pd.DataFrame:
    """Read a CSV whose header must contain `columns`; every cell is kept as a string"""
    path = Path(path)
    if not path.is_file():
        raise IoFailure(f"file not found: {path}")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skip_blank_lines=False)
    except pd.errors.EmptyDataError:
        raise ParseError("empty file, expected a header row", line=1, path=str(path))
    except (pd.errors.ParserError, UnicodeDecodeError) as e:
        raise ParseError(f"malformed CSV: {e}", path=str(path))
    except OSError as e:
        raise IoFailure(f"cannot read {path}: {e}") from e

    frame = frame.fillna("")
    frame.columns = [str(c).strip() for c in frame.columns]
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise ParseError(f"missing column(s) {', '.join(missing)}; expected header "
                         f"'{','.join(columns)}'", line=1, path=str(path))
    return frame


def iter_rows(frame: pd.DataFrame) -> Iterable[tuple]:
    """(line_number, row) pairs, skipping rows that are entirely blank"""
    for index, row in enumerate(frame.itertuples(index=False)):
        if all(str(value).strip() == "" for value in row):
            continue
        yield index + FIRST_DATA_LINE, row


def write_table(rows: List[Mapping[str, object]], columns: Sequence[str],
                path: Union[str, Path]) -> Path:
    """Write rows with a fixed header and '\\n' line endings"""
    path = Path(path)
    frame = pd.DataFrame(list(rows), columns=list(columns))
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, lineterminator="\n")
    except OSError as e:
        raise IoFailure(f"cannot write {path}: {e}") from e
    return path


def format_float(value: float) -> str:
    """Shortest round-trip text of a float"""
    return repr(float(value))
