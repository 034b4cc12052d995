# Batch Morphing
# Morphs every pair of a pair list, in parallel, and records one manifest row per pair

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

from common.config import DEFAULT_JOBS
from common.errors import ConfigError, FaceMorphError, ParseError
from common.tables import format_float, iter_rows, read_table, write_table
from imaging.image_io import read_image, write_image
from morphing.landmarks import AUTO_SCHEME, load_landmarks
from morphing.morph_engine import MorphSpec, MorphStyle, morph

logger = logging.getLogger(__name__)

PAIR_LIST_COLUMNS = ["id_a", "image_a", "landmarks_a", "id_b", "image_b", "landmarks_b"]
MANIFEST_COLUMNS = ["output", "id_a", "id_b", "alpha", "status", "message"]
MANIFEST_NAME = "morph_manifest.csv"

STATUS_OK = "ok"
STATUS_ERROR = "error"


@dataclass(frozen=True)
class PairEntry:
    """One row of a pair list, with paths already resolved"""
    id_a: str
    image_a: Path
    landmarks_a: Path
    id_b: str
    image_b: Path
    landmarks_b: Path


@dataclass(frozen=True)
class ManifestRow:
    output: str
    id_a: str
    id_b: str
    alpha: str
    status: str
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status == STATUS_OK

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in MANIFEST_COLUMNS}


def format_alpha(alpha: float) -> str:
    """Alpha as it appears in output names and manifests, e.g. 0.5"""
    return format_float(alpha)


def output_name(id_a: str, id_b: str, alpha: float) -> str:
    return f"{id_a}_{id_b}_{format_alpha(alpha)}.png"


def load_pair_list(path: Union[str, Path]) -> List[PairEntry]:
    """Read a pair list; relative paths resolve against the list's directory"""
    path = Path(path)
    frame = read_table(path, PAIR_LIST_COLUMNS)
    base = path.parent
    entries = []
    for line, row in iter_rows(frame):
        values = {name: str(getattr(row, name)).strip() for name in PAIR_LIST_COLUMNS}
        empty = [name for name, value in values.items() if not value]
        if empty:
            raise ParseError(f"empty field(s): {', '.join(empty)}", line=line, path=str(path))
        entries.append(PairEntry(
            id_a=values["id_a"],
            image_a=base / values["image_a"],
            landmarks_a=base / values["landmarks_a"],
            id_b=values["id_b"],
            image_b=base / values["image_b"],
            landmarks_b=base / values["landmarks_b"],
        ))
    return entries


def morph_entry(entry: PairEntry, alpha: float, out_dir: Path, scheme: str = AUTO_SCHEME,
                style: MorphStyle = MorphStyle.OPENCV) -> Path:
    """Load, morph and write one pair; returns the written image path"""
    image_a = read_image(entry.image_a)
    image_b = read_image(entry.image_b)
    landmarks_a = load_landmarks(entry.landmarks_a, scheme, image_a.size, entry.image_a)
    landmarks_b = load_landmarks(entry.landmarks_b, scheme, image_b.size, entry.image_b)
    spec = MorphSpec(image_a, landmarks_a, image_b, landmarks_b, alpha)
    return write_image(morph(spec, style), out_dir / output_name(entry.id_a, entry.id_b, alpha))


def write_batch_manifest(rows: Sequence[ManifestRow], path: Union[str, Path]) -> Path:
    return write_table([row.as_dict() for row in rows], MANIFEST_COLUMNS, path)


def load_batch_manifest(path: Union[str, Path]) -> List[ManifestRow]:
    frame = read_table(path, MANIFEST_COLUMNS)
    return [ManifestRow(**{name: str(getattr(row, name)).strip() for name in MANIFEST_COLUMNS})
            for _, row in iter_rows(frame)]


def batch_morph(pairs: Sequence[PairEntry], alpha: float, out_dir: Union[str, Path],
                jobs: int = DEFAULT_JOBS, scheme: str = AUTO_SCHEME,
                style: MorphStyle = MorphStyle.OPENCV,
                manifest_path: Optional[Union[str, Path]] = None) -> List[ManifestRow]:
    """Morph every pair into out_dir and write the batch manifest.

    A pair that fails with a data error becomes an "error" manifest row; the
    rest of the batch still runs. Rows keep the pair-list order for any `jobs`.
    """
    if jobs < 1:
        raise ConfigError(f"jobs must be >= 1, got {jobs}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    alpha_text = format_alpha(alpha)
    seen: Dict[str, int] = {}
    for index, entry in enumerate(pairs):
        name = output_name(entry.id_a, entry.id_b, alpha)
        if name in seen:
            raise ParseError(f"pairs {seen[name] + 1} and {index + 1} both write {name}")
        seen[name] = index

    def run(entry: PairEntry) -> ManifestRow:
        name = output_name(entry.id_a, entry.id_b, alpha)
        try:
            morph_entry(entry, alpha, out_dir, scheme, style)
        except FaceMorphError as e:
            logger.warning("Morph %s failed: %s", name, e)
            return ManifestRow(name, entry.id_a, entry.id_b, alpha_text, STATUS_ERROR, str(e))
        return ManifestRow(name, entry.id_a, entry.id_b, alpha_text, STATUS_OK)

    with ThreadPoolExecutor(max_workers=jobs) as pool:
        rows = list(pool.map(run, pairs))

    manifest_path = Path(manifest_path) if manifest_path else out_dir / MANIFEST_NAME
    write_batch_manifest(rows, manifest_path)
    failed = sum(1 for row in rows if not row.ok)
    logger.info("Batch morph: %d ok, %d failed, manifest %s", len(rows) - failed, failed, manifest_path)
    return rows
