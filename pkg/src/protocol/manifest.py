# Dataset Manifest
# One row per bona fide image with the subject attributes used for pairing

import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Sequence, Union

from common.errors import DuplicateImageId, IoFailure, ParseError
from common.tables import iter_rows, read_table, write_table

logger = logging.getLogger(__name__)

MANIFEST_COLUMNS = ["subject_id", "image_id", "gender", "ethnicity", "glasses",
                    "image_path", "landmarks_path"]

GLASSES_VALUES = {"0": False, "1": True, "false": False, "true": True}


@dataclass(frozen=True)
class SubjectRecord:
    """One bona fide image and its subject's attributes"""
    subject_id: str
    image_id: str
    gender: str
    ethnicity: str
    glasses: bool
    image_path: Path
    landmarks_path: Path


def normalize_label(value: str) -> str:
    return value.strip().lower()


def parse_glasses(value: str) -> bool:
    try:
        return GLASSES_VALUES[value.strip().lower()]
    except KeyError:
        raise ValueError(f"glasses must be one of 0, 1, true, false; got '{value}'")


def load_manifest(path: Union[str, Path], validate_paths: bool = False) -> List[SubjectRecord]:
    """Parse a dataset manifest.

    Gender and ethnicity are normalized to lower case. Relative image and
    landmark paths resolve against the manifest's directory.
    """
    path = Path(path)
    frame = read_table(path, MANIFEST_COLUMNS)
    base = path.parent
    records: List[SubjectRecord] = []
    seen: Dict[str, int] = {}

    for line, row in iter_rows(frame):
        values = {name: str(getattr(row, name)).strip() for name in MANIFEST_COLUMNS}
        for required in ("subject_id", "image_id"):
            if not values[required]:
                raise ParseError(f"empty {required}", line=line, path=str(path))
        try:
            glasses = parse_glasses(values["glasses"])
        except ValueError as e:
            raise ParseError(str(e), line=line, path=str(path))

        image_id = values["image_id"]
        if image_id in seen:
            raise DuplicateImageId(image_id, line)
        seen[image_id] = line

        record = SubjectRecord(
            subject_id=values["subject_id"],
            image_id=image_id,
            gender=normalize_label(values["gender"]),
            ethnicity=normalize_label(values["ethnicity"]),
            glasses=glasses,
            image_path=base / values["image_path"],
            landmarks_path=base / values["landmarks_path"],
        )
        if validate_paths:
            for attr in ("image_path", "landmarks_path"):
                if not getattr(record, attr).is_file():
                    raise IoFailure(f"line {line}: {attr} not found: {getattr(record, attr)}")
        records.append(record)

    logger.debug("Loaded %d manifest records from %s", len(records), path)
    return records


def write_manifest(records: Sequence[SubjectRecord], path: Union[str, Path]) -> Path:
    """Write records with paths relative to the manifest's directory"""
    path = Path(path)
    base = path.parent
    rows = [{
        "subject_id": r.subject_id,
        "image_id": r.image_id,
        "gender": r.gender,
        "ethnicity": r.ethnicity,
        "glasses": "1" if r.glasses else "0",
        "image_path": Path(os.path.relpath(r.image_path, base)).as_posix(),
        "landmarks_path": Path(os.path.relpath(r.landmarks_path, base)).as_posix(),
    } for r in records]
    return write_table(rows, MANIFEST_COLUMNS, path)


def index_by_image(records: Sequence[SubjectRecord]) -> Dict[str, SubjectRecord]:
    return {r.image_id: r for r in records}
