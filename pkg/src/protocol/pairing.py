# Morph Pairing
# Selects bona fide pairs to morph under gender, ethnicity and glasses constraints

import itertools
import logging
import os
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

from common.errors import ParseError, UnknownImageId
from common.tables import iter_rows, read_table, write_table
from morphing.batch import PAIR_LIST_COLUMNS
from protocol.manifest import SubjectRecord, index_by_image

logger = logging.getLogger(__name__)

PROTOCOL_COLUMNS = ["image_id_a", "image_id_b"]

SAME_GENDER = "same_gender"
SAME_ETHNICITY = "same_ethnicity"
BOTH_GLASSES = "both_glasses"


@dataclass(frozen=True)
class PairingConstraints:
    """Rules a morph pair must satisfy; the defaults are the standard protocol"""
    same_gender: bool = True
    same_ethnicity: bool = True
    forbid_both_glasses: bool = True
    all_image_combinations: bool = False


@dataclass(frozen=True)
class MorphPair:
    """Unordered pair of images of two different subjects, stored with record_a first"""
    record_a: SubjectRecord
    record_b: SubjectRecord

    def __post_init__(self):
        a, b = self.record_a, self.record_b
        if a.subject_id == b.subject_id:
            raise ValueError(f"cannot pair subject '{a.subject_id}' with itself")
        if (b.subject_id, b.image_id) < (a.subject_id, a.image_id):
            object.__setattr__(self, "record_a", b)
            object.__setattr__(self, "record_b", a)

    @property
    def key(self) -> Tuple[str, str, str, str]:
        return (self.record_a.subject_id, self.record_a.image_id,
                self.record_b.subject_id, self.record_b.image_id)


def violates(pair: MorphPair, constraints: PairingConstraints = PairingConstraints()) -> List[str]:
    """Names of the constraints the pair breaks (empty when it is allowed)"""
    a, b = pair.record_a, pair.record_b
    broken = []
    if constraints.same_gender and a.gender != b.gender:
        broken.append(SAME_GENDER)
    if constraints.same_ethnicity and a.ethnicity != b.ethnicity:
        broken.append(SAME_ETHNICITY)
    if constraints.forbid_both_glasses and a.glasses and b.glasses:
        broken.append(BOTH_GLASSES)
    return broken


def images_by_subject(records: Sequence[SubjectRecord]) -> Dict[str, List[SubjectRecord]]:
    """Subject id -> records sorted by image_id"""
    grouped: Dict[str, List[SubjectRecord]] = defaultdict(list)
    for record in records:
        grouped[record.subject_id].append(record)
    return {subject: sorted(images, key=lambda r: r.image_id)
            for subject, images in sorted(grouped.items())}


def generate_pairs(records: Sequence[SubjectRecord],
                   constraints: PairingConstraints = PairingConstraints()) -> List[MorphPair]:
    """All cross-subject pairs allowed by the constraints, sorted.

    By default each subject contributes its first image (smallest image_id);
    with all_image_combinations every image pair of two subjects is considered.
    """
    grouped = images_by_subject(records)
    if not constraints.all_image_combinations:
        grouped = {subject: images[:1] for subject, images in grouped.items()}

    pairs = []
    for subject_a, subject_b in itertools.combinations(sorted(grouped), 2):
        for record_a, record_b in itertools.product(grouped[subject_a], grouped[subject_b]):
            pair = MorphPair(record_a, record_b)
            if not violates(pair, constraints):
                pairs.append(pair)

    pairs.sort(key=lambda p: p.key)
    logger.info("Generated %d morph pairs from %d subjects", len(pairs), len(grouped))
    return pairs


def import_external_protocol(path: Union[str, Path],
                             records: Sequence[SubjectRecord]) -> List[MorphPair]:
    """Pairs listed in a protocol CSV 'image_id_a,image_id_b', in file order"""
    path = Path(path)
    frame = read_table(path, PROTOCOL_COLUMNS)
    by_image = index_by_image(records)

    unknown: List[Tuple[int, str]] = []
    pairs = []
    for line, row in iter_rows(frame):
        ids = (str(row.image_id_a).strip(), str(row.image_id_b).strip())
        missing = [image_id for image_id in ids if image_id not in by_image]
        if missing:
            unknown.extend((line, image_id) for image_id in missing)
            continue
        try:
            pairs.append(MorphPair(by_image[ids[0]], by_image[ids[1]]))
        except ValueError as e:
            raise ParseError(str(e), line=line, path=str(path))

    if unknown:
        raise UnknownImageId(unknown)
    logger.info("Imported %d morph pairs from %s", len(pairs), path)
    return pairs


def _relative(target: Path, base: Path) -> str:
    return Path(os.path.relpath(target, base)).as_posix()


def write_pairs(pairs: Sequence[MorphPair], path: Union[str, Path]) -> Path:
    """Write the pair list consumed by batch morphing"""
    path = Path(path)
    base = path.parent
    rows = [{
        "id_a": pair.record_a.image_id,
        "image_a": _relative(pair.record_a.image_path, base),
        "landmarks_a": _relative(pair.record_a.landmarks_path, base),
        "id_b": pair.record_b.image_id,
        "image_b": _relative(pair.record_b.image_path, base),
        "landmarks_b": _relative(pair.record_b.landmarks_path, base),
    } for pair in pairs]
    return write_table(rows, PAIR_LIST_COLUMNS, path)
