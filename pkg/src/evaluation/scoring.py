# Comparison Scoring
# Embedding files, averaged reference models and cosine-similarity scores

import csv
import logging
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Union

import numpy as np

from common.errors import (DimensionMismatch, EmptySet, IoFailure, ParseError, UnknownId,
                           ZeroVector)
from common.tables import format_float, iter_rows, read_table, write_table

logger = logging.getLogger(__name__)

SCORE_COLUMNS = ["label", "reference_id", "probe_id", "morph_id", "contrib_subject", "score"]
EMBEDDING_HEADER_FIELD = "image_id"


@dataclass(frozen=True, eq=False)
class Embedding:
    """Feature vector of one image from one face recognition model"""
    image_id: str
    vector: np.ndarray
    model_tag: str

    @property
    def dimension(self) -> int:
        return int(self.vector.size)


@dataclass(frozen=True, eq=False)
class ReferenceModel:
    """Enrolled identity: mean of its enrollment embeddings"""
    identity_id: str
    mean_vector: np.ndarray
    n_images: int


def load_embeddings(path: Union[str, Path], model_tag: Optional[str] = None) -> List[Embedding]:
    """Read rows 'image_id,model_tag,v0,...,vD-1'.

    A header row starting with 'image_id' is skipped. The dimension must be
    constant per model_tag. With `model_tag`, rows of other models are dropped.
    """
    path = Path(path)
    embeddings: List[Embedding] = []
    dimensions: Dict[str, int] = {}
    seen = set()
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            for lineno, row in enumerate(csv.reader(handle), start=1):
                if not row or all(not cell.strip() for cell in row):
                    continue
                if lineno == 1 and row[0].strip() == EMBEDDING_HEADER_FIELD:
                    continue
                if len(row) < 3:
                    raise ParseError("expected 'image_id,model_tag,v0,...'", line=lineno, path=str(path))
                image_id, tag = row[0].strip(), row[1].strip()
                if not image_id or not tag:
                    raise ParseError("empty image_id or model_tag", line=lineno, path=str(path))
                try:
                    vector = np.array([float(cell) for cell in row[2:]], dtype=np.float64)
                except ValueError:
                    raise ParseError("non-numeric embedding entry", line=lineno, path=str(path))
                if not np.all(np.isfinite(vector)):
                    raise ParseError("non-finite embedding entry", line=lineno, path=str(path))

                expected = dimensions.setdefault(tag, vector.size)
                if vector.size != expected:
                    raise DimensionMismatch(f"{path}:{lineno}: model '{tag}' has dimension "
                                            f"{expected}, row has {vector.size}")
                if not np.any(vector):
                    raise ZeroVector(f"{path}:{lineno}: embedding of '{image_id}' is all zeros")
                if (image_id, tag) in seen:
                    raise ParseError(f"duplicate embedding for '{image_id}' ({tag})",
                                     line=lineno, path=str(path))
                seen.add((image_id, tag))
                if model_tag is None or tag == model_tag:
                    vector.setflags(write=False)
                    embeddings.append(Embedding(image_id, vector, tag))
    except OSError as e:
        raise IoFailure(f"cannot read {path}: {e}") from e
    return embeddings


def write_embeddings(embeddings: Sequence[Embedding], path: Union[str, Path]) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            for e in embeddings:
                writer.writerow([e.image_id, e.model_tag] + [format_float(v) for v in e.vector])
    except OSError as e:
        raise IoFailure(f"cannot write {path}: {e}") from e
    return path


def build_reference(identity_id: str, embeddings: Sequence[Embedding]) -> ReferenceModel:
    """Componentwise mean of the enrollment embeddings"""
    if not embeddings:
        raise EmptySet(f"no embeddings to enroll '{identity_id}'")
    sizes = {e.dimension for e in embeddings}
    if len(sizes) != 1:
        raise DimensionMismatch(f"enrollment of '{identity_id}' mixes dimensions {sorted(sizes)}")
    mean = np.mean(np.stack([e.vector for e in embeddings]), axis=0)
    mean.setflags(write=False)
    return ReferenceModel(identity_id, mean, len(embeddings))


def build_references(enrollment: Mapping[str, Sequence[str]],
                     embeddings: Mapping[str, Embedding]) -> Dict[str, ReferenceModel]:
    """Reference id -> model averaged from the listed image ids"""
    missing = sorted({image_id for images in enrollment.values() for image_id in images
                      if image_id not in embeddings})
    if missing:
        raise UnknownId(f"no embedding for enrollment image(s): {', '.join(missing[:10])}"
                        + (" ..." if len(missing) > 10 else ""))
    return {reference_id: build_reference(reference_id, [embeddings[i] for i in images])
            for reference_id, images in enrollment.items()}


def cosine_score(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity dot(u, v) / (|u| |v|), clipped to [-1, 1]"""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DimensionMismatch(f"cannot compare vectors of shape {u.shape} and {v.shape}")
    norm_u, norm_v = np.linalg.norm(u), np.linalg.norm(v)
    if norm_u == 0.0 or norm_v == 0.0:
        raise ZeroVector("cosine score of a zero vector")
    return float(np.clip(np.dot(u, v) / (norm_u * norm_v), -1.0, 1.0))


class ComparisonLabel(Enum):
    GENUINE = "genuine"
    IMPOSTOR = "impostor"
    MORPH = "morph"


@dataclass(frozen=True)
class Comparison:
    """Reference vs probe; morph comparisons also name the morph and the contributing subject"""
    label: ComparisonLabel
    reference_id: str
    probe_id: str
    morph_id: str = ""
    contrib_subject: str = ""


@dataclass(frozen=True)
class ScoreRow:
    label: ComparisonLabel
    reference_id: str
    probe_id: str
    morph_id: str
    contrib_subject: str
    score: float

    @classmethod
    def scored(cls, comparison: Comparison, score: float) -> "ScoreRow":
        return cls(comparison.label, comparison.reference_id, comparison.probe_id,
                   comparison.morph_id, comparison.contrib_subject, score)


def score_comparisons(references: Mapping[str, ReferenceModel], probes: Mapping[str, Embedding],
                      comparisons: Sequence[Comparison]) -> List[ScoreRow]:
    """One cosine score per comparison, in comparison order"""
    unknown = sorted({c.reference_id for c in comparisons if c.reference_id not in references}
                     | {c.probe_id for c in comparisons if c.probe_id not in probes})
    if unknown:
        raise UnknownId(f"comparisons reference unknown id(s): {', '.join(unknown[:10])}"
                        + (" ..." if len(unknown) > 10 else ""))
    rows = [ScoreRow.scored(c, cosine_score(references[c.reference_id].mean_vector,
                                            probes[c.probe_id].vector))
            for c in comparisons]
    logger.info("Scored %d comparisons", len(rows))
    return rows


def write_scores(rows: Sequence[ScoreRow], path: Union[str, Path]) -> Path:
    return write_table([{
        "label": r.label.value,
        "reference_id": r.reference_id,
        "probe_id": r.probe_id,
        "morph_id": r.morph_id,
        "contrib_subject": r.contrib_subject,
        "score": format_float(r.score),
    } for r in rows], SCORE_COLUMNS, path)


def load_scores(path: Union[str, Path]) -> List[ScoreRow]:
    path = Path(path)
    frame = read_table(path, SCORE_COLUMNS)
    rows = []
    for line, row in iter_rows(frame):
        try:
            label = ComparisonLabel(str(row.label).strip().lower())
        except ValueError:
            raise ParseError(f"unknown label '{row.label}'", line=line, path=str(path))
        try:
            score = float(row.score)
        except ValueError:
            raise ParseError(f"score is not a number: '{row.score}'", line=line, path=str(path))
        if not math.isfinite(score):
            raise ParseError(f"non-finite score '{row.score}'", line=line, path=str(path))
        rows.append(ScoreRow(label, str(row.reference_id).strip(), str(row.probe_id).strip(),
                             str(row.morph_id).strip(), str(row.contrib_subject).strip(), score))
    return rows
