# Synthetic Demo Dataset
# Face-like images with exact landmarks, a manifest, synthetic embeddings and the full pipeline run

import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import cv2
import numpy as np

from common.config import DEFAULT_ALPHA, DEFAULT_JOBS, DEFAULT_SEED, DEFAULT_TARGET_FMR
from evaluation.metrics import MmpmrRule, ScenarioConfig, ScenarioMode
from evaluation.report import ReportEntry, ReportFormat, write_report
from evaluation.scenario import (MorphRecord, ScenarioCounts, evaluate_scenarios,
                                 load_morph_records, score_protocol)
from evaluation.scoring import Embedding, write_embeddings, write_scores
from geometry.mesh import Point2
from imaging.image_io import write_image
from imaging.raster import Raster
from morphing.batch import MANIFEST_NAME, batch_morph, load_pair_list
from morphing.landmarks import save_landmarks
from protocol.manifest import SubjectRecord, load_manifest, write_manifest
from protocol.pairing import generate_pairs, write_pairs

logger = logging.getLogger(__name__)

IMAGE_SIZE = 96
EMBEDDING_DIM = 128
MODEL_TAG = "synthetic"
GENDERS = ("female", "male")
ETHNICITIES = ("group-a", "group-b")

# Landmarks traced along the face outline
OUTLINE_POINTS = 12
# Per-image noise relative to the unit identity vector
IMAGE_NOISE = 0.45
MORPH_NOISE = 0.25


@dataclass(frozen=True)
class FaceParams:
    """Geometry and colors of one drawn face (pixel units, RGB colors)"""
    center: Tuple[float, float] = (48.0, 50.0)
    face_axes: Tuple[float, float] = (30.0, 38.0)
    eye_spacing: float = 12.0
    eye_height: float = -8.0
    eye_axes: Tuple[float, float] = (6.0, 3.0)
    nose_length: float = 12.0
    mouth_height: float = 18.0
    mouth_half_width: float = 10.0
    skin: Tuple[int, int, int] = (224, 180, 150)
    iris: Tuple[int, int, int] = (70, 50, 30)
    hair: Tuple[int, int, int] = (60, 40, 25)
    background: Tuple[int, int, int] = (200, 210, 225)
    glasses: bool = False


def face_landmarks(params: FaceParams) -> List[Point2]:
    """The points render_face draws its features around, in a fixed order"""
    cx, cy = params.center
    ax, ay = params.face_axes
    points = [Point2(cx + ax * math.cos(2 * math.pi * k / OUTLINE_POINTS),
                     cy + ay * math.sin(2 * math.pi * k / OUTLINE_POINTS))
              for k in range(OUTLINE_POINTS)]

    ex, ey = params.eye_axes
    for side in (-1, 1):
        x, y = cx + side * params.eye_spacing, cy + params.eye_height
        points += [Point2(x - ex, y), Point2(x + ex, y), Point2(x, y - ey), Point2(x, y + ey)]

    points += [Point2(cx, cy + params.eye_height + 2.0), Point2(cx, cy + params.eye_height + params.nose_length)]

    my, mw = cy + params.mouth_height, params.mouth_half_width
    points += [Point2(cx - mw, my), Point2(cx + mw, my), Point2(cx, my - 2.5), Point2(cx, my + 3.5)]
    return points


def _ipt(x: float, y: float) -> Tuple[int, int]:
    return (int(round(x)), int(round(y)))


def render_face(params: FaceParams, width: int = IMAGE_SIZE,
                height: int = IMAGE_SIZE) -> Tuple[Raster, List[Point2]]:
    """Draw a face with OpenCV primitives; returns the image and its landmarks"""
    img = np.zeros((height, width, 3), dtype=np.uint8)
    img[:] = params.background
    cx, cy = params.center
    ax, ay = params.face_axes

    # Hair, then face
    cv2.ellipse(img, _ipt(cx, cy - 6), _ipt(ax + 4, ay + 2), 0, 180, 360, params.hair, -1)
    cv2.ellipse(img, _ipt(cx, cy), _ipt(ax, ay), 0, 0, 360, params.skin, -1)

    ex, ey = params.eye_axes
    for side in (-1, 1):
        eye = _ipt(cx + side * params.eye_spacing, cy + params.eye_height)
        cv2.ellipse(img, eye, _ipt(ex, ey), 0, 0, 360, (250, 250, 250), -1)
        cv2.circle(img, eye, max(int(ey), 1), params.iris, -1)
        brow = _ipt(cx + side * params.eye_spacing, cy + params.eye_height - ey - 3)
        cv2.ellipse(img, brow, _ipt(ex + 1, 2), 0, 180, 360, params.hair, 2)
        if params.glasses:
            cv2.circle(img, eye, int(ex + 3), (30, 30, 30), 1)

    if params.glasses:
        cv2.line(img, _ipt(cx - params.eye_spacing + ex + 3, cy + params.eye_height),
                 _ipt(cx + params.eye_spacing - ex - 3, cy + params.eye_height), (30, 30, 30), 1)

    nose = np.array([_ipt(cx, cy + params.eye_height + 2.0),
                     _ipt(cx - 3, cy + params.eye_height + params.nose_length),
                     _ipt(cx, cy + params.eye_height + params.nose_length)], dtype=np.int32)
    cv2.polylines(img, [nose], False, (170, 120, 100), 1)

    my, mw = cy + params.mouth_height, params.mouth_half_width
    cv2.ellipse(img, _ipt(cx, my), _ipt(mw, 3), 0, 0, 180, (170, 80, 80), -1)

    return Raster.from_array(img), face_landmarks(params)


def subject_attributes(index: int) -> Tuple[str, str, bool]:
    """Deterministic (gender, ethnicity, glasses) of subject `index`"""
    return GENDERS[index % 2], ETHNICITIES[(index // 2) % 2], index % 3 == 2


def _subject_params(rng: np.random.Generator, glasses: bool) -> FaceParams:
    return FaceParams(
        center=(48.0 + rng.uniform(-3, 3), 50.0 + rng.uniform(-3, 3)),
        face_axes=(rng.uniform(26, 32), rng.uniform(34, 40)),
        eye_spacing=rng.uniform(10, 14),
        eye_height=rng.uniform(-10, -6),
        eye_axes=(rng.uniform(5, 7), rng.uniform(2.5, 3.5)),
        nose_length=rng.uniform(10, 14),
        mouth_height=rng.uniform(16, 20),
        mouth_half_width=rng.uniform(8, 12),
        skin=tuple(int(v) for v in rng.integers(140, 240, size=3)),
        iris=tuple(int(v) for v in rng.integers(20, 120, size=3)),
        hair=tuple(int(v) for v in rng.integers(10, 120, size=3)),
        glasses=glasses,
    )


def _jitter(rng: np.random.Generator, params: FaceParams) -> FaceParams:
    cx, cy = params.center
    return replace(params,
                   center=(cx + rng.uniform(-2, 2), cy + rng.uniform(-2, 2)),
                   mouth_half_width=params.mouth_half_width + rng.uniform(-1.5, 1.5),
                   eye_height=params.eye_height + rng.uniform(-1, 1))


def build_dataset(out_dir: Union[str, Path], seed: int = DEFAULT_SEED, n_subjects: int = 8,
                  images_per_subject: int = 3) -> Path:
    """Render every subject's images and landmarks; returns the manifest path"""
    out_dir = Path(out_dir)
    rng = np.random.default_rng(seed)
    records = []
    for i in range(n_subjects):
        gender, ethnicity, glasses = subject_attributes(i)
        base = _subject_params(rng, glasses)
        subject_id = f"s{i:03d}"
        for j in range(images_per_subject):
            image_id = f"{subject_id}_{j:02d}"
            raster, points = render_face(_jitter(rng, base) if j else base)
            image_path = write_image(raster, out_dir / "images" / f"{image_id}.png")
            landmarks_path = save_landmarks(points, out_dir / "landmarks" / f"{image_id}.txt",
                                            comment=f"{len(points)} synthetic landmarks")
            records.append(SubjectRecord(subject_id, image_id, gender, ethnicity, glasses,
                                         image_path, landmarks_path))
    manifest = write_manifest(records, out_dir / "manifest.csv")
    logger.info("Synthetic dataset: %d subjects x %d images in %s", n_subjects, images_per_subject, out_dir)
    return manifest


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def synthesize_embeddings(records: Sequence[SubjectRecord], morphs: Sequence[MorphRecord],
                          seed: int = DEFAULT_SEED,
                          dim: int = EMBEDDING_DIM, model_tag: str = MODEL_TAG) -> List[Embedding]:
    """Identity vector plus noise per image; a morph mixes its contributors' identities"""
    rng = np.random.default_rng(seed)
    identities: Dict[str, np.ndarray] = {}
    for subject in sorted({r.subject_id for r in records}):
        identities[subject] = _unit(rng.normal(size=dim))

    embeddings = []
    for record in sorted(records, key=lambda r: r.image_id):
        noise = rng.normal(scale=IMAGE_NOISE / math.sqrt(dim), size=dim)
        embeddings.append(Embedding(record.image_id, identities[record.subject_id] + noise, model_tag))
    for morph in sorted(morphs, key=lambda m: m.morph_id):
        first, second = morph.contributors
        noise = rng.normal(scale=MORPH_NOISE / math.sqrt(dim), size=dim)
        mixed = morph.alpha * identities[first] + (1.0 - morph.alpha) * identities[second]
        embeddings.append(Embedding(morph.morph_id, mixed + noise, model_tag))
    return embeddings


@dataclass
class DemoSummary:
    out_dir: Path
    n_records: int = 0
    n_pairs: int = 0
    n_morphs: int = 0
    n_failed: int = 0
    entries: List[ReportEntry] = field(default_factory=list)
    counts: Dict[ScenarioMode, ScenarioCounts] = field(default_factory=dict)
    report_csv: Optional[Path] = None
    report_txt: Optional[Path] = None


def run_demo(out_dir: Union[str, Path], seed: int = DEFAULT_SEED, n_subjects: int = 8,
             images_per_subject: int = 3, jobs: int = DEFAULT_JOBS,
             alpha: float = DEFAULT_ALPHA, target_fmr: float = DEFAULT_TARGET_FMR,
             rule: MmpmrRule = MmpmrRule.MIN) -> DemoSummary:
    """Dataset, pairs, morphs, embeddings, scores, both scenarios and the report"""
    out_dir = Path(out_dir)
    summary = DemoSummary(out_dir=out_dir)

    records = load_manifest(build_dataset(out_dir, seed, n_subjects, images_per_subject))
    summary.n_records = len(records)

    pairs_path = write_pairs(generate_pairs(records), out_dir / "pairs.csv")
    pairs = load_pair_list(pairs_path)
    summary.n_pairs = len(pairs)

    rows = batch_morph(pairs, alpha, out_dir / "morphs", jobs=jobs)
    summary.n_failed = sum(1 for row in rows if not row.ok)
    morphs = load_morph_records(out_dir / "morphs" / MANIFEST_NAME, records)
    summary.n_morphs = len(morphs)

    embeddings = synthesize_embeddings(records, morphs, seed)
    write_embeddings(embeddings, out_dir / "embeddings.csv")

    modes = [ScenarioMode.MORPHS_AS_REFERENCES, ScenarioMode.MORPHS_AS_PROBES]
    scores = score_protocol(records, morphs, embeddings, modes)
    write_scores(scores, out_dir / "scores.csv")

    configs = [ScenarioConfig(mode, target_fmr, rule) for mode in modes]
    for report, counts in evaluate_scenarios(scores, configs):
        summary.entries.append(ReportEntry("opencv", MODEL_TAG, "demo", report))
        summary.counts[report.mode] = counts

    summary.report_csv = write_report(summary.entries, out_dir / "report.csv", ReportFormat.CSV)
    summary.report_txt = write_report(summary.entries, out_dir / "report.txt", ReportFormat.TEXT)
    return summary
