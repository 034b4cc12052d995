# Evaluation Scenarios
# Comparison protocol for bona fide and morph-attack scenarios, and score-set assembly

import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

from common.config import DEFAULT_ALPHA
from common.errors import ConfigError, InconsistentLabels, ParseError, UnknownImageId
from evaluation.metrics import EvalReport, ScenarioConfig, ScenarioMode, ScoreSet, evaluate
from evaluation.scoring import (Comparison, ComparisonLabel, Embedding, ScoreRow, build_references,
                                score_comparisons)
from morphing.batch import load_batch_manifest
from protocol.manifest import SubjectRecord, index_by_image
from protocol.pairing import images_by_subject

logger = logging.getLogger(__name__)


class ImpostorScope(Enum):
    """Which foreign references a bona fide probe is compared against"""
    ALL = "all"
    SAME_DEMOGRAPHIC = "same_demographic"


@dataclass(frozen=True)
class MorphRecord:
    """A generated morph and the subjects that contributed to it"""
    morph_id: str
    contributors: Tuple[str, ...]
    source_images: Tuple[str, ...] = ()
    alpha: float = DEFAULT_ALPHA


@dataclass(frozen=True)
class ComparisonProtocol:
    enroll_per_subject: int = 1
    impostor_scope: ImpostorScope = ImpostorScope.ALL

    def __post_init__(self):
        if self.enroll_per_subject < 1:
            raise ConfigError(f"enroll_per_subject must be >= 1, got {self.enroll_per_subject}")


@dataclass
class ComparisonPlan:
    """Enrollment (reference id -> image ids) and the comparisons to score"""
    enrollment: Dict[str, Tuple[str, ...]] = field(default_factory=dict)
    comparisons: List[Comparison] = field(default_factory=list)


@dataclass(frozen=True)
class ScenarioCounts:
    n_bf_references: int = 0
    n_bf_probes: int = 0
    n_genuine: int = 0
    n_impostor: int = 0
    n_morphs: int = 0
    n_morph_comparisons: int = 0


def _parse_alpha(text: str, line: int, path) -> float:
    try:
        alpha = float(text)
    except ValueError:
        raise ParseError(f"alpha is not a number: '{text}'", line=line, path=str(path))
    if not 0.0 <= alpha <= 1.0:
        raise ParseError(f"alpha outside [0, 1]: {alpha}", line=line, path=str(path))
    return alpha


def load_morph_records(path: Union[str, Path], records: Sequence[SubjectRecord]) -> List[MorphRecord]:
    """Successful morphs of a batch manifest; the morph id is the output file stem"""
    by_image = index_by_image(records)
    morphs = []
    unknown: List[Tuple[int, str]] = []
    for line, row in enumerate(load_batch_manifest(path), start=2):
        if not row.ok:
            continue
        missing = [i for i in (row.id_a, row.id_b) if i not in by_image]
        if missing:
            unknown.extend((line, i) for i in missing)
            continue
        morphs.append(MorphRecord(
            morph_id=Path(row.output).stem,
            contributors=(by_image[row.id_a].subject_id, by_image[row.id_b].subject_id),
            source_images=(row.id_a, row.id_b),
            alpha=_parse_alpha(row.alpha, line, path),
        ))
    if unknown:
        raise UnknownImageId(unknown)
    return morphs


def build_comparisons(records: Sequence[SubjectRecord], morphs: Sequence[MorphRecord],
                      modes: Sequence[ScenarioMode],
                      protocol: ComparisonProtocol = ComparisonProtocol()) -> ComparisonPlan:
    """Enrollment and comparison list for the bona fide scenario plus the requested morph modes.

    Each subject is enrolled from its first enroll_per_subject images (by
    image_id); its other images are bona fide probes.
    """
    grouped = images_by_subject(records)
    plan = ComparisonPlan()
    probes: Dict[str, List[str]] = {}
    for subject, images in grouped.items():
        plan.enrollment[subject] = tuple(r.image_id for r in images[:protocol.enroll_per_subject])
        probes[subject] = [r.image_id for r in images[protocol.enroll_per_subject:]]

    clashes = sorted({m.morph_id for m in morphs} & (set(grouped) | set(index_by_image(records))))
    if clashes:
        raise InconsistentLabels(f"morph ids collide with subject or image ids: {', '.join(clashes)}")

    demographic = {subject: (images[0].gender, images[0].ethnicity)
                   for subject, images in grouped.items()}
    for subject in grouped:
        for probe_id in probes[subject]:
            plan.comparisons.append(Comparison(ComparisonLabel.GENUINE, subject, probe_id))
            for other in grouped:
                if other == subject:
                    continue
                if (protocol.impostor_scope is ImpostorScope.SAME_DEMOGRAPHIC
                        and demographic[other] != demographic[subject]):
                    continue
                plan.comparisons.append(Comparison(ComparisonLabel.IMPOSTOR, other, probe_id))

    for morph in sorted(morphs, key=lambda m: m.morph_id):
        unknown = [s for s in morph.contributors if s not in grouped]
        if unknown:
            raise InconsistentLabels(f"morph '{morph.morph_id}' names unknown subject(s) {unknown}")
        if ScenarioMode.MORPHS_AS_REFERENCES in modes:
            plan.enrollment[morph.morph_id] = (morph.morph_id,)
            for subject in morph.contributors:
                for probe_id in probes[subject]:
                    plan.comparisons.append(Comparison(ComparisonLabel.MORPH, morph.morph_id, probe_id,
                                                       morph.morph_id, subject))
        if ScenarioMode.MORPHS_AS_PROBES in modes:
            for subject in morph.contributors:
                plan.comparisons.append(Comparison(ComparisonLabel.MORPH, subject, morph.morph_id,
                                                   morph.morph_id, subject))

    logger.info("Planned %d comparisons over %d references", len(plan.comparisons), len(plan.enrollment))
    return plan


def _row_mode(row: ScoreRow) -> Union[ScenarioMode, None]:
    if row.reference_id == row.morph_id and row.probe_id != row.morph_id:
        return ScenarioMode.MORPHS_AS_REFERENCES
    if row.probe_id == row.morph_id and row.reference_id != row.morph_id:
        return ScenarioMode.MORPHS_AS_PROBES
    return None


def assemble_scenario(rows: Sequence[ScoreRow], mode: ScenarioMode) -> Tuple[ScoreSet, ScenarioCounts]:
    """Split labeled score rows into the score set of one scenario.

    Genuine and impostor scores come from bona fide rows only. Morph rows of
    the other mode are skipped; morph rows that fit neither mode are an error.
    """
    genuine: List[float] = []
    impostor: List[float] = []
    attacks: List[Tuple[str, str, float]] = []
    labels: Dict[Tuple[str, str], ComparisonLabel] = {}
    references, probes, morph_ids = set(), set(), set()
    skipped = 0

    for index, row in enumerate(rows):
        if row.label is ComparisonLabel.MORPH:
            if not row.morph_id or not row.contrib_subject:
                raise InconsistentLabels(f"row {index}: morph row without morph_id/contrib_subject")
            row_mode = _row_mode(row)
            if row_mode is None:
                raise InconsistentLabels(f"row {index}: morph '{row.morph_id}' is neither the "
                                         f"reference nor the probe")
            if row_mode is not mode:
                skipped += 1
                continue
            attacks.append((row.morph_id, row.contrib_subject, row.score))
            morph_ids.add(row.morph_id)
            continue

        if row.morph_id or row.contrib_subject:
            raise InconsistentLabels(f"row {index}: {row.label.value} row carries morph fields")
        key = (row.reference_id, row.probe_id)
        previous = labels.setdefault(key, row.label)
        if previous is not row.label:
            raise InconsistentLabels(f"comparison {key} labeled both {previous.value} "
                                     f"and {row.label.value}")
        (genuine if row.label is ComparisonLabel.GENUINE else impostor).append(row.score)
        references.add(row.reference_id)
        probes.add(row.probe_id)

    if skipped:
        logger.warning("Skipped %d morph rows belonging to the other scenario", skipped)

    counts = ScenarioCounts(
        n_bf_references=len(references),
        n_bf_probes=len(probes),
        n_genuine=len(genuine),
        n_impostor=len(impostor),
        n_morphs=len(morph_ids),
        n_morph_comparisons=len(attacks),
    )
    return ScoreSet(tuple(genuine), tuple(impostor), tuple(attacks)), counts


def score_protocol(records: Sequence[SubjectRecord], morphs: Sequence[MorphRecord],
                   embeddings: Sequence[Embedding], modes: Sequence[ScenarioMode],
                   protocol: ComparisonProtocol = ComparisonProtocol()) -> List[ScoreRow]:
    """Enroll references, then score every planned comparison"""
    plan = build_comparisons(records, morphs, modes, protocol)
    by_image = {e.image_id: e for e in embeddings}
    references = build_references(plan.enrollment, by_image)
    return score_comparisons(references, by_image, plan.comparisons)


def evaluate_scenarios(rows: Sequence[ScoreRow], configs: Sequence[ScenarioConfig]
                       ) -> List[Tuple[EvalReport, ScenarioCounts]]:
    """Assemble and evaluate one scenario per config"""
    results = []
    for config in configs:
        score_set, counts = assemble_scenario(rows, config.mode)
        results.append((evaluate(score_set, config), counts))
    return results
