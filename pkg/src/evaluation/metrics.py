# Verification and Morphing-Attack Metrics
# FMR, FNMR, MMPMR, threshold selection at a target FMR and DET data
#
# Scores are cosine similarities; a comparison is accepted when score >= threshold.

import logging
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from common.config import DEFAULT_TARGET_FMR
from common.errors import ConfigError, EmptyScores

logger = logging.getLogger(__name__)

MorphScore = Tuple[str, str, float]


class ScenarioMode(Enum):
    """Role of the morphed images in the attack scenario"""
    MORPHS_AS_REFERENCES = "morphs_as_references"
    MORPHS_AS_PROBES = "morphs_as_probes"

    @classmethod
    def parse(cls, value: str) -> List["ScenarioMode"]:
        """One mode by name, or both for 'both'"""
        if value == "both":
            return [cls.MORPHS_AS_REFERENCES, cls.MORPHS_AS_PROBES]
        try:
            return [cls(value)]
        except ValueError:
            raise ConfigError(f"unknown mode '{value}'")


class MmpmrRule(Enum):
    """When a morph counts as accepted"""
    # every contributing subject is matched
    MIN = "min"
    # at least one contributing subject is matched
    ANY = "any"


@dataclass(frozen=True)
class ScoreSet:
    """Scores of one scenario, split by comparison category"""
    genuine: Tuple[float, ...] = ()
    impostor: Tuple[float, ...] = ()
    morph_attacks: Tuple[MorphScore, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "genuine", tuple(float(s) for s in self.genuine))
        object.__setattr__(self, "impostor", tuple(float(s) for s in self.impostor))
        object.__setattr__(self, "morph_attacks",
                           tuple((str(m), str(s), float(v)) for m, s, v in self.morph_attacks))
        values = self.genuine + self.impostor + tuple(v for _, _, v in self.morph_attacks)
        if not np.all(np.isfinite(values)):
            raise ValueError("score set contains non-finite scores")

    @property
    def n_morphs(self) -> int:
        return len({morph_id for morph_id, _, _ in self.morph_attacks})


@dataclass(frozen=True)
class ScenarioConfig:
    mode: ScenarioMode
    target_fmr: float = DEFAULT_TARGET_FMR
    mmpmr_rule: MmpmrRule = MmpmrRule.MIN

    def __post_init__(self):
        if not 0.0 < self.target_fmr < 1.0:
            raise ConfigError(f"target FMR must lie in (0, 1), got {self.target_fmr}")


@dataclass(frozen=True)
class EvalReport:
    """Operating point of one scenario"""
    threshold: float
    fmr_at_threshold: float
    fnmr_at_threshold: float
    # None when the score set holds no morph attacks
    mmpmr: Optional[float]
    n_genuine: int
    n_impostor: int
    n_morphs: int
    n_morph_comparisons: int
    mode: ScenarioMode
    rule: MmpmrRule
    target_fmr: float

    @property
    def mmpmr_text(self) -> str:
        return "-" if self.mmpmr is None else f"{self.mmpmr:.4f}"


def _scores(values: Iterable[float], what: str) -> np.ndarray:
    array = np.asarray(list(values), dtype=np.float64)
    if array.size == 0:
        raise EmptyScores(f"no {what} scores")
    return array


def fmr(impostor_scores: Sequence[float], threshold: float) -> float:
    """Fraction of impostor scores >= threshold"""
    scores = _scores(impostor_scores, "impostor")
    return np.count_nonzero(scores >= threshold) / scores.size


def fnmr(genuine_scores: Sequence[float], threshold: float) -> float:
    """Fraction of genuine scores < threshold"""
    scores = _scores(genuine_scores, "genuine")
    return np.count_nonzero(scores < threshold) / scores.size


def candidate_thresholds(scores: np.ndarray) -> np.ndarray:
    """Sorted distinct scores plus a sentinel just above the maximum"""
    distinct = np.unique(scores)
    return np.append(distinct, np.nextafter(distinct[-1], np.inf))


def threshold_at_fmr(impostor_scores: Sequence[float], target_fmr: float = DEFAULT_TARGET_FMR) -> float:
    """Smallest candidate threshold whose FMR does not exceed target_fmr"""
    if not 0.0 < target_fmr < 1.0:
        raise ConfigError(f"target FMR must lie in (0, 1), got {target_fmr}")
    scores = np.sort(_scores(impostor_scores, "impostor"))
    candidates = candidate_thresholds(scores)
    accepted = scores.size - np.searchsorted(scores, candidates, side="left")
    # rates are non-increasing along the candidates; the sentinel always qualifies
    feasible = np.flatnonzero(accepted / scores.size <= target_fmr)
    return float(candidates[feasible[0]])


def mmpmr(morph_rows: Sequence[MorphScore], threshold: float,
          rule: MmpmrRule = MmpmrRule.MIN) -> float:
    """Fraction of morphs accepted at threshold.

    Several samples of one (morph, subject) pair reduce to their best score.
    """
    if not morph_rows:
        raise EmptyScores("no morph attack scores")
    best: Dict[Tuple[str, str], float] = {}
    for morph_id, subject, score in morph_rows:
        key = (morph_id, subject)
        best[key] = max(best.get(key, score), score)

    per_morph: Dict[str, List[float]] = defaultdict(list)
    for (morph_id, _), score in best.items():
        per_morph[morph_id].append(score)

    reduce = min if rule is MmpmrRule.MIN else max
    accepted = sum(1 for scores in per_morph.values() if reduce(scores) >= threshold)
    return accepted / len(per_morph)


def evaluate(score_set: ScoreSet, config: ScenarioConfig) -> EvalReport:
    """Threshold at the target FMR and the rates at that threshold"""
    threshold = threshold_at_fmr(score_set.impostor, config.target_fmr)
    report = EvalReport(
        threshold=threshold,
        fmr_at_threshold=fmr(score_set.impostor, threshold),
        fnmr_at_threshold=fnmr(score_set.genuine, threshold),
        mmpmr=(mmpmr(score_set.morph_attacks, threshold, config.mmpmr_rule)
               if score_set.morph_attacks else None),
        n_genuine=len(score_set.genuine),
        n_impostor=len(score_set.impostor),
        n_morphs=score_set.n_morphs,
        n_morph_comparisons=len(score_set.morph_attacks),
        mode=config.mode,
        rule=config.mmpmr_rule,
        target_fmr=config.target_fmr,
    )
    if report.mmpmr is None:
        logger.warning("%s: no morph attack scores, MMPMR not reported", config.mode.value)
    logger.info("%s: threshold %.6f, FMR %.4f, FNMR %.4f, MMPMR(%s) %s",
                config.mode.value, report.threshold, report.fmr_at_threshold,
                report.fnmr_at_threshold, config.mmpmr_rule.value, report.mmpmr_text)
    return report


def det_curve(genuine_scores: Sequence[float],
              impostor_scores: Sequence[float]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(thresholds, fmr, fnmr) over every distinct score plus the sentinel"""
    genuine = np.sort(_scores(genuine_scores, "genuine"))
    impostor = np.sort(_scores(impostor_scores, "impostor"))
    thresholds = candidate_thresholds(np.concatenate([genuine, impostor]))
    fmr_curve = (impostor.size - np.searchsorted(impostor, thresholds, side="left")) / impostor.size
    fnmr_curve = np.searchsorted(genuine, thresholds, side="left") / genuine.size
    return thresholds, fmr_curve, fnmr_curve


def equal_error_rate(genuine_scores: Sequence[float],
                     impostor_scores: Sequence[float]) -> Tuple[float, float]:
    """(EER, threshold) at the DET point where FMR and FNMR are closest"""
    thresholds, fmr_curve, fnmr_curve = det_curve(genuine_scores, impostor_scores)
    index = int(np.argmin(np.abs(fmr_curve - fnmr_curve)))
    return float((fmr_curve[index] + fnmr_curve[index]) / 2.0), float(thresholds[index])
