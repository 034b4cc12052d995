# Evaluation Test Suite
# Cosine scoring, FMR/FNMR/MMPMR, threshold selection, scenario assembly and the report table

import math
import sys
from decimal import Decimal, localcontext
from pathlib import Path

import numpy as np
import pytest

# Add src directory to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from common.errors import (ConfigError, DimensionMismatch, EmptyScores, EmptySet,
                           InconsistentLabels, ParseError, UnknownId, UnknownImageId, ZeroVector)
from evaluation.metrics import (EvalReport, MmpmrRule, ScenarioConfig, ScenarioMode, ScoreSet,
                                det_curve, equal_error_rate, evaluate, fmr, fnmr, mmpmr,
                                threshold_at_fmr)
from evaluation.report import (ReportEntry, ReportFormat, emit_report, format_cell, load_report,
                               percent, write_report)
from evaluation.scenario import (ComparisonProtocol, ImpostorScope, MorphRecord, assemble_scenario,
                                 build_comparisons, load_morph_records, score_protocol)
from evaluation.scoring import (Comparison, ComparisonLabel, Embedding, ReferenceModel, ScoreRow,
                                build_reference, cosine_score, load_embeddings, load_scores,
                                score_comparisons, write_embeddings, write_scores)
from morphing.batch import ManifestRow, write_batch_manifest
from protocol.manifest import SubjectRecord

REFS = ScenarioMode.MORPHS_AS_REFERENCES
PROBES = ScenarioMode.MORPHS_AS_PROBES


# Cosine scoring

def test_cosine_examples():
    assert cosine_score(np.array([1.0, 0, 0]), np.array([1.0, 0, 0])) == 1.0
    assert cosine_score(np.array([1.0, 0]), np.array([0.0, 1])) == 0.0


def test_cosine_matches_extended_precision():
    with localcontext() as ctx:
        ctx.prec = 50
        expected = Decimal(32) / (Decimal(14).sqrt() * Decimal(77).sqrt())
    assert abs(Decimal(cosine_score(np.array([1, 2, 3]), np.array([4, 5, 6]))) - expected) < Decimal("1e-12")


def test_cosine_invariances():
    rng = np.random.default_rng(0)
    for _ in range(200):
        u, v = rng.normal(size=(2, 32))
        c = rng.uniform(0.01, 100)
        assert cosine_score(u, u) == pytest.approx(1.0, abs=1e-12)
        assert cosine_score(u, -u) == pytest.approx(-1.0, abs=1e-12)
        assert abs(cosine_score(c * u, v) - cosine_score(u, v)) < 1e-12
        assert -1.0 <= cosine_score(u, v) <= 1.0


def test_cosine_errors():
    with pytest.raises(ZeroVector):
        cosine_score(np.zeros(3), np.ones(3))
    with pytest.raises(DimensionMismatch):
        cosine_score(np.ones(3), np.ones(4))


def embedding(image_id, values, tag="toy"):
    return Embedding(image_id, np.asarray(values, dtype=np.float64), tag)


def test_build_reference():
    single = build_reference("s1", [embedding("a", [1.0, 2.0])])
    assert single.mean_vector.tolist() == [1.0, 2.0]
    pair = build_reference("s1", [embedding("a", [1.0, 0.0]), embedding("b", [0.0, 1.0])])
    assert pair.mean_vector.tolist() == [0.5, 0.5]
    assert pair.n_images == 2
    with pytest.raises(EmptySet):
        build_reference("s1", [])


def test_build_reference_oracle_and_permutation():
    rng = np.random.default_rng(1)
    vectors = rng.normal(size=(7, 16))
    embeddings = [embedding(str(i), v) for i, v in enumerate(vectors)]
    reference = build_reference("s", embeddings)
    oracle = [math.fsum(vectors[:, k]) / 7 for k in range(16)]
    assert np.max(np.abs(reference.mean_vector - oracle)) < 1e-12
    shuffled = build_reference("s", embeddings[::-1])
    assert np.max(np.abs(shuffled.mean_vector - reference.mean_vector)) < 1e-12


def test_load_embeddings(tmp_path):
    path = tmp_path / "emb.csv"
    path.write_text("image_id,model_tag,v0,v1,v2,v3\na,facenet,1,0,0,0\nb,facenet,0,1,0,0.5\nc,arcface,1,2\n")
    embeddings = load_embeddings(path)
    assert [e.image_id for e in embeddings] == ["a", "b", "c"]
    assert embeddings[1].vector.tolist() == [0.0, 1.0, 0.0, 0.5]
    assert [e.image_id for e in load_embeddings(path, "facenet")] == ["a", "b"]


def test_load_embeddings_errors(tmp_path):
    path = tmp_path / "emb.csv"
    path.write_text("a,m,1,2,3,4\nb,m,1,2,3,4,5\n")
    with pytest.raises(DimensionMismatch):
        load_embeddings(path)
    path.write_text("a,m,1,2\nb,m,0,0\n")
    with pytest.raises(ZeroVector):
        load_embeddings(path)
    path.write_text("a,m,1,2\na,m,3,4\n")
    with pytest.raises(ParseError):
        load_embeddings(path)
    path.write_text("a,m,1,x\n")
    with pytest.raises(ParseError) as info:
        load_embeddings(path)
    assert info.value.line == 1


def test_write_embeddings_round_trip(tmp_path):
    embeddings = [embedding("a", [0.1, -3.25e-5]), embedding("b", [7.0, 1 / 3])]
    loaded = load_embeddings(write_embeddings(embeddings, tmp_path / "emb.csv"))
    assert [e.vector.tolist() for e in loaded] == [e.vector.tolist() for e in embeddings]


def test_score_comparisons():
    probes = {"p1": embedding("p1", [1.0, 1.0]), "p2": embedding("p2", [1.0, -1.0])}
    enrolled = [embedding("e1", [1.0, 0.0]), embedding("e2", [1.0, 2.0])]
    references = {"s1": build_reference("s1", enrolled)}
    rows = score_comparisons(references, probes, [
        Comparison(ComparisonLabel.GENUINE, "s1", "p1"),
        Comparison(ComparisonLabel.IMPOSTOR, "s1", "p2"),
    ])
    assert [r.label for r in rows] == [ComparisonLabel.GENUINE, ComparisonLabel.IMPOSTOR]
    # mean (1, 1) against (1, 1) and (1, -1)
    assert rows[0].score == pytest.approx(1.0, abs=1e-12)
    assert rows[1].score == pytest.approx(0.0, abs=1e-12)


def test_score_against_enrolled_image():
    rng = np.random.default_rng(2)
    first, second = rng.normal(size=(2, 8))
    reference = build_reference("s1", [embedding("x", first), embedding("y", second)])
    (row,) = score_comparisons({"s1": reference}, {"x": embedding("x", first)},
                               [Comparison(ComparisonLabel.GENUINE, "s1", "x")])
    mean = (first + second) / 2
    assert abs(row.score - mean @ first / (np.linalg.norm(mean) * np.linalg.norm(first))) < 1e-12


def test_score_comparisons_unknown_probe():
    references = {"s1": ReferenceModel("s1", np.ones(2), 1)}
    with pytest.raises(UnknownId):
        score_comparisons(references, {}, [Comparison(ComparisonLabel.GENUINE, "s1", "ghost")])


def test_scores_file_round_trip(tmp_path):
    rows = [ScoreRow(ComparisonLabel.GENUINE, "s1", "p1", "", "", 0.75),
            ScoreRow(ComparisonLabel.MORPH, "m1", "p1", "m1", "s1", -0.125)]
    assert load_scores(write_scores(rows, tmp_path / "scores.csv")) == rows
    bad = tmp_path / "bad.csv"
    bad.write_text("label,reference_id,probe_id,morph_id,contrib_subject,score\nfriend,a,b,,,0.5\n")
    with pytest.raises(ParseError) as info:
        load_scores(bad)
    assert info.value.line == 2


# FMR, FNMR and threshold selection

def test_fmr_fnmr_examples():
    scores = [k / 10 for k in range(1, 11)]
    assert fmr(scores, 0.95) == pytest.approx(0.1)
    assert fmr(scores, 1.5) == 0.0
    assert fnmr(scores, 0.05) == 0.0
    assert fnmr(scores, 1.5) == 1.0
    with pytest.raises(EmptyScores):
        fmr([], 0.5)
    with pytest.raises(EmptyScores):
        fnmr([], 0.5)


def test_fmr_fnmr_match_exhaustive_count():
    """1000 random score sets on a coarse grid, so thresholds often hit tied scores"""
    rng = np.random.default_rng(3)
    for _ in range(1000):
        n = int(rng.integers(1, 80))
        scores = rng.integers(-10, 11, size=n) / 10
        thresholds = list(rng.integers(-11, 12, size=3) / 10) + [float(rng.uniform(-1, 1))]
        for threshold in thresholds:
            accepted = sum(1 for s in scores if s >= threshold)
            assert fmr(scores, threshold) == accepted / n
            assert fnmr(scores, threshold) == (n - accepted) / n


def test_fmr_fnmr_on_large_set():
    rng = np.random.default_rng(13)
    scores = rng.uniform(-1, 1, size=10_000)
    for threshold in rng.uniform(-1, 1, size=20):
        accepted = sum(1 for s in scores if s >= threshold)
        assert fmr(scores, threshold) == accepted / 10_000
        assert fnmr(scores, threshold) == (10_000 - accepted) / 10_000


def brute_force_threshold(scores, target):
    candidates = sorted(set(scores)) + [math.nextafter(max(scores), math.inf)]
    for t in candidates:
        if sum(1 for s in scores if s >= t) / len(scores) <= target:
            return t


def test_threshold_distinct_scores():
    rng = np.random.default_rng(4)
    scores = rng.permutation(np.linspace(-0.5, 0.9, 1000))
    t = threshold_at_fmr(scores, 0.001)
    assert sum(1 for s in scores if s >= t) == 1
    below = max(s for s in scores if s < t)
    assert sum(1 for s in scores if s >= below) == 2


def test_threshold_below_one_over_n_is_sentinel():
    scores = np.linspace(0, 1, 100)
    t = threshold_at_fmr(scores, 0.001)
    assert t > 1.0 and t == math.nextafter(1.0, math.inf)
    assert fmr(scores, t) == 0.0


def test_threshold_with_tied_maximum():
    scores = list(np.linspace(0, 0.5, 995)) + [0.9] * 5
    t = threshold_at_fmr(scores, 0.001)
    assert t > 0.9
    assert fmr(scores, t) == 0.0


def test_threshold_matches_brute_force_on_tie_heavy_sets():
    """Coarse score grids produce many ties"""
    rng = np.random.default_rng(5)
    for _ in range(1000):
        n = int(rng.integers(1, 60))
        scores = [float(s) for s in rng.integers(0, 12, size=n) / 10]
        target = float(rng.choice([0.001, 0.01, 0.05, 0.1, 0.25, 0.5, 0.9]))
        t = threshold_at_fmr(scores, target)
        assert t == brute_force_threshold(scores, target)
        assert fmr(scores, t) <= target


def test_threshold_rejects_bad_target():
    with pytest.raises(ConfigError):
        threshold_at_fmr([0.1, 0.2], 0.0)
    with pytest.raises(ConfigError):
        threshold_at_fmr([0.1, 0.2], 1.0)
    with pytest.raises(EmptyScores):
        threshold_at_fmr([], 0.1)


# MMPMR

def test_mmpmr_examples():
    both = [("m", "a", 0.9), ("m", "b", 0.8)]
    assert mmpmr(both, 0.5, MmpmrRule.MIN) == 1.0
    assert mmpmr(both, 0.5, MmpmrRule.ANY) == 1.0
    split = [("m", "a", 0.9), ("m", "b", 0.2)]
    assert mmpmr(split, 0.5, MmpmrRule.MIN) == 0.0
    assert mmpmr(split, 0.5, MmpmrRule.ANY) == 1.0
    with pytest.raises(EmptyScores):
        mmpmr([], 0.5)


def test_mmpmr_takes_best_sample_per_subject():
    rows = [("m", "a", 0.1), ("m", "a", 0.7), ("m", "b", 0.6)]
    assert mmpmr(rows, 0.5, MmpmrRule.MIN) == 1.0


def random_morph_rows(rng, n_morphs=200, grid=None):
    """Morph rows with 1-3 samples per contributor; `grid` snaps scores to multiples of 1/grid"""
    rows = []
    for m in range(n_morphs):
        for subject in ("a", "b"):
            for _ in range(int(rng.integers(1, 4))):
                score = float(rng.integers(0, grid + 1) / grid) if grid else float(rng.uniform())
                rows.append((f"m{m}", f"{subject}{m}", score))
    order = rng.permutation(len(rows))
    return [rows[i] for i in order]


def brute_force_mmpmr(rows, threshold, rule):
    accepted = 0
    morph_ids = sorted({m for m, _, _ in rows})
    for morph_id in morph_ids:
        subjects = sorted({s for m, s, _ in rows if m == morph_id})
        best = [max(v for m, s, v in rows if m == morph_id and s == subject) for subject in subjects]
        matched = [b >= threshold for b in best]
        if (all(matched) if rule is MmpmrRule.MIN else any(matched)):
            accepted += 1
    return accepted / len(morph_ids)


def test_mmpmr_matches_brute_force():
    """1000 random morph sets with tied scores, thresholds on the score grid"""
    rng = np.random.default_rng(6)
    for _ in range(1000):
        rows = random_morph_rows(rng, int(rng.integers(1, 12)), grid=10)
        threshold = float(rng.integers(0, 12) / 10)
        low = mmpmr(rows, threshold, MmpmrRule.MIN)
        high = mmpmr(rows, threshold, MmpmrRule.ANY)
        assert low == brute_force_mmpmr(rows, threshold, MmpmrRule.MIN)
        assert high == brute_force_mmpmr(rows, threshold, MmpmrRule.ANY)
        assert low <= high


def test_mmpmr_matches_brute_force_on_large_set():
    rng = np.random.default_rng(16)
    rows = random_morph_rows(rng)
    for threshold in (0.1, 0.35, 0.5, 0.8, 0.97):
        assert mmpmr(rows, threshold, MmpmrRule.MIN) == brute_force_mmpmr(rows, threshold, MmpmrRule.MIN)
        assert mmpmr(rows, threshold, MmpmrRule.ANY) == brute_force_mmpmr(rows, threshold, MmpmrRule.ANY)


def test_rates_are_monotone_in_threshold():
    rng = np.random.default_rng(7)
    impostor = rng.normal(0.0, 0.2, size=500)
    genuine = rng.normal(0.7, 0.1, size=300)
    rows = random_morph_rows(rng, 50)
    thresholds = np.linspace(-1, 1.1, 60)
    fmrs = [fmr(impostor, t) for t in thresholds]
    fnmrs = [fnmr(genuine, t) for t in thresholds]
    mmpmrs = [mmpmr(rows, t) for t in thresholds]
    assert all(a >= b for a, b in zip(fmrs, fmrs[1:]))
    assert all(a <= b for a, b in zip(fnmrs, fnmrs[1:]))
    assert all(a >= b for a, b in zip(mmpmrs, mmpmrs[1:]))


def test_evaluate_is_invariant_under_increasing_transform():
    rng = np.random.default_rng(8)

    def transform(s):
        return s * s * s + 2 * s

    for _ in range(100):
        impostor = rng.integers(0, 21, size=80) / 20
        genuine = rng.integers(0, 21, size=40) / 20
        morphs = [(f"m{i % 10}", f"s{i % 3}", float(v)) for i, v in enumerate(rng.integers(0, 21, size=30) / 20)]
        config = ScenarioConfig(REFS, 0.05)
        plain = evaluate(ScoreSet(genuine, impostor, morphs), config)
        mapped = evaluate(ScoreSet(transform(genuine), transform(impostor),
                                   [(m, s, transform(v)) for m, s, v in morphs]), config)
        assert (plain.fmr_at_threshold, plain.fnmr_at_threshold, plain.mmpmr) == \
               (mapped.fmr_at_threshold, mapped.fnmr_at_threshold, mapped.mmpmr)


def test_evaluate_hand_built_set():
    impostor = np.linspace(0.0, 0.998, 1000)
    morphs = [("m1", "a", 0.999), ("m1", "b", 1.0), ("m2", "c", 0.5), ("m2", "d", 0.9)]
    report = evaluate(ScoreSet([0.99] * 20, impostor, morphs), ScenarioConfig(REFS, 0.001))
    assert report.threshold == pytest.approx(0.998)
    assert report.fmr_at_threshold <= 0.001
    assert report.fnmr_at_threshold == 1.0
    assert report.mmpmr == 0.5
    assert (report.n_genuine, report.n_impostor, report.n_morphs, report.n_morph_comparisons) == (20, 1000, 2, 4)


def test_evaluate_extreme_morph_scores():
    impostor = np.linspace(0.2, 0.6, 100)
    genuine = np.linspace(0.7, 0.9, 50)
    low = [("m1", "a", 0.1), ("m1", "b", 0.0)]
    high = [("m1", "a", 0.95), ("m1", "b", 0.99)]
    config = ScenarioConfig(PROBES, 0.01)
    assert evaluate(ScoreSet(genuine, impostor, low), config).mmpmr == 0.0
    assert evaluate(ScoreSet(genuine, impostor, high), config).mmpmr == 1.0


def test_evaluate_without_morph_attacks():
    impostor = np.linspace(0.2, 0.6, 100)
    genuine = np.linspace(0.7, 0.9, 50)
    report = evaluate(ScoreSet(genuine, impostor), ScenarioConfig(REFS, 0.01))
    assert report.mmpmr is None and report.mmpmr_text == "-"
    assert report.fnmr_at_threshold == 0.0
    assert report.n_morphs == 0



def test_scenario_config_validation():
    with pytest.raises(ConfigError):
        ScenarioConfig(REFS, 0.0)
    with pytest.raises(ConfigError):
        ScenarioMode.parse("sideways")
    assert ScenarioMode.parse("both") == [REFS, PROBES]
    with pytest.raises(ValueError):
        ScoreSet([float("nan")], [0.1])


def test_det_curve_and_eer():
    genuine = [0.6, 0.7, 0.8, 0.9]
    impostor = [0.1, 0.2, 0.3, 0.65]
    thresholds, fmrs, fnmrs = det_curve(genuine, impostor)
    assert thresholds[-1] > 0.9
    assert fmrs[0] == 1.0 and fnmrs[0] == 0.0
    assert fmrs[-1] == 0.0 and fnmrs[-1] == 1.0
    eer, threshold = equal_error_rate(genuine, impostor)
    assert eer == pytest.approx(0.25)
    assert fmr(impostor, threshold) == fnmr(genuine, threshold) == 0.25


# Scenario assembly

def subject_records(n_subjects=4, images=3):
    return [SubjectRecord(f"s{i}", f"s{i}_{j}", "f", "a" if i < 2 else "b", False,
                          Path(f"s{i}_{j}.png"), Path(f"s{i}_{j}.txt"))
            for i in range(n_subjects) for j in range(images)]


def random_embeddings(ids, seed=9):
    rng = np.random.default_rng(seed)
    return [embedding(i, rng.normal(size=8)) for i in ids]


def test_scenario_counts_match_enumeration():
    records = subject_records()
    morphs = [MorphRecord("m01", ("s0", "s1")), MorphRecord("m23", ("s2", "s3"))]
    embeddings = random_embeddings([r.image_id for r in records] + ["m01", "m23"])
    rows = score_protocol(records, morphs, embeddings, [REFS, PROBES])

    subjects = sorted({r.subject_id for r in records})
    probes = {s: [r.image_id for r in records if r.subject_id == s][1:] for s in subjects}
    genuine = {(s, p) for s in subjects for p in probes[s]}
    impostor = {(o, p) for s in subjects for p in probes[s] for o in subjects if o != s}
    as_refs = {(m.morph_id, p) for m in morphs for s in m.contributors for p in probes[s]}
    as_probes = {(s, m.morph_id) for m in morphs for s in m.contributors}

    def pairs(label):
        return {(r.reference_id, r.probe_id) for r in rows if r.label is label}

    assert pairs(ComparisonLabel.GENUINE) == genuine
    assert pairs(ComparisonLabel.IMPOSTOR) == impostor
    assert pairs(ComparisonLabel.MORPH) == as_refs | as_probes

    _, refs_counts = assemble_scenario(rows, REFS)
    assert (refs_counts.n_bf_references, refs_counts.n_bf_probes) == (4, 8)
    assert (refs_counts.n_genuine, refs_counts.n_impostor) == (len(genuine), len(impostor)) == (8, 24)
    assert (refs_counts.n_morphs, refs_counts.n_morph_comparisons) == (2, len(as_refs)) == (2, 8)
    _, probes_counts = assemble_scenario(rows, PROBES)
    assert (probes_counts.n_genuine, probes_counts.n_impostor) == (8, 24)
    assert (probes_counts.n_morphs, probes_counts.n_morph_comparisons) == (2, len(as_probes)) == (2, 4)


def test_scenario_without_morphs():
    records = subject_records()
    rows = score_protocol(records, [], random_embeddings([r.image_id for r in records]), [REFS])
    score_set, counts = assemble_scenario(rows, REFS)
    assert (counts.n_genuine, counts.n_impostor, counts.n_morphs) == (8, 24, 0)
    assert score_set.morph_attacks == ()


def test_protocol_options():
    records = subject_records()
    same = build_comparisons(records, [], [REFS], ComparisonProtocol(impostor_scope=ImpostorScope.SAME_DEMOGRAPHIC))
    assert sum(1 for c in same.comparisons if c.label is ComparisonLabel.IMPOSTOR) == 8
    two = build_comparisons(records, [], [REFS], ComparisonProtocol(enroll_per_subject=2))
    assert two.enrollment["s0"] == ("s0_0", "s0_1")
    assert sum(1 for c in two.comparisons if c.label is ComparisonLabel.GENUINE) == 4
    with pytest.raises(ConfigError):
        ComparisonProtocol(enroll_per_subject=0)


def test_morph_id_collision():
    with pytest.raises(InconsistentLabels):
        build_comparisons(subject_records(), [MorphRecord("s0_1", ("s0", "s1"))], [REFS])


def morph_row(ref, probe, morph_id="m", subject="s0", score=0.5):
    return ScoreRow(ComparisonLabel.MORPH, ref, probe, morph_id, subject, score)


def test_assemble_rejects_inconsistent_rows():
    genuine = ScoreRow(ComparisonLabel.GENUINE, "s0", "p", "", "", 0.9)
    with pytest.raises(InconsistentLabels):
        assemble_scenario([genuine, ScoreRow(ComparisonLabel.IMPOSTOR, "s0", "p", "", "", 0.1)], REFS)
    with pytest.raises(InconsistentLabels):
        assemble_scenario([ScoreRow(ComparisonLabel.GENUINE, "s0", "p", "m", "s0", 0.9)], REFS)
    with pytest.raises(InconsistentLabels):
        assemble_scenario([morph_row("m", "p", morph_id="")], REFS)
    with pytest.raises(InconsistentLabels):
        assemble_scenario([morph_row("x", "y")], REFS)


def test_assemble_skips_other_mode(caplog):
    rows = [ScoreRow(ComparisonLabel.GENUINE, "s0", "p", "", "", 0.9),
            morph_row("m", "p"), morph_row("s0", "m")]
    score_set, counts = assemble_scenario(rows, PROBES)
    assert score_set.morph_attacks == (("m", "s0", 0.5),)
    assert counts.n_morph_comparisons == 1
    assert "Skipped 1 morph rows" in caplog.text


def test_load_morph_records(tmp_path):
    records = subject_records()
    path = write_batch_manifest([
        ManifestRow("s0_0_s1_0_0.5.png", "s0_0", "s1_0", "0.5", "ok"),
        ManifestRow("s2_0_s3_0_0.5.png", "s2_0", "s3_0", "0.5", "error", "no landmarks"),
    ], tmp_path / "morph_manifest.csv")
    (morph,) = load_morph_records(path, records)
    assert morph == MorphRecord("s0_0_s1_0_0.5", ("s0", "s1"), ("s0_0", "s1_0"), 0.5)
    with pytest.raises(UnknownImageId):
        load_morph_records(path, records[3:])


# Report

def eval_report(mode, rate, rule=MmpmrRule.MIN):
    return EvalReport(threshold=0.42, fmr_at_threshold=0.001, fnmr_at_threshold=0.05, mmpmr=rate,
                      n_genuine=10, n_impostor=90, n_morphs=4, n_morph_comparisons=8,
                      mode=mode, rule=rule, target_fmr=0.001)


def test_percent_and_cells():
    assert format_cell(0.833, 0.720) == "83.3 | 72.0"
    assert format_cell(None, 0.5) == "- | 50.0"
    assert percent(0.1235) == "12.4"
    assert percent(1.0) == "100.0"


def test_report_table_cell():
    entries = [ReportEntry("opencv", "facenet", "frll", eval_report(REFS, 0.833)),
               ReportEntry("opencv", "facenet", "frll", eval_report(PROBES, 0.72))]
    text = emit_report(entries, ReportFormat.TEXT)
    assert "83.3 | 72.0" in text
    assert "score >= threshold" in text
    assert "0.1%" in text


def test_empty_report_is_header_only():
    assert emit_report([], ReportFormat.CSV).strip().count("\n") == 0
    assert emit_report([], ReportFormat.TEXT).splitlines()[-1].split() == ["Tool", "Model"]


def test_report_rows_sorted_by_tool_and_model():
    entries = [ReportEntry(tool, model, "feret", eval_report(mode, 0.5))
               for tool in ("opencv", "facemorpher") for model in ("vgg", "arcface")
               for mode in (PROBES, REFS)]
    lines = emit_report(entries, ReportFormat.TEXT).splitlines()
    body = [line.split()[:2] for line in lines if not line.startswith("#")][1:]
    assert body == [["facemorpher", "arcface"], ["facemorpher", "vgg"],
                    ["opencv", "arcface"], ["opencv", "vgg"]]


def test_report_csv_round_trip(tmp_path):
    entries = [ReportEntry("opencv", "facenet", "frll", eval_report(REFS, 0.8333)),
               ReportEntry("opencv", "facenet", "frll", eval_report(PROBES, 0.72, MmpmrRule.ANY))]
    path = write_report(entries, tmp_path / "report.csv")
    assert path.read_text().splitlines()[0].startswith("tool,model,dataset,mode,threshold")
    assert load_report(path) == entries


def test_report_without_mmpmr(tmp_path):
    entries = [ReportEntry("opencv", "facenet", "frll", eval_report(REFS, None)),
               ReportEntry("opencv", "facenet", "frll", eval_report(PROBES, 0.5))]
    assert "- | 50.0" in emit_report(entries, ReportFormat.TEXT)
    path = write_report(entries, tmp_path / "report.csv")
    assert load_report(path) == entries
