# FaceMorph Lab - Command Line
# Morph generation and morphing-attack vulnerability evaluation workflows

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

from common.config import (DEFAULT_ALPHA, DEFAULT_JOBS, DEFAULT_MODE, DEFAULT_RULE, DEFAULT_SEED,
                           DEFAULT_TARGET_FMR, MODES, RULES, RunConfig, log_level_from_env)
from common.errors import ConfigError, EmptySet, FaceMorphError
from common.tables import format_float, write_table
from demo.synthetic_dataset import run_demo
from evaluation.metrics import MmpmrRule, ScenarioConfig, ScenarioMode, det_curve, equal_error_rate
from evaluation.report import ReportEntry, ReportFormat, emit_report, load_report, write_report
from evaluation.scenario import (ComparisonProtocol, ImpostorScope, assemble_scenario,
                                 evaluate_scenarios, load_morph_records, score_protocol)
from evaluation.scoring import load_embeddings, load_scores, write_scores
from imaging.image_io import write_image
from morphing.batch import MANIFEST_NAME, batch_morph, load_pair_list
from morphing.landmarks import AUTO_SCHEME, expected_count
from morphing.latent_morph import LinearTestBackend, latent_morph, load_latents
from morphing.morph_engine import MorphStyle
from protocol.manifest import load_manifest
from protocol.pairing import PairingConstraints, generate_pairs, import_external_protocol, write_pairs

logger = logging.getLogger("facemorph")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

DET_COLUMNS = ["threshold", "fmr", "fnmr"]


class UsageErrorParser(argparse.ArgumentParser):
    """ArgumentParser that reports usage errors with exit code 1"""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def cmd_pairs(args: argparse.Namespace, config: RunConfig) -> int:
    records = load_manifest(config.inputs["manifest"])
    if "protocol" in config.inputs:
        pairs = import_external_protocol(config.inputs["protocol"], records)
    else:
        constraints = PairingConstraints(all_image_combinations=args.all_combinations)
        pairs = generate_pairs(records, constraints)
    if not pairs:
        logger.warning("No pair satisfies the pairing constraints; writing an empty pair list")
    write_pairs(pairs, config.output)
    print(f"✅ {len(pairs)} morph pairs written to {config.output}")
    return EXIT_OK


def cmd_morph(args: argparse.Namespace, config: RunConfig) -> int:
    expected_count(args.scheme)
    entries = load_pair_list(config.inputs["pairs"])
    rows = batch_morph(entries, config.alpha, config.output, jobs=config.jobs,
                       scheme=args.scheme, style=MorphStyle(args.style))
    failed = sum(1 for row in rows if not row.ok)
    print(f"✅ {len(rows) - failed} morphs written to {config.output}")
    if failed:
        print(f"⚠️ {failed} pair(s) failed; see {Path(config.output) / MANIFEST_NAME}")
    return EXIT_OK


def cmd_latent_morph(args: argparse.Namespace, config: RunConfig) -> int:
    wa = load_latents(config.inputs["latent_a"])[0]
    wb = load_latents(config.inputs["latent_b"])[0]
    backend = LinearTestBackend(args.width, args.height, wa.space_tag, config.seed,
                                dimension=wa.dimension)
    write_image(latent_morph(backend, wa, wb, config.alpha), config.output)
    print(f"✅ Latent morph written to {config.output}")
    return EXIT_OK


def cmd_score(args: argparse.Namespace, config: RunConfig) -> int:
    records = load_manifest(config.inputs["manifest"])
    morphs = load_morph_records(config.inputs["morphs"], records)
    embeddings = load_embeddings(config.inputs["embeddings"], model_tag=args.model_tag)
    if not embeddings:
        raise EmptySet(f"no embeddings for model '{args.model_tag}'")
    protocol = ComparisonProtocol(args.enroll_per_subject, ImpostorScope(args.impostor_scope))
    rows = score_protocol(records, morphs, embeddings, ScenarioMode.parse(config.mode), protocol)
    write_scores(rows, config.output)
    print(f"✅ {len(rows)} scores written to {config.output}")
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace, config: RunConfig) -> int:
    rows = load_scores(config.inputs["scores"])
    rule = MmpmrRule(config.mmpmr_rule)
    configs = [ScenarioConfig(mode, config.target_fmr, rule) for mode in ScenarioMode.parse(config.mode)]
    results = evaluate_scenarios(rows, configs)
    entries = [ReportEntry(args.tool, args.model, args.dataset, report) for report, _ in results]

    out_dir = Path(config.output)
    write_report(entries, out_dir / "report.csv", ReportFormat.CSV)
    write_report(entries, out_dir / "report.txt", ReportFormat.TEXT)

    bona_fide, _ = assemble_scenario(rows, configs[0].mode)
    thresholds, fmr_curve, fnmr_curve = det_curve(bona_fide.genuine, bona_fide.impostor)
    write_table([{"threshold": format_float(t), "fmr": format_float(a), "fnmr": format_float(b)}
                 for t, a, b in zip(thresholds, fmr_curve, fnmr_curve)], DET_COLUMNS, out_dir / "det.csv")
    eer, eer_threshold = equal_error_rate(bona_fide.genuine, bona_fide.impostor)
    logger.info("Bona fide EER %.4f at threshold %.6f", eer, eer_threshold)

    for (report, counts) in results:
        print(f"✅ {report.mode.value}: threshold {report.threshold:.6f}, FMR {report.fmr_at_threshold:.4f}, "
              f"FNMR {report.fnmr_at_threshold:.4f}, MMPMR({rule.value}) {report.mmpmr_text} "
              f"over {counts.n_morphs} morphs")
    print(emit_report(entries), end="")
    return EXIT_OK


def cmd_report(args: argparse.Namespace, config: RunConfig) -> int:
    entries: List[ReportEntry] = []
    for path in args.inputs:
        entries.extend(load_report(path))
    write_report(entries, config.output, ReportFormat.TEXT)
    if args.csv_out:
        write_report(entries, args.csv_out, ReportFormat.CSV)
    print(emit_report(entries), end="")
    return EXIT_OK


def cmd_demo(args: argparse.Namespace, config: RunConfig) -> int:
    if args.subjects < 2 or args.images_per_subject < 2:
        raise ConfigError("demo needs at least 2 subjects with at least 2 images each")
    summary = run_demo(config.output, seed=config.seed, n_subjects=args.subjects,
                       images_per_subject=args.images_per_subject, jobs=config.jobs)
    print(f"✅ {summary.n_records} images, {summary.n_pairs} pairs, {summary.n_morphs} morphs")
    if summary.n_failed:
        print(f"⚠️ {summary.n_failed} morph(s) failed")
    print(summary.report_txt.read_text(encoding="utf-8"), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    formatter = argparse.ArgumentDefaultsHelpFormatter
    parser = UsageErrorParser(prog="facemorph", formatter_class=formatter,
                              description="Face morph generation and morphing-attack evaluation")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("pairs", formatter_class=formatter, help="select morph pairs from a manifest")
    p.add_argument("--manifest", type=Path, required=True, help="dataset manifest CSV")
    p.add_argument("--protocol", type=Path, help="external protocol CSV (image_id_a,image_id_b)")
    p.add_argument("--all-combinations", action="store_true",
                   help="pair every image of two subjects instead of their first images")
    p.add_argument("--out", type=Path, required=True, help="pair list CSV to write")

    p = sub.add_parser("morph", formatter_class=formatter, help="landmark-morph every pair of a pair list")
    p.add_argument("--pairs", type=Path, required=True, help="pair list CSV")
    p.add_argument("--out-dir", type=Path, required=True, help="directory for morphs and manifest")
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA, help="weight of image A")
    p.add_argument("--jobs", type=int, default=DEFAULT_JOBS, help="parallel morph workers")
    p.add_argument("--scheme", default=AUTO_SCHEME, help="landmark scheme: 68, 189, custom-<k> or auto")
    p.add_argument("--style", default=MorphStyle.OPENCV.value, choices=[s.value for s in MorphStyle],
                   help="morph variant")

    p = sub.add_parser("latent-morph", formatter_class=formatter,
                       help="interpolate two latent vectors and synthesize with the linear test backend")
    p.add_argument("--latent-a", type=Path, required=True, help="latent CSV of subject A")
    p.add_argument("--latent-b", type=Path, required=True, help="latent CSV of subject B")
    p.add_argument("--out", type=Path, required=True, help="image to write (.png or .ppm)")
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA, help="weight of latent A")
    p.add_argument("--width", type=int, default=64, help="output width")
    p.add_argument("--height", type=int, default=64, help="output height")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="decoder seed")

    p = sub.add_parser("score", formatter_class=formatter, help="score bona fide and morph comparisons")
    p.add_argument("--manifest", type=Path, required=True, help="dataset manifest CSV")
    p.add_argument("--morphs", type=Path, required=True, help="morph manifest CSV from the morph command")
    p.add_argument("--embeddings", type=Path, required=True, help="embedding CSV")
    p.add_argument("--model-tag", required=True, help="model whose embeddings are scored")
    p.add_argument("--mode", default=DEFAULT_MODE, choices=MODES, help="morph scenario(s)")
    p.add_argument("--enroll-per-subject", type=int, default=1, help="images enrolled per subject")
    p.add_argument("--impostor-scope", default=ImpostorScope.ALL.value,
                   choices=[s.value for s in ImpostorScope], help="references an impostor probe meets")
    p.add_argument("--out", type=Path, required=True, help="score CSV to write")

    p = sub.add_parser("evaluate", formatter_class=formatter, help="FMR, FNMR and MMPMR at a target FMR")
    p.add_argument("--scores", type=Path, required=True, help="score CSV")
    p.add_argument("--mode", default=DEFAULT_MODE, choices=MODES, help="morph scenario(s)")
    p.add_argument("--target-fmr", type=float, default=DEFAULT_TARGET_FMR, help="FMR fixing the threshold")
    p.add_argument("--rule", default=DEFAULT_RULE, choices=RULES, help="MMPMR acceptance rule")
    p.add_argument("--tool", default="opencv", help="morph tool tag for the report")
    p.add_argument("--model", default="unknown", help="face recognition model tag for the report")
    p.add_argument("--dataset", default="unknown", help="dataset tag for the report")
    p.add_argument("--out-dir", type=Path, required=True, help="directory for report and DET files")

    p = sub.add_parser("report", formatter_class=formatter, help="merge report CSVs into one table")
    p.add_argument("--inputs", type=Path, nargs="+", required=True, help="report CSVs")
    p.add_argument("--out", type=Path, required=True, help="text table to write")
    p.add_argument("--csv-out", type=Path, help="merged report CSV to write")

    p = sub.add_parser("demo", formatter_class=formatter, help="run the whole pipeline on synthetic data")
    p.add_argument("--out-dir", type=Path, required=True, help="directory for every demo artifact")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="dataset seed")
    p.add_argument("--subjects", type=int, default=8, help="number of synthetic subjects")
    p.add_argument("--images-per-subject", type=int, default=3, help="images per subject")
    p.add_argument("--jobs", type=int, default=DEFAULT_JOBS, help="parallel morph workers")
    return parser


def run_config(args: argparse.Namespace) -> RunConfig:
    """RunConfig of the parsed command line"""
    inputs: Dict[str, Path] = {}
    for name in ("manifest", "protocol", "pairs", "latent_a", "latent_b", "morphs",
                 "embeddings", "scores"):
        value = getattr(args, name, None)
        if value is not None:
            inputs[name] = value
    for index, path in enumerate(getattr(args, "inputs", None) or [], start=1):
        inputs[f"inputs_{index}"] = path

    output = getattr(args, "out", None) or getattr(args, "out_dir", None)
    return RunConfig(
        subcommand=args.command,
        inputs=inputs,
        output=output,
        alpha=getattr(args, "alpha", DEFAULT_ALPHA),
        target_fmr=getattr(args, "target_fmr", DEFAULT_TARGET_FMR),
        mmpmr_rule=getattr(args, "rule", DEFAULT_RULE),
        mode=getattr(args, "mode", DEFAULT_MODE),
        jobs=getattr(args, "jobs", DEFAULT_JOBS),
        seed=getattr(args, "seed", DEFAULT_SEED),
    ).validate()


COMMANDS: Dict[str, Callable[[argparse.Namespace, RunConfig], int]] = {
    "pairs": cmd_pairs,
    "morph": cmd_morph,
    "latent-morph": cmd_latent_morph,
    "score": cmd_score,
    "evaluate": cmd_evaluate,
    "report": cmd_report,
    "demo": cmd_demo,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else log_level_from_env(),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        config = run_config(args)
        return COMMANDS[args.command](args, config)
    except ConfigError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_USAGE
    except FaceMorphError as e:
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
