"""Command-line surface.

Subcommands: gen, filter, campaign, test, report. Exit codes: 0 success,
2 input error, 3 when `test` falsifies a validated filter.
"""

from __future__ import annotations

import argparse
import csv
import functools
import sys
from pathlib import Path

from . import __version__
from .config import parse_config, resolve_settings
from .criteria import relevant_objects
from .harness import condition_by_label, run_campaign, validate_filter
from .io import read_samples, read_scenes, write_samples, write_scenes
from .predictor import generate_synthetic_dataset, predict_modes
from .report import build_report
from .stats import summarize_pvalues

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_FALSIFIED = 3


def _add_settings_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("capability model (flags override --config)")
    group.add_argument("--config", type=Path, help="key-value settings file")
    group.add_argument("--reaction-time", type=float, dest="reaction_time", metavar="S")
    group.add_argument("--guaranteed-brake", type=float, dest="guaranteed_brake", metavar="M/S2")
    group.add_argument("--guaranteed-lateral-brake", type=float,
                       dest="guaranteed_lateral_brake", metavar="M/S2")
    group.add_argument("--guaranteed-accel", type=float, dest="guaranteed_accel", metavar="M/S2")
    group.add_argument("--max-accel", type=float, dest="max_accel", metavar="M/S2")
    group.add_argument("--tangential-angle", type=float, dest="tangential_angle_deg",
                       metavar="DEG")
    group.add_argument("--enable-rtt-prime", action=argparse.BooleanOptionalAction,
                       default=None, dest="enable_rtt_prime",
                       help="also evaluate the passing extension (off by default)")


def _settings(args: argparse.Namespace):
    config = parse_config(args.config) if args.config else {}
    overrides = {key: getattr(args, key, None)
                 for key in ("reaction_time", "guaranteed_brake", "guaranteed_lateral_brake",
                             "guaranteed_accel", "max_accel", "tangential_angle_deg",
                             "enable_rtt_prime", "threshold")}
    return resolve_settings(config, overrides)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relkit",
        description="Worst-case kinematic object relevance and statistical filter validation")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a synthetic scene corpus")
    gen.add_argument("--scenes", type=int, default=200, help="number of scenes (default 200)")
    gen.add_argument("--seed", type=int, default=7, help="corpus seed (default 7)")
    gen.add_argument("--out", type=Path, required=True, help="output scene file (JSON lines)")

    filt = sub.add_parser("filter", help="relevance verdicts per scene object")
    filt.add_argument("--scenes", type=Path, required=True)
    filt.add_argument("--out", type=Path, help="verdict table (CSV); stdout when omitted")
    _add_settings_flags(filt)

    camp = sub.add_parser("campaign", help="run the repeated prediction campaign")
    camp.add_argument("--scenes", type=Path, required=True)
    camp.add_argument("--out", type=Path, required=True, help="sample file (CSV)")
    camp.add_argument("--runs", type=int, default=10)
    camp.add_argument("--seed", type=int, default=0, help="campaign seed")
    camp.add_argument("--conditions", default="A,R,RV,RV2",
                      help="comma-separated condition labels (default A,R,RV,RV2)")
    camp.add_argument("--jobs", type=int, default=1, help="parallel workers")
    _add_settings_flags(camp)

    test = sub.add_parser("test", help="p-value summaries and filter verdicts from samples")
    test.add_argument("--samples", type=Path, required=True)
    test.add_argument("--baseline", default="A")
    test.add_argument("--threshold", type=float, default=None,
                      help="falsification threshold (default 0.005)")
    test.add_argument("--mode", choices=("asymptotic", "permutation"), default="asymptotic")
    test.add_argument("--permutations", type=int, default=9999)
    test.add_argument("--perm-seed", type=int, default=0, dest="perm_seed")
    _add_settings_flags(test)

    rep = sub.add_parser("report", help="ECDF/boxplot tables and SVG figures")
    rep.add_argument("--samples", type=Path, required=True)
    rep.add_argument("--out-dir", type=Path, required=True, dest="out_dir")
    rep.add_argument("--baseline", default="A")
    rep.add_argument("--threshold", type=float, default=None)
    rep.add_argument("--mode", choices=("asymptotic", "permutation"), default="asymptotic")
    rep.add_argument("--permutations", type=int, default=9999)
    rep.add_argument("--perm-seed", type=int, default=0, dest="perm_seed")
    _add_settings_flags(rep)
    return parser


def _cmd_gen(args) -> int:
    scenes = generate_synthetic_dataset(args.scenes, args.seed)
    write_scenes(scenes, args.out)
    print(f"wrote {len(scenes)} scenes to {args.out}")
    return EXIT_OK


def _cmd_filter(args) -> int:
    settings = _settings(args)
    scenes = read_scenes(args.scenes)
    rows = []
    total = kept = 0
    for scene in scenes:
        verdicts = relevant_objects(scene, settings.caps, settings.world,
                                    enable_rtt_prime=settings.enable_rtt_prime,
                                    tangential_angle_deg=settings.tangential_angle_deg)
        for verdict in verdicts:
            total += 1
            kept += verdict.relevant
            scenarios = "+".join(sorted(s.value for s in verdict.triggering_scenarios))
            margin = min(verdict.margins.values()) if verdict.margins else float("nan")
            rows.append([scene.token, verdict.object_id, int(verdict.relevant),
                         scenarios, f"{margin:.9g}"])
    header = ("scene_token", "object_id", "relevant", "scenarios", "margin_m")
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
        stream = sys.stdout
    else:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        stream = sys.stderr
    fraction = 0.0 if total == 0 else 1.0 - kept / total
    print(f"objects in region: {total}, relevant: {kept}, "
          f"filtered out: {fraction:.1%}", file=stream)
    return EXIT_OK


def _cmd_campaign(args) -> int:
    settings = _settings(args)
    scenes = read_scenes(args.scenes)
    conditions = tuple(condition_by_label(label.strip())
                       for label in args.conditions.split(",") if label.strip())
    if not conditions:
        raise ValueError("no conditions given")
    samples = run_campaign(scenes, predictor=predict_modes, conditions=conditions,
                           runs=args.runs, campaign_seed=args.seed,
                           caps=settings.caps, world=settings.world,
                           enable_rtt_prime=settings.enable_rtt_prime, jobs=args.jobs)
    write_samples(samples, args.out)
    print(f"wrote {len(samples)} samples to {args.out} "
          f"({len(scenes)} scenes x {len(conditions)} conditions x {args.runs} runs)")
    return EXIT_OK


def _cmd_test(args) -> int:
    settings = _settings(args)
    samples = read_samples(args.samples)
    labels = sorted({s.condition for s in samples})
    if args.baseline not in labels:
        raise ValueError(f"baseline {args.baseline!r} not present in {args.samples}")
    from .harness import pairwise_pvalues  # local import keeps module load light
    pairs = [(f"{args.baseline}-{args.baseline}",
              pairwise_pvalues(samples, args.baseline, args.baseline, mode=args.mode,
                               permutations=args.permutations, seed=args.perm_seed))]
    filters = [label for label in labels if label != args.baseline]
    verdicts = []
    for label in filters:
        pairs.append((f"{args.baseline}-{label}",
                      pairwise_pvalues(samples, args.baseline, label, mode=args.mode,
                                       permutations=args.permutations, seed=args.perm_seed)))
        verdicts.append(validate_filter(samples, label, threshold=settings.threshold,
                                        baseline=args.baseline, mode=args.mode,
                                        permutations=args.permutations, seed=args.perm_seed))
    print(f"{'pair':<10} {'q25':>12} {'median':>12} {'q75':>12} {'mean':>12}")
    for summary in summarize_pvalues((pair, p) for pair, ps in pairs for p in ps):
        print(f"{summary.pair_label:<10} {summary.q25:>12.4g} {summary.median:>12.4g} "
              f"{summary.q75:>12.4g} {summary.mean:>12.4g}")
    print()
    any_falsified = False
    for verdict in verdicts:
        any_falsified |= verdict.outcome == "falsified"
        band = "inside" if verdict.within_noise_band else "outside"
        print(f"filter {verdict.filter_label}: {verdict.outcome.upper()} "
              f"(median p = {verdict.median_p:.4g}, threshold = {verdict.threshold:g}, "
              f"{band} baseline noise band [{verdict.noise_band[0]:.4g}, "
              f"{verdict.noise_band[1]:.4g}])")
    return EXIT_FALSIFIED if any_falsified else EXIT_OK


def _cmd_report(args) -> int:
    settings = _settings(args)
    samples = read_samples(args.samples)
    summary = build_report(samples, args.out_dir, threshold=settings.threshold,
                           baseline=args.baseline, mode=args.mode,
                           permutations=args.permutations, seed=args.perm_seed)
    means = ", ".join(f"{label}: {mean:.3f} m"
                      for label, mean in sorted(summary["error_mean"].items()))
    print(f"mean error per condition: {means}")
    print(f"run-to-run noise mean: {summary['noise_mean']:.3f} m")
    print(f"report written to {summary['out_dir']}")
    return EXIT_OK


_COMMANDS = {
    "gen": _cmd_gen,
    "filter": _cmd_filter,
    "campaign": _cmd_campaign,
    "test": _cmd_test,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    # argparse has no per-subcommand threshold flag for filter/campaign; tolerate absence
    if not hasattr(args, "threshold"):
        args.threshold = None
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
