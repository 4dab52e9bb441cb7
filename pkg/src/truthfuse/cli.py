"""Command-line entry point: fuse, detect-copies, eval, generate.

Every run writes a manifest recording the resolved configuration, the
input file digests, and the exact argument vector, so any output can be
reproduced byte for byte. Exit codes: 0 success, 1 input or config
error, 2 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import traceback
from pathlib import Path

from . import __version__
from .engine import ModelVariant, run
from .errors import FusionError, InvalidParameter
from .evaluation import (
    ErrorType,
    WorldSpec,
    accuracy_deviation,
    classify_errors,
    generate_world,
    precision,
)
from .ingest import (
    parse_claims,
    parse_golden,
    parse_truths,
    write_claims,
    write_golden,
    write_truths,
)
from .model import FusionConfig, build_dataset
from .vote import Directed, classify_direction


def _sha256(path: str | Path) -> str:
    digest = hashlib.sha256()
    with Path(path).open("rb") as handle:
        for block in iter(lambda: handle.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def _write_manifest(
    path: Path,
    command: str,
    argv: list[str],
    inputs: list[str | Path],
    outputs: list[Path],
    config: FusionConfig | None = None,
    extra: dict | None = None,
) -> None:
    manifest = {
        "tool": "truthfuse",
        "version": __version__,
        "command": command,
        "argv": argv,
        "inputs": {str(p): _sha256(p) for p in inputs},
        "outputs": [str(p) for p in outputs],
    }
    if config is not None:
        manifest["config"] = {
            "n": config.n,
            "alpha": config.alpha,
            "c": config.c,
            "eps": config.eps,
            "beta": config.uniform_beta,
            "rho": config.rho,
            "direction_threshold": config.direction_threshold,
            "accuracy_clamp": config.accuracy_clamp,
            "max_rounds": config.max_rounds,
            "stability_tol": config.stability_tol,
            "min_overlap": config.min_overlap,
        }
    if extra:
        manifest.update(extra)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=int, default=100, help="false values per object domain")
    parser.add_argument("--alpha", type=float, default=0.2, help="a-priori independence probability")
    parser.add_argument("--c", type=float, default=0.8, help="copy rate")
    parser.add_argument("--eps", type=float, default=0.2, help="initial error rate")
    parser.add_argument("--rho", type=float, default=0.5, help="similarity propagation weight")
    parser.add_argument("--direction-threshold", type=float, default=2.0 / 3.0)
    parser.add_argument("--min-overlap", type=int, default=10)
    parser.add_argument("--max-rounds", type=int, default=100)
    parser.add_argument("--stability-tol", type=float, default=1e-6)
    parser.add_argument("--accuracy-clamp", type=float, default=0.01)


def _add_input_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--delimiter", default=",", help="field delimiter (use 'tab' for tabs)")
    parser.add_argument(
        "--no-normalize",
        action="store_true",
        help="skip author-list normalization of values",
    )
    parser.add_argument("--keep-first", action="store_true",
                        help="keep the first value when a source contradicts itself")


def _config_from_args(args: argparse.Namespace) -> FusionConfig:
    return FusionConfig(
        n=args.n,
        alpha=args.alpha,
        c=args.c,
        eps=args.eps,
        rho=args.rho,
        direction_threshold=args.direction_threshold,
        accuracy_clamp=args.accuracy_clamp,
        max_rounds=args.max_rounds,
        stability_tol=args.stability_tol,
        min_overlap=args.min_overlap,
    )


def _delimiter(args: argparse.Namespace) -> str:
    return "\t" if args.delimiter == "tab" else args.delimiter


def _load_dataset(args: argparse.Namespace):
    claims = parse_claims(
        args.claims, delimiter=_delimiter(args), normalize=not args.no_normalize
    )
    return build_dataset(claims, keep_first=args.keep_first)


def _out(args: argparse.Namespace, suffix: str) -> Path:
    return Path(f"{args.out_prefix}.{suffix}")


def cmd_fuse(args: argparse.Namespace, argv: list[str]) -> None:
    config = _config_from_args(args)
    dataset = _load_dataset(args)
    variant = ModelVariant.from_string(args.variant)
    report = run(dataset, variant, config, threads=args.threads)

    truths_path = _out(args, "truths.csv")
    report_path = _out(args, "report.json")
    manifest_path = _out(args, "manifest.json")
    probabilities = {
        obj: report.state.posteriors[obj].probability(value)
        for obj, value in report.truths.items()
    }
    write_truths(truths_path, report.truths, probabilities, delimiter=_delimiter(args))
    report_path.write_text(
        json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    _write_manifest(
        manifest_path,
        "fuse",
        argv,
        [args.claims],
        [truths_path, report_path],
        config=config,
        extra={"variant": variant.value, "threads_affect_output": False},
    )
    print(
        f"fused {len(dataset)} claims over {len(dataset.sources())} sources, "
        f"{len(dataset.objects())} objects: {report.rounds_run} rounds, "
        f"{report.termination.value}; truths -> {truths_path}"
    )


def cmd_detect_copies(args: argparse.Namespace, argv: list[str]) -> None:
    config = _config_from_args(args)
    dataset = _load_dataset(args)
    variant = ModelVariant.from_string(args.variant)
    report = run(dataset, variant, config, threads=args.threads)

    pairs_path = _out(args, "pairs.csv")
    manifest_path = _out(args, "manifest.json")
    rows = []
    for (a, b), estimate in report.state.copy_matrix.items():
        direction = classify_direction(a, b, estimate, config.direction_threshold)
        if isinstance(direction, Directed):
            label = f"{direction.copier}_copies_{direction.original}"
        else:
            label = "undirected"
        rows.append(
            (
                estimate.independent,
                a,
                b,
                estimate.first_copies_second,
                estimate.second_copies_first,
                label,
            )
        )
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    with pairs_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(
            ["source_a", "source_b", "p_indep", "p_a_copies_b", "p_b_copies_a", "direction"]
        )
        for p_indep, a, b, p_ab, p_ba, label in rows:
            writer.writerow([a, b, str(p_indep), str(p_ab), str(p_ba), label])
    _write_manifest(
        manifest_path,
        "detect-copies",
        argv,
        [args.claims],
        [pairs_path],
        config=config,
        extra={"variant": variant.value},
    )
    print(f"{len(rows)} pairs at min_overlap {config.min_overlap} -> {pairs_path}")


def cmd_eval(args: argparse.Namespace, argv: list[str]) -> None:
    truths = parse_truths(args.truths, delimiter=_delimiter(args))
    golden = parse_golden(
        args.golden, delimiter=_delimiter(args), normalize=not args.no_normalize
    )
    score = precision(truths, golden)
    error_counts = {error: 0 for error in ErrorType}
    for obj, golden_value in sorted(golden.items()):
        fused = truths.get(obj, "")
        if fused == golden_value:
            continue
        for error in classify_errors(fused, golden_value):
            error_counts[error] += 1

    eval_path = _out(args, "eval.csv")
    manifest_path = _out(args, "manifest.json")
    inputs: list[str | Path] = [args.truths, args.golden]
    outputs = [eval_path]
    average_difference = None
    if args.fuse_report:
        if not args.claims:
            raise InvalidParameter("--fuse-report requires --claims")
        # compare the fusion run's accuracy estimates against accuracies
        # sampled on the golden objects, for sources asserting enough of them
        report = json.loads(Path(args.fuse_report).read_text(encoding="utf-8"))
        computed = report["accuracies"]
        claims = parse_claims(
            args.claims, delimiter=_delimiter(args), normalize=not args.no_normalize
        )
        dataset = build_dataset(claims, keep_first=True)
        rows, average_difference = accuracy_deviation(
            computed, dataset, golden, args.min_golden
        )
        accuracy_path = _out(args, "accuracy.csv")
        with accuracy_path.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["source", "computed", "sampled", "abs_difference"])
            for source, (comp, sampled) in rows.items():
                writer.writerow([source, str(comp), str(sampled), str(abs(comp - sampled))])
        inputs.extend([args.fuse_report, args.claims])
        outputs.append(accuracy_path)

    with eval_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["metric", "value"])
        writer.writerow(["precision", str(score)])
        writer.writerow(["golden_objects", str(len(golden))])
        for error in ErrorType:
            writer.writerow([error.value, str(error_counts[error])])
        if average_difference is not None:
            writer.writerow(["avg_accuracy_difference", str(average_difference)])
    _write_manifest(manifest_path, "eval", argv, inputs, outputs)
    print(f"precision {score:.4f} over {len(golden)} golden objects -> {eval_path}")
    for error in ErrorType:
        print(f"  {error.value}: {error_counts[error]}")
    if average_difference is not None:
        print(f"  avg |computed - sampled| accuracy: {average_difference:.4f}")


def cmd_generate(args: argparse.Namespace, argv: list[str]) -> None:
    spec = WorldSpec(
        num_objects=args.objects,
        num_independent_sources=args.independents,
        num_copiers=args.copiers,
        true_accuracy_range=(args.accuracy_min, args.accuracy_max),
        copy_rate=args.copy_rate,
        n=args.n,
        coverage=args.coverage,
        seed=args.seed,
    )
    world = generate_world(spec)
    claims_path = _out(args, "claims.csv")
    golden_path = _out(args, "golden.csv")
    copies_path = _out(args, "copies.csv")
    manifest_path = _out(args, "manifest.json")
    write_claims(claims_path, world.dataset.claims)
    write_golden(golden_path, world.golden)
    with copies_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["copier", "original"])
        for copier, original in sorted(world.copy_graph):
            writer.writerow([copier, original])
    _write_manifest(
        manifest_path,
        "generate",
        argv,
        [],
        [claims_path, golden_path, copies_path],
        extra={"seed": args.seed, "world": {
            "objects": args.objects,
            "independents": args.independents,
            "copiers": args.copiers,
            "accuracy_range": [args.accuracy_min, args.accuracy_max],
            "copy_rate": args.copy_rate,
            "n": args.n,
            "coverage": args.coverage,
        }},
    )
    print(
        f"{len(world.dataset)} claims, {len(world.golden)} golden objects, "
        f"{len(world.copy_graph)} copy edges -> {args.out_prefix}.*"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="truthfuse",
        description="Resolve conflicting multi-source claims by estimating "
        "source accuracy and pairwise copying.",
    )
    parser.add_argument("--version", action="version", version=f"truthfuse {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    fuse = sub.add_parser("fuse", help="select the most probable value per object")
    fuse.add_argument("claims", help="claim file (source,object,value)")
    fuse.add_argument(
        "--variant",
        default="accucopy",
        choices=[v.value for v in ModelVariant],
    )
    fuse.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    fuse.add_argument("--out-prefix", default="fusion")
    _add_config_flags(fuse)
    _add_input_flags(fuse)
    fuse.set_defaults(handler=cmd_fuse)

    detect = sub.add_parser("detect-copies", help="estimate pairwise copy probabilities")
    detect.add_argument("claims")
    detect.add_argument(
        "--variant",
        default="accucopy",
        choices=[
            ModelVariant.COPY.value,
            ModelVariant.ACCUCOPY.value,
            ModelVariant.ACCUCOPYSIM.value,
        ],
    )
    detect.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    detect.add_argument("--out-prefix", default="copies")
    _add_config_flags(detect)
    _add_input_flags(detect)
    detect.set_defaults(handler=cmd_detect_copies)

    evaluate = sub.add_parser("eval", help="score fused truths against a golden standard")
    evaluate.add_argument("truths", help="fused truths file (object,value[,probability])")
    evaluate.add_argument("golden", help="golden file (object,value)")
    evaluate.add_argument(
        "--fuse-report",
        help="fuse report json; adds a computed-vs-sampled accuracy table",
    )
    evaluate.add_argument(
        "--claims",
        help="claim file the report was fused from (required with --fuse-report)",
    )
    evaluate.add_argument(
        "--min-golden",
        type=int,
        default=10,
        help="golden objects a source must exceed to enter the accuracy table",
    )
    evaluate.add_argument("--out-prefix", default="evaluation")
    _add_input_flags(evaluate)
    evaluate.set_defaults(handler=cmd_eval)

    generate = sub.add_parser("generate", help="generate a synthetic world")
    generate.add_argument("--objects", type=int, required=True)
    generate.add_argument("--independents", type=int, required=True)
    generate.add_argument("--copiers", type=int, default=0)
    generate.add_argument("--accuracy-min", type=float, default=0.7)
    generate.add_argument("--accuracy-max", type=float, default=0.9)
    generate.add_argument("--copy-rate", type=float, default=0.8)
    generate.add_argument("--n", type=int, default=100)
    generate.add_argument("--coverage", type=float, default=0.8)
    generate.add_argument("--seed", type=int, default=0)
    generate.add_argument("--out-prefix", default="world")
    generate.set_defaults(handler=cmd_generate)
    return parser


def main(argv: list[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.handler(args, list(argv))
    except (FusionError, OSError) as error:
        print(f"error: {error}", file=sys.stderr)
        return 1
    except Exception:  # internal invariant violation
        traceback.print_exc()
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
