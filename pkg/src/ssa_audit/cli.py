"""Command-line entry point: wire corpora, resources, and adapters into the
audit and attack operations, and emit reports plus a run manifest.

Every stochastic run records its seed in the manifest; identical manifests
with deterministic adapters reproduce byte-identical reports. Exit codes:
0 success, 2 validation problem, 3 adapter failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

from . import adapters, attack, audit, corpus, reports
from .constraints import ConstraintContext
from .embeddings import FrequencyTable, VectorStore
from .errors import AdapterError, SsaAuditError
from .lexsem import LexicalResources
from .lexsem.resources import resource_path
from .transforms import EMBEDDING_KNN, MLM_INFILL, MLM_RECONSTRUCT, Transform, WORDNET

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_ADAPTER = 3


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat()


def write_manifest(args: argparse.Namespace, out_dir: Path, outputs: list[str]) -> None:
    """Record the full run configuration before any result is produced."""
    payload = {
        "command": args.command,
        "config": {
            k: (str(v) if isinstance(v, Path) else v)
            for k, v in sorted(vars(args).items())
            if k != "func"
        },
        "seed": getattr(args, "seed", None),
        "started_at": _utcnow(),
        "out_dir": str(out_dir),
        "outputs": outputs,
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _resources(args: argparse.Namespace) -> LexicalResources:
    return LexicalResources.from_paths(args.inventory, args.inflections)


def _load_pairs(args: argparse.Namespace, res: LexicalResources) -> corpus.LoadedPairs:
    loaded = corpus.load_pairs(args.pairs, res.annotator())
    if loaded.skipped:
        print(f"skipped {len(loaded.skipped)} misaligned line(s)", file=sys.stderr)
    return loaded


def _parse_band(text: str | None) -> tuple[int, int] | None:
    if text is None:
        return None
    lo, _, hi = text.partition(":")
    return int(lo), int(hi)


def _bands(args: argparse.Namespace) -> audit.RandomBands | None:
    if not getattr(args, "freq_table", None):
        return None
    table = FrequencyTable.from_file(args.freq_table)
    intervals = None
    high = _parse_band(getattr(args, "band_high", None))
    low = _parse_band(getattr(args, "band_low", None))
    if high or low:
        from .embeddings import HIGH_FREQ_BAND, LOW_FREQ_BAND

        intervals = {"high": high or HIGH_FREQ_BAND, "low": low or LOW_FREQ_BAND}
    return audit.RandomBands(table, intervals)


def _chunks(items: list, n: int) -> list[list]:
    size = max(1, (len(items) + n - 1) // n)
    return [items[i: i + size] for i in range(0, len(items), size)]


def _build_transform(args: argparse.Namespace, res: LexicalResources) -> Transform:
    from .transforms import TransformConfig

    source = args.source
    store = None
    adapter = None
    if source == EMBEDDING_KNN:
        store = VectorStore.from_file(args.vectors)
    elif source in (MLM_INFILL, MLM_RECONSTRUCT):
        adapter = adapters.build_mlm_adapter(args.mlm)
    k = None if args.k is not None and args.k <= 0 else args.k
    return Transform(
        TransformConfig(source, k=k, store=store, adapter=adapter, resources=res)
    )


# -- subcommands ---------------------------------------------------------------


def cmd_audit_pairs(args: argparse.Namespace) -> int:
    res = _resources(args)
    out_dir = Path(args.out_dir)
    outputs = ["taxonomy.csv", "taxonomy.md", "taxonomy.json"]
    write_manifest(args, out_dir, outputs)
    loaded = _load_pairs(args, res)
    if args.jobs > 1 and len(loaded.pairs) > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            parts = list(
                pool.map(lambda chunk: audit.audit_pairs(chunk, res),
                         _chunks(loaded.pairs, args.jobs))
            )
        report = audit.merge_taxonomy_reports(parts)
    else:
        report = audit.audit_pairs(loaded.pairs, res)
    reports.taxonomy_csv(report, out_dir / "taxonomy.csv")
    (out_dir / "taxonomy.md").write_text(reports.taxonomy_markdown(report))
    reports.write_json(out_dir / "taxonomy.json", reports.taxonomy_json(report))
    fr = report.fractions()
    print(
        f"classified {report.total} swaps over {report.pairs} pairs: "
        + ", ".join(f"{t}={fr[t]:.1%}" for t in fr)
    )
    return EXIT_OK


def cmd_candidate_stats(args: argparse.Namespace) -> int:
    res = _resources(args)
    out_dir = Path(args.out_dir)
    outputs = ["composition.csv", "composition.md", "composition.json"]
    write_manifest(args, out_dir, outputs)
    loaded = _load_pairs(args, res)
    transform = _build_transform(args, res)
    if args.jobs > 1 and len(loaded.pairs) > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            parts = list(
                pool.map(
                    lambda chunk: audit.candidate_composition(chunk, transform, res),
                    _chunks(loaded.pairs, args.jobs),
                )
            )
        report = audit.merge_composition_reports(parts)
    else:
        report = audit.candidate_composition(loaded.pairs, transform, res)
    reports.composition_csv(report, out_dir / "composition.csv")
    (out_dir / "composition.md").write_text(reports.composition_markdown(report))
    reports.write_json(out_dir / "composition.json", reports.composition_json(report))
    means = report.means()
    print(
        f"audited {report.positions} positions (k={report.k}): "
        + ", ".join(f"{t}={means[t]:.2f}" for t in means)
    )
    return EXIT_OK


def cmd_detector_aupr(args: argparse.Namespace) -> int:
    res = _resources(args)
    out_dir = Path(args.out_dir)
    outputs = ["detector_aupr.csv", "detector_aupr.md", "detector_aupr.json"]
    write_manifest(args, out_dir, outputs)
    loaded = _load_pairs(args, res)
    store = VectorStore.from_file(args.vectors)
    types = [t for t in args.types.split(",") if t]
    report = audit.detector_eval(
        loaded.pairs, store, res, types, bands=_bands(args), seed=args.seed
    )
    reports.detector_csv(report, out_dir / "detector_aupr.csv")
    (out_dir / "detector_aupr.md").write_text(reports.detector_markdown(report))
    reports.write_json(out_dir / "detector_aupr.json", reports.detector_json(report))
    for warning in report.warnings:
        print(warning, file=sys.stderr)
    print(
        f"{report.n_positives} positive scores; "
        + ", ".join(f"{t}={a:.3f}" for t, a, _, _ in report.rows)
    )
    return EXIT_OK


def cmd_encoder_curve(args: argparse.Namespace) -> int:
    res = _resources(args)
    out_dir = Path(args.out_dir)
    outputs = ["curves.csv", "curves.json"]
    write_manifest(args, out_dir, outputs)
    loaded = _load_pairs(args, res)
    encoder = adapters.build_encoder(args.encoder)
    types = [t for t in args.types.split(",") if t]
    window = None if args.window is not None and args.window < 0 else args.window
    report = audit.encoder_sensitivity_curve(
        loaded.pairs,
        encoder,
        res,
        types,
        n_max=args.n_max,
        w=window,
        compare_mode=args.compare_mode,
        seed=args.seed,
        bands=_bands(args),
    )
    reports.curve_csv(report, out_dir / "curves.csv")
    reports.write_json(out_dir / "curves.json", reports.curve_json(report))
    if report.partial:
        print(f"partial results: {report.error}", file=sys.stderr)
        return EXIT_ADAPTER
    summary = []
    for series_type, points in sorted(report.curves.items()):
        if points:
            summary.append(f"{series_type}@n={points[-1].n}: {points[-1].mean:.3f}")
    print("; ".join(summary) if summary else "no curves produced")
    return EXIT_OK


def cmd_grammar_stress(args: argparse.Namespace) -> int:
    res = _resources(args)
    out_dir = Path(args.out_dir)
    outputs = ["grammar_stress.csv", "grammar_stress.json"]
    write_manifest(args, out_dir, outputs)
    checker = adapters.build_grammar_checker(args.checker)
    annotator = res.annotator()
    sentences = []
    if args.sentences:
        with open(args.sentences, "r", encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    sentences.append(corpus.tokenize(line, annotator))
    else:
        loaded = _load_pairs(args, res)
        sentences = [pair.original for pair in loaded.pairs]
    report = audit.grammar_stress(sentences, checker, res)
    reports.grammar_stress_csv(report, out_dir / "grammar_stress.csv")
    reports.write_json(out_dir / "grammar_stress.json", reports.grammar_stress_json(report))
    print(
        f"{report.grammatical}/{report.considered} checker-clean sentences; "
        f"avg perturbed verbs {report.avg_perturbed_verbs:.2f}; "
        f"avg detected errors {report.avg_detected_errors:.2f}; "
        f"detection ratio {report.detection_ratio:.3f}"
    )
    return EXIT_OK


def cmd_attack(args: argparse.Namespace) -> int:
    res = _resources(args)
    out_dir = Path(args.out_dir)
    outputs = ["attack_results.jsonl", "attack_summary.json"]
    write_manifest(args, out_dir, outputs)
    cfg = attack.preset(args.preset)
    if args.max_candidates is not None:
        cfg.max_candidates_per_word = args.max_candidates
    tcfg = cfg.transformation
    tcfg.resources = res
    if tcfg.source == EMBEDDING_KNN:
        tcfg.store = VectorStore.from_file(args.vectors)
    if tcfg.source in (MLM_INFILL, MLM_RECONSTRUCT):
        tcfg.adapter = adapters.build_mlm_adapter(args.mlm)
    ccfg = cfg.constraints
    context = ConstraintContext(
        ccfg,
        store=VectorStore.from_file(args.vectors)
        if ccfg.word_sim_threshold is not None
        else None,
        encoder=adapters.build_encoder(args.encoder)
        if ccfg.sent_sim_threshold is not None
        else None,
        checker=adapters.build_grammar_checker(args.grammar)
        if ccfg.grammar_mode != "off"
        else None,
        resources=res,
    )
    victim = adapters.build_victim(args.victim)
    transform = Transform(tcfg)
    loaded = _load_pairs(args, res)
    successes = 0
    vacuous = 0
    total_queries = 0
    with open(out_dir / "attack_results.jsonl", "w", encoding="utf-8") as fh:
        for pair in loaded.pairs:
            result = attack.run_attack(
                pair.original, cfg, victim, transform, context,
                expected_label=pair.label,
            )
            successes += int(result.success)
            vacuous += int(result.vacuous)
            total_queries += result.queries
            payload = reports.attack_result_json(result)
            payload["original"] = pair.original.text()
            fh.write(json.dumps(payload, sort_keys=True) + "\n")
    summary = {
        "preset": args.preset,
        "attacked": len(loaded.pairs),
        "successes": successes,
        "vacuous": vacuous,
        "success_rate": successes / len(loaded.pairs) if loaded.pairs else 0.0,
        "total_queries": total_queries,
    }
    reports.write_json(out_dir / "attack_summary.json", summary)
    print(
        f"{successes}/{len(loaded.pairs)} attacks succeeded "
        f"({vacuous} vacuous, {total_queries} victim queries)"
    )
    return EXIT_OK


# -- parser ---------------------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--inventory",
        default=str(resource_path("mini_inventory.json")),
        help="sense inventory JSON snapshot",
    )
    parser.add_argument(
        "--inflections",
        default=str(resource_path("inflections.json")),
        help="irregular inflection table JSON",
    )
    parser.add_argument("--out-dir", default="ssa-audit-out", help="report directory")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--jobs", type=int, default=1, help="pair-level parallelism")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ssa-audit",
        description="Generate and audit synonym-substitution adversarial samples.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("audit-pairs", help="per-swap substitution taxonomy")
    _add_common(p)
    p.add_argument("--pairs", required=True)
    p.set_defaults(func=cmd_audit_pairs)

    p = sub.add_parser("candidate-stats", help="candidate-set composition by type")
    _add_common(p)
    p.add_argument("--pairs", required=True)
    p.add_argument(
        "--source",
        choices=[WORDNET, EMBEDDING_KNN, MLM_INFILL, MLM_RECONSTRUCT],
        default=EMBEDDING_KNN,
    )
    p.add_argument("--k", type=int, default=30)
    p.add_argument("--vectors", default=str(resource_path("mini_vectors.txt")))
    p.add_argument("--mlm", default="mock://empty")
    p.set_defaults(func=cmd_candidate_stats)

    p = sub.add_parser("detector-aupr", help="threshold-detector AUPR per invalid type")
    _add_common(p)
    p.add_argument("--pairs", required=True)
    p.add_argument("--vectors", default=str(resource_path("mini_vectors.txt")))
    p.add_argument("--freq-table", default=str(resource_path("freq_table.tsv")))
    p.add_argument("--types", default=",".join(audit.DETECTOR_TYPES))
    p.add_argument("--band-high", help="override high band as LO:HI ranks")
    p.add_argument("--band-low", help="override low band as LO:HI ranks")
    p.set_defaults(func=cmd_detector_aupr)

    p = sub.add_parser("encoder-curve", help="swap-series encoder sensitivity curves")
    _add_common(p)
    p.add_argument("--pairs", required=True)
    p.add_argument("--encoder", default="mock://bow")
    p.add_argument("--types", default=",".join(audit.SERIES_TYPES))
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--window", type=int, default=7, help="half-width; negative = whole sentence")
    p.add_argument("--compare-mode", choices=["vs_original", "vs_previous"],
                   default="vs_original")
    p.add_argument("--freq-table", default=str(resource_path("freq_table.tsv")))
    p.add_argument("--band-high", help="override high band as LO:HI ranks")
    p.add_argument("--band-low", help="override low band as LO:HI ranks")
    p.set_defaults(func=cmd_encoder_curve)

    p = sub.add_parser("grammar-stress", help="verb-inflection grammar stress test")
    _add_common(p)
    p.add_argument("--pairs")
    p.add_argument("--sentences", help="plain-text file, one sentence per line")
    p.add_argument("--checker", default="mock://none")
    p.set_defaults(func=cmd_grammar_stress)

    p = sub.add_parser("attack", help="run a preset attack over a pair file")
    _add_common(p)
    p.add_argument("--pairs", required=True)
    p.add_argument("--preset", choices=list(attack.PRESETS), default="textfooler")
    p.add_argument("--vectors", default=str(resource_path("mini_vectors.txt")))
    p.add_argument("--mlm", default="mock://empty")
    p.add_argument("--encoder", default="mock://bow")
    p.add_argument("--grammar", default="mock://none")
    p.add_argument("--victim", required=True)
    p.add_argument("--max-candidates", type=int)
    p.set_defaults(func=cmd_attack)

    return parser


def command_suite(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "pairs", None) is None and getattr(args, "sentences", None) is None:
        if args.command == "grammar-stress":
            print("grammar-stress needs --sentences or --pairs", file=sys.stderr)
            return EXIT_USAGE
    try:
        return args.func(args)
    except AdapterError as exc:
        print(f"adapter error: {exc}", file=sys.stderr)
        return EXIT_ADAPTER
    except (SsaAuditError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(command_suite())
