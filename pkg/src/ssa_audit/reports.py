"""Report rendering: CSV rows, Markdown tables, JSON score dumps.

All writers are deterministic: fixed column orders, sorted keys, and
repr-stable float formatting, so identical runs produce byte-identical
files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Sequence

from .attack import AttackResult
from .audit import (
    CompositionReport,
    CurveReport,
    DetectorReport,
    GrammarStressReport,
    SubstitutionType,
    TaxonomyReport,
)

TYPE_COLUMNS = [t.value for t in SubstitutionType]


def write_csv(path: str | Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_json(path: str | Path, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def markdown_table(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    lines = [
        "| " + " | ".join(str(h) for h in header) + " |",
        "|" + "|".join("---" for _ in header) + "|",
    ]
    for row in rows:
        lines.append("| " + " | ".join(str(c) for c in row) + " |")
    return "\n".join(lines) + "\n"


def _fmt(x: float) -> str:
    return f"{x:.6f}"


# -- taxonomy -----------------------------------------------------------------


def taxonomy_rows(report: TaxonomyReport) -> list[list]:
    fractions = report.fractions()
    return [
        [t, report.counts[t], _fmt(fractions[t])]
        for t in TYPE_COLUMNS
    ]


def taxonomy_csv(report: TaxonomyReport, path: str | Path) -> None:
    write_csv(path, ["type", "count", "fraction"], taxonomy_rows(report))


def taxonomy_markdown(report: TaxonomyReport) -> str:
    table = markdown_table(["Type", "Count", "Fraction"], taxonomy_rows(report))
    summary = (
        f"\nPairs: {report.pairs}; swaps classified: {report.total}; "
        f"swaps per pair: {report.per_pair_swaps:.2f}; "
        f"words without sense entries: {report.no_sense}\n"
    )
    return table + summary


def taxonomy_json(report: TaxonomyReport) -> dict:
    return {
        "counts": report.counts,
        "fractions": report.fractions(),
        "total": report.total,
        "pairs": report.pairs,
        "no_sense": report.no_sense,
        "per_pair_swaps": report.per_pair_swaps,
    }


# -- candidate composition ------------------------------------------------------


def composition_rows(report: CompositionReport) -> list[list]:
    means = report.means()
    return [[t, report.totals[t], _fmt(means[t])] for t in TYPE_COLUMNS]


def composition_csv(report: CompositionReport, path: str | Path) -> None:
    write_csv(path, ["type", "count", "mean_per_position"], composition_rows(report))


def composition_markdown(report: CompositionReport) -> str:
    means = report.means()
    table = markdown_table(
        ["Matched", "Mismatched", "Antonyms", "Morphemes", "Others"],
        [[
            _fmt(means["matched"]),
            _fmt(means["mismatched"]),
            _fmt(means["antonym"]),
            _fmt(means["morphological"]),
            _fmt(means["other"]),
        ]],
    )
    summary = (
        f"\nk = {report.k}; positions audited: {report.positions}; "
        f"mean candidates per position: {report.mean_candidates:.2f}; "
        f"positions skipped on adapter errors: {report.error_positions}\n"
    )
    return table + summary


def composition_json(report: CompositionReport) -> dict:
    return {
        "k": report.k,
        "positions": report.positions,
        "totals": report.totals,
        "means": report.means(),
        "error_positions": report.error_positions,
        "mean_candidates": report.mean_candidates,
    }


# -- detector AUPR ---------------------------------------------------------------


def detector_rows(report: DetectorReport) -> list[list]:
    return [
        [t, _fmt(score), n_pos, n_neg] for t, score, n_pos, n_neg in report.rows
    ]


def detector_csv(report: DetectorReport, path: str | Path) -> None:
    write_csv(path, ["type", "aupr", "n_positive", "n_negative"], detector_rows(report))


def detector_markdown(report: DetectorReport) -> str:
    table = markdown_table(
        ["Substitution Type", "AUPR"],
        [[t, _fmt(score)] for t, score, _, _ in report.rows],
    )
    notes = ""
    if report.warnings:
        notes = "\n" + "\n".join(f"- {w}" for w in report.warnings) + "\n"
    return table + notes


def detector_json(report: DetectorReport) -> dict:
    return {
        "rows": [
            {"type": t, "aupr": a, "n_positive": p, "n_negative": n}
            for t, a, p, n in report.rows
        ],
        "n_positives": report.n_positives,
        "oov_positions": report.oov_positions,
        "warnings": report.warnings,
    }


# -- encoder curves ----------------------------------------------------------------


def curve_rows(report: CurveReport) -> list[list]:
    rows = []
    for series_type in sorted(report.curves):
        for point in report.curves[series_type]:
            rows.append(
                [series_type, point.n, _fmt(point.mean), _fmt(point.stdev), point.samples]
            )
    return rows


def curve_csv(report: CurveReport, path: str | Path) -> None:
    write_csv(path, ["type", "n", "mean", "stdev", "samples"], curve_rows(report))


def curve_json(report: CurveReport) -> dict:
    return {
        "compare_mode": report.compare_mode,
        "window": report.window,
        "n_max": report.n_max,
        "curves": {
            t: [
                {"n": p.n, "mean": p.mean, "stdev": p.stdev, "samples": p.samples}
                for p in points
            ]
            for t, points in report.curves.items()
        },
        "raw_scores": {
            t: {str(n): values for n, values in by_n.items()}
            for t, by_n in report.raw_scores.items()
        },
        "skipped_pairs": report.skipped_pairs,
        "partial": report.partial,
        "error": report.error,
    }


# -- grammar stress -----------------------------------------------------------------


def grammar_stress_json(report: GrammarStressReport) -> dict:
    return {
        "considered": report.considered,
        "grammatical": report.grammatical,
        "total_converted": report.total_converted,
        "total_detected": report.total_detected,
        "avg_perturbed_verbs": report.avg_perturbed_verbs,
        "avg_detected_errors": report.avg_detected_errors,
        "detection_ratio": report.detection_ratio,
    }


def grammar_stress_csv(report: GrammarStressReport, path: str | Path) -> None:
    payload = grammar_stress_json(report)
    keys = sorted(payload)
    write_csv(path, ["metric", "value"], [[k, payload[k]] for k in keys])


# -- attack results -------------------------------------------------------------------


def attack_result_json(result: AttackResult) -> dict:
    return {
        "success": result.success,
        "vacuous": result.vacuous,
        "queries": result.queries,
        "perturbed_indices": list(result.perturbed_indices),
        "adversarial": result.adversarial.text() if result.adversarial else None,
        "steps": [
            {
                "position": s.position,
                "original": s.original,
                "replacement": s.replacement,
                "prob_before": s.prob_before,
                "prob_after": s.prob_after,
                "flipped": s.flipped,
            }
            for s in result.per_step_log
        ],
    }
