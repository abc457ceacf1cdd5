"""Utilities to turn classifier results into report records and summaries."""

from __future__ import annotations

from collections import Counter
from typing import Any, Iterable, Mapping

from ..classifiers.binary import BinaryCubicClass
from ..classifiers.ternary import TernaryCubicClass
from ..lc_core.records import form_to_record, scalar_to_json, transform_to_record


def binary_class_record(result: BinaryCubicClass) -> dict[str, Any]:
    return {
        "label": result.label.value,
        "discriminant": scalar_to_json(result.discriminant),
        "stable": result.is_stable,
        "witness_matrix": transform_to_record(result.witness),
        "witness_residual": result.witness_residual,
        "witness_verified": result.witness_verified,
        "normal_form": form_to_record(result.normal_form),
        "near_degenerate": result.near_degenerate,
    }


def ternary_class_record(result: TernaryCubicClass) -> dict[str, Any]:
    record: dict[str, Any] = {
        "label": result.label.value,
        "stability": result.stability.value,
        "essential_variables": result.essential_variables,
    }
    if result.sigma is not None:
        record["sigma"] = float(result.sigma)
        record["sigma_set"] = [float(s) for s in result.sigma_set]
    if result.circuits is not None:
        record["circuits"] = result.circuits
    record["singular_points"] = [point.as_record() for point in result.singular_points]
    record["witness"] = transform_to_record(result.witness)
    record["witness_residual"] = result.witness_residual
    record["witness_verified"] = result.witness_verified
    record["normal_form"] = form_to_record(result.normal_form)
    record["near_degenerate"] = result.near_degenerate
    return record


def label_histogram(labels: Iterable[str]) -> dict[str, int]:
    return dict(sorted(Counter(labels).items()))


def round_trip_summary(rows: Iterable[Mapping[str, Any]]) -> dict[str, Any]:
    """Aggregate ``{label, recovered, near_degenerate}`` rows per expected label."""

    totals: Counter[str] = Counter()
    matches: Counter[str] = Counter()
    flagged: Counter[str] = Counter()
    confusion: dict[str, Counter[str]] = {}
    for row in rows:
        label = row["label"]
        totals[label] += 1
        if row["recovered"] == label:
            matches[label] += 1
        else:
            confusion.setdefault(label, Counter())[row["recovered"]] += 1
            if row["near_degenerate"]:
                flagged[label] += 1
    per_label = {
        label: {
            "trials": totals[label],
            "matches": matches[label],
            "match_rate": matches[label] / totals[label],
            "mismatches_flagged": flagged[label],
            "confused_with": dict(sorted(confusion.get(label, Counter()).items())),
        }
        for label in sorted(totals)
    }
    trials = sum(totals.values())
    return {
        "trials": trials,
        "matches": sum(matches.values()),
        "match_rate": sum(matches.values()) / trials if trials else 0.0,
        "unflagged_mismatches": trials - sum(matches.values()) - sum(flagged.values()),
        "labels": per_label,
    }


def circuit_agreement(rows: Iterable[Mapping[str, Any]]) -> dict[str, Any]:
    """Fraction of ``{expected, weierstrass, sampled}`` rows where all three agree."""

    rows = list(rows)
    if not rows:
        return {"samples": 0, "agreement": 0.0, "weierstrass_correct": 0.0, "sampler_correct": 0.0}
    agree = sum(1 for r in rows if r["expected"] == r["weierstrass"] == r["sampled"])
    return {
        "samples": len(rows),
        "agreement": agree / len(rows),
        "weierstrass_correct": sum(1 for r in rows if r["weierstrass"] == r["expected"]) / len(rows),
        "sampler_correct": sum(1 for r in rows if r["sampled"] == r["expected"]) / len(rows),
    }
