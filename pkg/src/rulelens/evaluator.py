"""Evaluation harness: score-to-prediction cutoff, confusion-matrix
metrics, rank-based AUC, and the explanation-coverage statistics with
their per-patient distributions.
"""

from __future__ import annotations

import csv
import json
import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .curation import ItemAnnotation
from .dataset import Dataset
from .errors import ConfigError, DataFormatError
from .explainer import applicable_rules


def youden_cutoff(scores, labels) -> float:
    """Threshold maximizing sensitivity + specificity; predicted positive
    means score >= threshold.

    Candidates are midpoints between consecutive distinct sorted scores plus
    a sentinel below the minimum (everything positive) and one above the
    maximum (everything negative); ties go to the smallest threshold.
    """
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=bool)
    if scores.shape != labels.shape:
        raise ValueError("scores and labels must align")
    n_pos = int(labels.sum())
    n_neg = int(labels.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise ValueError("both classes must be present")

    order = np.argsort(scores, kind="stable")
    s = scores[order]
    y = labels[order]
    distinct_starts = np.flatnonzero(np.r_[True, s[1:] != s[:-1]])
    # Candidate i splits at index cutoffs[i]: rows [cut:] predicted positive.
    cuts = [0]
    thresholds = [float(s[0]) - 1.0]
    for j in range(1, len(distinct_starts)):
        idx = int(distinct_starts[j])
        cuts.append(idx)
        thresholds.append((float(s[idx - 1]) + float(s[idx])) / 2.0)
    cuts.append(len(s))
    thresholds.append(float(s[-1]) + 1.0)

    pos_prefix = np.r_[0, np.cumsum(y)]
    best_j = -math.inf
    best_t = None
    for cut, t in zip(cuts, thresholds):
        tp = n_pos - int(pos_prefix[cut])
        tn = cut - int(pos_prefix[cut])
        j = tp / n_pos + tn / n_neg
        if j > best_j:
            best_j = j
            best_t = t
    return best_t


def classification_metrics(predictions, labels) -> dict[str, float]:
    """Confusion-matrix ratios; ratios with a zero denominator are simply
    absent from the result."""
    predictions = list(predictions)
    labels = list(labels)
    if len(predictions) != len(labels):
        raise ValueError("predictions and labels must align")
    if not predictions:
        raise ValueError("empty input")
    tp = sum(1 for p, l in zip(predictions, labels) if p and l)
    fp = sum(1 for p, l in zip(predictions, labels) if p and not l)
    tn = sum(1 for p, l in zip(predictions, labels) if not p and not l)
    fn = sum(1 for p, l in zip(predictions, labels) if not p and l)
    out = {"accuracy": (tp + tn) / len(predictions)}
    if tp + fn:
        out["sensitivity"] = tp / (tp + fn)
    if tn + fp:
        out["specificity"] = tn / (tn + fp)
    if tp + fp:
        out["ppv"] = tp / (tp + fp)
    if tn + fn:
        out["npv"] = tn / (tn + fn)
    return out


def auc(scores, labels) -> float:
    """Probability a positive outscores a negative, ties counting half;
    computed by the midrank formulation, exactly equal to pairwise
    enumeration."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=bool)
    n_pos = int(labels.sum())
    n_neg = int(labels.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise ValueError("both classes must be present")
    order = np.argsort(scores, kind="stable")
    ranks = np.empty(len(scores), dtype=float)
    s = scores[order]
    i = 0
    while i < len(s):
        j = i
        while j + 1 < len(s) and s[j + 1] == s[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    rank_sum = float(ranks[labels].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


@dataclass(frozen=True)
class CoverageStats:
    coverage_correct_positives: float
    coverage_correct_positives_actionable: float
    coverage_all_positives: float
    mean_rules_per_explained: float
    mean_actionable_rules_per_explained: float
    mean_identified_actionable_items: float
    hist_rules: dict[int, int]
    hist_actionable_rules: dict[int, int]
    hist_actionable_items: dict[int, int]

    def to_json(self) -> dict:
        return {
            "coverage_correct_positives": self.coverage_correct_positives,
            "coverage_correct_positives_actionable": self.coverage_correct_positives_actionable,
            "coverage_all_positives": self.coverage_all_positives,
            "mean_rules_per_explained": self.mean_rules_per_explained,
            "mean_actionable_rules_per_explained": self.mean_actionable_rules_per_explained,
            "mean_identified_actionable_items": self.mean_identified_actionable_items,
            "hist_rules": {str(k): v for k, v in sorted(self.hist_rules.items())},
            "hist_actionable_rules": {str(k): v for k, v in sorted(self.hist_actionable_rules.items())},
            "hist_actionable_items": {str(k): v for k, v in sorted(self.hist_actionable_items.items())},
        }


def coverage_stats(test: Dataset, predictions, classifier,
                   item_annotations: dict[str, ItemAnnotation] | None = None,
                   interesting_value: str | None = None) -> CoverageStats:
    """Explanation-coverage statistics over the test set.

    predictions[i] is True when patient i is predicted to have the
    interesting value. Coverage of correct positives counts patients both
    labeled and predicted interesting; means and histograms run over the
    explained subset of those (patients with at least one applicable rule).
    """
    if interesting_value is None:
        interesting = test.outcome.interesting_values
        if len(interesting) != 1:
            raise ConfigError("several interesting values; pass interesting_value")
        interesting_value = interesting[0]
    predictions = list(predictions)
    if len(predictions) != len(test.instances):
        raise ValueError("predictions and test instances must align")
    anns = item_annotations or {}

    def is_actionable_item(key: str) -> bool:
        ann = anns.get(key)
        return ann is not None and ann.actionable

    n_correct_pos = 0
    n_all_pos = 0
    n_all_pos_explained = 0
    explained = 0
    explained_actionable = 0
    rule_counts = []
    actionable_counts = []
    item_counts = []
    for inst, pred in zip(test.instances, predictions):
        positive = inst.label == interesting_value
        if not positive:
            continue
        applicable = applicable_rules(inst, classifier, interesting_value)
        n_all_pos += 1
        if applicable:
            n_all_pos_explained += 1
        if not pred:
            continue
        n_correct_pos += 1
        if not applicable:
            continue
        explained += 1
        n_actionable = sum(1 for r in applicable if r.actionable)
        if n_actionable:
            explained_actionable += 1
        distinct_actionable = {
            it.key() for r in applicable for it in r.items if is_actionable_item(it.key())
        }
        rule_counts.append(len(applicable))
        actionable_counts.append(n_actionable)
        item_counts.append(len(distinct_actionable))

    def ratio(num, den):
        return num / den if den else 0.0

    return CoverageStats(
        coverage_correct_positives=ratio(explained, n_correct_pos),
        coverage_correct_positives_actionable=ratio(explained_actionable, n_correct_pos),
        coverage_all_positives=ratio(n_all_pos_explained, n_all_pos),
        mean_rules_per_explained=ratio(sum(rule_counts), explained),
        mean_actionable_rules_per_explained=ratio(sum(actionable_counts), explained),
        mean_identified_actionable_items=ratio(sum(item_counts), explained),
        hist_rules=dict(Counter(rule_counts)),
        hist_actionable_rules=dict(Counter(actionable_counts)),
        hist_actionable_items=dict(Counter(item_counts)),
    )


def load_scores(path) -> dict[str, float]:
    """CSV of (patient_id, score); ids must be unique."""
    out: dict[str, float] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"patient_id", "score"} <= set(reader.fieldnames):
            raise DataFormatError(f"{path}: need columns patient_id,score")
        for lineno, row in enumerate(reader, start=2):
            pid = row["patient_id"]
            if pid in out:
                raise DataFormatError(f"{path}:{lineno}: duplicate patient id {pid!r}")
            try:
                out[pid] = float(row["score"])
            except ValueError:
                raise DataFormatError(
                    f"{path}:{lineno}: score not a number: {row['score']!r}"
                ) from None
    return out


def save_scores(path, scores: dict[str, float]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["patient_id", "score"])
        for pid, score in scores.items():
            writer.writerow([pid, repr(float(score))])


def align_scores(scores: dict[str, float], dataset: Dataset) -> np.ndarray:
    missing = [inst.id for inst in dataset.instances if inst.id not in scores]
    if missing:
        raise DataFormatError(f"unscored patients: {missing[:5]}")
    return np.array([scores[inst.id] for inst in dataset.instances], dtype=float)


def save_histogram_csv(path, hist: dict[int, int], value_name: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([value_name, "patients"])
        for k in sorted(hist):
            writer.writerow([k, hist[k]])


def save_stats_json(path, stats: CoverageStats, metrics: dict | None = None,
                    extra: dict | None = None) -> None:
    doc = stats.to_json()
    if metrics is not None:
        doc["model_metrics"] = metrics
    if extra:
        doc.update(extra)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
