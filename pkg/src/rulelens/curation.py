"""Designer workflow: keep/remove decisions, interventions, item categories
and weights, reviewer agreement, and the versioned annotation store behind
the review service.

A rule or item is actionable exactly when it carries at least one
intervention; the flag is always derived, never stored.
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
from dataclasses import dataclass, replace

from .errors import DataFormatError, SchemaError, VersionConflict
from .items import Item, item_from_json, item_to_json
from .miner import Rule

OUTCOME_DIRECTED = "outcome"
ITEM_DIRECTED = "item"


@dataclass(frozen=True)
class Intervention:
    id: str
    text: str
    target: str = ITEM_DIRECTED  # OUTCOME_DIRECTED or ITEM_DIRECTED

    def __post_init__(self):
        if not self.text:
            raise ValueError("intervention text must be nonempty")
        if self.target not in (OUTCOME_DIRECTED, ITEM_DIRECTED):
            raise ValueError(f"unknown intervention target {self.target!r}")

    def to_json(self) -> dict:
        return {"id": self.id, "text": self.text, "target": self.target}

    @classmethod
    def from_json(cls, obj: dict) -> "Intervention":
        return cls(obj["id"], obj["text"], obj.get("target", ITEM_DIRECTED))


@dataclass(frozen=True)
class ItemAnnotation:
    item: Item
    interventions: tuple[Intervention, ...] = ()
    category: str = ""

    @property
    def actionable(self) -> bool:
        return len(self.interventions) > 0


@dataclass(frozen=True)
class RuleAnnotation:
    rule_id: str
    kept: bool = True
    interventions: tuple[Intervention, ...] = ()
    reviewer: str = ""
    version: int = 0


def suggest_interventions(rule: Rule, item_annotations: dict[str, ItemAnnotation]):
    """Interventions attached to any LHS item, deduplicated by id, LHS order
    preserved. Keys of item_annotations are canonical item keys."""
    seen = set()
    out = []
    for it in rule.items:
        ann = item_annotations.get(it.key())
        if ann is None:
            continue
        for iv in ann.interventions:
            if iv.id not in seen:
                seen.add(iv.id)
                out.append(iv)
    return out


def apply_annotations(rules, rule_annotations: dict[str, RuleAnnotation]) -> list[Rule]:
    """Produce the final classifier: drop rules marked removed, attach
    interventions. Unannotated rules stay kept with no interventions."""
    by_id = {r.id: r for r in rules}
    unknown = sorted(set(rule_annotations) - set(by_id))
    if unknown:
        raise SchemaError(f"annotations reference unknown rule ids: {unknown[:5]}")
    out = []
    for r in rules:
        ann = rule_annotations.get(r.id)
        if ann is None:
            out.append(r.with_interventions(()))
        elif ann.kept:
            out.append(r.with_interventions(ann.interventions))
    return out


def cohens_kappa(review_a: dict[str, bool], review_b: dict[str, bool]) -> float:
    """Two-rater binary Cohen's kappa over identically keyed reviews."""
    if set(review_a) != set(review_b):
        raise ValueError("reviews rate different rule sets")
    n = len(review_a)
    if n < 2:
        raise ValueError("need at least 2 ratings")
    agree = sum(1 for k in review_a if review_a[k] == review_b[k])
    a_true = sum(1 for v in review_a.values() if v)
    b_true = sum(1 for v in review_b.values() if v)
    p_o = agree / n
    p_e = (a_true * b_true + (n - a_true) * (n - b_true)) / (n * n)
    if p_e == 1.0:
        return 1.0
    return (p_o - p_e) / (1 - p_e)


def save_classifier(path, rules) -> None:
    """Final classifier document: kept rules with attached interventions."""
    from .miner import rule_to_json

    doc = {
        "rules": [
            {**rule_to_json(r), "interventions": [iv.to_json() for iv in r.interventions]}
            for r in rules
        ]
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_classifier(path) -> list[Rule]:
    from .miner import rule_from_json

    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: malformed JSON: {exc}") from exc
    rules = []
    for obj in doc["rules"]:
        rule = rule_from_json(obj)
        ivs = tuple(Intervention.from_json(o) for o in obj.get("interventions", []))
        rules.append(rule.with_interventions(ivs))
    return rules


class AnnotationStore:
    """Single JSON document holding every annotation of one review session.

    Mutations are serialized by a lock, guarded by per-record versions
    (stale version -> VersionConflict), and persisted by write-temp-then-
    rename so the file is never half-written.
    """

    def __init__(self, path=None):
        self.path = path
        self._lock = threading.Lock()
        self.rules: dict[str, RuleAnnotation] = {}
        self.items: dict[str, ItemAnnotation] = {}
        self.item_versions: dict[str, int] = {}
        self.weights: dict[str, float] = {}
        self.weights_version = 0
        if path is not None and os.path.exists(path):
            self._load()

    # -- reads ---------------------------------------------------------

    def rule_annotation(self, rule_id: str) -> RuleAnnotation:
        return self.rules.get(rule_id, RuleAnnotation(rule_id=rule_id))

    def item_annotation(self, item: Item) -> ItemAnnotation:
        return self.items.get(item.key(), ItemAnnotation(item=item))

    def item_annotations_by_key(self) -> dict[str, ItemAnnotation]:
        return dict(self.items)

    def category_weights(self) -> dict[str, float]:
        return dict(self.weights)

    # -- mutations -----------------------------------------------------

    def set_rule(self, rule_id: str, version: int, kept=None, interventions=None,
                 reviewer=None) -> RuleAnnotation:
        with self._lock:
            current = self.rules.get(rule_id, RuleAnnotation(rule_id=rule_id))
            if version != current.version:
                raise VersionConflict(
                    f"rule {rule_id!r}: version {version} != current {current.version}"
                )
            updated = replace(
                current,
                kept=current.kept if kept is None else kept,
                interventions=current.interventions if interventions is None
                else tuple(interventions),
                reviewer=current.reviewer if reviewer is None else reviewer,
                version=current.version + 1,
            )
            self.rules[rule_id] = updated
            self._persist()
            return updated

    def set_item(self, item: Item, version: int, interventions=None,
                 category=None) -> tuple[ItemAnnotation, int]:
        key = item.key()
        with self._lock:
            current_version = self.item_versions.get(key, 0)
            if version != current_version:
                raise VersionConflict(
                    f"item {key!r}: version {version} != current {current_version}"
                )
            current = self.items.get(key, ItemAnnotation(item=item))
            updated = ItemAnnotation(
                item=item,
                interventions=current.interventions if interventions is None
                else tuple(interventions),
                category=current.category if category is None else category,
            )
            self.items[key] = updated
            self.item_versions[key] = current_version + 1
            self._persist()
            return updated, current_version + 1

    def set_weights(self, weights: dict[str, float], version: int) -> int:
        for cat, w in weights.items():
            if not w > 0:
                raise ValueError(f"category {cat!r}: weight must be > 0")
        with self._lock:
            if version != self.weights_version:
                raise VersionConflict(
                    f"weights: version {version} != current {self.weights_version}"
                )
            self.weights = {k: float(v) for k, v in weights.items()}
            self.weights_version += 1
            self._persist()
            return self.weights_version

    # -- persistence ---------------------------------------------------

    def _persist(self) -> None:
        if self.path is None:
            return
        doc = {
            "rules": {
                rid: {
                    "kept": a.kept,
                    "interventions": [iv.to_json() for iv in a.interventions],
                    "reviewer": a.reviewer,
                    "version": a.version,
                }
                for rid, a in sorted(self.rules.items())
            },
            "items": {
                key: {
                    "item": item_to_json(a.item),
                    "interventions": [iv.to_json() for iv in a.interventions],
                    "category": a.category,
                    "version": self.item_versions.get(key, 0),
                }
                for key, a in sorted(self.items.items())
            },
            "category_weights": {"weights": self.weights, "version": self.weights_version},
        }
        directory = os.path.dirname(os.path.abspath(self.path))
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".annotations-", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(doc, fh, indent=2, sort_keys=True)
                fh.write("\n")
            os.replace(tmp, self.path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def _load(self) -> None:
        try:
            with open(self.path, encoding="utf-8") as fh:
                doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"{self.path}: malformed JSON: {exc}") from exc
        for rid, a in doc.get("rules", {}).items():
            self.rules[rid] = RuleAnnotation(
                rule_id=rid,
                kept=a["kept"],
                interventions=tuple(Intervention.from_json(o) for o in a["interventions"]),
                reviewer=a.get("reviewer", ""),
                version=a["version"],
            )
        for key, a in doc.get("items", {}).items():
            self.items[key] = ItemAnnotation(
                item=item_from_json(a["item"]),
                interventions=tuple(Intervention.from_json(o) for o in a["interventions"]),
                category=a.get("category", ""),
            )
            self.item_versions[key] = a["version"]
        cw = doc.get("category_weights", {})
        self.weights = {k: float(v) for k, v in cw.get("weights", {}).items()}
        self.weights_version = cw.get("version", 0)
