"""Prediction-time explanation: applicable rules for one patient, ranked
and diversified down to a small display set.

Two selection schemes: greedy item-disjoint scanning with a wrap-around
fill pass, and category-weight maximization with weight zeroing after each
pick. Selected rules are re-sorted into display order (actionable block
first, confidence descending) regardless of selection order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .curation import ItemAnnotation
from .dataset import Instance
from .errors import ConfigError
from .items import item_to_json
from .miner import Rule, rule_sort_key

DISJOINT = "disjoint"
WEIGHTED = "weighted"


@dataclass(frozen=True)
class ExplanationConfig:
    n_r: int = 5
    algorithm: str = DISJOINT
    show_nonactionable: bool = True
    category_weights: dict[str, float] | None = None
    # Track all LHS items for disjointness instead of actionable items only.
    disjoint_on_all_items: bool = False
    full_view: bool = False

    def __post_init__(self):
        if self.n_r < 1:
            raise ConfigError("n_r must be >= 1")
        if self.algorithm not in (DISJOINT, WEIGHTED):
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        if self.algorithm == WEIGHTED and self.category_weights is None:
            raise ConfigError("weighted selection requires category weights")


@dataclass(frozen=True)
class ExplanationReport:
    patient_id: str
    predicted_value: str
    rules: tuple[Rule, ...]
    truncated: bool
    total_applicable: int
    total_actionable_applicable: int

    def to_json(self) -> dict:
        return {
            "patient_id": self.patient_id,
            "predicted_value": self.predicted_value,
            "rules": [
                {
                    "id": r.id,
                    "items": [item_to_json(it) for it in r.items],
                    "confidence": r.confidence,
                    "interventions": [iv.to_json() for iv in r.interventions],
                }
                for r in self.rules
            ],
            "truncated": self.truncated,
            "total_applicable": self.total_applicable,
            "total_actionable_applicable": self.total_actionable_applicable,
        }


def applicable_rules(instance: Instance, rules, predicted_value: str) -> list[Rule]:
    """Rules for the predicted value whose whole LHS the patient satisfies;
    a missing feature value satisfies nothing."""
    return [
        r
        for r in rules
        if r.class_value == predicted_value
        and all(it.matches(instance.values.get(it.feature)) for it in r.items)
    ]


def rank_rules(applicable) -> list[Rule]:
    """Display order: actionable block first, then confidence desc, support
    desc, id asc within each block."""
    return sorted(applicable, key=lambda r: (not r.actionable, rule_sort_key(r)))


def _tracked_items(rule: Rule, item_annotations, all_items: bool) -> set[str]:
    """Item keys a selected rule occupies for the disjointness check:
    actionable items for actionable rules, all items otherwise."""
    if all_items or not rule.actionable:
        return {it.key() for it in rule.items}
    anns = item_annotations or {}
    return {
        it.key()
        for it in rule.items
        if (a := anns.get(it.key())) is not None and a.actionable
    }


def _greedy_disjoint(candidates, budget, used, item_annotations, all_items):
    """One scan selecting item-disjoint rules, then a wrap-around pass taking
    unchosen rules in list order until the budget is spent."""
    selected = []
    for r in candidates:
        if len(selected) >= budget:
            break
        tracked = _tracked_items(r, item_annotations, all_items)
        if used & tracked:
            continue
        selected.append(r)
        used |= tracked
    if len(selected) < budget:
        chosen = {r.id for r in selected}
        for r in candidates:
            if len(selected) >= budget:
                break
            if r.id not in chosen:
                selected.append(r)
                used |= _tracked_items(r, item_annotations, all_items)
    return selected


def select_disjoint(ranked, n_r: int, item_annotations=None,
                    all_items: bool = False) -> list[Rule]:
    """Greedy item-disjoint selection over a ranked list.

    When the actionable rules fit within n_r they are all taken; otherwise
    the top one seeds a disjoint scan with a wrap-around second pass.
    Remaining slots are filled from the nonactionable block by the same
    scheme, checked against everything already selected.
    """
    actionable = [r for r in ranked if r.actionable]
    nonactionable = [r for r in ranked if not r.actionable]
    used: set[str] = set()
    if len(actionable) <= n_r:
        selected = list(actionable)
        for r in actionable:
            used |= _tracked_items(r, item_annotations, all_items)
    else:
        selected = _greedy_disjoint(actionable, n_r, used, item_annotations, all_items)
    if len(selected) < n_r:
        selected += _greedy_disjoint(
            nonactionable, n_r - len(selected), used, item_annotations, all_items
        )
    return selected


def select_weighted(ranked_actionable, n_r: int,
                    item_annotations: dict[str, ItemAnnotation],
                    category_weights: dict[str, float]) -> list[Rule]:
    """Pick rules by descending total actionable-item weight, zeroing each
    picked rule's item weights, recomputing, first-encountered on ties."""
    item_weights: dict[str, float] = {}
    for r in ranked_actionable:
        for it in r.items:
            key = it.key()
            if key in item_weights:
                continue
            ann = item_annotations.get(key) if item_annotations else None
            if ann is None or not ann.actionable:
                continue
            if not ann.category:
                raise ConfigError(f"actionable item {key!r} has no category")
            if ann.category not in category_weights:
                raise ConfigError(f"no weight for category {ann.category!r}")
            w = category_weights[ann.category]
            if not w > 0:
                raise ConfigError(f"category {ann.category!r}: weight must be > 0")
            item_weights[key] = w

    remaining = list(ranked_actionable)
    selected = []
    while remaining and len(selected) < n_r:
        best = None
        best_weight = None
        for r in remaining:
            w = sum(item_weights.get(it.key(), 0.0) for it in r.items)
            if best is None or w > best_weight:
                best, best_weight = r, w
        selected.append(best)
        remaining.remove(best)
        for it in best.items:
            if it.key() in item_weights:
                item_weights[it.key()] = 0.0
    return selected


def explain(instance: Instance, predicted_value: str, classifier,
            config: ExplanationConfig, item_annotations=None) -> ExplanationReport:
    """Full explanation for one patient: find, rank, select, report."""
    applicable = applicable_rules(instance, classifier, predicted_value)
    ranked = rank_rules(applicable)
    n_actionable = sum(1 for r in ranked if r.actionable)

    visible = ranked if config.show_nonactionable else [r for r in ranked if r.actionable]
    if config.full_view:
        selected = visible
    elif config.algorithm == DISJOINT:
        selected = select_disjoint(
            visible, config.n_r, item_annotations, config.disjoint_on_all_items
        )
    else:
        if config.category_weights is None:
            raise ConfigError("weighted selection requires category weights")
        actionable = [r for r in visible if r.actionable]
        selected = select_weighted(
            actionable, config.n_r, item_annotations or {}, config.category_weights
        )
        if config.show_nonactionable and len(selected) < config.n_r:
            used: set[str] = set()
            for r in selected:
                used |= _tracked_items(r, item_annotations, config.disjoint_on_all_items)
            selected += _greedy_disjoint(
                [r for r in visible if not r.actionable],
                config.n_r - len(selected),
                used,
                item_annotations,
                config.disjoint_on_all_items,
            )

    display = sorted(selected, key=lambda r: (not r.actionable, rule_sort_key(r)))
    return ExplanationReport(
        patient_id=instance.id,
        predicted_value=predicted_value,
        rules=tuple(display),
        truncated=len(display) < len(visible),
        total_applicable=len(applicable),
        total_actionable_applicable=n_actionable,
    )


def save_reports_jsonl(path, reports) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rep in reports:
            fh.write(json.dumps(rep.to_json(), sort_keys=True))
            fh.write("\n")
