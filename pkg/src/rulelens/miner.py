"""Class association rule mining for interesting outcome values.

Levelwise enumeration over feature-value items. A rule's support is the
fraction of all training patients matching its LHS and carrying its class
value (the joint count), which is anti-monotone in the LHS and drives the
Apriori-style pruning; confidence is the joint count over the LHS count.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ._kernels import count_candidates, pack_bool
from .dataset import CATEGORICAL, Dataset
from .discretize import bins_from_cuts
from .errors import ConfigError, DataFormatError, SchemaError
from .items import Item, item_from_json, item_to_json

ARROW = "→"


def rule_id(items, class_value: str) -> str:
    """Canonical rule key: items sorted by feature then value, joined by &."""
    keys = [it.key() for it in sorted(items, key=lambda it: it.sort_key())]
    return "&".join(keys) + ARROW + class_value


@dataclass(frozen=True)
class Rule:
    items: tuple[Item, ...]
    class_value: str
    support: float
    confidence: float
    id: str = ""
    interventions: tuple = ()  # curation.Intervention, attached post-mining

    def __post_init__(self):
        ordered = tuple(sorted(self.items, key=lambda it: it.sort_key()))
        object.__setattr__(self, "items", ordered)
        feats = [it.feature for it in ordered]
        if len(feats) != len(set(feats)):
            raise ValueError(f"rule has two items of one feature: {feats}")
        if not ordered:
            raise ValueError("rule needs at least one item")
        if self.support > self.confidence + 1e-12:
            raise ValueError(
                f"support {self.support} exceeds confidence {self.confidence}"
            )
        if not self.id:
            object.__setattr__(self, "id", rule_id(ordered, self.class_value))

    @property
    def actionable(self) -> bool:
        return len(self.interventions) > 0

    def with_interventions(self, interventions) -> "Rule":
        return Rule(self.items, self.class_value, self.support, self.confidence,
                    self.id, tuple(interventions))

    def render_lhs(self) -> str:
        return " AND ".join(it.render() for it in self.items)


def rule_sort_key(rule: Rule) -> tuple:
    return (-rule.confidence, -rule.support, len(rule.items), rule.id)


@dataclass(frozen=True)
class MiningConfig:
    min_support: float = 0.01
    min_confidence: float = 0.5
    max_len: int = 4
    model_features: frozenset[str] | None = None  # None = every schema feature
    interesting_values: tuple[str, ...] | None = None  # None = from the dataset
    # "joint": minimum support counts LHS-and-class rows (the definition used
    # for the reported support). "lhs": counts LHS rows only.
    support_counting: str = "joint"

    def __post_init__(self):
        if not 0 < self.min_support <= self.min_confidence <= 1:
            raise ConfigError(
                f"need 0 < min_support <= min_confidence <= 1, got "
                f"{self.min_support}/{self.min_confidence}"
            )
        if self.max_len < 1:
            raise ConfigError("max_len must be >= 1")
        if self.support_counting not in ("joint", "lhs"):
            raise ConfigError(f"unknown support_counting {self.support_counting!r}")


def build_item_universe(train: Dataset, cuts: dict[str, list[float]],
                        config: MiningConfig) -> list[Item]:
    """All items the miner may place on a LHS, deduplicated, canonical order.

    Only features named in config.model_features contribute (the black box's
    input features); categorical features contribute their declared values,
    continuous ones the bins induced by their cut lists.
    """
    names = set(train.feature_names())
    wanted = config.model_features if config.model_features is not None else names
    missing = sorted(set(wanted) - names)
    if missing:
        raise SchemaError(f"model features not in schema: {missing}")

    items: set[Item] = set()
    for feat in train.schema:
        if feat.name not in wanted:
            continue
        if feat.kind == CATEGORICAL:
            for v in feat.declared_values:
                items.add(Item(feat.name, v))
        else:
            for b in bins_from_cuts(cuts.get(feat.name, [])):
                items.add(Item(feat.name, b))
    return sorted(items, key=lambda it: it.sort_key())


def _item_masks(train: Dataset, items) -> np.ndarray:
    rows = []
    for it in items:
        col = [it.matches(inst.values.get(it.feature)) for inst in train.instances]
        rows.append(pack_bool(np.array(col, dtype=bool)))
    return np.vstack(rows)


def mine(train: Dataset, items, config: MiningConfig) -> list[Rule]:
    """Enumerate every rule meeting the support/confidence/length constraints.

    Output is exact (brute-force-equivalent) and canonically sorted:
    confidence desc, support desc, LHS length asc, id asc.
    """
    if not train.instances:
        raise ValueError("empty training set")
    items = list(items)
    if not items:
        raise ValueError("empty item universe")
    n = len(train.instances)
    interesting = (config.interesting_values
                   if config.interesting_values is not None
                   else train.outcome.interesting_values)

    masks = _item_masks(train, items)
    feat_index = {f: i for i, f in enumerate(sorted({it.feature for it in items}))}
    feat_of = np.array([feat_index[it.feature] for it in items], dtype=np.int32)

    rules: list[Rule] = []
    for v in interesting:
        label_mask = pack_bool(np.array([inst.label == v for inst in train.instances], dtype=bool))
        for cand, lhs_count, joint_count in _frequent_itemsets(
            masks, label_mask, feat_of, n, config
        ):
            if lhs_count == 0:
                continue
            conf = joint_count / lhs_count
            if conf >= config.min_confidence:
                rules.append(Rule(
                    items=tuple(items[i] for i in cand),
                    class_value=v,
                    support=joint_count / n,
                    confidence=conf,
                ))
    rules.sort(key=rule_sort_key)
    return rules


def _frequent_itemsets(masks, label_mask, feat_of, n, config):
    """Yield (item-index tuple, lhs count, joint count) for frequent LHSs."""
    n_items = masks.shape[0]
    min_sup = config.min_support
    on_lhs = config.support_counting == "lhs"

    level = np.arange(n_items, dtype=np.int32).reshape(-1, 1)
    for _ in range(config.max_len):
        if len(level) == 0:
            return
        lhs, joint = count_candidates(masks, label_mask, level)
        counted = joint if not on_lhs else lhs
        keep = (counted / n) >= min_sup
        frequent = level[keep]
        for cand, lc, jc in zip(frequent, lhs[keep], joint[keep]):
            yield tuple(int(i) for i in cand), int(lc), int(jc)
        level = _next_level(frequent, feat_of)


def _next_level(frequent: np.ndarray, feat_of: np.ndarray) -> np.ndarray:
    """Apriori join of sorted k-sets sharing a (k-1)-prefix, plus the
    one-item-per-feature constraint and the all-subsets-frequent prune."""
    if len(frequent) == 0:
        return frequent.reshape(0, frequent.shape[1] + 1)
    k = frequent.shape[1]
    known = {tuple(row) for row in frequent.tolist()}
    out = []
    rows = frequent.tolist()
    i = 0
    while i < len(rows):
        j = i + 1
        prefix = rows[i][:-1]
        block = [rows[i]]
        while j < len(rows) and rows[j][:-1] == prefix:
            block.append(rows[j])
            j += 1
        for a in range(len(block)):
            for b in range(a + 1, len(block)):
                last = block[b][-1]
                # Items of one feature are contiguous in canonical order, so
                # a feature clash can only involve the two tail items.
                if feat_of[last] == feat_of[block[a][-1]]:
                    continue
                cand = block[a] + [last]
                if k >= 2 and not _subsets_frequent(cand, known):
                    continue
                out.append(cand)
        i = j
    if not out:
        return np.empty((0, k + 1), dtype=np.int32)
    return np.array(sorted(out), dtype=np.int32)


def _subsets_frequent(cand: list[int], known: set) -> bool:
    # The two generating (k-1)-subsets are frequent by construction; check
    # the rest.
    for drop in range(len(cand) - 2):
        sub = tuple(cand[:drop] + cand[drop + 1 :])
        if sub not in known:
            return False
    return True


def count_rule(train: Dataset, rule_lhs, v: str) -> tuple[float, float]:
    """Exact (support, confidence) of one LHS against the training set."""
    lhs = list(rule_lhs)
    feats = [it.feature for it in lhs]
    if len(feats) != len(set(feats)):
        raise ValueError("LHS has two items of one feature")
    n = len(train.instances)
    matched = joint = 0
    for inst in train.instances:
        if all(it.matches(inst.values.get(it.feature)) for it in lhs):
            matched += 1
            if inst.label == v:
                joint += 1
    if matched == 0:
        raise ValueError("no coverage: LHS matches no training instance")
    return joint / n, joint / matched


def rule_to_json(rule: Rule) -> dict:
    obj = {
        "id": rule.id,
        "items": [item_to_json(it) for it in rule.items],
        "class_value": rule.class_value,
        "support": rule.support,
        "confidence": rule.confidence,
    }
    return obj


def rule_from_json(obj: dict) -> Rule:
    return Rule(
        items=tuple(item_from_json(o) for o in obj["items"]),
        class_value=obj["class_value"],
        support=float(obj["support"]),
        confidence=float(obj["confidence"]),
        id=obj.get("id", ""),
    )


def save_rules_jsonl(path, rules) -> None:
    """One rule per line: {id, items, class_value, support, confidence}."""
    with open(path, "w", encoding="utf-8") as fh:
        for rule in rules:
            fh.write(json.dumps(rule_to_json(rule), sort_keys=True))
            fh.write("\n")


def load_rules_jsonl(path) -> list[Rule]:
    rules = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rules.append(rule_from_json(json.loads(line)))
            except (json.JSONDecodeError, KeyError) as exc:
                raise DataFormatError(f"{path}:{lineno}: bad rule record: {exc}") from exc
    return rules
