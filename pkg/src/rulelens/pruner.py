"""Automatic rule-pruning cascade.

Three order-independent passes: drop specific rules dominated by more
general, at-least-as-confident ones; drop specific rules whose more general
counterpart is within a confidence threshold below them; keep only rules
built from whitelisted values. Existence checks always run against a
stage's full input set, so permuting the input never changes the surviving
set.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import ConfigError, DataFormatError
from .items import Bin, Item, item_from_json, item_to_json, _inf_in, _inf_out
from .miner import Rule

STAGES = ("mined", "redundancy", "confidence_diff", "allowed_values")


@dataclass(frozen=True)
class PruneConfig:
    confidence_diff_threshold: float = 0.10
    # feature -> allowed categories/bins. None skips the whitelist stage;
    # an empty dict allows nothing anywhere.
    allowed_values: dict[str, set] | None = None

    def __post_init__(self):
        if self.confidence_diff_threshold < 0:
            raise ConfigError("confidence difference threshold must be >= 0")


def _general_rules_of(rule: Rule, by_lhs: dict, min_conf: float, max_conf: float):
    """Yield same-class rules over a strict subset of rule's items whose
    confidence lies in [min_conf, max_conf]."""
    items = rule.items
    m = len(items)
    # Proper nonempty subsets; m <= max rule length, so this stays tiny.
    for mask in range(1, (1 << m) - 1):
        sub = tuple(items[i] for i in range(m) if mask >> i & 1)
        g = by_lhs.get((sub, rule.class_value))
        if g is not None and min_conf <= g.confidence <= max_conf:
            yield g


def _lhs_index(rules) -> dict:
    return {(r.items, r.class_value): r for r in rules}


def prune_redundant(rules) -> list[Rule]:
    """Drop every rule with a more general same-class rule of confidence >=
    its own in the input set."""
    by_lhs = _lhs_index(rules)
    return [
        r
        for r in rules
        if next(_general_rules_of(r, by_lhs, r.confidence, 1.0), None) is None
    ]


def prune_confidence_diff(rules, delta: float) -> list[Rule]:
    """Drop every rule with a more general same-class rule whose confidence
    is below its own by at most delta (strictly below; ties were already
    handled by the redundancy pass)."""
    if delta < 0:
        raise ConfigError("delta must be >= 0")
    by_lhs = _lhs_index(rules)
    out = []
    for r in rules:
        lo = r.confidence - delta
        hi = r.confidence  # exclusive
        remover = None
        for g in _general_rules_of(r, by_lhs, lo, hi):
            if g.confidence < hi:
                remover = g
                break
        if remover is None:
            out.append(r)
    return out


def filter_allowed_values(rules, allowed_values: dict[str, set],
                          known_items=None) -> list[Rule]:
    """Keep rules whose every LHS value is whitelisted for its feature.

    A feature absent from the map allows nothing. Bins must equal a produced
    bin exactly; with known_items given, whitelist entries that match no
    known item are rejected as configuration errors.
    """
    if known_items is not None:
        known = set(known_items)
        for feat, vals in allowed_values.items():
            for v in vals:
                if Item(feat, v) not in known:
                    kind = "bin" if isinstance(v, Bin) else "value"
                    raise ConfigError(
                        f"allowed {kind} {Item(feat, v).key()!r} matches no known item"
                    )
    return [
        r
        for r in rules
        if all(it.value in allowed_values.get(it.feature, ()) for it in r.items)
    ]


def prune_cascade(rules, config: PruneConfig,
                  known_items=None) -> tuple[list[Rule], list[int]]:
    """Run all passes in the reported order; returns (survivors, counts),
    counts being [input, after redundancy, after confidence-diff, after
    whitelist]."""
    counts = [len(rules)]
    rules = prune_redundant(rules)
    counts.append(len(rules))
    rules = prune_confidence_diff(rules, config.confidence_diff_threshold)
    counts.append(len(rules))
    if config.allowed_values is not None:
        rules = filter_allowed_values(rules, config.allowed_values, known_items)
    counts.append(len(rules))
    return rules, counts


def stage_report(counts) -> list[dict]:
    return [{"stage": s, "count": int(c)} for s, c in zip(STAGES, counts)]


def save_stage_report(path, counts) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(stage_report(counts), fh, indent=2, sort_keys=True)
        fh.write("\n")


def save_stage_csv(path, sweep: dict[float, int]) -> None:
    """delta -> surviving-rule count, for plotting the threshold curve."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("delta,count\n")
        for delta in sorted(sweep):
            fh.write(f"{delta},{sweep[delta]}\n")


def load_allowed_values(path) -> dict[str, set]:
    """JSON map feature -> [category | {lo, hi}]."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: malformed JSON: {exc}") from exc
    out: dict[str, set] = {}
    for feat, vals in raw.items():
        parsed = set()
        for v in vals:
            if isinstance(v, dict):
                parsed.add(Bin(_inf_in(v["lo"]), _inf_in(v["hi"])))
            else:
                parsed.add(v)
        out[feat] = parsed
    return out


def save_allowed_values(path, allowed: dict[str, set]) -> None:
    doc = {}
    for feat, vals in sorted(allowed.items()):
        rendered = []
        for v in sorted(vals, key=lambda x: Item(feat, x).sort_key()):
            if isinstance(v, Bin):
                rendered.append({"lo": _inf_out(v.lo), "hi": _inf_out(v.hi)})
            else:
                rendered.append(v)
        doc[feat] = rendered
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
