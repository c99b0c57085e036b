"""Diversified-selection fixtures traced by hand, plus ranking and report
composition checks."""

import pytest

from rulelens.curation import Intervention, ItemAnnotation
from rulelens.dataset import Instance
from rulelens.errors import ConfigError
from rulelens.explainer import (
    ExplanationConfig,
    applicable_rules,
    explain,
    rank_rules,
    select_disjoint,
    select_weighted,
)
from rulelens.items import Bin, Item
from rulelens.miner import Rule

IV = Intervention("iv1", "do something")


def rule(feats, conf, v="v", support=0.05, actionable=False):
    r = Rule(items=tuple(Item(f, "yes") for f in feats), class_value=v,
             support=support, confidence=conf)
    return r.with_interventions((IV,)) if actionable else r


def annotate_all_items(rules, category="general"):
    """Item annotations making every LHS item actionable."""
    anns = {}
    for r in rules:
        for it in r.items:
            anns.setdefault(it.key(), ItemAnnotation(it, (IV,), category))
    return anns


def instance(values, pid="p1"):
    return Instance(pid, values, "v")


def test_applicable_rules_matching():
    bmi_high = Item("bmi", Bin(35.0, float("inf")))
    ace = Item("ace", "yes")
    r = Rule(items=(bmi_high, ace), class_value="v", support=0.02, confidence=0.87)
    assert applicable_rules(instance({"bmi": 40.0, "ace": "yes"}), [r], "v") == [r]
    assert applicable_rules(instance({"bmi": 30.0, "ace": "yes"}), [r], "v") == []
    assert applicable_rules(instance({"bmi": None, "ace": "yes"}), [r], "v") == []
    assert applicable_rules(instance({"ace": "yes"}), [r], "v") == []
    # Class value must match the prediction.
    assert applicable_rules(instance({"bmi": 40.0, "ace": "yes"}), [r], "w") == []


def test_rank_rules_blocks_and_tiebreaks():
    a7 = rule(["A"], 0.7, actionable=True)
    n9 = rule(["B"], 0.9)
    a8 = rule(["C"], 0.8, actionable=True)
    assert rank_rules([a7, n9, a8]) == [a8, a7, n9]
    # All nonactionable: pure confidence sort.
    assert rank_rules([rule(["A"], 0.7), n9]) == [n9, rule(["A"], 0.7)]
    # Confidence tie broken by higher support.
    hi = rule(["D"], 0.8, support=0.05, actionable=True)
    lo = rule(["E"], 0.8, support=0.02, actionable=True)
    assert rank_rules([lo, hi]) == [hi, lo]


def test_select_disjoint_basic():
    r_ab = rule(["A", "B"], 0.9, actionable=True)
    r_ac = rule(["A", "C"], 0.8, actionable=True)
    r_de = rule(["D", "E"], 0.7, actionable=True)
    ranked = rank_rules([r_ab, r_ac, r_de])
    anns = annotate_all_items(ranked)
    # {A,C} shares A with the selected {A,B}; {D,E} is disjoint.
    assert select_disjoint(ranked, 2, anns) == [r_ab, r_de]


def test_select_disjoint_wraparound_second_pass():
    r_ab = rule(["A", "B"], 0.9, actionable=True)
    r_ac = rule(["A", "C"], 0.8, actionable=True)
    r_ad = rule(["A", "D"], 0.7, actionable=True)
    ranked = rank_rules([r_ab, r_ac, r_ad])
    anns = annotate_all_items(ranked)
    assert select_disjoint(ranked, 2, anns) == [r_ab, r_ac]


def test_select_disjoint_nonactionable_fill():
    actionable = [rule(["A"], 0.9, actionable=True), rule(["B"], 0.85, actionable=True)]
    nonactionable = [
        rule(["C", "D"], 0.8),
        rule(["C", "E"], 0.75),
        rule(["F"], 0.7),
        rule(["G"], 0.6),
    ]
    ranked = rank_rules(actionable + nonactionable)
    anns = annotate_all_items(actionable)
    got = select_disjoint(ranked, 5, anns)
    # Both actionable rules, then diversified nonactionable: C,D then F then G
    # (C,E shares C and only returns via wrap-around, which is not needed).
    assert got == [actionable[0], actionable[1], nonactionable[0],
                   nonactionable[2], nonactionable[3]]


def test_select_disjoint_all_actionable_fit():
    rules = [rule(["A", "B"], 0.9, actionable=True),
             rule(["A", "C"], 0.8, actionable=True)]
    ranked = rank_rules(rules)
    # Overlapping items, but the whole actionable set fits within n_r.
    assert select_disjoint(ranked, 5, annotate_all_items(rules)) == ranked


def test_select_weighted_hand_trace():
    # R1{a1,a2} weight 2+3=5, R2{a2,a3} weight 3+4=7, R3{a1} weight 2.
    r1 = rule(["a1", "a2"], 0.9, actionable=True)
    r2 = rule(["a2", "a3"], 0.8, actionable=True)
    r3 = rule(["a1"], 0.7, actionable=True)
    ranked = rank_rules([r1, r2, r3])
    anns = {}
    for feats, cat in [("a1", "c2"), ("a2", "c3"), ("a3", "c4")]:
        it = Item(feats, "yes")
        anns[it.key()] = ItemAnnotation(it, (IV,), cat)
    weights = {"c2": 2.0, "c3": 3.0, "c4": 4.0}
    got = select_weighted(ranked, 2, anns, weights)
    # Pick R2 (7), zero a2/a3; R1 and R3 both reweigh to 2; R1 comes first.
    assert got == [r2, r1]


def test_select_weighted_exhaustion_and_ties():
    r1 = rule(["a1"], 0.9, actionable=True)
    anns = annotate_all_items([r1])
    got = select_weighted([r1], 3, anns, {"general": 1.0})
    assert got == [r1]
    # All same category, equal weights: first ranked rule picked first.
    r2 = rule(["a2", "a3"], 0.8, actionable=True)
    r3 = rule(["a4", "a5"], 0.7, actionable=True)
    ranked = rank_rules([r2, r3])
    anns = annotate_all_items(ranked)
    got = select_weighted(ranked, 2, anns, {"general": 1.0})
    assert got == [r2, r3]


def test_select_weighted_requires_categories():
    r1 = rule(["a1"], 0.9, actionable=True)
    it = Item("a1", "yes")
    anns = {it.key(): ItemAnnotation(it, (IV,), category="")}
    with pytest.raises(ConfigError):
        select_weighted([r1], 1, anns, {"general": 1.0})
    anns = {it.key(): ItemAnnotation(it, (IV,), category="mystery")}
    with pytest.raises(ConfigError):
        select_weighted([r1], 1, anns, {"general": 1.0})


def test_weighted_total_weight_decreases():
    rules = [
        rule(["a1", "a2"], 0.9, actionable=True),
        rule(["a2", "a3"], 0.85, actionable=True),
        rule(["a3", "a4"], 0.8, actionable=True),
        rule(["a5"], 0.75, actionable=True),
    ]
    ranked = rank_rules(rules)
    anns = annotate_all_items(ranked)
    weights = {"general": 2.0}
    picks = select_weighted(ranked, 4, anns, weights)
    assert len(picks) == 4
    # Re-simulate to observe the total-weight trajectory.
    item_w = {Item(f"a{i}", "yes").key(): 2.0 for i in range(1, 6)}
    totals = []
    remaining = list(ranked)
    for p in picks:
        totals.append(sum(sum(item_w[it.key()] for it in r.items) for r in remaining))
        remaining.remove(p)
        for it in p.items:
            item_w[it.key()] = 0.0
    for before, after in zip(totals, totals[1:]):
        assert after < before or after == 0


def test_explain_empty_and_truncation():
    config = ExplanationConfig(n_r=5)
    report = explain(instance({"A": "no"}), "v", [rule(["A"], 0.9)], config)
    assert report.rules == () and not report.truncated
    assert report.total_applicable == 0

    many = [rule([f"f{i}"], 0.5 + i / 100) for i in range(30)]
    inst = instance({f"f{i}": "yes" for i in range(30)})
    report = explain(inst, "v", many, config)
    assert len(report.rules) == 5
    assert report.truncated
    assert report.total_applicable == 30
    assert report.total_actionable_applicable == 0


def test_explain_full_view_lists_everything():
    many = [rule([f"f{i}"], 0.5 + i / 300) for i in range(210)]
    inst = instance({f"f{i}": "yes" for i in range(210)})
    report = explain(inst, "v", many, ExplanationConfig(full_view=True))
    assert len(report.rules) == 210
    assert not report.truncated


def test_explain_display_order_actionable_first_conf_desc():
    rules = [
        rule(["A"], 0.7, actionable=True),
        rule(["B"], 0.95),
        rule(["C"], 0.9, actionable=True),
        rule(["D"], 0.8),
    ]
    inst = instance({f: "yes" for f in "ABCD"})
    report = explain(inst, "v", rules, ExplanationConfig(n_r=4))
    flags = [r.actionable for r in report.rules]
    assert flags == sorted(flags, reverse=True)
    confs = [r.confidence for r in report.rules if r.actionable]
    assert confs == sorted(confs, reverse=True)
    assert report.total_actionable_applicable == 2


def test_explain_hide_nonactionable():
    rules = [rule(["A"], 0.7, actionable=True), rule(["B"], 0.95)]
    inst = instance({"A": "yes", "B": "yes"})
    report = explain(inst, "v", rules, ExplanationConfig(show_nonactionable=False))
    assert [r.actionable for r in report.rules] == [True]
    assert report.total_applicable == 2


def test_explain_deterministic_across_runs():
    rules = [rule([f"f{i}", f"g{i % 3}"], 0.5 + (i % 7) / 20, actionable=i % 2 == 0)
             for i in range(12)]
    inst = instance({k: "yes" for r in rules for k in [it.feature for it in r.items]})
    anns = annotate_all_items(rules)
    config = ExplanationConfig(n_r=4)
    first = explain(inst, "v", rules, config, anns)
    for _ in range(10):
        again = explain(inst, "v", rules, config, anns)
        assert again == first


def test_explain_weighted_without_weights_is_error():
    with pytest.raises(ConfigError):
        ExplanationConfig(algorithm="weighted")


def test_select_disjoint_pairwise_disjoint_when_possible():
    """With >= n_r pairwise disjoint actionable rules reachable greedily,
    the selected actionable rules share no tracked item."""
    rules = [
        rule(["A", "B"], 0.9, actionable=True),
        rule(["A", "C"], 0.85, actionable=True),
        rule(["D", "E"], 0.8, actionable=True),
        rule(["B", "F"], 0.75, actionable=True),
        rule(["G"], 0.7, actionable=True),
    ]
    ranked = rank_rules(rules)
    anns = annotate_all_items(rules)
    got = select_disjoint(ranked, 3, anns)
    used = set()
    for r in got:
        keys = {it.key() for it in r.items}
        assert not (used & keys)
        used |= keys


def test_selection_returns_min_of_nr_and_candidates():
    rules = [rule([f"f{i}"], 0.6 + i / 100, actionable=True) for i in range(3)]
    ranked = rank_rules(rules)
    anns = annotate_all_items(rules)
    assert len(select_disjoint(ranked, 10, anns)) == 3
    assert len(select_disjoint(ranked, 2, anns)) == 2
    assert len(select_weighted(ranked, 10, anns, {"general": 1.0})) == 3
    assert len(select_weighted(ranked, 2, anns, {"general": 1.0})) == 2
