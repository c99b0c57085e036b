"""Miner checks against a brute-force enumerator.

The oracle walks every one-item-per-feature combination up to the length
cap, counts matches by direct row iteration, and applies the thresholds
with the same comparisons the miner uses.
"""

from itertools import combinations

import numpy as np
import pytest

from rulelens.dataset import FeatureSchema
from rulelens.errors import ConfigError, SchemaError
from rulelens.miner import (
    MiningConfig,
    Rule,
    build_item_universe,
    count_rule,
    load_rules_jsonl,
    mine,
    rule_id,
    save_rules_jsonl,
)
from rulelens.items import Bin, Item

from tests.conftest import make_dataset, random_binary_dataset


def oracle_mine(train, items, config):
    """Exhaustive (LHS, class, support, confidence) enumeration."""
    n = len(train.instances)
    interesting = (config.interesting_values
                   if config.interesting_values is not None
                   else train.outcome.interesting_values)
    out = {}
    for size in range(1, config.max_len + 1):
        for combo in combinations(items, size):
            feats = [it.feature for it in combo]
            if len(set(feats)) != len(feats):
                continue
            matched = [
                inst
                for inst in train.instances
                if all(it.matches(inst.values.get(it.feature)) for it in combo)
            ]
            for v in interesting:
                joint = sum(1 for inst in matched if inst.label == v)
                if not matched:
                    continue
                support = joint / n
                confidence = joint / len(matched)
                passes = (
                    (joint / n >= config.min_support)
                    if config.support_counting == "joint"
                    else (len(matched) / n >= config.min_support)
                )
                if passes and confidence >= config.min_confidence:
                    out[rule_id(combo, v)] = (support, confidence)
    return out


def test_single_item_rule_counts():
    # Item A matches rows 1-4; their labels are v, v, no, no.
    rows = []
    for i in range(10):
        rows.append((f"p{i}", {"A": "yes" if i < 4 else "no"},
                     "v" if i in (0, 1) else "no"))
    ds = make_dataset(rows)
    items = [Item("A", "yes"), Item("A", "no")]
    rules = mine(ds, items, MiningConfig(min_support=0.1, min_confidence=0.5, max_len=1))
    by_id = {r.id: r for r in rules}
    key = rule_id([Item("A", "yes")], "v")
    assert key in by_id
    assert by_id[key].support == pytest.approx(0.2)
    assert by_id[key].confidence == pytest.approx(0.5)
    # Raising the confidence floor excludes it.
    rules = mine(ds, items, MiningConfig(min_support=0.1, min_confidence=0.6, max_len=1))
    assert key not in {r.id for r in rules}


def test_mine_matches_bruteforce_oracle(rng):
    ds = random_binary_dataset(rng, n_rows=200, n_features=4)
    config = MiningConfig(min_support=0.05, min_confidence=0.3, max_len=4)
    items = build_item_universe(ds, {}, config)
    assert len(items) == 8
    got = {r.id: (r.support, r.confidence) for r in mine(ds, items, config)}
    want = oracle_mine(ds, items, config)
    assert set(got) == set(want)
    for rid in want:
        assert got[rid][0] == pytest.approx(want[rid][0], abs=1e-12)
        assert got[rid][1] == pytest.approx(want[rid][1], abs=1e-12)


def test_mine_lhs_support_counting_flag(rng):
    ds = random_binary_dataset(rng, n_rows=150, n_features=3)
    config = MiningConfig(min_support=0.3, min_confidence=0.3, max_len=3,
                          support_counting="lhs")
    items = build_item_universe(ds, {}, config)
    got = {r.id for r in mine(ds, items, config)}
    assert got == set(oracle_mine(ds, items, config))


def test_mined_rules_invariants(rng):
    ds = random_binary_dataset(rng, n_rows=300, n_features=6)
    config = MiningConfig(min_support=0.02, min_confidence=0.4, max_len=4)
    items = build_item_universe(ds, {}, config)
    rules = mine(ds, items, config)
    assert rules, "expected a nonempty result on this seed"
    n = len(ds.instances)
    for r in rules:
        assert r.support <= r.confidence + 1e-15
        assert r.class_value in ds.outcome.interesting_values
        assert 1 <= len(r.items) <= 4
        # Anti-monotonicity of the joint count over LHS subsets.
        joint = round(r.support * n)
        for k in range(1, len(r.items)):
            for sub in combinations(r.items, k):
                sub_joint = sum(
                    1
                    for inst in ds.instances
                    if inst.label == r.class_value
                    and all(it.matches(inst.values.get(it.feature)) for it in sub)
                )
                assert sub_joint >= joint


def test_mine_deterministic_order(rng):
    ds = random_binary_dataset(rng, n_rows=120, n_features=5)
    config = MiningConfig(min_support=0.05, min_confidence=0.3)
    items = build_item_universe(ds, {}, config)
    a = mine(ds, items, config)
    b = mine(ds, items, config)
    assert [r.id for r in a] == [r.id for r in b]
    order = [( -r.confidence, -r.support, len(r.items), r.id) for r in a]
    assert order == sorted(order)


def test_universe_respects_model_features():
    schema = (
        FeatureSchema("age", "continuous"),
        FeatureSchema("sex", "categorical", ("m", "f")),
    )
    ds = make_dataset([("p1", {"age": 50.0, "sex": "m"}, "v"),
                       ("p2", {"age": 70.0, "sex": "f"}, "no")], schema=schema)
    config = MiningConfig(model_features=frozenset({"age"}))
    items = build_item_universe(ds, {"age": [65.0]}, config)
    assert items == [
        Item("age", Bin(float("-inf"), 65.0)),
        Item("age", Bin(65.0, float("inf"))),
    ]
    all_items = build_item_universe(ds, {"age": [65.0]}, MiningConfig())
    assert len(all_items) == 4
    with pytest.raises(SchemaError):
        build_item_universe(ds, {}, MiningConfig(model_features=frozenset({"weight"})))


def test_instance_matches_at_most_one_item_per_feature(rng):
    schema = (
        FeatureSchema("age", "continuous"),
        FeatureSchema("sex", "categorical", ("m", "f")),
    )
    ds = make_dataset(
        [("p1", {"age": 50.0, "sex": "m"}, "v"),
         ("p2", {"age": 65.0, "sex": "f"}, "no"),
         ("p3", {"age": None, "sex": "m"}, "v")],
        schema=schema,
    )
    items = build_item_universe(ds, {"age": [60.0, 70.0]}, MiningConfig())
    for inst in ds.instances:
        for feat in ("age", "sex"):
            hits = [
                it for it in items
                if it.feature == feat and it.matches(inst.values.get(feat))
            ]
            expected = 0 if inst.values.get(feat) is None else 1
            assert len(hits) == expected


def test_premining_whitelist_equals_postmining_filter(rng):
    """Restricting the item universe to the whitelist before mining yields
    the same final rule set as filtering mined rules afterwards."""
    from rulelens.pruner import PruneConfig, filter_allowed_values, prune_cascade

    ds = random_binary_dataset(rng, n_rows=250, n_features=5)
    config = MiningConfig(min_support=0.03, min_confidence=0.3)
    items = build_item_universe(ds, {}, config)
    allowed = {"f0": {"yes"}, "f1": {"yes", "no"}, "f3": {"no"}}

    post = mine(ds, items, config)
    post_final, _ = prune_cascade(post, PruneConfig(0.1, allowed))

    pre_items = [it for it in items if it.value in allowed.get(it.feature, ())]
    pre = mine(ds, pre_items, config)
    pre_final, _ = prune_cascade(pre, PruneConfig(0.1, allowed))
    assert {r.id for r in pre_final} == {r.id for r in post_final}


def test_count_rule():
    rows = []
    for i in range(10):
        rows.append((f"p{i}", {"A": "yes" if i < 4 else "no"},
                     "v" if i in (0, 1) else "no"))
    ds = make_dataset(rows)
    support, confidence = count_rule(ds, [Item("A", "yes")], "v")
    assert (support, confidence) == (0.2, 0.5)
    with pytest.raises(ValueError, match="no coverage"):
        count_rule(ds, [Item("A", "b")], "v")
    all_rows = make_dataset([(f"p{i}", {"A": "yes"}, "v") for i in range(5)])
    assert count_rule(all_rows, [Item("A", "yes")], "v") == (1.0, 1.0)
    with pytest.raises(ValueError, match="feature"):
        count_rule(ds, [Item("A", "yes"), Item("A", "no")], "v")


def test_rule_validation_and_id():
    r = Rule(items=(Item("b", "x"), Item("a", "y")), class_value="v",
             support=0.1, confidence=0.5)
    assert r.id == "a=y&b=x→v"
    assert [it.feature for it in r.items] == ["a", "b"]
    with pytest.raises(ValueError):
        Rule(items=(Item("a", "x"), Item("a", "y")), class_value="v",
             support=0.1, confidence=0.5)
    with pytest.raises(ValueError):
        Rule(items=(), class_value="v", support=0.1, confidence=0.5)
    with pytest.raises(ValueError):
        Rule(items=(Item("a", "x"),), class_value="v", support=0.6, confidence=0.5)


def test_mining_config_validation():
    with pytest.raises(ConfigError):
        MiningConfig(min_support=0.0)
    with pytest.raises(ConfigError):
        MiningConfig(min_support=0.6, min_confidence=0.5)
    with pytest.raises(ConfigError):
        MiningConfig(max_len=0)
    with pytest.raises(ConfigError):
        MiningConfig(support_counting="both")


def test_rules_jsonl_round_trip(tmp_path, rng):
    ds = random_binary_dataset(rng, n_rows=80, n_features=4)
    config = MiningConfig(min_support=0.05, min_confidence=0.3)
    rules = mine(ds, build_item_universe(ds, {}, config), config)
    path = tmp_path / "rules.jsonl"
    save_rules_jsonl(path, rules)
    loaded = load_rules_jsonl(path)
    assert loaded == rules
