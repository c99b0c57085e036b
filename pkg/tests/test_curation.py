import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rulelens.curation import (
    AnnotationStore,
    Intervention,
    ItemAnnotation,
    RuleAnnotation,
    apply_annotations,
    cohens_kappa,
    load_classifier,
    save_classifier,
    suggest_interventions,
)
from rulelens.errors import SchemaError, VersionConflict
from rulelens.items import Bin, Item
from rulelens.miner import Rule


def rule(feats, conf=0.8, v="v"):
    return Rule(items=tuple(Item(f, "yes") for f in feats), class_value=v,
                support=0.05, confidence=conf)


WEIGHT_LOSS = Intervention("ivx-weight-loss", "enroll in a weight loss program")
BP = Intervention("ivx-bp", "suggest lifestyle changes to lower blood pressure")


def test_suggest_interventions_union_and_dedup():
    bmi_high = Item("bmi", Bin(35.0, float("inf")))
    ace = Item("ace", "yes")
    r = Rule(items=(bmi_high, ace), class_value="v", support=0.02, confidence=0.8)
    anns = {bmi_high.key(): ItemAnnotation(bmi_high, (WEIGHT_LOSS,))}
    assert suggest_interventions(r, anns) == [WEIGHT_LOSS]
    assert suggest_interventions(r, {}) == []
    # Two items sharing an intervention id suggest it once.
    anns = {
        ace.key(): ItemAnnotation(ace, (WEIGHT_LOSS,)),
        bmi_high.key(): ItemAnnotation(bmi_high, (WEIGHT_LOSS, BP)),
    }
    assert suggest_interventions(r, anns) == [WEIGHT_LOSS, BP]


def test_suggestions_monotone_under_new_annotations():
    bmi_high = Item("bmi", Bin(35.0, float("inf")))
    ace = Item("ace", "yes")
    r = Rule(items=(bmi_high, ace), class_value="v", support=0.02, confidence=0.8)
    before = suggest_interventions(r, {bmi_high.key(): ItemAnnotation(bmi_high, (WEIGHT_LOSS,))})
    after = suggest_interventions(r, {
        bmi_high.key(): ItemAnnotation(bmi_high, (WEIGHT_LOSS,)),
        ace.key(): ItemAnnotation(ace, (BP,)),
    })
    assert set(iv.id for iv in before) <= set(iv.id for iv in after)


def test_apply_annotations_drops_and_attaches():
    rules = [rule(["A"]), rule(["B"]), rule(["C"])]
    anns = {
        rules[0].id: RuleAnnotation(rules[0].id, kept=False),
        rules[1].id: RuleAnnotation(rules[1].id, kept=True, interventions=(BP,)),
    }
    final = apply_annotations(rules, anns)
    assert [r.items[0].feature for r in final] == ["B", "C"]
    assert final[0].actionable and final[0].interventions == (BP,)
    assert not final[1].actionable  # unannotated defaults to kept, no interventions


def test_apply_annotations_idempotent():
    rules = [rule(["A"]), rule(["B"])]
    anns = {rules[0].id: RuleAnnotation(rules[0].id, interventions=(BP,))}
    once = apply_annotations(rules, anns)
    assert apply_annotations(once, anns) == once


def test_apply_annotations_unknown_rule_id():
    with pytest.raises(SchemaError):
        apply_annotations([rule(["A"])], {"nope": RuleAnnotation("nope")})


def test_kappa_fixture_values():
    ids = ["r1", "r2", "r3", "r4"]
    same = dict(zip(ids, [True, False, True, False]))
    assert cohens_kappa(same, dict(same)) == 1.0
    a = dict(zip(ids, [True, True, False, False]))
    b = dict(zip(ids, [False, False, True, True]))
    assert cohens_kappa(a, b) == -1.0  # p_o = 0, p_e = 0.5
    a = dict(zip(ids, [True, True, True, False]))
    b = dict(zip(ids, [True, True, False, False]))
    assert cohens_kappa(a, b) == 0.5  # p_o = 0.75, p_e = 0.5


def test_kappa_degenerate_full_agreement():
    both_true = {"r1": True, "r2": True}
    assert cohens_kappa(both_true, dict(both_true)) == 1.0


def test_kappa_errors():
    with pytest.raises(ValueError):
        cohens_kappa({"a": True, "b": False}, {"a": True, "c": False})
    with pytest.raises(ValueError):
        cohens_kappa({"a": True}, {"a": True})


@given(st.lists(st.tuples(st.booleans(), st.booleans()), min_size=2, max_size=40))
def test_kappa_bounds_and_self_agreement(ratings):
    a = {f"r{i}": x for i, (x, _) in enumerate(ratings)}
    b = {f"r{i}": y for i, (_, y) in enumerate(ratings)}
    k = cohens_kappa(a, b)
    assert -1.0 - 1e-12 <= k <= 1.0 + 1e-12
    assert cohens_kappa(a, dict(a)) == 1.0


def test_store_versioning_and_conflict(tmp_path):
    store = AnnotationStore(tmp_path / "ann.json")
    r = rule(["A"])
    updated = store.set_rule(r.id, version=0, kept=False)
    assert updated.version == 1
    with pytest.raises(VersionConflict):
        store.set_rule(r.id, version=0, kept=True)
    updated = store.set_rule(r.id, version=1, interventions=[BP], reviewer="dr_a")
    assert updated.version == 2
    assert updated.kept is False  # earlier fields preserved

    # Persistence round-trips through the JSON document.
    reloaded = AnnotationStore(tmp_path / "ann.json")
    ann = reloaded.rule_annotation(r.id)
    assert ann.kept is False and ann.version == 2
    assert ann.interventions == (BP,)
    assert ann.reviewer == "dr_a"


def test_store_item_and_weights(tmp_path):
    store = AnnotationStore(tmp_path / "ann.json")
    bmi_high = Item("bmi", Bin(35.0, float("inf")))
    ann, version = store.set_item(bmi_high, version=0, interventions=[WEIGHT_LOSS],
                                  category="obesity")
    assert version == 1 and ann.actionable
    with pytest.raises(VersionConflict):
        store.set_item(bmi_high, version=0, category="x")
    assert store.set_weights({"obesity": 3.0}, version=0) == 1
    with pytest.raises(ValueError):
        store.set_weights({"obesity": 0.0}, version=1)

    reloaded = AnnotationStore(tmp_path / "ann.json")
    assert reloaded.item_annotation(bmi_high).category == "obesity"
    assert reloaded.category_weights() == {"obesity": 3.0}
    assert reloaded.weights_version == 1


def test_store_every_snapshot_parses(tmp_path):
    path = tmp_path / "ann.json"
    store = AnnotationStore(path)
    rnd = random.Random(1)
    for i in range(30):
        rid = f"rule{rnd.randint(0, 5)}→v"
        store.set_rule(rid, version=store.rule_annotation(rid).version, kept=bool(i % 2))
        AnnotationStore(path)  # the on-disk document parses after every write


def test_classifier_export_round_trip(tmp_path):
    rules = [rule(["A"]).with_interventions((BP,)), rule(["B"])]
    path = tmp_path / "classifier.json"
    save_classifier(path, rules)
    loaded = load_classifier(path)
    assert loaded == rules
    assert loaded[0].actionable and not loaded[1].actionable


def test_intervention_validation():
    with pytest.raises(ValueError):
        Intervention("x", "")
    with pytest.raises(ValueError):
        Intervention("x", "text", target="sideways")
