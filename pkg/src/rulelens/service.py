"""HTTP/JSON service backing the rule-review UI.

Read endpoints serve the rule list with annotations and intervention
suggestions inlined; every mutation carries the version it read and gets a
409 when that version is stale. The store serializes writers; reads are
lock-free snapshots.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .curation import (
    AnnotationStore,
    Intervention,
    ItemAnnotation,
    apply_annotations,
    save_classifier,
    suggest_interventions,
)
from .errors import SchemaError, VersionConflict
from .items import Item, item_to_json
from .miner import Rule, rule_sort_key

SORTS = {
    "confidence": lambda r: (-r.confidence, r.id),
    "support": lambda r: (-r.support, r.id),
    "length": lambda r: (len(r.items), r.id),
    "id": lambda r: r.id,
}


class InterventionBody(BaseModel):
    id: str
    text: str
    target: str = "item"


class RulePatch(BaseModel):
    version: int
    kept: bool | None = None
    interventions: list[InterventionBody] | None = None
    reviewer: str | None = None


class ItemPut(BaseModel):
    version: int
    interventions: list[InterventionBody] | None = None
    category: str | None = None


class WeightsPut(BaseModel):
    version: int
    weights: dict[str, float]


class ExportBody(BaseModel):
    path: str | None = None


def _to_interventions(bodies) -> list[Intervention]:
    return [Intervention(b.id, b.text, b.target) for b in bodies]


def create_app(rules: list[Rule], store: AnnotationStore,
               stage_counts: list[int] | None = None,
               universe_items: list[Item] | None = None,
               export_path: str = "classifier.json") -> FastAPI:
    app = FastAPI(title="rulelens curation service")
    # The review UI is served separately (file:// or a static host).
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    rules_by_id = {r.id: r for r in rules}
    items: dict[str, Item] = {}
    for r in rules:
        for it in r.items:
            items.setdefault(it.key(), it)
    for it in universe_items or ():
        items.setdefault(it.key(), it)

    def rule_row(rule: Rule) -> dict:
        ann = store.rule_annotation(rule.id)
        suggestions = suggest_interventions(rule, store.item_annotations_by_key())
        return {
            "id": rule.id,
            "lhs": rule.render_lhs(),
            "items": [item_to_json(it) for it in rule.items],
            "item_keys": [it.key() for it in rule.items],
            "class_value": rule.class_value,
            "support": rule.support,
            "confidence": rule.confidence,
            "kept": ann.kept,
            "reviewer": ann.reviewer,
            "interventions": [iv.to_json() for iv in ann.interventions],
            "suggestions": [iv.to_json() for iv in suggestions],
            "actionable": len(ann.interventions) > 0,
            "version": ann.version,
        }

    def item_row(key: str) -> dict:
        item = items[key]
        ann = store.items.get(key, ItemAnnotation(item=item))
        return {
            "item_id": key,
            "feature": item.feature,
            "value": item_to_json(item)["value"],
            "rendered": item.render(),
            "interventions": [iv.to_json() for iv in ann.interventions],
            "category": ann.category,
            "actionable": ann.actionable,
            "version": store.item_versions.get(key, 0),
        }

    @app.get("/rules")
    def list_rules(
        actionable: bool | None = None,
        kept: bool | None = None,
        sort: str = Query("confidence"),
        page: int = Query(1, ge=1),
        page_size: int = Query(50, ge=1, le=500),
    ):
        if sort not in SORTS:
            raise HTTPException(422, f"unknown sort {sort!r}; one of {sorted(SORTS)}")
        selected = sorted(rules, key=SORTS[sort])
        rows = [rule_row(r) for r in selected]
        if actionable is not None:
            rows = [r for r in rows if r["actionable"] == actionable]
        if kept is not None:
            rows = [r for r in rows if r["kept"] == kept]
        total = len(rows)
        start = (page - 1) * page_size
        return {
            "total": total,
            "page": page,
            "page_size": page_size,
            "rules": rows[start : start + page_size],
        }

    @app.get("/rules/{rule_id:path}")
    def get_rule(rule_id: str):
        if rule_id not in rules_by_id:
            raise HTTPException(404, f"unknown rule {rule_id!r}")
        return rule_row(rules_by_id[rule_id])

    @app.patch("/rules/{rule_id:path}")
    def patch_rule(rule_id: str, body: RulePatch):
        if rule_id not in rules_by_id:
            raise HTTPException(404, f"unknown rule {rule_id!r}")
        interventions = None
        if body.interventions is not None:
            interventions = _to_interventions(body.interventions)
        try:
            store.set_rule(
                rule_id,
                version=body.version,
                kept=body.kept,
                interventions=interventions,
                reviewer=body.reviewer,
            )
        except VersionConflict as exc:
            raise HTTPException(409, str(exc)) from exc
        return rule_row(rules_by_id[rule_id])

    @app.get("/items")
    def list_items():
        return [item_row(k) for k in sorted(items)]

    @app.put("/items/{item_id:path}")
    def put_item(item_id: str, body: ItemPut):
        if item_id not in items:
            raise HTTPException(404, f"unknown item {item_id!r}")
        interventions = None
        if body.interventions is not None:
            interventions = _to_interventions(body.interventions)
        try:
            store.set_item(
                items[item_id],
                version=body.version,
                interventions=interventions,
                category=body.category,
            )
        except VersionConflict as exc:
            raise HTTPException(409, str(exc)) from exc
        return item_row(item_id)

    @app.get("/category-weights")
    def get_weights():
        return {"weights": store.category_weights(), "version": store.weights_version}

    @app.put("/category-weights")
    def put_weights(body: WeightsPut):
        try:
            store.set_weights(body.weights, version=body.version)
        except VersionConflict as exc:
            raise HTTPException(409, str(exc)) from exc
        except ValueError as exc:
            raise HTTPException(422, str(exc)) from exc
        return {"weights": store.category_weights(), "version": store.weights_version}

    @app.get("/stats")
    def stats():
        reviewed = set(store.rules)
        kept = sum(1 for r in rules if store.rule_annotation(r.id).kept)
        actionable = sum(
            1 for r in rules if store.rule_annotation(r.id).interventions
        )
        return {
            "stage_counts": stage_counts or [],
            "total_rules": len(rules),
            "kept": kept,
            "removed": len(rules) - kept,
            "actionable": actionable,
            "unreviewed": len(rules) - len(reviewed & set(rules_by_id)),
        }

    @app.post("/export")
    def export(body: ExportBody):
        path = body.path or export_path
        try:
            final = apply_annotations(rules, dict(store.rules))
        except SchemaError as exc:
            raise HTTPException(422, str(exc)) from exc
        save_classifier(path, final)
        unreviewed = len(rules) - len(set(store.rules) & set(rules_by_id))
        return {
            "path": path,
            "total": len(final),
            "actionable": sum(1 for r in final if r.actionable),
            "unreviewed": unreviewed,
        }

    return app
