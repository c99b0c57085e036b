"""Seeded synthetic dataset with planted rules and a ground-truth manifest.

Planted rules are conjunctions of "yes" values over dedicated categorical
features; each gets a block of rows where its LHS is fully set, and rows
matching any planted LHS take the interesting label with that rule's
confidence (the best one when several match). Scores emitted alongside are
the exact conditional probabilities the generator used, i.e. a
Bayes-optimal scorer for this data.
"""

from __future__ import annotations

import csv
import json
import math

import numpy as np

from .dataset import Dataset, FeatureSchema, Instance, OutcomeSpec

INTERESTING = "event"
UNINTERESTING = "no_event"

PLANTED_NOISE_VALUES = 7  # non-yes values of a planted feature
CATEGORICAL_VALUES = 12


def generate(seed: int, n_rows: int = 10_000, n_features: int = 50,
             n_rules: int = 10, base_rate: float = 0.10,
             min_confidence: float = 0.72, max_confidence: float = 0.95,
             block_fraction: float = 0.02, missing_rate: float = 0.01):
    """Build (dataset, scores, manifest) for one seed.

    scores maps patient id to the true probability of the interesting label.
    """
    rng = np.random.Generator(np.random.PCG64(seed))

    # Rule shapes: first half 2 items, second half 3 items.
    lens = [2 if i < (n_rules + 1) // 2 else 3 for i in range(n_rules)]
    n_planted = sum(lens)
    n_cont = max(4, n_features // 5)
    n_cat = n_features - n_planted - n_cont
    if n_cat < 0:
        raise ValueError("n_features too small for the requested rules")

    planted_names = [f"p{i:02d}" for i in range(n_planted)]
    cat_names = [f"c{i:02d}" for i in range(n_cat)]
    cont_names = [f"x{i:02d}" for i in range(n_cont)]

    planted_values = ("yes",) + tuple(f"n{j}" for j in range(PLANTED_NOISE_VALUES))
    cat_values = tuple(f"v{j:02d}" for j in range(CATEGORICAL_VALUES))
    schema = (
        [FeatureSchema(n, "categorical", planted_values) for n in planted_names]
        + [FeatureSchema(n, "categorical", cat_values) for n in cat_names]
        + [FeatureSchema(n, "continuous") for n in cont_names]
    )
    outcome = OutcomeSpec(
        label_values=(INTERESTING, UNINTERESTING),
        interesting_values=(INTERESTING,),
    )

    # Assign disjoint planted features to rules.
    rule_feats = []
    cursor = 0
    for ln in lens:
        rule_feats.append(planted_names[cursor : cursor + ln])
        cursor += ln
    confidences = np.sort(rng.uniform(min_confidence, max_confidence, size=n_rules))[::-1]

    # Planted feature matrix: background distribution, then forced blocks.
    p_yes_bg = 0.06
    planted = np.empty((n_rows, n_planted), dtype=np.int8)
    for j in range(n_planted):
        yes = rng.random(n_rows) < p_yes_bg
        noise = rng.integers(1, 1 + PLANTED_NOISE_VALUES, size=n_rows)
        planted[:, j] = np.where(yes, 0, noise)
    block = max(1, int(math.ceil(block_fraction * n_rows)))
    feat_idx = {name: j for j, name in enumerate(planted_names)}
    for i, feats in enumerate(rule_feats):
        rows = slice(i * block, min((i + 1) * block, n_rows))
        for name in feats:
            planted[rows, feat_idx[name]] = 0  # value "yes"

    # True probability per row: best matching planted rule, else base rate.
    prob = np.full(n_rows, base_rate)
    for i, feats in enumerate(rule_feats):
        cols = [feat_idx[n] for n in feats]
        hit = np.all(planted[:, cols] == 0, axis=1)
        prob[hit] = np.maximum(prob[hit], confidences[i])
    labels = rng.random(n_rows) < prob

    cats = rng.integers(0, CATEGORICAL_VALUES, size=(n_rows, n_cat))
    cont = rng.normal(size=(n_rows, n_cont))
    # First half of the continuous block is shifted for interesting rows so
    # the discretizer has real cuts to find; the rest stays noise.
    n_corr = n_cont // 2
    cont[:, :n_corr] += labels[:, None] * 1.5
    cont = np.round(cont, 4)
    missing = rng.random((n_rows, n_cont)) < missing_rate

    instances = []
    for r in range(n_rows):
        values: dict = {}
        for j, name in enumerate(planted_names):
            values[name] = planted_values[planted[r, j]]
        for j, name in enumerate(cat_names):
            values[name] = cat_values[cats[r, j]]
        for j, name in enumerate(cont_names):
            values[name] = None if missing[r, j] else float(cont[r, j])
        instances.append(Instance(
            id=f"pt{r:06d}",
            values=values,
            label=INTERESTING if labels[r] else UNINTERESTING,
        ))
    dataset = Dataset(schema=tuple(schema), outcome=outcome, instances=tuple(instances))

    scores = {inst.id: float(p) for inst, p in zip(instances, prob)}
    manifest = {
        "seed": seed,
        "n_rows": n_rows,
        "base_rate": base_rate,
        "block_rows": block,
        "class_value": INTERESTING,
        "planted_rules": [
            {
                "items": [{"feature": n, "value": "yes"} for n in feats],
                "class_value": INTERESTING,
                "confidence": float(confidences[i]),
            }
            for i, feats in enumerate(rule_feats)
        ],
    }
    return dataset, scores, manifest


def save_schema_json(path, dataset: Dataset) -> None:
    doc = {
        "features": [
            {"name": f.name, "kind": f.kind, **({"values": list(f.declared_values)} if f.declared_values else {})}
            for f in dataset.schema
        ],
        "outcome": {
            "label_values": list(dataset.outcome.label_values),
            "interesting_values": list(dataset.outcome.interesting_values),
            **(
                {"continuous_threshold": dataset.outcome.continuous_threshold}
                if dataset.outcome.continuous_threshold is not None
                else {}
            ),
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def save_data_csv(path, dataset: Dataset) -> None:
    names = dataset.feature_names()
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", *names, "label"])
        for inst in dataset.instances:
            row = [inst.id]
            for n in names:
                v = inst.values[n]
                row.append("" if v is None else (repr(v) if isinstance(v, float) else v))
            row.append(inst.label)
            writer.writerow(row)


def save_manifest(path, manifest: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
