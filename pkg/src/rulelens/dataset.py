"""Dataset vocabulary and ingestion: schema JSON, instance CSV, outcome
categorization, and the seeded train/test split.

All types are frozen after construction and safe to share across threads.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataFormatError, SchemaError

CATEGORICAL = "categorical"
CONTINUOUS = "continuous"


@dataclass(frozen=True)
class FeatureSchema:
    name: str
    kind: str  # CATEGORICAL or CONTINUOUS
    declared_values: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.name:
            raise SchemaError("feature name must be nonempty")
        if self.kind not in (CATEGORICAL, CONTINUOUS):
            raise SchemaError(f"feature {self.name!r}: unknown kind {self.kind!r}")
        if self.kind == CATEGORICAL and not self.declared_values:
            raise SchemaError(f"categorical feature {self.name!r} lists no values")


@dataclass(frozen=True)
class OutcomeSpec:
    label_values: tuple[str, ...]
    interesting_values: tuple[str, ...]
    continuous_threshold: float | None = None

    def __post_init__(self):
        if len(self.label_values) < 2:
            raise SchemaError("outcome needs at least 2 label values")
        if not self.interesting_values:
            raise SchemaError("outcome needs at least one interesting value")
        extra = set(self.interesting_values) - set(self.label_values)
        if extra:
            raise SchemaError(f"interesting values not among label values: {sorted(extra)}")


@dataclass(frozen=True)
class Instance:
    id: str
    values: dict  # feature name -> category string | float | None (missing)
    label: str


@dataclass(frozen=True)
class Dataset:
    schema: tuple[FeatureSchema, ...]
    outcome: OutcomeSpec
    instances: tuple[Instance, ...] = ()

    def __post_init__(self):
        names = [f.name for f in self.schema]
        if len(names) != len(set(names)):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise SchemaError(f"duplicate feature names: {dupes}")
        ids = [i.id for i in self.instances]
        if len(ids) != len(set(ids)):
            raise SchemaError("duplicate instance ids")

    def feature(self, name: str) -> FeatureSchema:
        for f in self.schema:
            if f.name == name:
                return f
        raise SchemaError(f"no feature named {name!r}")

    def feature_names(self) -> list[str]:
        return [f.name for f in self.schema]

    def with_instances(self, instances) -> "Dataset":
        return Dataset(self.schema, self.outcome, tuple(instances))


def load_schema(path) -> Dataset:
    """Read a schema JSON file; returns a Dataset with no instances.

    Expected shape: {"features": [{"name", "kind", "values"?}],
    "outcome": {"label_values", "interesting_values", "continuous_threshold"?}}.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: malformed JSON: {exc}") from exc
    try:
        features = tuple(
            FeatureSchema(
                name=f["name"],
                kind=f["kind"],
                declared_values=tuple(f.get("values", ())),
            )
            for f in raw["features"]
        )
        out = raw["outcome"]
        outcome = OutcomeSpec(
            label_values=tuple(out["label_values"]),
            interesting_values=tuple(out["interesting_values"]),
            continuous_threshold=out.get("continuous_threshold"),
        )
    except (KeyError, TypeError) as exc:
        raise DataFormatError(f"{path}: missing or mistyped schema field: {exc}") from exc
    return Dataset(schema=features, outcome=outcome)


def load_dataset(path, schema: Dataset) -> Dataset:
    """Read instances from CSV (RFC 4180, header row, empty cell = missing).

    The header must contain "id", "label", and every schema feature name.
    """
    feature_names = schema.feature_names()
    kinds = {f.name: f.kind for f in schema.schema}
    declared = {f.name: set(f.declared_values) for f in schema.schema if f.kind == CATEGORICAL}
    labels = set(schema.outcome.label_values)

    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing_cols = [c for c in ["id", "label", *feature_names] if c not in header]
        if missing_cols:
            raise DataFormatError(f"{path}: missing columns {missing_cols}")

        instances = []
        for lineno, row in enumerate(reader, start=2):
            values = {}
            for name in feature_names:
                cell = row[name]
                if cell is None or cell == "":
                    values[name] = None
                elif kinds[name] == CONTINUOUS:
                    try:
                        x = float(cell)
                    except ValueError:
                        raise DataFormatError(
                            f"{path}:{lineno}: column {name!r}: not a number: {cell!r}"
                        ) from None
                    if not math.isfinite(x):
                        raise DataFormatError(f"{path}:{lineno}: column {name!r}: non-finite value")
                    values[name] = x
                else:
                    if cell not in declared[name]:
                        raise DataFormatError(
                            f"{path}:{lineno}: column {name!r}: unknown category {cell!r}"
                        )
                    values[name] = cell
            label = row["label"]
            if label not in labels:
                raise DataFormatError(f"{path}:{lineno}: unknown label {label!r}")
            instances.append(Instance(id=row["id"], values=values, label=label))

    return schema.with_instances(instances)


def categorize_outcome(raw, threshold: float) -> list[str]:
    """Map continuous outcomes to "above"/"below" a threshold.

    Exact threshold hits go to "below" (left-closed convention, matching the
    left-closed right-open bins used everywhere else).
    """
    if not math.isfinite(threshold):
        raise ValueError("threshold must be finite")
    out = []
    for x in raw:
        if not math.isfinite(x):
            raise ValueError(f"non-finite outcome value: {x!r}")
        out.append("above" if x > threshold else "below")
    return out


def split_train_test(dataset: Dataset, fraction: float, seed: int,
                     stratify: bool = False) -> tuple[Dataset, Dataset]:
    """Split instances into disjoint train/test parts.

    |train| = floor(fraction*N + 0.5). The shuffle is a NumPy PCG64
    permutation of instance positions (see README for the pinned test
    vector); within each part original dataset order is preserved. With
    stratify=True the shuffle-and-prefix split runs per label value
    instead, so each label keeps close to the requested fraction.
    """
    if not 0 < fraction < 1:
        raise ValueError("fraction must be in (0, 1)")
    n = len(dataset.instances)
    if n == 0:
        raise ValueError("empty dataset")
    rng = np.random.Generator(np.random.PCG64(seed))
    if stratify:
        train_idx: list[int] = []
        for label in dataset.outcome.label_values:
            group = [i for i, inst in enumerate(dataset.instances) if inst.label == label]
            perm = rng.permutation(len(group))
            take = int(math.floor(fraction * len(group) + 0.5))
            train_idx += [group[j] for j in perm[:take]]
    else:
        perm = rng.permutation(n)
        train_idx = perm[: int(math.floor(fraction * n + 0.5))].tolist()
    chosen = set(train_idx)
    train = dataset.with_instances(
        inst for i, inst in enumerate(dataset.instances) if i in chosen
    )
    test = dataset.with_instances(
        inst for i, inst in enumerate(dataset.instances) if i not in chosen
    )
    return train, test
