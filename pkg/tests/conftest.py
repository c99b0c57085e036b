import numpy as np
import pytest

from rulelens.dataset import Dataset, FeatureSchema, Instance, OutcomeSpec


def make_dataset(rows, schema=None, interesting=("v",), labels=("v", "no")):
    """rows: list of (id, values dict, label)."""
    if schema is None:
        feats = sorted({k for _, vals, _ in rows for k in vals})
        schema = tuple(
            FeatureSchema(f, "categorical", ("a", "b", "yes", "no")) for f in feats
        )
    outcome = OutcomeSpec(label_values=tuple(labels), interesting_values=tuple(interesting))
    instances = tuple(Instance(i, dict(v), l) for i, v, l in rows)
    return Dataset(schema=schema, outcome=outcome, instances=instances)


def random_binary_dataset(rng: np.random.Generator, n_rows: int, n_features: int,
                          interesting_rate: float = 0.4):
    """Random yes/no feature table with a two-valued label."""
    schema = tuple(
        FeatureSchema(f"f{j}", "categorical", ("yes", "no")) for j in range(n_features)
    )
    outcome = OutcomeSpec(label_values=("v", "no"), interesting_values=("v",))
    values = rng.random((n_rows, n_features)) < rng.uniform(0.2, 0.8, size=n_features)
    labels = rng.random(n_rows) < interesting_rate
    instances = tuple(
        Instance(
            f"r{i}",
            {f"f{j}": ("yes" if values[i, j] else "no") for j in range(n_features)},
            "v" if labels[i] else "no",
        )
        for i in range(n_rows)
    )
    return Dataset(schema=schema, outcome=outcome, instances=instances)


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(20260810))
