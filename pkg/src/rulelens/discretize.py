"""Supervised discretization of continuous features.

Recursive entropy-minimizing binary splitting with the minimum-description-
length stopping test. Cut candidates are midpoints between adjacent distinct
values whose surrounding label sets contain at least two distinct labels
(boundary points); restricting to those never loses the gain-optimal cut.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .dataset import CONTINUOUS, Dataset
from .errors import DataFormatError
from .items import Bin, NEG_INF, POS_INF


def _entropy(counts: np.ndarray) -> float:
    """Shannon entropy (bits) of a label-count vector."""
    n = counts.sum()
    if n == 0:
        return 0.0
    nz = counts[counts > 0]
    return float(math.log2(n) - (nz * np.log2(nz)).sum() / n)


def mdlp_discretize(values, labels) -> list[float]:
    """Return strictly increasing cut points for one continuous feature.

    values may contain None/NaN entries (excluded together with their
    labels). Raises ValueError when nothing non-missing remains.
    """
    pairs = [
        (float(v), lab)
        for v, lab in zip(values, labels, strict=True)
        if v is not None and not math.isnan(v)
    ]
    if not pairs:
        raise ValueError("all values missing")
    pairs.sort(key=lambda p: p[0])

    label_ids = {lab: i for i, lab in enumerate(sorted({lab for _, lab in pairs}))}
    n_labels = len(label_ids)

    # Collapse to distinct values with per-value label counts.
    distinct: list[float] = []
    rows: list[np.ndarray] = []
    for v, lab in pairs:
        if not distinct or v != distinct[-1]:
            distinct.append(v)
            rows.append(np.zeros(n_labels, dtype=np.int64))
        rows[-1][label_ids[lab]] += 1
    counts = np.vstack(rows)
    # prefix[i] = label counts of values v_0..v_{i-1}
    prefix = np.vstack([np.zeros(n_labels, dtype=np.int64), np.cumsum(counts, axis=0)])

    cuts: list[float] = []
    _split(distinct, counts, prefix, 0, len(distinct), cuts)
    cuts.sort()
    return cuts


def _split(distinct, counts, prefix, a: int, b: int, out: list[float]) -> None:
    """Recursively cut the distinct-value segment [a, b)."""
    seg = prefix[b] - prefix[a]
    n = int(seg.sum())
    if n < 2:
        return
    ent_s = _entropy(seg)
    if ent_s == 0.0:
        return
    k = int((seg > 0).sum())

    best = None  # (gain, i, ent1, ent2, k1, k2)
    for i in range(a, b - 1):
        # Boundary point: labels on the two sides of the gap are not one
        # identical pure class.
        both = counts[i] + counts[i + 1]
        if int((both > 0).sum()) < 2:
            continue
        left = prefix[i + 1] - prefix[a]
        right = prefix[b] - prefix[i + 1]
        n1 = int(left.sum())
        n2 = n - n1
        ent1 = _entropy(left)
        ent2 = _entropy(right)
        gain = ent_s - (n1 * ent1 + n2 * ent2) / n
        if best is None or gain > best[0]:
            best = (gain, i, ent1, ent2, int((left > 0).sum()), int((right > 0).sum()))
    if best is None:
        return

    gain, i, ent1, ent2, k1, k2 = best
    threshold = (
        math.log2(n - 1) + math.log2(3**k - 2) - k * ent_s + k1 * ent1 + k2 * ent2
    ) / n
    if not gain > threshold:
        return
    out.append((distinct[i] + distinct[i + 1]) / 2.0)
    _split(distinct, counts, prefix, a, i + 1, out)
    _split(distinct, counts, prefix, i + 1, b, out)


def bins_from_cuts(cuts) -> list[Bin]:
    """k strictly increasing cuts -> k+1 half-open bins covering the reals."""
    cuts = [float(c) for c in cuts]
    if any(not a < b for a, b in zip(cuts, cuts[1:])):
        raise ValueError(f"cuts must be strictly increasing: {cuts}")
    edges = [NEG_INF, *cuts, POS_INF]
    return [Bin(lo, hi) for lo, hi in zip(edges, edges[1:])]


def thread_count() -> int:
    """Parallelism cap from RULELENS_THREADS; defaults to a small pool."""
    raw = os.environ.get("RULELENS_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return min(4, os.cpu_count() or 1)


def discretize_features(train: Dataset, features=None) -> dict[str, list[float]]:
    """Run MDLP per continuous feature; result independent of scheduling."""
    names = [
        f.name
        for f in train.schema
        if f.kind == CONTINUOUS and (features is None or f.name in features)
    ]
    labels = [inst.label for inst in train.instances]

    def one(name: str) -> list[float]:
        vals = [inst.values[name] for inst in train.instances]
        return mdlp_discretize(vals, labels)

    workers = thread_count()
    if workers == 1 or len(names) <= 1:
        return {name: one(name) for name in names}
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(one, names))
    return dict(zip(names, results))


def save_cuts(path, cuts: dict[str, list[float]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({k: list(map(float, v)) for k, v in sorted(cuts.items())}, fh, indent=2)
        fh.write("\n")


def load_cuts(path) -> dict[str, list[float]]:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: malformed JSON: {exc}") from exc
    return {k: [float(c) for c in v] for k, v in raw.items()}
