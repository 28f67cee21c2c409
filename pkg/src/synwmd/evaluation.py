"""Rank correlation, STS evaluation, and kNN classification harnesses."""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInput, FoldTooSmall, MalformedLine


def average_ranks(values) -> np.ndarray:
    """1-based fractional ranks; ties share the average of their positions."""
    v = np.asarray(values, dtype=np.float64)
    order = np.argsort(v, kind="stable")
    ranks = np.empty(len(v))
    i = 0
    while i < len(v):
        j = i
        while j + 1 < len(v) and v[order[j + 1]] == v[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman(x, y) -> float:
    """Spearman correlation: Pearson over average fractional ranks."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 1 or x.shape != y.shape:
        raise ValueError("inputs must be equal-length 1-d vectors")
    if len(x) < 2:
        raise ValueError("need at least two observations")
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise DegenerateInput("constant vector has no rank correlation")
    rx = average_ranks(x)
    ry = average_ranks(y)
    rx -= rx.mean()
    ry -= ry.mean()
    return float((rx @ ry) / math.sqrt((rx @ rx) * (ry @ ry)))


# -- STS ----------------------------------------------------------------


@dataclass(frozen=True)
class StsPair:
    pair_id: str
    subset: str
    gold: float
    sent_a: str
    sent_b: str


@dataclass(frozen=True)
class StsDataset:
    pairs: tuple[StsPair, ...]

    def subsets(self) -> list[str]:
        seen = []
        for pair in self.pairs:
            if pair.subset not in seen:
                seen.append(pair.subset)
        return seen

    def __len__(self):
        return len(self.pairs)


def load_sts_tsv(source, source_name: str = "<stream>") -> StsDataset:
    """Read pair rows "subset<TAB>gold<TAB>sent_id_a<TAB>sent_id_b"."""
    if isinstance(source, str):
        lines = source.splitlines()
    elif hasattr(source, "read"):
        lines = source.read().splitlines()
    else:
        lines = [ln.rstrip("\n") for ln in source]
    pairs = []
    for line_no, line in enumerate(lines, start=1):
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.rstrip("\n").split("\t")
        if len(cols) != 4:
            raise MalformedLine(
                f"{source_name}, line {line_no}: expected 4 columns, got {len(cols)}"
            )
        subset, gold_text, sent_a, sent_b = cols
        try:
            gold = float(gold_text)
        except ValueError:
            raise MalformedLine(
                f"{source_name}, line {line_no}: bad gold score {gold_text!r}"
            ) from None
        if not math.isfinite(gold):
            raise MalformedLine(f"{source_name}, line {line_no}: non-finite gold")
        pairs.append(StsPair(f"{sent_a}|{sent_b}", subset, gold, sent_a, sent_b))
    return StsDataset(tuple(pairs))


def load_sentence_texts(source, source_name: str = "<stream>") -> dict[str, str]:
    """Read "sent_id<TAB>text" rows into a mapping."""
    if isinstance(source, str):
        lines = source.splitlines()
    elif hasattr(source, "read"):
        lines = source.read().splitlines()
    else:
        lines = [ln.rstrip("\n") for ln in source]
    texts = {}
    for line_no, line in enumerate(lines, start=1):
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t", 1)
        if len(cols) != 2:
            raise MalformedLine(
                f"{source_name}, line {line_no}: expected 2 columns"
            )
        texts[cols[0]] = cols[1]
    return texts


@dataclass
class EvalReport:
    """Evaluation results with deterministic JSON and table renderings."""

    kind: str
    overall: dict
    per_subset: dict[str, dict] = field(default_factory=dict)
    manifest: dict = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {
            "kind": self.kind,
            "overall": self.overall,
            "per_subset": self.per_subset,
            "manifest": self.manifest,
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    def to_table(self) -> str:
        rows = [("subset", *self.overall.keys())]
        for name, stats in self.per_subset.items():
            rows.append((name, *(str(stats.get(k, "")) for k in self.overall)))
        rows.append(("overall", *(str(v) for v in self.overall.values())))
        widths = [max(len(str(r[k])) for r in rows) for k in range(len(rows[0]))]
        lines = [
            "  ".join(str(cell).ljust(w) for cell, w in zip(row, widths)).rstrip()
            for row in rows
        ]
        lines.insert(1, "  ".join("-" * w for w in widths))
        return "\n".join(lines) + "\n"


def eval_sts(dataset: StsDataset, distances) -> EvalReport:
    """Spearman of gold against negated distance, per subset and pooled.

    ``distances`` maps pair_id to a distance. The pooled row concatenates
    every subset's pairs. Correlations are reported as rho * 100 rounded
    to two decimals.
    """
    missing = [p.pair_id for p in dataset.pairs if p.pair_id not in distances]
    if missing:
        raise KeyError(f"missing distances for pairs: {missing[:5]}")

    def stats(pairs):
        gold = [p.gold for p in pairs]
        scores = [-float(distances[p.pair_id]) for p in pairs]
        rho = spearman(gold, scores)
        return {"spearman_x100": round(rho * 100.0, 2), "pairs": len(pairs)}

    per_subset = {
        name: stats([p for p in dataset.pairs if p.subset == name])
        for name in dataset.subsets()
    }
    return EvalReport("sts", stats(dataset.pairs), per_subset)


# -- classification -----------------------------------------------------


def knn_classify(distances, labels, k: int):
    """Majority label among the k nearest examples.

    Equal distances rank by lower example index; a vote tie goes to the
    nearest example whose label is among the tied leaders.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    order = sorted(range(len(labels)), key=lambda i: (distances[i], i))
    top = order[: min(k, len(order))]
    votes = Counter(labels[i] for i in top)
    best = max(votes.values())
    leaders = {label for label, count in votes.items() if count == best}
    if len(leaders) == 1:
        return leaders.pop()
    for i in top:
        if labels[i] in leaders:
            return labels[i]
    raise RuntimeError("unreachable")  # leaders come from top


def stratified_folds(labels, folds: int, seed: int = 0) -> list[int]:
    """Fold id per example: labels shuffled within class, dealt round-robin."""
    n = len(labels)
    if folds < 2:
        raise FoldTooSmall(f"need at least 2 folds, got {folds}")
    if folds > n:
        raise FoldTooSmall(f"{folds} folds cannot be formed from {n} examples")
    rng = np.random.default_rng(seed)
    fold_of = [0] * n
    by_label: dict = {}
    for i, label in enumerate(labels):
        by_label.setdefault(label, []).append(i)
    offset = 0
    for label in sorted(by_label, key=str):
        members = np.array(by_label[label])
        rng.shuffle(members)
        for pos, idx in enumerate(members):
            fold_of[idx] = (offset + pos) % folds
        offset += len(members)
    return fold_of


def eval_cls(
    labels,
    distance_matrix,
    folds: int = 10,
    k_values=range(1, 31),
    seed: int = 0,
) -> EvalReport:
    """Stratified cross-validated kNN accuracy over a grid of k values."""
    labels = list(labels)
    dist = np.asarray(distance_matrix, dtype=np.float64)
    n = len(labels)
    if dist.shape != (n, n):
        raise ValueError(f"distance matrix shape {dist.shape} does not match {n} labels")
    k_values = list(k_values)
    if not k_values or min(k_values) < 1:
        raise ValueError("k grid must contain positive values")
    fold_of = stratified_folds(labels, folds, seed)
    correct = {k: 0 for k in k_values}
    for fold in range(folds):
        train = [i for i in range(n) if fold_of[i] != fold]
        test = [i for i in range(n) if fold_of[i] == fold]
        if not train:
            raise FoldTooSmall(f"fold {fold} leaves no training examples")
        train_labels = [labels[i] for i in train]
        for i in test:
            row = dist[i, train]
            for k in k_values:
                if knn_classify(row, train_labels, k) == labels[i]:
                    correct[k] += 1
    accuracy = {k: correct[k] / n for k in k_values}
    best_k = min(k for k in k_values if accuracy[k] == max(accuracy.values()))
    per_k = {
        f"k={k}": {"accuracy_x100": round(accuracy[k] * 100.0, 2)} for k in k_values
    }
    overall = {
        "best_k": best_k,
        "accuracy_x100": round(accuracy[best_k] * 100.0, 2),
        "examples": n,
        "folds": folds,
    }
    return EvalReport("classification", overall, per_k)
