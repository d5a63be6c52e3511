"""Repeated-bisections clustering on cosine similarity, weighted F1 scoring,
and stratified corpus subsampling.

The clustering mirrors a k-way repeated-bisections scheme: split the least
cohesive cluster with 2-means (10 seeded restarts, cosine similarity), keep
the split maximizing the sum of cluster-vector-sum norms, and finish with a
single global pass of single-document moves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import CategoryTooSmall, InsufficientDocs
from .ingest import CorpusManifest
from .weighting import DocVector

_RESTARTS = 10
_MAX_ITER = 100
_MOVE_TOL = 1e-10


@dataclass(frozen=True)
class Clustering:
    """Document-to-cluster assignment.

    k counts the cluster ids in use, including the extra leftover cluster
    that absorbs zero-weight documents when any exist; those doc_ids are
    listed in `leftover`.
    """

    assignment: dict[str, int]
    k: int
    leftover: frozenset[str] = frozenset()

    def members(self) -> dict[int, set[str]]:
        out: dict[int, set[str]] = {}
        for doc_id, cid in self.assignment.items():
            out.setdefault(cid, set()).add(doc_id)
        return out


@dataclass(frozen=True)
class CategoryScore:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class F1Report:
    per_category: dict[str, CategoryScore]
    overall: float


def build_matrix(vectors: Sequence[DocVector]) -> tuple[np.ndarray, list[str]]:
    """Dense doc-term matrix over the union vocabulary (sorted for determinism)."""
    terms = sorted({t for vec in vectors for t in vec.weights})
    index = {t: i for i, t in enumerate(terms)}
    X = np.zeros((len(vectors), len(terms)), dtype=np.float64)
    for row, vec in enumerate(vectors):
        for t, w in vec.weights.items():
            X[row, index[t]] = w
    return X, terms


def clustering_criterion(X: np.ndarray, labels: np.ndarray) -> float:
    """Sum over clusters of the norm of the cluster's vector sum."""
    total = 0.0
    for cid in np.unique(labels):
        total += float(np.linalg.norm(X[labels == cid].sum(axis=0)))
    return total


def _bisect(Xs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Split rows of Xs (L2-normalized) in two; returns a boolean side mask."""
    m = Xs.shape[0]
    best_side = None
    best_score = -math.inf
    for _ in range(_RESTARTS):
        i, j = rng.choice(m, size=2, replace=False)
        c0, c1 = Xs[i], Xs[j]
        side = np.zeros(m, dtype=bool)
        for _ in range(_MAX_ITER):
            s0 = Xs @ c0
            s1 = Xs @ c1
            new_side = s1 > s0
            if new_side.all():
                new_side[int(np.argmax(s0 - s1))] = False
            elif not new_side.any():
                new_side[int(np.argmin(s0 - s1))] = True
            if (new_side == side).all():
                break
            side = new_side
            v0 = Xs[~side].sum(axis=0)
            v1 = Xs[side].sum(axis=0)
            n0 = np.linalg.norm(v0)
            n1 = np.linalg.norm(v1)
            c0 = v0 / n0 if n0 > 0 else Xs[0]
            c1 = v1 / n1 if n1 > 0 else Xs[-1]
        score = float(
            np.linalg.norm(Xs[~side].sum(axis=0)) + np.linalg.norm(Xs[side].sum(axis=0))
        )
        if score > best_score + 1e-12:
            best_score = score
            best_side = side.copy()
    return best_side


def _refine(X: np.ndarray, labels: np.ndarray, k: int) -> None:
    """One pass of greedy single-document moves; never lowers the criterion."""
    sums = np.zeros((k, X.shape[1]))
    np.add.at(sums, labels, X)
    norms = np.linalg.norm(sums, axis=1)
    counts = np.bincount(labels, minlength=k)
    for i in range(X.shape[0]):
        a = int(labels[i])
        if counts[a] <= 1:
            continue
        va = sums[a] - X[i]
        na = float(np.linalg.norm(va))
        best_b = -1
        best_delta = _MOVE_TOL
        best_nb = 0.0
        for b in range(k):
            if b == a:
                continue
            nb = float(np.linalg.norm(sums[b] + X[i]))
            delta = na + nb - norms[a] - norms[b]
            if delta > best_delta:
                best_delta = delta
                best_b = b
                best_nb = nb
        if best_b >= 0:
            labels[i] = best_b
            sums[a] = va
            norms[a] = na
            sums[best_b] += X[i]
            norms[best_b] = best_nb
            counts[a] -= 1
            counts[best_b] += 1


def bisect_labels(X: np.ndarray, k: int, seed) -> np.ndarray:
    """Cluster rows of X (unnormalized ok, no zero rows) into k clusters."""
    n = X.shape[0]
    if n < k:
        raise InsufficientDocs(f"{n} documents cannot fill {k} clusters")
    norms = np.linalg.norm(X, axis=1)
    if (norms == 0).any():
        raise ValueError("zero rows must be diverted before clustering")
    Xn = X / norms[:, None]
    rng = np.random.default_rng(seed)
    labels = np.zeros(n, dtype=np.int64)
    for next_id in range(1, k):
        # least cohesive first: maximize size * (1 - ||sum|| / size)
        best_cid = -1
        best_score = -math.inf
        for cid in range(next_id):
            idx = np.flatnonzero(labels == cid)
            if idx.size < 2:
                continue
            score = idx.size - float(np.linalg.norm(Xn[idx].sum(axis=0)))
            if score > best_score + 1e-12:
                best_score = score
                best_cid = cid
        idx = np.flatnonzero(labels == best_cid)
        side = _bisect(Xn[idx], rng)
        labels[idx[side]] = next_id
    if k > 1:
        _refine(Xn, labels, k)
    return labels


def repeated_bisections(vectors: Sequence[DocVector], k: int, seed) -> Clustering:
    """Cluster documents into k groups; zero vectors land in an extra
    leftover cluster so every document stays assigned."""
    if k < 1:
        raise ValueError("k must be at least 1")
    X, _ = build_matrix(vectors)
    norms = np.linalg.norm(X, axis=1)
    nonzero = np.flatnonzero(norms > 0)
    if nonzero.size < k:
        raise InsufficientDocs(
            f"only {nonzero.size} non-zero documents for k={k}"
        )
    labels = bisect_labels(X[nonzero], k, seed)
    assignment: dict[str, int] = {}
    leftover = []
    pos = {int(row): lab for row, lab in zip(nonzero, labels)}
    for row, vec in enumerate(vectors):
        if row in pos:
            assignment[vec.doc_id] = int(pos[row])
        else:
            assignment[vec.doc_id] = k
            leftover.append(vec.doc_id)
    return Clustering(assignment, k + 1 if leftover else k, frozenset(leftover))


def weighted_f1(clustering: Clustering, labels: Mapping[str, str]) -> F1Report:
    """Best-matching-cluster F1 per category, support-weighted overall.

    Clusters may serve several categories; 0/0 ratios count as 0.
    """
    missing = set(clustering.assignment) - set(labels)
    if missing:
        raise ValueError(f"labels missing for {len(missing)} documents")
    members = clustering.members()
    by_category: dict[str, set[str]] = {}
    for doc_id in clustering.assignment:
        by_category.setdefault(labels[doc_id], set()).add(doc_id)
    n = len(clustering.assignment)
    per_category: dict[str, CategoryScore] = {}
    overall = 0.0
    for cat in sorted(by_category):
        docs = by_category[cat]
        best = CategoryScore(0.0, 0.0, 0.0, len(docs))
        for cid in sorted(members):
            cluster = members[cid]
            hit = len(docs & cluster)
            precision = hit / len(cluster) if cluster else 0.0
            recall = hit / len(docs) if docs else 0.0
            f1 = (
                2.0 * precision * recall / (precision + recall)
                if precision + recall > 0
                else 0.0
            )
            if f1 > best.f1:
                best = CategoryScore(precision, recall, f1, len(docs))
        per_category[cat] = best
        overall += best.f1 * len(docs) / n
    return F1Report(per_category, overall)


def stratified_subsample(
    manifest: CorpusManifest, fraction: float = 0.5, n: int = 100, seed=0
) -> list[CorpusManifest]:
    """n fractionally sized sub-corpora preserving category proportions.

    Each sub-manifest draws ceil(fraction * |c|) documents per category
    without replacement, independently across sub-manifests, reproducibly
    from the seed.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError("fraction must lie in (0, 1]")
    by_category: dict[str, list[int]] = {}
    for i, entry in enumerate(manifest.entries):
        by_category.setdefault(entry.category, []).append(i)
    for cat, idxs in by_category.items():
        if len(idxs) < 2:
            raise CategoryTooSmall(f"category {cat!r} has {len(idxs)} document(s)")
    out = []
    for child in np.random.SeedSequence(seed).spawn(n):
        rng = np.random.default_rng(child)
        chosen: set[int] = set()
        for cat in manifest.categories():
            idxs = by_category[cat]
            take = math.ceil(fraction * len(idxs))
            picks = rng.choice(len(idxs), size=take, replace=False)
            chosen.update(idxs[int(p)] for p in picks)
        entries = tuple(e for i, e in enumerate(manifest.entries) if i in chosen)
        out.append(CorpusManifest(entries, manifest.anchors_dir))
    return out
