"""Feature selection by most-frequent-terms ranking.

Terms are ranked inside each document by weight; rank slots are then walked
globally: every term that tops some document competes at slot 0, ordered by
how many documents it tops and, on ties, by its best weight there.  Slot 1
follows, and so on, until enough distinct terms have accumulated.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

from .weighting import DocVector

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FeatureSet:
    terms: tuple[str, ...]
    requested: int

    def __contains__(self, term: str) -> bool:
        return term in set(self.terms)

    def __len__(self) -> int:
        return len(self.terms)


def ranked_terms(vec: DocVector) -> list[str]:
    """Document-level ranking: weight descending, term ascending on ties."""
    return [t for t, _ in sorted(vec.weights.items(), key=lambda kv: (-kv[1], kv[0]))]


def mft_order(vectors) -> list[str]:
    """Full global term ordering; mft_select takes prefixes of this list."""
    tallies: list[dict[str, list]] = []
    for vec in vectors:
        ranked = sorted(vec.weights.items(), key=lambda kv: (-kv[1], kv[0]))
        if len(tallies) < len(ranked):
            tallies.extend({} for _ in range(len(ranked) - len(tallies)))
        for rank, (term, w) in enumerate(ranked):
            slot = tallies[rank].get(term)
            if slot is None:
                tallies[rank][term] = [1, w]
            else:
                slot[0] += 1
                if w > slot[1]:
                    slot[1] = w
    order: list[str] = []
    seen: set[str] = set()
    for tally in tallies:
        batch = [
            (term, count, max_w)
            for term, (count, max_w) in tally.items()
            if term not in seen
        ]
        batch.sort(key=lambda x: (-x[1], -x[2], x[0]))
        for term, _, _ in batch:
            order.append(term)
            seen.add(term)
    return order


def mft_select(vectors, k: int) -> FeatureSet:
    """Top-k features by the most-frequent-terms ordering.

    When the corpus vocabulary is smaller than k, the full vocabulary is
    returned (with a log note) and `requested` keeps the asked-for size.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    order = mft_order(vectors)
    if len(order) < k:
        log.info("vocabulary has %d terms, fewer than the %d requested", len(order), k)
    return FeatureSet(tuple(order[:k]), k)


def project(vec: DocVector, features: FeatureSet) -> DocVector:
    """Restrict a vector to the selected features."""
    keep = set(features.terms)
    return DocVector(vec.doc_id, {t: w for t, w in vec.weights.items() if t in keep})


def dump_features(features: FeatureSet, path) -> None:
    """One feature per line, in selection order."""
    Path(path).write_text("\n".join(features.terms) + "\n", encoding="utf-8")
