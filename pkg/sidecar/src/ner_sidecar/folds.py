"""Title-grouped cross-validation folds.

Documents are grouped by title before splitting so that no title (and no
resampled copy of it) appears in both a train and a test partition.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .data import BioDataset, DatasetError


@dataclass(frozen=True)
class FoldPlan:
    n_folds: int
    assignment: dict[str, int]  # title -> fold index

    @property
    def folds(self) -> list[set[str]]:
        out: list[set[str]] = [set() for _ in range(self.n_folds)]
        for title, fold in self.assignment.items():
            out[fold].add(title)
        return out

    def split(self, dataset: BioDataset, fold: int):
        """(train_documents, test_documents) for one fold."""
        train = [d for d in dataset.documents if self.assignment[d.title] != fold]
        test = [d for d in dataset.documents if self.assignment[d.title] == fold]
        return train, test


def split_folds_by_title(titles: list[str], n_folds: int = 5,
                         seed: int = 0) -> FoldPlan:
    """Deterministic balanced assignment of distinct titles to folds.

    Fold sizes differ by at most one title. Duplicate entries in `titles`
    collapse to one assignment, so every copy of a title lands in its fold.
    """
    distinct = sorted(set(titles))
    if len(distinct) < n_folds:
        raise DatasetError(
            f"need at least {n_folds} distinct titles, got {len(distinct)}")
    rng = random.Random(seed)
    rng.shuffle(distinct)
    assignment = {title: i % n_folds for i, title in enumerate(distinct)}
    return FoldPlan(n_folds=n_folds, assignment=assignment)
