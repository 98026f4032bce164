"""Non-overlapping feature groups and the group-indexed norms built on them.

A :class:`GroupPartition` splits the feature indices ``{0, ..., p-1}`` into
``m`` disjoint, covering groups.  Group indices are zero-based everywhere in
the library; the one-based signed-path notation is applied only at the
display/serialization boundary.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np

from .errors import CoverageError, DimensionError, OverlapError, RangeError


class GroupSet(frozenset):
    """Immutable set of group indices in ``{0, ..., m-1}``."""

    @classmethod
    def checked(cls, members: Iterable[int], m: int) -> "GroupSet":
        out = cls(int(g) for g in members)
        for g in out:
            if not 0 <= g < m:
                raise RangeError(f"group index {g} outside [0, {m})")
        return out


@dataclass(frozen=True, eq=False)
class GroupPartition:
    """Partition of ``{0, ..., p-1}`` into disjoint feature groups.

    Attributes
    ----------
    p : int
        Total feature count.
    groups : tuple of ndarray
        One sorted, duplicate-free int array of feature indices per group.

    Construct through :func:`validate_partition`, which checks the partition
    property; the constructor itself trusts its inputs.
    """

    p: int
    groups: tuple[np.ndarray, ...]

    @property
    def m(self) -> int:
        return len(self.groups)

    @cached_property
    def sizes(self) -> np.ndarray:
        return np.array([len(g) for g in self.groups], dtype=np.intp)

    @cached_property
    def group_of_feature(self) -> np.ndarray:
        """Length-p array mapping each feature index to its group index."""
        owner = np.empty(self.p, dtype=np.intp)
        for g, idx in enumerate(self.groups):
            owner[idx] = g
        return owner

    @cached_property
    def equal_sized(self) -> bool:
        return bool(np.all(self.sizes == self.sizes[0]))

    @cached_property
    def index_matrix(self) -> np.ndarray:
        """(m, q) index matrix; only available when all groups share size q."""
        if not self.equal_sized:
            raise RangeError("index_matrix requires equal-sized groups")
        return np.stack(self.groups)

    def max_support_size(self, s: int) -> int:
        """k_s: the largest feature count of any union of ``s`` groups.

        Monotone in ``s`` and equal to ``p`` at ``s = m``.
        """
        if not 0 <= s <= self.m:
            raise RangeError(f"s={s} outside [0, {self.m}]")
        return int(np.sort(self.sizes)[::-1][:s].sum())


def validate_partition(raw_groups: Iterable[Iterable[int]], p: int) -> GroupPartition:
    """Validate and normalize a raw grouping into a :class:`GroupPartition`.

    Parameters
    ----------
    raw_groups : iterable of iterables of int
        Candidate feature-index lists, zero-based.
    p : int
        Feature count the groups must cover exactly.

    Raises
    ------
    OverlapError
        If an index occurs in two groups (or twice within one group).
    CoverageError
        If some index in ``{0, ..., p-1}`` is unassigned.
    RangeError
        If an index falls outside ``[0, p)``, a group is empty, or ``p < 1``.
    """
    if p < 1:
        raise RangeError(f"p must be positive, got {p}")
    seen = np.zeros(p, dtype=bool)
    normalized: list[np.ndarray] = []
    for gi, raw in enumerate(raw_groups):
        idx = np.array(sorted(int(i) for i in raw), dtype=np.intp)
        if idx.size == 0:
            raise RangeError(f"group {gi} is empty")
        if idx[0] < 0 or idx[-1] >= p:
            bad = idx[0] if idx[0] < 0 else idx[-1]
            raise RangeError(f"feature index {bad} outside [0, {p}) in group {gi}")
        if np.any(idx[1:] == idx[:-1]):
            dup = int(idx[np.flatnonzero(idx[1:] == idx[:-1])[0]])
            raise OverlapError(f"feature index {dup} repeated within group {gi}")
        clash = seen[idx]
        if np.any(clash):
            raise OverlapError(
                f"feature index {int(idx[np.flatnonzero(clash)[0]])} assigned twice"
            )
        seen[idx] = True
        normalized.append(idx)
    if not normalized:
        raise RangeError("at least one group required")
    if not np.all(seen):
        raise CoverageError(f"feature index {int(np.flatnonzero(~seen)[0])} unassigned")
    return GroupPartition(p=p, groups=tuple(normalized))


def singleton_partition(p: int) -> GroupPartition:
    """The partition where every feature is its own group (m = p)."""
    if p < 1:
        raise RangeError(f"p must be positive, got {p}")
    return GroupPartition(p=p, groups=tuple(np.array([j], dtype=np.intp) for j in range(p)))


def feature_set(partition: GroupPartition, S: Iterable[int]) -> np.ndarray:
    """Sorted union of the feature indices of the groups in ``S``."""
    members = GroupSet.checked(S, partition.m)
    if not members:
        return np.array([], dtype=np.intp)
    return np.sort(np.concatenate([partition.groups[g] for g in sorted(members)]))


@dataclass(frozen=True)
class GroupNorms:
    """Per-group Euclidean norms of a coefficient vector and their reductions."""

    per_group_l2: np.ndarray
    l2_inf: float
    l2_1: float
    group_l0: int


def group_norms(w: np.ndarray, partition: GroupPartition) -> GroupNorms:
    """Group-indexed norms of ``w``: per-group l2, their max, sum, and support count."""
    w = np.asarray(w, dtype=float)
    if w.shape != (partition.p,):
        raise DimensionError(f"expected length-{partition.p} vector, got shape {w.shape}")
    per_group = np.array([np.linalg.norm(w[idx]) for idx in partition.groups])
    return GroupNorms(
        per_group_l2=per_group,
        l2_inf=float(per_group.max()) if per_group.size else 0.0,
        l2_1=float(per_group.sum()),
        group_l0=int(np.count_nonzero(per_group > 0.0)),
    )


def embed(partition: GroupPartition, g: int, alpha: np.ndarray) -> np.ndarray:
    """Scatter the within-group vector ``alpha`` into a length-p vector.

    Realizes the group embedding matrix applied to ``alpha`` (alpha placed at
    the feature positions of group ``g``, zeros elsewhere) without
    materializing the matrix.
    """
    if not 0 <= g < partition.m:
        raise RangeError(f"group index {g} outside [0, {partition.m})")
    idx = partition.groups[g]
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (idx.size,):
        raise DimensionError(f"expected length-{idx.size} vector, got shape {alpha.shape}")
    out = np.zeros(partition.p)
    out[idx] = alpha
    return out


def partition_to_dict(partition: GroupPartition) -> dict:
    """JSON-ready form: ``{"p": int, "groups": [[int, ...], ...]}``, zero-based."""
    return {"p": partition.p, "groups": [[int(i) for i in idx] for idx in partition.groups]}


def partition_from_dict(doc: dict) -> GroupPartition:
    """Validate a ``{"p", "groups"}`` document into a partition."""
    try:
        p = int(doc["p"])
        raw = doc["groups"]
    except (KeyError, TypeError) as exc:
        raise RangeError(f"groups document must have 'p' and 'groups': {exc}") from exc
    return validate_partition(raw, p)


def load_partition(path: str) -> GroupPartition:
    """Read and validate a groups JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        return partition_from_dict(json.load(fh))


def save_partition(partition: GroupPartition, path: str) -> None:
    """Write a groups JSON file."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(partition_to_dict(partition), fh, indent=2)
        fh.write("\n")
