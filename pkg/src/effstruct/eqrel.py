"""Equivalence relations on finite windows: partitions, characters, spectra.

A :class:`Partition` is a union-find over ``[0, window)`` where elements
never mentioned by a merge stay singletons.  A :class:`Character` records
which class sizes occur with which (exact, finite) multiplicities; at this
scale "infinitely many" is never asserted, callers restrict counting to a
certified-stable set of classes instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .core import ApproxTable, UPSeq, upseq_limits
from .errors import InputError


class Partition:
    """Equivalence relation on [0, window) with merge and size queries."""

    def __init__(self, window: int):
        if window < 0:
            raise InputError("window must be nonnegative")
        self.window = window
        self._parent = list(range(window))
        self._size = [1] * window
        self._min = list(range(window))
        self.mentioned: set[int] = set()

    def _check(self, x: int) -> None:
        if not 0 <= x < self.window:
            raise InputError(f"element {x} outside window [0, {self.window})")

    def find(self, x: int) -> int:
        self._check(x)
        root = x
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[x] != root:  # path compression
            self._parent[x], x = root, self._parent[x]
        return root

    def merge(self, x: int, y: int) -> None:
        self._check(x)
        self._check(y)
        self.mentioned.update((x, y))
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return
        if self._size[rx] < self._size[ry]:
            rx, ry = ry, rx
        self._parent[ry] = rx
        self._size[rx] += self._size[ry]
        self._min[rx] = min(self._min[rx], self._min[ry])

    def same(self, x: int, y: int) -> bool:
        return self.find(x) == self.find(y)

    def class_size(self, x: int) -> int:
        return self._size[self.find(x)]

    def class_min(self, x: int) -> int:
        return self._min[self.find(x)]

    def class_of(self, x: int) -> list[int]:
        root = self.find(x)
        return [y for y in range(self.window) if self.find(y) == root]

    def roots(self) -> list[int]:
        return [x for x in range(self.window) if self.find(x) == x]

    def classes(self) -> list[list[int]]:
        """All classes, sorted by minimum, members ascending."""
        byroot: dict[int, list[int]] = {}
        for x in range(self.window):
            byroot.setdefault(self.find(x), []).append(x)
        return sorted(byroot.values(), key=min)

    def copy(self) -> "Partition":
        out = Partition(self.window)
        out._parent = list(self._parent)
        out._size = list(self._size)
        out._min = list(self._min)
        out.mentioned = set(self.mentioned)
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return self.window == other.window and self.classes() == other.classes()

    def __repr__(self) -> str:
        return f"Partition({self.window}, classes={self.classes()})"


def merge_classes(p: Partition, x: int, y: int) -> Partition:
    """Coarsen ``p`` by x ~ y (in place) and return it."""
    p.merge(x, y)
    return p


def class_size(p: Partition, x: int) -> int:
    return p.class_size(x)


def oldest_class_min(p: Partition, k: int) -> Optional[int]:
    """Least class minimum among classes of size exactly ``k``, if any.

    The class with the least minimum is the oldest one of its size.
    """
    if k < 1:
        raise InputError("class size must be at least 1")
    candidates = [p._min[r] for r in p.roots() if p._size[r] == k]
    return min(candidates) if candidates else None


class Character:
    """Exact finite map from class size to number of classes of that size."""

    def __init__(self, entries: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        items = dict(entries)
        for size, count in items.items():
            if not isinstance(size, int) or not isinstance(count, int):
                raise InputError(f"character entries must be integers, got ({size!r}, {count!r})")
            if size < 1 or count < 0:
                raise InputError(f"bad character entry ({size}, {count})")
        self.entries: dict[int, int] = {s: c for s, c in sorted(items.items()) if c > 0}

    def count(self, size: int) -> int:
        return self.entries.get(size, 0)

    def sizes(self) -> list[int]:
        return list(self.entries)

    def to_pairs(self) -> list[list[int]]:
        return [[s, c] for s, c in self.entries.items()]

    @classmethod
    def from_pairs(cls, pairs: Iterable[Iterable[int]]) -> "Character":
        out: dict[int, int] = {}
        for pair in pairs:
            pair = list(pair)
            if len(pair) != 2:
                raise InputError("character entries must be [size, count] pairs")
            size, count = pair
            if size in out:
                raise InputError(f"duplicate character size {size}")
            out[size] = count
        return cls(out)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Character):
            return NotImplemented
        return self.entries == other.entries

    def __repr__(self) -> str:
        return f"Character({self.entries})"


def character_of(p: Partition, stable_only: Optional[Iterable[int]] = None) -> Character:
    """Size/count character of ``p``.

    Only classes whose minimum lies in ``stable_only`` are counted
    (all classes when it is None).  Construction snapshots contain
    classes still subject to change; restricting to certified-stable
    minima makes character comparison exact.
    """
    stable = None if stable_only is None else set(stable_only)
    if stable is not None:
        for x in stable:
            if not 0 <= x < p.window:
                raise InputError(f"stable element {x} outside window")
    tally: dict[int, int] = {}
    for r in p.roots():
        if stable is not None and p._min[r] not in stable:
            continue
        tally[p._size[r]] = tally.get(p._size[r], 0) + 1
    return Character(tally)


@dataclass(frozen=True)
class LMFunctionTable:
    """Approximation table that is nondecreasing in the stage argument.

    Monotonicity over an ultimately periodic presentation forces every
    period to be constant, so each column has an exact limit.
    """

    columns: tuple[UPSeq, ...]

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        for x, col in enumerate(self.columns):
            _check_monotone_column(x, col)

    @property
    def width(self) -> int:
        return len(self.columns)

    def limit(self, x: int) -> int:
        if not 0 <= x < self.width:
            raise InputError(f"column index {x} out of range")
        lim = upseq_limits(self.columns[x]).limit
        assert lim is not None
        return lim

    def as_table(self) -> ApproxTable:
        return ApproxTable(self.columns)


def _check_monotone_column(x: int, col: UPSeq) -> None:
    if not isinstance(col, UPSeq):
        raise InputError("table columns must be UPSeq values")
    values = list(col.prefix) + list(col.period)
    for a, b in zip(values, values[1:]):
        if a > b:
            raise InputError(f"column {x} is not nondecreasing ({a} then {b})")
    if len(set(col.period)) != 1:
        raise InputError(f"column {x} has a non-constant period, not monotone")


def lm_spectrum(f: LMFunctionTable) -> Character:
    """Character induced by a monotone table: for each value kappa, the
    number of columns whose limit is kappa."""
    tally: dict[int, int] = {}
    for x in range(f.width):
        lim = f.limit(x)
        if lim < 1:
            raise InputError(f"column {x} has limit {lim}; class sizes start at 1")
        tally[lim] = tally.get(lim, 0) + 1
    return Character(tally)


def partition_to_json(p: Partition) -> dict:
    return {"window": p.window, "classes": p.classes()}


def partition_from_json(obj: object) -> Partition:
    if not isinstance(obj, dict) or "window" not in obj or "classes" not in obj:
        raise InputError("partition object must have 'window' and 'classes' keys")
    window = obj["window"]
    classes = obj["classes"]
    if not isinstance(window, int) or not isinstance(classes, list):
        raise InputError("bad partition field types")
    p = Partition(window)
    seen: set[int] = set()
    for cls in classes:
        if not isinstance(cls, list) or not cls:
            raise InputError("classes must be nonempty arrays")
        for m in cls:
            if not isinstance(m, int) or not 0 <= m < window:
                raise InputError(f"class member {m!r} outside window")
            if m in seen:
                raise InputError(f"element {m} appears in two classes")
            seen.add(m)
        for m in cls[1:]:
            p.merge(cls[0], m)
    if len(seen) != window:
        raise InputError("classes must cover the whole window")
    return p
