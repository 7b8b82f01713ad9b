"""Finite posets with marked elements.

Elements are indices 0..n-1; every subset is bit-packed into a Python int
(bit i set <=> element i present), so subset algebra is single word ops.
Mark values are exact rationals, which keeps every comparison decidable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .errors import (
    CycleError,
    DuplicateLabel,
    ExtremalNotMarked,
    MarkingNotMonotone,
    SizeLimit,
    UnknownLabel,
    ValidationError,
)

DEFAULT_MAX_ELEMENTS = 20
DEFAULT_MAX_EXTENSIONS = 500_000

#: A linear extension is a permutation of element indices such that every
#: order relation a <= b puts a before b.
LinearExtension = tuple[int, ...]


def bits(mask: int) -> Iterator[int]:
    """Yield the indices of the set bits of *mask*, lowest first."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Poset:
    """Immutable finite poset.

    ``covers`` is the transitively reduced cover relation; ``up[i]`` and
    ``down[i]`` are bitmasks of the principal filter / ideal of element i
    (both include i itself, i.e. the order is reflexive).
    """

    labels: tuple[str, ...]
    covers: tuple[tuple[int, int], ...]
    up: tuple[int, ...]
    down: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def leq(self, a: int, b: int) -> bool:
        return bool(self.up[a] >> b & 1)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownLabel(f"unknown element label {label!r}") from None

    @property
    def minimal_mask(self) -> int:
        return sum(1 << i for i in range(self.n) if self.down[i] == 1 << i)

    @property
    def maximal_mask(self) -> int:
        return sum(1 << i for i in range(self.n) if self.up[i] == 1 << i)

    def is_ideal(self, members: int) -> bool:
        """True iff *members* is downward closed."""
        for i in bits(members):
            if self.down[i] & ~members:
                return False
        return True

    def comparable(self, a: int, b: int) -> bool:
        return self.leq(a, b) or self.leq(b, a)

    def label_set(self, mask: int) -> tuple[str, ...]:
        return tuple(self.labels[i] for i in bits(mask))


def build_poset(labels: Sequence[str], covers: Iterable[tuple[str, str]]) -> Poset:
    """Build a poset from labels and cover pairs (a, b) meaning a < b.

    The input covers may contain redundant (transitively implied) pairs;
    the stored cover relation is re-derived from the closure, so it is
    always the transitive reduction.
    """
    labels = tuple(labels)
    if not labels:
        raise ValidationError("a poset needs at least one element")
    seen: set[str] = set()
    for lab in labels:
        if lab in seen:
            raise DuplicateLabel(f"element label {lab!r} declared twice")
        seen.add(lab)
    index = {lab: i for i, lab in enumerate(labels)}
    n = len(labels)

    succ = [0] * n
    for a_lab, b_lab in covers:
        for lab in (a_lab, b_lab):
            if lab not in index:
                raise UnknownLabel(f"unknown element label {lab!r} in cover")
        a, b = index[a_lab], index[b_lab]
        if a == b:
            raise CycleError(f"cover {a_lab!r} < {b_lab!r} relates an element to itself")
        succ[a] |= 1 << b

    # Kahn toposort doubles as the cycle check.
    indeg = [0] * n
    for a in range(n):
        for b in bits(succ[a]):
            indeg[b] += 1
    queue = [i for i in range(n) if indeg[i] == 0]
    topo: list[int] = []
    while queue:
        v = queue.pop()
        topo.append(v)
        for w in bits(succ[v]):
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    if len(topo) != n:
        cyclic = sorted(labels[i] for i in range(n) if indeg[i] > 0)
        raise CycleError(f"cover relation has a directed cycle through {cyclic}")

    up = [1 << i for i in range(n)]
    for v in reversed(topo):
        for w in bits(succ[v]):
            up[v] |= up[w]
    down = [1 << i for i in range(n)]
    for i in range(n):
        for j in bits(up[i] & ~(1 << i)):
            down[j] |= 1 << i

    # Transitive reduction from the closure: keep a < b with nothing
    # strictly between.
    reduced = []
    for a in range(n):
        for b in bits(up[a] & ~(1 << a)):
            between = up[a] & down[b] & ~(1 << a) & ~(1 << b)
            if not between:
                reduced.append((a, b))
    reduced.sort()

    return Poset(labels=labels, covers=tuple(reduced), up=tuple(up), down=tuple(down))


def enumerate_ideals(poset: Poset, *, max_elements: int = DEFAULT_MAX_ELEMENTS) -> list[int]:
    """All order ideals of *poset* as bitmasks, subsets before supersets.

    Enumeration grows each ideal along a fixed linear extension, adding one
    minimal element of the complement at a time, so every ideal is produced
    exactly once.  Output is sorted by (cardinality, bit pattern).
    """
    if poset.n > max_elements:
        raise SizeLimit(f"ideal enumeration capped at {max_elements} elements, got {poset.n}")
    order = _lex_min_extension(poset)
    n = poset.n
    down = poset.down
    found: list[int] = []

    def grow(mask: int, last_pos: int) -> None:
        found.append(mask)
        for pos in range(last_pos + 1, n):
            e = order[pos]
            bit = 1 << e
            if not mask & bit and down[e] & ~mask == bit:
                grow(mask | bit, pos)

    grow(0, -1)
    found.sort(key=lambda m: (m.bit_count(), m))
    return found


def _lex_min_extension(poset: Poset) -> LinearExtension:
    """The lexicographically least linear extension (by element index)."""
    remaining = poset.full_mask
    order = []
    while remaining:
        for e in bits(remaining):
            if poset.down[e] & remaining == 1 << e:
                order.append(e)
                remaining &= ~(1 << e)
                break
    return tuple(order)


def linear_extensions(poset: Poset, *, max_count: int = DEFAULT_MAX_EXTENSIONS) -> list[LinearExtension]:
    """All linear extensions, lexicographically ordered by index sequence."""
    out: list[LinearExtension] = []
    order: list[int] = []
    down = poset.down

    def rec(remaining: int) -> None:
        if not remaining:
            if len(out) >= max_count:
                raise SizeLimit(f"linear extension enumeration capped at {max_count}")
            out.append(tuple(order))
            return
        for e in bits(remaining):
            if down[e] & remaining == 1 << e:
                order.append(e)
                rec(remaining & ~(1 << e))
                order.pop()

    rec(poset.full_mask)
    return out


@dataclass(frozen=True)
class MarkedPoset:
    """Poset with a marked subset carrying an order-preserving rational value map.

    ``values[i]`` is the mark of element i, or None when i is unmarked.
    The marked set contains every minimal and maximal element, which bounds
    every coordinate of the associated polytope.
    """

    poset: Poset
    marked: int
    values: tuple[Fraction | None, ...]

    @property
    def unmarked(self) -> int:
        return self.poset.full_mask & ~self.marked

    def value(self, i: int) -> Fraction:
        v = self.values[i]
        if v is None:
            raise ValueError(f"element {self.poset.labels[i]!r} is not marked")
        return v

    def mark_values_in(self, mask: int) -> set[Fraction]:
        return {self.values[i] for i in bits(mask & self.marked)}  # type: ignore[misc]

    def element_display(self, i: int) -> str:
        """Label of an element, with marked elements shown by their value."""
        v = self.values[i]
        return str(v) if v is not None else self.poset.labels[i]


def build_marked_poset(
    poset: Poset, marks: Iterable[tuple[str, Fraction | int | str]]
) -> MarkedPoset:
    """Attach marks to a poset and validate them.

    Raises ExtremalNotMarked when a minimal or maximal element has no mark
    and MarkingNotMonotone when comparable marks are out of order.
    """
    values: list[Fraction | None] = [None] * poset.n
    marked = 0
    for lab, raw in marks:
        i = poset.index(lab)
        if marked >> i & 1:
            raise DuplicateLabel(f"element {lab!r} marked twice")
        marked |= 1 << i
        values[i] = Fraction(raw)

    for i in bits((poset.minimal_mask | poset.maximal_mask) & ~marked):
        kind = "minimal" if poset.down[i] == 1 << i else "maximal"
        raise ExtremalNotMarked(
            f"{kind} element {poset.labels[i]!r} must carry a mark"
        )

    for a in bits(marked):
        for b in bits(poset.up[a] & marked & ~(1 << a)):
            va, vb = values[a], values[b]
            assert va is not None and vb is not None
            if va > vb:
                raise MarkingNotMonotone(
                    f"{poset.labels[a]!r} <= {poset.labels[b]!r} but marks "
                    f"{va} > {vb}"
                )

    return MarkedPoset(poset=poset, marked=marked, values=tuple(values))
