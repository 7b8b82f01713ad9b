"""Admissible chains of nested order ideals.

A chain of ideals empty = I_0 < I_1 < ... < I_{m+1} = P is *admissible*
(for the mark map of the ambient marked poset) when every block
I_i \\ I_{i-1} contains at most one distinct mark value and the values that
do appear strictly increase along the chain.  The dimension of a chain is
the number of blocks containing no marked element; it equals the dimension
of the product-of-simplices cell the chain carves out of the polytope.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import SizeLimit
from .poset import (
    DEFAULT_MAX_ELEMENTS,
    DEFAULT_MAX_EXTENSIONS,
    LinearExtension,
    MarkedPoset,
    bits,
    enumerate_ideals,
    linear_extensions,
)

DEFAULT_MAX_CHAINS = 500_000


@dataclass(frozen=True)
class AdmissibleChain:
    """An admissible ideal chain together with its block decomposition.

    ``blocks[i]`` is the bitmask ``ideals[i+1] & ~ideals[i]``;
    ``block_values[i]`` is the single mark value appearing in the block, or
    None when the block is unmarked; ``dim`` counts the unmarked blocks.
    """

    ideals: tuple[int, ...]
    blocks: tuple[int, ...]
    block_values: tuple[Fraction | None, ...]
    dim: int

    def __len__(self) -> int:
        return len(self.ideals)

    def ideal_set(self) -> frozenset[int]:
        return frozenset(self.ideals)

    def is_subchain_of(self, other: AdmissibleChain) -> bool:
        return set(self.ideals) <= set(other.ideals)


@dataclass(frozen=True)
class Densification:
    """Insertion of a single ideal into a gap of an admissible chain.

    ``inserted`` lies strictly between ``parent.ideals[position-1]`` and
    ``parent.ideals[position]`` and the enlarged chain is again admissible,
    hence of dimension ``parent.dim + 1``.
    """

    parent: AdmissibleChain
    position: int
    inserted: int
    result: AdmissibleChain


def normalize_ideal_chain(mp: MarkedPoset, ideals: Iterable[int]) -> tuple[int, ...]:
    """Deduplicate, sort by inclusion, and attach the empty/full endpoints.

    Raises ValueError when the input is not a chain of order ideals.
    """
    poset = mp.poset
    seq = sorted({int(m) for m in ideals}, key=lambda m: (m.bit_count(), m))
    if not seq or seq[0] != 0:
        seq.insert(0, 0)
    if seq[-1] != poset.full_mask:
        seq.append(poset.full_mask)
    for lo, hi in zip(seq, seq[1:]):
        if lo & ~hi:
            raise ValueError("ideals do not form a chain under inclusion")
    for m in seq:
        if not poset.is_ideal(m):
            raise ValueError(f"{poset.label_set(m)} is not an order ideal")
    return tuple(seq)


def _block_values(mp: MarkedPoset, ideals: Sequence[int]) -> list[Fraction | None] | None:
    """Per-block mark values, or None when some block carries two distinct marks."""
    out: list[Fraction | None] = []
    for lo, hi in zip(ideals, ideals[1:]):
        vals = mp.mark_values_in(hi & ~lo)
        if len(vals) > 1:
            return None
        out.append(vals.pop() if vals else None)
    return out


def is_admissible(mp: MarkedPoset, ideals: Iterable[int]) -> bool:
    """Admissibility test for a (normalized) chain of order ideals."""
    seq = normalize_ideal_chain(mp, ideals)
    vals = _block_values(mp, seq)
    if vals is None:
        return False
    defined = [v for v in vals if v is not None]
    return all(a < b for a, b in zip(defined, defined[1:]))


def admissible_chain(mp: MarkedPoset, ideals: Iterable[int]) -> AdmissibleChain:
    """Wrap a chain of ideals, raising ValueError when it is not admissible."""
    seq = normalize_ideal_chain(mp, ideals)
    vals = _block_values(mp, seq)
    if vals is None:
        raise ValueError("some block carries two distinct mark values")
    defined = [v for v in vals if v is not None]
    if not all(a < b for a, b in zip(defined, defined[1:])):
        raise ValueError("block mark values do not strictly increase")
    blocks = tuple(hi & ~lo for lo, hi in zip(seq, seq[1:]))
    return AdmissibleChain(
        ideals=seq,
        blocks=blocks,
        block_values=tuple(vals),
        dim=sum(1 for v in vals if v is None),
    )


def chain_dim(c: AdmissibleChain) -> int:
    """Number of unmarked blocks = dimension of the chain's cell."""
    return c.dim


def enumerate_admissible_chains(
    mp: MarkedPoset,
    *,
    max_chains: int = DEFAULT_MAX_CHAINS,
    max_elements: int = DEFAULT_MAX_ELEMENTS,
) -> list[list[AdmissibleChain]]:
    """All admissible chains, bucketed by dimension.

    ``result[d]`` lists the chains of dimension d in a deterministic
    (depth-first, inclusion-ordered) order; ``len(result) - 1`` is the top
    dimension, i.e. the dimension of the polytope.
    """
    poset = mp.poset
    ideals = enumerate_ideals(poset, max_elements=max_elements)
    full = poset.full_mask
    marked = mp.marked
    values = mp.values
    by_card: list[list[int]] = [[] for _ in range(poset.n + 1)]
    for m in ideals:
        by_card[m.bit_count()].append(m)
    buckets: dict[int, list[AdmissibleChain]] = {}
    count = 0

    prefix: list[int] = [0]
    blocks: list[int] = []
    block_vals: list[Fraction | None] = []

    def outside_ok(cur: int, last: Fraction) -> bool:
        # A marked element left outside must land in a later block, whose
        # value has to exceed every value used so far.
        for i in bits(marked & ~cur):
            v = values[i]
            assert v is not None
            if v <= last:
                return False
        return True

    def grow(cur: int, last: Fraction | None) -> None:
        nonlocal count
        for card in range(cur.bit_count() + 1, poset.n + 1):
            for cand in by_card[card]:
                if cur & ~cand:
                    continue
                block = cand & ~cur
                vals = mp.mark_values_in(block)
                if len(vals) > 1:
                    continue
                if vals:
                    t = next(iter(vals))
                    if last is not None and t <= last:
                        continue
                    if cand != full and not outside_ok(cand, t):
                        continue
                    block_value: Fraction | None = t
                    new_last = t
                else:
                    block_value = None
                    new_last = last
                prefix.append(cand)
                blocks.append(block)
                block_vals.append(block_value)
                if cand == full:
                    if count >= max_chains:
                        raise SizeLimit(
                            f"admissible chain enumeration capped at {max_chains}"
                        )
                    count += 1
                    dim = sum(1 for v in block_vals if v is None)
                    chain = AdmissibleChain(
                        ideals=tuple(prefix),
                        blocks=tuple(blocks),
                        block_values=tuple(block_vals),
                        dim=dim,
                    )
                    buckets.setdefault(dim, []).append(chain)
                else:
                    grow(cand, new_last)
                prefix.pop()
                blocks.pop()
                block_vals.pop()

    grow(0, None)
    top = max(buckets) if buckets else 0
    return [buckets.get(d, []) for d in range(top + 1)]


def chain_dimension(mp: MarkedPoset, **caps) -> int:
    """Top dimension over all admissible chains = dim of the polytope."""
    return len(enumerate_admissible_chains(mp, **caps)) - 1


def densifications(
    mp: MarkedPoset,
    c: AdmissibleChain,
    k: int,
    *,
    all_ideals: Sequence[int] | None = None,
) -> list[Densification]:
    """All single-ideal insertions into gap *k* that stay admissible.

    Gap k (1-based) sits between ``c.ideals[k-1]`` and ``c.ideals[k]``.
    """
    if not 1 <= k <= len(c.ideals) - 1:
        raise ValueError(f"gap index {k} out of range for a chain of {len(c.ideals)} ideals")
    lo, hi = c.ideals[k - 1], c.ideals[k]
    if all_ideals is None:
        all_ideals = enumerate_ideals(mp.poset)
    out = []
    for cand in all_ideals:
        if cand == lo or cand == hi or cand & ~hi or lo & ~cand:
            continue
        d = _insert(mp, c, k, cand)
        if d is not None:
            out.append(d)
    return out


def _insert(mp: MarkedPoset, c: AdmissibleChain, k: int, ideal: int) -> Densification | None:
    """Build the densification inserting *ideal* at gap k, or None if inadmissible."""
    new_ideals = c.ideals[:k] + (ideal,) + c.ideals[k:]
    vals = _block_values(mp, new_ideals)
    if vals is None:
        return None
    defined = [v for v in vals if v is not None]
    if not all(a < b for a, b in zip(defined, defined[1:])):
        return None
    blocks = tuple(hi & ~lo for lo, hi in zip(new_ideals, new_ideals[1:]))
    result = AdmissibleChain(
        ideals=new_ideals,
        blocks=blocks,
        block_values=tuple(vals),
        dim=sum(1 for v in vals if v is None),
    )
    return Densification(parent=c, position=k, inserted=ideal, result=result)


def conjugate_of(mp: MarkedPoset, d: Densification) -> Densification | None:
    """The conjugate densification at the same gap, when it exists.

    The inserted block and the block left above it swap roles: the
    candidate ideal is ``lo | (hi & ~d.inserted)``.  It qualifies only if
    that set is an order ideal and the enlarged chain is admissible.
    """
    k = d.position
    lo, hi = d.parent.ideals[k - 1], d.parent.ideals[k]
    swapped = lo | (hi & ~d.inserted)
    if not mp.poset.is_ideal(swapped):
        return None
    return _insert(mp, d.parent, k, swapped)


def coboundary_support(
    mp: MarkedPoset,
    c: AdmissibleChain,
    *,
    all_ideals: Sequence[int] | None = None,
) -> set[AdmissibleChain]:
    """Chains one dimension up reached by densifications possessing a conjugate.

    Every returned chain carries coefficient 1 over GF(2): the inserted
    ideal determines its gap, so no chain can arise from two different
    insertions (asserted).
    """
    if all_ideals is None:
        all_ideals = enumerate_ideals(mp.poset)
    support: set[AdmissibleChain] = set()
    for k in range(1, len(c.ideals)):
        for d in densifications(mp, c, k, all_ideals=all_ideals):
            if conjugate_of(mp, d) is not None:
                assert d.result not in support
                support.add(d.result)
    return support


def prune_chain(mp: MarkedPoset, ideals: Iterable[int]) -> tuple[int, ...] | None:
    """Coarsen a feasible ideal chain into the admissible chain with the same cell.

    Feasible means: every block carries at most one distinct mark value and
    the pinned values are weakly increasing.  Blocks pinned to equal values
    force everything between them to that value, so merging each tie run
    yields an admissible chain describing the same point set.  Returns None
    when the chain is infeasible.
    """
    seq = normalize_ideal_chain(mp, ideals)
    vals = _block_values(mp, seq)
    if vals is None:
        return None
    pinned = [(i, v) for i, v in enumerate(vals) if v is not None]
    if any(a[1] > b[1] for a, b in zip(pinned, pinned[1:])):
        return None
    drop: set[int] = set()
    start = 0
    while start < len(pinned):
        stop = start
        while stop + 1 < len(pinned) and pinned[stop + 1][1] == pinned[start][1]:
            stop += 1
        first_block, last_block = pinned[start][0], pinned[stop][0]
        # Merging blocks first..last removes the ideals separating them.
        drop.update(range(first_block + 1, last_block + 1))
        start = stop + 1
    return tuple(m for i, m in enumerate(seq) if i not in drop)


def lambda_compatible_extensions(
    mp: MarkedPoset, *, max_count: int = DEFAULT_MAX_EXTENSIONS
) -> list[tuple[LinearExtension, AdmissibleChain]]:
    """Linear extensions on which the marking stays monotone, with their chains.

    Each compatible extension's full prefix chain is pruned (tie runs of
    equal mark values merged) into an admissible chain cutting out a cell
    of the polytope.  Every top-dimensional admissible chain arises this
    way; when the marking is injective the returned chains are exactly the
    top-dimensional ones.
    """
    poset = mp.poset
    out = []
    for ext in linear_extensions(poset, max_count=max_count):
        marked_vals = [mp.values[e] for e in ext if mp.marked >> e & 1]
        if any(a > b for a, b in zip(marked_vals, marked_vals[1:])):  # type: ignore[operator]
            continue
        prefixes = []
        cur = 0
        for e in ext:
            cur |= 1 << e
            prefixes.append(cur)
        pruned = prune_chain(mp, prefixes)
        assert pruned is not None
        out.append((ext, admissible_chain(mp, pruned)))
    return out
