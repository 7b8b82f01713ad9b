"""Exact-rational geometric oracle for marked order polytopes.

Everything here works over `fractions.Fraction`: the polytope from its
cover inequalities, brute-force vertex enumeration by solving square tight
subsystems, the face lattice as intersection-closed tight vertex sets, and
the subdivision cells cut out by admissible chains.  Being exact, it needs
no tolerances and serves as an independent cross-check for the
combinatorial computation.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .chains import AdmissibleChain, enumerate_admissible_chains, is_admissible, normalize_ideal_chain
from .cochain import CochainComplex, GF2Matrix
from .errors import SizeLimit, UnboundedError
from .poset import MarkedPoset, bits

DEFAULT_MAX_VARS = 8
DEFAULT_MAX_FACES = 50_000

Point = tuple[Fraction, ...]
Row = tuple[Fraction, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class ExactPolytope:
    """Inequality description a.x <= b over the unmarked coordinates.

    ``vars`` lists the element indices serving as coordinates; marked
    coordinates are substituted into the right-hand sides at build time.
    """

    vars: tuple[int, ...]
    rows: tuple[Row, ...]
    rhs: tuple[Fraction, ...]

    @property
    def num_vars(self) -> int:
        return len(self.vars)


def _variables(mp: MarkedPoset) -> tuple[int, ...]:
    return tuple(bits(mp.unmarked))


def hrep(mp: MarkedPoset) -> ExactPolytope:
    """One inequality per cover, with marked coordinates substituted.

    Covers between two marked elements reduce to constant facts already
    guaranteed by mark monotonicity and are dropped; duplicate rows are
    deduplicated (first occurrence wins).
    """
    vars_ = _variables(mp)
    pos = {e: i for i, e in enumerate(vars_)}
    d = len(vars_)
    rows: list[Row] = []
    rhs: list[Fraction] = []
    seen: set[tuple[Row, Fraction]] = set()
    for a, b in mp.poset.covers:
        coeffs = [ZERO] * d
        bound = ZERO
        va, vb = mp.values[a], mp.values[b]
        if va is not None and vb is not None:
            assert va <= vb
            continue
        if va is None:
            coeffs[pos[a]] += ONE
        else:
            bound -= va
        if vb is None:
            coeffs[pos[b]] -= ONE
        else:
            bound += vb
        key = (tuple(coeffs), bound)
        if key in seen:
            continue
        seen.add(key)
        rows.append(key[0])
        rhs.append(bound)
    return ExactPolytope(vars=vars_, rows=tuple(rows), rhs=tuple(rhs))


def _dot(row: Sequence[Fraction], point: Sequence[Fraction]) -> Fraction:
    return sum((c * x for c, x in zip(row, point)), ZERO)


def _solve_square(mat: list[list[Fraction]], rhs: list[Fraction]) -> Point | None:
    """Solve a d x d rational system exactly; None when singular."""
    d = len(mat)
    aug = [list(mat[i]) + [rhs[i]] for i in range(d)]
    for col in range(d):
        piv = next((r for r in range(col, d) if aug[r][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        pivval = aug[col][col]
        aug[col] = [x / pivval for x in aug[col]]
        for r in range(d):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [x - factor * y for x, y in zip(aug[r], aug[col])]
    return tuple(aug[i][d] for i in range(d))


def _system_vertices(num_vars: int, rows: Sequence[Row], rhs: Sequence[Fraction]) -> list[Point]:
    """All vertices of {x : rows.x <= rhs}, exact and sorted.

    Candidates are the solutions of nonsingular square tight subsystems,
    filtered by feasibility.  An empty result means the system is
    infeasible or has no vertex (for our bounded systems: infeasible).
    """
    if num_vars == 0:
        return [()] if all(b >= 0 for b in rhs) else []
    pts: set[Point] = set()
    m = len(rows)
    for combo in combinations(range(m), num_vars):
        sol = _solve_square([list(rows[i]) for i in combo], [rhs[i] for i in combo])
        if sol is None:
            continue
        if sol in pts:
            continue
        if all(_dot(rows[i], sol) <= rhs[i] for i in range(m)):
            pts.add(sol)
    return sorted(pts)


def enumerate_vertices(p: ExactPolytope, *, max_vars: int = DEFAULT_MAX_VARS) -> list[Point]:
    """All vertices of the polytope, deduplicated, in coordinate order."""
    if p.num_vars > max_vars:
        raise SizeLimit(f"vertex enumeration capped at {max_vars} variables, got {p.num_vars}")
    pts = _system_vertices(p.num_vars, p.rows, p.rhs)
    if not pts:
        raise UnboundedError(
            "no vertex found: the inequality system is unbounded or infeasible"
        )
    return pts


def _rational_rank(rows: list[list[Fraction]]) -> int:
    rank = 0
    work = [row[:] for row in rows]
    ncols = len(work[0]) if work else 0
    pivot_row = 0
    for col in range(ncols):
        piv = next((r for r in range(pivot_row, len(work)) if work[r][col] != 0), None)
        if piv is None:
            continue
        work[pivot_row], work[piv] = work[piv], work[pivot_row]
        pv = work[pivot_row][col]
        work[pivot_row] = [x / pv for x in work[pivot_row]]
        for r in range(len(work)):
            if r != pivot_row and work[r][col] != 0:
                f = work[r][col]
                work[r] = [x - f * y for x, y in zip(work[r], work[pivot_row])]
        pivot_row += 1
        rank += 1
    return rank


def affine_dim(points: Sequence[Point]) -> int:
    """Dimension of the affine hull; -1 for the empty set, 0 for a point."""
    if not points:
        return -1
    base = points[0]
    diffs = [[x - b for x, b in zip(pt, base)] for pt in points[1:]]
    diffs = [d for d in diffs if any(d)]
    if not diffs:
        return 0
    return _rational_rank(diffs)


@dataclass(frozen=True)
class Face:
    vertices: frozenset[int]
    dim: int


@dataclass(frozen=True)
class FaceLattice:
    """All faces of a polytope as vertex index sets, the polytope included."""

    vertex_coords: tuple[Point, ...]
    faces: tuple[Face, ...]
    incidence: frozenset[tuple[int, int]]

    def f_vector(self) -> tuple[int, ...]:
        top = max(f.dim for f in self.faces)
        counts = [0] * (top + 1)
        for f in self.faces:
            counts[f.dim] += 1
        return tuple(counts)


def face_lattice(
    p: ExactPolytope,
    *,
    max_vars: int = DEFAULT_MAX_VARS,
    max_faces: int = DEFAULT_MAX_FACES,
) -> FaceLattice:
    """Faces as tight vertex sets closed under pairwise intersection.

    Every face of a polytope is an intersection of facet vertex sets, so
    starting from the per-inequality tight sets and closing under
    intersection (discarding the empty set, adding the full polytope)
    yields exactly the nonempty faces.  Dimensions come from affine rank.
    """
    verts = enumerate_vertices(p, max_vars=max_vars)
    everything = frozenset(range(len(verts)))
    family: set[frozenset[int]] = {everything}
    for row, bound in zip(p.rows, p.rhs):
        tight = frozenset(i for i, v in enumerate(verts) if _dot(row, v) == bound)
        if tight:
            family.add(tight)
    queue = list(family)
    while queue:
        cur = queue.pop()
        for other in list(family):
            meet = cur & other
            if meet and meet not in family:
                if len(family) >= max_faces:
                    raise SizeLimit(f"face lattice capped at {max_faces} faces")
                family.add(meet)
                queue.append(meet)
    faces = sorted(
        (Face(vertices=fs, dim=affine_dim([verts[i] for i in sorted(fs)])) for fs in family),
        key=lambda f: (f.dim, tuple(sorted(f.vertices))),
    )
    incidence = frozenset(
        (i, j)
        for i, fi in enumerate(faces)
        for j, fj in enumerate(faces)
        if i != j and fi.vertices < fj.vertices
    )
    return FaceLattice(vertex_coords=tuple(verts), faces=tuple(faces), incidence=incidence)


@dataclass(frozen=True)
class GeomCell:
    """Realized cell of an admissible chain inside the ambient polytope.

    ``carrier`` is the set of ambient inequality indices tight at the
    relative-interior point; equal carriers identify cells whose interiors
    live in the relative interior of the same ambient face.
    """

    source: AdmissibleChain
    rel_interior_point: Point
    dim: int
    carrier: frozenset[int]


def chain_point(mp: MarkedPoset, c: AdmissibleChain) -> Point:
    """A relative-interior point of the chain's cell, as full coordinates.

    Marked blocks take their pinned value; each run of unmarked blocks
    between pinned neighbours takes equally spaced values strictly in
    between (run of length r splits the gap into r + 1 equal parts).
    """
    pinned = [i for i, v in enumerate(c.block_values) if v is not None]
    assert pinned and pinned[0] == 0 and pinned[-1] == len(c.blocks) - 1
    block_vals: list[Fraction | None] = list(c.block_values)
    for a, b in zip(pinned, pinned[1:]):
        run = b - a - 1
        if run:
            lo, hi = c.block_values[a], c.block_values[b]
            assert lo is not None and hi is not None and lo < hi
            step = (hi - lo) / (run + 1)
            for j in range(1, run + 1):
                block_vals[a + j] = lo + j * step
    coords: list[Fraction | None] = [None] * mp.poset.n
    for block, v in zip(c.blocks, block_vals):
        for e in bits(block):
            coords[e] = v
    assert all(v is not None for v in coords)
    return tuple(coords)  # type: ignore[arg-type]


def realize_cell(mp: MarkedPoset, c: AdmissibleChain, ambient: ExactPolytope | None = None) -> GeomCell:
    """Realize an admissible chain as a cell with carrier information."""
    if ambient is None:
        ambient = hrep(mp)
    full = chain_point(mp, c)
    point = tuple(full[v] for v in ambient.vars)
    carrier = frozenset(
        i for i, (row, bound) in enumerate(zip(ambient.rows, ambient.rhs))
        if _dot(row, point) == bound
    )
    return GeomCell(source=c, rel_interior_point=point, dim=c.dim, carrier=carrier)


def cell_system(mp: MarkedPoset, ideals: Iterable[int]) -> tuple[tuple[Row, ...], tuple[Fraction, ...]]:
    """Linear system of the cell of an arbitrary well-formed ideal chain.

    Encodes: coordinates constant on each block (pairs of inequalities) and
    block values weakly increasing along the chain, with marked coordinates
    substituted by their values.  Blocks containing two marked elements
    produce constant rows, so infeasibility is faithfully represented.
    """
    seq = normalize_ideal_chain(mp, ideals)
    vars_ = _variables(mp)
    pos = {e: i for i, e in enumerate(vars_)}
    d = len(vars_)

    def expr(e: int) -> tuple[list[Fraction], Fraction]:
        coeffs = [ZERO] * d
        v = mp.values[e]
        if v is not None:
            return coeffs, v
        coeffs[pos[e]] = ONE
        return coeffs, ZERO

    rows: list[Row] = []
    rhs: list[Fraction] = []

    def add_le(e1: int, e2: int) -> None:
        c1, k1 = expr(e1)
        c2, k2 = expr(e2)
        rows.append(tuple(a - b for a, b in zip(c1, c2)))
        rhs.append(k2 - k1)

    blocks = [hi & ~lo for lo, hi in zip(seq, seq[1:])]
    reps = []
    for block in blocks:
        members = list(bits(block))
        rep = members[0]
        reps.append(rep)
        for e in members[1:]:
            add_le(rep, e)
            add_le(e, rep)
    for r1, r2 in zip(reps, reps[1:]):
        add_le(r1, r2)
    return tuple(rows), tuple(rhs)


def cell_feasible(mp: MarkedPoset, ideals: Iterable[int]) -> bool:
    """Exact feasibility of the cell system of an ideal chain.

    The system is always bounded (first and last blocks contain extremal,
    hence marked, elements), so feasibility is equivalent to having a
    vertex.
    """
    rows, rhs = cell_system(mp, ideals)
    return bool(_system_vertices(len(_variables(mp)), rows, rhs))


def cell_vertices(mp: MarkedPoset, ideals: Iterable[int]) -> list[Point]:
    """Vertices of the cell of an ideal chain, over the ambient variables."""
    rows, rhs = cell_system(mp, ideals)
    return _system_vertices(len(_variables(mp)), rows, rhs)


def build_geometric_complex(
    mp: MarkedPoset, *, max_vars: int = DEFAULT_MAX_VARS, **caps
) -> CochainComplex:
    """Cochain complex read off the realized cells instead of densifications.

    A cell one dimension up enters the coboundary of a cell exactly when
    the smaller chain is a subchain of the larger one (face containment)
    and both carriers agree (their interiors share the ambient face).  The
    basis ordering matches the combinatorial complex, so the two are
    comparable entry by entry.
    """
    from .cochain import CochainComplex as _CC  # local alias for clarity

    ambient = hrep(mp)
    if ambient.num_vars > max_vars:
        raise SizeLimit(
            f"geometric complex capped at {max_vars} variables, got {ambient.num_vars}"
        )
    buckets = enumerate_admissible_chains(mp, **caps)
    cells = [[realize_cell(mp, c, ambient) for c in bucket] for bucket in buckets]
    idsets = [[c.ideal_set() for c in bucket] for bucket in buckets]
    deltas = []
    for d in range(len(buckets) - 1):
        rowbits = [0] * len(buckets[d + 1])
        for col in range(len(buckets[d])):
            for row in range(len(buckets[d + 1])):
                if (
                    idsets[d][col] <= idsets[d + 1][row]
                    and cells[d][col].carrier == cells[d + 1][row].carrier
                ):
                    rowbits[row] |= 1 << col
        deltas.append(
            GF2Matrix(rows=len(buckets[d + 1]), cols=len(buckets[d]), bits=tuple(rowbits))
        )
    return _CC(
        dims=tuple(len(b) for b in buckets),
        deltas=tuple(deltas),
        basis=tuple(tuple(b) for b in buckets),
    )


def verify_intersection_lemma(mp: MarkedPoset, L: AdmissibleChain, L2: AdmissibleChain) -> bool:
    """Check that two cells intersect exactly in the cell of the chain intersection.

    When the intersection chain is admissible, the combined constraint
    systems must describe the same point set as the intersection chain's
    system (compared through exact vertex sets); otherwise the combined
    system must be infeasible.
    """
    inter = tuple(sorted(set(L.ideals) & set(L2.ideals), key=lambda m: m.bit_count()))
    num_vars = len(_variables(mp))
    rows1, rhs1 = cell_system(mp, L.ideals)
    rows2, rhs2 = cell_system(mp, L2.ideals)
    combined = _system_vertices(num_vars, rows1 + rows2, rhs1 + rhs2)
    if is_admissible(mp, inter):
        rows3, rhs3 = cell_system(mp, inter)
        expected = _system_vertices(num_vars, rows3, rhs3)
        return set(combined) == set(expected)
    return not combined


@dataclass(frozen=True)
class Hyperplane:
    """Cutting hyperplane coeffs.x = rhs over the ambient variables."""

    coeffs: Row
    rhs: Fraction
    label: str


def subdivision_hyperplanes(mp: MarkedPoset) -> list[Hyperplane]:
    """Cutting hyperplanes of the chain subdivision, one per incomparable pair.

    Two unmarked incomparable elements u, v give x_u = x_v; an unmarked s
    incomparable to a marked a gives x_s = value(a); two marked elements
    contribute nothing.  Duplicate equations are dropped.
    """
    poset = mp.poset
    vars_ = _variables(mp)
    pos = {e: i for i, e in enumerate(vars_)}
    d = len(vars_)
    out: list[Hyperplane] = []
    seen: set[tuple[Row, Fraction]] = set()
    for i in range(poset.n):
        for j in range(i + 1, poset.n):
            if poset.comparable(i, j):
                continue
            mi = bool(mp.marked >> i & 1)
            mj = bool(mp.marked >> j & 1)
            if mi and mj:
                continue
            coeffs = [ZERO] * d
            if not mi and not mj:
                coeffs[pos[i]] = ONE
                coeffs[pos[j]] = -ONE
                bound = ZERO
                label = f"x_{poset.labels[i]} = x_{poset.labels[j]}"
            else:
                s, a = (i, j) if not mi else (j, i)
                coeffs[pos[s]] = ONE
                bound = mp.value(a)
                label = f"x_{poset.labels[s]} = {bound}"
            key = (tuple(coeffs), bound)
            if key in seen:
                continue
            seen.add(key)
            out.append(Hyperplane(coeffs=key[0], rhs=bound, label=label))
    return out
