"""GF(2) cochain complex on admissible chains and the f-vector it computes.

Degree-i cochains are spanned by the admissible chains of dimension i.
The coboundary of a chain is the sum of its densifications possessing a
conjugate at the same gap.  Cohomology dimensions equal the face counts of
the polytope, so the f-vector falls out of two rank computations per degree.
"""

from __future__ import annotations

from dataclasses import dataclass

from .chains import AdmissibleChain, coboundary_support, enumerate_admissible_chains
from .errors import NotAComplex
from .poset import MarkedPoset, enumerate_ideals


@dataclass(frozen=True)
class GF2Matrix:
    """Dense bit-packed matrix over the two-element field.

    ``bits[i]`` holds row i; bit j of that int is the (i, j) entry.
    """

    rows: int
    cols: int
    bits: tuple[int, ...]

    @classmethod
    def zero(cls, rows: int, cols: int) -> GF2Matrix:
        return cls(rows=rows, cols=cols, bits=(0,) * rows)

    @classmethod
    def identity(cls, n: int) -> GF2Matrix:
        return cls(rows=n, cols=n, bits=tuple(1 << i for i in range(n)))

    def entry(self, i: int, j: int) -> int:
        return self.bits[i] >> j & 1

    def column(self, j: int) -> int:
        """Column j as a bitmask over row indices."""
        out = 0
        for i, row in enumerate(self.bits):
            out |= (row >> j & 1) << i
        return out

    def is_zero(self) -> bool:
        return not any(self.bits)

    def mul(self, other: GF2Matrix) -> GF2Matrix:
        """Matrix product self @ other over GF(2)."""
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch: {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        out = []
        for row in self.bits:
            acc = 0
            for k in range(self.cols):
                if row >> k & 1:
                    acc ^= other.bits[k]
            out.append(acc)
        return GF2Matrix(rows=self.rows, cols=other.cols, bits=tuple(out))


def gf2_rank(m: GF2Matrix) -> int:
    """Rank over GF(2) by bit-parallel row elimination.

    Keeps one basis row per lowest set bit; reducing a row strictly raises
    its lowest bit, so the loop terminates with an independent basis.
    """
    pivots: dict[int, int] = {}
    for row in m.bits:
        while row:
            low = row & -row
            piv = pivots.get(low)
            if piv is None:
                pivots[low] = row
                break
            row ^= piv
    return len(pivots)


@dataclass(frozen=True)
class CochainComplex:
    """Graded GF(2) spaces with coboundaries delta[i]: degree i -> i+1.

    ``deltas[i]`` has ``dims[i]`` columns and ``dims[i+1]`` rows; column j
    is the coboundary of ``basis[i][j]`` expressed in ``basis[i+1]``.
    """

    dims: tuple[int, ...]
    deltas: tuple[GF2Matrix, ...]
    basis: tuple[tuple[AdmissibleChain, ...], ...]

    @property
    def top_dim(self) -> int:
        return len(self.dims) - 1

    def basis_index(self, degree: int) -> dict[AdmissibleChain, int]:
        return {c: i for i, c in enumerate(self.basis[degree])}


@dataclass(frozen=True)
class FVector:
    """Face counts (f_0, ..., f_n) of a polytope of dimension n."""

    f: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.f) - 1

    def euler_characteristic(self) -> int:
        return sum((-1) ** i * fi for i, fi in enumerate(self.f))


def build_complex(mp: MarkedPoset, **caps) -> CochainComplex:
    """Assemble the cochain complex of a marked poset.

    Bases are the admissible chains bucketed by dimension in enumeration
    order; columns are filled from the conjugate-densification supports.
    """
    buckets = enumerate_admissible_chains(mp, **caps)
    return complex_from_chains(mp, buckets)


def complex_from_chains(
    mp: MarkedPoset, buckets: list[list[AdmissibleChain]]
) -> CochainComplex:
    """Complex over an already enumerated chain family (shared with the oracle)."""
    all_ideals = enumerate_ideals(mp.poset)
    index = [{c: i for i, c in enumerate(bucket)} for bucket in buckets]
    deltas = []
    for d in range(len(buckets) - 1):
        rows = [0] * len(buckets[d + 1])
        for col, chain in enumerate(buckets[d]):
            for above in coboundary_support(mp, chain, all_ideals=all_ideals):
                rows[index[d + 1][above]] |= 1 << col
        deltas.append(
            GF2Matrix(rows=len(buckets[d + 1]), cols=len(buckets[d]), bits=tuple(rows))
        )
    return CochainComplex(
        dims=tuple(len(b) for b in buckets),
        deltas=tuple(deltas),
        basis=tuple(tuple(b) for b in buckets),
    )


def verify_dd_zero(c: CochainComplex) -> bool:
    """True iff every composite delta[i+1] @ delta[i] vanishes."""
    return all(
        c.deltas[i + 1].mul(c.deltas[i]).is_zero() for i in range(len(c.deltas) - 1)
    )


def cohomology_fvector(c: CochainComplex) -> FVector:
    """Cohomology dimensions of the complex, read off as the f-vector.

    f_i = dim C^i - rank delta_i - rank delta_{i-1}, with out-of-range
    deltas treated as zero maps.
    """
    if not verify_dd_zero(c):
        raise NotAComplex("consecutive coboundaries do not compose to zero")
    ranks = [gf2_rank(d) for d in c.deltas]
    f = []
    for i, dim in enumerate(c.dims):
        fi = dim
        if i < len(ranks):
            fi -= ranks[i]
        if i > 0:
            fi -= ranks[i - 1]
        assert fi >= 0
        f.append(fi)
    return FVector(f=tuple(f))


def f_polynomial(fv: FVector) -> tuple[list[int], str]:
    """Coefficients (low degree first) and a display string like ``3 + 3t + t^2``."""
    coeffs = list(fv.f)
    terms = []
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        if i == 0:
            terms.append(str(c))
        else:
            power = "t" if i == 1 else f"t^{i}"
            terms.append(power if c == 1 else f"{c}{power}")
    return coeffs, " + ".join(terms) if terms else "0"
