"""Sublattices of Z^k and the geometry of their dual groups in (R/Z)^k.

A lattice H <= Z^k is held as a canonical column-HNF basis.  The torus dual
H^# = {y : x.y in Z for all x in H} splits into a finite component group
(reached through the reciprocal lattice H^o) and a connected torus H_1^#
(reached through the integer points of H_R^perp); the operations here expose
exactly the pieces the recovery algorithms need.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .lll import babai_nearest_plane, lll
from .matrix import IntMatrix, RatMatrix, hnf, hnf_pivots, snf


def _frac_mod1(x: Fraction) -> Fraction:
    return x - (x.__floor__())


@dataclass(frozen=True, order=True)
class TorusVec:
    """A point of (R/Z)^k with exact rational coordinates in [0, 1)."""

    coords: Tuple[Fraction, ...]

    @staticmethod
    def make(values: Sequence) -> "TorusVec":
        return TorusVec(tuple(_frac_mod1(Fraction(v)) for v in values))

    @staticmethod
    def zero(k: int) -> "TorusVec":
        return TorusVec(tuple(Fraction(0) for _ in range(k)))

    @property
    def k(self) -> int:
        return len(self.coords)

    def lift(self) -> Tuple[Fraction, ...]:
        """Canonical lift into (-1/2, 1/2]^k; reducing it back is the identity."""
        return tuple(c if 2 * c <= 1 else c - 1 for c in self.coords)

    def __add__(self, other: "TorusVec") -> "TorusVec":
        return TorusVec(tuple(_frac_mod1(a + b) for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "TorusVec") -> "TorusVec":
        return TorusVec(tuple(_frac_mod1(a - b) for a, b in zip(self.coords, other.coords)))

    def scale(self, n: int) -> "TorusVec":
        return TorusVec(tuple(_frac_mod1(n * c) for c in self.coords))

    def pairing(self, x: Sequence[int]) -> Fraction:
        """x . y as an element of R/Z, represented in [0, 1)."""
        return _frac_mod1(sum((Fraction(a) * c for a, c in zip(x, self.coords)), Fraction(0)))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def norm_sq(self) -> Fraction:
        """Squared distance to 0, i.e. the squared norm of the canonical lift."""
        return sum((c * c for c in self.lift()), Fraction(0))

    def __str__(self) -> str:
        return " ".join(str(c) for c in self.coords)

    @staticmethod
    def parse(text: str) -> "TorusVec":
        return TorusVec.make([Fraction(tok) for tok in text.split()])


@dataclass(frozen=True)
class Lattice:
    """A sublattice of Z^k with canonical HNF basis and cached Gram determinant."""

    k: int
    rank: int
    basis: IntMatrix  # k x rank, column HNF, no zero columns
    gram_det: int

    @staticmethod
    def from_generators(G: IntMatrix) -> "Lattice":
        H, _ = hnf(G)
        cols = [H.column(j) for j in range(H.cols) if any(H.column(j))]
        basis = IntMatrix.from_columns(cols, rows=G.rows)
        gram = basis.transpose() @ basis
        delta = gram.det() if basis.cols else 1
        if delta <= 0:
            raise ValueError("HNF produced dependent columns")
        return Lattice(G.rows, basis.cols, basis, delta)

    @staticmethod
    def zn(k: int) -> "Lattice":
        return Lattice.from_generators(IntMatrix.identity(k))

    @staticmethod
    def trivial(k: int) -> "Lattice":
        return Lattice(k, 0, IntMatrix(k, 0, tuple(() for _ in range(k))), 1)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Lattice) and self.k == other.k
                and self.basis.data == other.basis.data)

    def __hash__(self) -> int:
        return hash((self.k, self.basis.data))

    def contains(self, x: Sequence[int]) -> bool:
        return all(c == 0 for c in coset_canonical(self, x))

    def contains_lattice(self, other: "Lattice") -> bool:
        return all(self.contains(other.basis.column(j)) for j in range(other.rank))

    def pivots(self) -> List[Tuple[int, int]]:
        return hnf_pivots(self.basis)


def lattice_from_generators(G: IntMatrix) -> Lattice:
    """Canonicalize an arbitrary generating set (any rank, any shape)."""
    return Lattice.from_generators(G)


def coset_canonical(L: Lattice, x: Sequence[int]) -> Tuple[int, ...]:
    """Canonical representative of x + L: HNF pivot coordinates reduced into
    [0, pivot) from the bottom pivot row upward, other coordinates unchanged."""
    if len(x) != L.k:
        raise ValueError("dimension mismatch")
    v = [int(c) for c in x]
    for r, j in reversed(L.pivots()):
        col = L.basis.column(j)
        q = v[r] // col[r]
        if q:
            for i in range(L.k):
                v[i] -= q * col[i]
    return tuple(v)


def reciprocal_basis(L: Lattice) -> RatMatrix:
    """Generating matrix M (M^T M)^{-1} of the reciprocal lattice H^o."""
    if L.rank == 0:
        raise ValueError("rank-0 lattice has an empty reciprocal")
    M = L.basis.to_rational()
    gram_inv = (M.transpose() @ M).inverse()
    return M @ gram_inv


def saturation(L: Lattice) -> Lattice:
    """H_1 = H_R intersect Z^k, computed from the SNF of the basis."""
    if L.rank == 0:
        return L
    _, V, _ = snf(L.basis)
    v_inv = V.inverse_unimodular()
    cols = [v_inv.column(j) for j in range(L.rank)]
    return Lattice.from_generators(IntMatrix.from_columns(cols, rows=L.k))


def integer_orthogonal(L: Lattice) -> IntMatrix:
    """Basis of {x in Z^k : M^T x = 0}, the integer points of H_R^perp."""
    if L.rank == 0:
        return IntMatrix.identity(L.k)
    _, _, W = snf(L.basis.transpose())
    rank = L.rank
    cols = [W.column(j) for j in range(rank, L.k)]
    return IntMatrix.from_columns(cols, rows=L.k)


def dual_membership(L: Lattice, y: TorusVec) -> bool:
    """True iff every basis vector pairs integrally with y."""
    if y.k != L.k:
        raise ValueError("dimension mismatch")
    return all(
        y.pairing(L.basis.column(j)) == 0 for j in range(L.rank)
    )


@dataclass
class DualDescription:
    """Cached geometry of H^#: reciprocal basis, integer orthogonal, saturation."""

    lattice: Lattice
    reciprocal: Optional[RatMatrix]
    ortho_int: IntMatrix
    saturated: Lattice
    component_index: int

    @staticmethod
    def of(L: Lattice) -> "DualDescription":
        rec = reciprocal_basis(L) if L.rank else None
        ortho = integer_orthogonal(L)
        sat = saturation(L)
        idx_sq, rem = divmod(L.gram_det, sat.gram_det)
        if rem:
            raise AssertionError("gram determinant ratio must be integral")
        import math

        idx = math.isqrt(idx_sq)
        if idx * idx != idx_sq:
            raise AssertionError("component index must be an exact square root")
        return DualDescription(L, rec, ortho, sat, idx)


_DUAL_CACHE: dict = {}


def dual_description(L: Lattice) -> DualDescription:
    d = _DUAL_CACHE.get(L)
    if d is None:
        d = DualDescription.of(L)
        _DUAL_CACHE[L] = d
    return d


def dual_sample_uniform(L: Lattice, torus_grid: int, rng: random.Random,
                        return_parts: bool = False):
    """Exact uniform sample from H^#, with the connected torus part restricted
    to the grid (1/torus_grid) Z^k.

    The finite component group is hit via frac(M_rec a) with a uniform over
    (Z/Delta)^rank (valid because Delta H^o <= H), convolved with
    frac(C u) for u uniform over the grid torus, C the integer orthogonal.
    With return_parts the raw draws (a, u) come back too, so callers can
    check genericity of the torus part."""
    if torus_grid < 1:
        raise ValueError("torus grid must be >= 1")
    d = dual_description(L)
    coords = [Fraction(0)] * L.k
    a: List[int] = []
    u: List[Fraction] = []
    if d.reciprocal is not None:
        a = [rng.randrange(L.gram_det) for _ in range(L.rank)]
        comp = d.reciprocal.mul_vec(a)
        coords = [c + v for c, v in zip(coords, comp)]
    if d.ortho_int.cols:
        u = [Fraction(rng.randrange(torus_grid), torus_grid) for _ in range(d.ortho_int.cols)]
        tor = d.ortho_int.to_rational().mul_vec(u)
        coords = [c + v for c, v in zip(coords, tor)]
    y = TorusVec.make(coords)
    if return_parts:
        return y, a, u
    return y


_REDUCED_RECIPROCAL_CACHE: dict = {}


def _reduced_reciprocal(L: Lattice) -> RatMatrix:
    B = _REDUCED_RECIPROCAL_CACHE.get(L)
    if B is None:
        B = lll(reciprocal_basis(L))
        _REDUCED_RECIPROCAL_CACHE[L] = B
    return B


def closest_dual_point(L: Lattice, y: TorusVec) -> TorusVec:
    """Approximate closest point of H^# to y (exact membership guaranteed).

    The lift splits as an H_R^perp part, kept exactly, plus an H_R part that
    is Babai-rounded against an LLL-reduced basis of the reciprocal lattice."""
    if L.rank == 0:
        return y
    lift = list(y.lift())
    M = L.basis.to_rational()
    proj = M @ (M.transpose() @ M).inverse() @ M.transpose()
    par = proj.mul_vec(lift)
    perp = [x - p for x, p in zip(lift, par)]
    z = babai_nearest_plane(_reduced_reciprocal(L), par)
    return TorusVec.make([a + b for a, b in zip(perp, z)])


def feature_length_bound(L: Lattice) -> Fraction:
    """Lower bound 1/Delta on the feature length of H^# (no nonzero vector of
    the reciprocal lattice is shorter)."""
    if L.rank == 0:
        raise ValueError("feature length undefined for the trivial lattice")
    return Fraction(1, L.gram_det)


def basis_bit_complexity(L: Lattice) -> int:
    """Bit-complexity bound n with 2^n > prod_j ||m_j||_2 (Hadamard-style),
    the quantity the recovery schedule's R >= 2^(2n+1) needs."""
    import math

    prod_sq = 1
    for j in range(L.rank):
        col = L.basis.column(j)
        prod_sq *= sum(c * c for c in col)
    return math.isqrt(prod_sq).bit_length() + 1
