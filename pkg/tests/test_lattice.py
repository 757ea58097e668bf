import math
import random
from fractions import Fraction

import pytest

from hslattice.lattice import (
    Lattice,
    TorusVec,
    closest_dual_point,
    coset_canonical,
    dual_description,
    dual_membership,
    dual_sample_uniform,
    feature_length_bound,
    integer_orthogonal,
    lattice_from_generators,
    reciprocal_basis,
    saturation,
)
from hslattice.lll import enumerate_short_vectors, lll
from hslattice.matrix import IntMatrix, RatMatrix
from hslattice.experiments import random_lattice


def col_lattice(cols, k):
    if not cols:
        return Lattice.trivial(k)
    return lattice_from_generators(IntMatrix.from_columns(cols, rows=k))


class TestTorusVec:
    def test_reduction(self):
        v = TorusVec.make([Fraction(5, 4), Fraction(-1, 3)])
        assert v.coords == (Fraction(1, 4), Fraction(2, 3))

    def test_lift_roundtrip(self):
        rng = random.Random(0)
        for _ in range(200):
            v = TorusVec.make([Fraction(rng.randrange(-20, 20), rng.randrange(1, 15))
                               for _ in range(3)])
            lifted = v.lift()
            assert all(-Fraction(1, 2) < c <= Fraction(1, 2) for c in lifted)
            assert TorusVec.make(lifted) == v

    def test_parse_str(self):
        v = TorusVec.parse("1/2 3/4 0")
        assert str(v) == "1/2 3/4 0"


class TestConstruction:
    def test_zn(self):
        L = Lattice.zn(3)
        assert L.rank == 3 and L.gram_det == 1

    def test_dependent_generators(self):
        L = col_lattice([[2, 4], [4, 8]], 2)
        assert L.rank == 1 and L.basis.column(0) == (2, 4)

    def test_membership_both_ways(self):
        gens = [[7, 0], [0, 21], [3, 3]]
        L = col_lattice(gens, 2)
        for g in gens:
            assert L.contains(g)
        # brute-force the other containment: every basis vector is a
        # Z-combination of the generators (search over a small box)
        for j in range(L.rank):
            b = L.basis.column(j)
            found = False
            for a in range(-30, 31):
                for c in range(-30, 31):
                    for d in range(-30, 31):
                        if all(a * g1 + c * g2 + d * g3 == x
                               for g1, g2, g3, x in zip(*gens, b)):
                            found = True
            assert found
        gram = L.basis.transpose() @ L.basis
        assert L.gram_det == gram.det()


class TestReciprocal:
    def test_zn_self_reciprocal(self):
        assert reciprocal_basis(Lattice.zn(3)).data == RatMatrix.identity(3).data

    def test_scaling_1d(self):
        L = col_lattice([[2]], 1)
        assert reciprocal_basis(L).data == ((Fraction(1, 2),),)

    def test_diagonal_vector(self):
        L = col_lattice([[1, 1]], 2)
        assert reciprocal_basis(L).column(0) == (Fraction(1, 2), Fraction(1, 2))

    def test_invariants_random(self):
        rng = random.Random(1)
        for _ in range(40):
            k = rng.randrange(1, 6)
            L = random_lattice(k, rng.randrange(1, k + 1), 64, rng)
            rec = reciprocal_basis(L)
            prod = L.basis.to_rational().transpose() @ rec
            assert prod.data == RatMatrix.identity(L.rank).data
            # H^o <= (1/Delta) Z^k
            for j in range(rec.cols):
                for x in rec.column(j):
                    assert (x * L.gram_det).denominator == 1

    def test_rank_zero_rejected(self):
        with pytest.raises(ValueError):
            reciprocal_basis(Lattice.trivial(2))


class TestSaturation:
    def test_zn(self):
        assert saturation(Lattice.zn(2)) == Lattice.zn(2)

    def test_primitive_line(self):
        L = col_lattice([[2, 4]], 2)
        sat = saturation(L)
        assert sat.basis.column(0) == (1, 2)
        index_sq = L.gram_det // sat.gram_det
        assert math.isqrt(index_sq) ** 2 == index_sq
        assert math.isqrt(index_sq) == 2

    def test_full_rank_saturates_to_zn(self):
        L = col_lattice([[2, 0], [0, 3]], 2)
        assert saturation(L) == Lattice.zn(2)

    def test_idempotence_and_index_law(self):
        rng = random.Random(2)
        for _ in range(40):
            k = rng.randrange(1, 6)
            L = random_lattice(k, rng.randrange(0, k + 1), 64, rng)
            sat = saturation(L)
            assert saturation(sat) == sat
            assert sat.rank == L.rank
            assert sat.contains_lattice(L)
            index_sq, rem = divmod(L.gram_det, sat.gram_det)
            assert rem == 0
            assert math.isqrt(index_sq) ** 2 == index_sq


class TestIntegerOrthogonal:
    def test_zn_empty(self):
        assert integer_orthogonal(Lattice.zn(3)).cols == 0

    def test_line_in_z2(self):
        C = integer_orthogonal(col_lattice([[1, 1]], 2))
        assert C.cols == 1
        v = C.column(0)
        assert v in ((1, -1), (-1, 1))

    def test_trivial_identity(self):
        assert integer_orthogonal(Lattice.trivial(3)).data == IntMatrix.identity(3).data

    def test_orthogonality_random(self):
        rng = random.Random(3)
        for _ in range(40):
            k = rng.randrange(1, 6)
            L = random_lattice(k, rng.randrange(0, k + 1), 64, rng)
            C = integer_orthogonal(L)
            assert C.cols == k - L.rank
            prod = L.basis.transpose() @ C
            assert all(x == 0 for row in prod.data for x in row)
            # saturated: C spans exactly the integer points of the kernel
            if C.cols:
                sat = saturation(col_lattice([list(C.column(j)) for j in range(C.cols)], k))
                assert sat == col_lattice([list(C.column(j)) for j in range(C.cols)], k)


class TestDualMembership:
    def test_zero_always(self):
        L = col_lattice([[3, 1]], 2)
        assert dual_membership(L, TorusVec.zero(2))

    def test_1d(self):
        L = col_lattice([[2]], 1)
        assert dual_membership(L, TorusVec.make([Fraction(1, 2)]))
        assert not dual_membership(L, TorusVec.make([Fraction(1, 3)]))


class TestDualSampling:
    def test_zn_always_zero_mod_grid(self):
        rng = random.Random(4)
        L = Lattice.zn(2)
        for _ in range(50):
            assert dual_sample_uniform(L, 8, rng) == TorusVec.zero(2)

    def test_2z_uniform(self):
        rng = random.Random(5)
        counts = {0: 0, 1: 0}
        for _ in range(10000):
            y = dual_sample_uniform(col_lattice([[2]], 1), 4, rng)
            counts[0 if y.coords[0] == 0 else 1] += 1
        # chi-squared, 1 dof, p > 0.001 -> statistic < 10.83
        chi2 = sum((c - 5000) ** 2 / 5000 for c in counts.values())
        assert chi2 < 10.83

    def test_trivial_grid(self):
        rng = random.Random(6)
        seen = set()
        for _ in range(400):
            y = dual_sample_uniform(Lattice.trivial(1), 4, rng)
            seen.add(y.coords[0])
        assert seen == {Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)}

    def test_membership_and_component_uniformity(self):
        from scipy.stats import chi2 as chi2_dist

        rng = random.Random(7)
        for _ in range(5):
            k = rng.randrange(1, 5)
            L = random_lattice(k, rng.randrange(0, k + 1), 8, rng)
            sat = saturation(L)
            counts = {}
            draws = 2000
            for _ in range(draws):
                y = dual_sample_uniform(L, 16, rng)
                assert dual_membership(L, y)
                # component = pairing pattern against the saturation basis
                key = tuple(y.pairing(sat.basis.column(j)) for j in range(sat.rank))
                counts[key] = counts.get(key, 0) + 1
            ncomp = math.isqrt(L.gram_det // sat.gram_det)
            assert len(counts) <= ncomp
            if ncomp > 1 and len(counts) == ncomp:
                expect = draws / ncomp
                stat = sum((c - expect) ** 2 / expect for c in counts.values())
                assert stat < chi2_dist.isf(0.001, ncomp - 1)


class TestClosestDualPoint:
    def test_fixed_point(self):
        rng = random.Random(8)
        L = col_lattice([[2]], 1)
        for _ in range(20):
            y = dual_sample_uniform(L, 8, rng)
            assert closest_dual_point(L, y) == y

    def test_1d_example(self):
        L = col_lattice([[2]], 1)
        assert closest_dual_point(L, TorusVec.make([Fraction(49, 100)])) == \
            TorusVec.make([Fraction(1, 2)])

    def test_zn_small(self):
        L = Lattice.zn(2)
        y = TorusVec.make([Fraction(1, 5), Fraction(-1, 5)])
        assert closest_dual_point(L, y) == TorusVec.zero(2)

    def test_perturbation_recovery(self):
        rng = random.Random(9)
        for _ in range(25):
            k = rng.randrange(1, 4)
            rank = rng.randrange(1, k + 1)
            L = random_lattice(k, rank, 8, rng)
            y = dual_sample_uniform(L, 8, rng)
            bound = feature_length_bound(L) / 2
            # perturb inside H_R (the noise model direction) below half the
            # feature length; the perturbed point snaps back exactly
            b = [Fraction(x) for x in L.basis.column(rng.randrange(L.rank))]
            scale = bound / (4 * max(abs(x) for x in b) * k)
            pert = [x * scale for x in b]
            noisy = TorusVec.make([a + e for a, e in zip(y.coords, pert)])
            assert closest_dual_point(L, noisy) == y


class TestFeatureLength:
    def test_zn(self):
        assert feature_length_bound(Lattice.zn(2)) == 1

    def test_2z(self):
        L = col_lattice([[2]], 1)
        assert feature_length_bound(L) == Fraction(1, 4)
        rec = reciprocal_basis(L)
        shortest = min(
            sum(x * x for x in v)
            for v in enumerate_short_vectors(lll(rec), Fraction(4))
        )
        assert shortest >= feature_length_bound(L) ** 2

    def test_diagonal_line(self):
        L = col_lattice([[1, 1]], 2)
        assert feature_length_bound(L) == Fraction(1, 2)
        rec = reciprocal_basis(L)
        shortest = min(
            sum(x * x for x in v)
            for v in enumerate_short_vectors(lll(rec), Fraction(4))
        )
        # shortest H^o vector has norm 1/sqrt(2) >= 1/2
        assert shortest == Fraction(1, 2)
        assert shortest >= feature_length_bound(L) ** 2


class TestCosetCanonical:
    def test_zn_all_zero(self):
        L = Lattice.zn(2)
        assert coset_canonical(L, [5, -3]) == (0, 0)

    def test_trivial_unchanged(self):
        L = Lattice.trivial(2)
        assert coset_canonical(L, [5, -3]) == (5, -3)

    def test_iff_property(self):
        rng = random.Random(10)
        L = col_lattice([[2, 0], [1, 3]], 2)
        pts = [(rng.randrange(-9, 10), rng.randrange(-9, 10)) for _ in range(40)]
        for x in pts:
            cx = coset_canonical(L, x)
            assert coset_canonical(L, cx) == cx  # idempotent
            for y in pts:
                same = cx == coset_canonical(L, y)
                member = L.contains([a - b for a, b in zip(x, y)])
                assert same == member

    def test_translation_invariance(self):
        rng = random.Random(11)
        for _ in range(30):
            k = rng.randrange(1, 5)
            L = random_lattice(k, rng.randrange(0, k + 1), 8, rng)
            x = [rng.randrange(-20, 21) for _ in range(k)]
            if L.rank:
                h = L.basis.mul_vec([rng.randrange(-3, 4) for _ in range(L.rank)])
                shifted = [a + b for a, b in zip(x, h)]
                assert coset_canonical(L, x) == coset_canonical(L, shifted)


class TestDualDescription:
    def test_component_index_square(self):
        rng = random.Random(12)
        for _ in range(20):
            k = rng.randrange(1, 5)
            L = random_lattice(k, rng.randrange(0, k + 1), 32, rng)
            d = dual_description(L)
            assert d.component_index ** 2 * d.saturated.gram_det == L.gram_det
            if d.reciprocal is not None:
                prod = L.basis.to_rational().transpose() @ d.reciprocal
                assert prod.data == RatMatrix.identity(L.rank).data
            prod0 = L.basis.transpose() @ d.ortho_int
            assert all(x == 0 for row in prod0.data for x in row)
