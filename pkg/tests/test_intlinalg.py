import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sharbly import intlinalg as la


def naive_short_vectors(g, bound):
    """Independent oracle: enumerate the full coordinate cube."""
    n = len(g)
    # crude but safe box: |v_i| <= bound * max row sum of adj(g) / det... use
    # the loose bound from diagonal entries of the inverse.
    d = la.det(g)
    adj = la.adjugate(g)
    box = 0
    for i in range(n):
        # (v_i)^2 <= bound * (g^{-1})_{ii}
        box = max(box, la._floor_sqrt(Fraction(bound * adj[i][i], d)) + 1)
    out = set()
    for v in itertools.product(range(-box, box + 1), repeat=n):
        if any(v) and la.quadratic_value(g, v) <= bound:
            out.add(la.sign_normalize(v))
    return sorted(out)


small_mats = st.integers(min_value=1, max_value=4).flatmap(
    lambda n: st.lists(
        st.lists(st.integers(min_value=-9, max_value=9), min_size=n, max_size=n),
        min_size=n,
        max_size=n,
    )
)


class TestHnf:
    def test_identity(self):
        h, u = la.hnf(la.identity(2))
        assert h == la.identity(2)
        assert u == la.identity(2)

    def test_row_swap(self):
        a = la.freeze([[0, 1], [1, 0]])
        h, u = la.hnf(a)
        assert h == la.identity(2)
        assert la.mat_mul(u, a) == h
        assert abs(la.det(u)) == 1

    def test_two_by_two(self):
        a = la.freeze([[2, 4], [6, 8]])
        h, u = la.hnf(a)
        assert h == la.freeze([[2, 0], [0, 4]])
        assert la.mat_mul(u, a) == h
        assert abs(la.det(u)) == 1
        assert abs(la.det(h)) == 8

    @given(small_mats)
    @settings(max_examples=150, deadline=None)
    def test_transform_is_unimodular(self, rows):
        a = la.freeze(rows)
        h, u = la.hnf(a)
        assert abs(la.det(u)) == 1
        assert la.mat_mul(u, a) == h


class TestSnf:
    def test_diag(self):
        assert la.snf(la.freeze([[1, 0], [0, 2]])) == (1, 2)

    def test_small(self):
        # gcd of entries 1, determinant 3
        assert la.snf(la.freeze([[2, 1], [1, 2]])) == (1, 3)

    def test_zero(self):
        assert la.snf(la.zeros(2, 3)) == ()

    @given(small_mats)
    @settings(max_examples=100, deadline=None)
    def test_divisibility_chain(self, rows):
        a = la.freeze(rows)
        d = la.snf(a)
        for x, y in zip(d, d[1:]):
            assert y % x == 0
        if len(a) == len(a[0]):
            dd = la.det(a)
            if dd != 0:
                prod = 1
                for x in d:
                    prod *= x
                assert prod == abs(dd)

    @given(small_mats, st.randoms(use_true_random=False))
    @settings(max_examples=50, deadline=None)
    def test_unimodular_invariance(self, rows, rng):
        a = la.freeze(rows)
        n = len(a)

        def random_elementary():
            u = [list(r) for r in la.identity(n)]
            for _ in range(4):
                i, j = rng.randrange(n), rng.randrange(n)
                if i != j:
                    c = rng.randint(-2, 2)
                    u[i] = [x + c * y for x, y in zip(u[i], u[j])]
            return la.freeze(u)

        left, right = random_elementary(), random_elementary()
        assert la.snf(la.mat_mul(left, a)) == la.snf(a)
        assert la.snf(la.mat_mul(a, right)) == la.snf(a)
        assert la.snf(la.mat_mul(left, la.mat_mul(a, right))) == la.snf(a)


class TestDetAdj:
    @given(small_mats)
    @settings(max_examples=100, deadline=None)
    def test_adjugate_identity(self, rows):
        a = la.freeze(rows)
        if len(a) != len(a[0]):
            return
        d = la.det(a)
        prod = la.mat_mul(a, la.adjugate(a))
        assert prod == tuple(
            tuple(d if i == j else 0 for j in range(len(a))) for i in range(len(a))
        )


class TestCompleteToSl:
    @given(
        st.lists(st.integers(min_value=-9, max_value=9), min_size=2, max_size=4)
    )
    @settings(max_examples=100, deadline=None)
    def test_first_row_and_det(self, coords):
        v = tuple(coords)
        if la.content(v) != 1:
            with pytest.raises(ValueError):
                la.complete_to_sl(v)
            return
        a = la.complete_to_sl(v)
        assert a[0] == v
        assert la.det(a) == 1


class TestShortVectors:
    def test_identity_bound_one(self):
        assert la.short_vectors(la.identity(2), 1) == [(0, 1), (1, 0)]

    def test_hexagonal(self):
        g = la.freeze([[2, 1], [1, 2]])
        assert la.short_vectors(g, 2) == [(0, 1), (1, -1), (1, 0)]

    def test_identity3_bound2(self):
        vs = la.short_vectors(la.identity(3), 2)
        assert len(vs) == 9  # 3 unit vectors + 6 two-coordinate vectors

    def test_not_positive_definite(self):
        with pytest.raises(ValueError):
            la.short_vectors(la.freeze([[1, 0], [0, -1]]), 1)

    @given(
        st.integers(min_value=2, max_value=3),
        st.randoms(use_true_random=False),
        st.integers(min_value=1, max_value=6),
    )
    @settings(max_examples=60, deadline=None)
    def test_matches_naive_enumeration(self, n, rng, bound):
        # random small positive definite form b^T b + I
        b = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
        g = la.mat_mul(la.transpose(la.freeze(b)), la.freeze(b))
        g = tuple(
            tuple(g[i][j] + (1 if i == j else 0) for j in range(n)) for i in range(n)
        )
        assert la.short_vectors(g, bound) == naive_short_vectors(g, bound)


class TestFields:
    def test_charpoly_two_by_two(self):
        from sharbly.fields import QQ, charpoly

        p = charpoly(QQ, [[1, 2], [3, 4]])
        # x^2 - 5x - 2
        assert p == (Fraction(-2), Fraction(-5), Fraction(1))

    def test_charpoly_matches_det_and_trace_fp(self):
        from sharbly.fields import PrimeField, charpoly

        f = PrimeField(5)
        rows = [[1, 2, 0], [0, 3, 1], [4, 0, 2]]
        p = charpoly(f, rows)
        assert len(p) == 4 and p[-1] == 1
        # constant term = (-1)^n det, x^2 coefficient = -trace
        det = f(la.det(la.freeze(rows)))
        assert p[0] == f.mul(f(-1), det)
        assert p[2] == f(-(1 + 3 + 2))

    def test_rank_kernel(self):
        from sharbly.fields import QQ, PrimeField, SparseFieldMatrix, rank_kernel

        m = SparseFieldMatrix.from_dense(PrimeField(5), [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
        assert rank_kernel(m) == (3, [])
        m = SparseFieldMatrix.from_dense(PrimeField(3), [[1, 2], [2, 4]])
        r, k = rank_kernel(m)
        assert r == 1 and len(k) == 1
        assert all(x == 0 for x in m.matvec(k[0]))
        m = SparseFieldMatrix.from_dense(QQ, [[0, 0], [0, 0]])
        r, k = rank_kernel(m)
        assert r == 0 and len(k) == 2

    def test_rank_invariant_under_row_permutation(self):
        import itertools
        import random

        from sharbly.fields import PrimeField, SparseFieldMatrix, rank_kernel

        rng = random.Random(4)
        f = PrimeField(7)
        rows = [[rng.randrange(7) for _ in range(4)] for _ in range(4)]
        base = rank_kernel(SparseFieldMatrix.from_dense(f, rows))[0]
        for perm in itertools.permutations(range(4)):
            shuffled = [rows[i] for i in perm]
            assert rank_kernel(SparseFieldMatrix.from_dense(f, shuffled))[0] == base

    def test_field_two_rejected(self):
        from sharbly.fields import PreconditionError, PrimeField

        with pytest.raises(PreconditionError):
            PrimeField(2)
        with pytest.raises(PreconditionError):
            PrimeField(9)

    def test_eigenvalues(self):
        from sharbly.fields import QQ, eigenvalues

        # (x - 3)(x + 2)^2 = x^3 + x^2 - 8x - 12
        poly = (Fraction(-12), Fraction(-8), Fraction(1), Fraction(1))
        roots, rem = eigenvalues(QQ, poly)
        assert roots == [(Fraction(-2), 2), (Fraction(3), 1)]
        assert rem is None
