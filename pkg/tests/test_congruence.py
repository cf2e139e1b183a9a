import itertools
import random
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sharbly import congruence as cg
from sharbly import intlinalg as la


def independent_point_count(n, n_mod):
    """Count P^{n-1}(Z/N) without the library's normal form."""
    if n_mod == 1:
        return 1
    units = [u for u in range(n_mod) if gcd(u, n_mod) == 1]
    classes = set()
    for v in itertools.product(range(n_mod), repeat=n):
        g = 0
        for x in v:
            g = gcd(g, x)
        if gcd(g, n_mod) != 1:
            continue
        classes.add(frozenset(tuple(u * x % n_mod for x in v) for u in units))
    return len(classes)


def prime_factors(n):
    out = set()
    d = 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1
    if n > 1:
        out.add(n)
    return out


class TestProjPoints:
    def test_counts(self):
        assert len(cg.proj_points(2, 1)) == 1
        assert len(cg.proj_points(2, 11)) == 12
        assert len(cg.proj_points(3, 2)) == 7

    @pytest.mark.parametrize("n,n_mod", [(2, 4), (2, 9), (2, 12), (3, 3), (3, 4), (3, 6)])
    def test_against_independent_count(self, n, n_mod):
        assert len(cg.proj_points(n, n_mod)) == independent_point_count(n, n_mod)

    @pytest.mark.parametrize("n", [2, 3])
    @pytest.mark.parametrize("n_mod", [2, 3, 5, 6, 10, 15])
    def test_squarefree_formula(self, n, n_mod):
        expected = 1
        for p in prime_factors(n_mod):
            expected *= sum(p ** i for i in range(n))
        assert len(cg.proj_points(n, n_mod)) == expected

    @given(
        st.integers(min_value=2, max_value=20),
        st.lists(st.integers(min_value=0, max_value=19), min_size=2, max_size=2),
    )
    @settings(max_examples=80, deadline=None)
    def test_normalization_idempotent(self, n_mod, coords):
        g = 0
        for x in coords:
            g = gcd(g, x)
        if gcd(g, n_mod) != 1:
            with pytest.raises(ValueError):
                cg.proj_normalize(coords, n_mod)
            return
        p = cg.proj_normalize(coords, n_mod)
        assert cg.proj_normalize(p, n_mod) == p


class TestAction:
    def test_identity(self):
        for p in cg.proj_points(2, 11):
            assert cg.proj_act(p, la.identity(2), 11) == p

    def test_rotation_example(self):
        p = cg.proj_normalize((1, 0), 11)
        out = cg.proj_act(p, ((0, 1), (-1, 0)), 11)
        assert out == cg.proj_normalize((0, 1), 11)

    @given(st.randoms(use_true_random=False))
    @settings(max_examples=40, deadline=None)
    def test_associativity(self, rng):
        n_mod = rng.choice([2, 5, 11, 12])
        pts = cg.proj_points(2, n_mod)
        p = pts[rng.randrange(len(pts))]
        g1 = _random_sl2(rng)
        g2 = _random_sl2(rng)
        assert cg.proj_act(cg.proj_act(p, g1, n_mod), g2, n_mod) == cg.proj_act(
            p, la.mat_mul(g1, g2), n_mod
        )

    def test_gamma0_membership(self):
        assert cg.is_gamma0(((1, 11), (0, 1)), 11)
        assert cg.is_gamma0(((1, 0), (5, 1)), 11)
        assert not cg.is_gamma0(((1, 1), (0, 1)), 11)

    def test_coset_matrix_inverts_to_point(self):
        for n_mod in (1, 5, 11, 12):
            for p in cg.proj_points(2, n_mod):
                g = cg.coset_matrix(p, n_mod)
                assert la.det(g) == 1
                q = cg.proj_normalize(la.inverse_unimodular(g)[0], n_mod)
                assert q == p


def _random_sl2(rng):
    g = la.identity(2)
    for _ in range(5):
        c = rng.randint(-2, 2)
        m = ((1, c), (0, 1)) if rng.randrange(2) else ((1, 0), (c, 1))
        g = la.mat_mul(g, m)
    return g


class TestSplitOrbits:
    def test_edge_level_11(self, table2):
        edge = table2.orbits[1][0]
        recs = cg.split_orbits(edge, 11)
        assert len(recs) == 6
        assert all(r.orientation_ok for r in recs)
        assert sum(r.size for r in recs) == 12

    def test_triangle_level_11(self, table2):
        tri = table2.orbits[2][0]
        recs = cg.split_orbits(tri, 11)
        assert len(recs) == 4
        assert all(r.orientation_ok for r in recs)
        assert sum(r.size for r in recs) == 12

    def test_edge_level_1_killed(self, table2):
        edge = table2.orbits[1][0]
        recs = cg.split_orbits(edge, 1)
        assert len(recs) == 1
        assert not recs[0].orientation_ok
        assert recs[0].stabilizer_order == 4

    def test_sizes_partition_all_orbits(self, table3):
        for n_mod in (2, 3, 4):
            total = len(cg.proj_points(3, n_mod))
            for d, orbs in table3.orbits.items():
                for o in orbs:
                    recs = cg.split_orbits(o, n_mod)
                    assert sum(r.size for r in recs) == total

    def test_representative_independence(self, table2):
        # splitting data is intrinsic: translating the representative
        # produces the same multiset of (size, stabilizer order, flag)
        rng = random.Random(3)
        from sharbly.voronoi import CellOrbit, VoronoiCell, cell_stabilizer, orientation_char

        for orb in (table2.orbits[1][0], table2.orbits[2][0]):
            g = _random_sl2(rng)
            moved = VoronoiCell.from_vectors(
                2, [la.vec_mat(v, g) for v in orb.representative.vertices]
            )
            gl, sl = cell_stabilizer(moved)
            moved_orb = CellOrbit(
                dim=orb.dim,
                index=0,
                representative=moved,
                gl_stabilizer=gl,
                sl_stabilizer=sl,
                sl_orientation_chars=tuple(orientation_char(moved, s) for s in sl),
                facets=(),
            )
            for n_mod in (5, 11):
                a = sorted(
                    (r.size, r.stabilizer_order, r.orientation_ok)
                    for r in cg.split_orbits(orb, n_mod)
                )
                b = sorted(
                    (r.size, r.stabilizer_order, r.orientation_ok)
                    for r in cg.split_orbits(moved_orb, n_mod)
                )
                assert a == b

    def test_level_11_actions_free(self, table2):
        # -1 is a non-residue mod 11 and 11 = 2 mod 3, so both projective
        # stabilizer actions are free: every point stabilizer is just {+-1}
        for orb in (table2.orbits[1][0], table2.orbits[2][0]):
            for r in cg.split_orbits(orb, 11):
                assert r.orientation_ok
                assert r.stabilizer_order == 2

    def test_level_7_triangle_has_fixed_point(self, table2):
        # -3 is a square mod 7, so the order-3 rotation fixes two points;
        # the orbit still survives because its characters are trivial
        recs = cg.split_orbits(table2.orbits[2][0], 7)
        assert sorted(r.stabilizer_order for r in recs) == [2, 2, 6, 6]
        assert all(r.orientation_ok for r in recs)
