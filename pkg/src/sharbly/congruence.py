"""Gamma_0(N) in SL(n,Z), the coset space P^{n-1}(Z/N), and orbit splitting.

Conventions: row vectors, right actions everywhere.  Gamma_0(N) is the
subgroup whose *first row* is congruent to (*, 0, ..., 0) mod N, so the
right cosets Gamma_0(N)\\SL(n,Z) are labeled by the projective point of
the first row, and the cell orbit of c * gamma is labeled by the
stabilizer orbit of [e_1 * gamma^{-1}].
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import gcd

from . import intlinalg as la
from .intlinalg import Mat, Vec
from .voronoi import CellOrbit


def _units(n_mod: int):
    if n_mod == 1:
        return [0]
    return [u for u in range(n_mod) if gcd(u, n_mod) == 1]


def proj_normalize(coords, n_mod: int) -> Vec:
    """Canonical representative: lexicographically least unit multiple."""
    v = tuple(x % n_mod for x in coords)
    if n_mod == 1:
        return v
    g = 0
    for x in v:
        g = gcd(g, x)
    if gcd(g, n_mod) != 1:
        raise ValueError(f"{coords} is not unimodular mod {n_mod}")
    return min(tuple(u * x % n_mod for x in v) for u in _units(n_mod))


def proj_points(n: int, n_mod: int) -> list[Vec]:
    """All of P^{n-1}(Z/N), canonically normalized, sorted."""
    if n_mod < 1:
        raise ValueError("modulus must be >= 1")
    if n_mod == 1:
        return [(0,) * n]
    pts = set()
    for v in product(range(n_mod), repeat=n):
        g = 0
        for x in v:
            g = gcd(g, x)
        if gcd(g, n_mod) == 1:
            pts.add(proj_normalize(v, n_mod))
    return sorted(pts)


def proj_act(pt: Vec, gamma: Mat, n_mod: int) -> Vec:
    """Right action pt * gamma on P^{n-1}(Z/N)."""
    return proj_normalize(la.vec_mat(pt, gamma), n_mod)


def is_gamma0(gamma: Mat, n_mod: int) -> bool:
    """Membership in Gamma_0(N): SL(n,Z) with first row = (*, 0, .., 0) mod N."""
    if la.det(gamma) != 1:
        return False
    return all(x % n_mod == 0 for x in gamma[0][1:])


def coset_point(gamma: Mat, n_mod: int) -> Vec:
    """The point labeling the coset Gamma_0(N) * gamma."""
    return proj_normalize(gamma[0], n_mod)


def lift_point(pt: Vec, n_mod: int) -> Vec:
    """A primitive integer vector reducing to the projective point pt."""
    if n_mod == 1:
        return (1,) + (0,) * (len(pt) - 1)
    v = list(pt)
    if la.content(tuple(v)) == 1:
        return tuple(v)
    # gcd(v) is coprime to N, so bumping one coordinate by N fixes it
    for i in range(len(v)):
        w = list(v)
        w[i] += n_mod
        if la.content(tuple(w)) == 1:
            return tuple(w)
    raise AssertionError(f"no primitive lift for {pt} mod {n_mod}")


def coset_matrix(pt: Vec, n_mod: int) -> Mat:
    """A gamma_p in SL(n,Z) with [e_1 * gamma_p^{-1}] = pt.

    The chosen cell representative translated by gamma_p is the canonical
    lift of the split orbit labeled by pt.
    """
    a = la.complete_to_sl(lift_point(pt, n_mod))
    return la.inverse_unimodular(a)


@dataclass(frozen=True)
class SplitOrbit:
    """One Gamma_0(N)-orbit inside an SL(n,Z) cell orbit."""

    point: Vec  # canonical representative of the stabilizer orbit
    size: int
    stabilizer_order: int  # order of the matrix stabilizer of `point` in S
    orientation_ok: bool


def split_orbits(orbit: CellOrbit, n_mod: int) -> list[SplitOrbit]:
    """Gamma_0(N)-orbits of the cells in an SL-orbit, with orientation data.

    These are orbits of the cell's SL-stabilizer acting on P^{n-1}(Z/N);
    an orbit is orientation_ok iff no stabilizer element fixing its point
    reverses the cell's orientation.
    """
    stab = orbit.sl_stabilizer
    chars = orbit.sl_orientation_chars
    points = proj_points(len(orbit.representative.vertices[0]), n_mod)
    remaining = set(points)
    out = []
    for p in points:  # sorted, so orbit reps come out canonically
        if p not in remaining:
            continue
        seen = {p}
        queue = [p]
        while queue:
            q = queue.pop()
            for s in stab:
                q2 = proj_act(q, s, n_mod)
                if q2 not in seen:
                    seen.add(q2)
                    queue.append(q2)
        fixers = [
            ch for s, ch in zip(stab, chars) if proj_act(p, s, n_mod) == p
        ]
        out.append(
            SplitOrbit(
                point=p,
                size=len(seen),
                stabilizer_order=len(fixers),
                orientation_ok=all(ch == 1 for ch in fixers),
            )
        )
        remaining -= seen
    return out


def orbit_label(orbit: CellOrbit, raw_point: Vec, n_mod: int):
    """(canonical point, stabilizer element s with raw * s = canonical)."""
    stab = orbit.sl_stabilizer
    best = None
    for s in stab:
        q = proj_act(raw_point, s, n_mod)
        if best is None or q < best[0]:
            best = (q, s)
    return best
