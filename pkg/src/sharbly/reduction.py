"""Reduction of 1-sharbly chains to Voronoi support, with exact certificates.

Everything here works with plain chains plus explicit bar terms: an element
[gamma | c] with gamma in Gamma_0(N) contributes c*gamma - c, which is the
vertical differential of the bar resolution tensored down.  A reduction of
a chain c is then an exact identity

    c  =  (Voronoi-supported chain)  +  d(homotopy)  +  sum_i (c_i g_i - c_i)

between normalized chains, checkable term by term.  Witnesses for the
chain-level Hecke identity  d1 y + theta(x) s - d2 u = a theta(x)  are
found the same way: grow a support set of cone subdivisions and bar pairs
in rounds, then solve one exact linear system over the coefficient field.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import congruence as cg
from . import intlinalg as la
from . import sharbly as sh
from .errors import InternalCheckError
from .fields import SparseFieldMatrix, solve
from .hecke import HeckeOperator, _eigen_report, hecke_cosets
from .homology import GammaComplex, _canonical_label, express_cycle, homology, is_cycle
from .voronoi import VoronoiCell, _orientation_transport_sign, equivalent_cells, _vertex_maps


@dataclass(frozen=True)
class Undetermined:
    """Search budget exhausted without a certificate; never a wrong answer."""

    reason: str


# ---------------------------------------------------------------------------
# Lifts between coinvariant coordinates and plain chains
# ---------------------------------------------------------------------------

def theta_lift(cx: GammaComplex, k: int, vec) -> sh.SharblyChain:
    """Plain sharbly chain lifting a W_k coordinate vector."""
    f = cx.field
    n = cx.n
    out = sh.SharblyChain(n, k)
    d = k + n - 1
    for (o_idx, point), coeff in zip(cx.bases[k], vec):
        if coeff == f.zero:
            continue
        rep = cx.table.orbits[d][o_idx].representative
        gamma_p = cg.coset_matrix(point, cx.level)
        out.add_term([la.vec_mat(v, gamma_p) for v in rep.vertices], coeff)
    return out


def chain_to_w(cx: GammaComplex, k: int, chain: sh.SharblyChain):
    """Coordinates in W_k of a Voronoi-supported plain chain.

    Every term must be the sharbly of an actual Voronoi cell; terms whose
    split orbit is killed by orientation contribute zero.
    """
    f = cx.field
    n = cx.n
    d = k + n - 1
    orbits = cx.table.orbits[d]
    index = cx.basis_index(k)
    out = [f.zero] * cx.rank(k)
    for key, c in chain.coeffs.items():
        cell = VoronoiCell(n, key)
        hit = None
        for orb in orbits:
            gamma = equivalent_cells(orb.representative, cell)
            if gamma is not None:
                hit = (orb, gamma)
                break
        if hit is None:
            raise ValueError(f"chain term {key} is not a Voronoi cell sharbly")
        orb, gamma = hit
        q = cg.proj_normalize(la.inverse_unimodular(gamma)[0], cx.level)
        p_canon, chars = _canonical_label(orb, q, cx.level)
        rec = cx.splits[d, orb.index][p_canon]
        if not rec.orientation_ok:
            continue
        if len(chars) != 1:
            raise InternalCheckError("ambiguous transport on a surviving orbit")
        eta = _orientation_transport_sign(orb.representative, gamma, cell)
        pos = index[orb.index, p_canon]
        out[pos] = f.add(out[pos], f(c * eta * chars.pop()))
    return out


def is_voronoi_supported(cx: GammaComplex, chain: sh.SharblyChain) -> bool:
    orbits = cx.table.orbits[chain.k + cx.n - 1]
    for key in chain.coeffs:
        cell = VoronoiCell(cx.n, key)
        if all(equivalent_cells(o.representative, cell) is None for o in orbits):
            return False
    return True


# ---------------------------------------------------------------------------
# Certificate search
# ---------------------------------------------------------------------------

def _bad_pairs(key):
    """Vertex pairs of a 1-sharbly spanning a non-unimodular edge."""
    out = []
    for i in range(len(key)):
        for j in range(i + 1, len(key)):
            d = la.det(la.freeze((key[i], key[j])))
            if abs(d) > 1:
                out.append((key[i], key[j], abs(d)))
    return out


def _cone_candidates(n, key):
    """Cone 2-sharblies subdividing each bad edge of a 1-sharbly."""
    out = []
    for u, v, _d in _bad_pairs(key):
        z = sh._reducing_vector(la.freeze((u, v)), exclude=frozenset(key))
        if z is None:
            continue
        tau = sh.normalize(n, (z,) + tuple(key))
        if tau is not None:
            out.append(tau.vectors)
    return out


def _gamma0_witnesses(n_mod, src_key, dst_key):
    """All gamma in Gamma_0(N) with src * gamma = +-dst as vertex sets."""
    src = VoronoiCell(len(src_key[0]), src_key)
    dst = VoronoiCell(src.n, dst_key)
    out = []
    for gamma in _vertex_maps(src, dst, dets=(1,)):
        if all(x % n_mod == 0 for x in gamma[0][1:]):
            out.append(gamma)
    return out


class _SupportSystem:
    """Grown support set and the exact linear system over it."""

    def __init__(self, cx: GammaComplex, with_w1: bool):
        self.cx = cx
        self.n = cx.n
        self.f = cx.field
        self.with_w1 = with_w1
        self.s1: set = set()
        self.taus: list = []
        self._tau_seen: set = set()
        self.bars: list = []  # (gamma, key)
        self._bar_seen: set = set()
        self._pairs_done: set = set()
        if with_w1:
            self.lifts = []
            for i, gen in enumerate(cx.bases[1]):
                unit = [cx.field.zero] * cx.rank(1)
                unit[i] = cx.field.one
                lift = theta_lift(cx, 1, unit)
                back = chain_to_w(cx, 1, lift)
                if tuple(back) != tuple(unit):
                    raise InternalCheckError("theta lift does not invert chain_to_w")
                self.lifts.append(lift)
                self.s1.update(lift.coeffs)

    def add_chain_keys(self, chain: sh.SharblyChain):
        self.s1.update(chain.coeffs)

    def grow(self):
        """One round: cone every bad edge, then pair up equivalent supports."""
        new_keys = set()
        for key in sorted(self.s1):
            for tau_key in _cone_candidates(self.n, key):
                if tau_key in self._tau_seen:
                    continue
                self._tau_seen.add(tau_key)
                self.taus.append(tau_key)
                bd = sh.boundary(sh.SharblyChain(self.n, 2, {tau_key: 1}))
                new_keys.update(bd.coeffs)
        self.s1.update(new_keys)
        # bar pairs between all supports in the same Gamma_0(N) orbit
        keys = sorted(self.s1)
        for src in keys:
            for dst in keys:
                if (src, dst) in self._pairs_done:
                    continue
                self._pairs_done.add((src, dst))
                for gamma in _gamma0_witnesses(self.cx.level, src, dst):
                    if gamma == la.identity(self.n):
                        continue
                    if (gamma, src) not in self._bar_seen:
                        self._bar_seen.add((gamma, src))
                        self.bars.append((gamma, src))

    def solve(self, rhs_chain: sh.SharblyChain):
        """Solve  w1-part + d(tau-part) + bar-part = rhs  exactly.

        Returns (w1_vec, homotopy, bar_terms) or None; the w1 block is
        ordered first so already-supported inputs come back unchanged.
        """
        f = self.f
        columns = []  # list of chains (as dicts key -> field coeff)

        def as_field_chain(chain):
            return {k: f(c) for k, c in chain.coeffs.items()}

        if self.with_w1:
            for lift in self.lifts:
                columns.append(as_field_chain(lift))
        tau_start = len(columns)
        for tau_key in self.taus:
            bd = sh.boundary(sh.SharblyChain(self.n, 2, {tau_key: 1}))
            columns.append(as_field_chain(bd))
        bar_start = len(columns)
        for gamma, src in self.bars:
            base = sh.SharblyChain(self.n, 1, {src: 1})
            delta = base.act(gamma).add_chain(base, -1)
            columns.append(as_field_chain(delta))

        row_keys = set(rhs_chain.coeffs)
        for col in columns:
            row_keys.update(col)
        row_index = {k: i for i, k in enumerate(sorted(row_keys))}
        triplets = []
        for j, col in enumerate(columns):
            for k, v in col.items():
                if v != f.zero:
                    triplets.append((row_index[k], j, v))
        mat = SparseFieldMatrix.from_triplets(
            f, len(row_index), len(columns), triplets
        )
        rhs = [f.zero] * len(row_index)
        for k, v in rhs_chain.coeffs.items():
            rhs[row_index[k]] = f(v)
        sol = solve(mat, rhs)
        if sol is None:
            return None
        w1_vec = tuple(sol[: tau_start]) if self.with_w1 else ()
        homotopy = sh.SharblyChain(self.n, 2)
        for tau_key, coeff in zip(self.taus, sol[tau_start:bar_start]):
            if coeff != f.zero:
                homotopy.add_chain(sh.SharblyChain(self.n, 2, {tau_key: coeff}))
        bar_terms = []
        for (gamma, src), coeff in zip(self.bars, sol[bar_start:]):
            if coeff != f.zero:
                bar_terms.append((gamma, sh.SharblyChain(self.n, 1, {src: coeff})))
        return w1_vec, homotopy, tuple(bar_terms)


def _bar_sum(n: int, bar_terms) -> sh.SharblyChain:
    out = sh.SharblyChain(n, 1)
    for gamma, chain in bar_terms:
        out.add_chain(chain.act(gamma))
        out.add_chain(chain, -1)
    return out


@dataclass(frozen=True)
class ReductionResult:
    """c = reduced + d(homotopy) + sum(c_i gamma_i - c_i), exactly."""

    field: object
    reduced: sh.SharblyChain
    w1_coords: tuple
    homotopy: sh.SharblyChain
    bar_terms: tuple

    def verify(self, original: sh.SharblyChain) -> bool:
        n = original.n
        total = self.reduced.copy()
        if not self.homotopy.is_zero():
            total.add_chain(sh.boundary(self.homotopy))
        total.add_chain(_bar_sum(n, self.bar_terms))
        total.add_chain(original, -1)
        return total.reduced(self.field).is_zero()


def one_sharbly_reduce_n2(cx: GammaComplex, chain: sh.SharblyChain,
                          budget: int = 4):
    """Rewrite a coinvariant-cycle 1-chain as a Voronoi-supported one.

    Returns a ReductionResult whose identity is exact, or Undetermined when
    the certificate search exhausts its budget.
    """
    if cx.n != 2 or chain.n != 2 or chain.k != 1:
        raise ValueError("this reduction is implemented for n = 2, k = 1")
    f = cx.field
    fchain = chain.reduced(f)
    if is_voronoi_supported(cx, fchain):
        coords = chain_to_w(cx, 1, fchain)
        return ReductionResult(
            f, fchain, tuple(coords), sh.SharblyChain(2, 2), ()
        )
    system = _SupportSystem(cx, with_w1=True)
    system.add_chain_keys(fchain)
    for round_ in range(budget + 1):
        sol = system.solve(fchain)
        if sol is not None:
            w1_vec, homotopy, bar_terms = sol
            reduced = theta_lift(cx, 1, w1_vec)
            result = ReductionResult(f, reduced, w1_vec, homotopy, bar_terms)
            if not result.verify(fchain):
                raise InternalCheckError("reduction certificate failed to verify")
            return result
        if round_ < budget:
            system.grow()
    return Undetermined(f"no reduction certificate within {budget} rounds")


def one_sharbly_reduce(cx: GammaComplex, chain: sh.SharblyChain, budget: int = 4):
    """Dispatch by rank; n = 3 reduction is not implemented (by design)."""
    if cx.n == 2:
        return one_sharbly_reduce_n2(cx, chain, budget)
    return Undetermined("1-sharbly reduction is only implemented for n = 2")


@dataclass(frozen=True)
class Witness:
    """Chains certifying  d1 y + theta(x) s - d2 u = a theta(x)  exactly."""

    field: object
    a: object
    x_chain: sh.SharblyChain  # theta(x)
    s_chain: sh.SharblyChain  # theta(x) * s (sum over cosets)
    y: sh.SharblyChain  # 2-sharbly chain
    u: tuple  # bar terms (gamma, 1-sharbly chain)

    def verify(self) -> bool:
        f = self.field
        n = self.x_chain.n
        total = sh.SharblyChain(n, 1)
        if not self.y.is_zero():
            total.add_chain(sh.boundary(self.y))
        total.add_chain(self.s_chain)
        total.add_chain(_bar_sum(n, self.u), -1)
        total.add_chain(self.x_chain, f.neg(self.a))
        return total.reduced(f).is_zero()


def _theta_s(cx: GammaComplex, op: HeckeOperator, x_vec) -> tuple:
    """(theta(x), theta(x) * s) as plain chains."""
    x_chain = theta_lift(cx, 1, x_vec)
    s_chain = sh.SharblyChain(cx.n, 1)
    for s in op.cosets:
        s_chain.add_chain(x_chain.act(s))
    return x_chain, s_chain


def verify_eigen_chain(cx: GammaComplex, x_vec, op: HeckeOperator, a,
                       budget: int = 4):
    """Search for a chain-level witness that a is the eigenvalue on [x].

    Returns a verified Witness or Undetermined; a wrong a can only produce
    Undetermined, never a witness.
    """
    if cx.level % op.ell == 0:
        from .errors import PreconditionError

        raise PreconditionError(f"l = {op.ell} divides N = {cx.level}")
    f = cx.field
    a = f(a)
    x_chain, s_chain = _theta_s(cx, op, x_vec)
    if x_chain.is_zero() and s_chain.is_zero():
        return Witness(f, a, x_chain, s_chain, sh.SharblyChain(cx.n, 2), ())
    rhs = s_chain.copy().add_chain(x_chain, f.neg(a)).reduced(f)
    system = _SupportSystem(cx, with_w1=False)
    system.add_chain_keys(x_chain)
    system.add_chain_keys(s_chain)
    for round_ in range(budget + 1):
        sol = system.solve(rhs)
        if sol is not None:
            # rhs = d(T) + B  ==>  d(-T) + theta(x) s - B = a theta(x)
            _, homotopy, bar_terms = sol
            y = homotopy.scaled(f(-1))
            wit = Witness(f, a, x_chain, s_chain, y, bar_terms)
            if not wit.verify():
                raise InternalCheckError("eigen witness failed to verify")
            return wit
        if round_ < budget:
            system.grow()
    return Undetermined(
        f"no witness for eigenvalue {a} within {budget} rounds"
    )


def hecke_on_h1_n2(level: int, field, ell: int, budget: int = 4,
                   cx: GammaComplex | None = None):
    """T(l, 1) on H_1 for n = 2, via one-sharbly reduction of theta-images."""
    from .homology import build_complex

    if cx is None:
        cx = build_complex(2, level, field)
    if cx.level % ell == 0:
        from .errors import PreconditionError

        raise PreconditionError(f"l = {ell} divides N = {level}")
    op = hecke_cosets(2, ell, 1)
    f = cx.field
    h1 = homology(cx, 1)
    columns = []
    for j, rep_vec in enumerate(h1.homology_reps):
        _, s_chain = _theta_s(cx, op, rep_vec)
        result = one_sharbly_reduce_n2(cx, s_chain, budget)
        if isinstance(result, Undetermined):
            return Undetermined(f"column {j}: {result.reason}")
        y_vec = list(result.w1_coords)
        if not is_cycle(cx, 1, y_vec):
            raise InternalCheckError("reduced image is not a cycle")
        columns.append(express_cycle(h1, y_vec))
    dim = h1.dimension
    matrix = tuple(tuple(columns[j][i] for j in range(dim)) for i in range(dim))
    return _eigen_report(cx, ell, 1, 1, matrix)
