"""Differential refinements of (twisted) cohomology.

A datum consists of integral cochains E, rational cochains M, the inclusion
ι : E → M and the naive truncation N = M^{≥n}.  The differential complex is
the homotopy pullback

    P^j = E^j ⊕ N^j ⊕ M^{j-1},   d(c, ω, h) = (dc, dω, ω - ιc - dh),

and the differential group in degree m is H^{n+m}(P), so m = 0 is the group
refining H^n(X; Z).  Twisted data use (C* ⊗ A, d + τ) with an integral τ.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg as la
from .algebra import GradedAlgebra, preset
from .cochains import Cochain, TensorCochains
from .complexes import (INTEGERS, RATIONALS, ComplexError, ComplexMap, CochainComplex, SpotReport,
                        Subquotient, check_exact_sequence, cohomology, homotopy_pullback,
                        mayer_vietoris_sequence, shift, truncate_connective, truncate_geq)
from .groups import ZERO_GROUP, FgAbelianGroup
from .modules import MixedModule
from .simplicial import SimplicialComplex
from .twist import TwistingElement, check_cover


class DifferentialError(ComplexError):
    pass


class DifferentialDatum:
    """Cochain data (E, M, N = M^{≥n}) on a simplicial complex."""

    def __init__(self, X: SimplicialComplex, n: int, A: Optional[GradedAlgebra] = None,
                 tau: Optional[Cochain] = None, window: Optional[Tuple[int, int]] = None):
        self.X = X
        self.n = int(n)
        self.A = A or preset("q")
        if tau is not None and tau.is_zero():
            tau = None
        if tau is not None and not tau.is_integral():
            raise DifferentialError("twisted integral cochains need an integral twist")
        self.tau = tau
        self.T = TensorCochains(X, self.A, window)
        self.window = (self.T.lo, self.T.hi)

    @classmethod
    def ordinary(cls, X: SimplicialComplex, n: int) -> "DifferentialDatum":
        return cls(X, n)

    @classmethod
    def twisted(cls, X: SimplicialComplex, A: GradedAlgebra, tau, n: int,
                window: Tuple[int, int]) -> "DifferentialDatum":
        if isinstance(tau, TwistingElement):
            tau = tau.cochain
        return cls(X, n, A, tau, window)

    def at_level(self, n: int) -> "DifferentialDatum":
        """Same cochains, truncation at level n."""
        return DifferentialDatum(self.X, n, self.A, self.tau, self.window if not self.T.bounded else None)

    def restrict(self, U: SimplicialComplex) -> "DifferentialDatum":
        tau = None if self.tau is None else self.tau.restrict(U)
        return DifferentialDatum(U, self.n, self.A, tau, self.window if not self.T.bounded else None)

    @property
    def is_twisted(self) -> bool:
        return self.tau is not None

    # ------------------------------------------------------------------
    @cached_property
    def E(self) -> CochainComplex:
        return self.T.complex(self.tau, INTEGERS)

    @cached_property
    def M(self) -> CochainComplex:
        return self.T.complex(self.tau, RATIONALS)

    @cached_property
    def N(self) -> CochainComplex:
        return truncate_geq(self.M, self.n)

    @cached_property
    def iota(self) -> ComplexMap:
        return ComplexMap(self.E, self.M, {j: la.identity(self.T.dim(j)) for j in self.E.degrees}, check=False)

    @cached_property
    def incl(self) -> ComplexMap:
        return ComplexMap(self.N, self.M, {j: la.identity(self.N.dim(j)) for j in self.N.degrees
                                           if self.N.dim(j)}, check=False)

    @cached_property
    def P(self) -> CochainComplex:
        return homotopy_pullback(self.iota, self.incl)

    def check_degree(self, j: int):
        """H^j(P) reads E and M in degrees j-2..j+1."""
        valid = self.T.valid_degrees()
        if not self.T.bounded and not (j - 1 in valid and j in valid):
            raise DifferentialError(f"degree {j} too close to the window edge {self.window}")

    # block coordinates on P^j ------------------------------------------------
    def sizes(self, j: int) -> Tuple[int, int, int]:
        return self.E.dim(j), self.N.dim(j), self.M.dim(j - 1)

    def split(self, v: Sequence, j: int):
        e, nn, _ = self.sizes(j)
        v = list(v)
        c, w, h = v[:e], v[e:e + nn], v[e + nn:]
        if not nn:
            w = [Fraction(0)] * self.T.dim(j)
        return c, w, h

    def join(self, c, w, h, j: int) -> list:
        e, nn, m = self.sizes(j)
        c = list(c) if c is not None else [Fraction(0)] * e
        h = list(h) if h is not None else [Fraction(0)] * m
        if nn:
            w = list(w) if w is not None else [Fraction(0)] * nn
        else:
            if w is not None and any(w):
                raise DifferentialError(f"curvature in degree {j} lies below the truncation level {self.n}")
            w = []
        return [Fraction(x) for x in c + w + h]

    def keys(self, j: int) -> list:
        """Labels (block, simplex, monomial) of the coordinates of P^j."""
        T = self.T
        out = [("E", s, m) for _, s, m in T.basis(j)]
        if self.N.dim(j):
            out += [("N", s, m) for _, s, m in T.basis(j)]
        return out + [("M", s, m) for _, s, m in T.basis(j - 1)]

    def cochain(self, v: Sequence, j: int) -> Cochain:
        return self.T.from_vector(v, j)


def diff_group(datum: DifferentialDatum, m: int = 0) -> FgAbelianGroup:
    """H^{n+m} of the pullback complex."""
    j = datum.n + m
    datum.check_degree(j)
    return cohomology(datum.P, j)


@dataclass
class DiffCocycle:
    """A cocycle (c, ω, h) of P^{n+m} for a datum."""

    datum: DifferentialDatum
    vector: list
    m: int = 0

    def __post_init__(self):
        j = self.degree
        d = self.datum.P.d(j)
        if d and any(sum(r[i] * self.vector[i] for i in range(len(self.vector))) for r in d):
            raise DifferentialError("triple is not a cocycle")

    @property
    def degree(self) -> int:
        return self.datum.n + self.m

    def parts(self):
        return self.datum.split(self.vector, self.degree)

    def curv(self) -> Cochain:
        return self.datum.cochain(self.parts()[1], self.degree)

    def underlying(self) -> Cochain:
        return self.datum.cochain(self.parts()[0], self.degree)

    def form(self) -> Cochain:
        return self.datum.cochain(self.parts()[2], self.degree - 1)

    def equivalent(self, other: "DiffCocycle") -> bool:
        if self.datum.n != other.datum.n or self.degree != other.degree:
            return False
        diff = [a - b for a, b in zip(self.vector, other.vector)]
        return self.datum.P.coboundaries(self.degree).contains(diff)


def a_map(datum: DifferentialDatum, h: Sequence, m: int = 0) -> DiffCocycle:
    """a(h) = (0, dh, h) for h ∈ M^{n+m-1}."""
    j = datum.n + m
    dh = la.matvec(datum.M.d(j - 1), list(h)) if datum.M.dim(j) else []
    return DiffCocycle(datum, datum.join(None, dh, h, j), m)


def lift_integral(datum: DifferentialDatum, c: Sequence, m: int = 0) -> DiffCocycle:
    """(c, ιc, 0) for an integral cocycle c with n+m at or above the truncation level."""
    j = datum.n + m
    return DiffCocycle(datum, datum.join(c, c, None, j), m)


def unit(datum: DifferentialDatum) -> DiffCocycle:
    """(1, 1, 0) in the level-0 ordinary datum."""
    if datum.n != 0 or datum.is_twisted:
        raise DifferentialError("the unit lives in the untwisted level-0 datum")
    one = datum.T.to_vector(Cochain.unit(datum.X, datum.A), 0)
    return lift_integral(datum, one)


def _promote(x: Cochain, A: GradedAlgebra) -> Cochain:
    if x.A is A:
        return x
    if x.A.ngens:
        raise DifferentialError("only untwisted rational cochains can act on a twisted datum")
    return Cochain(x.X, A, {(s, A.unit_monomial()): c for (s, _), c in x.terms.items()})


def product(x: DiffCocycle, y: DiffCocycle) -> DiffCocycle:
    """(c, ω, h)(c', ω', h') = (cc', ωω', hω' + (-1)^{|c|} c h').

    y must come from an untwisted datum on the same complex; the result
    lives in x's datum at level n_x + n_y."""
    if y.datum.is_twisted:
        raise DifferentialError("right factor must be untwisted")
    if x.datum.X is not y.datum.X and not x.datum.X.same_simplices(y.datum.X):
        raise DifferentialError("factors live on different complexes")
    A = x.datum.A
    c, w, h = x.underlying(), x.curv(), x.form()
    c2, w2, h2 = (_promote(z, A) for z in (y.underlying(), y.curv(), y.form()))
    sign = -1 if x.degree % 2 else 1
    target = x.datum.at_level(x.datum.n + y.datum.n)
    j = x.degree + y.degree
    T = target.T
    cc = T.to_vector(c.cup(c2), j)
    ww = T.to_vector(w.cup(w2), j)
    hh = T.to_vector(h.cup(w2) + c.cup(h2).scale(sign), j - 1)
    return DiffCocycle(target, target.join(cc, ww, hh, j), x.m + y.m)


def random_cocycle(datum: DifferentialDatum, rng: random.Random, m: int = 0, spread: int = 3) -> DiffCocycle:
    j = datum.n + m
    z, q = datum.P.cocycles(j).generators()
    v = [Fraction(0)] * datum.P.dim(j)
    for g in z:
        a = rng.randint(-spread, spread)
        v = [x + a * y for x, y in zip(v, g)]
    for g in q:
        a = Fraction(rng.randint(-spread, spread), rng.randint(1, spread))
        v = [x + a * y for x, y in zip(v, g)]
    return DiffCocycle(datum, v, m)


# --------------------------------------------------------------------------
# structural checks

@dataclass
class DifferentialReport:
    first: List[SpotReport]
    second: List[SpotReport]
    square: bool
    curvature_of_a: bool
    module_rule: List[bool] = field(default_factory=list)
    groups: Dict[str, FgAbelianGroup] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return (all(s.ok for s in self.first + self.second) and self.square and self.curvature_of_a
                and all(self.module_rule))

    def to_json(self):
        return {
            "ok": self.ok,
            "first_sequence": [s.to_json() for s in self.first],
            "second_sequence": [s.to_json() for s in self.second],
            "square_commutes": self.square,
            "curvature_of_a_is_d": self.curvature_of_a,
            "module_rule": self.module_rule,
            "groups": {k: g.to_json() for k, g in self.groups.items()},
        }


def _full(dim: int, integral: bool) -> MixedModule:
    return MixedModule.full(dim, (integral,) * dim)


def _fiber_product(datum: DifferentialDatum) -> Subquotient:
    """Z^0(M) ×_{H^0(M)} R^E inside N^n ⊕ E^n (rational then integral coordinates)."""
    j = datum.n
    M, E = datum.M, datum.E
    k = datum.T.dim(j)
    amb = MixedModule.full(2 * k, (False,) * k + (True,) * k)
    closed = amb.kernel(la.block_matrix([[M.d(j), None], [None, E.d(j)]],
                                        [M.dim(j + 1), E.dim(j + 1)], [k, k]), 2 * M.dim(j + 1))
    # ω - ιc must be exact
    diff = [[(Fraction(1) if c == r else Fraction(0)) for c in range(k)] +
            [(Fraction(-1) if c == r else Fraction(0)) for c in range(k)] for r in range(k)]
    Z = closed.preimage(diff, M.coboundaries(j), k)
    B = MixedModule.from_generators(2 * k, z_gens=[[Fraction(0)] * k + list(g) for g in E.coboundaries(j).generators()[0]])
    return Subquotient(2 * k, Z, B, "Z^0(M) x_H R^E")


def verify_sequences(datum: DifferentialDatum, partner_levels: Sequence[int] = (0, 1), pairs: int = 10,
                     seed: int = 0) -> DifferentialReport:
    """Both exact sequences through the differential group, the curvature
    square, curv ∘ a = d and the module rule a(η) ∪ x = a(η ∪ curv x)."""
    n = datum.n
    datum.check_degree(n)
    E, M, P = datum.E, datum.M, datum.P
    e1, k = E.dim(n - 1), datum.T.dim(n)

    HP_prev = Subquotient.cohomology_of(P, n - 1, "H^{-1}(P)")
    RE_prev = Subquotient.cohomology_of(E, n - 1, "R^{E-1}")
    Mquot = Subquotient(M.dim(n - 1), _full(M.dim(n - 1), False), M.coboundaries(n - 1), "M^{-1}/im d")
    HM_prev = Subquotient.cohomology_of(M, n - 1, "H^{-1}(M)")
    Rhat = Subquotient.cohomology_of(P, n, "R-hat")
    RE = Subquotient.cohomology_of(E, n, "R^E")
    zero = Subquotient.trivial()
    F = _fiber_product(datum)

    pe, pn, pm = datum.sizes(n - 1)
    proj_prev = [[Fraction(1) if c == r else Fraction(0) for c in range(pe + pn + pm)] for r in range(e1)]
    iota_prev = la.identity(e1)
    a_mat = _a_matrix(datum)
    I_mat = [[Fraction(1) if c == r else Fraction(0) for c in range(P.dim(n))] for r in range(k)]
    pair_mat = _curv_and_I(datum)

    first = check_exact_sequence([HP_prev, RE_prev, Mquot, Rhat, RE, zero],
                                 [proj_prev, iota_prev, a_mat, I_mat, la.zeros(0, k)])
    second = check_exact_sequence([HP_prev, RE_prev, HM_prev, Rhat, F, zero],
                                  [proj_prev, iota_prev, a_mat, pair_mat, la.zeros(0, 2 * k)])

    square = True
    Bm = M.coboundaries(n)
    for g in sum(P.cocycles(n).generators(), []):
        c, w, _ = datum.split(g, n)
        if not Bm.contains([a - b for a, b in zip(w, c)]):
            square = False

    curv_a = True
    for i in range(M.dim(n - 1)):
        h = [Fraction(int(i == t)) for t in range(M.dim(n - 1))]
        x = a_map(datum, h)
        dh = la.matvec(M.d(n - 1), h)
        if list(x.curv().terms.items()) and datum.T.to_vector(x.curv(), n) != dh:
            curv_a = False
        if not x.curv().terms and any(dh):
            curv_a = False

    rng = random.Random(seed)
    rule = []
    ordinary = [DifferentialDatum.ordinary(datum.X, lv) for lv in partner_levels
                if n + lv <= datum.X.dim + 1]
    for t in range(pairs if ordinary else 0):
        other = ordinary[t % len(ordinary)]
        x = random_cocycle(other, rng)
        eta = [Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(M.dim(n - 1))]
        lhs = product(a_map(datum, eta), x)
        target = lhs.datum
        j = target.n
        rhs_h = datum.T.to_vector(datum.cochain(eta, n - 1).cup(_promote(x.curv(), datum.A)), j - 1)
        rhs = a_map(target, rhs_h)
        rule.append(lhs.equivalent(rhs))

    groups = {g.name: g.group() for g in (RE_prev, Mquot, HM_prev, Rhat, RE, F)}
    return DifferentialReport(first, second, square, curv_a, rule, groups)


def _a_matrix(datum: DifferentialDatum) -> list:
    n = datum.n
    m = datum.M.dim(n - 1)
    cols = [a_map(datum, [Fraction(int(i == t)) for t in range(m)]).vector for i in range(m)]
    return la.transpose(cols, datum.P.dim(n)) if cols else la.zeros(datum.P.dim(n), 0)


def _curv_and_I(datum: DifferentialDatum) -> list:
    """P^n → N^n ⊕ E^n, (c, ω, h) ↦ (ω, c)."""
    n = datum.n
    e, nn, m = datum.sizes(n)
    k = datum.T.dim(n)
    rows = []
    for r in range(k):
        rows.append([Fraction(int(c == e + r)) if nn else Fraction(0) for c in range(e + nn + m)])
    for r in range(k):
        rows.append([Fraction(int(c == r)) for c in range(e + nn + m)])
    return rows


# --------------------------------------------------------------------------
# truncated differential spectra

def qz_cohomology(E: CochainComplex, j: int) -> FgAbelianGroup:
    """H^j(E ⊗ Q/Z) = (Q/Z)^{rank H^j(E)} ⊕ tors H^{j+1}(E) for free E."""
    if j < E.lo - 1 or j > E.hi:
        return ZERO_GROUP
    a = cohomology(E, j) if E.lo <= j else ZERO_GROUP
    b = cohomology(E, j + 1) if j + 1 <= E.hi else ZERO_GROUP
    return FgAbelianGroup(0, b.torsion, 0, a.free)


def diff_nk_complex(datum: DifferentialDatum, n: int, k: int) -> CochainComplex:
    """Connective cover of the level-(n-k) pullback complex, shifted so that
    degree -i carries π_i."""
    P = datum.at_level(n - k).P
    return truncate_connective(shift(P, n), 0)


def diff_nk(datum: DifferentialDatum, n: int, k: int, i: int) -> FgAbelianGroup:
    """π_i of the differential spectrum truncated at n - k."""
    if i < 0:
        return ZERO_GROUP
    datum.check_degree(n - i)
    C = diff_nk_complex(datum, n, k)
    return cohomology(C, -i) if C.lo <= -i <= C.hi else ZERO_GROUP


@dataclass
class TableRow:
    i: int
    computed: FgAbelianGroup
    expected: FgAbelianGroup
    kind: str

    @property
    def ok(self) -> bool:
        return self.computed == self.expected

    def to_json(self):
        return {"i": self.i, "kind": self.kind, "computed": self.computed.to_json(),
                "expected": self.expected.to_json(), "ok": self.ok}


def diff_nk_table(datum: DifferentialDatum, n: int, k: int, i_range: Optional[Sequence[int]] = None) -> List[TableRow]:
    """π_i against the integral, differential and Q/Z rows."""
    E = datum.E
    if i_range is None:
        i_range = range(-1, n + 2)
    rows = []
    for i in i_range:
        got = diff_nk(datum, n, k, i)
        if i < 0:
            exp, kind = ZERO_GROUP, "zero"
        elif i < k:
            exp, kind = (cohomology(E, n - i) if E.lo <= n - i <= E.hi else ZERO_GROUP), "integral"
        elif i == k:
            exp, kind = diff_group(datum.at_level(n - k), 0), "differential"
        else:
            exp, kind = qz_cohomology(E, n - i - 1), "flat"
        rows.append(TableRow(i, got, exp, kind))
    return rows


def natural_map_isos(datum: DifferentialDatum, n: int, k: int, i_range: Sequence[int]) -> Dict[int, bool]:
    """Whether the map induced by N^{≥n-k} ⊆ N^{≥n-k-1} is an isomorphism on π_i."""
    small, big = datum.at_level(n - k), datum.at_level(n - k - 1)
    mats = {}
    for j in small.P.degrees:
        rows = [[Fraction(0)] * small.P.dim(j) for _ in range(big.P.dim(j))]
        sk, bk = small.keys(j), {key: r for r, key in enumerate(big.keys(j))}
        for col, key in enumerate(sk):
            rows[bk[key]][col] = Fraction(1)
        mats[j] = rows
    f = ComplexMap(small.P, big.P, mats)
    out = {}
    for i in i_range:
        if i < 0:
            out[i] = True
            continue
        out[i] = f.induced_on_cohomology_is_iso(n - i)
    return out


# --------------------------------------------------------------------------
# Mayer-Vietoris

@dataclass
class DifferentialMV:
    spots: list
    groups: Dict[str, FgAbelianGroup]

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.spots)

    def to_json(self):
        return {"ok": self.ok, "spots": [s.to_json() for s in self.spots],
                "groups": {k: g.to_json() for k, g in self.groups.items()}}


def _key_restriction(src: DifferentialDatum, tgt: DifferentialDatum, j: int) -> list:
    idx = {key: r for r, key in enumerate(tgt.keys(j))}
    M = la.zeros(len(idx), src.P.dim(j))
    for col, key in enumerate(src.keys(j)):
        r = idx.get(key)
        if r is not None:
            M[r][col] = Fraction(1)
    return M


def _key_glue(X: DifferentialDatum, U: DifferentialDatum, V: DifferentialDatum, j: int) -> list:
    iu = {key: r for r, key in enumerate(U.keys(j))}
    iv = {key: r for r, key in enumerate(V.keys(j))}
    du = U.P.dim(j)
    M = la.zeros(X.P.dim(j), du + V.P.dim(j))
    for row, key in enumerate(X.keys(j)):
        if key in iu:
            M[row][iu[key]] = Fraction(1)
        else:
            M[row][du + iv[key]] = Fraction(1)
    return M


def mv_differential(datum: DifferentialDatum, U: SimplicialComplex, V: SimplicialComplex,
                    degrees: Optional[Sequence[int]] = None) -> DifferentialMV:
    """Long exact sequence of pullback cohomology for a cover X = U ∪ V.

    The default degrees n-2 .. n run through the flat rows, the differential
    row and into the integral row."""
    problems = check_cover(datum.X, U, V)
    if problems:
        raise DifferentialError(problems[0])
    W = U.intersection(V)
    DU, DV, DW = datum.restrict(U), datum.restrict(V), datum.restrict(W)
    if degrees is None:
        degrees = [j for j in range(datum.n - 2, datum.n + 1) if j >= datum.P.lo]
    for j in degrees:
        datum.check_degree(j)
        datum.check_degree(j + 1)
    spots, groups = mayer_vietoris_sequence(
        datum.P, DU.P, DV.P, DW.P,
        lambda j: _key_restriction(datum, DU, j), lambda j: _key_restriction(datum, DV, j),
        lambda j: _key_restriction(DU, DW, j), lambda j: _key_restriction(DV, DW, j),
        lambda j: _key_glue(datum, DU, DV, j), degrees)
    return DifferentialMV(spots, groups)
