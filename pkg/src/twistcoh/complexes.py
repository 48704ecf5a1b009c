"""Bounded cochain complexes over Q, Z, or mixtures of both.

A component C^n is Z^a + Q^b; which coordinates are integral is recorded
per degree (``int_mask``).  Pure rational and pure integral complexes are
the common cases and get fast paths.  Differentials are dense matrices
(lists of rows) mapping C^n -> C^{n+1}.

The optional filtration is split: each basis vector carries a filtration
degree, and F^p is spanned by the basis vectors of degree >= p.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Sequence

from . import linalg as la
from .groups import FgAbelianGroup
from .modules import MixedModule

RATIONALS = "Q"
INTEGERS = "Z"
MIXED = "mixed"


class ComplexError(ValueError):
    pass


class InvariantViolation(AssertionError):
    """An internal identity (d∘d = 0, chain map, ...) failed."""


def smith_normal_form(M):
    """(U, D, V) with U M V = D, see :func:`linalg.smith_normal_form`."""
    return la.smith_normal_form(M)


class CochainComplex:
    def __init__(self, ring: str, lo: int, dims: Sequence[int], diffs: Dict[int, list],
                 int_masks: Optional[Dict[int, Sequence[bool]]] = None,
                 filtration: Optional[Dict[int, Sequence[int]]] = None, check: bool = True):
        if ring not in (RATIONALS, INTEGERS, MIXED):
            raise ComplexError(f"unknown ring {ring!r}")
        self.ring = ring
        self.lo = lo
        self.dims = tuple(dims)
        self.hi = lo + len(self.dims) - 1
        self._d = {}
        for n in range(lo, self.hi):
            M = diffs.get(n)
            rows, cols = self.dim(n + 1), self.dim(n)
            if M is None:
                M = la.zeros(rows, cols)
            else:
                M = [[Fraction(x) for x in row] for row in M]
            if len(M) != rows or any(len(r) != cols for r in M):
                raise ComplexError(f"d^{n} has wrong shape")
            self._d[n] = M
        if ring == MIXED:
            if int_masks is None:
                raise ComplexError("mixed complexes need integrality masks")
            self.int_masks = {n: tuple(bool(x) for x in int_masks.get(n, ())) + (False,) * 0
                              for n in range(lo, self.hi + 1)}
            for n in range(lo, self.hi + 1):
                if len(self.int_masks[n]) != self.dim(n):
                    raise ComplexError(f"integrality mask in degree {n} has wrong length")
        else:
            flag = ring == INTEGERS
            self.int_masks = {n: (flag,) * self.dim(n) for n in range(lo, self.hi + 1)}
        self.filtration = None if filtration is None else {n: tuple(filtration[n]) for n in range(lo, self.hi + 1)}
        if check:
            self._check()

    # ------------------------------------------------------------------
    def _check(self):
        for n in range(self.lo, self.hi - 1):
            if not la.is_zero_matrix(la.matmul(self._d[n + 1], self._d[n], ncols=self.dim(n))):
                raise InvariantViolation(f"d^{n + 1} o d^{n} != 0")
        for n in range(self.lo, self.hi):
            M = self._d[n]
            tgt, src = self.int_masks[n + 1], self.int_masks[n]
            for i, row in enumerate(M):
                for j, x in enumerate(row):
                    if not x:
                        continue
                    if tgt[i] and not src[j]:
                        raise ComplexError(f"d^{n} maps a rational coordinate to an integral one")
                    if tgt[i] and src[j] and x.denominator != 1:
                        raise ComplexError(f"d^{n} has a non-integral entry between integral coordinates")
        if self.filtration is not None:
            for n in range(self.lo, self.hi + 1):
                if len(self.filtration[n]) != self.dim(n):
                    raise ComplexError(f"filtration in degree {n} has wrong length")
            for n in range(self.lo, self.hi):
                M = self._d[n]
                fs, ft = self.filtration[n], self.filtration[n + 1]
                for i, row in enumerate(M):
                    for j, x in enumerate(row):
                        if x and ft[i] < fs[j]:
                            raise InvariantViolation(f"d^{n} lowers filtration")

    def dim(self, n: int) -> int:
        if n < self.lo or n > self.hi:
            return 0
        return self.dims[n - self.lo]

    def d(self, n: int) -> list:
        if self.lo <= n < self.hi:
            return self._d[n]
        return la.zeros(self.dim(n + 1), self.dim(n))

    def int_mask(self, n: int) -> tuple:
        return self.int_masks.get(n, ())

    def filt(self, n: int) -> tuple:
        if self.filtration is None:
            return (0,) * self.dim(n)
        return self.filtration.get(n, ())

    @property
    def degrees(self):
        return range(self.lo, self.hi + 1)

    def __repr__(self):
        return f"CochainComplex({self.ring}, degrees {self.lo}..{self.hi}, dims {list(self.dims)})"

    # ------------------------------------------------------------------
    def full_module(self, n: int) -> MixedModule:
        return MixedModule.full(self.dim(n), self.int_mask(n))

    def cocycles(self, n: int) -> MixedModule:
        return self.full_module(n).kernel(self.d(n), self.dim(n + 1))

    def coboundaries(self, n: int) -> MixedModule:
        return self.full_module(n - 1).image(self.d(n - 1), self.dim(n))

    def betti(self, n: int) -> int:
        """Rational dimension of H^n (of C tensor Q)."""
        dn = self.dim(n)
        if dn == 0:
            return 0
        return dn - la.rank(self.d(n)) - la.rank(self.d(n - 1))

    def cohomology(self, n: int) -> FgAbelianGroup:
        return cohomology(self, n)

    def cocycle_basis(self, n: int) -> list:
        """Rational basis of Z^n (canonical, from RREF)."""
        return la.nullspace(self.d(n), self.dim(n)) if self.dim(n) else []

    def coboundary_rref(self, n: int):
        if self.dim(n - 1) == 0 or self.dim(n) == 0:
            return [], []
        R = la.span_basis(la.transpose(self.d(n - 1)), self.dim(n))
        return R, la.pivots_of(R)

    def tensor_rationals(self) -> "CochainComplex":
        return CochainComplex(RATIONALS, self.lo, self.dims, self._d, filtration=self.filtration, check=False)


def zero_complex(ring: str = RATIONALS) -> CochainComplex:
    return CochainComplex(ring, 0, [0], {})


def cohomology(C: CochainComplex, n: int) -> FgAbelianGroup:
    """H^n(C) as an abelian group in normal form."""
    if C.dim(n) == 0:
        return FgAbelianGroup()
    if C.ring == RATIONALS:
        # vector space: ``free`` carries the dimension
        return FgAbelianGroup(C.betti(n))
    if C.ring == INTEGERS:
        dn = C.dim(n)
        rk_out = la.rank(C.d(n))
        prev = C.d(n - 1)
        facs = la.invariant_factors([[int(x) for x in row] for row in prev], dn, C.dim(n - 1)) if C.dim(n - 1) else []
        free = dn - rk_out - len(facs)
        return FgAbelianGroup.from_orders(free, [d for d in facs if d > 1])
    return C.cocycles(n).quotient_structure(C.coboundaries(n))


def rational_dimension(G: FgAbelianGroup) -> int:
    return G.free + G.rational


# --------------------------------------------------------------------------

class ComplexMap:
    """Chain map given by per-degree matrices (target.dim(n) x source.dim(n))."""

    def __init__(self, source: CochainComplex, target: CochainComplex, mats: Dict[int, list], check: bool = True):
        self.source = source
        self.target = target
        self.mats = {}
        for n in range(min(source.lo, target.lo), max(source.hi, target.hi) + 1):
            M = mats.get(n)
            if M is None:
                M = la.zeros(target.dim(n), source.dim(n))
            else:
                M = [[Fraction(x) for x in row] for row in M]
            if len(M) != target.dim(n) or any(len(r) != source.dim(n) for r in M):
                raise ComplexError(f"map matrix in degree {n} has wrong shape")
            self.mats[n] = M
        if check:
            self._check()

    def __getitem__(self, n: int) -> list:
        if n in self.mats:
            return self.mats[n]
        return la.zeros(self.target.dim(n), self.source.dim(n))

    def _check(self):
        S, T = self.source, self.target
        for n in self.mats:
            lhs = _compose(self[n + 1], S.d(n), T.dim(n + 1), S.dim(n))
            rhs = _compose(T.d(n), self[n], T.dim(n + 1), S.dim(n))
            if lhs != rhs:
                raise InvariantViolation(f"not a chain map in degree {n}")
            M = self[n]
            tm, sm = T.int_mask(n), S.int_mask(n)
            for i, row in enumerate(M):
                for j, x in enumerate(row):
                    if x and tm[i] and (not sm[j] or x.denominator != 1):
                        raise ComplexError(f"map in degree {n} is not Z-linear into integral coordinates")

    def induced_on_cohomology_is_iso(self, n: int) -> bool:
        from .modules import subquotient_iso

        S, T = self.source, self.target
        return subquotient_iso(S.cocycles(n), S.coboundaries(n), T.cocycles(n), T.coboundaries(n), self[n], T.dim(n))


def _compose(A, B, m, n):
    """A @ B as an m x n matrix, tolerating empty inner dimensions."""
    if m == 0:
        return []
    if not B or n == 0:
        return la.zeros(m, n)
    return la.matmul(A, B, ncols=n)


def identity_map(C: CochainComplex) -> ComplexMap:
    return ComplexMap(C, C, {n: la.identity(C.dim(n)) for n in C.degrees})


def _mixed_ring(*rings) -> str:
    rs = set(rings)
    if rs == {RATIONALS}:
        return RATIONALS
    if rs == {INTEGERS}:
        return INTEGERS
    return MIXED


def direct_sum(*Cs: CochainComplex) -> CochainComplex:
    lo = min(C.lo for C in Cs)
    hi = max(C.hi for C in Cs)
    dims, diffs, masks, filt = [], {}, {}, {}
    has_filt = all(C.filtration is not None for C in Cs)
    for n in range(lo, hi + 1):
        dims.append(sum(C.dim(n) for C in Cs))
        masks[n] = sum((tuple(C.int_mask(n)) for C in Cs), ())
        if has_filt:
            filt[n] = sum((tuple(C.filt(n)) for C in Cs), ())
    for n in range(lo, hi):
        diffs[n] = la.block_matrix([[C.d(n) if C is D else None for D in Cs] for C in Cs],
                                   [C.dim(n + 1) for C in Cs], [C.dim(n) for C in Cs])
    ring = _mixed_ring(*(C.ring for C in Cs))
    return CochainComplex(ring, lo, dims, diffs, int_masks=masks if ring == MIXED else None,
                          filtration=filt if has_filt else None)


def shift(C: CochainComplex, k: int) -> CochainComplex:
    """C[k]: degree n of the result is degree n + k of C (differential unchanged)."""
    diffs = {n - k: C.d(n) for n in range(C.lo, C.hi)}
    masks = {n - k: C.int_mask(n) for n in C.degrees}
    filt = None if C.filtration is None else {n - k: C.filt(n) for n in C.degrees}
    return CochainComplex(C.ring, C.lo - k, C.dims, diffs, int_masks=masks if C.ring == MIXED else None,
                          filtration=filt, check=False)


def cone(f: ComplexMap) -> CochainComplex:
    """Mapping cone: cone^n = X^{n+1} + Y^n, d(x, y) = (-dx, f x + dy)."""
    X, Y = f.source, f.target
    lo = min(X.lo - 1, Y.lo)
    hi = max(X.hi - 1, Y.hi)
    dims, diffs, masks = [], {}, {}
    for n in range(lo, hi + 1):
        dims.append(X.dim(n + 1) + Y.dim(n))
        masks[n] = tuple(X.int_mask(n + 1)) + tuple(Y.int_mask(n))
    for n in range(lo, hi):
        negdx = [[-x for x in row] for row in X.d(n + 1)]
        diffs[n] = la.block_matrix([[negdx, None], [f[n + 1], Y.d(n)]],
                                   [X.dim(n + 2), Y.dim(n + 1)], [X.dim(n + 1), Y.dim(n)])
    ring = _mixed_ring(X.ring, Y.ring)
    return CochainComplex(ring, lo, dims, diffs, int_masks=masks if ring == MIXED else None)


def homotopy_pullback(f: ComplexMap, g: ComplexMap) -> CochainComplex:
    """Chain-level homotopy pullback of X -f-> Z <-g- Y.

    P^n = X^n + Y^n + Z^{n-1} with d(x, y, z) = (dx, dy, g y - f x - dz).
    Cocycles in degree n are triples with g y = f x + dz.
    """
    if f.target is not g.target and (f.target.dims != g.target.dims or f.target.lo != g.target.lo):
        raise ComplexError("maps do not share a target")
    X, Y, Zc = f.source, g.source, f.target
    lo = min(X.lo, Y.lo, Zc.lo + 1)
    hi = max(X.hi, Y.hi, Zc.hi + 1)
    dims, diffs, masks = [], {}, {}
    for n in range(lo, hi + 1):
        dims.append(X.dim(n) + Y.dim(n) + Zc.dim(n - 1))
        masks[n] = tuple(X.int_mask(n)) + tuple(Y.int_mask(n)) + tuple(Zc.int_mask(n - 1))
    for n in range(lo, hi):
        negf = [[-x for x in row] for row in f[n]]
        negdz = [[-x for x in row] for row in Zc.d(n - 1)]
        diffs[n] = la.block_matrix(
            [[X.d(n), None, None], [None, Y.d(n), None], [negf, g[n], negdz]],
            [X.dim(n + 1), Y.dim(n + 1), Zc.dim(n)], [X.dim(n), Y.dim(n), Zc.dim(n - 1)])
    ring = _mixed_ring(X.ring, Y.ring, Zc.ring)
    return CochainComplex(ring, lo, dims, diffs, int_masks=masks if ring == MIXED else None)


def homotopy_pullback_h0(f: ComplexMap, g: ComplexMap) -> FgAbelianGroup:
    return cohomology(homotopy_pullback(f, g), 0)


def truncate_geq(C: CochainComplex, n: int) -> CochainComplex:
    """Naive truncation: drop all degrees below n."""
    if n <= C.lo:
        return C
    if n > C.hi:
        return CochainComplex(C.ring, n, [0], {}, int_masks={n: ()} if C.ring == MIXED else None,
                              filtration={n: ()} if C.filtration is not None else None)
    dims = [C.dim(m) for m in range(n, C.hi + 1)]
    diffs = {m: C.d(m) for m in range(n, C.hi)}
    masks = {m: C.int_mask(m) for m in range(n, C.hi + 1)}
    filt = None if C.filtration is None else {m: C.filt(m) for m in range(n, C.hi + 1)}
    return CochainComplex(C.ring, n, dims, diffs, int_masks=masks if C.ring == MIXED else None,
                          filtration=filt, check=False)


def truncate_connective(C: CochainComplex, top: int = 0) -> CochainComplex:
    """Smart truncation keeping degrees <= top with Z^top in the top degree.

    In homotopical grading this is the connective cover: cohomology in
    degrees <= top is unchanged and everything above vanishes.  The new top
    component is Z^top re-coordinatized by its canonical generators
    (lattice generators integral, subspace generators rational).
    """
    if top < C.lo:
        return CochainComplex(C.ring, top, [0], {}, int_masks={top: ()} if C.ring == MIXED else None)
    Zt = C.cocycles(top)
    z, q = Zt.generators()
    basis = z + q
    dims = [C.dim(m) for m in range(C.lo, top)] + [len(basis)]
    masks = {m: C.int_mask(m) for m in range(C.lo, top)}
    masks[top] = (True,) * len(z) + (False,) * len(q)
    diffs = {m: C.d(m) for m in range(C.lo, top - 1)}
    if top - 1 >= C.lo:
        D = C.d(top - 1)
        B = la.transpose(basis, C.dim(top)) if basis else [[] for _ in range(C.dim(top))]
        cols = []
        for j in range(C.dim(top - 1)):
            col = [row[j] for row in D]
            c = la.solve(B, col, len(basis))
            if c is None:
                raise InvariantViolation("image of d not inside the cocycles")
            cols.append(c)
        diffs[top - 1] = la.transpose(cols, len(basis)) if cols else la.zeros(len(basis), 0)
    ring = C.ring
    if ring == RATIONALS and z:
        ring = MIXED
    if ring == INTEGERS and q:
        ring = MIXED
    if ring == MIXED:
        return CochainComplex(MIXED, C.lo, dims, diffs, int_masks=masks)
    return CochainComplex(ring, C.lo, dims, diffs)


# --------------------------------------------------------------------------
# subquotients and exactness

@dataclass
class Subquotient:
    """A group presented as Z/B inside an ambient Z^a + Q^b."""

    ambient: int
    Z: MixedModule
    B: MixedModule
    name: str = ""

    @classmethod
    def cohomology_of(cls, C: CochainComplex, n: int, name: str = "") -> "Subquotient":
        return cls(C.dim(n), C.cocycles(n), C.coboundaries(n), name or f"H^{n}")

    @classmethod
    def trivial(cls, name: str = "0") -> "Subquotient":
        return cls(0, MixedModule.zero(0), MixedModule.zero(0), name)

    def group(self) -> FgAbelianGroup:
        return self.Z.quotient_structure(self.B)

    def is_zero_class(self, v) -> bool:
        return self.B.contains(v)


@dataclass
class SpotReport:
    name: str
    well_defined: bool
    composite_zero: bool
    exact: bool

    @property
    def ok(self) -> bool:
        return self.well_defined and self.composite_zero and self.exact

    def to_json(self):
        return {"spot": self.name, "well_defined": self.well_defined, "composite_zero": self.composite_zero,
                "exact": self.exact, "pass": self.ok}


def check_exact_at(A: Subquotient, f, Bq: Subquotient, g, C: Subquotient, name: str = "") -> SpotReport:
    """Exactness of A -f-> B -g-> C at B, with f, g chain-level matrices."""
    fZ = A.Z.image(f, Bq.ambient) if A.ambient else MixedModule.zero(Bq.ambient)
    fB = A.B.image(f, Bq.ambient) if A.ambient else MixedModule.zero(Bq.ambient)
    gZ = Bq.Z.image(g, C.ambient) if Bq.ambient else MixedModule.zero(C.ambient)
    gB = Bq.B.image(g, C.ambient) if Bq.ambient else MixedModule.zero(C.ambient)
    well = fZ <= Bq.Z and fB <= Bq.B and gZ <= C.Z and gB <= C.B
    im_f = fZ + Bq.B
    ker_g = Bq.Z.preimage(g, C.B, C.ambient) if Bq.ambient else Bq.Z
    return SpotReport(name or Bq.name, well, im_f <= ker_g, ker_g <= im_f)


def check_exact_sequence(groups: Sequence[Subquotient], maps: Sequence[list], names=None):
    """Reports at every interior spot of groups[0] -> groups[1] -> ..."""
    out = []
    for i in range(1, len(groups) - 1):
        nm = names[i] if names else groups[i].name
        out.append(check_exact_at(groups[i - 1], maps[i - 1], groups[i], maps[i], groups[i + 1], nm))
    return out


def mayer_vietoris_sequence(CX: CochainComplex, CU: CochainComplex, CV: CochainComplex, CW: CochainComplex,
                            res_XU, res_XV, res_UW, res_VW, glue, degrees: Sequence[int]):
    """Exactness of H(X) → H(U) ⊕ H(V) → H(W) → H(X)[1] on the given degrees.

    ``res_*`` and ``glue`` are callables n ↦ matrix.  The first map is
    restriction, the second (u, v) ↦ u|W - v|W, and the connecting map is
    glue ∘ (D_U ∘ ext₀, 0) where ext₀ extends by zero from W to U (the
    transpose of the restriction) and glue is a left inverse of restriction.
    Returns (spot reports, {name: group}).
    """
    CUV = direct_sum(CU, CV)
    groups, maps = [], []
    degrees = list(degrees)
    for n in degrees:
        r = la.vstack(res_XU(n), res_XV(n)) if CX.dim(n) else la.zeros(CU.dim(n) + CV.dim(n), 0)
        wu, wv = res_UW(n), res_VW(n)
        diff = [list(a) + [-x for x in b] for a, b in zip(wu, wv)] if CW.dim(n) else la.zeros(0, CU.dim(n) + CV.dim(n))
        ext = la.transpose(wu, CU.dim(n)) if CW.dim(n) else la.zeros(CU.dim(n), 0)
        lifted = _compose(CU.d(n), ext, CU.dim(n + 1), CW.dim(n))
        stacked = lifted + la.zeros(CV.dim(n + 1), CW.dim(n))
        delta = _compose(glue(n + 1), stacked, CX.dim(n + 1), CW.dim(n))
        groups += [Subquotient.cohomology_of(CX, n, f"H^{n}(X)"),
                   Subquotient.cohomology_of(CUV, n, f"H^{n}(U)+H^{n}(V)"),
                   Subquotient.cohomology_of(CW, n, f"H^{n}(U∩V)")]
        maps += [r, diff, delta]
    last = degrees[-1] + 1
    groups.append(Subquotient.cohomology_of(CX, last, f"H^{last}(X)"))
    spots = check_exact_sequence(groups, maps)
    rational = CX.ring == RATIONALS
    out = {}
    for g in groups:
        G = g.group()
        out[g.name] = FgAbelianGroup(G.rational, G.torsion) if rational else G
    return spots, out
