"""Spectral sequence of a filtered cochain complex over Q, and recovery of
a twist from the differentials hitting the unit.

With F^p spanned by basis vectors of filtration >= p:

    Z_r^p = F^p ∩ D^{-1}(F^{p+r}),
    E_r^p = Z_r^p / (Z_{r-1}^{p+1} + D Z_{r-1}^{p-r+1}),
    d_r[x] = [Dx] : E_r^p -> E_r^{p+r}.

Entries are indexed by (p, n) with n the total degree, so q = n - p.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg as la
from .algebra import GradedAlgebra
from .cochains import Cochain, CohomologyClass, TensorCochains, class_of, class_representative
from .complexes import RATIONALS, CochainComplex, ComplexError, InvariantViolation
from .simplicial import SimplicialComplex
from .twist import TwistError, TwistingElement, mc_defect, twist_diagnostics
from .cochains import solve_d


class SpectralSequenceError(ValueError):
    pass


@dataclass
class _Entry:
    reps: list      # RREF complement rows, reduced modulo ``sub``
    sub: list       # RREF rows of the denominator
    sub_piv: list
    rep_piv: list

    @property
    def rank(self) -> int:
        return len(self.reps)


@dataclass
class SpectralPage:
    r: int
    ranks: Dict[Tuple[int, int], int]            # (p, q) -> rank
    differentials: Dict[Tuple[int, int], list]   # (p, q) -> matrix of d_r out of E_r^{p,q}

    def total_rank(self, n: int) -> int:
        return sum(v for (p, q), v in self.ranks.items() if p + q == n)

    def is_zero_differential(self) -> bool:
        return all(la.is_zero_matrix(M) for M in self.differentials.values())

    def to_json(self):
        return {
            "r": self.r,
            "ranks": [{"p": p, "q": q, "rank": v} for (p, q), v in sorted(self.ranks.items()) if v],
            "differentials": [{"p": p, "q": q, "matrix": [[_rat(x) for x in row] for row in M]}
                              for (p, q), M in sorted(self.differentials.items()) if not la.is_zero_matrix(M)],
        }


def _rat(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class SpectralSequence:
    """Pages of a filtered complex, computed on a set of total degrees.

    Only degrees strictly inside the complex's range are trusted (a window
    truncation loses boundaries at the bottom and cocycle conditions at the
    top), so the default degree set is lo+1 .. hi-1.
    """

    def __init__(self, C: CochainComplex, degrees: Optional[Sequence[int]] = None):
        if C.ring != RATIONALS:
            C = C.tensor_rationals()
        if C.filtration is None:
            raise SpectralSequenceError("complex carries no filtration")
        self.C = C
        levels = [f for n in C.degrees for f in C.filt(n)]
        self.pmin = min(levels, default=0)
        self.pmax = max(levels, default=0)
        self.degrees = list(degrees) if degrees is not None else list(range(C.lo + 1, C.hi))
        self._Z: Dict[tuple, list] = {}
        self._E: Dict[tuple, _Entry] = {}

    # ------------------------------------------------------------------
    @property
    def max_useful_page(self) -> int:
        return self.pmax - self.pmin + 1

    def filtration_indices(self, p: int, n: int) -> list:
        return [i for i, f in enumerate(self.C.filt(n)) if f >= p]

    def Z(self, r: int, p: int, n: int) -> list:
        key = (max(r, 0), p, n)
        if key in self._Z:
            return self._Z[key]
        r = max(r, 0)
        C = self.C
        dim = C.dim(n)
        Fp = self.filtration_indices(p, n)
        out = []
        if Fp:
            ft = C.filt(n + 1)
            D = C.d(n)
            low = [i for i, f in enumerate(ft) if f < p + r]
            if low and D:
                sub = [[D[i][j] for j in Fp] for i in low]
                K = la.nullspace(sub, len(Fp))
            else:
                K = [[Fraction(int(a == b)) for a in range(len(Fp))] for b in range(len(Fp))]
            vecs = []
            for k in K:
                v = [Fraction(0)] * dim
                for j, c in zip(Fp, k):
                    v[j] = c
                vecs.append(v)
            out = la.span_basis(vecs, dim) if vecs else []
        self._Z[key] = out
        return out

    def entry(self, r: int, p: int, n: int) -> _Entry:
        key = (r, p, n)
        if key in self._E:
            return self._E[key]
        dim = self.C.dim(n)
        Zr = self.Z(r, p, n)
        gens = list(self.Z(r - 1, p + 1, n))
        src = self.Z(r - 1, p - r + 1, n - 1)
        if src and self.C.dim(n - 1):
            D = self.C.d(n - 1)
            gens += [la.matvec(D, x) for x in src]
        sub = la.span_basis(gens, dim) if gens else []
        piv = la.pivots_of(sub)
        reps = la.complement_basis(sub, piv, Zr, dim) if Zr else []
        ent = _Entry(reps, sub, piv, la.pivots_of(reps))
        self._E[key] = ent
        return ent

    def rank(self, r: int, p: int, n: int) -> int:
        return self.entry(r, p, n).rank

    def coordinates(self, r: int, p: int, n: int, v: Sequence) -> list:
        """Coordinates of the class of v ∈ Z_r^{p} in the rep basis of E_r^{p}."""
        ent = self.entry(r, p, n)
        w = la.reduce_mod(list(v), ent.sub, ent.sub_piv)
        coords = [w[pc] for pc in ent.rep_piv]
        rest = la.reduce_mod(w, ent.reps, ent.rep_piv)
        if any(rest):
            raise InvariantViolation(f"vector is not in Z_{r}^{p} (degree {n})")
        return coords

    def differential(self, r: int, p: int, n: int) -> list:
        """Matrix of d_r : E_r^{p} (degree n) -> E_r^{p+r} (degree n+1); columns are sources."""
        src = self.entry(r, p, n)
        tgt = self.entry(r, p + r, n + 1)
        if not src.rank or not tgt.rank:
            return la.zeros(tgt.rank, src.rank)
        D = self.C.d(n)
        cols = [self.coordinates(r, p + r, n + 1, la.matvec(D, x)) for x in src.reps]
        return la.transpose(cols, tgt.rank)

    def p_range(self) -> range:
        return range(self.pmin, self.pmax + 1)

    def page(self, r: int) -> SpectralPage:
        ranks, diffs = {}, {}
        for n in self.degrees:
            for p in self.p_range():
                ranks[(p, n - p)] = self.rank(r, p, n)
                if n + 1 <= self.C.hi:
                    diffs[(p, n - p)] = self.differential(r, p, n)
        return SpectralPage(r, ranks, diffs)

    def check_page_turn(self, r: int) -> List[str]:
        """Compare rank E_{r+1} with the homology of (E_r, d_r) at every entry."""
        bad = []
        for n in self.degrees:
            if n - 1 not in self.degrees or n + 1 not in self.degrees:
                continue
            for p in self.p_range():
                out = la.rank(self.differential(r, p, n)) if self.rank(r, p, n) else 0
                inc = la.rank(self.differential(r, p - r, n - 1)) if self.rank(r, p - r, n - 1) else 0
                h = self.rank(r, p, n) - out - inc
                if h != self.rank(r + 1, p, n):
                    bad.append(f"E_{r + 1} at (p={p}, n={n}): {self.rank(r + 1, p, n)} != homology {h}")
        return bad

    def check_d_squared(self, r: int) -> List[str]:
        bad = []
        for n in self.degrees:
            if n + 1 not in self.degrees:
                continue
            for p in self.p_range():
                A = self.differential(r, p, n)
                B = self.differential(r, p + r, n + 1)
                if A and B and B[0] and not la.is_zero_matrix(la.matmul(B, A, ncols=len(A[0]) if A else 0)):
                    bad.append(f"d_{r} o d_{r} != 0 at (p={p}, n={n})")
        return bad

    def is_degenerate_at(self, r: int) -> bool:
        for s in range(max(r, 1), self.max_useful_page + 1):
            for n in self.degrees:
                if n + 1 > self.C.hi:
                    continue
                for p in self.p_range():
                    if not la.is_zero_matrix(self.differential(s, p, n)):
                        return False
        return True

    def limit_ranks(self, n: int) -> int:
        r = self.max_useful_page + 1
        return sum(self.rank(r, p, n) for p in self.p_range())


def pages(C: CochainComplex, r_max: int, degrees: Optional[Sequence[int]] = None,
          check: bool = True) -> List[SpectralPage]:
    """Pages E_0 .. E_{r_max}, with page-turning and d∘d checks."""
    ss = SpectralSequence(C, degrees)
    out = []
    for r in range(0, r_max + 1):
        if check:
            problems = ss.check_d_squared(r) + (ss.check_page_turn(r) if r < r_max else [])
            if problems:
                raise InvariantViolation(problems[0])
        out.append(ss.page(r))
    return out


def is_degenerate_at(C: CochainComplex, r: int, degrees: Optional[Sequence[int]] = None) -> bool:
    return SpectralSequence(C, degrees).is_degenerate_at(r)


# --------------------------------------------------------------------------
# unit differentials on twisted tensor complexes

@dataclass
class UnitDifferential:
    r: int
    zero: bool
    cls: CohomologyClass
    representative: Optional[Cochain] = None

    def to_json(self, A: GradedAlgebra):
        return {"r": self.r, "zero": self.zero, "class": self.cls.to_json(A)}


def default_window(A: GradedAlgebra, X: SimplicialComplex) -> Optional[Tuple[int, int]]:
    return None if A.ngens == 0 else (-(X.dim + 3), X.dim + 4)


class TwistedSpectralSequence:
    """Spectral sequence of C*(X) ⊗ A with differential x ↦ dx + τx - (-1)^{|x|} xω.

    ω = 0 gives the τ-twisted complex; a Maurer-Cartan ω gives the
    comparison complex whose unit differential is the difference of the
    τ- and ω-twisted differentials on the unit.
    """

    def __init__(self, X: SimplicialComplex, A: GradedAlgebra, tau: Optional[TwistingElement] = None,
                 omega: Optional[TwistingElement] = None, window: Optional[Tuple[int, int]] = None):
        self.X, self.A = X, A
        self.T = TensorCochains(X, A, window if window is not None else default_window(A, X))
        self.tau = tau.cochain if tau is not None else Cochain.zero(X, A)
        self.omega = omega.cochain if omega is not None else Cochain.zero(X, A)
        self.C = self._complex()
        degs = [n for n in self.T.valid_degrees()]
        self.ss = SpectralSequence(self.C, degs)

    def _op(self, x: Cochain) -> Cochain:
        out = x.d() + self.tau.cup(x)
        if not self.omega.is_zero():
            deg = x.degree or 0
            out = out - x.cup(self.omega).scale((-1) ** deg)
        return out

    def _complex(self) -> CochainComplex:
        T = self.T
        rng = range(T.lo, T.hi + 1)
        diffs = {n: T._matrix_of(self._op, n) for n in range(T.lo, T.hi)}
        return CochainComplex(RATIONALS, T.lo, [T.dim(n) for n in rng], diffs,
                              filtration={n: T.filtration(n) for n in rng})

    def unit_differential(self, r: int) -> UnitDifferential:
        """d_r(1_r): find x = 1 + y (y of filtration >= 1) with Dx ∈ F^r, return [Dx]."""
        T, C = self.T, self.C
        if 0 not in self.ss.degrees or 1 not in self.ss.degrees:
            raise SpectralSequenceError("window must contain degrees 0 and 1 in its interior")
        one = T.to_vector(Cochain.unit(self.X, self.A), 0)
        D = C.d(0)
        ft = C.filt(1)
        low = [i for i, f in enumerate(ft) if f < r]
        F1 = self.ss.filtration_indices(1, 0)
        Done = la.matvec(D, one)
        if low:
            M = [[D[i][j] for j in F1] for i in low] if F1 else [[] for _ in low]
            rhs = [-Done[i] for i in low]
            y = la.solve(M, rhs, len(F1)) if F1 else (None if any(rhs) else [])
            if y is None:
                raise SpectralSequenceError(f"the unit does not survive to page {r}")
        else:
            y = [Fraction(0)] * len(F1)
        x = list(one)
        for j, c in zip(F1, y):
            x[j] += c
        Dx = la.matvec(D, x)
        coords = self.ss.coordinates(r, r, 1, Dx)
        if not any(coords):
            return UnitDifferential(r, True, CohomologyClass(r))
        rep = T.from_vector(Dx, 1)
        lead = rep.component(r)
        return UnitDifferential(r, False, class_of(lead, r), rep)


def unit_differential(tau: TwistingElement, r: int, window=None,
                      omega: Optional[TwistingElement] = None) -> UnitDifferential:
    return TwistedSpectralSequence(tau.X, tau.A, tau, omega, window).unit_differential(r)


def mc_complete(x: Cochain, start: int) -> TwistingElement:
    """Add components in cochain degrees >= start - 1 until dx + x∪x = 0."""
    for j in range(start, x.X.dim + 1):
        rhs = -(mc_defect(x).component(j))
        if rhs.is_zero():
            continue
        y = solve_d(rhs, j - 1)
        if y is None:
            raise TwistError(f"Maurer-Cartan completion obstructed in cochain degree {j}")
        x = x + y
    return TwistingElement(x)


@dataclass
class RecoveryResult:
    classes: Dict[int, CohomologyClass]
    comparison: TwistingElement

    def to_json(self, A: GradedAlgebra):
        out = []
        for r, c in sorted(self.classes.items()):
            item = {"r": r, "class": c.to_json(A)}
            if len(c.entries) == 1 and len(c.entries[0][1]) == 1:
                mono, (coeff,) = c.entries[0]
                item["coeff"] = _rat(coeff)
                item["mono"] = A.format_monomial(mono)
            out.append(item)
        return {"classes": out}


def recover_twist(tau: TwistingElement, window=None, base: Optional[TwistingElement] = None) -> RecoveryResult:
    """Read off the leading classes of τ from unit differentials.

    For r = 2, ..., dim X: compute x = d_r(1_r) in the comparison complex of
    τ against the current approximation ω; if x ≠ 0, record it, add its
    canonical cocycle representative to ω and complete ω to a Maurer-Cartan
    element.  The base (default: untwisted) must degenerate at E_2.
    """
    X, A = tau.X, tau.A
    window = window if window is not None else default_window(A, X)
    omega = base if base is not None else TwistingElement.zero(X, A)
    if base is not None and not TwistedSpectralSequence(X, A, base, None, window).ss.is_degenerate_at(2):
        raise SpectralSequenceError("base twist does not degenerate at E_2")
    classes: Dict[int, CohomologyClass] = {}
    for r in range(2, X.dim + 1):
        tss = TwistedSpectralSequence(X, A, tau, omega, window)
        ud = tss.unit_differential(r)
        if ud.zero:
            continue
        classes[r] = ud.cls
        kappa = class_representative(X, A, ud.cls)
        omega = mc_complete(omega.cochain + kappa, r + 2)
    final = TwistedSpectralSequence(X, A, tau, omega, window)
    for r in range(2, X.dim + 2):
        if not final.unit_differential(r).zero:
            raise InvariantViolation("comparison complex still has a nonzero unit differential")
    return RecoveryResult(classes, omega)
