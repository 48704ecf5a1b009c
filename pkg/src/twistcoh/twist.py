"""Maurer-Cartan twisting elements, twisted complexes, the exponential gauge
action, sphere invariants and Mayer-Vietoris exactness for twisted cochains.

Conventions: the twisted differential is D(x) = dx + τ ∪ x and the
Maurer-Cartan equation is dτ + τ ∪ τ = 0.  For a degree-0 element β of
positive filtration, ``gauge_apply(β, τ)`` returns

    τ' = e^{-β} d(e^{β}) + e^{-β} τ e^{β},

so that left multiplication by e^{β} is a filtered isomorphism from the
τ'-twisted complex to the τ-twisted one.  When everything commutes this is
τ' = τ + dβ.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg as la
from .algebra import GradedAlgebra
from .cochains import (Cochain, CohomologyClass, TensorCochains, WindowError, class_of, exp_cup, log_cup,
                       solve_d)
from .complexes import (RATIONALS, CochainComplex, InvariantViolation, SpotReport, Subquotient,
                        check_exact_sequence, direct_sum, mayer_vietoris_sequence)
from .simplicial import (SimplicialComplex, SimplicialError, class_coordinates, cohomology_dual_basis,
                         hemisphere_cover)


class TwistError(ValueError):
    pass


class TwistingElement:
    """A total-degree-1 Maurer-Cartan cochain of filtration at least 2."""

    __slots__ = ("cochain",)

    def __init__(self, cochain: Cochain, check: bool = True):
        self.cochain = cochain
        if check:
            problems = twist_diagnostics(cochain)
            if problems:
                raise TwistError(problems[0])

    @classmethod
    def zero(cls, X: SimplicialComplex, A: GradedAlgebra) -> "TwistingElement":
        return cls(Cochain.zero(X, A), check=False)

    @property
    def X(self):
        return self.cochain.X

    @property
    def A(self):
        return self.cochain.A

    def is_zero(self) -> bool:
        return self.cochain.is_zero()

    def component(self, p: int) -> Cochain:
        return self.cochain.component(p)

    @property
    def leading_degree(self) -> Optional[int]:
        return self.cochain.filtration_degree

    def leading_class(self) -> Optional[CohomologyClass]:
        p = self.leading_degree
        return None if p is None else class_of(self.component(p), p)

    def restrict(self, U: SimplicialComplex) -> "TwistingElement":
        return TwistingElement(self.cochain.restrict(U), check=False)

    def __eq__(self, other):
        return isinstance(other, TwistingElement) and self.cochain == other.cochain

    def __hash__(self):
        return hash(self.cochain)

    def to_json(self):
        return self.cochain.to_json()


def mc_defect(tau: Cochain) -> Cochain:
    return tau.d() + tau.cup(tau)


def twist_diagnostics(tau: Cochain) -> List[str]:
    """Reasons ``tau`` is not a valid twisting element (empty if it is)."""
    out = []
    for key in tau.terms:
        if tau.term_degree(key) != 1:
            out.append(f"term on {list(key[0])} has total degree {tau.term_degree(key)}, expected 1")
            return out
    f = tau.filtration_degree
    if f is not None and f < 2:
        out.append(f"twist has a component in cochain degree {f}; filtration must be >= 2")
        return out
    defect = mc_defect(tau)
    if not defect.is_zero():
        first = min(len(s) - 1 for s, _ in defect.terms)
        out.append(f"Maurer-Cartan equation fails in cochain degree {first}")
    return out


@dataclass(frozen=True)
class Obstruction:
    """First cochain degree where a degreewise solve failed, with the class
    of the residual there (``cls`` is None if the residual is not closed)."""

    degree: int
    residual: Cochain
    cls: Optional[CohomologyClass]

    def to_json(self, A: GradedAlgebra):
        return {"degree": self.degree, "class": self.cls.to_json(A) if self.cls else None}


# --------------------------------------------------------------------------
# construction

def twist_from_cocycle(omega: Cochain) -> "TwistingElement | Obstruction":
    return mc_extend(omega)


def mc_extend(leading: Cochain) -> "TwistingElement | Obstruction":
    """Complete a cocycle ω_r to a Maurer-Cartan element with leading term ω_r.

    Solves dτ^{j-1} = -(τ ∪ τ)^j for j = r+2, ..., dim X; a non-exact right
    hand side is returned as an :class:`Obstruction`.
    """
    X, A = leading.X, leading.A
    if leading.is_zero():
        return TwistingElement.zero(X, A)
    comps = leading.components()
    if len(comps) != 1:
        raise TwistError("leading term must sit in a single cochain degree")
    r = next(iter(comps))
    if r < 2:
        raise TwistError("leading term must have cochain degree >= 2")
    if leading.degree != 1:
        raise TwistError("leading term must have total degree 1")
    if not leading.d().is_zero():
        raise TwistError("leading term is not a cocycle")
    tau = leading
    for j in range(r + 2, X.dim + 1):
        rhs = -(tau.cup(tau).component(j))
        if rhs.is_zero():
            continue
        y = solve_d(rhs, j - 1)
        if y is None:
            return Obstruction(j, rhs, _safe_class(rhs, j))
        tau = tau + y
    return TwistingElement(tau)


def _safe_class(x: Cochain, p: int) -> Optional[CohomologyClass]:
    try:
        return class_of(x, p)
    except ValueError:
        return None


def twisted_complex(X: SimplicialComplex, A: GradedAlgebra, tau: Optional[TwistingElement] = None,
                    window: Optional[Tuple[int, int]] = None, ring: str = RATIONALS) -> CochainComplex:
    """C*(X) ⊗ A with differential d + τ∪, filtered by cochain degree.

    The complex constructor checks (d + τ)^2 = 0 and that the filtration is
    preserved.
    """
    T = TensorCochains(X, A, window)
    cochain = None if tau is None else tau.cochain
    return T.complex(cochain, ring)


# --------------------------------------------------------------------------
# gauge action

def inverse_exp(beta: Cochain) -> Cochain:
    return exp_cup(-beta)


def gauge_apply(beta: Cochain, tau: TwistingElement) -> Tuple[TwistingElement, Cochain]:
    """(τ', e^β) with (d + τ) ∘ e^β = e^β ∘ (d + τ')."""
    _check_gauge_parameter(beta)
    g = exp_cup(beta)
    ginv = inverse_exp(beta)
    new = ginv.cup(g.d()) + ginv.cup(tau.cochain).cup(g)
    return TwistingElement(new), g


def _check_gauge_parameter(beta: Cochain):
    for key in beta.terms:
        if beta.term_degree(key) != 0:
            raise TwistError("gauge parameter must have total degree 0")
    f = beta.filtration_degree
    if f is not None and f < 1:
        raise TwistError("gauge parameter must have filtration >= 1")


def intertwiner_defect(T: TensorCochains, g: Cochain, tau: TwistingElement, tau_new: TwistingElement) -> Optional[int]:
    """First window degree where (d+τ)∘g ≠ g∘(d+τ') as matrices, or None."""
    for n in range(T.lo, T.hi):
        lhs = la.matmul(T.twisted_differential(tau.cochain, n), T.multiplication(g, n))
        rhs = la.matmul(T.multiplication(g, n + 1), T.twisted_differential(tau_new.cochain, n))
        if lhs != rhs:
            return n
    return None


def _unknown_basis(X: SimplicialComplex, A: GradedAlgebra, top: int, start: int = 1):
    """Basis keys of ⊕_{1<=i<=top} C^i ⊗ A^{-i} (the positive-filtration degree-0 part)."""
    keys = []
    for i in range(start, min(top, X.dim) + 1):
        for m in A.degree_basis(-i):
            for s in X.simplices[i]:
                keys.append((s, m))
    return keys


def _gauge_system(tau: Cochain, tau_new: Cochain, max_eq: int):
    """Linear system for g = 1 + g' with dg + τg - gτ' = 0 in cochain degrees <= max_eq."""
    X, A = tau.X, tau.A
    unknowns = _unknown_basis(X, A, max_eq - 1)
    rhs_el = tau_new - tau
    rows: Dict[tuple, int] = {}
    cols = []
    for key in unknowns:
        e = Cochain(X, A, {key: 1})
        img = e.d() + tau.cup(e) - e.cup(tau_new)
        img = Cochain(X, A, {k: c for k, c in img.terms.items() if len(k[0]) - 1 <= max_eq})
        cols.append(img)
        for k in img.terms:
            rows.setdefault(k, len(rows))
    for k in rhs_el.terms:
        if len(k[0]) - 1 <= max_eq:
            rows.setdefault(k, len(rows))
    M = la.zeros(len(rows), len(unknowns))
    for j, img in enumerate(cols):
        for k, c in img.terms.items():
            M[rows[k]][j] = c
    b = [Fraction(0)] * len(rows)
    for k, c in rhs_el.terms.items():
        if k in rows:
            b[rows[k]] = c
    return unknowns, M, b


def _solve_gauge(tau: Cochain, tau_new: Cochain, max_eq: int) -> Optional[Cochain]:
    unknowns, M, b = _gauge_system(tau, tau_new, max_eq)
    if not b:
        return Cochain.unit(tau.X, tau.A)
    x = la.solve(M, b, len(unknowns)) if M else ([Fraction(0)] * len(unknowns) if not any(b) else None)
    if x is None:
        return None
    g = Cochain(tau.X, tau.A, {k: c for k, c in zip(unknowns, x) if c})
    return Cochain.unit(tau.X, tau.A) + g


@dataclass(frozen=True)
class GaugeResult:
    equivalent: bool
    beta: Optional[Cochain] = None
    obstruction: Optional[Obstruction] = None

    def __bool__(self):
        return self.equivalent


def are_gauge_equivalent(tau: TwistingElement, tau_new: TwistingElement) -> GaugeResult:
    """Find β with gauge_apply(β, τ) = τ', or the first obstruction.

    The gauge condition g τ' = dg + τ g is linear in g = e^β, so the whole
    system is solved at once; on failure the smallest cochain degree where
    the truncated system becomes inconsistent names the obstruction.
    """
    X, A = tau.X, tau.A
    if not (X.same_simplices(tau_new.X) and A == tau_new.A):
        raise TwistError("twists live on different hosts")
    if not A.has_zero_differential:
        raise TwistError("gauge solver needs coefficients with zero differential")
    top = X.dim
    g = _solve_gauge(tau.cochain, tau_new.cochain, top)
    if g is not None:
        beta = log_cup(g)
        if gauge_apply(beta, tau)[0] != tau_new:
            raise InvariantViolation("gauge solution does not reproduce the target twist")
        return GaugeResult(True, beta)
    for j in range(2, top + 1):
        if _solve_gauge(tau.cochain, tau_new.cochain, j) is not None:
            continue
        prev = _solve_gauge(tau.cochain, tau_new.cochain, j - 1) if j > 2 else Cochain.unit(X, A)
        residual = (prev.d() + tau.cochain.cup(prev) - prev.cup(tau_new.cochain)).component(j)
        return GaugeResult(False, None, Obstruction(j, residual, _safe_class(residual, j)))
    raise InvariantViolation("full gauge system unsolvable but every truncation solvable")


def trivialize(tau: TwistingElement) -> Optional[Cochain]:
    """β with gauge_apply(β, 0) = τ (so dβ = τ when things commute), or None."""
    res = are_gauge_equivalent(TwistingElement.zero(tau.X, tau.A), tau)
    return res.beta if res else None


# --------------------------------------------------------------------------
# spheres

def _sphere_parameter(X: SimplicialComplex) -> int:
    if not X.hemispheres:
        raise SimplicialError("nu invariant needs a sphere with hemisphere data")
    k = X.dim - 1
    if k < 1:
        raise TwistError("twists need a sphere of dimension >= 2")
    return k


def nu_invariant(tau: TwistingElement) -> CohomologyClass:
    """Class of the transition between hemisphere trivializations on the equator.

    With g± = exp(β±) trivializing τ on D±, h = g₊ g₋^{-1} is a cocycle of
    total degree 0 on the equator; its cochain-degree-k part is the class
    (β₊ - β₋ when everything commutes).
    """
    X, A = tau.X, tau.A
    k = _sphere_parameter(X)
    Dp, Dm, E = hemisphere_cover(X)
    betas = []
    for D in (Dp, Dm):
        beta = trivialize(tau.restrict(D))
        if beta is None:
            raise InvariantViolation("twist is not trivial on a hemisphere")
        betas.append(beta.restrict(E))
    h = exp_cup(betas[0]).cup(exp_cup(-betas[1])) - Cochain.unit(E, A)
    if not h.d().is_zero():
        raise InvariantViolation("hemisphere transition is not closed")
    for p, comp in h.components().items():
        if p != k and not class_of(comp, p).is_zero():
            raise InvariantViolation(f"transition has a nonzero class in cochain degree {p}")
    return class_of(h.component(k), k) if not h.component(k).is_zero() else CohomologyClass(k)


def suspension_class(tau: TwistingElement) -> CohomologyClass:
    """σ([τ]) computed from the Mayer-Vietoris connecting map alone.

    The connecting map sends an equator cocycle c to the class of
    (d ext₀(c) on D+, 0 on D-) glued on X; inverting it on the top class
    of τ gives the equator class.
    """
    X, A = tau.X, tau.A
    k = _sphere_parameter(X)
    Dp, _, E = hemisphere_cover(X)
    top = class_of(tau.component(k + 1), k + 1) if not tau.component(k + 1).is_zero() else CohomologyClass(k + 1)
    dual = cohomology_dual_basis(E, k)
    # matrix of the connecting map in dual-basis / homology-basis coordinates
    cols = []
    for eps in dual:
        u = Cochain.from_values(E, A, k, eps).extend_by_zero(Dp)
        du = u.d().extend_by_zero(X)
        cols.append(class_coordinates(X, k + 1, du.values(k + 1, A.unit_monomial())))
    Mdelta = la.transpose(cols, len(cols[0])) if cols else []
    out = {}
    for m, coords in top.entries:
        x = la.solve(Mdelta, list(coords), len(dual))
        if x is None:
            raise InvariantViolation("connecting map is not onto the top class")
        out[m] = x
    return CohomologyClass.make(k, out)


# --------------------------------------------------------------------------
# Mayer-Vietoris

@dataclass
class MVReport:
    spots: List[SpotReport]
    groups: Dict[str, object] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.spots)

    def to_json(self):
        return {"pass": self.ok, "spots": [s.to_json() for s in self.spots],
                "groups": {k: v.to_json() for k, v in self.groups.items()}}


def check_cover(X: SimplicialComplex, U: SimplicialComplex, V: SimplicialComplex) -> List[str]:
    out = []
    for nm, S in (("U", U), ("V", V)):
        if not S.is_subcomplex_of(X):
            out.append(f"{nm} is not a subcomplex of X")
    if not out and not U.union(V).same_simplices(X):
        out.append("U and V do not cover X")
    if not out and U.intersection(V) is None:
        out.append("U and V do not meet")
    return out


def _restriction(Tsrc: TensorCochains, Ttgt: TensorCochains, n: int) -> list:
    M = la.zeros(Ttgt.dim(n), Tsrc.dim(n))
    idx = Ttgt._index[n]
    for j, (_, s, m) in enumerate(Tsrc.basis(n)):
        i = idx.get((s, m))
        if i is not None:
            M[i][j] = Fraction(1)
    return M


def mv_exactness(X: SimplicialComplex, U: SimplicialComplex, V: SimplicialComplex,
                 tau: Optional[TwistingElement], A: GradedAlgebra,
                 window: Optional[Tuple[int, int]] = None) -> MVReport:
    """Long exact sequence H(X) → H(U) ⊕ H(V) → H(U∩V) → H(X)[1] of twisted cohomology.

    Maps: restriction, (u, v) ↦ u - v, and the connecting map built from
    extension by zero into U followed by gluing.
    """
    problems = check_cover(X, U, V)
    if problems:
        raise TwistError(problems[0])
    W = U.intersection(V)
    tau = tau or TwistingElement.zero(X, A)
    TX = TensorCochains(X, A, window)
    win = (TX.lo, TX.hi)
    TU, TV, TW = (TensorCochains(S, A, win) for S in (U, V, W))
    CX = TX.complex(tau.cochain)
    CU = TU.complex(tau.restrict(U).cochain)
    CV = TV.complex(tau.restrict(V).cochain)
    CW = TW.complex(tau.restrict(W).cochain)
    spots, out = mayer_vietoris_sequence(
        CX, CU, CV, CW,
        lambda n: _restriction(TX, TU, n), lambda n: _restriction(TX, TV, n),
        lambda n: _restriction(TU, TW, n), lambda n: _restriction(TV, TW, n),
        lambda n: _glue_matrix(TX, TU, TV, n), list(TX.valid_degrees()))
    return MVReport(spots, out)


def _glue_matrix(TX: TensorCochains, TU: TensorCochains, TV: TensorCochains, n: int) -> list:
    """Left inverse of the restriction C(X) → C(U) ⊕ C(V): take U-values where defined."""
    M = la.zeros(TX.dim(n), TU.dim(n) + TV.dim(n))
    iu, iv = TU._index.get(n, {}), TV._index.get(n, {})
    for i, (_, s, m) in enumerate(TX.basis(n)):
        if (s, m) in iu:
            M[i][iu[(s, m)]] = Fraction(1)
        else:
            M[i][TU.dim(n) + iv[(s, m)]] = Fraction(1)
    return M
