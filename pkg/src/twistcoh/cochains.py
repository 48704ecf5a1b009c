"""Cochains on a simplicial complex with coefficients in a graded algebra.

An element of C*(X) ⊗ A is stored sparsely as ``{(simplex, monomial): c}``.
The total degree of a term is ``dim(simplex) + deg(monomial)``; its
filtration degree is the cochain degree ``dim(simplex)``.

Because C*(X) ⊗ A is unbounded for Laurent-type coefficients, matrices are
only produced on a degree window ``[lo, hi]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Optional, Sequence, Tuple

from . import linalg as la
from .algebra import AlgebraElement, GradedAlgebra, InfiniteRankError
from .complexes import INTEGERS, RATIONALS, CochainComplex, ComplexError
from .simplicial import SimplicialComplex, class_coordinates, representative, solve_coboundary


class WindowError(ComplexError):
    pass


class MismatchError(ValueError):
    pass


Key = Tuple[tuple, tuple]


class Cochain:
    """Finite sum of terms φ_s ⊗ m (indicator cochain of a simplex times a monomial)."""

    __slots__ = ("X", "A", "terms")

    def __init__(self, X: SimplicialComplex, A: GradedAlgebra, terms: Optional[Dict[Key, object]] = None):
        self.X = X
        self.A = A
        self.terms: Dict[Key, Fraction] = {}
        for (s, m), c in (terms or {}).items():
            c = Fraction(c)
            if c:
                s = tuple(s)
                if not X.contains(s):
                    raise MismatchError(f"{s} is not a simplex")
                self.terms[(s, tuple(m))] = self.terms.get((s, tuple(m)), Fraction(0)) + c
        self.terms = {k: v for k, v in self.terms.items() if v}

    # -- constructors ---------------------------------------------------
    @classmethod
    def zero(cls, X, A):
        return cls(X, A)

    @classmethod
    def unit(cls, X, A):
        one = A.unit_monomial()
        return cls(X, A, {(v, one): 1 for v in X.simplices[0]})

    @classmethod
    def from_values(cls, X, A, p: int, values: Sequence, coeff: Optional[AlgebraElement] = None):
        """Plain p-cochain (values on the p-simplices in order) times ``coeff``."""
        coeff = coeff if coeff is not None else A.one()
        terms = {}
        for s, v in zip(X.simplices[p], values):
            if v:
                for m, c in coeff.terms.items():
                    terms[(s, m)] = terms.get((s, m), 0) + Fraction(v) * c
        return cls(X, A, terms)

    # -- structure ------------------------------------------------------
    def _same_host(self, other: "Cochain"):
        if self.X is not other.X and not self.X.same_simplices(other.X):
            raise MismatchError("cochains live on different complexes")
        if self.A != other.A:
            raise MismatchError("cochains have different coefficient algebras")

    def is_zero(self) -> bool:
        return not self.terms

    def term_degree(self, key: Key) -> int:
        s, m = key
        return len(s) - 1 + self.A.monomial_degree(m)

    @property
    def degree(self) -> Optional[int]:
        degs = {self.term_degree(k) for k in self.terms}
        if len(degs) > 1:
            raise ValueError(f"inhomogeneous cochain (degrees {sorted(degs)})")
        return degs.pop() if degs else None

    @property
    def filtration_degree(self) -> Optional[int]:
        return min((len(s) - 1 for s, _ in self.terms), default=None)

    def component(self, p: int) -> "Cochain":
        return Cochain(self.X, self.A, {k: c for k, c in self.terms.items() if len(k[0]) - 1 == p})

    def components(self) -> Dict[int, "Cochain"]:
        ps = sorted({len(s) - 1 for s, _ in self.terms})
        return {p: self.component(p) for p in ps}

    def above(self, p: int) -> "Cochain":
        """Part of cochain degree >= p."""
        return Cochain(self.X, self.A, {k: c for k, c in self.terms.items() if len(k[0]) - 1 >= p})

    def values(self, p: int, mono: tuple) -> list:
        """Plain p-cochain given by the coefficient of ``mono``."""
        return [self.terms.get((s, tuple(mono)), Fraction(0)) for s in self.X.simplices[p]]

    def monomials(self):
        return sorted({m for _, m in self.terms})

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other: "Cochain") -> "Cochain":
        self._same_host(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + c
        return Cochain(self.X, self.A, out)

    def __neg__(self):
        return Cochain(self.X, self.A, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "Cochain":
        c = Fraction(c)
        return Cochain(self.X, self.A, {k: c * v for k, v in self.terms.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def __eq__(self, other):
        return isinstance(other, Cochain) and self.A == other.A and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"Cochain({len(self.terms)} terms)"

    def d(self) -> "Cochain":
        """d(φ ⊗ α) = dφ ⊗ α + (-1)^p φ ⊗ dα."""
        out: Dict[Key, Fraction] = {}
        for (s, m), c in self.terms.items():
            for t, sign in self.X.cofaces(s):
                out[(t, m)] = out.get((t, m), Fraction(0)) + sign * c
        if not self.A.has_zero_differential:
            for (s, m), c in self.terms.items():
                sign = (-1) ** (len(s) - 1)
                for m2, c2 in self.A.monomial(m).d().terms.items():
                    out[(s, m2)] = out.get((s, m2), Fraction(0)) + sign * c * c2
        return Cochain(self.X, self.A, out)

    def cup(self, other: "Cochain") -> "Cochain":
        """Alexander-Whitney product with the Koszul sign (-1)^(|α| p')."""
        self._same_host(other)
        A, X = self.A, self.X
        by_first: Dict[int, list] = {}
        for (s, m), c in other.terms.items():
            by_first.setdefault(s[0], []).append((s, m, c))
        out: Dict[Key, Fraction] = {}
        for (s1, m1), c1 in self.terms.items():
            deg1 = A.monomial_degree(m1)
            for s2, m2, c2 in by_first.get(s1[-1], ()):
                t = s1 + s2[1:]
                if not X.contains(t):
                    continue
                sign, m = A.multiply_monomials(m1, m2)
                if not sign:
                    continue
                if deg1 % 2 and (len(s2) - 1) % 2:
                    sign = -sign
                out[(t, m)] = out.get((t, m), Fraction(0)) + sign * c1 * c2
        return Cochain(X, A, out)

    def __mul__(self, other):
        if isinstance(other, Cochain):
            return self.cup(other)
        return self.scale(other)

    def restrict(self, U: SimplicialComplex) -> "Cochain":
        return Cochain(U, self.A, {k: c for k, c in self.terms.items() if U.contains(k[0])})

    def extend_by_zero(self, X: SimplicialComplex) -> "Cochain":
        return Cochain(X, self.A, self.terms)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.terms.values())

    def to_json(self):
        out = []
        for (s, m), c in sorted(self.terms.items()):
            out.append({"simplex": list(s), "mono": self.A.format_monomial(m), "coeff": _rat(c)})
        return out

    @classmethod
    def from_json(cls, X, A, data) -> "Cochain":
        terms = {}
        for item in data:
            if isinstance(item, dict):
                s, mono, c = item["simplex"], item.get("mono", "1"), item.get("coeff", 1)
            else:
                s, mono, c = item
            key = (tuple(sorted(s)), A.parse_monomial(str(mono)))
            terms[key] = terms.get(key, Fraction(0)) + Fraction(c)
        return cls(X, A, terms)


def _rat(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def exp_cup(beta: Cochain) -> Cochain:
    """exp(β) = Σ β^n / n!  (β of positive filtration, so the sum is finite)."""
    out = Cochain.unit(beta.X, beta.A)
    power = out
    n = 1
    while True:
        power = power.cup(beta).scale(Fraction(1, n))
        if power.is_zero():
            return out
        out = out + power
        n += 1
        if n > beta.X.dim + 2:
            raise ValueError("exp of a non-nilpotent element")


def log_cup(g: Cochain) -> Cochain:
    """Inverse of :func:`exp_cup` on 1 + (positive filtration)."""
    x = g - Cochain.unit(g.X, g.A)
    out = Cochain.zero(g.X, g.A)
    power = Cochain.unit(g.X, g.A)
    for n in range(1, g.X.dim + 3):
        power = power.cup(x)
        if power.is_zero():
            break
        out = out + power.scale(Fraction((-1) ** (n + 1), n))
    return out


# --------------------------------------------------------------------------
# windowed matrices

class TensorCochains:
    """Coordinates on C*(X) ⊗ A in total degrees lo..hi.

    Degree-n basis: (p, simplex, monomial) with monomial in A^{n-p}, sorted
    by p, then simplex order, then monomial order.
    """

    def __init__(self, X: SimplicialComplex, A: GradedAlgebra, window: Optional[Tuple[int, int]] = None):
        self.X, self.A = X, A
        bounded = A.ngens == 0
        if window is None:
            if not bounded:
                raise WindowError(f"algebra {A.name} needs an explicit degree window")
            window = (0, X.dim)
        lo, hi = int(window[0]), int(window[1])
        if lo > hi:
            raise WindowError(f"empty window [{lo}, {hi}]")
        self.lo, self.hi, self.bounded = lo, hi, bounded
        self._basis = {}
        self._index = {}
        for n in range(lo, hi + 1):
            basis = []
            for p in range(X.dim + 1):
                try:
                    monos = A.degree_basis(n - p)
                except InfiniteRankError as exc:
                    raise WindowError(str(exc)) from exc
                for s in X.simplices[p]:
                    for m in monos:
                        basis.append((p, s, m))
            self._basis[n] = basis
            self._index[n] = {(s, m): i for i, (_, s, m) in enumerate(basis)}

    # ------------------------------------------------------------------
    def dim(self, n: int) -> int:
        return len(self._basis.get(n, ()))

    def basis(self, n: int) -> list:
        return self._basis.get(n, [])

    def valid_degrees(self) -> range:
        """Degrees whose cohomology the window computes faithfully."""
        if self.bounded and self.lo <= 0 and self.hi >= self.X.dim:
            return range(self.lo, self.hi + 1)
        return range(self.lo + 2, self.hi - 1)

    def check_degree(self, n: int):
        if n not in self.valid_degrees():
            raise WindowError(f"degree {n} is within 2 of the window edge [{self.lo}, {self.hi}]")

    def to_vector(self, x: Cochain, n: int) -> list:
        if n not in self._index:
            if x.is_zero():
                return []
            raise WindowError(f"degree {n} outside the window [{self.lo}, {self.hi}]")
        idx = self._index[n]
        v = [Fraction(0)] * self.dim(n)
        for k, c in x.terms.items():
            if k not in idx:
                raise WindowError(f"term {k} not in degree {n} of the window")
            v[idx[k]] += c
        return v

    def from_vector(self, v: Sequence, n: int) -> Cochain:
        return Cochain(self.X, self.A, {(s, m): c for (_, s, m), c in zip(self.basis(n), v) if c})

    def filtration(self, n: int) -> tuple:
        return tuple(p for p, _, _ in self.basis(n))

    def _matrix_of(self, op, n: int, shift: int = 1) -> list:
        rows = self.dim(n + shift)
        M = la.zeros(rows, self.dim(n))
        idx = self._index.get(n + shift, {})
        for j, (_, s, m) in enumerate(self.basis(n)):
            img = op(Cochain(self.X, self.A, {(s, m): 1}))
            for k, c in img.terms.items():
                M[idx[k]][j] += c
        return M

    def differential(self, n: int) -> list:
        return self._matrix_of(lambda e: e.d(), n)

    def left_multiplication(self, tau: Cochain, n: int) -> list:
        if tau.is_zero():
            return la.zeros(self.dim(n + 1), self.dim(n))
        return self._matrix_of(lambda e: tau.cup(e), n)

    def multiplication(self, x: Cochain, n: int) -> list:
        """Matrix of y ↦ x ∪ y from degree n to degree n + |x| (x homogeneous)."""
        shift = x.degree or 0
        return self._matrix_of(lambda e: x.cup(e), n, shift)

    def twisted_differential(self, tau: Optional[Cochain], n: int) -> list:
        if tau is None or tau.is_zero():
            return self.differential(n)
        return self._matrix_of(lambda e: e.d() + tau.cup(e), n)

    def complex(self, tau: Optional[Cochain] = None, ring: str = RATIONALS) -> CochainComplex:
        if ring == INTEGERS and tau is not None and not tau.is_integral():
            raise ComplexError("integral complex needs an integral twist")
        n_range = range(self.lo, self.hi + 1)
        diffs = {n: self.twisted_differential(tau, n) for n in range(self.lo, self.hi)}
        return CochainComplex(ring, self.lo, [self.dim(n) for n in n_range], diffs,
                              filtration={n: self.filtration(n) for n in n_range})


def cochains(X: SimplicialComplex, A: GradedAlgebra, window: Optional[Tuple[int, int]] = None,
             ring: str = RATIONALS) -> CochainComplex:
    """Filtered complex C*(X) ⊗ A on the window, filtered by cochain degree."""
    return TensorCochains(X, A, window).complex(None, ring)


def cup(a: Cochain, b: Cochain) -> Cochain:
    return a.cup(b)


# --------------------------------------------------------------------------
# cohomology classes of split cocycles

@dataclass(frozen=True)
class CohomologyClass:
    """Class in H^p(X; Q) ⊗ A: for each monomial, coordinates on the
    canonical homology basis of X in degree p."""

    p: int
    entries: tuple = ()  # sorted ((monomial, coords), ...), zero entries dropped

    @classmethod
    def make(cls, p: int, entries: Dict[tuple, Sequence]) -> "CohomologyClass":
        items = tuple(sorted((tuple(m), tuple(Fraction(c) for c in v)) for m, v in entries.items() if any(v)))
        return cls(p, items)

    def is_zero(self) -> bool:
        return not self.entries

    def coefficient(self, mono: tuple) -> tuple:
        return dict(self.entries).get(tuple(mono), ())

    def __add__(self, other: "CohomologyClass") -> "CohomologyClass":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.p != other.p:
            raise ValueError("classes of different cochain degree")
        out = {m: list(v) for m, v in self.entries}
        for m, v in other.entries:
            w = out.get(m, [Fraction(0)] * len(v))
            out[m] = [a + b for a, b in zip(w, v)]
        return CohomologyClass.make(self.p, out)

    def scale(self, c) -> "CohomologyClass":
        c = Fraction(c)
        return CohomologyClass.make(self.p, {m: [c * x for x in v] for m, v in self.entries})

    def __neg__(self):
        return self.scale(-1)

    def to_json(self, A: GradedAlgebra) -> dict:
        return {"p": self.p, "terms": [{"mono": A.format_monomial(m), "coords": [_rat(x) for x in v]}
                                       for m, v in self.entries]}


def class_of(x: Cochain, p: Optional[int] = None) -> CohomologyClass:
    """Class of a cocycle concentrated in one cochain degree."""
    comps = x.components()
    if p is None:
        if len(comps) > 1:
            raise ValueError("cochain spans several cochain degrees")
        p = next(iter(comps), 0)
    elif set(comps) - {p}:
        raise ValueError(f"cochain has components outside cochain degree {p}")
    if not x.d().is_zero():
        raise ValueError("not a cocycle")
    return CohomologyClass.make(p, {m: class_coordinates(x.X, p, x.values(p, m)) for m in x.monomials()})


def class_representative(X: SimplicialComplex, A: GradedAlgebra, c: CohomologyClass) -> Cochain:
    out = Cochain.zero(X, A)
    for m, coords in c.entries:
        out = out + Cochain.from_values(X, A, c.p, representative(X, c.p, coords), A.monomial(m))
    return out


def solve_d(x: Cochain, p: int) -> Optional[Cochain]:
    """y of cochain degree p with dy = x (x in cochain degree p+1), or None.

    Needs an algebra with zero differential so the problem splits by monomial.
    """
    if not x.A.has_zero_differential:
        raise ValueError("solver needs coefficients with zero differential")
    out = Cochain.zero(x.X, x.A)
    for m in x.monomials():
        phi = solve_coboundary(x.X, p, x.values(p + 1, m))
        if phi is None:
            return None
        out = out + Cochain.from_values(x.X, x.A, p, phi, x.A.monomial(m))
    return out
