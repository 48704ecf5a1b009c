"""Finite ordered simplicial complexes, standard test spaces and rank-one
local systems.

Vertices are integers; a simplex is a sorted tuple of vertices.  The vertex
order orients every simplex and fixes the Alexander-Whitney cup product.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Dict, Iterable, Optional, Sequence, Tuple

from . import linalg as la
from .complexes import INTEGERS, RATIONALS, CochainComplex, ComplexError
from .groups import FgAbelianGroup, presentation_group


class SimplicialError(ValueError):
    pass


@dataclass(frozen=True)
class SimplicialComplex:
    vertices: tuple
    simplices: tuple  # simplices[p] = sorted tuple of p-simplices
    name: str = ""
    hemispheres: Optional[dict] = field(default=None, compare=False)

    @classmethod
    def from_simplices(cls, simplices: Iterable[Sequence[int]], name: str = "", close: bool = True,
                       hemispheres=None) -> "SimplicialComplex":
        given = {tuple(sorted(set(s))) for s in simplices if len(s)}
        if close:
            closed = set()
            for s in given:
                for k in range(1, len(s) + 1):
                    closed.update(combinations(s, k))
            given = closed
        else:
            for s in given:
                for k in range(1, len(s)):
                    for f in combinations(s, k):
                        if f not in given:
                            raise SimplicialError(f"face {f} of {s} missing")
        if not given:
            raise SimplicialError("empty complex")
        dim = max(len(s) for s in given) - 1
        by_dim = tuple(tuple(sorted(s for s in given if len(s) == p + 1)) for p in range(dim + 1))
        verts = tuple(v for (v,) in by_dim[0])
        return cls(verts, by_dim, name, hemispheres)

    @property
    def dim(self) -> int:
        return len(self.simplices) - 1

    def count(self, p: int) -> int:
        return len(self.simplices[p]) if 0 <= p <= self.dim else 0

    def __post_init__(self):
        object.__setattr__(self, "_idx", tuple({s: i for i, s in enumerate(layer)} for layer in self.simplices))
        cof: Dict[tuple, list] = {}
        for layer in self.simplices[1:]:
            for t in layer:
                for i in range(len(t)):
                    cof.setdefault(t[:i] + t[i + 1:], []).append((t, (-1) ** i))
        object.__setattr__(self, "_cof", cof)

    def cofaces(self, s: tuple) -> list:
        """[(t, sign)] for codimension-one cofaces t of s, sign = (-1)^(position of the new vertex)."""
        return self._cof.get(tuple(s), [])

    def index(self, p: int) -> Dict[tuple, int]:
        return self._idx[p] if 0 <= p <= self.dim else {}

    def contains(self, s: Sequence[int]) -> bool:
        s = tuple(sorted(s))
        p = len(s) - 1
        return 0 <= p <= self.dim and s in self.index(p)

    def all_simplices(self):
        for layer in self.simplices:
            yield from layer

    def subcomplex(self, simplices: Iterable[Sequence[int]], name: str = "") -> "SimplicialComplex":
        sub = SimplicialComplex.from_simplices(simplices, name)
        for s in sub.all_simplices():
            if not self.contains(s):
                raise SimplicialError(f"{s} is not a simplex of {self.name or 'X'}")
        return sub

    def is_subcomplex_of(self, other: "SimplicialComplex") -> bool:
        return all(other.contains(s) for s in self.all_simplices())

    def union(self, other: "SimplicialComplex") -> "SimplicialComplex":
        return SimplicialComplex.from_simplices(list(self.all_simplices()) + list(other.all_simplices()))

    def intersection(self, other: "SimplicialComplex") -> Optional["SimplicialComplex"]:
        common = [s for s in self.all_simplices() if other.contains(s)]
        return SimplicialComplex.from_simplices(common) if common else None

    def same_simplices(self, other: "SimplicialComplex") -> bool:
        return set(self.all_simplices()) == set(other.all_simplices())

    def euler_characteristic(self) -> int:
        return sum((-1) ** p * self.count(p) for p in range(self.dim + 1))

    def is_connected(self) -> bool:
        parent = {v: v for v in self.vertices}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for (a, b) in (self.simplices[1] if self.dim >= 1 else ()):
            parent[find(a)] = find(b)
        return len({find(v) for v in self.vertices}) == 1

    def to_json(self):
        return {"vertices": list(self.vertices), "simplices": [list(s) for s in self.all_simplices()]}


# --------------------------------------------------------------------------
# builders

def sphere(k: int) -> SimplicialComplex:
    """Boundary of the (k+1)-simplex, with hemisphere metadata.

    Pole is vertex 0.  D+ is its closed star (everything except the facet
    opposite the pole), D- is that closed facet, and the equator D+ ∩ D- is
    the boundary of the facet.  The basepoint is vertex 1.
    """
    if not 0 <= k <= 4:
        raise SimplicialError(f"sphere dimension {k} unsupported (0 <= k <= 4)")
    verts = list(range(k + 2))
    faces = [s for r in range(1, k + 2) for s in combinations(verts, r)]
    X = SimplicialComplex.from_simplices(faces, name=f"S{k}")
    facet = tuple(verts[1:])
    d_plus = [s for s in faces if s != facet]
    d_minus = [s for r in range(1, len(facet) + 1) for s in combinations(facet, r)]
    equator = [s for s in d_minus if s != facet]
    hemi = {"pole": 0, "basepoint": 1, "D+": d_plus, "D-": d_minus, "equator": equator}
    return SimplicialComplex(X.vertices, X.simplices, X.name, hemi)


def circle() -> SimplicialComplex:
    S = sphere(1)
    return SimplicialComplex(S.vertices, S.simplices, "circle", S.hemispheres)


def point() -> SimplicialComplex:
    return SimplicialComplex.from_simplices([(0,)], name="point")


def full_simplex(n: int) -> SimplicialComplex:
    return SimplicialComplex.from_simplices([tuple(range(n + 1))], name=f"Delta{n}")


def torus() -> SimplicialComplex:
    """Möbius' 7-vertex torus: triangles {i, i+1, i+3} and {i, i+2, i+3} mod 7."""
    tris = []
    for i in range(7):
        tris.append((i, (i + 1) % 7, (i + 3) % 7))
        tris.append((i, (i + 2) % 7, (i + 3) % 7))
    return SimplicialComplex.from_simplices(tris, name="torus")


def projective_plane() -> SimplicialComplex:
    """Six-vertex real projective plane."""
    tris = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 1, 5), (1, 2, 4), (2, 3, 5), (1, 3, 4), (2, 4, 5), (1, 3, 5)]
    return SimplicialComplex.from_simplices(tris, name="rp2")


def wedge_of_circles() -> SimplicialComplex:
    return SimplicialComplex.from_simplices([(0, 1), (1, 2), (0, 2), (0, 3), (3, 4), (0, 4)], name="figure8")


def build_space(name: str, k: Optional[int] = None) -> SimplicialComplex:
    key = name.lower()
    if key == "sphere":
        if k is None:
            raise SimplicialError("sphere needs k")
        return sphere(k)
    builders = {"circle": circle, "torus": torus, "point": point, "rp2": projective_plane,
                "figure8": wedge_of_circles}
    if key == "simplex":
        return full_simplex(k if k is not None else 1)
    if key not in builders:
        raise SimplicialError(f"unknown space {name!r}")
    return builders[key]()


def hemisphere_cover(X: SimplicialComplex):
    """(D+, D-, equator) subcomplexes of a sphere built by :func:`sphere`."""
    if not X.hemispheres:
        raise SimplicialError("complex carries no hemisphere decomposition")
    h = X.hemispheres
    return (X.subcomplex(h["D+"], "D+"), X.subcomplex(h["D-"], "D-"), X.subcomplex(h["equator"], "equator"))


# --------------------------------------------------------------------------
# cochains and chains

def face(s: tuple, i: int) -> tuple:
    return s[:i] + s[i + 1:]


def coboundary_matrix(X: SimplicialComplex, p: int) -> list:
    """d: C^p -> C^{p+1}, (d phi)(v0..v_{p+1}) = sum (-1)^i phi(face_i)."""
    rows, cols = X.count(p + 1), X.count(p)
    M = la.zeros(rows, cols)
    idx = X.index(p)
    for r, s in enumerate(X.simplices[p + 1] if p + 1 <= X.dim else ()):
        for i in range(len(s)):
            M[r][idx[face(s, i)]] += (-1) ** i
    return M


def simplicial_cochains(X: SimplicialComplex, ring: str = RATIONALS) -> CochainComplex:
    dims = [X.count(p) for p in range(X.dim + 1)]
    diffs = {p: coboundary_matrix(X, p) for p in range(X.dim)}
    return CochainComplex(ring, 0, dims, diffs, filtration={p: (p,) * X.count(p) for p in range(X.dim + 1)})


def restriction_matrix(X: SimplicialComplex, U: SimplicialComplex, p: int) -> list:
    """C^p(X) -> C^p(U): keep values on simplices of U."""
    M = la.zeros(U.count(p), X.count(p))
    idx = X.index(p)
    for r, s in enumerate(U.simplices[p] if p <= U.dim else ()):
        M[r][idx[s]] = Fraction(1)
    return M


def boundary_matrix(X: SimplicialComplex, p: int) -> list:
    """del: C_p -> C_{p-1} (transpose of the coboundary)."""
    return la.transpose(coboundary_matrix(X, p - 1), X.count(p - 1)) if p >= 1 else la.zeros(0, X.count(0))


def integral_homology(X: SimplicialComplex, p: int) -> FgAbelianGroup:
    n = X.count(p)
    if n == 0:
        return FgAbelianGroup()
    rk_out = la.rank(boundary_matrix(X, p)) if p >= 1 else 0
    inc = boundary_matrix(X, p + 1) if p + 1 <= X.dim else None
    facs = la.invariant_factors([[int(x) for x in r] for r in inc], n, X.count(p + 1)) if inc else []
    return FgAbelianGroup.from_orders(n - rk_out - len(facs), [d for d in facs if d > 1])


def homology_basis(X: SimplicialComplex, p: int) -> list:
    """Canonical rational cycles representing a basis of H_p(X; Q).

    Cycles are reduced modulo the boundaries and put in RREF, so the first
    nonzero entry of each is 1; this fixes orientations deterministically.
    """
    n = X.count(p)
    if n == 0:
        return []
    Zp = la.nullspace(boundary_matrix(X, p), n) if p >= 1 else [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    if p + 1 <= X.dim and X.count(p + 1):
        Bp = la.span_basis([list(col) for col in zip(*boundary_matrix(X, p + 1))], n)
    else:
        Bp = []
    return la.complement_basis(Bp, la.pivots_of(Bp), Zp, n)


def integral_cycle_basis(X: SimplicialComplex, p: int):
    """Z-basis of H_p(X; Z) generators: (free cycles, [(torsion cycle, order)])."""
    n = X.count(p)
    if n == 0:
        return [], []
    if p >= 1:
        D = [[int(x) for x in r] for r in boundary_matrix(X, p)]
        Zp = la.integer_kernel(D, n)
    else:
        Zp = [[int(i == j) for i in range(n)] for j in range(n)]
    if not Zp:
        return [], []
    k = len(Zp)
    ZT = la.transpose([[Fraction(x) for x in z] for z in Zp], n)
    rels = []
    if p + 1 <= X.dim:
        for col in zip(*boundary_matrix(X, p + 1)):
            c = la.solve(ZT, list(col), k)
            rels.append([int(x) for x in c])
    if not rels:
        return [list(z) for z in Zp], []
    # rows of rels span the relation lattice in Z^k (coordinates w.r.t. Zp);
    # rels = U^{-1} D V^{-1}, so rows of V^{-1} form an adapted basis
    U, D, V = la.smith_normal_form(rels, len(rels), k)
    Vinv = [[int(x) for x in row] for row in la.inverse([[Fraction(x) for x in r] for r in V])]
    free, tors = [], []
    for i in range(k):
        d = D[i][i] if i < len(D) else 0
        gen_coeffs = Vinv[i]
        cyc = [sum(gen_coeffs[j] * Zp[j][t] for j in range(k)) for t in range(n)]
        if d == 0:
            free.append(cyc)
        elif d > 1:
            tors.append((cyc, d))
    return free, tors


def evaluate(cochain: Sequence, cycle: Sequence):
    return sum((Fraction(a) * Fraction(b) for a, b in zip(cochain, cycle)), Fraction(0))


def fundamental_cocycle(X: SimplicialComplex) -> list:
    """Top-degree cocycle supported on the last top simplex with value 1 on
    the canonical fundamental cycle (H_top must be one-dimensional)."""
    top = X.dim
    cycles = homology_basis(X, top)
    if len(cycles) != 1:
        raise SimplicialError("no unique fundamental class")
    z = cycles[0]
    last = X.count(top) - 1
    if not z[last]:
        last = max(i for i, x in enumerate(z) if x)
    sigma = [Fraction(0)] * X.count(top)
    sigma[last] = 1 / z[last]
    return sigma


# --------------------------------------------------------------------------
# local systems

@dataclass(frozen=True)
class LocalSystem:
    """Rank-one local system: holonomy on each oriented edge (u < v).

    Transport along (u, v) multiplies by ``holonomy[(u, v)]``; unlisted
    edges carry 1.  Flatness: on each triangle a < b < c,
    h(a, b) * h(b, c) = h(a, c).
    """

    holonomy: tuple = ()  # sorted ((u, v), Fraction) pairs
    basepoint: int = 0

    @classmethod
    def from_dict(cls, hol: Dict[Tuple[int, int], object], basepoint: int = 0) -> "LocalSystem":
        items = []
        for (u, v), lam in hol.items():
            lam = Fraction(lam)
            if lam == 0:
                raise SimplicialError("holonomy must be invertible")
            if u > v:
                u, v, lam = v, u, 1 / lam
            items.append(((u, v), lam))
        return cls(tuple(sorted(items)), basepoint)

    @classmethod
    def trivial(cls, basepoint: int = 0) -> "LocalSystem":
        return cls((), basepoint)

    def on(self, u: int, v: int) -> Fraction:
        return dict(self.holonomy).get((u, v), Fraction(1))

    def tensor(self, other: "LocalSystem") -> "LocalSystem":
        edges = set(dict(self.holonomy)) | set(dict(other.holonomy))
        return LocalSystem.from_dict({e: self.on(*e) * other.on(*e) for e in edges}, self.basepoint)

    def inverse(self) -> "LocalSystem":
        return LocalSystem.from_dict({e: 1 / lam for e, lam in self.holonomy}, self.basepoint)

    def flatness_defects(self, X: SimplicialComplex) -> list:
        bad = []
        for (a, b, c) in (X.simplices[2] if X.dim >= 2 else ()):
            if self.on(a, b) * self.on(b, c) != self.on(a, c):
                bad.append((a, b, c))
        return bad

    def holonomy_along(self, X: SimplicialComplex, cycle: Sequence[int]) -> Fraction:
        """Product of edge holonomies weighted by an integral 1-cycle."""
        out = Fraction(1)
        for c, e in zip(cycle, X.simplices[1]):
            if c:
                out *= self.on(*e) ** int(c)
        return out

    def to_json(self):
        return {"basepoint": self.basepoint,
                "holonomy": [[u, v, _rat(lam)] for (u, v), lam in self.holonomy]}


def _rat(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def local_system_complex(X: SimplicialComplex, L: LocalSystem) -> CochainComplex:
    """Rational cochains with coefficients in L.

    (d f)(v0..v_{p+1}) = h(v0, v1) f(v1..v_{p+1}) + sum_{i>=1} (-1)^i f(face_i).
    """
    bad = L.flatness_defects(X)
    if bad:
        raise SimplicialError(f"local system is not flat on {bad[0]}")
    diffs = {}
    for p in range(X.dim):
        M = la.zeros(X.count(p + 1), X.count(p))
        idx = X.index(p)
        for r, s in enumerate(X.simplices[p + 1]):
            M[r][idx[face(s, 0)]] += L.on(s[0], s[1])
            for i in range(1, len(s)):
                M[r][idx[face(s, i)]] += (-1) ** i
        diffs[p] = M
    dims = [X.count(p) for p in range(X.dim + 1)]
    return CochainComplex(RATIONALS, 0, dims, diffs, filtration={p: (p,) * X.count(p) for p in range(X.dim + 1)})


# --------------------------------------------------------------------------
# classes

@lru_cache(maxsize=256)
def _homology_basis_cached(X: SimplicialComplex, p: int):
    return tuple(tuple(z) for z in homology_basis(X, p))


def class_coordinates(X: SimplicialComplex, p: int, values: Sequence) -> tuple:
    """Coordinates of a rational p-cocycle: its values on the canonical homology basis."""
    return tuple(evaluate(values, z) for z in _homology_basis_cached(X, p))


@lru_cache(maxsize=256)
def cohomology_dual_basis(X: SimplicialComplex, p: int):
    """Cocycles dual to the canonical homology basis (canonical representatives)."""
    cycles = _homology_basis_cached(X, p)
    if not cycles:
        return ()
    n = X.count(p)
    Z = la.nullspace(coboundary_matrix(X, p), n) if p < X.dim else [
        [Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    B = la.span_basis([list(c) for c in zip(*coboundary_matrix(X, p - 1))], n) if p >= 1 else []
    reps = la.complement_basis(B, la.pivots_of(B), Z, n)
    E = [[evaluate(r, z) for r in reps] for z in cycles]  # E[j][i] = <rep_i, z_j>
    Einv = la.inverse(E)
    # dual_k = sum_i Einv[i][k] rep_i  gives <dual_k, z_j> = delta
    out = []
    for k in range(len(cycles)):
        v = [Fraction(0)] * n
        for i, r in enumerate(reps):
            c = Einv[i][k]
            if c:
                v = [a + c * b for a, b in zip(v, r)]
        out.append(tuple(v))
    return tuple(out)


def representative(X: SimplicialComplex, p: int, coords: Sequence) -> list:
    dual = cohomology_dual_basis(X, p)
    v = [Fraction(0)] * X.count(p)
    for c, e in zip(coords, dual):
        if c:
            v = [a + Fraction(c) * b for a, b in zip(v, e)]
    return v


def solve_coboundary(X: SimplicialComplex, p: int, target: Sequence) -> Optional[list]:
    """Some phi in C^p with d phi = target (a (p+1)-cochain), or None."""
    if p < 0:
        return [] if not any(target) else None
    if X.count(p + 1) == 0:
        return [Fraction(0)] * X.count(p)
    return la.solve(coboundary_matrix(X, p), list(target), X.count(p))
