"""Submodules of Z^a + Q^b (and plain Q^n / Z^n) with canonical forms.

A submodule is stored as ``space + lattice`` where ``space`` is a rational
subspace (RREF rows) and ``lattice`` is a finitely generated subgroup of the
complement, reduced modulo the space and put in Hermite normal form.  Every
finitely generated subgroup of Q^n is a lattice in its span, which is what
makes the canonical form and the quotient computation below exact.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

from . import linalg as la
from .groups import FgAbelianGroup, presentation_group


class MixedModule:
    __slots__ = ("dim", "space", "space_pivots", "lattice", "lattice_pivots")

    def __init__(self, dim: int, space, lattice):
        self.dim = dim
        self.space = space
        self.space_pivots = la.pivots_of(space)
        self.lattice = lattice
        self.lattice_pivots = la.pivots_of(lattice)

    @classmethod
    def from_generators(cls, dim: int, z_gens: Sequence[Sequence] = (), q_gens: Sequence[Sequence] = ()):
        space = la.span_basis([list(map(Fraction, v)) for v in q_gens], dim) if q_gens else []
        piv = la.pivots_of(space)
        reduced = [la.reduce_mod(list(map(Fraction, v)), space, piv) for v in z_gens]
        lattice = la.rational_hnf(reduced, dim)
        return cls(dim, space, lattice)

    @classmethod
    def zero(cls, dim: int):
        return cls(dim, [], [])

    @classmethod
    def full(cls, dim: int, int_mask: Sequence[bool] = ()):
        """Whole ambient: Z on coordinates flagged in ``int_mask``, Q elsewhere."""
        mask = list(int_mask) + [False] * (dim - len(int_mask))
        unit = lambda i: [Fraction(int(i == j)) for j in range(dim)]
        return cls.from_generators(dim, [unit(i) for i in range(dim) if mask[i]],
                                   [unit(i) for i in range(dim) if not mask[i]])

    # ------------------------------------------------------------------
    def generators(self):
        return [list(r) for r in self.lattice], [list(r) for r in self.space]

    @property
    def lattice_rank(self) -> int:
        return len(self.lattice)

    @property
    def space_dim(self) -> int:
        return len(self.space)

    def is_zero(self) -> bool:
        return not self.lattice and not self.space

    def key(self):
        return (self.dim, tuple(map(tuple, self.space)), tuple(map(tuple, self.lattice)))

    def __eq__(self, other):
        return isinstance(other, MixedModule) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"MixedModule(dim={self.dim}, lattice_rank={self.lattice_rank}, space_dim={self.space_dim})"

    def contains(self, v) -> bool:
        w = la.reduce_mod(list(map(Fraction, v)), self.space, self.space_pivots)
        for row, pc in zip(self.lattice, self.lattice_pivots):
            c = w[pc] / row[pc]
            if c.denominator != 1:
                return False
            if c:
                w = [a - c * b for a, b in zip(w, row)]
        return all(not x for x in w)

    def __le__(self, other: "MixedModule") -> bool:
        return all(other.contains(v) for v in self.lattice) and all(
            la.in_span(v, other.space, other.space_pivots) for v in self.space)

    def __add__(self, other: "MixedModule") -> "MixedModule":
        return MixedModule.from_generators(self.dim, self.lattice + other.lattice, self.space + other.space)

    def image(self, F, target_dim: int) -> "MixedModule":
        z, q = self.generators()
        return MixedModule.from_generators(target_dim, [la.matvec(F, v) for v in z], [la.matvec(F, v) for v in q])

    # ------------------------------------------------------------------
    def preimage(self, F, target: "MixedModule", target_dim: int) -> "MixedModule":
        """{x in self : F x in target}."""
        z, q = self.generators()
        tz, tq = target.generators()
        # parameters: (lambda_z, mu_z | lambda_q, mu_q); integral ones first
        cols_z = [la.matvec(F, v) for v in z] + [[-x for x in v] for v in tz]
        cols_q = [la.matvec(F, v) for v in q] + [[-x for x in v] for v in tq]
        p, qn = len(cols_z), len(cols_q)
        H = la.transpose(cols_z + cols_q, target_dim) if (p + qn) else [[] for _ in range(target_dim)]
        kz, kq = kernel_params(H, p, qn)

        def back(vec):
            lz = vec[: len(z)]
            lq = vec[p: p + len(q)]
            out = [Fraction(0)] * self.dim
            for c, g in zip(lz, z):
                if c:
                    out = [a + c * b for a, b in zip(out, g)]
            for c, g in zip(lq, q):
                if c:
                    out = [a + c * b for a, b in zip(out, g)]
            return out

        return MixedModule.from_generators(self.dim, [back(v) for v in kz], [back(v) for v in kq])

    def kernel(self, F, target_dim: int) -> "MixedModule":
        return self.preimage(F, MixedModule.zero(target_dim), target_dim)

    def intersect(self, other: "MixedModule") -> "MixedModule":
        ident = la.identity(self.dim)
        return self.preimage(ident, other, self.dim)

    # ------------------------------------------------------------------
    def quotient_structure(self, sub: "MixedModule") -> FgAbelianGroup:
        """Isomorphism type of self / sub (sub must be contained in self)."""
        if not sub <= self:
            raise ValueError("quotient_structure: not a submodule")
        n = self.dim
        # work modulo the divisible part of sub
        vt, vt_piv = sub.space, sub.space_pivots
        red = lambda v: la.reduce_mod(v, vt, vt_piv)
        S_space = la.span_basis([red(v) for v in self.space], n) if self.space else []
        S_piv = la.pivots_of(S_space)
        proj = lambda v: la.reduce_mod(red(v), S_space, S_piv)
        LT = [red(v) for v in sub.lattice]
        rank_LT = la.rank(LT) if LT else 0
        pLT = [proj(v) for v in sub.lattice]
        rank_pLT = la.rank(pLT) if pLT else 0
        t = rank_LT - rank_pLT
        v = len(S_space)
        # finitely generated part p(L_S) / p(L_T)
        pLS = la.rational_hnf([proj(x) for x in self.lattice], n)
        m = len(pLS)
        if m == 0:
            fg = FgAbelianGroup()
        else:
            basisT = la.transpose(pLS)
            rels = []
            for w in pLT:
                if not any(w):
                    continue
                c = la.solve(basisT, w, m)
                if c is None or any(x.denominator != 1 for x in c):
                    raise ArithmeticError("sublattice not contained in lattice")
                rels.append([int(x) for x in c])
            fg = presentation_group(rels, m)
        return FgAbelianGroup(fg.free, fg.torsion, fg.rational + (v - t), fg.qmodz + t)


def kernel_params(H, p: int, q: int):
    """Kernel of the map Z^p + Q^q -> Q^N given by H (N x (p+q)).

    Returns (z_generators, q_generators) in parameter coordinates.
    """
    n = p + q
    if n == 0:
        return [], []
    K = la.nullspace(H, n) if H else [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    if not K:
        return [], []
    k = len(K)
    # Bp: projection of the kernel basis to integral coordinates (p x k)
    Bp = [[K[j][i] for j in range(k)] for i in range(p)]
    q_out = []
    if p == 0:
        return [], K
    for c in la.nullspace(Bp, k):
        q_out.append([sum((c[j] * K[j][i] for j in range(k)), Fraction(0)) for i in range(n)])
    # integral points of W = colspace(Bp) in Z^p
    W = la.span_basis(la.transpose(Bp), p)
    if not W:
        return [], q_out
    perp = la.nullspace(W, p)
    if perp:
        D = la.common_denominator(perp)
        R = [[int(x * D) for x in row] for row in perp]
        sat = la.integer_kernel(R, p)
    else:
        sat = [[int(i == j) for i in range(p)] for j in range(p)]
    z_out = []
    for w in sat:
        c = la.solve(Bp, w, k)
        z_out.append([sum((c[j] * K[j][i] for j in range(k)), Fraction(0)) for i in range(n)])
    return z_out, q_out


def subquotient_iso(Z1: MixedModule, B1: MixedModule, Z2: MixedModule, B2: MixedModule, F, dim2) -> bool:
    """Whether F induces an isomorphism Z1/B1 -> Z2/B2."""
    if not (Z1.image(F, dim2) <= Z2 and B1.image(F, dim2) <= B2):
        raise ValueError("map is not well defined on the subquotients")
    injective = Z1.preimage(F, B2, dim2) == B1
    surjective = (Z1.image(F, dim2) + B2) == Z2
    return injective and surjective
