"""Abelian groups in normal form and homomorphisms between finitely
generated ones.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Sequence

from .linalg import smith_normal_form


@dataclass(frozen=True)
class FgAbelianGroup:
    """Z^free + Z/d1 + ... + Z/dk  (+ Q^rational + (Q/Z)^qmodz).

    Torsion is kept as invariant factors d1 | d2 | ... with every di >= 2.
    The two divisible summands only arise from mixed integral/rational
    complexes (differential cohomology); they are zero for anything
    finitely generated.
    """

    free: int = 0
    torsion: tuple = ()
    rational: int = 0
    qmodz: int = 0

    def __post_init__(self):
        tors = tuple(int(d) for d in self.torsion)
        if any(d < 2 for d in tors):
            raise ValueError(f"invariant factors must be >= 2: {tors}")
        if any(tors[i + 1] % tors[i] for i in range(len(tors) - 1)):
            raise ValueError(f"invariant factors must divide successively: {tors}")
        object.__setattr__(self, "torsion", tors)
        if min(self.free, self.rational, self.qmodz) < 0:
            raise ValueError("ranks must be nonnegative")

    @classmethod
    def from_orders(cls, free: int = 0, orders: Sequence[int] = (), rational: int = 0, qmodz: int = 0):
        """Normalize an arbitrary list of cyclic orders (0 means Z, 1 dropped)."""
        free += sum(1 for d in orders if d == 0)
        diag = [abs(int(d)) for d in orders if abs(int(d)) > 1]
        return cls(free, tuple(_invariant_factors_of_diagonal(diag)), rational, qmodz)

    @classmethod
    def cyclic(cls, n: int):
        return cls.from_orders(0, [n])

    @property
    def is_trivial(self) -> bool:
        return not (self.free or self.torsion or self.rational or self.qmodz)

    @property
    def is_finitely_generated(self) -> bool:
        return not (self.rational or self.qmodz)

    @property
    def order(self):
        """Cardinality, or None when infinite."""
        if self.free or self.rational or self.qmodz:
            return None
        out = 1
        for d in self.torsion:
            out *= d
        return out

    def __add__(self, other: "FgAbelianGroup") -> "FgAbelianGroup":
        return FgAbelianGroup.from_orders(
            self.free + other.free,
            list(self.torsion) + list(other.torsion),
            self.rational + other.rational,
            self.qmodz + other.qmodz,
        )

    def to_json(self) -> dict:
        out = {"free": self.free, "torsion": list(self.torsion)}
        if self.rational:
            out["rational"] = self.rational
        if self.qmodz:
            out["qmodz"] = self.qmodz
        return out

    @classmethod
    def from_json(cls, data: dict) -> "FgAbelianGroup":
        return cls.from_orders(data.get("free", 0), data.get("torsion", []),
                               data.get("rational", 0), data.get("qmodz", 0))

    def __str__(self):
        parts = []
        if self.free:
            parts.append("Z" if self.free == 1 else f"Z^{self.free}")
        parts += [f"Z/{d}" for d in self.torsion]
        if self.rational:
            parts.append("Q" if self.rational == 1 else f"Q^{self.rational}")
        if self.qmodz:
            parts.append("Q/Z" if self.qmodz == 1 else f"(Q/Z)^{self.qmodz}")
        return " + ".join(parts) or "0"


def _invariant_factors_of_diagonal(diag):
    n = len(diag)
    if n == 0:
        return []
    _, D, _ = smith_normal_form([[diag[i] if i == j else 0 for j in range(n)] for i in range(n)])
    return [D[i][i] for i in range(n) if D[i][i] > 1]


ZERO_GROUP = FgAbelianGroup()
Z = FgAbelianGroup(1)


def generator_orders(G: FgAbelianGroup) -> list:
    """Orders of the standard generators (0 for infinite cyclic)."""
    if not G.is_finitely_generated:
        raise ValueError("not finitely generated")
    return [0] * G.free + list(G.torsion)


def relation_rows(G: FgAbelianGroup) -> list:
    orders = generator_orders(G)
    n = len(orders)
    return [[d if i == j else 0 for j in range(n)] for i, d in enumerate(orders) if d]


@dataclass(frozen=True)
class Hom:
    """Homomorphism between finitely generated groups, given on standard
    generators: column j is the image of generator j of the source."""

    source: FgAbelianGroup
    target: FgAbelianGroup
    matrix: tuple = field(default=())

    def __post_init__(self):
        m = len(generator_orders(self.target))
        n = len(generator_orders(self.source))
        mat = tuple(tuple(int(x) for x in row) for row in self.matrix) if self.matrix else tuple(
            tuple(0 for _ in range(n)) for _ in range(m))
        if len(mat) != m or any(len(r) != n for r in mat):
            raise ValueError("matrix shape does not match generators")
        object.__setattr__(self, "matrix", mat)
        # well-definedness: order of generator j kills its image
        tord = generator_orders(self.target)
        for j, d in enumerate(generator_orders(self.source)):
            if d == 0:
                continue
            for i, t in enumerate(tord):
                v = d * mat[i][j]
                if (t == 0 and v != 0) or (t and v % t):
                    raise ValueError(f"generator {j} of order {d} not mapped to a {d}-torsion element")

    def kernel(self) -> FgAbelianGroup:
        from .modules import MixedModule

        n = len(generator_orders(self.source))
        # x with Fx in the target relation lattice, modulo source relations
        F = [list(r) for r in self.matrix]
        tgt_rel = MixedModule.from_generators(len(F), z_gens=relation_rows(self.target))
        src_full = MixedModule.from_generators(n, z_gens=[[1 if i == j else 0 for i in range(n)] for j in range(n)])
        K = src_full.preimage(F, tgt_rel, len(F))
        rel = MixedModule.from_generators(n, z_gens=relation_rows(self.source))
        return K.quotient_structure(rel)

    def cokernel(self) -> FgAbelianGroup:
        m = len(generator_orders(self.target))
        n = len(generator_orders(self.source))
        cols = [[self.matrix[i][j] for i in range(m)] for j in range(n)] + relation_rows(self.target)
        if m == 0:
            return ZERO_GROUP
        # relations are rows of the presentation of coker
        return presentation_group(cols, m)


def presentation_group(relations: Sequence[Sequence[int]], ngens: int) -> FgAbelianGroup:
    """Z^ngens modulo the span of the given relation rows."""
    rels = [list(r) for r in relations if any(r)]
    if not rels:
        return FgAbelianGroup(ngens)
    _, D, _ = smith_normal_form(rels, len(rels), ngens)
    diag = [D[i][i] for i in range(min(len(rels), ngens))]
    r = sum(1 for d in diag if d)
    return FgAbelianGroup.from_orders(ngens - r, [d for d in diag if d])


def hom_group(A: FgAbelianGroup, B: FgAbelianGroup) -> FgAbelianGroup:
    """Hom(A, B) for finitely generated A and B."""
    out = ZERO_GROUP
    for a in generator_orders(A):
        for b in generator_orders(B):
            if a == 0 and b == 0:
                out = out + Z
            elif a == 0:
                out = out + FgAbelianGroup.cyclic(b)
            elif b == 0:
                continue
            else:
                out = out + FgAbelianGroup.cyclic(gcd(a, b))
    return out
