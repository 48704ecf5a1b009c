"""Components of the classification of twists: degree shift, holonomy, and
the rational twist class.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Dict, Optional, Sequence, Tuple

from .algebra import GradedAlgebra
from .cochains import CohomologyClass
from .groups import FgAbelianGroup, hom_group
from .simplicial import LocalSystem, SimplicialComplex, integral_cycle_basis, integral_homology
from .sseq import recover_twist
from .twist import TwistingElement

DEFAULT_PRIMES = (2, 3, 5, 7)


class PicardError(ValueError):
    pass


def h1_with_units(X: SimplicialComplex, G: FgAbelianGroup) -> FgAbelianGroup:
    """H^1(X; G) = Hom(H_1(X; Z), G) for connected X."""
    if not X.is_connected():
        raise PicardError("complex is disconnected; compute per component")
    if not G.is_finitely_generated:
        raise PicardError("coefficient group must be finitely generated")
    return hom_group(integral_homology(X, 1), G)


def pic0_point(A: GradedAlgebra) -> FgAbelianGroup:
    """Shift classes of invertible modules over a point: Z modulo the
    degrees of the invertible generators."""
    if A.name not in ("q", "laurent_b", "tmf_poly", "laurent_b_odd"):
        raise PicardError(f"no Picard data for algebra {A.name!r}")
    g = 0
    for name in A.inverted:
        g = gcd(g, abs(A.degree_of(name)))
    return FgAbelianGroup(1) if g == 0 else FgAbelianGroup.cyclic(g)


@dataclass(frozen=True)
class UnitGroup:
    """Q^x sliced as {±1} × (free abelian on a declared list of primes)."""

    primes: tuple = DEFAULT_PRIMES

    @property
    def group(self) -> FgAbelianGroup:
        return FgAbelianGroup(len(self.primes), (2,))

    def encode(self, x) -> Tuple[int, tuple]:
        """(sign bit, exponents) of a nonzero rational."""
        x = Fraction(x)
        if x == 0:
            raise PicardError("0 is not a unit")
        sign = 1 if x < 0 else 0
        num, den = abs(x.numerator), x.denominator
        exps = []
        for p in self.primes:
            e = 0
            while num % p == 0:
                num //= p
                e += 1
            while den % p == 0:
                den //= p
                e -= 1
            exps.append(e)
        if num != 1 or den != 1:
            raise PicardError(f"{x} involves primes outside {list(self.primes)}")
        return sign, tuple(exps)

    def decode(self, sign: int, exps: Sequence[int]) -> Fraction:
        out = Fraction(-1 if sign % 2 else 1)
        for p, e in zip(self.primes, exps):
            out *= Fraction(p) ** e
        return out

    def to_json(self):
        return {"sign": {"free": 0, "torsion": [2]}, "primes": list(self.primes),
                "group": self.group.to_json()}


def pi1_units(X: SimplicialComplex, A: GradedAlgebra, primes: Sequence[int] = DEFAULT_PRIMES) -> UnitGroup:
    """Degree-0 cocycles of the split presets are the scalars, so the
    automorphisms of a twist are Q^x for every preset."""
    if not A.has_zero_differential:
        raise PicardError("unit description needs a split preset")
    return UnitGroup(tuple(primes))


@dataclass(frozen=True)
class HolonomyClass:
    """Values of a rank-one local system on a basis of H_1(X; Z)."""

    free: tuple = ()     # holonomy on the free generators
    torsion: tuple = ()  # ((value, order), ...)

    @property
    def is_trivial(self) -> bool:
        return all(v == 1 for v in self.free) and all(v == 1 for v, _ in self.torsion)

    def to_json(self, units: UnitGroup):
        def enc(v):
            s, e = units.encode(v)
            return {"value": _rat(v), "sign": s, "exponents": list(e)}
        return {"free": [enc(v) for v in self.free], "torsion": [dict(enc(v), order=o) for v, o in self.torsion]}


def holonomy_class(X: SimplicialComplex, L: LocalSystem) -> HolonomyClass:
    if L.flatness_defects(X):
        raise PicardError("local system is not flat")
    free, tors = integral_cycle_basis(X, 1)
    fv = tuple(L.holonomy_along(X, z) for z in free)
    tv = []
    for z, order in tors:
        v = L.holonomy_along(X, z)
        if v ** order != 1:
            raise PicardError("holonomy on a torsion class is not a root of unity")
        tv.append((v, order))
    return HolonomyClass(fv, tuple(tv))


def _rat(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class PicClassification:
    basepoint_class: int
    basepoint_group: FgAbelianGroup
    holonomy_class: HolonomyClass
    rational_class: Dict[int, CohomologyClass] = field(default_factory=dict)

    def key(self):
        return (self.basepoint_class, self.holonomy_class,
                tuple(sorted((r, c) for r, c in self.rational_class.items())))

    def __eq__(self, other):
        return isinstance(other, PicClassification) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    @property
    def is_trivial(self) -> bool:
        return self.basepoint_class == 0 and self.holonomy_class.is_trivial and not self.rational_class

    def to_json(self, A: GradedAlgebra, units: UnitGroup):
        return {
            "basepoint_class": self.basepoint_class,
            "basepoint_group": self.basepoint_group.to_json(),
            "holonomy_class": self.holonomy_class.to_json(units),
            "rational_class": [{"r": r, "class": c.to_json(A)} for r, c in sorted(self.rational_class.items())],
        }


def classify(X: SimplicialComplex, A: GradedAlgebra, shift: int = 0, L: Optional[LocalSystem] = None,
             tau: Optional[TwistingElement] = None, window=None) -> PicClassification:
    """(shift reduced in pic0, holonomy on H_1, leading rational classes of τ)."""
    if not A.has_zero_differential:
        raise PicardError("classification needs a split preset")
    if not X.is_connected():
        raise PicardError("complex is disconnected")
    P = pic0_point(A)
    base = shift % P.torsion[0] if P.torsion else shift
    hol = holonomy_class(X, L or LocalSystem.trivial(X.vertices[0]))
    rational = {}
    if tau is not None and not tau.is_zero():
        rational = dict(recover_twist(tau, window).classes)
    return PicClassification(base, P, hol, rational)
