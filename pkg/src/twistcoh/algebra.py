"""Free graded-commutative coefficient algebras over Q, optionally with
inverted even generators.

All degrees are cohomological.  Monomials are exponent tuples indexed like
``GradedAlgebra.generators``; odd generators have exponent 0 or 1 and
inverted generators may carry negative exponents.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Mapping, Optional


class AlgebraError(ValueError):
    pass


class InfiniteRankError(AlgebraError):
    pass


@dataclass(frozen=True)
class GradedAlgebra:
    generators: tuple  # ((name, degree), ...)
    inverted: frozenset = frozenset()
    differential: tuple = ()  # ((name, AlgebraElement), ...)
    name: str = ""

    def __post_init__(self):
        names = [g for g, _ in self.generators]
        if len(set(names)) != len(names):
            raise AlgebraError("duplicate generator names")
        for g in self.inverted:
            if g not in names:
                raise AlgebraError(f"inverted generator {g!r} is not a generator")
            if self.degree_of(g) % 2:
                raise AlgebraError("only even generators can be inverted")
        for g, _ in self.differential:
            if g not in names:
                raise AlgebraError(f"differential given on unknown generator {g!r}")

    # -- basic data -----------------------------------------------------
    @property
    def ngens(self) -> int:
        return len(self.generators)

    def index(self, name: str) -> int:
        for i, (g, _) in enumerate(self.generators):
            if g == name:
                return i
        raise AlgebraError(f"unknown generator {name!r}")

    def degree_of(self, name: str) -> int:
        return dict(self.generators)[name]

    def monomial_degree(self, mono: tuple) -> int:
        return sum(e * d for e, (_, d) in zip(mono, self.generators))

    def unit_monomial(self) -> tuple:
        return (0,) * self.ngens

    def one(self) -> "AlgebraElement":
        return AlgebraElement(self, {self.unit_monomial(): Fraction(1)})

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, {})

    def gen(self, name: str, power: int = 1) -> "AlgebraElement":
        i = self.index(name)
        if power < 0 and name not in self.inverted:
            raise AlgebraError(f"{name} is not invertible")
        mono = tuple(power if j == i else 0 for j in range(self.ngens))
        if self.generators[i][1] % 2 and power > 1:
            return self.zero()
        return AlgebraElement(self, {mono: Fraction(1)})

    def monomial(self, mono: tuple) -> "AlgebraElement":
        return AlgebraElement(self, {tuple(mono): Fraction(1)})

    def scalar(self, c) -> "AlgebraElement":
        return AlgebraElement(self, {self.unit_monomial(): Fraction(c)})

    def d_of_generator(self, name: str) -> "AlgebraElement":
        for g, v in self.differential:
            if g == name:
                return v
        return self.zero()

    @property
    def has_zero_differential(self) -> bool:
        return all(v.is_zero() for _, v in self.differential)

    # -- monomial arithmetic --------------------------------------------
    def multiply_monomials(self, m1: tuple, m2: tuple):
        """Return (sign, monomial) or (0, None) if the product vanishes."""
        sign = 1
        odd = [d % 2 for _, d in self.generators]
        # moving each odd factor of m2 past the odd factors of m1 standing to its right
        for j, e2 in enumerate(m2):
            if e2 and odd[j]:
                passed = sum(m1[i] for i in range(j + 1, self.ngens) if odd[i])
                if passed % 2:
                    sign = -sign
        out = []
        for i, (a, b) in enumerate(zip(m1, m2)):
            e = a + b
            if odd[i] and e > 1:
                return 0, None
            out.append(e)
        return sign, tuple(out)

    def format_monomial(self, mono: tuple) -> str:
        parts = []
        for e, (g, _) in zip(mono, self.generators):
            if e == 1:
                parts.append(g)
            elif e:
                parts.append(f"{g}^{e}")
        return "*".join(parts) or "1"

    def parse_monomial(self, text: str) -> tuple:
        exps = [0] * self.ngens
        text = text.strip()
        if text in ("", "1"):
            return tuple(exps)
        for part in text.split("*"):
            if "^" in part:
                g, e = part.split("^")
                e = int(e)
            else:
                g, e = part, 1
            exps[self.index(g.strip())] += e
        return tuple(exps)

    # -- degree components ----------------------------------------------
    def degree_basis(self, degree: int) -> list:
        """Ordered basis monomials of the given total degree."""
        gens = self.generators
        if not gens:
            return [()] if degree == 0 else []
        inv = [g in self.inverted for g, _ in gens]
        degs = [d for _, d in gens]
        if any(d == 0 for d in degs):
            raise InfiniteRankError("degree-0 generators give infinite rank components")
        if any(inv):
            if len(gens) == 1 or (sum(inv) == 1 and all(d % 2 for d, i in zip(degs, inv) if not i)):
                return self._laurent_basis(degree)
            raise InfiniteRankError("unsupported Laurent algebra: infinite rank components")
        even = [d for d in degs if d % 2 == 0]
        if even and not (all(d < 0 for d in even) or all(d > 0 for d in even)):
            raise InfiniteRankError("even generators of both signs give infinite rank components")
        return self._polynomial_basis(degree)

    def _polynomial_basis(self, degree: int) -> list:
        degs = [d for _, d in self.generators]
        out = []

        def rec(i, remaining, mono):
            if i == len(degs):
                if remaining == 0:
                    out.append(tuple(mono))
                return
            d = degs[i]
            if d % 2:
                choices = (0, 1)
            else:
                later = degs[i + 1:]
                if remaining == 0 and not any(x % 2 for x in later):
                    choices = (0,)
                else:
                    bound = abs(remaining) // abs(d) + sum(abs(x) for x in later if x % 2) // abs(d) + 1
                    choices = range(0, bound + 1)
            for e in choices:
                rec(i + 1, remaining - e * d, mono + [e])

        rec(0, degree, [])
        out = sorted(set(out), key=lambda m: tuple(-e for e in m))
        return out

    def _laurent_basis(self, degree: int) -> list:
        degs = [d for _, d in self.generators]
        inv_i = next(i for i, (g, _) in enumerate(self.generators) if g in self.inverted)
        others = [i for i in range(len(degs)) if i != inv_i]
        out = []
        for bits in product((0, 1), repeat=len(others)):
            rest = degree - sum(b * degs[i] for b, i in zip(bits, others))
            if rest % degs[inv_i]:
                continue
            mono = [0] * len(degs)
            mono[inv_i] = rest // degs[inv_i]
            for b, i in zip(bits, others):
                mono[i] = b
            out.append(tuple(mono))
        out.sort(key=lambda m: tuple(-e for e in m))
        return out

    def rank_in_degree(self, degree: int) -> int:
        return len(self.degree_basis(degree))

    def is_split(self) -> bool:
        return is_split(self)

    def unit_degrees_generator(self) -> int:
        """g >= 0 such that degrees of homogeneous units are exactly gZ."""
        from math import gcd

        g = 0
        for name in self.inverted:
            g = gcd(g, abs(self.degree_of(name)))
        return g


@dataclass(frozen=True)
class AlgebraElement:
    algebra: GradedAlgebra
    terms: Mapping = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for m, c in dict(self.terms).items():
            c = Fraction(c)
            if c:
                m = tuple(m)
                for e, (g, d) in zip(m, self.algebra.generators):
                    if e < 0 and g not in self.algebra.inverted:
                        raise AlgebraError(f"negative power of non-invertible {g}")
                    if d % 2 and e > 1:
                        raise AlgebraError(f"odd generator {g} squared")
                clean[m] = clean.get(m, Fraction(0)) + c
        object.__setattr__(self, "terms", {m: c for m, c in sorted(clean.items()) if c})

    def __hash__(self):
        return hash((self.algebra, tuple(self.terms.items())))

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.algebra == other.algebra and self.terms == other.terms

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degrees(self) -> set:
        return {self.algebra.monomial_degree(m) for m in self.terms}

    @property
    def is_homogeneous(self) -> bool:
        return len(self.degrees) <= 1

    @property
    def degree(self) -> Optional[int]:
        degs = self.degrees
        if len(degs) > 1:
            raise AlgebraError("inhomogeneous element has no degree")
        return next(iter(degs)) if degs else None

    def _check(self, other):
        if not isinstance(other, AlgebraElement):
            other = self.algebra.scalar(other)
        if other.algebra != self.algebra:
            raise AlgebraError("elements of different algebras")
        return other

    def __add__(self, other):
        other = self._check(other)
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t.get(m, 0) + c
        return AlgebraElement(self.algebra, t)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement(self.algebra, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        if not isinstance(other, AlgebraElement):
            c = Fraction(other)
            return AlgebraElement(self.algebra, {m: c * v for m, v in self.terms.items()})
        return multiply(self, other)

    def __rmul__(self, other):
        c = Fraction(other)
        return AlgebraElement(self.algebra, {m: c * v for m, v in self.terms.items()})

    def __pow__(self, n: int):
        out = self.algebra.one()
        for _ in range(n):
            out = out * self
        return out

    def d(self) -> "AlgebraElement":
        """Differential via the Leibniz rule on generators."""
        A = self.algebra
        out = A.zero()
        for mono, c in self.terms.items():
            prefix_deg = 0
            for i, (g, deg) in enumerate(A.generators):
                e = mono[i]
                if e == 0:
                    continue
                dg = A.d_of_generator(g)
                if not dg.is_zero():
                    left = list(mono[:i]) + [0] * (A.ngens - i)
                    right = [0] * (i + 1) + list(mono[i + 1:])
                    # d(x^e) = e x^(e-1) dx for even x; odd x has e = 1
                    rest = [0] * A.ngens
                    rest[i] = e - 1
                    term = A.monomial(tuple(left)) * (Fraction(e) * (A.monomial(tuple(rest)) * dg)) * A.monomial(tuple(right))
                    out = out + (c * (-1) ** prefix_deg) * term
                prefix_deg += e * deg
        return out

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.terms.items():
            mono = self.algebra.format_monomial(m)
            parts.append(f"{c}" if mono == "1" else (mono if c == 1 else f"{c}*{mono}"))
        return " + ".join(parts)


def multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Graded-commutative product with Koszul signs and Laurent cancellation."""
    if a.algebra != b.algebra:
        raise AlgebraError("elements of different algebras")
    A = a.algebra
    out = {}
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            s, m = A.multiply_monomials(m1, m2)
            if s:
                out[m] = out.get(m, 0) + s * c1 * c2
    return AlgebraElement(A, out)


def degree_basis(A: GradedAlgebra, degree: int) -> list:
    return A.degree_basis(degree)


def is_split(A: GradedAlgebra, probe_exponent: int = 4) -> bool:
    """True iff d vanishes on A^{-1}.

    When A^{-1} has infinite rank, monomials with total exponent up to
    ``probe_exponent`` are tested.
    """
    if A.has_zero_differential:
        return True
    for g, deg in A.generators:
        if deg == -1 and not A.d_of_generator(g).is_zero():
            return False
    try:
        monos = A.degree_basis(-1)
    except InfiniteRankError:
        monos = [m for m in _bounded_monomials(A, probe_exponent) if A.monomial_degree(m) == -1]
    return all(A.monomial(m).d().is_zero() for m in monos)


def _bounded_monomials(A: GradedAlgebra, bound: int):
    ranges = []
    for g, d in A.generators:
        if d % 2:
            ranges.append((0, 1))
        elif g in A.inverted:
            ranges.append(range(-bound, bound + 1))
        else:
            ranges.append(range(0, bound + 1))
    for mono in product(*ranges):
        if sum(abs(e) for e in mono) <= bound:
            yield mono


# --------------------------------------------------------------------------
# presets

PRESETS = ("q", "laurent_b", "tmf_poly", "laurent_b_odd")


def preset(name: str) -> GradedAlgebra:
    """Coefficient algebras of the differentially simple examples.

    ``q``: Q in degree 0.  ``laurent_b``: Q[b, 1/b], deg b = -2.
    ``tmf_poly``: Q[c4, c6] with degrees -8, -12.  ``laurent_b_odd`` adds an
    exterior generator e of degree -1 to ``laurent_b``; it is the smallest
    split algebra with A^{-1} != 0, needed for degree-2 twists.
    """
    key = name.lower().replace("-", "_")
    aliases = {"q": "q", "laurentb": "laurent_b", "laurent_b": "laurent_b", "tmfpoly": "tmf_poly",
               "tmf_poly": "tmf_poly", "laurent_b_odd": "laurent_b_odd", "laurentbodd": "laurent_b_odd"}
    if key not in aliases:
        raise AlgebraError(f"unknown preset {name!r}; expected one of {PRESETS}")
    key = aliases[key]
    if key == "q":
        return GradedAlgebra((), name="q")
    if key == "laurent_b":
        return GradedAlgebra((("b", -2),), frozenset({"b"}), name="laurent_b")
    if key == "tmf_poly":
        return GradedAlgebra((("c4", -8), ("c6", -12)), name="tmf_poly")
    return GradedAlgebra((("b", -2), ("e", -1)), frozenset({"b"}), name="laurent_b_odd")
