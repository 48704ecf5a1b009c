"""Twisted cohomology of a sphere S^{k+1} from homotopy-group data.

Gluing two trivialized hemispheres along S^k gives, in total shift
N = n + m, an exact sequence

    0 -> coker(phi_{N-1}) -> R^{E[m]}(S^{k+1}) -> ker(phi_N) -> 0

with phi_j : pi_{-j} + pi_{-j} -> pi_{-j} + pi_{k-j}, (x, y) |-> (x - y, nu x).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence

from .groups import ZERO_GROUP, FgAbelianGroup, Hom, generator_orders


class HomotopyDataError(ValueError):
    pass


@dataclass(frozen=True)
class RingHomotopyData:
    name: str
    groups: tuple  # ((j, FgAbelianGroup), ...) for a contiguous range
    unit: int = 0  # index of the unit among the generators of pi_0

    def __post_init__(self):
        g = dict(self.groups)
        if 0 not in g or not generator_orders(g[0]):
            raise HomotopyDataError("pi_0 must contain a unit")

    @property
    def range(self):
        js = [j for j, _ in self.groups]
        return min(js), max(js)

    def pi(self, j: int) -> FgAbelianGroup:
        lo, hi = self.range
        if not lo <= j <= hi:
            raise HomotopyDataError(f"pi_{j} outside the stored range [{lo}, {hi}]")
        return dict(self.groups)[j]


def k_theory(span: int = 24) -> RingHomotopyData:
    return RingHomotopyData("K", tuple((j, FgAbelianGroup(1) if j % 2 == 0 else ZERO_GROUP)
                                       for j in range(-span, span + 1)))


def eilenberg_maclane_z(span: int = 24) -> RingHomotopyData:
    return RingHomotopyData("HZ", tuple((j, FgAbelianGroup(1) if j == 0 else ZERO_GROUP)
                                        for j in range(-span, span + 1)))


RING_PRESETS = {"k": k_theory, "K": k_theory, "hz": eilenberg_maclane_z, "HZ": eilenberg_maclane_z}


def ring_preset(name: str) -> RingHomotopyData:
    if name not in RING_PRESETS:
        raise HomotopyDataError(f"unknown ring preset {name!r}")
    return RING_PRESETS[name]()


@dataclass(frozen=True)
class TwistDescriptor:
    """Sphere parameter k (twist on S^{k+1}), shift n and the maps
    nu : pi_j -> pi_{j+k} given as integer matrices on standard generators."""

    k: int
    nu: Callable[[int], Sequence[Sequence[int]]]
    n: int = 0

    @classmethod
    def multiplication(cls, ring: RingHomotopyData, k: int, factor: int, n: int = 0) -> "TwistDescriptor":
        """nu = multiplication by ``factor`` wherever pi_j and pi_{j+k} are both Z^r."""

        def nu(j):
            src, tgt = ring.pi(j), ring.pi(j + k)
            a, b = len(generator_orders(src)), len(generator_orders(tgt))
            same = src == tgt and not src.torsion
            return [[factor if (same and i == c) else 0 for c in range(a)] for i in range(b)]

        return cls(k, nu, n)

    @classmethod
    def from_matrices(cls, k: int, mats: Dict[int, Sequence[Sequence[int]]], n: int = 0) -> "TwistDescriptor":
        return cls(k, lambda j: mats.get(j, None), n)


@dataclass(frozen=True)
class ExtensionReport:
    sub: FgAbelianGroup
    quot: FgAbelianGroup
    resolved: Optional[FgAbelianGroup]

    def to_json(self):
        out = {"sub": self.sub.to_json(), "quot": self.quot.to_json()}
        out["resolved"] = self.resolved.to_json() if self.resolved is not None else None
        return out


def phi(ring: RingHomotopyData, t: TwistDescriptor, j: int) -> Hom:
    """(x, y) |-> (x - y, nu x) on pi_{-j} + pi_{-j}."""
    P, Q = ring.pi(-j), ring.pi(t.k - j)
    if P.torsion or Q.torsion:
        # generators of a torsion-free group are unambiguous, which keeps the block matrix honest
        raise HomotopyDataError("the sphere calculator needs torsion-free homotopy groups")
    a, b = len(generator_orders(P)), len(generator_orders(Q))
    nu = t.nu(-j)
    if nu is None:
        nu = [[0] * a for _ in range(b)]
    if len(nu) != b or any(len(r) != a for r in nu):
        raise HomotopyDataError(f"nu on pi_{-j} has the wrong shape")
    top = [[(1 if c == i else 0) for c in range(a)] + [(-1 if c == i else 0) for c in range(a)] for i in range(a)]
    bottom = [list(nu[i]) + [0] * a for i in range(b)]
    return Hom(FgAbelianGroup(2 * a), FgAbelianGroup(a + b), top + bottom)


def sphere_twisted(ring: RingHomotopyData, t: TwistDescriptor, m: int) -> ExtensionReport:
    """R^{E[m]}(S^{k+1}) as an extension of ker(phi_N) by coker(phi_{N-1})."""
    N = t.n + m
    quot = phi(ring, t, N).kernel()
    sub = phi(ring, t, N - 1).cokernel()
    resolved = None
    if sub.is_trivial:
        resolved = quot
    elif quot.is_trivial:
        resolved = sub
    return ExtensionReport(sub, quot, resolved)


def untwisted_sphere(ring: RingHomotopyData, k: int, N: int) -> FgAbelianGroup:
    """R^N(S^{k+1}) = pi_{-N} + pi_{k+1-N} (split)."""
    return ring.pi(-N) + ring.pi(k + 1 - N)
