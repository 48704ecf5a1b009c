import sys
from fractions import Fraction

import pytest

from twistcoh.algebra import preset
from twistcoh.cochains import Cochain
from twistcoh.simplicial import fundamental_cocycle, sphere
from twistcoh.twist import TwistingElement


def top_twist(X, A, k, mono="b"):
    """k * mono * sigma on the top cell of X."""
    sigma = fundamental_cocycle(X)
    coeff = A.monomial(A.parse_monomial(mono))
    return TwistingElement(Cochain.from_values(X, A, X.dim, [Fraction(k) * v for v in sigma], coeff))


@pytest.fixture(scope="session")
def laurent():
    return preset("laurent_b")


@pytest.fixture(scope="session")
def s3():
    return sphere(3)


def random_cochain(X, A, p, mono, rng, spread=3):
    vals = [Fraction(rng.randint(-spread, spread)) for _ in range(X.count(p))]
    return Cochain.from_values(X, A, p, vals, A.monomial(A.parse_monomial(mono)))


def random_top_twist(X, A, rng, mono):
    """A random top-degree cochain times ``mono``, completed to a Maurer-Cartan element."""
    from twistcoh.twist import mc_extend
    while True:
        x = random_cochain(X, A, X.dim, mono, rng)
        if not x.is_zero():
            return mc_extend(x)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
