import random
import unittest

from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_cochain, top_twist
from twistcoh.algebra import preset
from twistcoh.cochains import TensorCochains, class_of
from twistcoh.complexes import RATIONALS, CochainComplex, cohomology
from twistcoh.simplicial import point, sphere, torus
from twistcoh.sseq import (SpectralSequence, SpectralSequenceError, TwistedSpectralSequence, pages, recover_twist,
                           unit_differential)
from twistcoh.twist import TwistingElement, are_gauge_equivalent, mc_extend

LB = preset("laurent_b")
LBO = preset("laurent_b_odd")
Q = preset("q")


def tss(X, A, tau=None, window=None):
    return TwistedSpectralSequence(X, A, tau, None, window)


class UntwistedTests(unittest.TestCase):
    def test_degenerate_at_two(self):
        for X in (point(), sphere(2), sphere(3), torus()):
            for A in (Q, LB):
                with self.subTest(X=X.name, A=A.name):
                    self.assertTrue(tss(X, A).ss.is_degenerate_at(2))

    def test_e2_matches_cohomology(self):
        X = torus()
        s = tss(X, LB, window=(-5, 6))
        p2 = s.ss.page(2)
        C = s.C
        for n in s.ss.degrees:
            self.assertEqual(p2.total_rank(n), cohomology(C, n).free)

    def test_filtration_required(self):
        with self.assertRaises(SpectralSequenceError):
            SpectralSequence(CochainComplex(RATIONALS, 0, [1, 1], {0: [[0]]}))


class SphereTwistTests(unittest.TestCase):
    def test_degeneration_page(self):
        X = sphere(3)
        for k in (1, 4):
            ss = tss(X, LB, top_twist(X, LB, k)).ss
            self.assertFalse(ss.is_degenerate_at(2))
            self.assertFalse(ss.is_degenerate_at(3))
            self.assertTrue(ss.is_degenerate_at(4))

    def test_unit_differential(self):
        X = sphere(3)
        for k in (1, -3, 7):
            tau = top_twist(X, LB, k)
            self.assertTrue(unit_differential(tau, 2).zero)
            d3 = unit_differential(tau, 3)
            self.assertFalse(d3.zero)
            self.assertEqual(d3.cls, class_of(tau.cochain, 3))

    def test_limit_vanishes(self):
        X = sphere(3)
        ss = tss(X, LB, top_twist(X, LB, 2)).ss
        for n in ss.degrees:
            self.assertEqual(ss.limit_ranks(n), 0)

    def test_page_checks(self):
        X = sphere(3)
        s = tss(X, LB, top_twist(X, LB, 3))
        for r in range(0, 4):
            self.assertEqual(s.ss.check_d_squared(r), [])
            self.assertEqual(s.ss.check_page_turn(r), [])
        self.assertEqual(len(pages(s.C, 4, s.ss.degrees)), 5)

    def test_convergence(self):
        X = torus()
        tau = mc_extend(random_cochain(X, LBO, 2, "e", random.Random(4)))
        s = tss(X, LBO, tau, (-5, 6))
        for n in s.ss.degrees[1:-1]:
            self.assertEqual(s.ss.limit_ranks(n), cohomology(s.C, n).free)


class GaugeDegenerationTests(unittest.TestCase):
    @settings(max_examples=10, deadline=None)
    @given(st.integers(0, 10_000), st.booleans())
    def test_degenerate_iff_trivial(self, seed, exact):
        rng = random.Random(seed)
        X = sphere(2)
        if exact:
            lead = random_cochain(X, LBO, 1, "e", rng).d()
        else:
            lead = random_cochain(X, LBO, 2, "e", rng)
        tau = mc_extend(lead)
        degenerate = tss(X, LBO, tau).ss.is_degenerate_at(2)
        trivial = are_gauge_equivalent(tau, TwistingElement.zero(X, LBO)).equivalent
        self.assertEqual(degenerate, trivial)


class RecoveryTests(unittest.TestCase):
    def test_sphere(self):
        X = sphere(3)
        for k in (1, 6, -2):
            tau = top_twist(X, LB, k)
            res = recover_twist(tau)
            self.assertEqual(set(res.classes), {3})
            self.assertEqual(res.classes[3], class_of(tau.cochain, 3))
            self.assertTrue(are_gauge_equivalent(tau, res.comparison).equivalent)

    def test_torus(self):
        X = torus()
        lead = random_cochain(X, LBO, 2, "e", random.Random(9))
        tau = mc_extend(lead)
        res = recover_twist(tau)
        self.assertEqual(set(res.classes), {2})
        self.assertEqual(res.classes[2], class_of(lead, 2))

    def test_trivial(self):
        X = sphere(3)
        self.assertEqual(recover_twist(TwistingElement.zero(X, LB)).classes, {})

    def test_json(self):
        X = sphere(3)
        item = recover_twist(top_twist(X, LB, 7)).to_json(LB)["classes"][0]
        self.assertEqual((item["r"], item["coeff"], item["mono"]), (3, "7", "b"))
