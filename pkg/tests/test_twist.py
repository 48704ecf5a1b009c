import random
import unittest
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_cochain, random_top_twist, top_twist
from twistcoh.algebra import preset
from twistcoh.cochains import Cochain, TensorCochains, class_of
from twistcoh.complexes import InvariantViolation, cohomology
from twistcoh.simplicial import circle, hemisphere_cover, sphere, torus
from twistcoh.twist import (Obstruction, TwistError, TwistingElement, are_gauge_equivalent, gauge_apply,
                            intertwiner_defect, mc_extend, mv_exactness, nu_invariant, suspension_class,
                            twist_diagnostics, twisted_complex)

LB = preset("laurent_b")
LBO = preset("laurent_b_odd")


def ranks(X, A, tau, window):
    T = TensorCochains(X, A, window)
    C = twisted_complex(X, A, tau, window)
    return [cohomology(C, n).free for n in T.valid_degrees()]


class ExtendTests(unittest.TestCase):
    def test_zero(self):
        X = sphere(3)
        self.assertTrue(mc_extend(Cochain.zero(X, LB)).is_zero())

    def test_sphere_top(self):
        X = sphere(3)
        lead = top_twist(X, LB, 4).cochain
        tau = mc_extend(lead)
        self.assertEqual(tau.cochain, lead)

    def test_torus_degree_two(self):
        X = torus()
        lead = random_cochain(X, LBO, 2, "e", random.Random(3))
        tau = mc_extend(lead)
        self.assertIsInstance(tau, TwistingElement)
        self.assertEqual(tau.cochain, lead)

    def test_non_cocycle(self):
        X = sphere(3)
        lead = random_cochain(X, LB, 2, "b", random.Random(1))
        with self.assertRaises(TwistError):
            mc_extend(lead)

    def test_diagnostics(self):
        X = sphere(3)
        bad = Cochain.from_values(X, LB, 2, [1] * X.count(2), LB.gen("b"))
        self.assertTrue(twist_diagnostics(bad))
        self.assertEqual(twist_diagnostics(top_twist(X, LB, 2).cochain), [])

    def test_mc_enforced(self):
        X = sphere(3)
        bad = Cochain.from_values(X, LBO, 2, [1] + [0] * (X.count(2) - 1), LBO.gen("e"))
        with self.assertRaises((InvariantViolation, TwistError)):
            TwistingElement(bad)


class TwistedComplexTests(unittest.TestCase):
    def test_zero_twist_matches(self):
        X = sphere(3)
        a = twisted_complex(X, LB, None, (-6, 6))
        b = TensorCochains(X, LB, (-6, 6)).complex()
        self.assertEqual(a.dims, b.dims)
        for n in range(-6, 6):
            self.assertEqual(a.d(n), b.d(n))

    def test_acyclic(self):
        X = sphere(3)
        for k in (1, -2, 7):
            self.assertEqual(set(ranks(X, LB, top_twist(X, LB, k), (-6, 6))), {0})

    def test_untwisted(self):
        r = ranks(sphere(3), LB, TwistingElement.zero(sphere(3), LB), (-6, 6))
        self.assertEqual(set(r), {1})


class GaugeTests(unittest.TestCase):
    def test_zero_parameter(self):
        X = sphere(3)
        tau = top_twist(X, LB, 3)
        new, g = gauge_apply(Cochain.zero(X, LB), tau)
        self.assertEqual(new, tau)
        self.assertEqual(g, Cochain.unit(X, LB))

    def test_commuting_case(self):
        X = sphere(3)
        tau = top_twist(X, LB, 2)
        beta = random_cochain(X, LB, 2, "b", random.Random(7))
        new, _ = gauge_apply(beta, tau)
        self.assertEqual(new.cochain, tau.cochain + beta.d())

    def test_random_parameter_sphere(self):
        rng = random.Random(11)
        X = sphere(2)
        tau = mc_extend(random_cochain(X, LBO, 2, "e", rng))
        beta = random_cochain(X, LBO, 1, "e", rng) + random_cochain(X, LBO, 2, "b", rng)
        new, g = gauge_apply(beta, tau)
        T = TensorCochains(X, LBO, (-5, 6))
        self.assertIsNone(intertwiner_defect(T, g, tau, new))
        self.assertEqual(ranks(X, LBO, tau, (-5, 6)), ranks(X, LBO, new, (-5, 6)))

    def test_self_equivalent(self):
        tau = top_twist(sphere(3), LB, 3)
        res = are_gauge_equivalent(tau, tau)
        self.assertTrue(res.equivalent)
        self.assertTrue(res.beta.is_zero())

    def test_round_trip(self):
        rng = random.Random(2)
        X = torus()
        tau = mc_extend(random_cochain(X, LBO, 2, "e", rng))
        beta = random_cochain(X, LBO, 1, "e", rng) + random_cochain(X, LBO, 2, "b", rng)
        new, _ = gauge_apply(beta, tau)
        res = are_gauge_equivalent(tau, new)
        self.assertTrue(res.equivalent)
        self.assertEqual(gauge_apply(res.beta, tau)[0], new)

    def test_obstruction(self):
        X = sphere(3)
        res = are_gauge_equivalent(top_twist(X, LB, 1), TwistingElement.zero(X, LB))
        self.assertFalse(res.equivalent)
        self.assertIsInstance(res.obstruction, Obstruction)
        self.assertEqual(res.obstruction.cls, class_of(top_twist(X, LB, 1).cochain, 3))


class NuTests(unittest.TestCase):
    def test_zero(self):
        X = sphere(2)
        self.assertTrue(nu_invariant(TwistingElement.zero(X, LBO)).is_zero())

    def test_s2(self):
        X = sphere(2)
        for k in (1, 3, -2):
            tau = top_twist(X, LBO, k, "e")
            self.assertEqual(nu_invariant(tau), suspension_class(tau))
            self.assertFalse(nu_invariant(tau).is_zero())

    def test_s3_scales_with_k(self):
        X = sphere(3)
        one = nu_invariant(top_twist(X, LB, 1))
        self.assertEqual(nu_invariant(top_twist(X, LB, 5)), one.scale(5))
        self.assertEqual(one, suspension_class(top_twist(X, LB, 1)))

    @settings(max_examples=8, deadline=None)
    @given(st.integers(0, 10_000))
    def test_gauge_invariance(self, seed):
        rng = random.Random(seed)
        X = sphere(2)
        tau = random_top_twist(X, LBO, rng, "e")
        beta = random_cochain(X, LBO, 1, "e", rng) + random_cochain(X, LBO, 2, "b", rng)
        new, _ = gauge_apply(beta, tau)
        self.assertEqual(nu_invariant(tau), nu_invariant(new))


class MVTests(unittest.TestCase):
    def test_s2_untwisted(self):
        X = sphere(2)
        U, V, _ = hemisphere_cover(X)
        rep = mv_exactness(X, U, V, None, preset("q"))
        self.assertTrue(rep.ok)
        self.assertEqual(rep.groups["H^2(X)"].free, 1)
        self.assertEqual(rep.groups["H^1(U∩V)"].free, 1)

    def test_s3_twisted(self):
        X = sphere(3)
        U, V, _ = hemisphere_cover(X)
        rep = mv_exactness(X, U, V, top_twist(X, LB, 4), LB, (-6, 7))
        self.assertTrue(rep.ok)
        for name, G in rep.groups.items():
            if name.endswith("(X)"):
                self.assertTrue(G.is_trivial, name)

    def test_degenerate_cover(self):
        X = circle()
        self.assertTrue(mv_exactness(X, X, X, None, preset("q")).ok)

    def test_bad_cover(self):
        X = sphere(2)
        U, _, W = hemisphere_cover(X)
        with self.assertRaises(TwistError):
            mv_exactness(X, U, W, None, preset("q"))


class AdditivityTests(unittest.TestCase):
    @settings(max_examples=6, deadline=None)
    @given(st.integers(0, 10_000))
    def test_commuting_sum(self, seed):
        rng = random.Random(seed)
        X = sphere(3)
        a = mc_extend(random_cochain(X, LB, 3, "b", rng))
        b = mc_extend(random_cochain(X, LB, 3, "b", rng))
        total = TwistingElement(a.cochain + b.cochain)
        T = TensorCochains(X, LB, (-5, 5))
        for n in range(-5, 5):
            d0 = T.twisted_differential(Cochain.zero(X, LB), n)
            da = T.twisted_differential(a.cochain, n)
            db = T.twisted_differential(b.cochain, n)
            expected = [[x + y - z for x, y, z in zip(r, s, t)] for r, s, t in zip(da, db, d0)]
            self.assertEqual(T.twisted_differential(total.cochain, n), expected)

    def test_commuting_gauge_composition(self):
        rng = random.Random(12)
        X = sphere(3)
        tau = top_twist(X, LB, 3)
        b1 = random_cochain(X, LB, 2, "b", rng)
        b2 = random_cochain(X, LB, 2, "b", rng)
        once, _ = gauge_apply(b1 + b2, tau)
        twice, _ = gauge_apply(b2, gauge_apply(b1, tau)[0])
        self.assertEqual(once, twice)
