import random
import unittest
from fractions import Fraction

from conftest import top_twist
from twistcoh.algebra import preset
from twistcoh.cochains import Cochain
from twistcoh.complexes import cohomology
from twistcoh.differential import (DiffCocycle, DifferentialDatum, DifferentialError, a_map, diff_group, diff_nk,
                                   diff_nk_table, lift_integral, mv_differential, natural_map_isos, product,
                                   qz_cohomology, random_cocycle, unit, verify_sequences)
from twistcoh.groups import FgAbelianGroup
from twistcoh.simplicial import circle, fundamental_cocycle, hemisphere_cover, point, projective_plane, sphere, torus

QZ = FgAbelianGroup(0, (), 0, 1)


def ordinary(X, n):
    return DifferentialDatum.ordinary(X, n)


class GroupTests(unittest.TestCase):
    # hand computations of H^n(P) from the block description of P
    def test_point(self):
        got = [diff_group(ordinary(point(), n)) for n in (0, 1, 2)]
        self.assertEqual(got, [FgAbelianGroup(1), QZ, FgAbelianGroup(0)])

    def test_circle(self):
        X = circle()
        self.assertEqual(diff_group(ordinary(X, 0)), FgAbelianGroup(1))
        # flat part Q/Z, closed 1-cochains with integral period: Z + (exact) Q^2
        self.assertEqual(diff_group(ordinary(X, 1)), FgAbelianGroup(1, (), 2, 1))
        self.assertEqual(diff_group(ordinary(X, 2)), QZ)

    def test_two_sphere(self):
        D = ordinary(sphere(2), 2)
        self.assertEqual(diff_group(D, -1), QZ)
        self.assertEqual(diff_group(D, 0), FgAbelianGroup(1, (), 3))
        self.assertTrue(diff_group(D, 1).is_trivial)

    def test_torsion_shows_up(self):
        # RP^2: H^2(Z) = Z/2 becomes the flat part in level 2
        D = ordinary(projective_plane(), 3)
        self.assertEqual(diff_group(D, 0), qz_cohomology(D.E, 2))
        self.assertEqual(qz_cohomology(D.E, 1), FgAbelianGroup(0, (2,)))

    def test_nonpositive_level(self):
        X = sphere(2)
        for n in (0, -1):
            D = ordinary(X, n)
            for m in (1 - n, 2 - n):
                self.assertEqual(diff_group(D, m), cohomology(D.E, n + m))
        self.assertEqual(diff_group(ordinary(X, 0), 2), FgAbelianGroup(1))


class CocycleTests(unittest.TestCase):
    def test_a_map(self):
        D = ordinary(sphere(2), 2)
        rng = random.Random(0)
        h = [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(D.M.dim(1))]
        x = a_map(D, h)
        self.assertEqual(x.curv(), x.form().d())
        self.assertTrue(x.underlying().is_zero())

    def test_a_of_exact_is_zero(self):
        D = ordinary(torus(), 2)
        g = [Fraction(i % 3 - 1, 2) for i in range(D.M.dim(0))]
        dg = [sum(r[i] * g[i] for i in range(len(g))) for r in D.M.d(0)]
        zero = DiffCocycle(D, [Fraction(0)] * D.P.dim(2))
        self.assertTrue(a_map(D, dg).equivalent(zero))

    def test_unit_rule(self):
        X = sphere(2)
        D = ordinary(X, 2)
        one = unit(ordinary(X, 0))
        rng = random.Random(3)
        for _ in range(4):
            h = [Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(D.M.dim(1))]
            x = a_map(D, h)
            self.assertTrue(product(x, one).equivalent(x))

    def test_lift(self):
        X = circle()
        D = ordinary(X, 1)
        c = [Fraction(1), Fraction(0), Fraction(0)]
        x = lift_integral(D, c)
        self.assertEqual(x.curv(), x.underlying())

    def test_point_unit(self):
        x = unit(ordinary(point(), 0))
        self.assertEqual(x.curv(), Cochain.unit(point(), preset("q")))

    def test_flat_class(self):
        # a(h) for a constant h: torsion-type class of S^1 with zero curvature, nonzero when h is not integral
        X = circle()
        D = ordinary(X, 1)
        x = a_map(D, [Fraction(1, 3)] * 3)
        self.assertTrue(x.curv().is_zero())
        zero = DiffCocycle(D, [Fraction(0)] * D.P.dim(1))
        self.assertFalse(x.equivalent(zero))
        self.assertTrue(a_map(D, [Fraction(1)] * 3).equivalent(zero))

    def test_lift_generator(self):
        X = sphere(2)
        D = ordinary(X, 2)
        sigma = fundamental_cocycle(X)
        x = lift_integral(D, sigma)
        self.assertEqual(x.underlying(), Cochain.from_values(X, preset("q"), 2, sigma, preset("q").one()))

    def test_module_rule_on_torus(self):
        X = torus()
        D1 = ordinary(X, 1)
        rng = random.Random(8)
        h = [Fraction(rng.randint(-3, 3), 2) for _ in range(D1.M.dim(0))]
        z = D1.E.cocycles(1).generators()[0][0]
        y = lift_integral(D1, z)
        lhs = product(a_map(D1, h), y)
        hw = lhs.datum.T.to_vector(D1.cochain(h, 0).cup(y.curv()), 1)
        self.assertTrue(lhs.equivalent(a_map(lhs.datum, hw)))

    def test_not_cocycle(self):
        D = ordinary(sphere(2), 1)
        v = [Fraction(0)] * D.P.dim(1)
        v[0] = Fraction(1)
        with self.assertRaises(DifferentialError):
            DiffCocycle(D, v)

    def test_unit_level(self):
        with self.assertRaises(DifferentialError):
            unit(ordinary(sphere(2), 1))

    def test_random_cocycle(self):
        D = ordinary(torus(), 2)
        x = random_cocycle(D, random.Random(5))
        self.assertTrue(x.equivalent(x))


class SequenceTests(unittest.TestCase):
    def test_ordinary(self):
        for X in (circle(), sphere(2)):
            for n in (1, 2):
                with self.subTest(X=X.name, n=n):
                    rep = verify_sequences(ordinary(X, n), pairs=4)
                    self.assertTrue(rep.ok, rep.to_json())

    def test_twisted(self):
        X = sphere(3)
        A = preset("laurent_b")
        D = DifferentialDatum.twisted(X, A, top_twist(X, A, 5), 1, (-5, 6))
        rep = verify_sequences(D, pairs=3)
        self.assertTrue(rep.ok)

    def test_twist_must_be_integral(self):
        X = sphere(3)
        A = preset("laurent_b")
        tau = top_twist(X, A, Fraction(1, 2))
        with self.assertRaises(DifferentialError):
            DifferentialDatum.twisted(X, A, tau, 1, (-5, 6))


class TableTests(unittest.TestCase):
    def test_rows(self):
        for X in (circle(), sphere(2)):
            for n in (1, 2):
                for k in (0, 1, 2):
                    rows = diff_nk_table(ordinary(X, 0), n, k)
                    self.assertTrue(all(r.ok for r in rows), [r.to_json() for r in rows if not r.ok])

    def test_negative_vanishes(self):
        self.assertTrue(diff_nk(ordinary(sphere(2), 0), 2, 1, -1).is_trivial)

    def test_natural_maps(self):
        D = ordinary(sphere(2), 0)
        n, k = 2, 1
        iso = natural_map_isos(D, n, k, range(0, n + 2))
        for i, ok in iso.items():
            if i < k:
                self.assertTrue(ok, i)
        self.assertFalse(iso[k])


class MVTests(unittest.TestCase):
    def test_hemispheres(self):
        for X in (circle(), sphere(2)):
            U, V, _ = hemisphere_cover(X)
            self.assertTrue(mv_differential(ordinary(X, 1), U, V).ok)

    def test_trivial_cover(self):
        X = circle()
        self.assertTrue(mv_differential(ordinary(X, 1), X, X).ok)
