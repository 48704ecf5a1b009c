import unittest
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from twistcoh import linalg as la
from twistcoh.algebra import preset
from twistcoh.cochains import Cochain, TensorCochains, WindowError, cochains, cup
from twistcoh.complexes import INTEGERS, cohomology
from twistcoh.groups import FgAbelianGroup
from twistcoh.simplicial import (LocalSystem, SimplicialComplex, SimplicialError, build_space, circle,
                                 coboundary_matrix, evaluate, full_simplex, hemisphere_cover, integral_cycle_basis,
                                 integral_homology, local_system_complex, point, projective_plane,
                                 simplicial_cochains, sphere, torus, wedge_of_circles)


class BuilderTests(unittest.TestCase):
    def test_s3_counts(self):
        X = sphere(3)
        self.assertEqual(X.count(0), 5)
        self.assertEqual(X.count(3), 5)

    def test_circle_homology(self):
        C = simplicial_cochains(circle(), INTEGERS)
        self.assertEqual(cohomology(C, 0), FgAbelianGroup(1))
        self.assertEqual(cohomology(C, 1), FgAbelianGroup(1))

    def test_torus(self):
        X = torus()
        self.assertEqual(cohomology(simplicial_cochains(X, INTEGERS), 1), FgAbelianGroup(2))
        self.assertEqual(X.euler_characteristic(), 0)
        self.assertEqual(integral_homology(X, 1), FgAbelianGroup(2))

    def test_rp2_and_wedge(self):
        self.assertEqual(integral_homology(projective_plane(), 1), FgAbelianGroup.cyclic(2))
        self.assertEqual(integral_homology(wedge_of_circles(), 1), FgAbelianGroup(2))

    def test_unsupported(self):
        with self.assertRaises(SimplicialError):
            build_space("sphere", 5)
        with self.assertRaises(SimplicialError):
            build_space("klein")

    def test_hemispheres(self):
        for k in (1, 2, 3):
            X = sphere(k)
            Dp, Dm, W = hemisphere_cover(X)
            self.assertTrue(Dp.union(Dm).same_simplices(X))
            self.assertTrue(Dp.intersection(Dm).same_simplices(W))
            self.assertEqual(W.euler_characteristic(), 1 + (-1) ** (k - 1))

    def test_face_closure(self):
        X = SimplicialComplex.from_simplices([(0, 1, 2)])
        self.assertTrue(X.contains((0, 2)))
        self.assertTrue(X.contains((1,)))


def _rand_cochain(X, A, p, mono, data):
    vals = [Fraction(data.draw(st.integers(-3, 3))) for _ in range(X.count(p))]
    return Cochain.from_values(X, A, p, vals, A.monomial(A.parse_monomial(mono)))


class CupTests(unittest.TestCase):
    def test_unit(self):
        X, A = torus(), preset("laurent_b")
        a = Cochain.from_values(X, A, 1, list(range(X.count(1))), A.gen("b"))
        self.assertEqual(Cochain.unit(X, A).cup(a), a)
        self.assertEqual(a.cup(Cochain.unit(X, A)), a)

    @settings(max_examples=40, deadline=None)
    @given(st.sampled_from([0, 1, 2]), st.sampled_from([0, 1]), st.sampled_from(["1", "e", "b*e", "b^-1"]),
           st.sampled_from(["1", "e", "b"]), st.data())
    def test_leibniz(self, p, q, m1, m2, data):
        X, A = sphere(2), preset("laurent_b_odd")
        a = _rand_cochain(X, A, p, m1, data)
        b = _rand_cochain(X, A, q, m2, data)
        deg = p + A.monomial_degree(A.parse_monomial(m1))
        lhs = cup(a, b).d()
        rhs = a.d().cup(b) + a.cup(b.d()).scale((-1) ** deg)
        self.assertTrue((lhs - rhs).is_zero())

    def test_torus_generator(self):
        X = torus()
        free, _ = integral_cycle_basis(X, 1)
        (fund,), _ = integral_cycle_basis(X, 2)
        n = X.count(1)
        dual = []
        for i in range(2):
            rows = coboundary_matrix(X, 1) + [list(free[0]), list(free[1])]
            rhs = [0] * X.count(2) + [int(i == 0), int(i == 1)]
            dual.append(la.solve(rows, rhs, n))
        q = preset("q")
        a, b = (Cochain.from_values(X, q, 1, v) for v in dual)
        prod = a.cup(b)
        self.assertTrue(prod.d().is_zero())
        self.assertIn(evaluate(prod.values(2, ()), fund), (1, -1))


class LocalSystemTests(unittest.TestCase):
    def circle_system(self, lam):
        return LocalSystem.from_dict({(0, 1): lam})

    def test_lambda_two(self):
        C = local_system_complex(circle(), self.circle_system(2))
        self.assertTrue(cohomology(C, 0).is_trivial)
        self.assertTrue(cohomology(C, 1).is_trivial)

    def test_lambda_one(self):
        C = local_system_complex(circle(), self.circle_system(1))
        self.assertEqual(cohomology(C, 0), FgAbelianGroup(1))
        self.assertEqual(cohomology(C, 1), FgAbelianGroup(1))

    def test_point(self):
        C = local_system_complex(point(), LocalSystem.trivial())
        self.assertEqual(cohomology(C, 0), FgAbelianGroup(1))

    def test_flatness_enforced(self):
        X = full_simplex(2)
        L = LocalSystem.from_dict({(0, 1): 2})
        with self.assertRaises(SimplicialError):
            local_system_complex(X, L)

    def test_trivial_equals_rational_cochains(self):
        for X in (circle(), torus(), sphere(2)):
            A = local_system_complex(X, LocalSystem.trivial())
            B = simplicial_cochains(X)
            for p in range(X.dim):
                self.assertEqual(A.d(p), B.d(p))

    @settings(max_examples=25, deadline=None)
    @given(st.sampled_from([Fraction(1), Fraction(2), Fraction(-1), Fraction(1, 3), Fraction(3)]),
           st.sampled_from([Fraction(1), Fraction(1, 2), Fraction(-1), Fraction(5)]))
    def test_tensor_rule(self, lam, mu):
        X = circle()
        L, M = LocalSystem.from_dict({(0, 1): lam}), LocalSystem.from_dict({(0, 1): mu})
        direct = local_system_complex(X, L.tensor(M))
        product = local_system_complex(X, LocalSystem.from_dict({(0, 1): lam * mu}))
        for n in range(2):
            self.assertEqual(cohomology(direct, n), cohomology(product, n))
        expected = 1 if lam * mu == 1 else 0
        self.assertEqual(cohomology(direct, 1).free, expected)


class TensorCochainTests(unittest.TestCase):
    def test_point_laurent(self):
        C = cochains(point(), preset("laurent_b"), (-6, 6))
        for n in range(-4, 5):
            self.assertEqual(cohomology(C, n).free, 1 if n % 2 == 0 else 0)

    def test_s3_rational(self):
        C = cochains(sphere(3), preset("q"))
        self.assertEqual([cohomology(C, n).free for n in range(4)], [1, 0, 0, 1])

    def test_s3_laurent(self):
        # H^0 and H^3 of the sphere, each shifted by even powers of b
        T = TensorCochains(sphere(3), preset("laurent_b"), (-6, 6))
        C = T.complex()
        ranks = [cohomology(C, n).free for n in T.valid_degrees()]
        self.assertTrue(all(r == 1 for r in ranks))
        self.assertTrue(all(a + b == 2 for a, b in zip(ranks, ranks[1:])))

    def test_s3_laurent_odd_rank_two(self):
        T = TensorCochains(sphere(3), preset("laurent_b_odd"), (-6, 6))
        C = T.complex()
        self.assertTrue(all(cohomology(C, n).free == 2 for n in T.valid_degrees()))

    def test_filtration(self):
        C = cochains(torus(), preset("laurent_b"), (-4, 6))
        for n in C.degrees:
            self.assertEqual(len(C.filt(n)), C.dim(n))
            self.assertTrue(all(0 <= f <= 2 and (n - f) % 2 == 0 for f in C.filt(n)))

    def test_window_required(self):
        with self.assertRaises(WindowError):
            TensorCochains(sphere(2), preset("laurent_b"))

    def test_homotopy_invariance(self):
        for A, window in ((preset("q"), None), (preset("laurent_b"), (-5, 6))):
            for n in (1, 2, 3):
                T = TensorCochains(full_simplex(n), A, window)
                P = TensorCochains(point(), A, window)
                CT, CP = T.complex(), P.complex()
                for d in T.valid_degrees():
                    if d in P.valid_degrees():
                        self.assertEqual(cohomology(CT, d), cohomology(CP, d))
