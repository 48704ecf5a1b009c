import unittest
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from twistcoh.algebra import (AlgebraElement, AlgebraError, GradedAlgebra, InfiniteRankError, degree_basis,
                              is_split, multiply, preset)


class PresetTests(unittest.TestCase):
    def test_laurent_generator(self):
        A = preset("laurent_b")
        self.assertEqual(A.generators, (("b", -2),))
        self.assertIn("b", A.inverted)

    def test_q_is_unit_algebra(self):
        A = preset("q")
        self.assertEqual(A.ngens, 0)
        self.assertEqual(degree_basis(A, 0), [()])
        self.assertEqual(degree_basis(A, -2), [])

    def test_tmf_degree_minus_24(self):
        A = preset("tmf_poly")
        names = sorted(A.format_monomial(m) for m in degree_basis(A, -24))
        self.assertEqual(names, ["c4^3", "c6^2"])

    def test_tmf_degree_minus_20(self):
        A = preset("tmf_poly")
        self.assertEqual([A.format_monomial(m) for m in degree_basis(A, -20)], ["c4*c6"])

    def test_unknown(self):
        with self.assertRaises(AlgebraError):
            preset("e8")

    def test_laurent_basis(self):
        A = preset("laurent_b")
        self.assertEqual([A.format_monomial(m) for m in degree_basis(A, -6)], ["b^3"])
        self.assertEqual(degree_basis(A, -5), [])
        self.assertEqual([A.format_monomial(m) for m in degree_basis(A, 4)], ["b^-2"])


class ProductTests(unittest.TestCase):
    def test_inverse_pair(self):
        A = preset("laurent_b")
        self.assertEqual(A.gen("b") * A.gen("b", -1), A.one())

    def test_square(self):
        A = preset("laurent_b")
        x = A.gen("b") * A.gen("b")
        self.assertEqual(x, A.gen("b", 2))
        self.assertEqual(x.degree, -4)

    def test_tmf_expansion(self):
        A = preset("tmf_poly")
        c4, c6 = A.gen("c4"), A.gen("c6")
        self.assertEqual((c4 + c6) * c4, c4 * c4 + c4 * c6)

    def test_mismatched(self):
        with self.assertRaises(AlgebraError):
            multiply(preset("laurent_b").gen("b"), preset("tmf_poly").gen("c4"))

    def test_odd_generator_squares_to_zero(self):
        A = preset("laurent_b_odd")
        self.assertTrue((A.gen("e") * A.gen("e")).is_zero())


class SplitTests(unittest.TestCase):
    def test_presets_split(self):
        for name in ("q", "laurent_b", "tmf_poly", "laurent_b_odd"):
            self.assertTrue(is_split(preset(name)))

    def test_nonsplit(self):
        base = GradedAlgebra((("x", -1), ("y", 0)), name="probe")
        y = AlgebraElement(base, {(0, 1): Fraction(1)})
        A = GradedAlgebra((("x", -1), ("y", 0)), differential=(("x", y),), name="probe")
        self.assertFalse(is_split(A))

    def test_infinite_rank(self):
        A = GradedAlgebra((("x", -2), ("y", 2)), name="bad")
        with self.assertRaises(InfiniteRankError):
            degree_basis(A, 0)


def _elements(name):
    A = preset(name)
    if name == "laurent_b":
        monos = [A.parse_monomial(f"b^{i}") for i in range(-3, 4)]
    else:
        monos = [A.parse_monomial(t) for t in ("1", "c4", "c6", "c4^2", "c4*c6")]
    coeff = st.fractions(min_value=-5, max_value=5, max_denominator=4)

    @st.composite
    def homogeneous(draw):
        m = draw(st.sampled_from(monos))
        return AlgebraElement(A, {m: draw(coeff)})
    return homogeneous()


class PropertyTests(unittest.TestCase):
    @settings(max_examples=60, deadline=None)
    @given(_elements("laurent_b"), _elements("laurent_b"), _elements("laurent_b"))
    def test_laurent_axioms(self, a, b, c):
        self.assertEqual((a * b) * c, a * (b * c))
        self.assertEqual(a * b, b * a)
        self.assertEqual(a * a.algebra.one(), a)

    @settings(max_examples=60, deadline=None)
    @given(_elements("tmf_poly"), _elements("tmf_poly"))
    def test_tmf_commutative(self, a, b):
        self.assertEqual(a * b, b * a)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(-20, 20))
    def test_laurent_rank(self, n):
        self.assertEqual(len(degree_basis(preset("laurent_b"), n)), 1 if n % 2 == 0 else 0)

    @settings(max_examples=40, deadline=None)
    @given(st.booleans(), st.booleans(), st.integers(-2, 2))
    def test_graded_sign(self, e1, e2, p):
        A = preset("laurent_b_odd")
        a = A.gen("b", p) * (A.gen("e") if e1 else A.one())
        b = A.gen("b") * (A.gen("e") if e2 else A.one())
        sign = -1 if (a.degree % 2 and b.degree % 2) else 1
        self.assertEqual(a * b, (b * a) * sign)
