import itertools
import random

import pytest

from geometry.algebra import check_braided_commutativity, format_element
from geometry.exceptions import ContextMismatchError, InvarianceError
from geometry.scalars import GaussianRational, Series
from geometry.symmetry import SymmetryWord


def monomials(algebra, bound):
    return [algebra.monomial(mono) for mono in algebra.basis_samples(bound)]


@pytest.mark.unit
class TestMoyalStar:
    """Test the star product on the Moyal plane"""

    def test_star_of_coordinates(self, moyal):
        """x1 * x2 = x1 x2 + h and x2 * x1 = x1 x2 - h"""
        algebra = moyal.algebra
        x1, x2 = algebra.generator(0), algebra.generator(1)
        assert format_element(algebra.star(x1, x2)) == "x1*x2 + h"
        assert format_element(algebra.star(x2, x1)) == "x1*x2 - h"

    def test_second_order_terms(self, moyal):
        """x1^2 * x2^2 = x1^2 x2^2 + 4h x1 x2 + 2h^2"""
        algebra = moyal.algebra
        a = algebra.monomial((2, 0))
        b = algebra.monomial((0, 2))
        expected = (
            algebra.monomial((2, 2))
            + algebra.monomial((1, 1), Series.monomial(4, 1, 2))
            + algebra.h(2).scale(2)
        )
        assert algebra.star(a, b) == expected

    def test_truncation_at_order_one(self, moyal1):
        """The h^2 term disappears at order 1"""
        algebra = moyal1.algebra
        product = algebra.star(algebra.monomial((2, 0)), algebra.monomial((0, 2)))
        assert format_element(product) == "x1^2*x2^2 + 4*h*x1*x2"

    def test_symmetry_action(self, moyal):
        """Z1 acts as d/dx1"""
        algebra = moyal.algebra
        z1 = SymmetryWord.generator(0, 2)
        assert algebra.act(z1, algebra.monomial((2, 1))) == algebra.monomial((1, 1), 2)

    @pytest.mark.slow
    def test_associativity(self, moyal):
        """(a * b) * c == a * (b * c) on all monomials of degree <= 2"""
        algebra = moyal.algebra
        basis = monomials(algebra, 2)
        for a, b, c in itertools.product(basis, repeat=3):
            assert algebra.star(algebra.star(a, b), c) == algebra.star(a, algebra.star(b, c))

    @pytest.mark.slow
    def test_random_polynomials(self, moyal):
        """Associativity and braided commutativity on 200 seeded triples of degree <= 4"""
        algebra = moyal.algebra
        basis = monomials(algebra, 4)
        rng = random.Random(20)

        def draw():
            value = algebra.zero()
            for mono in rng.sample(basis, rng.randint(1, 3)):
                value = value + mono.scale(rng.choice((-3, -1, 1, 2)))
            return value

        for _ in range(200):
            a, b, c = draw(), draw(), draw()
            assert algebra.star(algebra.star(a, b), c) == algebra.star(a, algebra.star(b, c))
            assert not check_braided_commutativity(a, b)

    def test_braided_commutativity(self, moyal):
        """a * b equals the star of the braided flip on monomial pairs"""
        algebra = moyal.algebra
        basis = monomials(algebra, 2)
        for a, b in itertools.product(basis, repeat=2):
            assert not check_braided_commutativity(a, b)

    def test_braided_flip_of_coordinates(self, moyal):
        """The braiding sends x1 (x) x2 to x2 (x) x1 + 2h 1 (x) 1"""
        algebra = moyal.algebra
        flip = algebra.braided_flip(algebra.generator(0), algebra.generator(1))
        terms = {(format_element(x), format_element(y)): c for c, x, y in flip}
        assert terms == {
            ("x2", "x1"): Series.one(2),
            ("1", "1"): Series.monomial(2, 1, 2),
        }

    def test_rejects_foreign_elements(self, moyal, perturbed):
        """Elements of different algebras cannot be multiplied"""
        with pytest.raises(ContextMismatchError):
            moyal.algebra.star(moyal.algebra.one(), perturbed.algebra.one())


@pytest.mark.unit
class TestModuleAlgebra:
    """The symmetry acts by algebra maps twisted through the coproduct"""

    @pytest.mark.parametrize("fixture", ["moyal", "torus"])
    def test_action_respects_the_star_product(self, request, fixture):
        """w |> (a * b) = (w_(1) |> a) * (w_(2) |> b) for words of length <= 2"""
        algebra = request.getfixturevalue(fixture).algebra
        z1 = SymmetryWord.generator(0, 2)
        z2 = SymmetryWord.generator(1, 2)
        basis = monomials(algebra, 1)
        for word in (z1, z2, z1 * z2, z1 * z1):
            for a, b in itertools.product(basis, repeat=2):
                expected = algebra.zero()
                for left, right, weight in word.coproduct():
                    product = algebra.star(algebra.act(left, a), algebra.act(right, b))
                    expected = expected + product.scale(weight)
                assert algebra.act(word, algebra.star(a, b)) == expected


@pytest.mark.unit
class TestTorusStar:
    """Test the star product on torus modes"""

    def test_phase_of_modes(self, torus):
        """U[1,0] * U[0,1] = exp(-i h) U[1,1] and U[0,1] * U[1,0] = U[1,1]"""
        algebra = torus.algebra
        u10 = algebra.monomial((1, 0))
        u01 = algebra.monomial((0, 1))
        phase = Series([1, GaussianRational(0, -1), GaussianRational(-1) / 2], 2)
        assert algebra.star(u10, u01) == algebra.monomial((1, 1), phase)
        assert algebra.star(u01, u10) == algebra.monomial((1, 1))

    def test_inverse_modes(self, torus):
        """U[1,0] * U[-1,0] = 1 since Z2 kills both factors"""
        algebra = torus.algebra
        assert algebra.star(algebra.monomial((1, 0)), algebra.monomial((-1, 0))) == algebra.one()

    def test_braided_commutativity(self, torus):
        """Torus modes commute up to the braiding"""
        algebra = torus.algebra
        basis = monomials(algebra, 1)
        for a, b in itertools.product(basis, repeat=2):
            assert not check_braided_commutativity(a, b)


@pytest.mark.unit
class TestClassicalLimit:
    def test_star_is_pointwise(self, classical):
        """With a trivial twist the star product is the classical product"""
        algebra = classical.algebra
        basis = monomials(algebra, 2)
        for a, b in itertools.product(basis, repeat=2):
            assert algebra.star(a, b) == algebra.classical_mul(a, b)

    def test_commuting_actions_check(self, moyal):
        """Commuting generator actions pass the sampled check"""
        moyal.algebra.check_commuting_actions(2)


@pytest.mark.unit
def test_non_commuting_actions_are_rejected():
    """Generators x1 d/dx2 and x2 d/dx1 do not commute"""
    from geometry.loader import parse_geometry

    text = """
[geometry]
name = bad
order = 1
[algebra]
kind = polynomial
dim = 2
[symmetry]
generators = 2
Z[1](x[2]) = x1
Z[2](x[1]) = x2
[frame]
rank = 2
e[1](x[1]) = 1
e[2](x[2]) = 1
[metric]
g[1,1] = 1
g[2,2] = 1
"""
    with pytest.raises(InvarianceError, match="do not commute"):
        parse_geometry(text)
