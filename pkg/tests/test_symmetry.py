import pytest

from geometry.exceptions import SpecError
from geometry.scalars import GaussianRational, Series
from geometry.symmetry import (
    OperatorTensor,
    SymmetryWord,
    TwistPair,
    TwistSpec,
    adjoint_coefficients,
    build_r_matrix,
    build_twist,
    cocycle_residual,
    normalization_residual,
)

MOYAL_TWIST = TwistSpec(2, (TwistPair(0, 1, GaussianRational(1)),))
TORUS_TWIST = TwistSpec(2, (TwistPair(0, 1, GaussianRational(0, 1)),))
MIXED_TWIST = TwistSpec(
    3,
    (
        TwistPair(0, 1, GaussianRational(1, 2)),
        TwistPair(2, 0, GaussianRational(0, -1)),
    ),
)


def word(*exponents):
    return SymmetryWord(tuple(exponents))


@pytest.mark.unit
class TestSymmetryWord:
    def test_coproduct_is_multinomial(self):
        """Delta(Z1^2) = Z1^2 (x) 1 + 2 Z1 (x) Z1 + 1 (x) Z1^2"""
        terms = {(left, right): weight for left, right, weight in word(2, 0).coproduct()}
        assert terms == {
            (word(0, 0), word(2, 0)): 1,
            (word(1, 0), word(1, 0)): 2,
            (word(2, 0), word(0, 0)): 1,
        }

    def test_antipode_sign(self):
        """S(Z1 Z2^2) = -Z1 Z2^2"""
        sign, same = word(1, 2).antipode()
        assert sign == -1
        assert same == word(1, 2)

    def test_letters_and_text(self):
        """Words expand into generator letters and print compactly"""
        assert word(2, 0, 1).letters() == (0, 0, 2)
        assert str(word(2, 0, 1)) == "Z1^2*Z3"
        assert str(SymmetryWord.unit(3)) == "1"

    def test_adjoint_of_unit(self):
        """The unit acts on maps trivially"""
        unit = SymmetryWord.unit(2)
        assert adjoint_coefficients(unit) == [(unit, unit, GaussianRational(1))]


@pytest.mark.unit
class TestTwist:
    def test_first_order_terms(self):
        """F^-1 = 1 (x) 1 + h Z1 (x) Z2 at order 1"""
        _, f_inv = build_twist(MOYAL_TWIST, 1)
        terms = dict(f_inv.items())
        assert terms[(word(0, 0), word(0, 0))] == Series.one(1)
        assert terms[(word(1, 0), word(0, 1))] == Series.monomial(1, 1, 1)
        assert len(terms) == 2

    def test_second_order_exponential(self):
        """The h^2 term of F^-1 is (1/2) Z1^2 (x) Z2^2"""
        _, f_inv = build_twist(MOYAL_TWIST, 2)
        assert f_inv.degree_part(2) == {(word(2, 0), word(0, 2)): GaussianRational(1) / 2}

    def test_rejects_unknown_generator(self):
        """Twist pairs must reference declared generators"""
        with pytest.raises(SpecError):
            build_twist(TwistSpec(1, (TwistPair(0, 1, GaussianRational(1)),)), 1)

    def test_trivial_twist(self):
        """A twist with no pairs is the identity"""
        f, f_inv = build_twist(TwistSpec(2), 2)
        assert f.is_identity() and f_inv.is_identity()
        assert TwistSpec(2).is_trivial

    @pytest.mark.parametrize("spec", [MOYAL_TWIST, TORUS_TWIST, MIXED_TWIST])
    @pytest.mark.parametrize("order", [1, 2, 3])
    def test_twist_laws(self, spec, order):
        """Cocycle, normalization, F F^-1 = 1 and R R21 = 1 hold exactly"""
        f, f_inv = build_twist(spec, order)
        identity = OperatorTensor.identity(spec.generators, order)
        assert cocycle_residual(f) == {}
        assert cocycle_residual(f_inv) == {}
        assert normalization_residual(f) == {}
        assert f * f_inv == identity
        r, r_inv = build_r_matrix(f, f_inv)
        assert r * r.flip() == identity
        assert r * r_inv == identity

    def test_r_matrix_first_order(self):
        """R = 1 + h (Z1 (x) Z2 - Z2 (x) Z1) + O(h^2)"""
        f, f_inv = build_twist(MOYAL_TWIST, 1)
        r, _ = build_r_matrix(f, f_inv)
        assert r.degree_part(1) == {
            (word(1, 0), word(0, 1)): GaussianRational(1),
            (word(0, 1), word(1, 0)): GaussianRational(-1),
        }
