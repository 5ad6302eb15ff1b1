import pytest
import sympy

from geometry.connections import torsion
from geometry.exceptions import InvarianceError, SolverError, SpecError
from geometry.riemann import (
    einstein_check,
    flat,
    gauss_jordan,
    koszul,
    koszul_derivation_residual,
    koszul_linearity_residual,
    levi_civita,
    metric_compatibility,
    metric_from_components,
    metric_value,
    ricci,
    sharp,
    uniqueness_probe,
)
from geometry.scalars import GaussianRational, Series


def to_sympy(element, symbols, h):
    """Classical image of an algebra element as a sympy polynomial."""
    total = sympy.Integer(0)
    for mono, series in element.terms.items():
        term = sympy.Integer(1)
        for symbol, exponent in zip(symbols, mono):
            term *= symbol**exponent
        for degree, coeff in series.terms():
            value = sympy.Rational(coeff.re.numerator, coeff.re.denominator)
            value += sympy.I * sympy.Rational(coeff.im.numerator, coeff.im.denominator)
            total += value * h**degree * term
    return sympy.expand(total)


@pytest.mark.unit
class TestMetric:
    def test_flat_and_sharp(self, perturbed):
        """g11 = 1 + h x1: flat(e1) = (1 + h x1) w1 and sharp(w1) = (1 - h x1) e1"""
        ctx = perturbed.ctx
        algebra = ctx.algebra
        g11 = algebra.one() + algebra.star(algebra.h(), algebra.generator(0))
        inverse = algebra.one() - algebra.star(algebra.h(), algebra.generator(0))
        assert flat(perturbed.metric, ctx.e(0)) == ctx.w(0, g11)
        assert sharp(perturbed.metric, ctx.w(0)) == ctx.e(0, inverse)
        assert sharp(perturbed.metric, ctx.w(1)) == ctx.e(1)

    def test_components(self, perturbed):
        """<e_i (x) e_j, g> reproduces the declared table"""
        metric = perturbed.metric
        ctx = perturbed.ctx
        assert metric_value(metric, ctx.e(0), ctx.e(0)) == metric.component(0, 0)
        assert not metric_value(metric, ctx.e(0), ctx.e(1))
        assert metric.component(1, 1) == ctx.algebra.one()

    def test_rejects_asymmetric_metric(self, moyal):
        """A metric with only g12 is not braided symmetric"""
        table = {(0, 0): moyal.algebra.one(), (0, 1): moyal.algebra.generator(0), (1, 1): moyal.algebra.one()}
        with pytest.raises(InvarianceError, match="braided symmetric"):
            metric_from_components(moyal.ctx, table)

    def test_rejects_degenerate_metric(self, moyal):
        """The order-0 part must be invertible"""
        with pytest.raises(InvarianceError, match="degenerate"):
            metric_from_components(moyal.ctx, {(0, 0): moyal.algebra.one()})

    def test_rejects_non_constant_leading_order(self, moyal):
        """The order-0 part must be constant"""
        algebra = moyal.algebra
        table = {(0, 0): algebra.one() + algebra.generator(0), (1, 1): algebra.one()}
        with pytest.raises(SpecError, match="must be constant"):
            metric_from_components(moyal.ctx, table)

    def test_rejects_wrong_declared_inverse(self, moyal):
        """A declared g0_inverse has to match"""
        table = {(0, 0): moyal.algebra.one(), (1, 1): moyal.algebra.one()}
        with pytest.raises(SpecError, match="g0_inverse"):
            metric_from_components(moyal.ctx, table, g0_inverse=[[2, 0], [0, 1]])

    def test_gauss_jordan(self):
        """Exact inverse over the Gaussian rationals and None when singular"""
        one, two, i = GaussianRational(1), GaussianRational(2), GaussianRational(0, 1)
        zero = GaussianRational(0)
        inverse = gauss_jordan([[two, zero], [zero, i]])
        assert inverse == [[GaussianRational(1) / 2, zero], [zero, GaussianRational(0, -1)]]
        assert gauss_jordan([[one, two], [one, two]]) is None


@pytest.mark.unit
class TestKoszul:
    def test_values_on_perturbed_metric(self, perturbed):
        """K(e1, e1, e1) = h and K(e1, e2, e2) = 0"""
        ctx = perturbed.ctx
        metric = perturbed.metric
        assert koszul(metric, ctx.e(0), ctx.e(0), ctx.e(0)) == ctx.algebra.h()
        assert not koszul(metric, ctx.e(0), ctx.e(1), ctx.e(1))

    def test_linearity_and_derivation(self, perturbed):
        """K is left linear in the first slot and a derivation in the last"""
        ctx = perturbed.ctx
        metric = perturbed.metric
        a = ctx.algebra.monomial((1, 1))
        u, v, z = ctx.e(0), ctx.e(1), ctx.e(0, ctx.algebra.generator(1))
        assert not koszul_linearity_residual(metric, a, u, v, z)
        assert not koszul_derivation_residual(metric, a, u, v, z)


@pytest.mark.unit
class TestLeviCivita:
    """Test the Levi-Civita solver"""

    def test_flat_metric_has_zero_connection(self, moyal):
        """The flat Moyal metric has vanishing Christoffel symbols and Ricci tensor"""
        result = levi_civita(moyal.metric)
        assert result.ok
        assert not result.connection.christoffel
        table = ricci(result.connection)
        assert table == {}
        einstein = einstein_check(moyal.metric, table)
        assert einstein.einstein
        assert einstein.constant
        assert not einstein.lam

    def test_perturbed_metric(self, perturbed):
        """g11 = 1 + h x1 gives the single Christoffel symbol (h/2) e1"""
        ctx = perturbed.ctx
        result = levi_civita(perturbed.metric)
        assert result.residuals() == {"torsion": 0, "metric": 0}
        half_h = Series.monomial(GaussianRational(1) / 2, 1, ctx.order)
        assert result.connection.christoffel == {(0, 0): ctx.e(0).scale(half_h)}
        assert torsion(result.connection).residual() == 0
        assert not metric_compatibility(result.connection, perturbed.metric)

    def test_uniqueness_probe(self, perturbed):
        """Every random perturbation of the Levi-Civita connection is detected"""
        result = levi_civita(perturbed.metric)
        probe = uniqueness_probe(result, perturbed.metric, seed=3, count=5)
        assert probe["probes"] == 5
        assert probe["detected"] == 5
        assert all(detail["detected"] for detail in probe["details"])

    def test_strict_mode_raises(self, perturbed, monkeypatch):
        """A solver result with nonzero residuals raises in strict mode"""

        class Broken:
            def residual(self):
                return 1

        monkeypatch.setattr("geometry.riemann.torsion", lambda conn: Broken())
        with pytest.raises(SolverError) as excinfo:
            levi_civita(perturbed.metric)
        assert excinfo.value.residuals["torsion"] == 1
        assert not levi_civita(perturbed.metric, strict=False).ok

    @pytest.mark.slow
    def test_classical_limit_matches_symbolic_christoffels(self, classical):
        """With a trivial twist the solver reproduces the textbook Christoffel symbols"""
        ctx = classical.ctx
        h = sympy.Symbol("h")
        xs = sympy.symbols("x1 x2")
        n = ctx.rank
        g = sympy.Matrix(n, n, lambda i, j: to_sympy(classical.metric.component(i, j), xs, h))
        g_inv = g.inv()
        result = levi_civita(classical.metric)
        table = result.connection.table()
        for i in range(n):
            for k in range(n):
                for l in range(n):
                    expected = sum(
                        g_inv[l, m]
                        * (sympy.diff(g[k, m], xs[i]) + sympy.diff(g[i, m], xs[k]) - sympy.diff(g[i, k], xs[m]))
                        for m in range(n)
                    ) / 2
                    expected = sympy.expand(sympy.series(expected, h, 0, ctx.order + 1).removeO())
                    actual = to_sympy(table[(i, k, l)], xs, h) if (i, k, l) in table else 0
                    assert sympy.simplify(actual - expected) == 0, (i, k, l)
