import logging

import pytest

from geometry.exceptions import ParseError
from geometry.expressions import parse_expression, print_element, tokenize
from geometry.scalars import GaussianRational, Series


@pytest.mark.unit
class TestParseExpression:
    def test_sum_with_h(self, moyal):
        """'1 + h*x1' has coefficient 1 on 1 and h on x1"""
        algebra = moyal.algebra
        value = parse_expression("1 + h*x1", algebra)
        assert value.coefficient((0, 0)) == Series.one(2)
        assert value.coefficient((1, 0)) == Series.monomial(1, 1, 2)

    def test_rational_constant(self, moyal):
        """'x1^2 - 2/3' keeps the exact rational"""
        algebra = moyal.algebra
        value = parse_expression("x1^2 - 2/3", algebra)
        expected = algebra.monomial((2, 0)) - algebra.constant(GaussianRational(2) / 3)
        assert value == expected

    def test_star_is_the_deformed_product(self, moyal):
        """star(x1, x2) parses to x1*x2 + h while x1*x2 is classical"""
        algebra = moyal.algebra
        assert print_element(parse_expression("star(x1, x2)", algebra)) == "x1*x2 + h"
        assert print_element(parse_expression("x1*x2", algebra)) == "x1*x2"

    def test_juxtaposition_multiplies(self, moyal):
        """'2 x1 x2' is the same as '2*x1*x2'"""
        algebra = moyal.algebra
        assert parse_expression("2 x1 x2", algebra) == parse_expression("2*x1*x2", algebra)

    def test_parentheses_and_powers(self, moyal):
        """(x1 + h)(x1 - h) = x1^2 - h^2 at order 2"""
        algebra = moyal.algebra
        value = parse_expression("(x1 + h)*(x1 - h)", algebra)
        assert print_element(value) == "x1^2 - h^2"

    def test_leading_minus(self, moyal):
        """A leading minus negates the first term only"""
        algebra = moyal.algebra
        assert parse_expression("-x1 + x2", algebra) == algebra.generator(1) - algebra.generator(0)

    def test_torus_modes(self, torus):
        """Modes multiply by adding their indices"""
        algebra = torus.algebra
        assert print_element(parse_expression("U[1,-1]*U[0,1]", algebra)) == "U[1,0]"
        assert print_element(parse_expression("i*U[1,0]", algebra)) == "i*U[1,0]"

    @pytest.mark.parametrize("text", ["x1^2*x2 - 2/3*h", "x1 + h*x2", "-x2 + 3*h^2"])
    def test_printed_form_parses_back(self, moyal, text):
        """Canonical text parses to an element that prints the same way"""
        assert print_element(parse_expression(text, moyal.algebra)) == text

    def test_h_past_the_order_is_dropped(self, moyal, geometry_logs):
        """h^3 at order 2 is zero and logs a warning"""
        with geometry_logs.at_level(logging.WARNING, logger="geometry.expressions"):
            value = parse_expression("x1 + h^3", moyal.algebra)
        assert value == moyal.algebra.generator(0)
        assert "exceeds truncation order" in geometry_logs.text


@pytest.mark.unit
class TestParseErrors:
    def test_tokens_carry_offsets(self):
        """Tokens record where they start"""
        tokens = tokenize("x1 + 2/3")
        assert [(t.kind, t.offset) for t in tokens] == [
            ("coord", 0),
            ("op", 3),
            ("number", 5),
            ("end", 8),
        ]

    def test_unexpected_end(self, moyal):
        """A dangling operator points past the end of the input"""
        with pytest.raises(ParseError) as excinfo:
            parse_expression("x1 + ", moyal.algebra)
        assert excinfo.value.column == 6
        assert excinfo.value.line is None

    def test_unknown_character(self, moyal):
        """Characters outside the grammar are reported with their column"""
        with pytest.raises(ParseError, match="column 4"):
            parse_expression("x1 $", moyal.algebra)

    def test_unknown_generator(self, moyal):
        """x3 does not exist in a two-dimensional algebra"""
        with pytest.raises(ParseError, match="unknown generator x3"):
            parse_expression("x1 + x3", moyal.algebra)

    def test_bad_exponent(self, moyal):
        """Exponents must be natural numbers"""
        with pytest.raises(ParseError, match="natural number"):
            parse_expression("x1^x2", moyal.algebra)

    def test_modes_need_a_torus(self, moyal):
        """U[...] is rejected in a polynomial algebra"""
        with pytest.raises(ParseError, match="torus"):
            parse_expression("U[1,0]", moyal.algebra)

    def test_multiline_source_reports_line(self, moyal):
        """Errors in multi-line input carry a line number"""
        with pytest.raises(ParseError) as excinfo:
            parse_expression("x1 +\n  $", moyal.algebra)
        assert excinfo.value.line == 2
        assert excinfo.value.column == 3

    def test_zero_denominator(self, moyal):
        """1/0 is a parse error at the number, not a crash"""
        with pytest.raises(ParseError, match="zero denominator") as excinfo:
            parse_expression("1/0", moyal.algebra)
        assert excinfo.value.column == 1
        with pytest.raises(ParseError) as excinfo:
            parse_expression("x1 + 3/0", moyal.algebra)
        assert excinfo.value.column == 6
