import pytest

from conftest import CURVED_FRAME_GEO, SHEAR_GEO
from geometry.exceptions import InvarianceError, ParseError, SpecError
from geometry.loader import (
    SHIPPED_DIR,
    load_geometry,
    parse_geometry,
    resolve_geometry,
    shipped_geometries,
)

PLANE_GEO = """
[geometry]
name = plane
order = 1

[algebra]
kind = polynomial
dim = 2

[frame]
rank = 2
e[1](x[1]) = 1
e[2](x[2]) = 1

[metric]
g[1,1] = 1
g[2,2] = 1
"""

STRUCTURED_GEO = """
[geometry]
name = structured
order = 1

[algebra]
kind = polynomial
dim = 2

[frame]
rank = 2
e[1](x[1]) = 1
e[1](x[2]) = x2
e[2](x[2]) = 1
{structure}

[metric]
g[1,1] = 1
g[2,2] = 1
"""


@pytest.mark.unit
class TestShippedGeometries:
    def test_all_shipped_files_load(self):
        """Every shipped .geo file parses and validates"""
        names = shipped_geometries()
        assert names == ["classical", "moyal_perturbed", "moyal_plane", "nc_torus"]
        for name in names:
            spec = load_geometry(SHIPPED_DIR / f"{name}.geo")
            assert spec.name == name
            assert len(spec.digest) == 64

    def test_moyal_plane(self, moyal):
        """The Moyal plane is a polynomial algebra with an invariant frame"""
        assert moyal.order == 2
        assert moyal.algebra.kind == "polynomial"
        assert moyal.rank == 2
        assert moyal.ctx.invariant
        assert (moyal.seed, moyal.samples) == (0, 50)
        assert moyal.source.endswith("moyal_plane.geo")

    def test_order_override(self, moyal1):
        """An explicit order wins over the file"""
        assert moyal1.order == 1
        assert moyal1.algebra.order == 1

    def test_torus(self, torus):
        """The torus file runs the full fifty samples"""
        assert torus.algebra.kind == "torus"
        assert torus.samples == 50

    def test_resolve(self, tmp_path):
        """Names resolve to shipped files and explicit paths are kept"""
        assert resolve_geometry("moyal_plane") == SHIPPED_DIR / "moyal_plane.geo"
        path = tmp_path / "plane.geo"
        path.write_text(PLANE_GEO)
        assert resolve_geometry(str(path)) == path
        assert load_geometry(path).name == "plane"
        with pytest.raises(FileNotFoundError):
            resolve_geometry("no_such_geometry")

    def test_missing_file(self, tmp_path):
        """Loading a missing path is a spec error"""
        with pytest.raises(SpecError, match="not found"):
            load_geometry(tmp_path / "missing.geo")

    def test_suite_section_is_optional(self):
        """Without [suite] the seed and sample count are left to the caller"""
        spec = parse_geometry(PLANE_GEO)
        assert (spec.seed, spec.samples) == (None, None)

    def test_digest_is_stable(self):
        """The same text hashes to the same digest"""
        assert parse_geometry(PLANE_GEO).digest == parse_geometry(PLANE_GEO).digest


@pytest.mark.unit
class TestGeometryErrors:
    """Test validation errors raised while loading"""

    def test_missing_section(self):
        """[metric] is required"""
        text = PLANE_GEO.split("[metric]")[0]
        with pytest.raises(SpecError, match=r"missing section \[metric\]"):
            parse_geometry(text)

    def test_unknown_section(self):
        """Unknown section headers carry their line number"""
        with pytest.raises(ParseError) as excinfo:
            parse_geometry(PLANE_GEO + "[extras]\n")
        assert excinfo.value.line == PLANE_GEO.count("\n") + 1

    def test_expression_error_position(self):
        """Errors inside an expression are reported at file line and column"""
        text = PLANE_GEO.replace("g[2,2] = 1", "g[2,2] = 1 + $")
        line = text.splitlines().index("g[2,2] = 1 + $") + 1
        with pytest.raises(ParseError) as excinfo:
            parse_geometry(text)
        assert excinfo.value.line == line
        assert excinfo.value.column == 14

    def test_asymmetric_metric(self):
        """g12 without g21 is rejected"""
        text = PLANE_GEO.replace("g[2,2] = 1", "g[2,2] = 1\ng[1,2] = x1")
        with pytest.raises(InvarianceError, match="braided symmetric"):
            parse_geometry(text)

    def test_twist_generator_out_of_range(self):
        """A twist may only use declared generators"""
        text = SHEAR_GEO.replace('(1, 2, "1")', '(1, 3, "1")')
        with pytest.raises(SpecError, match="twist references"):
            parse_geometry(text)

    def test_frame_action_must_match_commutator(self):
        """Z1 |> e1 must equal [Z1, e1]"""
        text = SHEAR_GEO.replace("Z[1] |> e[1] = -e[2]", "Z[1] |> e[1] = e[2]")
        with pytest.raises(InvarianceError, match="does not match"):
            parse_geometry(text)

    def test_declared_dual_basis(self):
        """A declared action on one-forms must preserve the pairing"""
        good = SHEAR_GEO.replace("Z[1] |> e[1] = -e[2]", "Z[1] |> e[1] = -e[2]\nZ[1] |> w[2] = w[1]")
        assert not parse_geometry(good).ctx.invariant
        bad = SHEAR_GEO.replace("Z[1] |> e[1] = -e[2]", "Z[1] |> e[1] = -e[2]\nZ[1] |> w[2] = -w[1]")
        with pytest.raises(InvarianceError, match="dual basis violated"):
            parse_geometry(bad)

    def test_structure_functions(self):
        """[e1, e2] = -e2 must be declared for a non-holonomic frame"""
        declared = STRUCTURED_GEO.format(structure="C[1,2,2] = -1\nC[2,1,2] = 1")
        spec = parse_geometry(declared)
        assert spec.ctx.structure_function(0, 1, 1) == -spec.algebra.one()
        with pytest.raises(InvarianceError, match="structure functions"):
            parse_geometry(STRUCTURED_GEO.format(structure=""))

    def test_non_integer_order(self):
        """order must be an integer"""
        with pytest.raises(ParseError, match="integer"):
            parse_geometry(PLANE_GEO.replace("order = 1", "order = one"))


@pytest.mark.unit
class TestFunctionValuedFrameActions:
    """Frame actions with parenthesized algebra coefficients"""

    def test_parenthesized_coefficient(self):
        """Z[1] |> e[2] = (2*x1) e[3] loads as an algebra-valued action"""
        spec = parse_geometry(CURVED_FRAME_GEO)
        ctx = spec.ctx
        x1 = spec.algebra.generator(0)
        assert not ctx.constant_action
        assert ctx.M[0][1] == (spec.algebra.zero(), spec.algebra.zero(), x1.scale(2))

    def test_constant_coefficients_stay_constant(self):
        """(-1) in parentheses is still a constant action"""
        text = SHEAR_GEO.replace("Z[1] |> e[1] = -e[2]", "Z[1] |> e[1] = (-1) e[2]")
        assert parse_geometry(text).ctx.constant_action

    def test_coefficient_must_match_commutator(self):
        """(x1) e[3] is not [Z1, e2]"""
        text = CURVED_FRAME_GEO.replace("(2*x1) e[3]", "(x1) e[3]")
        with pytest.raises(InvarianceError, match="does not match"):
            parse_geometry(text)

    def test_structure_functions_are_required(self):
        """[e1, e2] = (2 x1) e3 must be declared"""
        text = CURVED_FRAME_GEO.replace("C[1,2,3] = 2*x1\nC[2,1,3] = -2*x1\n", "")
        with pytest.raises(InvarianceError, match="structure functions"):
            parse_geometry(text)

    def test_coefficient_error_position(self):
        """Errors inside a parenthesized coefficient point at the file column"""
        text = CURVED_FRAME_GEO.replace("(2*x1) e[3]", "(2*$) e[3]")
        line = text.splitlines().index("Z[1] |> e[2] = (2*$) e[3]") + 1
        with pytest.raises(ParseError) as excinfo:
            parse_geometry(text)
        assert excinfo.value.line == line
        assert excinfo.value.column == 19

    def test_combination_syntax(self):
        """Anything but a combination of frame elements is rejected"""
        text = CURVED_FRAME_GEO.replace("(2*x1) e[3]", "2*x1 e[3]")
        with pytest.raises(ParseError, match="combination of frame elements"):
            parse_geometry(text)
