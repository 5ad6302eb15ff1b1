import pytest
from django.test import override_settings

from verification.models import GeometryRun
from verification.tasks import run_check_suite, verify_shipped_geometries

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

[suite]
samples = 1
"""

BROKEN_GEO = """
[geometry]
name = broken
"""


@pytest.fixture
def geometry_dir(tmp_path):
    """Returns a directory with one valid and one broken geometry"""
    (tmp_path / "plane.geo").write_text(PLANE_GEO)
    (tmp_path / "broken.geo").write_text(BROKEN_GEO)
    with override_settings(GEOMETRY_DIR=tmp_path, GEOMETRY_UNIQUENESS_PROBES=2):
        yield tmp_path


@pytest.mark.django_db
class TestRunCheckSuite:
    """Test executing recorded runs"""

    def test_run_passes(self, geometry_dir):
        """Test a valid geometry ends in passed with a stored report"""
        run = GeometryRun.objects.create(geometry="plane", suite="all")

        summary = run_check_suite(run.id)

        run.refresh_from_db()
        assert summary["task"] == "run_check_suite"
        assert summary["status"] == "passed"
        assert run.status == "passed"
        assert run.report["ok"] is True
        assert run.finished_at is not None

    def test_run_error(self, geometry_dir):
        """Test a broken geometry ends in error with the message stored"""
        run = GeometryRun.objects.create(geometry="broken", suite="cartan")

        summary = run_check_suite(run.id)

        run.refresh_from_db()
        assert summary["status"] == "error"
        assert "missing section" in run.error
        assert run.report is None

    def test_missing_run(self):
        """Test a vanished run is reported as missing"""
        assert run_check_suite(9999)["status"] == "missing"


@pytest.mark.django_db
class TestVerifyShippedGeometries:
    """Test the nightly regression task"""

    def test_summary(self, geometry_dir):
        """Test every geometry in the directory is checked once"""
        summary = verify_shipped_geometries()

        assert summary["task"] == "verify_shipped_geometries"
        assert summary["passed"] == ["plane"]
        assert summary["failed"] == []
        assert summary["errors"] == ["broken"]
        assert summary["total_geometries"] == 2
        assert GeometryRun.objects.count() == 2
