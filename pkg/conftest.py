import logging
import os
import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "core.settings")
django.setup()

import pytest
from rest_framework.test import APIClient
from geometry.loader import SHIPPED_DIR, load_geometry, parse_geometry


SHEAR_GEO = """
[geometry]
name = shear
order = 2

[algebra]
kind = polynomial
dim = 2

[symmetry]
generators = 2
Z[1](x[2]) = x1
Z[2](x[2]) = 1

[twist]
(1, 2, "1")

[frame]
rank = 2
e[1](x[1]) = 1
e[2](x[2]) = 1
Z[1] |> e[1] = -e[2]

[metric]
g[1,1] = 1
g[2,2] = 1
"""

CURVED_FRAME_GEO = """
[geometry]
name = curved_frame
order = 2

[algebra]
kind = polynomial
dim = 3

[symmetry]
generators = 2
Z[1](x[1]) = 1
Z[2](x[2]) = 1

[twist]
(1, 2, "1")
(2, 1, "-1")

[frame]
rank = 3
e[1](x[1]) = 1
e[2](x[2]) = 1
e[2](x[3]) = x1^2
e[3](x[3]) = 1
Z[1] |> e[2] = (2*x1) e[3]
C[1,2,3] = 2*x1
C[2,1,3] = -2*x1

[metric]
g[1,1] = 1
g[2,2] = 1
g[3,3] = 1
"""

MOYAL3_GEO = """
[geometry]
name = moyal3
order = 1

[algebra]
kind = polynomial
dim = 3

[symmetry]
generators = 2
Z[1](x[1]) = 1
Z[2](x[2]) = 1

[twist]
(1, 2, "1")
(2, 1, "-1")

[frame]
rank = 3
e[1](x[1]) = 1
e[2](x[2]) = 1
e[3](x[3]) = 1

[metric]
g[1,1] = 1
g[2,2] = 1
g[3,3] = 1
"""

CLASSICAL3_GEO = """
[geometry]
name = classical3
order = 1

[algebra]
kind = polynomial
dim = 3

[frame]
rank = 3
e[1](x[1]) = 1
e[2](x[2]) = 1
e[3](x[3]) = 1

[metric]
g[1,1] = 1
g[2,2] = 1
g[3,3] = 1
"""


@pytest.fixture
def api_client():
    """Returns API client for making requests"""
    return APIClient()


@pytest.fixture
def geometry_logs(caplog, monkeypatch):
    """Returns caplog with the project loggers propagating to it"""
    for name in ("geometry", "verification"):
        monkeypatch.setattr(logging.getLogger(name), "propagate", True)
    return caplog


def geometry_url(path):
    """Helper to build geometry API URLs"""
    return f"/api/geometry/{path.lstrip('/')}"


def shipped(name, **kwargs):
    """Loads a shipped .geo file by name"""
    return load_geometry(SHIPPED_DIR / f"{name}.geo", **kwargs)


@pytest.fixture(scope="session")
def moyal():
    """Moyal plane at order 2 with the flat metric"""
    return shipped("moyal_plane")


@pytest.fixture(scope="session")
def moyal1():
    """Moyal plane truncated at order 1"""
    return shipped("moyal_plane", order=1)


@pytest.fixture(scope="session")
def perturbed():
    """Moyal plane at order 1 with g11 = 1 + h*x1"""
    return shipped("moyal_perturbed")


@pytest.fixture(scope="session")
def torus():
    """Noncommutative torus with the flat metric"""
    return shipped("nc_torus")


@pytest.fixture(scope="session")
def classical():
    """Trivial twist with a polynomial metric"""
    return shipped("classical")


@pytest.fixture(scope="session")
def classical3():
    """Rank-3 trivial twist, needed for nonvanishing three-forms"""
    return parse_geometry(CLASSICAL3_GEO)


@pytest.fixture(scope="session")
def shear():
    """Twisted plane whose frame is not invariant under the symmetry"""
    return parse_geometry(SHEAR_GEO)


@pytest.fixture(scope="session")
def curved_frame():
    """Rank-3 twisted frame whose symmetry action has function coefficients"""
    return parse_geometry(CURVED_FRAME_GEO)


@pytest.fixture(scope="session")
def moyal3():
    """Rank-3 coordinate frame twisted in the (x1, x2) plane"""
    return parse_geometry(MOYAL3_GEO)
