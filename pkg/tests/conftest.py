import subprocess
import sys

import pytest

from support import DEMO, ROOT


@pytest.fixture(scope="session")
def demo_assets():
    """Make sure the committed demo GLB exists (regenerate if wiped)."""
    glb = DEMO / "assets" / "apartment.glb"
    if not glb.is_file():
        subprocess.run([sys.executable, str(DEMO / "make_assets.py")],
                       check=True, cwd=ROOT)
    return glb


@pytest.fixture(scope="session")
def apartment_scene(demo_assets):
    return DEMO / "apartment.html"


@pytest.fixture(scope="session")
def lobby_scene():
    return DEMO / "index.html"


@pytest.fixture(scope="session")
def flat10():
    """10 x 10 m plane baked once; shared by read-only tests."""
    from escroom.navmesh import bake_navmesh
    from support import plane_tris
    return bake_navmesh(plane_tris(10.0, 10.0))
