import dataclasses

import pytest

import magcas as mc
from magcas.quadrature import QuadratureSpec
from magcas.casimir import CasimirQuad


@pytest.fixture(scope="session")
def cr2o3():
    return mc.preset("Cr2O3")


@pytest.fixture(scope="session")
def yig():
    return mc.preset("YIG")


@pytest.fixture(scope="session")
def afm_gapless(cr2o3):
    return dataclasses.replace(cr2o3.params, delta=0.0, K=None)


@pytest.fixture(scope="session")
def small_quad():
    """Coarse but graded settings for fast unit tests (not acceptance grade)."""
    import math
    inner = QuadratureSpec.from_breaks(
        (0.0, 1e-3, 1e-2, 0.1, 0.5, 1.5, math.pi,
         2 * math.pi - 1.5, 2 * math.pi - 0.5, 2 * math.pi - 0.1,
         2 * math.pi - 1e-2, 2 * math.pi - 1e-3, 2 * math.pi),
        order=8, abs_tol=1e-8, rel_tol=1e-10, refinement_limit=3)
    outer = QuadratureSpec.from_breaks(
        (0.0, 2e-3, 1e-2, 5e-2, 0.2, 0.7, 1.8, math.pi),
        order=7, abs_tol=1e-7, rel_tol=1e-9, refinement_limit=3)
    return CasimirQuad(inner=inner, outer_x=outer, outer_y=outer)
