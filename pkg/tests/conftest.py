import pytest

from nilforms.algebra import build_complex
from nilforms.catalog import catalog_load
from nilforms.cohomology import EvaluatedComplex, zero_point
from nilforms.deformation import evaluate_se


@pytest.fixture(scope="session")
def torus3():
    return catalog_load("torus3")


@pytest.fixture(scope="session")
def iwasawa3():
    return catalog_load("iwasawa3")


@pytest.fixture(scope="session")
def bcvary10():
    return catalog_load("bcvary10")


@pytest.fixture(scope="session")
def ec_torus(torus3):
    return EvaluatedComplex(build_complex(torus3.se), ())


@pytest.fixture(scope="session")
def ec_iwasawa(iwasawa3):
    return EvaluatedComplex(build_complex(iwasawa3.se), ())


@pytest.fixture(scope="session")
def ec_bcvary0(bcvary10):
    se0 = evaluate_se(bcvary10.se, zero_point(4))
    return EvaluatedComplex(build_complex(se0), ())
