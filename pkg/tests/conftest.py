import pytest

from sharbly.fields import QQ
from sharbly.homology import build_complex
from sharbly.voronoi import enumerate_cells


@pytest.fixture(scope="session")
def table2():
    return enumerate_cells(2)


@pytest.fixture(scope="session")
def table3():
    return enumerate_cells(3)


@pytest.fixture(scope="session")
def cx11(table2):
    return build_complex(2, 11, QQ, table=table2)


@pytest.fixture(scope="session")
def cx1(table2):
    return build_complex(2, 1, QQ, table=table2)
