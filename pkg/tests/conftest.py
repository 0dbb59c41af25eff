import pytest

from spanlab import c4_spec, enumerate_copies, krs_spec


@pytest.fixture(scope="session")
def fam_c4e6():
    return enumerate_copies(c4_spec(6))


@pytest.fixture(scope="session")
def fam_c4e8():
    return enumerate_copies(c4_spec(8))


@pytest.fixture(scope="session")
def fam_c4e10():
    return enumerate_copies(c4_spec(10))


@pytest.fixture(scope="session")
def fam_k426():
    return enumerate_copies(krs_spec(4, 2, 6))


@pytest.fixture(scope="session")
def fam_k526():
    return enumerate_copies(krs_spec(5, 2, 6))


@pytest.fixture(scope="session")
def fam_k428():
    return enumerate_copies(krs_spec(4, 2, 8))


@pytest.fixture(scope="session")
def fam_k306():
    return enumerate_copies(krs_spec(3, 0, 6))
