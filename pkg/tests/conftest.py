import pytest

from heckesigns import forms

CURVE_11 = (0, -1, 1, -10, -20)


@pytest.fixture(scope="session")
def delta():
    # large enough for J_tau at X = 1e5 with alpha = 20
    return forms.from_level1(12, 150_000)


@pytest.fixture(scope="session")
def curve():
    return forms.from_elliptic_curve(CURVE_11, 11, 30_000)


@pytest.fixture(scope="session")
def small_forms():
    return {k: forms.from_level1(k, 20_000) for k in (16, 18, 22)}
