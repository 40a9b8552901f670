import pytest

from cylscatter import (
    FamilyParameters,
    build_family_profile,
    build_linear_model,
    rational_coefficient,
)


@pytest.fixture(scope="session")
def linear_profile():
    return build_linear_model(1.0)


@pytest.fixture(scope="session")
def rational_half():
    return rational_coefficient(0.5)


@pytest.fixture(scope="session")
def family_profile(rational_half):
    # the reference family sample used throughout: alpha=-1/2, beta=0.1
    return build_family_profile(FamilyParameters(alpha=-0.5, beta=0.1), rational_half)
