import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from cylscatter import (
    DomainError,
    FamilyParameters,
    I_transform,
    build_family_profile,
    build_linear_model,
    capital_phi,
    capital_phi_deriv,
    family_phase_function,
    linear_phase_function,
    phi_from_profile,
    phi_second_at_x,
    psi_leading,
    rational_coefficient,
    wkb_delta,
)
from cylscatter.wkb import export_phase_table, profile_psi_spline


def test_linear_psi_closed_form():
    for t in (0.5, 1.0, 3.0):
        prof = build_linear_model(t)
        for x in np.arange(0.1, 0.95, 0.1):
            assert psi_leading(prof, float(x)) == pytest.approx(-t * x / 2.0, abs=1e-10)


def test_weight_integral_constant():
    # int_0^inf [(1 - y^-2)_+^(1/2) - 1] dy = -pi/2
    for x in (0.1, 1.0, 10.0):
        assert I_transform(lambda y: 1.0, x) == pytest.approx(-math.pi / 2.0, abs=1e-10)


def test_weight_integral_oracle_by_substitution():
    # oracle: same integral through the closed antiderivative on (1, inf):
    # int_1^inf [sqrt(1 - 1/y^2) - 1] dy = 1 - pi/2, plus -1 on (0, 1)
    val, _ = quad(lambda y: math.sqrt(1.0 - y**-2) - 1.0, 1.0, np.inf)
    assert val - 1.0 == pytest.approx(I_transform(lambda y: 1.0, 1.0), abs=1e-9)


def test_phi_psi_change_of_variables(family_profile):
    for x in (0.2, 0.5, 0.8):
        z = x / math.sqrt(1.0 - x * x)
        lhs = psi_leading(family_profile, x)
        rhs = math.sqrt(1.0 - x * x) * phi_from_profile(family_profile, z) / math.pi
        assert lhs == pytest.approx(rhs, abs=1e-9)


def test_phi_is_x_times_transform_of_generating(family_profile, rational_half):
    # phi(x) = x * I(F)(x) with F = dr/dy the generating function
    params = family_profile.params

    def F(y):
        return float(params.generating(rational_half, y))

    for x in (0.3, 1.0, 2.5):
        assert phi_from_profile(family_profile, x) == pytest.approx(
            x * I_transform(F, x), abs=1e-8
        )


def test_family_phase_linearity(rational_half):
    """psi of the built surface equals alpha*x + beta*Phi(x).

    Two fully independent routes: quadrature over the profile ODE solution
    versus the weighted transform of the coefficient alone.
    """
    for alpha, beta in ((-0.5, 0.1), (-0.4, -0.2)):
        prof = build_family_profile(FamilyParameters(alpha=alpha, beta=beta), rational_half)
        for x in (0.15, 0.5, 0.85):
            direct = psi_leading(prof, x)
            additive = alpha * x + beta * capital_phi(rational_half, x)
            assert direct == pytest.approx(additive, abs=1e-7)


def test_capital_phi_deriv_matches_differences(rational_half):
    h = 1e-5
    for x in (0.2, 0.5, 0.8):
        fd = (capital_phi(rational_half, x + h) - capital_phi(rational_half, x - h)) / (2 * h)
        assert capital_phi_deriv(rational_half, x) == pytest.approx(fd, abs=1e-7)


def test_phi_second_derivative_matches_differences():
    for rho in (0.3, 2.0 / 3.0):
        coef = rational_coefficient(rho)
        h = 1e-3
        for x in (0.15, 0.5, 0.85):
            stencil = [capital_phi(coef, x + j * h) for j in (-2, -1, 0, 1, 2)]
            fd = (
                -stencil[0] + 16 * stencil[1] - 30 * stencil[2] + 16 * stencil[3] - stencil[4]
            ) / (12 * h * h)
            assert phi_second_at_x(coef, x) == pytest.approx(fd, abs=1e-5)


def test_phi_second_fixed_sign():
    xs = np.linspace(0.1, 0.9, 33)
    for rho in (0.3, 2.0 / 3.0):
        coef = rational_coefficient(rho)
        vals = np.array([phi_second_at_x(coef, float(x)) for x in xs])
        assert np.all(vals < 0.0) or np.all(vals > 0.0)


@settings(max_examples=20, deadline=None)
@given(
    st.floats(min_value=-3.0, max_value=3.0),
    st.floats(min_value=0.1, max_value=3.0),
)
def test_transform_is_linear(c, x):
    coef = rational_coefficient(0.5)
    base = I_transform(coef, x)
    scaled = I_transform(lambda y: c * float(coef.f(y)), x)
    assert scaled == pytest.approx(c * base, abs=1e-9)


def test_phase_function_objects(rational_half):
    lin = linear_phase_function(2.0)
    assert lin(0.4) == pytest.approx(-0.4)
    fam = family_phase_function(-0.5, 0.1, rational_half)
    x = 0.5
    assert float(fam.psi(x)) == pytest.approx(
        -0.25 + 0.1 * capital_phi(rational_half, x), abs=1e-9
    )
    h = 1e-5
    fd = (float(fam.psi(x + h)) - float(fam.psi(x - h))) / (2 * h)
    assert float(fam.dpsi(x)) == pytest.approx(fd, abs=1e-7)


def test_profile_psi_spline_accuracy(family_profile):
    spl = profile_psi_spline(family_profile, 0.1, 0.9, n=80)
    for x in (0.17, 0.43, 0.77):
        assert float(spl(x)) == pytest.approx(psi_leading(family_profile, x), abs=1e-8)


def test_wkb_delta_window():
    lin = linear_phase_function(1.0)
    assert wkb_delta(lin, 100.0, 50) == pytest.approx(-24.75)
    assert wkb_delta(lin, 100.0, -50) == pytest.approx(-24.75)
    with pytest.raises(DomainError):
        wkb_delta(lin, 100.0, 99, eps=0.05)


def test_export_phase_table(tmp_path, rational_half):
    path = tmp_path / "phase.csv"
    export_phase_table(path, rational_half, -0.5, 0.1, [0.3, 0.6])
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "x,psi,phi,phi2"
    assert len(lines) == 3
