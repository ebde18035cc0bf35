import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import ROW1
from nanorotor.fields import (
    CavityConfig,
    PolarizationBasis,
    TweezerConfig,
    cavity_mode,
    field_scale,
    total_field,
    tweezer_amplitude_from_power,
    tweezer_mode,
)


def make_tweezer(**kw):
    base = dict(power=ROW1["power"], wavelength=ROW1["wavelength"],
                waist_x=ROW1["waist_x"], waist_y=ROW1["waist_y"],
                psi=ROW1["psi"], zeta=ROW1["zeta"])
    base.update(kw)
    return TweezerConfig(**base)


def make_cavity(**kw):
    base = dict(length=ROW1["cavity_length"], waist=ROW1["cavity_waist"],
                linewidth=ROW1["kappa"], detuning=ROW1["detuning"],
                theta=ROW1["theta"], phi=ROW1["phi"])
    base.update(kw)
    return CavityConfig(**base)


def fd4_grad(func, r, h):
    """Gradient rows d/dr_k of func(r) by 4th-order central differences."""
    rows = []
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        rows.append((-func(r + 2 * e) + 8 * func(r + e)
                     - 8 * func(r - e) + func(r - 2 * e)) / (12 * h))
    return np.array(rows)


points = st.tuples(
    st.floats(-1.5e-6, 1.5e-6), st.floats(-1.5e-6, 1.5e-6),
    st.floats(-1.5e-6, 1.5e-6)).map(np.array)


# ---------------------------------------------------------------------------
# amplitude from power
# ---------------------------------------------------------------------------

def test_amplitude_frozen_value():
    # Independently derived symbolically: eps = w_c sqrt(L P lambda) /
    # (2 c sqrt(pi hbar w_x w_y)); frozen from a 30-digit evaluation of that
    # closed form at the CODATA constants.
    eps = tweezer_amplitude_from_power(make_tweezer(), make_cavity())
    assert eps == pytest.approx(122539.49521544386, rel=1e-12)


def test_amplitude_square_root_power_law():
    tw, cav = make_tweezer(), make_cavity()
    e1 = tweezer_amplitude_from_power(tw, cav)
    e4 = tweezer_amplitude_from_power(make_tweezer(power=4 * tw.power), cav)
    assert e4 == pytest.approx(2 * e1, rel=1e-14)
    assert tweezer_amplitude_from_power(make_tweezer(power=0.0), cav) == 0.0


def test_with_amplitude_caches_value():
    tw = make_tweezer()
    cav = make_cavity()
    tw2 = tw.with_amplitude(cav)
    assert tw2.amplitude == pytest.approx(
        tweezer_amplitude_from_power(tw, cav), rel=1e-15)


# ---------------------------------------------------------------------------
# tweezer mode
# ---------------------------------------------------------------------------

def test_tweezer_mode_focus_is_unity():
    f, _ = tweezer_mode(np.zeros(3), make_tweezer())
    assert f == pytest.approx(1.0 + 0.0j, abs=1e-15)


@pytest.mark.parametrize("z", [0.0, 0.4e-6, -1.2e-6, 3.0e-6])
def test_tweezer_mode_waist_scaling(z):
    tw = make_tweezer()
    broadening = np.sqrt(1.0 + (z / tw.rayleigh_range) ** 2)
    f_axis, _ = tweezer_mode(np.array([0.0, 0.0, z]), tw)
    fx, _ = tweezer_mode(np.array([tw.waist_x * broadening, 0.0, z]), tw)
    fy, _ = tweezer_mode(np.array([0.0, tw.waist_y * broadening, z]), tw)
    assert abs(fx) == pytest.approx(abs(f_axis) / np.e, rel=1e-12)
    assert abs(fy) == pytest.approx(abs(f_axis) / np.e, rel=1e-12)
    assert abs(f_axis) == pytest.approx(1.0 / broadening, rel=1e-12)


@settings(max_examples=150, deadline=None)
@given(points)
def test_tweezer_gradient_matches_finite_differences(r):
    tw = make_tweezer()
    _, grad = tweezer_mode(r, tw)
    num = fd4_grad(lambda x: tweezer_mode(x, tw)[0], r, 1e-6 * tw.wavelength)
    # atol covers the FD roundoff floor eps/h ~ 1e-4, i.e. <1e-9 of the
    # k|f| gradient scale
    np.testing.assert_allclose(grad, num, rtol=1e-6, atol=1e-3)


def test_rayleigh_range_conventions():
    tw = make_tweezer()
    assert tw.rayleigh_range == pytest.approx(
        tw.wavenumber * tw.waist_x * tw.waist_y / 2.0, rel=1e-15)
    tw2 = make_tweezer(rayleigh_range=2.5e-6)
    assert tw2.rayleigh_range == 2.5e-6


# ---------------------------------------------------------------------------
# cavity mode
# ---------------------------------------------------------------------------

def test_cavity_mode_antinode_and_node():
    k = make_tweezer().wavenumber
    f, g = cavity_mode(np.zeros(3), make_cavity(phi=0.0), k)
    assert f == pytest.approx(1.0, abs=1e-15)
    np.testing.assert_allclose(g, 0.0, atol=1e-9 * k)
    f, _ = cavity_mode(np.zeros(3), make_cavity(phi=np.pi / 2), k)
    assert f == pytest.approx(0.0, abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(points, st.floats(0.0, np.pi), st.floats(0.0, 2 * np.pi))
def test_cavity_mode_bounded_and_transverse_invariant(r, theta, phi):
    tw = make_tweezer()
    cav = make_cavity(theta=theta, phi=phi)
    f, _ = cavity_mode(r, cav, tw.wavenumber)
    assert abs(f) <= 1.0 + 1e-12
    basis = PolarizationBasis.from_angles(tw.psi, tw.zeta, theta)
    for direction in (basis.e_1, basis.e_2):
        f2, _ = cavity_mode(r + 0.37e-6 * direction, cav, tw.wavenumber)
        assert f2 == pytest.approx(f, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(points)
def test_cavity_gradient_matches_finite_differences(r):
    tw = make_tweezer()
    cav = make_cavity()
    _, grad = cavity_mode(r, cav, tw.wavenumber)
    num = fd4_grad(lambda x: cavity_mode(x, cav, tw.wavenumber)[0],
                   r, 1e-6 * tw.wavelength)
    np.testing.assert_allclose(grad, num, rtol=1e-6, atol=1e-3)


# ---------------------------------------------------------------------------
# polarization basis
# ---------------------------------------------------------------------------

@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, np.pi / 4), st.floats(-np.pi, np.pi),
       st.floats(0.0, np.pi))
def test_basis_orthonormality(psi, zeta, theta):
    basis = PolarizationBasis.from_angles(psi, zeta, theta)
    assert np.vdot(basis.e_t, basis.e_t).real == pytest.approx(1.0, abs=1e-12)
    assert abs(np.dot(basis.e_t.real, basis.e_t.imag)) < 1e-12
    for u in (basis.e_t1, basis.e_t2, basis.e_1, basis.e_2, basis.e_c):
        assert np.linalg.norm(u) == pytest.approx(1.0, abs=1e-12)
    assert abs(np.dot(basis.e_t1, basis.e_t2)) < 1e-12
    assert abs(np.dot(basis.e_1, basis.e_2)) < 1e-12
    np.testing.assert_allclose(basis.e_c, np.cross(basis.e_2, basis.e_1),
                               atol=1e-15)


def test_basis_vectors_explicit():
    zeta, theta = 0.3, 0.7
    basis = PolarizationBasis.from_angles(np.pi / 8, zeta, theta)
    np.testing.assert_allclose(
        basis.e_t1, [np.cos(zeta), -np.sin(zeta), 0.0], atol=1e-15)
    np.testing.assert_allclose(
        basis.e_t2, [np.sin(zeta), np.cos(zeta), 0.0], atol=1e-15)
    np.testing.assert_allclose(
        basis.e_1, [np.cos(theta), -np.sin(theta), 0.0], atol=1e-15)
    np.testing.assert_allclose(basis.e_2, [0.0, 0.0, 1.0], atol=1e-15)
    np.testing.assert_allclose(
        basis.e_c, [np.sin(theta), np.cos(theta), 0.0], atol=1e-15)


def test_linear_polarization_is_real():
    basis = PolarizationBasis.from_angles(0.0, 0.2, 0.5)
    np.testing.assert_allclose(basis.e_t.imag, 0.0, atol=1e-15)
    basis = PolarizationBasis.from_angles(np.pi / 4, 0.2, 0.5)
    assert np.linalg.norm(basis.e_t.real) == pytest.approx(
        np.linalg.norm(basis.e_t.imag), rel=1e-12)


# ---------------------------------------------------------------------------
# total field
# ---------------------------------------------------------------------------

def test_total_field_at_focus_without_cavity():
    tw, cav = make_tweezer(), make_cavity()
    basis = PolarizationBasis.from_angles(tw.psi, tw.zeta, cav.theta)
    sample = total_field(np.zeros(3), np.zeros(2, complex), tw, cav)
    eps = tweezer_amplitude_from_power(tw, cav)
    expected = field_scale(tw, cav) * eps * basis.e_t
    np.testing.assert_allclose(sample.E, expected, rtol=1e-12)


def test_total_field_cavity_only_at_antinode():
    tw = make_tweezer(power=1e-30)
    cav = make_cavity(phi=0.0)
    sample = total_field(np.zeros(3), np.array([1.0, 0.0], complex), tw, cav)
    basis = PolarizationBasis.from_angles(tw.psi, tw.zeta, cav.theta)
    np.testing.assert_allclose(
        sample.E, field_scale(tw, cav) * basis.e_1, rtol=1e-10, atol=1e-6)


def test_total_field_linear_in_amplitudes():
    tw, cav = make_tweezer(), make_cavity()
    r = np.array([0.3e-6, -0.2e-6, 0.5e-6])
    b = np.array([0.8 - 0.3j, -0.1 + 0.6j])
    full = total_field(r, b, tw, cav)
    tweezer_part = total_field(r, np.zeros(2, complex), tw, cav)
    cavity_part = total_field(r, b, make_tweezer(power=0.0), cav)
    np.testing.assert_allclose(
        full.E, tweezer_part.E + cavity_part.E, rtol=1e-14, atol=0)
    np.testing.assert_allclose(
        full.grad, tweezer_part.grad + cavity_part.grad, rtol=1e-14, atol=0)


@settings(max_examples=100, deadline=None)
@given(points, st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1),
       st.floats(-1, 1))
def test_total_field_gradient_matches_finite_differences(r, br1, bi1, br2, bi2):
    tw, cav = make_tweezer(), make_cavity()
    b = np.array([br1 + 1j * bi1, br2 + 1j * bi2])
    sample = total_field(r, b, tw, cav)
    num = fd4_grad(lambda x: total_field(x, b, tw, cav).E, r,
                   1e-6 * tw.wavelength)
    scale = np.abs(sample.grad).max()
    np.testing.assert_allclose(sample.grad, num, rtol=2e-6,
                               atol=1e-6 * scale)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def test_ellipticity_range():
    make_tweezer(psi=0.6)           # 0.6 rad < pi/4, valid
    make_tweezer(psi=0.0)
    make_tweezer(psi=np.pi / 4)
    with pytest.raises(ValueError):
        make_tweezer(psi=0.9)
    with pytest.raises(ValueError):
        make_tweezer(psi=-0.01)


def test_config_validation():
    with pytest.raises(ValueError):
        make_tweezer(power=-1.0)
    with pytest.raises(ValueError):
        make_tweezer(wavelength=0.0)
    with pytest.raises(ValueError):
        make_cavity(linewidth=-3e5)
    with pytest.raises(ValueError):
        make_cavity(length=0.0)


def test_derived_geometry_values():
    tw, cav = make_tweezer(), make_cavity()
    assert tw.wavenumber == pytest.approx(2 * np.pi / tw.wavelength, rel=1e-15)
    assert cav.mode_volume == pytest.approx(
        np.pi * cav.waist**2 * cav.length / 4.0, rel=1e-15)
