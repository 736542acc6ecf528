"""Constitutive law checks: Hooke, Neo-Hookean, consistency, objectivity."""

import numpy as np
import pytest

from ebsmpm.errors import ConfigurationError, ElementInversionError
from ebsmpm.materials import (LinearElastic, NeoHookean, lame_from_young,
                              linear_stress_update, neo_hookean_update,
                              young_from_lame)


def test_linear_zero_increment_keeps_stress():
    strain = np.array([-1e-4])
    new, sig = linear_stress_update(strain, np.array([0.0]), 50.5e9, 0.0, "bar")
    assert np.allclose(new, strain)
    assert sig[0] == pytest.approx(50.5e9 * -1e-4)


def test_linear_bar_hooke():
    _, sig = linear_stress_update(np.array([-1e-4]), np.array([0.0]),
                                  50.5e9, 0.0, "bar")
    assert sig[0] == pytest.approx(-5.05e6)


def test_plane_strain_nu_zero_decouples():
    strain = np.array([1e-3, 0.0, 0.0])
    _, sig = linear_stress_update(strain, np.zeros(3), 10e9, 0.0, "plane_strain")
    assert sig[0] == pytest.approx(10e6)
    assert sig[1] == pytest.approx(0.0, abs=1.0)
    assert sig[2] == pytest.approx(0.0, abs=1.0)


def test_linear_parameter_validation():
    with pytest.raises(ConfigurationError):
        LinearElastic(e=-1.0, nu=0.3, rho=1.0)
    with pytest.raises(ConfigurationError):
        LinearElastic(e=1.0, nu=0.6, rho=1.0)


def test_neo_hookean_reference_state():
    f = np.array([1.0, 0.0, 0.0, 1.0])
    new, sig, psi = neo_hookean_update(f, np.zeros(4), 0.0, 26.1e6, 104.4e6)
    assert np.allclose(new, f)
    assert np.allclose(sig, 0.0)
    assert psi == 0.0


def test_neo_hookean_small_strain_limit():
    mu, lam = 26.1e6, 104.4e6
    e = 1e-8
    f = np.array([1.0 + e, 0.0, 0.0, 1.0])
    _, sig, _ = neo_hookean_update(f, np.zeros(4), 0.0, mu, lam)
    assert sig[0] == pytest.approx((2 * mu + lam) * e, rel=1e-5)


def test_ring_constants_lame_roundtrip():
    mu, lam = 26.1e6, 104.4e6
    e, nu = young_from_lame(mu, lam)
    mu2, lam2 = lame_from_young(e, nu)
    assert mu2 == pytest.approx(mu, rel=1e-12)
    assert lam2 == pytest.approx(lam, rel=1e-12)
    assert 0.0 < nu < 0.5


def test_inversion_error_names_point_and_step():
    mat = NeoHookean(mu=1.0, lam=1.0, rho=1.0)
    bad = np.array([[1.0, 0.0, 0.0, 1.0], [-0.5, 0.0, 0.0, 1.0]])
    with pytest.raises(ElementInversionError, match="point 1 at step 7"):
        mat.stress_energy(bad, step=7)


def _first_piola_from_cauchy(f, sig):
    fxx, fxy, fyx, fyy = f
    j = fxx * fyy - fxy * fyx
    s = np.array([[sig[0], sig[2]], [sig[2], sig[1]]])
    fm = np.array([[fxx, fxy], [fyx, fyy]])
    return j * s @ np.linalg.inv(fm).T


def test_energy_stress_consistency_100_random_f():
    # dpsi/dF (finite differences) must match the first Piola stress
    rng = np.random.default_rng(42)
    mat = NeoHookean(mu=26.1e6, lam=104.4e6, rho=1.0)
    step = 1e-7
    tested = 0
    while tested < 100:
        f = np.eye(2).reshape(-1) + 0.4 * (rng.random(4) - 0.5)
        if f[0] * f[3] - f[1] * f[2] <= 0.5:
            continue
        sig, _ = mat.stress_energy(f[None, :])
        p_stress = _first_piola_from_cauchy(f, sig[0])
        for comp in range(4):
            fp = f.copy()
            fm = f.copy()
            fp[comp] += step
            fm[comp] -= step
            _, psi_p = mat.stress_energy(fp[None, :])
            _, psi_m = mat.stress_energy(fm[None, :])
            fd = (psi_p[0] - psi_m[0]) / (2 * step)
            ref = p_stress[comp // 2, comp % 2]
            assert fd == pytest.approx(ref, rel=1e-5, abs=1e-3 * abs(ref) + 1.0)
        tested += 1


def test_objectivity_under_rotation():
    rng = np.random.default_rng(9)
    mat = NeoHookean(mu=26.1e6, lam=104.4e6, rho=1.0)
    for _ in range(20):
        f = np.eye(2).reshape(-1) + 0.3 * (rng.random(4) - 0.5)
        if f[0] * f[3] - f[1] * f[2] <= 0.5:
            continue
        th = rng.random() * 2 * np.pi
        r = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
        fm = np.array([[f[0], f[1]], [f[2], f[3]]])
        rf = (r @ fm).reshape(-1)
        sig_f, _ = mat.stress_energy(f[None, :])
        sig_rf, _ = mat.stress_energy(rf[None, :])
        s = np.array([[sig_f[0, 0], sig_f[0, 2]], [sig_f[0, 2], sig_f[0, 1]]])
        expect = r @ s @ r.T
        got = np.array([[sig_rf[0, 0], sig_rf[0, 2]], [sig_rf[0, 2], sig_rf[0, 1]]])
        assert np.allclose(got, expect, atol=1e-9 * 26.1e6)


def test_energy_density_linear():
    mat = LinearElastic(e=10e9, nu=0.25, rho=1.0, mode="plane_strain")
    strain = np.array([[1e-3, -2e-4, 3e-4]])
    sig = mat.stress_from_strain(strain)
    psi = mat.energy_density(strain, sig)
    expect = 0.5 * (sig[0, 0] * strain[0, 0] + sig[0, 1] * strain[0, 1]
                    + 2 * sig[0, 2] * strain[0, 2])
    assert psi[0] == pytest.approx(expect)
    assert psi[0] > 0
