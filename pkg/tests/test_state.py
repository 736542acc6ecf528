"""Seeding, boundary chains and energy bookkeeping."""

import numpy as np
import pytest

from ebsmpm.errors import ConfigurationError
from ebsmpm.state import (Annulus, DemiDisk, Disk, Rectangle, Segment1D,
                          seed_field, total_energies)
from ebsmpm.scenario import parse_scenario_dict, preset_scenario


def test_unit_square_equal_partition():
    sd = seed_field(Rectangle(0.0, 0.0, 1.0, 1.0), 16, 40, 0.25)
    assert sd.bulk_x.shape == (256, 2)
    assert np.allclose(sd.bulk_volume, 1.0 / 256.0)
    assert sd.bulk_volume.sum() == pytest.approx(1.0)


def test_unit_square_gauss_volumes_sum_exactly():
    sd = seed_field(Rectangle(0.0, 0.0, 1.0, 1.0), 16, 40, 0.25,
                    volume_mode="gauss")
    assert sd.bulk_x.shape == (256, 2)
    assert sd.bulk_volume.sum() == pytest.approx(1.0, rel=1e-12)
    assert not np.allclose(sd.bulk_volume, sd.bulk_volume[0])


def test_disk_boundary_spacing():
    sd = seed_field(Disk(0.0, 0.0, 0.01), 16, 100, 0.0005)
    bx = sd.boundary_x
    assert bx.shape == (100, 2)
    ang = np.degrees(np.arctan2(bx[:, 1], bx[:, 0]))
    gaps = np.diff(np.sort(ang))
    assert np.allclose(gaps, 3.6, atol=1e-9)
    assert np.allclose(np.hypot(bx[:, 0], bx[:, 1]), 0.01)


def test_bar_boundary_points_at_ends():
    sd = seed_field(Segment1D(0.2, 0.5), 4, 2, 0.1)
    assert sd.boundary_x[:, 0].tolist() == [0.2, 0.5]
    assert sd.boundary_normals_1d.tolist() == [-1.0, 1.0]
    assert sd.bulk_x.shape[0] == 12
    assert sd.bulk_volume.sum() == pytest.approx(0.3)


def test_boundary_mass_budget():
    for geom in (Disk(0.0, 0.0, 1.0), Rectangle(0.0, 0.0, 2.0, 1.0),
                  DemiDisk(0.0, 0.0, 1.0)):
        sd = seed_field(geom, 16, 60, 0.125)
        assert sd.boundary_volume.sum() == pytest.approx(1e-3 * geom.measure())


def test_annulus_two_chains():
    sd = seed_field(Annulus(0.0, 0.0, 0.5, 1.0), 16, 120, 0.1)
    assert len(sd.chain_slices) == 2
    (a0, a1, c0), (b0, b1, c1) = sd.chain_slices
    assert c0 and c1
    outer = sd.boundary_x[a0:a1]
    inner = sd.boundary_x[b0:b1]
    assert np.allclose(np.hypot(outer[:, 0], outer[:, 1]), 1.0)
    assert np.allclose(np.hypot(inner[:, 0], inner[:, 1]), 0.5)


def test_bad_seeding_counts():
    with pytest.raises(ConfigurationError):
        seed_field(Disk(0.0, 0.0, 1.0), 0, 10, 0.1)
    with pytest.raises(ConfigurationError):
        seed_field(Rectangle(0, 0, 1, 1), 15, 10, 0.1)   # not a square count


def test_seeding_deterministic():
    a = seed_field(Disk(0.3, 0.4, 0.7), 16, 64, 0.05)
    b = seed_field(Disk(0.3, 0.4, 0.7), 16, 64, 0.05)
    assert np.array_equal(a.bulk_x, b.bulk_x)
    assert np.array_equal(a.boundary_x, b.boundary_x)


def test_energies_rest_state():
    k, w, t = total_energies(np.zeros((5, 2)), np.ones(5), np.zeros(5), np.ones(5))
    assert (k, w, t) == (0.0, 0.0, 0.0)


def test_energies_single_point():
    vel = np.array([[3.0, 0.0]])
    k, w, t = total_energies(vel, np.array([2.0]), np.array([0.0]), np.array([1.0]))
    assert k == pytest.approx(9.0)
    assert t == pytest.approx(9.0)


def test_ring_preset_initial_kinetic_energy():
    scn = preset_scenario("neo_hookean_rings", dh=2.5e-3)
    eng = scn.build()
    s = eng.state
    v0 = 30.0
    expect = 0.5 * v0 ** 2 * s.mass.sum()
    k, w, t = total_energies(s.vel, s.mass, s.psi, s.volume)
    assert w == 0.0
    assert k == pytest.approx(expect, rel=1e-12)


def test_p2g_mass_conservation():
    doc = {
        "grid": {"x_min": [0.0, 0.0], "x_max": [1.0, 1.0], "dh": 0.1},
        "basis": {"mode": "ebs", "cc": 0.5},
        "step": {"n_steps": 1},
        "fields": [
            {"name": "blob", "geometry": {"kind": "disk", "cx": 0.5, "cy": 0.5,
                                          "r": 0.23},
             "points_per_cell": 16, "boundary_segments": 48,
             "material": {"kind": "linear", "E": 1e7, "nu": 0.3, "rho": 1200.0}}],
        "output": {"timeseries_every": 1},
    }
    eng = parse_scenario_dict(doc).build()
    eng.step()
    s = eng.state
    nodal = eng.nodal[0]
    assert nodal.mass.sum() == pytest.approx(s.mass.sum(), rel=1e-10)
    assert nodal.volume.sum() == pytest.approx(s.volume.sum(), rel=1e-10)
