"""Extended B-spline evaluation and extrapolation weights."""

import numpy as np
import pytest

from ebsmpm.grid import (EulerianGrid, classify_bases, classify_cells,
                         evaluate_ebs, evaluate_obs, extrapolation_weights)

from test_classification import paper_1d_configuration


def test_kronecker_property_inside_block():
    for j in range(3):
        w = extrapolation_weights([5 + j], [5])
        expect = np.zeros(3)
        expect[j] = 1.0
        assert np.allclose(w, expect)


def test_one_left_of_block():
    # evaluate the three Lagrange polynomials on nodes {0,1,2} at xi = -1
    assert np.allclose(extrapolation_weights([4], [5]), [3.0, -3.0, 1.0])


def test_2d_weights_are_outer_product():
    w2 = extrapolation_weights([4, 8], [5, 6])
    wx = extrapolation_weights([4], [5])
    wy = extrapolation_weights([8], [6])
    assert np.allclose(w2, np.outer(wx, wy).reshape(-1))
    assert w2.sum() == pytest.approx(1.0)


def test_ebs_equals_obs_away_from_degenerated_support():
    g, cc = paper_1d_configuration()
    bc = classify_bases(g, cc)
    # cell 5 is interior and none of its support bases is degenerated
    x = [5.41]
    obs = {n: (w, gr[0]) for n, w, gr in evaluate_obs(g, x)}
    ebs = {n: (w, gr[0]) for n, w, gr in evaluate_ebs(g, bc, x)}
    assert set(ebs) == set(obs)
    for n in obs:
        assert ebs[n][0] == pytest.approx(obs[n][0], abs=1e-15)
        assert ebs[n][1] == pytest.approx(obs[n][1], abs=1e-15)


def test_ebs_partition_of_unity_over_stable_nodes():
    g, cc = paper_1d_configuration()
    bc = classify_bases(g, cc)
    rng = np.random.default_rng(2)
    for _ in range(200):
        x = [3.0 + 5.0 * rng.random()]   # anywhere in the occupied region
        entries = evaluate_ebs(g, bc, x)
        assert all(bc.label[n] == 2 for n, _, _ in entries)
        assert abs(sum(w for _, w, _ in entries) - 1.0) < 1e-12
        assert abs(sum(gr[0] for _, _, gr in entries)) < 1e-12


def test_ebs_linear_reproduction_in_boundary_cell():
    # nodal coefficients sampling a linear function are reproduced exactly,
    # including inside the boundary cell where the extension is active
    g, cc = paper_1d_configuration()
    bc = classify_bases(g, cc)
    a, b = 0.35, -1.7
    for x in (3.1, 3.45, 3.9, 7.05, 7.8):
        val = 0.0
        dval = 0.0
        for node, w, gr in evaluate_ebs(g, bc, [x]):
            pos = g.node_positions(np.array([node]))[0][0]
            val += w * (a + b * pos)
            dval += gr[0] * (a + b * pos)
        assert abs(val - (a + b * x)) < 1e-10
        assert abs(dval - b) < 1e-9


def test_ebs_gradient_matches_finite_difference():
    g, cc = paper_1d_configuration()
    bc = classify_bases(g, cc)
    step = 1e-6
    for x in (3.3, 3.7, 7.4):
        plus = {n: w for n, w, _ in evaluate_ebs(g, bc, [x + step])}
        minus = {n: w for n, w, _ in evaluate_ebs(g, bc, [x - step])}
        for node, w, gr in evaluate_ebs(g, bc, [x]):
            fd = (plus.get(node, 0.0) - minus.get(node, 0.0)) / (2 * step)
            if abs(gr[0]) > 1e-6:
                assert abs(fd - gr[0]) / abs(gr[0]) < 1e-6


def test_ebs_2d_partition_of_unity():
    g = EulerianGrid([0.0, 0.0], [9.0, 9.0], 1.0)
    cells = []
    vols = []
    for cx in range(2, 7):
        for cy in range(2, 7):
            cells.append(g.cell_id(np.array([[cx, cy]]))[0])
            full = 3 <= cx <= 5 and 3 <= cy <= 5
            vols.append(1.0 if full else 0.2)
    bc = classify_bases(g, classify_cells(g, np.array(cells), np.array(vols), 0.75))
    rng = np.random.default_rng(4)
    for _ in range(200):
        x = 2.0 + 5.0 * rng.random(2)
        entries = evaluate_ebs(g, bc, x)
        assert abs(sum(w for _, w, _ in entries) - 1.0) < 1e-12
