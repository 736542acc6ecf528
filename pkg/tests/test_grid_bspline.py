"""Quadratic B-spline basis evaluation on the uniform grid."""

import numpy as np
import pytest

from ebsmpm.errors import ConfigurationError, OutOfDomainError
from ebsmpm.grid import EulerianGrid, evaluate_obs


def test_grid_span_must_be_multiple_of_dh():
    with pytest.raises(ConfigurationError):
        EulerianGrid([0.0], [1.05], 0.1)


def test_grid_counts():
    g = EulerianGrid([0.0, 0.0], [1.0, 0.5], 0.1)
    assert g.n_cells.tolist() == [10, 5]
    assert g.n_bases.tolist() == [12, 7]
    assert g.n_nodes_total == 84


def test_midcell_weights_1d():
    # direct evaluation of the quadratic B-spline at the parametric midpoint
    g = EulerianGrid([0.0], [10.0], 1.0)
    entries = evaluate_obs(g, [3.5])
    weights = {node: w for node, w, _ in entries}
    assert set(weights) == {3, 4, 5}
    assert weights[3] == pytest.approx(0.125, abs=1e-15)
    assert weights[4] == pytest.approx(0.75, abs=1e-15)
    assert weights[5] == pytest.approx(0.125, abs=1e-15)


def test_support_count_and_positivity():
    g1 = EulerianGrid([0.0], [1.0], 0.1)
    assert len(evaluate_obs(g1, [0.4321])) == 3
    g2 = EulerianGrid([0.0, 0.0], [1.0, 1.0], 0.1)
    entries = evaluate_obs(g2, [0.37, 0.81])
    assert len(entries) == 9
    assert all(w >= 0.0 for _, w, _ in entries)


def test_partition_of_unity_random_points():
    rng = np.random.default_rng(7)
    g = EulerianGrid([0.0, -1.0], [2.0, 1.0], 0.125)
    lo = g.x_min
    hi = g.x_max
    for _ in range(1000):
        x = lo + rng.random(2) * (hi - lo)
        entries = evaluate_obs(g, x)
        assert abs(sum(w for _, w, _ in entries) - 1.0) < 1e-12
        grad = sum(gr for _, _, gr in entries)
        assert np.all(np.abs(grad) < 1e-12 / g.dh)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(3)
    g = EulerianGrid([0.0, 0.0], [1.0, 1.0], 0.1)
    step = 1e-6 * g.dh
    checked = 0
    while checked < 200:
        x = 0.05 + rng.random(2) * 0.9
        # keep the FD stencil within one cell of the evaluation point
        xi = (x - g.x_min) / g.dh % 1.0
        if np.any(xi < 1e-3) or np.any(xi > 1.0 - 1e-3):
            continue
        entries = {n: (w, gr) for n, w, gr in evaluate_obs(g, x)}
        for axis in range(2):
            e = np.zeros(2)
            e[axis] = step
            plus = {n: w for n, w, _ in evaluate_obs(g, x + e)}
            minus = {n: w for n, w, _ in evaluate_obs(g, x - e)}
            for node, (w, gr) in entries.items():
                fd = (plus.get(node, 0.0) - minus.get(node, 0.0)) / (2 * step)
                if abs(gr[axis]) > 1e-8:
                    assert abs(fd - gr[axis]) / abs(gr[axis]) < 1e-6
        checked += 1


def test_c1_continuity_across_cell_interface():
    g = EulerianGrid([0.0], [1.0], 0.1)
    eps = 1e-12
    left = {n: (w, gr[0]) for n, w, gr in evaluate_obs(g, [0.3 - eps])}
    right = {n: (w, gr[0]) for n, w, gr in evaluate_obs(g, [0.3 + eps])}
    for node in set(left) & set(right):
        assert left[node][0] == pytest.approx(right[node][0], abs=1e-9)
        assert left[node][1] == pytest.approx(right[node][1], abs=1e-6)


def test_out_of_domain_raises_with_point():
    g = EulerianGrid([0.0], [1.0], 0.1)
    with pytest.raises(OutOfDomainError, match="1.5"):
        evaluate_obs(g, [1.5])


def test_linear_field_reproduction():
    # interpolating a + b*x through nodal (Greville) coefficients
    rng = np.random.default_rng(11)
    g = EulerianGrid([0.0, 0.0], [1.0, 1.0], 0.1)
    a, bx, by = 0.7, -1.3, 2.1
    for _ in range(50):
        x = rng.random(2) * 0.98 + 0.01
        val = 0.0
        for node, w, _ in evaluate_obs(g, x):
            pos = g.node_positions(np.array([node]))[0]
            val += w * (a + bx * pos[0] + by * pos[1])
        assert abs(val - (a + bx * x[0] + by * x[1])) < 1e-10
