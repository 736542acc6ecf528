"""Cell and basis classification for the extended basis construction."""

import numpy as np
import pytest

from ebsmpm.errors import ConfigurationError
from ebsmpm.grid import (BASIS_DEGENERATED, BASIS_EXTERIOR, BASIS_STABLE,
                         CELL_BOUNDARY, CELL_EXTERIOR, CELL_INTERIOR,
                         EulerianGrid, classify_bases, classify_cells)


def grid_1d(n_cells=12, dh=1.0):
    return EulerianGrid([0.0], [n_cells * dh], dh)


def test_empty_grid_all_exterior():
    g = grid_1d()
    cc = classify_cells(g, np.zeros(0, dtype=int), np.zeros(0), 0.75)
    assert np.all(cc.label == CELL_EXTERIOR)
    assert np.all(cc.phi == 0.0)


def test_full_2d_cell_is_interior():
    g = EulerianGrid([0.0, 0.0], [4.0, 4.0], 1.0)
    cell = g.cell_id(np.array([[2, 1]]))[0]
    cells = np.full(16, cell)
    vols = np.full(16, 1.0 / 16.0)
    cc = classify_cells(g, cells, vols, 0.75)
    assert cc.phi[cell] == pytest.approx(1.0)
    assert cc.label[cell] == CELL_INTERIOR


def test_sparse_1d_cell_is_boundary():
    # one point of volume 0.005 in a 0.1 m cell: phi = 0.05
    g = grid_1d(10, 0.1)
    cc = classify_cells(g, np.array([4]), np.array([0.005]), 0.75)
    assert cc.phi[4] == pytest.approx(0.05)
    assert cc.label[4] == CELL_BOUNDARY


def test_occupation_parameter_bounds():
    g = grid_1d()
    with pytest.raises(ConfigurationError):
        classify_cells(g, np.array([0]), np.array([1.0]), 0.0)


def paper_1d_configuration():
    """Cells (0-based) 3 and 7 boundary, 4..6 interior.

    This mirrors the quadratic extended-spline construction figure, whose
    1-based labels are cells {4, 8} boundary, {5, 6, 7} interior, with
    degenerated bases at nodes {4, 10}."""
    g = grid_1d(12, 1.0)
    cells = np.array([3, 4, 5, 6, 7])
    vols = np.array([0.3, 1.0, 1.0, 1.0, 0.3])
    cc = classify_cells(g, cells, vols, 0.75)
    return g, cc


def test_paper_1d_cell_labels():
    g, cc = paper_1d_configuration()
    assert cc.label[3] == CELL_BOUNDARY
    assert cc.label[7] == CELL_BOUNDARY
    assert list(cc.label[4:7]) == [CELL_INTERIOR] * 3


def test_paper_1d_degenerated_nodes():
    g, cc = paper_1d_configuration()
    bc = classify_bases(g, cc)
    assert set(bc.deg_nodes.tolist()) == {3, 9}
    stable = np.nonzero(bc.label == BASIS_STABLE)[0]
    assert set(stable.tolist()) == {4, 5, 6, 7, 8}
    # everything else exterior
    ext = np.nonzero(bc.label == BASIS_EXTERIOR)[0]
    assert set(ext.tolist()) == set(range(14)) - {3, 4, 5, 6, 7, 8, 9}


def test_paper_1d_blocks_and_weights():
    g, cc = paper_1d_configuration()
    bc = classify_bases(g, cc)
    row3 = bc.node_to_deg[3]
    assert bc.deg_block_start[row3][0] == 4
    assert np.allclose(bc.deg_weights[row3], [3.0, -3.0, 1.0])
    row9 = bc.node_to_deg[9]
    assert bc.deg_block_start[row9][0] == 6
    assert np.allclose(bc.deg_weights[row9], [1.0, -3.0, 3.0])
    # constant reproduction: weights sum to one
    assert bc.deg_weights.sum(axis=1) == pytest.approx([1.0, 1.0])


def test_all_interior_means_no_degenerated():
    g = grid_1d(10, 1.0)
    cells = np.array([4, 5, 6])
    vols = np.ones(3)
    bc = classify_bases(g, classify_cells(g, cells, vols, 0.75))
    assert bc.deg_nodes.size == 0
    assert set(np.nonzero(bc.label == BASIS_STABLE)[0].tolist()) == {4, 5, 6, 7, 8}


def test_isolated_boundary_cell_raises():
    g = grid_1d(10, 1.0)
    cc = classify_cells(g, np.array([5]), np.array([0.2]), 0.75)
    with pytest.raises(ConfigurationError, match="too thin"):
        classify_bases(g, cc)


def test_classification_is_deterministic():
    g = EulerianGrid([0.0, 0.0], [8.0, 8.0], 1.0)
    rng = np.random.default_rng(5)
    cells = rng.integers(0, 64, size=300)
    vols = rng.random(300) * 1.5
    cc1 = classify_cells(g, cells, vols, 0.6)
    cc2 = classify_cells(g, cells, vols, 0.6)
    assert np.array_equal(cc1.phi, cc2.phi)
    assert np.array_equal(cc1.label, cc2.label)
    b1 = classify_bases(g, cc1)
    b2 = classify_bases(g, cc2)
    assert np.array_equal(b1.label, b2.label)
    assert np.array_equal(b1.deg_block_start, b2.deg_block_start)
    assert np.array_equal(b1.deg_weights, b2.deg_weights)


def test_2d_block_is_tensor_product():
    g = EulerianGrid([0.0, 0.0], [9.0, 9.0], 1.0)
    # interior patch of cells [3..5]^2, boundary ring around it
    cells = []
    vols = []
    for cx in range(2, 7):
        for cy in range(2, 7):
            cells.append(g.cell_id(np.array([[cx, cy]]))[0])
            full = 3 <= cx <= 5 and 3 <= cy <= 5
            vols.append(1.0 if full else 0.2)
    bc = classify_bases(g, classify_cells(g, np.array(cells), np.array(vols), 0.75))
    assert bc.deg_nodes.size > 0
    for r in range(bc.deg_nodes.size):
        w = bc.deg_weights[r].reshape(3, 3)
        j = g.node_multi(bc.deg_nodes[r:r + 1])[0]
        start = bc.deg_block_start[r]
        wx = np.array([1.0 if j[0] - start[0] == i else 0.0 for i in range(3)]) \
            if 0 <= j[0] - start[0] <= 2 else None
        # outer-product structure: rank one
        u, s, vt = np.linalg.svd(w)
        assert s[1] == pytest.approx(0.0, abs=1e-12)
        assert w.sum() == pytest.approx(1.0, abs=1e-12)
