"""Uniform background grid and quadratic B-spline bases.

The grid covers ``[x_min, x_max]`` with spacing ``dh`` shared by all axes.
Knots sit on the cell boundaries, so each quadratic basis spans exactly
three cells and peaks at a cell centre.  Basis ``b`` (per axis) supports
cells ``{b-2, b-1, b}``; with ``nc`` cells per axis there are ``nc + 2``
bases per axis.  A basis is anchored, for reporting and node selection, at
its Greville abscissa ``x_min + (b - 0.5) * dh``.

Near-boundary bases can be replaced by extended B-splines: a degenerated
basis (one whose support holds no interior cell but at least one boundary
cell) is redistributed onto the nearest block of 3^d stable bases using
Lagrange extrapolation weights, which preserves partition of unity and
polynomial reproduction over the occupied region.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, OutOfDomainError

# cell labels
CELL_EXTERIOR = 0
CELL_BOUNDARY = 1
CELL_INTERIOR = 2

# basis labels
BASIS_EXTERIOR = 0
BASIS_DEGENERATED = 1
BASIS_STABLE = 2

CELL_LABEL_NAMES = {CELL_EXTERIOR: "exterior", CELL_BOUNDARY: "boundary", CELL_INTERIOR: "interior"}
BASIS_LABEL_NAMES = {BASIS_EXTERIOR: "exterior", BASIS_DEGENERATED: "degenerated", BASIS_STABLE: "stable"}

_DEGREE = 2  # quadratic bases throughout; cubic is out of scope


class EulerianGrid:
    """Structured background grid with uniform spacing.

    Parameters
    ----------
    x_min, x_max : sequence of float
        Domain corners, length 1 or 2.
    dh : float
        Grid spacing, identical along every axis.  ``x_max - x_min`` must be
        an integer multiple of ``dh`` on each axis.
    """

    def __init__(self, x_min, x_max, dh):
        self.x_min = np.atleast_1d(np.asarray(x_min, dtype=np.float64))
        self.x_max = np.atleast_1d(np.asarray(x_max, dtype=np.float64))
        if self.x_min.shape != self.x_max.shape:
            raise ConfigurationError("x_min and x_max must have the same dimension")
        self.dim = int(self.x_min.shape[0])
        if self.dim not in (1, 2):
            raise ConfigurationError(f"grid dimension must be 1 or 2, got {self.dim}")
        if dh <= 0:
            raise ConfigurationError("grid spacing must be positive")
        self.dh = float(dh)
        span = self.x_max - self.x_min
        if np.any(span <= 0):
            raise ConfigurationError("x_max must exceed x_min on every axis")
        n_float = span / self.dh
        n_cells = np.rint(n_float).astype(np.int64)
        if np.any(np.abs(n_float - n_cells) > 1e-9 * np.maximum(n_float, 1.0)):
            raise ConfigurationError(
                f"domain span {span} is not an integer multiple of dh={dh}")
        self.n_cells = n_cells                      # cells per axis
        self.n_bases = n_cells + _DEGREE            # bases per axis
        self.n_cells_total = int(np.prod(self.n_cells))
        self.n_nodes_total = int(np.prod(self.n_bases))
        # 1D cells have unit cross-section, 2D cells unit thickness
        self.cell_volume = self.dh ** self.dim

    # --- index helpers -------------------------------------------------

    def cell_id(self, cell_multi):
        """Flatten per-axis cell indices (row-major, x outermost)."""
        c = np.asarray(cell_multi)
        if self.dim == 1:
            return c[..., 0]
        return c[..., 0] * self.n_cells[1] + c[..., 1]

    def node_id(self, node_multi):
        """Flatten per-axis basis indices."""
        b = np.asarray(node_multi)
        if self.dim == 1:
            return b[..., 0]
        return b[..., 0] * self.n_bases[1] + b[..., 1]

    def node_multi(self, node_ids):
        """Inverse of :meth:`node_id`."""
        n = np.asarray(node_ids)
        if self.dim == 1:
            return n[..., None]
        return np.stack([n // self.n_bases[1], n % self.n_bases[1]], axis=-1)

    def node_positions(self, node_ids):
        """Greville abscissae of the given bases."""
        multi = self.node_multi(node_ids).astype(np.float64)
        return self.x_min + (multi - 0.5) * self.dh

    def parent_cell(self, x):
        """Per-axis parent cell of in-domain positions ``x`` (shape (n, d))."""
        rel = (np.asarray(x, dtype=np.float64) - self.x_min) / self.dh
        c = np.floor(rel).astype(np.int64)
        # points exactly on x_max belong to the last cell
        return np.minimum(c, self.n_cells - 1)

    def contains(self, x):
        x = np.asarray(x, dtype=np.float64)
        return np.all((x >= self.x_min - 1e-12 * self.dh) & (x <= self.x_max + 1e-12 * self.dh), axis=-1)


def _bspline_1d(xi):
    """Quadratic B-spline weights over the three supporting bases.

    ``xi`` is the cell-local coordinate in [0, 1].  Returns weights and
    derivatives w.r.t. xi for bases (c, c+1, c+2) of the parent cell c.
    """
    w0 = 0.5 * (1.0 - xi) ** 2
    w1 = 0.5 + xi * (1.0 - xi)
    w2 = 0.5 * xi * xi
    d0 = -(1.0 - xi)
    d1 = 1.0 - 2.0 * xi
    d2 = xi
    return (w0, w1, w2), (d0, d1, d2)


def evaluate_obs(grid: EulerianGrid, x) -> list:
    """Evaluate the standard quadratic B-spline basis at position ``x``.

    Returns a list of ``(node_id, N, gradN)`` for the 3**d supporting
    bases; ``gradN`` is an array of length ``d``.

    Raises
    ------
    OutOfDomainError
        If ``x`` lies outside the grid bounds.
    """
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if x.shape != (grid.dim,):
        raise ValueError(f"expected position of shape ({grid.dim},)")
    if not grid.contains(x):
        raise OutOfDomainError(f"position {x.tolist()} outside grid bounds "
                               f"[{grid.x_min.tolist()}, {grid.x_max.tolist()}]")
    cell = grid.parent_cell(x[None, :])[0]
    xi = (x - grid.x_min) / grid.dh - cell
    inv_h = 1.0 / grid.dh
    out = []
    if grid.dim == 1:
        (w0, w1, w2), (d0, d1, d2) = _bspline_1d(xi[0])
        for k, (w, dw) in enumerate(((w0, d0), (w1, d1), (w2, d2))):
            out.append((int(cell[0]) + k, w, np.array([dw * inv_h])))
        return out
    (wx, dwx) = _bspline_1d(xi[0])
    (wy, dwy) = _bspline_1d(xi[1])
    for kx in range(3):
        for ky in range(3):
            node = (int(cell[0]) + kx) * int(grid.n_bases[1]) + (int(cell[1]) + ky)
            n = wx[kx] * wy[ky]
            g = np.array([dwx[kx] * wy[ky] * inv_h, wx[kx] * dwy[ky] * inv_h])
            out.append((node, n, g))
    return out


@dataclass
class CellClass:
    """Per-cell volume fractions and interior/boundary/exterior labels."""

    phi: np.ndarray     # (n_cells_total,) volume fraction
    label: np.ndarray   # (n_cells_total,) int8, CELL_* constants
    c_c: float


@dataclass
class BasisClass:
    """Per-basis stability labels plus extension data for degenerated bases.

    ``node_to_deg`` maps a node id to a row of ``deg_*`` arrays (or -1).
    For degenerated basis ``J``, ``deg_block_start`` holds the per-axis
    start of its stable block and ``deg_weights`` the 3**d Lagrange
    extrapolation weights over that block (row-major over the block).
    """

    label: np.ndarray             # (n_nodes_total,) int8, BASIS_* constants
    node_to_deg: np.ndarray       # (n_nodes_total,) int32 index into deg arrays, -1 if not degenerated
    deg_nodes: np.ndarray         # (m,) node ids of degenerated bases
    deg_block_start: np.ndarray   # (m, d) int32
    deg_weights: np.ndarray       # (m, 3**d) float64


def classify_cells(grid: EulerianGrid, cells: np.ndarray, volumes: np.ndarray, c_c: float) -> CellClass:
    """Classify grid cells from the volume fraction of the points they hold.

    Parameters
    ----------
    cells : (n,) int
        Flattened parent-cell index of every material point.
    volumes : (n,) float
        Current point volumes.
    c_c : float
        Occupation parameter in (0, 1]: cells with fraction above it are
        interior, occupied cells at or below it are boundary.
    """
    if not (0.0 < c_c <= 1.0):
        raise ConfigurationError(f"occupation parameter must lie in (0, 1], got {c_c}")
    occ = np.bincount(np.asarray(cells, dtype=np.int64), weights=volumes,
                      minlength=grid.n_cells_total)
    phi = occ / grid.cell_volume
    label = np.zeros(grid.n_cells_total, dtype=np.int8)
    label[phi > 0.0] = CELL_BOUNDARY
    label[phi > c_c] = CELL_INTERIOR
    return CellClass(phi=phi, label=label, c_c=c_c)


def _support_window_any(mask_cells: np.ndarray, grid: EulerianGrid) -> np.ndarray:
    """For every basis, whether any cell in its support satisfies ``mask``.

    Basis b supports cells {b-2, b-1, b}; cells outside the grid count as
    False.  Works on the flattened cell mask, returns a flattened basis mask.
    """
    if grid.dim == 1:
        nc = int(grid.n_cells[0])
        padded = np.zeros(nc + 4, dtype=bool)
        padded[2:2 + nc] = mask_cells
        return padded[0:nc + 2] | padded[1:nc + 3] | padded[2:nc + 4]
    ncx, ncy = map(int, grid.n_cells)
    m = mask_cells.reshape(ncx, ncy)
    padded = np.zeros((ncx + 4, ncy + 4), dtype=bool)
    padded[2:2 + ncx, 2:2 + ncy] = m
    out = np.zeros((ncx + 2, ncy + 2), dtype=bool)
    for ox in range(3):
        for oy in range(3):
            out |= padded[ox:ox + ncx + 2, oy:oy + ncy + 2]
    return out.reshape(-1)


def _lagrange_weights_1d(t: int) -> np.ndarray:
    """Quadratic Lagrange polynomial values on nodes {0, 1, 2} at integer t."""
    t = float(t)
    return np.array([
        0.5 * (t - 1.0) * (t - 2.0),
        -t * (t - 2.0),
        0.5 * t * (t - 1.0),
    ])


def extrapolation_weights(j_multi, block_start) -> np.ndarray:
    """Lagrange extrapolation weights of degenerated basis J over its block.

    ``j_multi`` and ``block_start`` are per-axis integer indices; the block
    is the tensor product ``block_start + {0, 1, 2}`` per axis.  Returns the
    3**d weights, row-major over the block; they sum to 1 and reduce to a
    Kronecker delta when J lies inside the block.
    """
    j = np.atleast_1d(np.asarray(j_multi, dtype=np.int64))
    k = np.atleast_1d(np.asarray(block_start, dtype=np.int64))
    w = _lagrange_weights_1d(int(j[0] - k[0]))
    for a in range(1, j.shape[0]):
        w = np.outer(w, _lagrange_weights_1d(int(j[a] - k[a]))).reshape(-1)
    return w


# Candidate block-start offsets around the centred start J-1, ordered by the
# outside-distance metric sum_a max(|delta_a|-1, 0) with lexicographic
# tie-breaking toward lower indices.
def _sorted_offsets(dim: int, radius: int) -> np.ndarray:
    rng = np.arange(-radius, radius + 1)
    if dim == 1:
        deltas = rng[:, None]
    else:
        gx, gy = np.meshgrid(rng, rng, indexing="ij")
        deltas = np.stack([gx.reshape(-1), gy.reshape(-1)], axis=1)
    dist = np.maximum(np.abs(deltas) - 1, 0).sum(axis=1)
    order = np.lexsort(tuple(deltas[:, a] for a in reversed(range(dim))) + (dist,))
    return deltas[order]


_OFFSETS_CACHE: dict = {}


def _block_ok_mask(stable_mask: np.ndarray, grid: EulerianGrid) -> np.ndarray:
    """Valid block starts: positions where a full 3^d stable block fits."""
    if grid.dim == 1:
        nb = int(grid.n_bases[0])
        s = stable_mask
        if nb < 3:
            return np.zeros(0, dtype=bool)
        return s[0:nb - 2] & s[1:nb - 1] & s[2:nb]
    nbx, nby = map(int, grid.n_bases)
    s = stable_mask.reshape(nbx, nby)
    if nbx < 3 or nby < 3:
        return np.zeros((0, 0), dtype=bool)
    ok = np.ones((nbx - 2, nby - 2), dtype=bool)
    for ox in range(3):
        for oy in range(3):
            ok &= s[ox:ox + nbx - 2, oy:oy + nby - 2]
    return ok


def classify_bases(grid: EulerianGrid, cells: CellClass) -> BasisClass:
    """Label bases and build extension data for the degenerated ones.

    A basis is stable when its support holds at least one interior cell,
    degenerated when it holds no interior but at least one boundary cell,
    exterior otherwise.  Each degenerated basis J gets the nearest
    contiguous block of 3^d stable bases adjacent to it (per-axis tensor
    block within one node of J, ties toward lower indices) and the Lagrange
    weights that extrapolate its coefficient from that block.

    A degenerated basis with no adjacent all-stable block keeps its own
    coefficient (it is demoted to stable): distant blocks would carry
    Lagrange weights far above one and feed energy into the transfer loop.

    Raises
    ------
    ConfigurationError
        If the field has no all-stable block anywhere on the grid
        ("domain too thin for EBS").
    """
    has_interior = _support_window_any(cells.label == CELL_INTERIOR, grid)
    has_boundary = _support_window_any(cells.label == CELL_BOUNDARY, grid)
    label = np.zeros(grid.n_nodes_total, dtype=np.int8)
    label[has_boundary] = BASIS_DEGENERATED
    label[has_interior] = BASIS_STABLE

    deg_ids = np.nonzero(label == BASIS_DEGENERATED)[0]
    node_to_deg = np.full(grid.n_nodes_total, -1, dtype=np.int32)
    dim = grid.dim
    m = deg_ids.shape[0]
    block_start = np.zeros((m, dim), dtype=np.int32)
    weights = np.zeros((m, 3 ** dim), dtype=np.float64)
    if m:
        stable = label == BASIS_STABLE
        ok = _block_ok_mask(stable, grid)
        if ok.size == 0 or not ok.any():
            raise ConfigurationError(
                "domain too thin for EBS: no stable 3^d basis block exists")
        key = (dim, 2)
        if key not in _OFFSETS_CACHE:
            _OFFSETS_CACHE[key] = _sorted_offsets(dim, 2)
        offsets = _OFFSETS_CACHE[key]
        deg_multi = grid.node_multi(deg_ids)
        centred = deg_multi - 1  # block centred on J
        max_start = grid.n_bases - 3
        # vectorised search over adjacent candidates in preference order
        cand = centred[:, None, :] + offsets[None, :, :]       # (m, k, d)
        valid = np.all((cand >= 0) & (cand <= max_start), axis=2)
        if dim == 1:
            flat = cand[..., 0]
        else:
            flat = cand[..., 0] * (int(grid.n_bases[1]) - 2) + cand[..., 1]
        ok_flat = ok.reshape(-1)
        hit = valid & ok_flat[np.clip(flat, 0, ok_flat.size - 1)]
        first = np.argmax(hit, axis=1)
        found = hit[np.arange(m), first]
        block_start[found] = cand[np.arange(m), first][found].astype(np.int32)
        # no adjacent stable block: the basis keeps its own coefficient
        demoted = deg_ids[~found]
        label[demoted] = BASIS_STABLE
        keep = np.nonzero(found)[0]
        deg_ids = deg_ids[keep]
        deg_multi = deg_multi[keep]
        block_start = block_start[keep]
        m = deg_ids.shape[0]
        t = (deg_multi - block_start).astype(np.float64)
        wx = np.stack([0.5 * (t[:, 0] - 1.0) * (t[:, 0] - 2.0),
                       -t[:, 0] * (t[:, 0] - 2.0),
                       0.5 * t[:, 0] * (t[:, 0] - 1.0)], axis=1)
        if dim == 1:
            weights = wx
        else:
            wy = np.stack([0.5 * (t[:, 1] - 1.0) * (t[:, 1] - 2.0),
                           -t[:, 1] * (t[:, 1] - 2.0),
                           0.5 * t[:, 1] * (t[:, 1] - 1.0)], axis=1)
            weights = (wx[:, :, None] * wy[:, None, :]).reshape(m, 9)
        node_to_deg[deg_ids] = np.arange(m, dtype=np.int32)
    return BasisClass(label=label, node_to_deg=node_to_deg, deg_nodes=deg_ids.astype(np.int64),
                      deg_block_start=block_start, deg_weights=weights)


def evaluate_ebs(grid: EulerianGrid, basis_class: BasisClass, x) -> list:
    """Evaluate the extended basis at ``x``: entries over stable bases only.

    Degenerated contributions are folded onto their stable blocks via the
    extrapolation weights; exterior bases are dropped.  Entries with the
    same node id are merged.
    """
    entries = {}
    nby = int(grid.n_bases[1]) if grid.dim == 2 else 0
    for node, w, g in evaluate_obs(grid, x):
        lab = basis_class.label[node]
        if lab == BASIS_STABLE:
            if node in entries:
                entries[node][0] += w
                entries[node][1] += g
            else:
                entries[node] = [w, g.copy()]
        elif lab == BASIS_DEGENERATED:
            row = basis_class.node_to_deg[node]
            start = basis_class.deg_block_start[row]
            ew = basis_class.deg_weights[row]
            k = 0
            if grid.dim == 1:
                for ox in range(3):
                    tgt = int(start[0]) + ox
                    e = ew[k]; k += 1
                    if e == 0.0:
                        continue
                    if tgt in entries:
                        entries[tgt][0] += w * e
                        entries[tgt][1] += g * e
                    else:
                        entries[tgt] = [w * e, g * e]
            else:
                for ox in range(3):
                    for oy in range(3):
                        tgt = (int(start[0]) + ox) * nby + (int(start[1]) + oy)
                        e = ew[k]; k += 1
                        if e == 0.0:
                            continue
                        if tgt in entries:
                            entries[tgt][0] += w * e
                            entries[tgt][1] += g * e
                        else:
                            entries[tgt] = [w * e, g * e]
    return [(node, v[0], v[1]) for node, v in sorted(entries.items())]
