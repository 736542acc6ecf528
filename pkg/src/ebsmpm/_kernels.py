"""Numba kernels for the per-step hot loops.

The basis table is a CSR structure over material points: row ``p`` holds
``(node id, N, gradN)`` entries.  With the extended basis active a
degenerated support node contributes ``3**d`` entries redirected onto its
stable block; duplicate node ids within a row are allowed (transfers are
linear, so scatter/gather handles them correctly).

Extended rows whose absolute weight sum exceeds ``EBS_ROW_CAP`` fall back
to the original basis for that point: Lagrange extrapolation far from the
stable region otherwise amplifies grid noise without bound.

All kernels are serial and allocation-free in their inner loops, which
keeps every run bitwise reproducible.
"""

import numpy as np
from numba import njit

EBS_ROW_CAP = 6.0

# ---------------------------------------------------------------------
# basis table construction
# ---------------------------------------------------------------------


@njit(cache=True)
def _cell_and_xi(x, x_min, inv_h, n_cells):
    rel = (x - x_min) * inv_h
    c = int(rel)
    if c > n_cells - 1:
        c = n_cells - 1
    xi = rel - c
    return c, xi


@njit(cache=True)
def _weights_1d(xi, w, dw):
    w[0] = 0.5 * (1.0 - xi) ** 2
    w[1] = 0.5 + xi * (1.0 - xi)
    w[2] = 0.5 * xi * xi
    dw[0] = xi - 1.0
    dw[1] = 1.0 - 2.0 * xi
    dw[2] = xi


@njit(cache=True)
def check_in_domain(xp, x_min, x_max, dh):
    """Index of the first out-of-domain point, or -1."""
    tol = 1e-12 * dh
    for p in range(xp.shape[0]):
        for a in range(xp.shape[1]):
            if xp[p, a] < x_min[a] - tol or xp[p, a] > x_max[a] + tol:
                return p
    return -1


@njit(cache=True)
def build_table_1d(xp, x_min, dh, n_cells, use_ebs, label, node_to_deg,
                   deg_start, deg_w):
    """CSR basis table in 1D.  ``xp`` is (n, 1)."""
    n = xp.shape[0]
    inv_h = 1.0 / dh
    counts = np.zeros(n + 1, dtype=np.int64)
    extended = np.zeros(n, dtype=np.uint8)
    w3 = np.empty(3)
    d3 = np.empty(3)
    for p in range(n):
        c, xi = _cell_and_xi(xp[p, 0], x_min[0], inv_h, n_cells[0])
        m = 3
        if use_ebs:
            _weights_1d(xi, w3, d3)
            m = 0
            abs_sum = 0.0
            for k in range(3):
                lab = label[c + k]
                if lab == 1:
                    m += 3
                    row = node_to_deg[c + k]
                    for o in range(3):
                        abs_sum += abs(w3[k] * deg_w[row, o])
                else:
                    m += 1
                    abs_sum += w3[k]
            if abs_sum > EBS_ROW_CAP:
                m = 3
            else:
                extended[p] = 1
        counts[p + 1] = m
    indptr = np.cumsum(counts)
    nnz = indptr[n]
    nodes = np.empty(nnz, dtype=np.int64)
    wv = np.empty(nnz, dtype=np.float64)
    gw = np.empty((nnz, 1), dtype=np.float64)
    for p in range(n):
        c, xi = _cell_and_xi(xp[p, 0], x_min[0], inv_h, n_cells[0])
        _weights_1d(xi, w3, d3)
        j = indptr[p]
        for k in range(3):
            node = c + k
            wk = w3[k]
            gk = d3[k] * inv_h
            if extended[p] == 1 and label[node] == 1:
                row = node_to_deg[node]
                s = deg_start[row, 0]
                for o in range(3):
                    e = deg_w[row, o]
                    nodes[j] = s + o
                    wv[j] = wk * e
                    gw[j, 0] = gk * e
                    j += 1
            else:
                nodes[j] = node
                wv[j] = wk
                gw[j, 0] = gk
                j += 1
    return indptr, nodes, wv, gw


@njit(cache=True)
def build_table_2d(xp, x_min, dh, n_cells, n_bases_y, use_ebs, label,
                   node_to_deg, deg_start, deg_w):
    """CSR basis table in 2D.  ``xp`` is (n, 2)."""
    n = xp.shape[0]
    inv_h = 1.0 / dh
    counts = np.zeros(n + 1, dtype=np.int64)
    extended = np.zeros(n, dtype=np.uint8)
    wx = np.empty(3)
    dx = np.empty(3)
    wy = np.empty(3)
    dy = np.empty(3)
    for p in range(n):
        cx, xix = _cell_and_xi(xp[p, 0], x_min[0], inv_h, n_cells[0])
        cy, xiy = _cell_and_xi(xp[p, 1], x_min[1], inv_h, n_cells[1])
        m = 9
        if use_ebs:
            _weights_1d(xix, wx, dx)
            _weights_1d(xiy, wy, dy)
            m = 0
            abs_sum = 0.0
            for kx in range(3):
                for ky in range(3):
                    node = (cx + kx) * n_bases_y + (cy + ky)
                    wk = wx[kx] * wy[ky]
                    lab = label[node]
                    if lab == 1:
                        m += 9
                        row = node_to_deg[node]
                        for o in range(9):
                            abs_sum += abs(wk * deg_w[row, o])
                    else:
                        m += 1
                        abs_sum += wk
            if abs_sum > EBS_ROW_CAP:
                m = 9
            else:
                extended[p] = 1
        counts[p + 1] = m
    indptr = np.cumsum(counts)
    nnz = indptr[n]
    nodes = np.empty(nnz, dtype=np.int64)
    wv = np.empty(nnz, dtype=np.float64)
    gw = np.empty((nnz, 2), dtype=np.float64)
    for p in range(n):
        cx, xix = _cell_and_xi(xp[p, 0], x_min[0], inv_h, n_cells[0])
        cy, xiy = _cell_and_xi(xp[p, 1], x_min[1], inv_h, n_cells[1])
        _weights_1d(xix, wx, dx)
        _weights_1d(xiy, wy, dy)
        j = indptr[p]
        for kx in range(3):
            for ky in range(3):
                node = (cx + kx) * n_bases_y + (cy + ky)
                wk = wx[kx] * wy[ky]
                gkx = dx[kx] * wy[ky] * inv_h
                gky = wx[kx] * dy[ky] * inv_h
                if extended[p] == 1 and label[node] == 1:
                    row = node_to_deg[node]
                    sx = deg_start[row, 0]
                    sy = deg_start[row, 1]
                    o = 0
                    for ox in range(3):
                        for oy in range(3):
                            e = deg_w[row, o]
                            o += 1
                            nodes[j] = (sx + ox) * n_bases_y + (sy + oy)
                            wv[j] = wk * e
                            gw[j, 0] = gkx * e
                            gw[j, 1] = gky * e
                            j += 1
                else:
                    nodes[j] = node
                    wv[j] = wk
                    gw[j, 0] = gkx
                    gw[j, 1] = gky
                    j += 1
    return indptr, nodes, wv, gw


# ---------------------------------------------------------------------
# particle -> grid
# ---------------------------------------------------------------------


@njit(cache=True)
def p2g_1d(indptr, nodes, wv, gw, mass_p, vol_p, vel_p, stress_p, fext_p,
           m_i, m_abs_i, mom_i, vol_i, fint_i, fext_i):
    for p in range(indptr.shape[0] - 1):
        mp = mass_p[p]
        op = vol_p[p]
        vpx = vel_p[p, 0]
        s = stress_p[p, 0]
        fx = fext_p[p, 0]
        for j in range(indptr[p], indptr[p + 1]):
            node = nodes[j]
            w = wv[j]
            m_i[node] += w * mp
            m_abs_i[node] += abs(w) * mp
            vol_i[node] += w * op
            mom_i[node, 0] += w * mp * vpx
            fint_i[node, 0] += op * s * gw[j, 0]
            fext_i[node, 0] += w * fx


@njit(cache=True)
def p2g_2d(indptr, nodes, wv, gw, mass_p, vol_p, vel_p, stress_p, fext_p,
           m_i, m_abs_i, mom_i, vol_i, fint_i, fext_i):
    for p in range(indptr.shape[0] - 1):
        mp = mass_p[p]
        op = vol_p[p]
        vpx = vel_p[p, 0]
        vpy = vel_p[p, 1]
        sxx = stress_p[p, 0]
        syy = stress_p[p, 1]
        sxy = stress_p[p, 2]
        fx = fext_p[p, 0]
        fy = fext_p[p, 1]
        for j in range(indptr[p], indptr[p + 1]):
            node = nodes[j]
            w = wv[j]
            gx = gw[j, 0]
            gy = gw[j, 1]
            m_i[node] += w * mp
            m_abs_i[node] += abs(w) * mp
            vol_i[node] += w * op
            mom_i[node, 0] += w * mp * vpx
            mom_i[node, 1] += w * mp * vpy
            fint_i[node, 0] += op * (sxx * gx + sxy * gy)
            fint_i[node, 1] += op * (sxy * gx + syy * gy)
            fext_i[node, 0] += w * fx
            fext_i[node, 1] += w * fy


@njit(cache=True)
def scatter_mass_signed_abs(indptr, nodes, wv, mass_p, m_i, m_abs_i):
    """Signed and absolute-weight lumped nodal mass (health pre-pass)."""
    for p in range(indptr.shape[0] - 1):
        mp = mass_p[p]
        for j in range(indptr[p], indptr[p + 1]):
            w = wv[j]
            m_i[nodes[j]] += w * mp
            m_abs_i[nodes[j]] += abs(w) * mp


@njit(cache=True)
def scatter_momentum(indptr, nodes, wv, mass_p, vel_p, mom_i):
    """Momentum remap used by the MUSL double mapping (any dimension)."""
    d = vel_p.shape[1]
    for p in range(indptr.shape[0] - 1):
        mp = mass_p[p]
        for j in range(indptr[p], indptr[p + 1]):
            w = wv[j] * mp
            for a in range(d):
                mom_i[nodes[j], a] += w * vel_p[p, a]


@njit(cache=True)
def scatter_volume(indptr, nodes, wv, vol_p, vol_i):
    for p in range(indptr.shape[0] - 1):
        op = vol_p[p]
        for j in range(indptr[p], indptr[p + 1]):
            vol_i[nodes[j]] += wv[j] * op


# ---------------------------------------------------------------------
# grid -> particle
# ---------------------------------------------------------------------


@njit(cache=True)
def gather_velocity(indptr, nodes, wv, vel_i, out):
    d = vel_i.shape[1]
    for p in range(indptr.shape[0] - 1):
        for a in range(d):
            out[p, a] = 0.0
        for j in range(indptr[p], indptr[p + 1]):
            w = wv[j]
            for a in range(d):
                out[p, a] += w * vel_i[nodes[j], a]


@njit(cache=True)
def gather_velocity_gradient(indptr, nodes, gw, vel_i, out):
    """Velocity gradient L[p, i*d + j] = sum_I v_I[i] * dN_I/dx_j."""
    d = vel_i.shape[1]
    for p in range(indptr.shape[0] - 1):
        for a in range(d * d):
            out[p, a] = 0.0
        for j in range(indptr[p], indptr[p + 1]):
            node = nodes[j]
            for i in range(d):
                vi = vel_i[node, i]
                for k in range(d):
                    out[p, i * d + k] += vi * gw[j, k]
