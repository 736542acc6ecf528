"""Boundary tracking and penalty frictional contact.

Contact couples a master field (providing segments between consecutive
boundary material points) with a slave field (providing boundary points).
Detection runs in three stages each step: both fields must project volume
onto at least one common grid node, the slave point must lie within one
grid spacing of some master boundary point, and the projection onto a
candidate segment must fall strictly inside it with a negative normal gap.

Sign conventions: the segment tangent runs from endpoint 1 to endpoint 2
and the outward normal sits on the right of the tangent, so penetration of
a slave point into the master body gives a negative gap.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .errors import ContractViolationError, GeometryError

_MIN_SEGMENT_LENGTH = 1e-12


@dataclass
class ContactPairConfig:
    """Penalty parameters for one master/slave field pairing."""

    master: int
    slave: int
    omega_nor: float
    omega_tan: float
    friction: float = 0.0

    def __post_init__(self):
        if self.omega_nor <= 0 or self.omega_tan <= 0:
            raise ContractViolationError("penalty parameters must be positive")
        if self.friction < 0:
            raise ContractViolationError("friction coefficient must be non-negative")


@dataclass
class ContactPair:
    """One penetrating slave point paired with its master segment.

    In 1D the master "segment" degenerates to a single boundary point;
    ``master_2`` is then -1 and the tangential machinery is inactive.
    """

    slave: int
    master_1: int
    master_2: int
    g_nor: float
    g_tan: float
    beta: float
    beta_prev: float
    l_ms: float
    l_ms_prev: float
    e_nor: np.ndarray
    e_tan: np.ndarray
    seg_key: tuple = dataclass_field(default=())


def project_on_segment(x_s, x_1, x_2):
    """Project a point onto a segment.

    Returns ``(beta, l_ms, e_nor, e_tan, g_nor)`` with the outward normal
    on the right of the tangent ``x_2 - x_1``.
    """
    x_s = np.asarray(x_s, dtype=np.float64)
    x_1 = np.asarray(x_1, dtype=np.float64)
    x_2 = np.asarray(x_2, dtype=np.float64)
    d = x_2 - x_1
    l_ms = float(np.hypot(d[0], d[1]))
    if l_ms < _MIN_SEGMENT_LENGTH:
        raise GeometryError(f"degenerate master segment of length {l_ms}")
    e_tan = d / l_ms
    e_nor = np.array([e_tan[1], -e_tan[0]])
    rel = x_s - x_1
    beta = float(rel @ e_tan) / l_ms
    g_nor = float(rel @ e_nor)
    return beta, l_ms, e_nor, e_tan, g_nor


def gap_and_slip(x_s, x_1, x_2, beta_prev=None, l_ms_prev=None):
    """Normal gap and incremental tangential slip for one candidate pair.

    ``beta_prev`` and ``l_ms_prev`` come from the previous step for a
    persisting pair; for a fresh pair they default to the current values so
    the first-contact slip is zero.
    """
    beta, l_ms, e_nor, e_tan, g_nor = project_on_segment(x_s, x_1, x_2)
    if beta_prev is None:
        beta_prev = beta
    if l_ms_prev is None:
        l_ms_prev = l_ms
    g_tan = l_ms_prev * (beta - beta_prev)
    return g_nor, g_tan, beta, l_ms, e_nor, e_tan


def detect_pairs(master_field, slave_field, x, master_nodal_volume,
                 slave_nodal_volume, slave_table, dh, history=None):
    """Three-stage contact pair detection for a 2D field pairing.

    Parameters
    ----------
    master_field, slave_field : DiscreteField
    x : (n, 2) array
        Current positions of every point in the model.
    master_nodal_volume, slave_nodal_volume : (n_nodes,) arrays
        Nodal volumes projected this step for both fields.
    slave_table : (indptr, nodes, w, gw)
        Current basis table of the slave field (rows indexed from
        ``slave_field.start``).
    dh : float
        Grid spacing; also the stage-two search radius.
    history : dict or None
        Map ``seg_key -> (beta, l_ms)`` from the previous step, used to
        carry slip state for persisting pairs.

    Returns the active pairs, one at most per slave point (deepest
    penetration wins, ties toward lower segment index).
    """
    history = history or {}
    shared = (master_nodal_volume > 0.0) & (slave_nodal_volume > 0.0)
    if not shared.any():
        return []
    indptr, nodes = slave_table[0], slave_table[1]
    sb = slave_field.boundary_ids
    cand = []
    for pid in sb:
        lp = pid - slave_field.start
        row = nodes[indptr[lp]:indptr[lp + 1]]
        if shared[row].any():
            cand.append(pid)
    if not cand:
        return []
    cand = np.asarray(cand)
    mb = master_field.boundary_ids
    xm = x[mb]
    xs = x[cand]
    d2 = np.sum((xs[:, None, :] - xm[None, :, :]) ** 2, axis=2)
    near = d2 <= dh * dh

    # master point local index -> segments touching it
    seg_of_point = {}
    segments = []
    for ci, chain in enumerate(master_field.chains):
        ids = chain.point_ids
        n = len(ids)
        last = n if chain.closed else n - 1
        for si in range(last):
            a = ids[si]
            b = ids[(si + 1) % n]
            seg_idx = len(segments)
            segments.append((ci, si, a, b))
            for mp in (a, b):
                seg_of_point.setdefault(mp, []).append(seg_idx)

    mb_index = {int(p): k for k, p in enumerate(mb)}
    pairs = []
    for row_i, pid in enumerate(cand):
        if not near[row_i].any():
            continue
        near_pts = mb[near[row_i]]
        seg_ids = sorted({s for mp in near_pts for s in seg_of_point.get(int(mp), ())})
        best = None
        for s in seg_ids:
            ci, si, a, b = segments[s]
            beta, l_ms, e_nor, e_tan, g_nor = project_on_segment(x[pid], x[a], x[b])
            if not (0.0 < beta < 1.0) or g_nor >= 0.0:
                continue
            if best is None or (-g_nor) > -best[0] + 0.0:
                best = (g_nor, s, beta, l_ms, e_nor, e_tan)
        if best is None:
            continue
        g_nor, s, beta, l_ms, e_nor, e_tan = best
        ci, si, a, b = segments[s]
        key = (int(pid), ci, si)
        beta_prev, l_prev = history.get(key, (beta, l_ms))
        g_tan = l_prev * (beta - beta_prev)
        pairs.append(ContactPair(slave=int(pid), master_1=int(a), master_2=int(b),
                                 g_nor=g_nor, g_tan=g_tan, beta=beta,
                                 beta_prev=beta_prev, l_ms=l_ms, l_ms_prev=l_prev,
                                 e_nor=e_nor, e_tan=e_tan, seg_key=key))
    _ = mb_index  # retained for debuggability
    return pairs


def detect_pairs_1d(master_field, slave_field, x, master_nodal_volume,
                    slave_nodal_volume, slave_table, dh):
    """Point-to-point contact detection in 1D.

    Master boundary points carry outward normals; a slave point within
    ``dh`` of a master point with negative signed gap forms a pair.
    """
    shared = (master_nodal_volume > 0.0) & (slave_nodal_volume > 0.0)
    if not shared.any():
        return []
    indptr, nodes = slave_table[0], slave_table[1]
    pairs = []
    mb = master_field.boundary_ids
    normals = master_field.boundary_normals_1d
    for pid in slave_field.boundary_ids:
        lp = pid - slave_field.start
        row = nodes[indptr[lp]:indptr[lp + 1]]
        if not shared[row].any():
            continue
        best = None
        for k, mpid in enumerate(mb):
            gap = float((x[pid, 0] - x[mpid, 0]) * normals[k])
            if abs(x[pid, 0] - x[mpid, 0]) > dh or gap >= 0.0:
                continue
            if best is None or gap < best[0]:
                best = (gap, int(mpid), float(normals[k]))
        if best is None:
            continue
        gap, mpid, n = best
        pairs.append(ContactPair(slave=int(pid), master_1=mpid, master_2=-1,
                                 g_nor=gap, g_tan=0.0, beta=0.0, beta_prev=0.0,
                                 l_ms=0.0, l_ms_prev=0.0,
                                 e_nor=np.array([n]), e_tan=np.zeros(1)))
    return pairs


def penalty_forces(pair: ContactPair, config: ContactPairConfig, measure=1.0):
    """Penalty contact forces on (slave, master endpoint 1, master endpoint 2).

    The penalty components ``omega * g`` are contact tractions; ``measure``
    is the slave point's share of the contact surface (its tributary
    outline length in 2D, the bar cross-section in 1D) that turns them
    into forces.  The normal traction is non-positive for an active pair
    and the tangential one is capped by the Coulomb cone.  Returns the
    three force vectors plus ``(f_nor, f_tan, sticking)``.
    """
    if pair.g_nor >= 0.0:
        raise ContractViolationError("penalty_forces called on a non-penetrating pair")
    f_nor = config.omega_nor * pair.g_nor
    dim = pair.e_nor.shape[0]
    if dim == 1:
        f_s = -f_nor * measure * pair.e_nor
        f_1 = f_nor * measure * pair.e_nor
        return f_s, f_1, np.zeros(1), (f_nor, 0.0, True)
    elastic = config.omega_tan * abs(pair.g_tan)
    cap = config.friction * abs(f_nor)
    sticking = elastic < cap
    f_tan = min(cap, elastic) * np.sign(-pair.g_tan)
    beta = pair.beta
    gn_l = pair.g_nor / pair.l_ms
    gt_l = pair.g_tan / pair.l_ms
    en, et = pair.e_nor, pair.e_tan
    # rows of C_nor = -(N - (g_nor/l) P) and C_tan = T - (g_tan/l) Q
    c_nor_s = -en
    c_nor_1 = (1.0 - beta) * en - gn_l * en
    c_nor_2 = beta * en + gn_l * en
    c_tan_s = et
    c_tan_1 = -(1.0 - beta) * et + gt_l * et
    c_tan_2 = -beta * et - gt_l * et
    f_s = (f_nor * c_nor_s + f_tan * c_tan_s) * measure
    f_1 = (f_nor * c_nor_1 + f_tan * c_tan_1) * measure
    f_2 = (f_nor * c_nor_2 + f_tan * c_tan_2) * measure
    return f_s, f_1, f_2, (f_nor, f_tan, sticking)


def project_point_force(nodal_force, table, field_start, pid, force):
    """Scatter one point force onto its field's grid nodes via the basis row."""
    indptr, nodes, w = table[0], table[1], table[2]
    lp = pid - field_start
    for j in range(indptr[lp], indptr[lp + 1]):
        nodal_force[nodes[j]] += w[j] * force
