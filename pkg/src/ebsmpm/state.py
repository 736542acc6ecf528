"""Material point state, discrete fields, boundary chains and seeding.

Point data lives in struct-of-arrays form for the whole model; each
discrete field owns a contiguous index range that never changes during a
run.  Bulk points are placed at tensor Gauss positions of grid-spacing
sized tiles anchored at the region's minimum corner; boundary material
points are sampled uniformly by arc length along the region outline and
carry, as a group, an extra 0.1% of the region's volume and mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .errors import ConfigurationError

BOUNDARY_MASS_FRACTION = 1e-3


# ---------------------------------------------------------------------
# geometry
# ---------------------------------------------------------------------


@dataclass
class Segment1D:
    a: float
    b: float

    def measure(self):
        return self.b - self.a


@dataclass
class Rectangle:
    x0: float
    y0: float
    x1: float
    y1: float

    def measure(self):
        return (self.x1 - self.x0) * (self.y1 - self.y0)

    def contains(self, pts):
        return ((pts[:, 0] >= self.x0) & (pts[:, 0] <= self.x1)
                & (pts[:, 1] >= self.y0) & (pts[:, 1] <= self.y1))

    def bbox(self):
        return np.array([self.x0, self.y0]), np.array([self.x1, self.y1])

    def outline(self):
        c = [(self.x0, self.y0), (self.x1, self.y0), (self.x1, self.y1), (self.x0, self.y1)]
        return [_Loop.polygon(c)]


@dataclass
class Disk:
    cx: float
    cy: float
    r: float

    def measure(self):
        return math.pi * self.r ** 2

    def contains(self, pts):
        return (pts[:, 0] - self.cx) ** 2 + (pts[:, 1] - self.cy) ** 2 <= self.r ** 2

    def bbox(self):
        c = np.array([self.cx, self.cy])
        return c - self.r, c + self.r

    def outline(self):
        return [_Loop.arc(self.cx, self.cy, self.r, 0.0, 2.0 * math.pi)]


@dataclass
class Annulus:
    cx: float
    cy: float
    r_in: float
    r_out: float

    def measure(self):
        return math.pi * (self.r_out ** 2 - self.r_in ** 2)

    def contains(self, pts):
        rr = (pts[:, 0] - self.cx) ** 2 + (pts[:, 1] - self.cy) ** 2
        return (rr <= self.r_out ** 2) & (rr >= self.r_in ** 2)

    def bbox(self):
        c = np.array([self.cx, self.cy])
        return c - self.r_out, c + self.r_out

    def outline(self):
        # outer loop counter-clockwise, inner loop clockwise so that the
        # right-of-tangent normal points outward on both
        return [_Loop.arc(self.cx, self.cy, self.r_out, 0.0, 2.0 * math.pi),
                _Loop.arc(self.cx, self.cy, self.r_in, 2.0 * math.pi, 0.0)]


@dataclass
class DemiDisk:
    """Half disk; ``flat`` names the side holding the straight edge."""

    cx: float
    cy: float
    r: float
    flat: str = "top"

    def measure(self):
        return 0.5 * math.pi * self.r ** 2

    def contains(self, pts):
        rr = (pts[:, 0] - self.cx) ** 2 + (pts[:, 1] - self.cy) ** 2
        if self.flat == "top":
            side = pts[:, 1] <= self.cy
        else:
            side = pts[:, 1] >= self.cy
        return (rr <= self.r ** 2) & side

    def bbox(self):
        if self.flat == "top":
            return (np.array([self.cx - self.r, self.cy - self.r]),
                    np.array([self.cx + self.r, self.cy]))
        return (np.array([self.cx - self.r, self.cy]),
                np.array([self.cx + self.r, self.cy + self.r]))

    def outline(self):
        loop = _Loop()
        if self.flat == "top":
            loop.add_line((self.cx + self.r, self.cy), (self.cx - self.r, self.cy))
            loop.add_arc(self.cx, self.cy, self.r, math.pi, 2.0 * math.pi)
        else:
            loop.add_line((self.cx - self.r, self.cy), (self.cx + self.r, self.cy))
            loop.add_arc(self.cx, self.cy, self.r, 0.0, math.pi)
        return [loop]


@dataclass
class Union:
    parts: list

    def measure(self):
        return sum(p.measure() for p in self.parts)

    def contains(self, pts):
        m = np.zeros(pts.shape[0], dtype=bool)
        for p in self.parts:
            m |= p.contains(pts)
        return m

    def bbox(self):
        lows, highs = zip(*(p.bbox() for p in self.parts))
        return np.min(lows, axis=0), np.max(highs, axis=0)

    def outline(self):
        loops = []
        for p in self.parts:
            loops.extend(p.outline())
        return loops


class _Loop:
    """Closed planar path built from line and arc pieces, sampled by arc length."""

    def __init__(self):
        self.pieces = []  # (kind, data, length)

    @classmethod
    def polygon(cls, corners):
        loop = cls()
        n = len(corners)
        for i in range(n):
            loop.add_line(corners[i], corners[(i + 1) % n])
        return loop

    @classmethod
    def arc(cls, cx, cy, r, th0, th1):
        loop = cls()
        loop.add_arc(cx, cy, r, th0, th1)
        return loop

    def add_line(self, a, b):
        a = np.asarray(a, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        self.pieces.append(("line", (a, b), float(np.linalg.norm(b - a))))

    def add_arc(self, cx, cy, r, th0, th1):
        self.pieces.append(("arc", (cx, cy, r, th0, th1), abs(th1 - th0) * r))

    @property
    def length(self):
        return sum(p[2] for p in self.pieces)

    def sample(self, n):
        """``n`` points uniformly spaced by arc length, starting at s=0."""
        total = self.length
        s_targets = np.arange(n) * total / n
        pts = np.empty((n, 2))
        k = 0
        s0 = 0.0
        for kind, data, plen in self.pieces:
            while k < n and s_targets[k] < s0 + plen - 1e-12 * total:
                s_loc = (s_targets[k] - s0) / plen
                if kind == "line":
                    a, b = data
                    pts[k] = a + s_loc * (b - a)
                else:
                    cx, cy, r, th0, th1 = data
                    th = th0 + s_loc * (th1 - th0)
                    pts[k] = (cx + r * math.cos(th), cy + r * math.sin(th))
                k += 1
            s0 += plen
        # numerical leftovers land on the final piece end
        while k < n:
            kind, data, plen = self.pieces[-1]
            if kind == "line":
                pts[k] = data[1]
            else:
                cx, cy, r, th0, th1 = data
                pts[k] = (cx + r * math.cos(th1), cy + r * math.sin(th1))
            k += 1
        return pts


# ---------------------------------------------------------------------
# state containers
# ---------------------------------------------------------------------


@dataclass
class BoundaryChain:
    """Ordered boundary point ids of one field; consecutive ids form master
    segments.  Counter-clockwise traversal of a closed chain puts the
    outward normal on the right of the tangent."""

    point_ids: np.ndarray
    closed: bool


@dataclass
class DiscreteField:
    name: str
    index: int
    start: int                 # first point id (inclusive)
    stop: int                  # last point id (exclusive)
    material: object
    rigid: bool = False
    chains: list = dataclass_field(default_factory=list)
    boundary_ids: np.ndarray = None          # all boundary point ids of this field
    boundary_normals_1d: np.ndarray = None   # (n_b,) outward +-1, 1D only

    @property
    def n_points(self):
        return self.stop - self.start

    def point_ids(self):
        return np.arange(self.start, self.stop)


class ParticleState:
    """Struct-of-arrays storage for every material point in the model."""

    def __init__(self, dim, n_points):
        self.dim = dim
        ns = 1 if dim == 1 else 3  # stress/strain components: [s] or [sxx, syy, sxy]
        self.x = np.zeros((n_points, dim))
        self.x0 = np.zeros((n_points, dim))
        self.vel = np.zeros((n_points, dim))
        self.mass = np.zeros(n_points)
        self.volume = np.zeros(n_points)
        self.stress = np.zeros((n_points, ns))
        self.strain = np.zeros((n_points, ns))
        self.def_grad = np.tile(np.eye(dim).reshape(-1), (n_points, 1))
        self.psi = np.zeros(n_points)
        self.is_boundary = np.zeros(n_points, dtype=bool)
        self.field_id = np.zeros(n_points, dtype=np.int32)

    @property
    def n_points(self):
        return self.x.shape[0]

    def displacement(self):
        return self.x - self.x0


class FieldNodalState:
    """Per-field grid accumulators, reset at the top of every step."""

    def __init__(self, n_nodes, dim):
        self.mass = np.zeros(n_nodes)
        self.mass_abs = np.zeros(n_nodes)   # absolute-weight lumping, >= |mass|
        self.volume = np.zeros(n_nodes)
        self.momentum = np.zeros((n_nodes, dim))
        self.f_int = np.zeros((n_nodes, dim))
        self.f_ext = np.zeros((n_nodes, dim))
        self.f_cont = np.zeros((n_nodes, dim))

    def reset(self):
        self.mass[:] = 0.0
        self.mass_abs[:] = 0.0
        self.volume[:] = 0.0
        self.momentum[:] = 0.0
        self.f_int[:] = 0.0
        self.f_ext[:] = 0.0
        self.f_cont[:] = 0.0


# ---------------------------------------------------------------------
# seeding
# ---------------------------------------------------------------------


def _gauss_rule(k):
    xi, w = np.polynomial.legendre.leggauss(k)
    return 0.5 * (xi + 1.0), 0.5 * w


def _cell_range(lo, hi, origin, dh):
    """Grid-cell index range [c0, c1) overlapped by the interval [lo, hi]."""
    c0 = int(math.floor((lo - origin) / dh + 1e-12))
    c1 = int(math.ceil((hi - origin) / dh - 1e-12))
    return c0, max(c1, c0 + 1)


def _seed_bulk_1d(geom: Segment1D, dh, points_per_cell, origin):
    """Gauss points of each overlapped grid cell, clipped to the segment.

    Returns positions (n, 1) and the per-point Gauss quadrature weights
    (sub-interval length times the rule weight); they sum to the segment
    length exactly.
    """
    offs, wts = _gauss_rule(points_per_cell)
    c0, c1 = _cell_range(geom.a, geom.b, origin, dh)
    xs, vol = [], []
    for c in range(c0, c1):
        lo = max(geom.a, origin + c * dh)
        hi = min(geom.b, origin + (c + 1) * dh)
        if hi - lo < 1e-12 * dh:
            continue
        xs.append(lo + offs * (hi - lo))
        vol.append(wts * (hi - lo))
    return np.concatenate(xs)[:, None], np.concatenate(vol)


def _seed_bulk_2d(geom, dh, points_per_cell, origin):
    """Tensor Gauss points per grid cell, filtered by the region.

    Rectangle cells are clipped so the rule integrates them exactly; for
    curved regions the points of each full cell are kept when they fall
    inside.  Returns positions and Gauss quadrature weights.
    """
    k = int(round(math.sqrt(points_per_cell)))
    if k * k != points_per_cell:
        raise ConfigurationError(
            f"points_per_cell must be a perfect square in 2D, got {points_per_cell}")
    offs, wts = _gauss_rule(k)
    lo, hi = geom.bbox()
    clip = isinstance(geom, Rectangle)
    cx0, cx1 = _cell_range(lo[0], hi[0], origin[0], dh)
    cy0, cy1 = _cell_range(lo[1], hi[1], origin[1], dh)
    pts, vol = [], []
    for cx in range(cx0, cx1):
        x0 = origin[0] + cx * dh
        x1 = x0 + dh
        if clip:
            x0, x1 = max(x0, lo[0]), min(x1, hi[0])
            if x1 - x0 < 1e-12 * dh:
                continue
        for cy in range(cy0, cy1):
            y0 = origin[1] + cy * dh
            y1 = y0 + dh
            if clip:
                y0, y1 = max(y0, lo[1]), min(y1, hi[1])
                if y1 - y0 < 1e-12 * dh:
                    continue
            gx, gy = np.meshgrid(x0 + offs * (x1 - x0), y0 + offs * (y1 - y0),
                                 indexing="ij")
            ww = np.outer(wts * (x1 - x0), wts * (y1 - y0)).reshape(-1)
            p = np.stack([gx.reshape(-1), gy.reshape(-1)], axis=1)
            keep = geom.contains(p)
            pts.append(p[keep])
            vol.append(ww[keep])
    pts = np.concatenate(pts, axis=0) if pts else np.zeros((0, 2))
    vol = np.concatenate(vol) if vol else np.zeros(0)
    return pts, vol


@dataclass
class SeededField:
    """Raw arrays produced by seeding one field, before model assembly."""

    bulk_x: np.ndarray
    bulk_volume: np.ndarray
    boundary_x: np.ndarray
    boundary_volume: np.ndarray
    chain_slices: list            # (start, stop, closed) into boundary arrays
    boundary_normals_1d: np.ndarray


def seed_field(geometry, points_per_cell, boundary_segments, dh,
               grid_origin=None, volume_mode="equal") -> SeededField:
    """Generate bulk and boundary material points for one region.

    Bulk points sit at the tensor Gauss positions of the grid cells the
    region overlaps (cells anchored at ``grid_origin``).  With
    ``volume_mode="equal"`` every bulk point carries the same share of the
    region measure; with ``"gauss"`` each carries its quadrature weight,
    which makes cell integrals of the transfers exact.  Boundary points
    are sampled uniformly by arc length along the outline and share an
    extra 0.1% of the region's volume and mass; a 1D segment always gets
    its two end points.
    """
    if points_per_cell <= 0 or boundary_segments <= 0:
        raise ConfigurationError("seeding counts must be positive")
    if volume_mode not in ("equal", "gauss"):
        raise ConfigurationError(f"volume_mode must be 'equal' or 'gauss', got {volume_mode!r}")
    measure = geometry.measure()
    if measure <= 0:
        raise ConfigurationError("region has non-positive measure")
    if isinstance(geometry, Segment1D):
        origin = 0.0 if grid_origin is None else float(np.atleast_1d(grid_origin)[0])
        bulk, bulk_vol = _seed_bulk_1d(geometry, dh, points_per_cell, origin)
        bx = np.array([[geometry.a], [geometry.b]])
        normals = np.array([-1.0, 1.0])
        chain_slices = [(0, 2, False)]
    elif isinstance(geometry, (Rectangle, Disk, Annulus, DemiDisk, Union)):
        origin = (np.zeros(2) if grid_origin is None
                  else np.asarray(grid_origin, dtype=np.float64))
        if isinstance(geometry, Union):
            parts = [_seed_bulk_2d(p, dh, points_per_cell, origin)
                     for p in geometry.parts]
            bulk = np.concatenate([p[0] for p in parts], axis=0)
            bulk_vol = np.concatenate([p[1] for p in parts])
        else:
            bulk, bulk_vol = _seed_bulk_2d(geometry, dh, points_per_cell, origin)
        loops = geometry.outline()
        total_len = sum(l.length for l in loops)
        samples = []
        chain_slices = []
        start = 0
        for i, loop in enumerate(loops):
            if len(loops) == 1:
                n = boundary_segments
            else:
                n = max(8, int(round(boundary_segments * loop.length / total_len)))
            samples.append(loop.sample(n))
            chain_slices.append((start, start + n, True))
            start += n
        bx = np.concatenate(samples, axis=0)
        normals = None
    else:
        raise ConfigurationError(f"unsupported geometry {type(geometry).__name__}")
    if bulk.shape[0] == 0:
        raise ConfigurationError("region produced no bulk points; check geometry vs grid spacing")
    if volume_mode == "equal":
        bulk_vol = np.full(bulk.shape[0], measure / bulk.shape[0])
    bnd_vol = np.full(bx.shape[0], BOUNDARY_MASS_FRACTION * measure / bx.shape[0])
    return SeededField(bulk_x=bulk, bulk_volume=bulk_vol, boundary_x=bx,
                       boundary_volume=bnd_vol, chain_slices=chain_slices,
                       boundary_normals_1d=normals)


# ---------------------------------------------------------------------
# energies
# ---------------------------------------------------------------------


def total_energies(vel, mass, psi, volume):
    """Kinetic, stored and total energy of a point set."""
    k = 0.5 * float(np.sum(mass * np.sum(vel * vel, axis=1)))
    w = float(np.sum(psi * volume))
    return k, w, k + w
