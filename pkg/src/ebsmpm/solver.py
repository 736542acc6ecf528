"""Explicit momentum-form MUSL time stepper.

Each step runs a fixed pipeline: reset grid accumulators, classify cells
and bases (extended mode), map particles to the grid, apply Dirichlet
conditions, evaluate and project penalty contact forces, advance nodal
momentum by forward Euler, then map back with the double-mapping (MUSL)
update: trial nodal velocities move the points, the momentum is re-mapped
from updated point velocities before velocity gradients and stresses are
formed.  Point updates are pure PIC.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np

from . import _kernels as k
from .contact import detect_pairs, detect_pairs_1d, penalty_forces, project_point_force
from .errors import ConfigurationError, OutOfDomainError
from .grid import EulerianGrid, classify_cells, classify_bases
from .materials import LinearElastic, NeoHookean
from .state import FieldNodalState, ParticleState

MASS_TOL_REL = 1e-12
# signed/absolute lumped-mass ratio below which the division is regularised
MASS_CANCEL_FRACTION = 0.2


def penalty_defaults(dh, e_master, e_slave=None):
    """Default penalty parameters: stiffness of the stiffer body over dh."""
    e = e_master if e_slave is None else max(e_master, e_slave)
    w = e / dh
    return w, w


def critical_dt(dh, materials):
    """CFL-critical time step dh / c0 for the stiffest material present."""
    c = max(m.wave_speed for m in materials)
    return dh / c


@dataclass
class Region:
    """Declarative axis-aligned box selector (``lo``/``hi`` may be None)."""

    lo: tuple = None
    hi: tuple = None

    def mask(self, positions):
        m = np.ones(positions.shape[0], dtype=bool)
        if self.lo is not None:
            for a, v in enumerate(self.lo):
                if v is not None:
                    m &= positions[:, a] >= v
        if self.hi is not None:
            for a, v in enumerate(self.hi):
                if v is not None:
                    m &= positions[:, a] <= v
        return m


@dataclass
class DirichletSpec:
    """Constrained grid nodes: a region over node anchors plus axis list."""

    region: Region
    axes: tuple


@dataclass
class SpringSupport:
    """Point-attached rigid spring: adds -k * u_p to the point's load."""

    point: int
    stiffness: float

    def __post_init__(self):
        if self.stiffness <= 0:
            raise ConfigurationError("spring stiffness must be positive")


@dataclass
class TractionLoad:
    """Scheduled traction lumped on boundary points in ``region``.

    Either ``total_force`` (split over the selected points by tributary
    outline length) or ``traction`` (multiplied by each point's tributary
    length) must be given.  The load ramps linearly over ``ramp_time`` and
    holds afterwards.
    """

    region: Region
    total_force: tuple = None
    traction: tuple = None
    ramp_time: float = 0.0


@dataclass
class BodyForceLoad:
    """Per-field body acceleration with linear ramp."""

    vector: tuple
    ramp_time: float = 0.0


@dataclass
class FieldLoads:
    dirichlet: list = dataclass_field(default_factory=list)
    tractions: list = dataclass_field(default_factory=list)
    springs: list = dataclass_field(default_factory=list)
    body_force: BodyForceLoad = None


@dataclass
class StepConfig:
    dt: float
    n_steps: int
    c_c: float = 0.75
    basis: str = "ebs"
    gravity: tuple = None
    gravity_ramp: float = 0.0
    cfl_factor: float = 0.1
    timeseries_every: int = 1

    def __post_init__(self):
        if self.basis not in ("obs", "ebs"):
            raise ConfigurationError(f"basis mode must be 'obs' or 'ebs', got {self.basis!r}")
        if not (0.0 < self.c_c <= 1.0):
            raise ConfigurationError(f"occupation parameter must lie in (0, 1], got {self.c_c}")
        if self.dt <= 0 or self.n_steps < 0:
            raise ConfigurationError("dt must be positive and n_steps non-negative")


def _ramp(t, ramp_time):
    if ramp_time <= 0.0:
        return 1.0
    return min(t / ramp_time, 1.0)


class Engine:
    """Owns the model state and advances it one explicit step at a time."""

    def __init__(self, grid: EulerianGrid, state: ParticleState, fields,
                 step: StepConfig, contact_configs=(), field_loads=None,
                 enforce_cfl=True):
        self.grid = grid
        self.state = state
        self.fields = list(fields)
        self.step_config = step
        self.contact_configs = list(contact_configs)
        self.field_loads = field_loads or {f.index: FieldLoads() for f in self.fields}
        for f in self.fields:
            self.field_loads.setdefault(f.index, FieldLoads())
        self.nodal = [FieldNodalState(grid.n_nodes_total, grid.dim) for _ in self.fields]
        self.tables = [None] * len(self.fields)
        self.basis_classes = [None] * len(self.fields)
        self.step_index = 0
        self.time = 0.0
        self.skipped_nodes = 0
        self.first_contact_step = None
        self.pair_history = [dict() for _ in self.contact_configs]
        self.active_pairs = []          # list of (config_idx, ContactPair, f_nor, f_tan, stick)
        self.timeseries = []
        self.contact_force = np.zeros(grid.dim)
        if enforce_cfl:
            mats = [f.material for f in self.fields
                    if f.material is not None and not f.rigid]
            if mats:
                bound = step.cfl_factor * critical_dt(grid.dh, mats)
                if step.dt > bound * (1.0 + 1e-6):
                    raise ConfigurationError(
                        f"dt={step.dt} violates the stability bound "
                        f"{step.cfl_factor} * dh/c0 = {bound}")
        node_pos = grid.node_positions(np.arange(grid.n_nodes_total))
        self._dirichlet_masks = []
        for f in self.fields:
            loads = self.field_loads[f.index]
            mask = np.zeros((grid.n_nodes_total, grid.dim), dtype=bool)
            for spec in loads.dirichlet:
                sel = spec.region.mask(node_pos)
                for a in spec.axes:
                    mask[sel, a] = True
            self._dirichlet_masks.append(mask)
        self._gravity = (np.zeros(grid.dim) if step.gravity is None
                         else np.asarray(step.gravity, dtype=np.float64))

    # --- per-phase helpers (public for testing) -------------------------

    def classify_field(self, f):
        """Per-field cell and basis classification (extended mode only)."""
        s = self.state
        sl = slice(f.start, f.stop)
        cell_multi = self.grid.parent_cell(s.x[sl])
        cells = self.grid.cell_id(cell_multi)
        cc = classify_cells(self.grid, cells, s.volume[sl], self.step_config.c_c)
        return classify_bases(self.grid, cc)

    def _raw_table(self, f, use_ebs, basis_class):
        s = self.state
        sl = slice(f.start, f.stop)
        if use_ebs:
            label = basis_class.label
            node_to_deg = basis_class.node_to_deg
            deg_start = basis_class.deg_block_start
            deg_w = basis_class.deg_weights
            if deg_start.shape[0] == 0:
                deg_start = np.zeros((1, self.grid.dim), dtype=np.int32)
                deg_w = np.zeros((1, 3 ** self.grid.dim))
        else:
            label = np.zeros(1, dtype=np.int8)
            node_to_deg = np.zeros(1, dtype=np.int32)
            deg_start = np.zeros((1, self.grid.dim), dtype=np.int32)
            deg_w = np.zeros((1, 3 ** self.grid.dim))
        if self.grid.dim == 1:
            return k.build_table_1d(s.x[sl], self.grid.x_min, self.grid.dh,
                                    self.grid.n_cells, use_ebs, label,
                                    node_to_deg, deg_start, deg_w)
        return k.build_table_2d(s.x[sl], self.grid.x_min, self.grid.dh,
                                self.grid.n_cells, int(self.grid.n_bases[1]),
                                use_ebs, label, node_to_deg, deg_start, deg_w)

    def _demote_sick_blocks(self, basis_class, sick):
        """Degenerated bases whose block feeds a sick node keep their own dof."""
        from .grid import BASIS_STABLE
        bc = basis_class
        m = bc.deg_nodes.shape[0]
        drop = np.zeros(m, dtype=bool)
        nby = int(self.grid.n_bases[1]) if self.grid.dim == 2 else 0
        for r in range(m):
            start = bc.deg_block_start[r]
            if self.grid.dim == 1:
                ids = start[0] + np.arange(3)
            else:
                ids = ((start[0] + np.arange(3))[:, None] * nby
                       + (start[1] + np.arange(3))[None, :]).reshape(-1)
            if sick[ids].any():
                drop[r] = True
        if not drop.any():
            return False
        demoted = bc.deg_nodes[drop]
        bc.label[demoted] = BASIS_STABLE
        bc.node_to_deg[demoted] = -1
        keep = ~drop
        bc.deg_nodes = bc.deg_nodes[keep]
        bc.deg_block_start = bc.deg_block_start[keep]
        bc.deg_weights = bc.deg_weights[keep]
        bc.node_to_deg[bc.deg_nodes] = np.arange(bc.deg_nodes.shape[0],
                                                 dtype=np.int32)
        return True

    def build_table(self, f, basis_class=None):
        """Basis table for field ``f``, healing unsafe mass cancellation.

        With the extended basis, Lagrange redistribution can cancel so much
        lumped mass at a stable node that the velocity division loses all
        accuracy.  Such configurations are healed before use: the
        degenerated bases whose blocks feed a sick node are demoted to
        independent ones and the table is rebuilt.
        """
        s = self.state
        sl = slice(f.start, f.stop)
        use_ebs = self.step_config.basis == "ebs"
        if use_ebs and basis_class is None:
            basis_class = self.classify_field(f)
        table = self._raw_table(f, use_ebs, basis_class)
        if use_ebs and basis_class.deg_nodes.size:
            for _ in range(8):
                m_i = np.zeros(self.grid.n_nodes_total)
                m_abs = np.zeros(self.grid.n_nodes_total)
                k.scatter_mass_signed_abs(table[0], table[1], table[2],
                                          s.mass[sl], m_i, m_abs)
                sick = (m_abs > 0.0) & (m_i < MASS_CANCEL_FRACTION * m_abs)
                if not sick.any():
                    break
                if not self._demote_sick_blocks(basis_class, sick):
                    break
                table = self._raw_table(f, use_ebs, basis_class)
        return table, basis_class

    def external_point_forces(self, f, t):
        """Assemble per-point external loads at time ``t`` for field ``f``."""
        s = self.state
        sl = slice(f.start, f.stop)
        loads = self.field_loads[f.index]
        fext = np.zeros((f.n_points, self.grid.dim))
        accel = self._gravity * _ramp(t, self.step_config.gravity_ramp)
        if loads.body_force is not None:
            accel = accel + (np.asarray(loads.body_force.vector)
                             * _ramp(t, loads.body_force.ramp_time))
        fext += s.mass[sl, None] * accel[None, :]
        for tr in loads.tractions:
            self._apply_traction(f, tr, t, fext)
        for sp in loads.springs:
            u = s.x[sp.point] - s.x0[sp.point]
            fext[sp.point - f.start] -= sp.stiffness * u
        return fext

    def _tributary_lengths(self, f):
        """Per boundary point: half the length of its adjacent segments."""
        s = self.state
        trib = np.zeros(s.n_points)
        for chain in f.chains:
            ids = chain.point_ids
            n = len(ids)
            if n < 2:
                continue
            nxt = np.roll(ids, -1) if chain.closed else ids[1:]
            cur = ids if chain.closed else ids[:-1]
            seg_len = np.linalg.norm(s.x[nxt] - s.x[cur], axis=1)
            for i_seg in range(len(cur)):
                trib[cur[i_seg]] += 0.5 * seg_len[i_seg]
                trib[nxt[i_seg]] += 0.5 * seg_len[i_seg]
        return trib

    def _apply_traction(self, f, tr, t, fext):
        s = self.state
        scale = _ramp(t, tr.ramp_time)
        ids = f.boundary_ids
        sel = tr.region.mask(s.x[ids])
        ids = ids[sel]
        if ids.size == 0:
            return
        if self.grid.dim == 1:
            per_point = np.asarray(tr.traction if tr.traction is not None
                                   else tr.total_force, dtype=np.float64)
            fext[ids - f.start] += scale * per_point / (ids.size if tr.total_force is not None else 1.0)
            return
        trib = self._tributary_lengths(f)[ids]
        if tr.total_force is not None:
            vec = np.asarray(tr.total_force, dtype=np.float64)
            weights = trib / trib.sum()
            fext[ids - f.start] += scale * vec[None, :] * weights[:, None]
        else:
            vec = np.asarray(tr.traction, dtype=np.float64)
            fext[ids - f.start] += scale * vec[None, :] * trib[:, None]

    def p2g(self, f, table, fext_p):
        """Map mass, volume, momentum and forces of field ``f`` to the grid."""
        s = self.state
        sl = slice(f.start, f.stop)
        nd = self.nodal[f.index]
        args = (table[0], table[1], table[2], table[3], s.mass[sl], s.volume[sl],
                s.vel[sl], s.stress[sl], fext_p,
                nd.mass, nd.mass_abs, nd.momentum, nd.volume, nd.f_int, nd.f_ext)
        if self.grid.dim == 1:
            k.p2g_1d(*args)
        else:
            k.p2g_2d(*args)

    def apply_dirichlet(self, f, arrays):
        mask = self._dirichlet_masks[f.index]
        for arr in arrays:
            arr[mask] = 0.0

    def contact_step(self):
        """Detect pairs, evaluate penalty forces and project them per field."""
        self.active_pairs = []
        self.contact_force = np.zeros(self.grid.dim)
        s = self.state
        trib_cache = {}
        for ci, cfg in enumerate(self.contact_configs):
            fm = self.fields[cfg.master]
            fs = self.fields[cfg.slave]
            if self.grid.dim == 1:
                pairs = detect_pairs_1d(fm, fs, s.x, self.nodal[fm.index].volume,
                                        self.nodal[fs.index].volume,
                                        self.tables[fs.index], self.grid.dh)
            else:
                pairs = detect_pairs(fm, fs, s.x, self.nodal[fm.index].volume,
                                     self.nodal[fs.index].volume,
                                     self.tables[fs.index], self.grid.dh,
                                     self.pair_history[ci])
                if pairs and fs.index not in trib_cache:
                    trib_cache[fs.index] = self._tributary_lengths(fs)
            new_hist = {}
            for pair in pairs:
                # the slave point's outline share turns tractions into forces
                measure = (1.0 if self.grid.dim == 1
                           else trib_cache[fs.index][pair.slave])
                f_s, f_1, f_2, (f_nor, f_tan, stick) = penalty_forces(
                    pair, cfg, measure=measure)
                if not fs.rigid:
                    project_point_force(self.nodal[fs.index].f_cont,
                                        self.tables[fs.index], fs.start,
                                        pair.slave, f_s)
                if not fm.rigid:
                    project_point_force(self.nodal[fm.index].f_cont,
                                        self.tables[fm.index], fm.start,
                                        pair.master_1, f_1)
                    if pair.master_2 >= 0:
                        project_point_force(self.nodal[fm.index].f_cont,
                                            self.tables[fm.index], fm.start,
                                            pair.master_2, f_2)
                if pair.seg_key:
                    new_hist[pair.seg_key] = (pair.beta, pair.l_ms)
                self.active_pairs.append((ci, pair, f_nor, f_tan, stick))
                self.contact_force += f_s
            self.pair_history[ci] = new_hist
        if self.active_pairs and self.first_contact_step is None:
            self.first_contact_step = self.step_index
        for f in self.fields:
            mask = self._dirichlet_masks[f.index]
            self.nodal[f.index].f_cont[mask] = 0.0

    def advance_momentum(self, f):
        """Forward-Euler trial momentum; Dirichlet nodes stay at zero."""
        nd = self.nodal[f.index]
        trial = nd.momentum + self.step_config.dt * (nd.f_ext + nd.f_cont - nd.f_int)
        trial[self._dirichlet_masks[f.index]] = 0.0
        return trial

    def musl_g2p_update(self, f, table, trial_momentum):
        """Double-mapping grid-to-point update plus the material update."""
        s = self.state
        dt = self.step_config.dt
        sl = slice(f.start, f.stop)
        nd = self.nodal[f.index]
        tol = MASS_TOL_REL * (nd.mass.max() if nd.mass.size else 0.0)
        alive = nd.mass > tol
        self.skipped_nodes += int(((nd.mass != 0.0) & ~alive).sum())
        vel_tilde = np.zeros_like(trial_momentum)
        vel_tilde[alive] = trial_momentum[alive] / nd.mass[alive, None]

        v_p = np.empty((f.n_points, self.grid.dim))
        k.gather_velocity(table[0], table[1], table[2], vel_tilde, v_p)
        s.x[sl] += dt * v_p
        s.vel[sl] = v_p

        remap = np.zeros_like(trial_momentum)
        k.scatter_momentum(table[0], table[1], table[2], s.mass[sl], s.vel[sl], remap)
        remap[self._dirichlet_masks[f.index]] = 0.0
        vel_i = np.zeros_like(remap)
        vel_i[alive] = remap[alive] / nd.mass[alive, None]

        d = self.grid.dim
        l_p = np.empty((f.n_points, d * d))
        k.gather_velocity_gradient(table[0], table[1], table[3], vel_i, l_p)
        self._material_update(f, l_p)

    def _material_update(self, f, l_p):
        s = self.state
        dt = self.step_config.dt
        sl = slice(f.start, f.stop)
        mat = f.material
        if self.grid.dim == 1:
            det = 1.0 + l_p[:, 0] * dt
            s.def_grad[sl, 0] *= det
            dstrain = dt * l_p[:, :1]
            s.strain[sl] += dstrain
            s.stress[sl] = mat.stress_from_strain(s.strain[sl])
            s.psi[sl] = mat.energy_density(s.strain[sl], s.stress[sl])
        else:
            det = ((1.0 + l_p[:, 0] * dt) * (1.0 + l_p[:, 3] * dt)
                   - l_p[:, 1] * l_p[:, 2] * dt * dt)
            if isinstance(mat, NeoHookean):
                fg = s.def_grad[sl]
                axx = 1.0 + l_p[:, 0] * dt
                axy = l_p[:, 1] * dt
                ayx = l_p[:, 2] * dt
                ayy = 1.0 + l_p[:, 3] * dt
                new = np.empty_like(fg)
                new[:, 0] = axx * fg[:, 0] + axy * fg[:, 2]
                new[:, 1] = axx * fg[:, 1] + axy * fg[:, 3]
                new[:, 2] = ayx * fg[:, 0] + ayy * fg[:, 2]
                new[:, 3] = ayx * fg[:, 1] + ayy * fg[:, 3]
                s.def_grad[sl] = new
                sig, psi = mat.stress_energy(new, step=self.step_index,
                                             point_offset=f.start)
                s.stress[sl] = sig
                s.psi[sl] = psi
            else:
                dstrain = np.stack([
                    dt * l_p[:, 0],
                    dt * l_p[:, 3],
                    0.5 * dt * (l_p[:, 1] + l_p[:, 2]),
                ], axis=1)
                s.strain[sl] += dstrain
                s.stress[sl] = mat.stress_from_strain(s.strain[sl])
                s.psi[sl] = mat.energy_density(s.strain[sl], s.stress[sl])
        s.volume[sl] *= det

    # --- stepping --------------------------------------------------------

    def step(self):
        """Advance the model by one time step."""
        s = self.state
        g = self.grid
        t_new = self.time + self.step_config.dt
        bad = k.check_in_domain(s.x, g.x_min, g.x_max, g.dh)
        if bad >= 0:
            raise OutOfDomainError(
                f"point {bad} left the grid at step {self.step_index} "
                f"(position {s.x[bad].tolist()})")
        for nd in self.nodal:
            nd.reset()
        fext_cache = {}
        for f in self.fields:
            table, bc = self.build_table(f)
            self.tables[f.index] = table
            self.basis_classes[f.index] = bc
            fext_p = self.external_point_forces(f, t_new)
            fext_cache[f.index] = fext_p
            self.p2g(f, table, fext_p)
            nd = self.nodal[f.index]
            self.apply_dirichlet(f, (nd.momentum, nd.f_int, nd.f_ext))
        self.contact_step()
        for f in self.fields:
            if f.rigid:
                continue
            trial = self.advance_momentum(f)
            self.musl_g2p_update(f, self.tables[f.index], trial)
        self.step_index += 1
        self.time = t_new

    def sample_timeseries(self):
        """Append one (step, time, energies, contact) row to the history."""
        s = self.state
        row = {"step": self.step_index, "time_s": self.time}
        for f in self.fields:
            sl = slice(f.start, f.stop)
            kin = 0.5 * float(np.sum(s.mass[sl] * np.sum(s.vel[sl] ** 2, axis=1)))
            sto = float(np.sum(s.psi[sl] * s.volume[sl]))
            row[f"K_{f.name}"] = kin
            row[f"W_{f.name}"] = sto
            row[f"T_{f.name}"] = kin + sto
        for a, name in zip(range(self.grid.dim), ("x", "y")):
            row[f"contact_f{name}"] = float(self.contact_force[a])
        row["active_pairs"] = len(self.active_pairs)
        self.timeseries.append(row)
        return row

    def run(self, writer=None, on_step=None):
        """Run the configured number of steps, emitting outputs as we go."""
        if writer is not None:
            writer.start(self)
        self.sample_timeseries()
        for _ in range(self.step_config.n_steps):
            self.step()
            if (self.step_index % self.step_config.timeseries_every == 0
                    or self.step_index == self.step_config.n_steps):
                self.sample_timeseries()
            if writer is not None:
                writer.after_step(self)
            if on_step is not None:
                on_step(self)
        if writer is not None:
            writer.finish(self)
        return self.timeseries
