"""Scenario configuration: parsing, validation, presets and model build.

A scenario is a YAML document with blocks mirroring the engine setup::

    grid:    {x_min: [...], x_max: [...], dh: ...}
    basis:   {mode: ebs|obs, cc: ...}
    step:    {dt: ..., n_steps: ..., timeseries_every: ...}   # dt optional
    gravity: {vector: [...], ramp_time: ...}
    fields:  [{name, geometry, points_per_cell, boundary_segments,
               material, initial_velocity, rigid, springs, tractions,
               dirichlet, body_force}, ...]
    contact: [{master, slave, friction, omega_nor, omega_tan}, ...]
    output:  {snapshot_every, timeseries_every, contact_log}

Validation collects every problem with its document path before raising.
When ``dt`` is omitted it is derived as ``0.1 * dh / c0`` from the stiffest
deformable material.  Benchmark presets are code-defined documents in the
same schema, reproducible by name with keyword overrides.
"""

from __future__ import annotations

import copy
import math

import numpy as np
import yaml

from .errors import ConfigurationError, ScenarioValidationError
from .materials import LinearElastic, NeoHookean, young_from_lame
from .solver import (BodyForceLoad, DirichletSpec, Engine, FieldLoads, Region,
                     SpringSupport, StepConfig, TractionLoad, critical_dt,
                     penalty_defaults)
from .state import (Annulus, BoundaryChain, DemiDisk, DiscreteField, Disk,
                    ParticleState, Rectangle, Segment1D, Union, seed_field)
from .grid import EulerianGrid

_GEOMETRY_KEYS = {
    "segment": {"a", "b"},
    "rectangle": {"x0", "y0", "x1", "y1"},
    "disk": {"cx", "cy", "r"},
    "annulus": {"cx", "cy", "r_in", "r_out"},
    "demi_disk": {"cx", "cy", "r", "flat"},
    "union": {"parts"},
}

_TOP_KEYS = {"grid", "basis", "step", "gravity", "fields", "contact", "output"}
_FIELD_KEYS = {"name", "geometry", "points_per_cell", "boundary_segments",
               "material", "initial_velocity", "rigid", "springs", "tractions",
               "dirichlet", "body_force", "seeding"}
_PREFERRED_CC = (0.4, 0.8)


def _require(doc, key, path, errors, types=None):
    if not isinstance(doc, dict) or key not in doc:
        errors.append(f"{path}.{key}: required key missing")
        return None
    val = doc[key]
    if types is not None and not isinstance(val, types):
        errors.append(f"{path}.{key}: expected {types}, got {type(val).__name__}")
        return None
    return val


def _check_unknown(doc, allowed, path, errors):
    if isinstance(doc, dict):
        for key in doc:
            if key not in allowed:
                errors.append(f"{path}.{key}: unknown key")


def _geometry_from_dict(doc, path, errors):
    if not isinstance(doc, dict) or "kind" not in doc:
        errors.append(f"{path}: geometry block with 'kind' required")
        return None
    kind = doc["kind"]
    if kind not in _GEOMETRY_KEYS:
        errors.append(f"{path}.kind: unsupported geometry {kind!r}")
        return None
    _check_unknown(doc, _GEOMETRY_KEYS[kind] | {"kind"}, path, errors)
    try:
        if kind == "segment":
            return Segment1D(float(doc["a"]), float(doc["b"]))
        if kind == "rectangle":
            return Rectangle(float(doc["x0"]), float(doc["y0"]),
                             float(doc["x1"]), float(doc["y1"]))
        if kind == "disk":
            return Disk(float(doc["cx"]), float(doc["cy"]), float(doc["r"]))
        if kind == "annulus":
            return Annulus(float(doc["cx"]), float(doc["cy"]),
                           float(doc["r_in"]), float(doc["r_out"]))
        if kind == "demi_disk":
            return DemiDisk(float(doc["cx"]), float(doc["cy"]), float(doc["r"]),
                            str(doc.get("flat", "top")))
        parts = [_geometry_from_dict(p, f"{path}.parts[{i}]", errors)
                 for i, p in enumerate(doc["parts"])]
        if any(p is None for p in parts):
            return None
        return Union(parts)
    except (KeyError, TypeError, ValueError) as exc:
        errors.append(f"{path}: bad geometry parameters ({exc})")
        return None


def _material_from_dict(doc, dim, path, errors):
    if not isinstance(doc, dict) or "kind" not in doc:
        errors.append(f"{path}: material block with 'kind' required")
        return None
    kind = doc["kind"]
    try:
        if kind == "linear":
            _check_unknown(doc, {"kind", "E", "nu", "rho", "mode"}, path, errors)
            mode = doc.get("mode", "bar" if dim == 1 else "plane_strain")
            return LinearElastic(e=float(doc["E"]), nu=float(doc["nu"]),
                                 rho=float(doc["rho"]), mode=mode)
        if kind == "neo_hookean":
            _check_unknown(doc, {"kind", "mu", "lam", "rho"}, path, errors)
            if dim != 2:
                errors.append(f"{path}: neo_hookean requires a 2D grid")
                return None
            return NeoHookean(mu=float(doc["mu"]), lam=float(doc["lam"]),
                              rho=float(doc["rho"]))
        errors.append(f"{path}.kind: unsupported material {kind!r}")
    except KeyError as exc:
        errors.append(f"{path}: missing material parameter {exc}")
    except (TypeError, ValueError, ConfigurationError) as exc:
        errors.append(f"{path}: {exc}")
    return None


def _region_from_dict(doc, path, errors):
    if doc is None:
        return Region()
    if not isinstance(doc, dict):
        errors.append(f"{path}: region must be a mapping with lo/hi")
        return Region()
    _check_unknown(doc, {"lo", "hi"}, path, errors)
    return Region(lo=doc.get("lo"), hi=doc.get("hi"))


class Scenario:
    """Validated scenario document plus the build recipe for an engine."""

    def __init__(self, doc, warnings):
        self.doc = doc
        self.warnings = warnings

    # -- access helpers used by the CLI and benchmarks -------------------

    @property
    def dh(self):
        return float(self.doc["grid"]["dh"])

    @property
    def basis_mode(self):
        return self.doc.get("basis", {}).get("mode", "ebs")

    def to_dict(self):
        return copy.deepcopy(self.doc)

    def to_yaml(self):
        return yaml.safe_dump(self.to_dict(), sort_keys=False)

    def with_overrides(self, steps=None, dh=None, basis=None, cc=None,
                       snapshot_every=None):
        """CLI-level overrides; returns a revalidated scenario."""
        doc = self.to_dict()
        if steps is not None:
            doc["step"]["n_steps"] = int(steps)
        if dh is not None:
            doc["grid"]["dh"] = float(dh)
            doc["step"].pop("dt", None)  # re-derive a stable dt
        if basis is not None:
            doc.setdefault("basis", {})["mode"] = basis
        if cc is not None:
            doc.setdefault("basis", {})["cc"] = float(cc)
        if snapshot_every is not None:
            doc.setdefault("output", {})["snapshot_every"] = int(snapshot_every)
        return parse_scenario_dict(doc)

    # -- model assembly ---------------------------------------------------

    def build(self) -> Engine:
        doc = self.doc
        errors = []
        g = doc["grid"]
        grid = EulerianGrid(g["x_min"], g["x_max"], g["dh"])
        dim = grid.dim
        basis = doc.get("basis", {})
        fields_doc = doc["fields"]

        geoms, materials = [], []
        for i, fd in enumerate(fields_doc):
            geoms.append(_geometry_from_dict(fd["geometry"], f"fields[{i}].geometry", errors))
            materials.append(_material_from_dict(fd["material"], dim,
                                                 f"fields[{i}].material", errors))
        if errors:
            raise ScenarioValidationError(errors)
        for i, geom in enumerate(geoms):
            is_1d = isinstance(geom, Segment1D)
            if is_1d != (dim == 1):
                errors.append(f"fields[{i}].geometry: dimension does not match the grid")
        if errors:
            raise ScenarioValidationError(errors)

        seeded = [seed_field(geom, int(fd["points_per_cell"]),
                             int(fd["boundary_segments"]), grid.dh,
                             grid_origin=grid.x_min,
                             volume_mode=fd.get("seeding", "equal"))
                  for geom, fd in zip(geoms, fields_doc)]
        n_total = sum(s.bulk_x.shape[0] + s.boundary_x.shape[0] for s in seeded)
        state = ParticleState(dim, n_total)
        fields = []
        loads = {}
        cursor = 0
        for i, (fd, sd, mat) in enumerate(zip(fields_doc, seeded, materials)):
            nb = sd.bulk_x.shape[0]
            nn = sd.boundary_x.shape[0]
            start, stop = cursor, cursor + nb + nn
            sl_bulk = slice(start, start + nb)
            sl_bnd = slice(start + nb, stop)
            state.x[sl_bulk] = sd.bulk_x
            state.x[sl_bnd] = sd.boundary_x
            state.volume[sl_bulk] = sd.bulk_volume
            state.volume[sl_bnd] = sd.boundary_volume
            state.is_boundary[sl_bnd] = True
            state.field_id[start:stop] = i
            rigid = bool(fd.get("rigid", False))
            v0 = fd.get("initial_velocity")
            if v0 is not None and not rigid:
                state.vel[start:stop] = np.asarray(v0, dtype=np.float64)
            state.mass[start:stop] = mat.rho * state.volume[start:stop]
            chains = [BoundaryChain(point_ids=np.arange(start + nb + a, start + nb + b),
                                    closed=closed)
                      for (a, b, closed) in sd.chain_slices]
            f = DiscreteField(name=fd["name"], index=i, start=start, stop=stop,
                              material=mat, rigid=rigid, chains=chains,
                              boundary_ids=np.arange(start + nb, stop),
                              boundary_normals_1d=sd.boundary_normals_1d)
            fields.append(f)
            loads[i] = self._field_loads(fd, f, state, errors, i)
            cursor = stop
        state.x0[:] = state.x

        contact_configs = self._contact_configs(doc.get("contact", []), fields,
                                                grid.dh, errors)
        if errors:
            raise ScenarioValidationError(errors)

        step_doc = doc["step"]
        deformable_mats = [f.material for f in fields if not f.rigid]
        dt = step_doc.get("dt")
        cfl_factor = float(step_doc.get("cfl_factor", 0.1))
        if dt is None:
            if not deformable_mats:
                raise ScenarioValidationError(
                    ["step.dt: required when every field is rigid"])
            dt = cfl_factor * critical_dt(grid.dh, deformable_mats)
        gravity = doc.get("gravity", {})
        step = StepConfig(dt=float(dt), n_steps=int(step_doc["n_steps"]),
                          c_c=float(basis.get("cc", 0.75)),
                          basis=basis.get("mode", "ebs"),
                          gravity=gravity.get("vector"),
                          gravity_ramp=float(gravity.get("ramp_time", 0.0)),
                          cfl_factor=cfl_factor,
                          timeseries_every=int(doc.get("output", {}).get("timeseries_every", 1)))
        engine = Engine(grid, state, fields, step, contact_configs, loads)
        # deformable fields only bound the stable time step
        if deformable_mats:
            bound = cfl_factor * critical_dt(grid.dh, deformable_mats)
            if step.dt > bound * (1.0 + 1e-6):
                raise ScenarioValidationError([
                    f"step.dt: {step.dt} violates the CFL bound {bound}"])
        return engine

    def _field_loads(self, fd, f, state, errors, i):
        loads = FieldLoads()
        for j, dd in enumerate(fd.get("dirichlet", []) or []):
            region = _region_from_dict(dd.get("region"), f"fields[{i}].dirichlet[{j}].region", errors)
            loads.dirichlet.append(DirichletSpec(region=region,
                                                 axes=tuple(dd.get("axes", list(range(state.dim))))))
        for j, td in enumerate(fd.get("tractions", []) or []):
            region = _region_from_dict(td.get("region"), f"fields[{i}].tractions[{j}].region", errors)
            loads.tractions.append(TractionLoad(
                region=region, total_force=td.get("total_force"),
                traction=td.get("traction"), ramp_time=float(td.get("ramp_time", 0.0))))
        for j, sd in enumerate(fd.get("springs", []) or []):
            pid = self._resolve_point(sd.get("attach"), f, state,
                                      f"fields[{i}].springs[{j}].attach", errors)
            if pid is not None:
                loads.springs.append(SpringSupport(point=pid,
                                                   stiffness=float(sd["stiffness"])))
        bf = fd.get("body_force")
        if bf:
            loads.body_force = BodyForceLoad(vector=bf["vector"],
                                             ramp_time=float(bf.get("ramp_time", 0.0)))
        return loads

    @staticmethod
    def _resolve_point(attach, f, state, path, errors):
        if not isinstance(attach, dict) or "kind" not in attach:
            errors.append(f"{path}: attach selector with 'kind' required")
            return None
        kind = attach["kind"]
        ids = f.boundary_ids
        if kind == "lowest_boundary":
            axis = int(attach.get("axis", 0))
            return int(ids[np.argmin(state.x[ids, axis])])
        if kind == "nearest_boundary":
            target = np.asarray(attach["x"], dtype=np.float64)
            return int(ids[np.argmin(np.sum((state.x[ids] - target) ** 2, axis=1))])
        errors.append(f"{path}.kind: unknown attach selector {kind!r}")
        return None

    @staticmethod
    def _contact_configs(docs, fields, dh, errors):
        from .contact import ContactPairConfig
        by_name = {f.name: f.index for f in fields}
        configs = []
        for j, cd in enumerate(docs or []):
            path = f"contact[{j}]"
            master = cd.get("master")
            slave = cd.get("slave")
            if master not in by_name or slave not in by_name:
                errors.append(f"{path}: unknown field reference "
                              f"{master!r} / {slave!r}")
                continue
            fm, fs = fields[by_name[master]], fields[by_name[slave]]

            def _e(mat):
                if isinstance(mat, NeoHookean):
                    return young_from_lame(mat.mu, mat.lam)[0]
                return mat.e

            w_def, _ = penalty_defaults(dh, _e(fm.material), _e(fs.material))
            w_nor = cd.get("omega_nor", "auto")
            w_tan = cd.get("omega_tan", "auto")
            configs.append(ContactPairConfig(
                master=by_name[master], slave=by_name[slave],
                omega_nor=w_def if w_nor == "auto" else float(w_nor),
                omega_tan=w_def if w_tan == "auto" else float(w_tan),
                friction=float(cd.get("friction", 0.0))))
        return configs


def parse_scenario_dict(doc) -> Scenario:
    """Validate a scenario document; raises with every problem found."""
    errors = []
    warnings = []
    if not isinstance(doc, dict) or not doc:
        raise ScenarioValidationError(
            [f"<root>.{k}: required block missing" for k in ("grid", "step", "fields")])
    _check_unknown(doc, _TOP_KEYS, "<root>", errors)

    grid = _require(doc, "grid", "<root>", errors, dict)
    if grid is not None:
        _check_unknown(grid, {"x_min", "x_max", "dh"}, "grid", errors)
        for key in ("x_min", "x_max", "dh"):
            _require(grid, key, "grid", errors)
        if not errors:
            try:
                EulerianGrid(grid["x_min"], grid["x_max"], grid["dh"])
            except ConfigurationError as exc:
                errors.append(f"grid: {exc}")

    step = _require(doc, "step", "<root>", errors, dict)
    if step is not None:
        _check_unknown(step, {"dt", "n_steps", "cfl_factor"}, "step", errors)
        n = _require(step, "n_steps", "step", errors)
        if n is not None and (not isinstance(n, int) or n < 0):
            errors.append("step.n_steps: must be a non-negative integer")

    basis = doc.get("basis", {})
    if basis:
        _check_unknown(basis, {"mode", "cc"}, "basis", errors)
        mode = basis.get("mode", "ebs")
        if mode not in ("obs", "ebs"):
            errors.append(f"basis.mode: must be 'obs' or 'ebs', got {mode!r}")
        cc = basis.get("cc", 0.75)
        if not (0.0 < cc <= 1.0):
            errors.append(f"basis.cc: occupation parameter must lie in (0, 1], got {cc}")
        elif not (_PREFERRED_CC[0] <= cc <= _PREFERRED_CC[1]):
            warnings.append(f"basis.cc: {cc} is outside the exercised range "
                            f"[{_PREFERRED_CC[0]}, {_PREFERRED_CC[1]}]")

    gravity = doc.get("gravity", {})
    if gravity:
        _check_unknown(gravity, {"vector", "ramp_time"}, "gravity", errors)

    fields = _require(doc, "fields", "<root>", errors, list)
    names = set()
    if fields is not None:
        if not fields:
            errors.append("fields: at least one field is required")
        for i, fd in enumerate(fields):
            path = f"fields[{i}]"
            if not isinstance(fd, dict):
                errors.append(f"{path}: must be a mapping")
                continue
            _check_unknown(fd, _FIELD_KEYS, path, errors)
            name = _require(fd, "name", path, errors)
            if name in names:
                errors.append(f"{path}.name: duplicate field name {name!r}")
            names.add(name)
            for key in ("geometry", "points_per_cell", "boundary_segments", "material"):
                _require(fd, key, path, errors)
            if "geometry" in fd:
                _geometry_from_dict(fd["geometry"], f"{path}.geometry", errors)

    contact = doc.get("contact", [])
    for j, cd in enumerate(contact or []):
        path = f"contact[{j}]"
        _check_unknown(cd, {"master", "slave", "friction", "omega_nor", "omega_tan"},
                       path, errors)
        for key in ("master", "slave"):
            val = _require(cd, key, path, errors)
            if val is not None and fields and val not in names:
                errors.append(f"{path}.{key}: unknown field {val!r}")

    output = doc.get("output", {})
    if output:
        _check_unknown(output, {"snapshot_every", "timeseries_every", "contact_log"},
                       "output", errors)

    if errors:
        raise ScenarioValidationError(errors)
    return Scenario(copy.deepcopy(doc), warnings)


def parse_scenario(text: str) -> Scenario:
    """Parse a YAML scenario document."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioValidationError([f"<root>: invalid YAML ({exc})"])
    return parse_scenario_dict(doc)


# ---------------------------------------------------------------------
# benchmark presets
# ---------------------------------------------------------------------

BAR_E = 50.5e9
BAR_RHO = 2783.0
BAR_C0 = math.sqrt(BAR_E / BAR_RHO)


def two_bars_self_weight(offset=0.0, basis="ebs", cc=0.75, dh=0.1,
                         n_steps=16000, points_per_cell=4):
    """Two stacked bars compressed by ramped self weight (1D)."""
    dt = 2.34753e-6 if dh == 0.1 else None
    doc = {
        "grid": {"x_min": [0.0], "x_max": [1.0], "dh": dh},
        "basis": {"mode": basis, "cc": cc},
        "step": {"n_steps": n_steps, **({"dt": dt} if dt else {})},
        "gravity": {"vector": [-9.81], "ramp_time": 12000 * (dt or 0.1 * dh / BAR_C0)},
        "fields": [
            {"name": "master_bar",
             "geometry": {"kind": "segment", "a": 0.2 + offset, "b": 0.5 + offset},
             "points_per_cell": points_per_cell, "boundary_segments": 2,
             "seeding": "gauss",
             "material": {"kind": "linear", "E": BAR_E, "nu": 0.0, "rho": BAR_RHO,
                          "mode": "bar"},
             "springs": [{"attach": {"kind": "lowest_boundary"}, "stiffness": 65.0e9}]},
            {"name": "slave_bar",
             "geometry": {"kind": "segment", "a": 0.5 + offset, "b": 0.8 + offset},
             "points_per_cell": points_per_cell, "boundary_segments": 2,
             "seeding": "gauss",
             "material": {"kind": "linear", "E": BAR_E, "nu": 0.0, "rho": BAR_RHO,
                          "mode": "bar"}},
        ],
        "contact": [{"master": "master_bar", "slave": "slave_bar",
                     "omega_nor": BAR_E / dh, "omega_tan": BAR_E / dh,
                     "friction": 0.0}],
        "output": {"timeseries_every": 200},
    }
    return doc


def two_bars_impact(dh=6.25e-3, basis="ebs", cc=0.75, v0=1.0, t_end=3.0e-4,
                    points_per_cell=4):
    """Longitudinal impact of a moving bar (0.2 m) on a resting bar (0.4 m)."""
    dt = 0.1 * dh / BAR_C0
    return {
        "grid": {"x_min": [0.0], "x_max": [1.0], "dh": dh},
        "basis": {"mode": basis, "cc": cc},
        "step": {"n_steps": int(math.ceil(t_end / dt))},
        "fields": [
            {"name": "striker",
             "geometry": {"kind": "segment", "a": 0.1, "b": 0.3},
             "points_per_cell": points_per_cell, "boundary_segments": 2,
             "seeding": "gauss",
             "material": {"kind": "linear", "E": BAR_E, "nu": 0.0, "rho": BAR_RHO,
                          "mode": "bar"},
             "initial_velocity": [v0]},
            {"name": "target",
             "geometry": {"kind": "segment", "a": 0.3, "b": 0.7},
             "points_per_cell": points_per_cell, "boundary_segments": 2,
             "seeding": "gauss",
             "material": {"kind": "linear", "E": BAR_E, "nu": 0.0, "rho": BAR_RHO,
                          "mode": "bar"}},
        ],
        "contact": [{"master": "target", "slave": "striker",
                     "omega_nor": BAR_E / dh, "omega_tan": BAR_E / dh,
                     "friction": 0.0}],
        "output": {"timeseries_every": 1},
    }


HERTZ_DISK_R = 0.01
HERTZ_DISK_E = 9.453e10
HERTZ_DISK_NU = 0.07
HERTZ_DISK_RHO = 1900.0
HERTZ_DISK_FMAX = 6.0e7     # N per unit length at the end of the ramp
HERTZ_DISK_RAMP = 4.0e-4


def hertz_disks(dh=HERTZ_DISK_R / 20, basis="ebs", cc=0.5, segments=100,
                f_max=HERTZ_DISK_FMAX, t_end=HERTZ_DISK_RAMP,
                points_per_cell=16):
    """Two elastic disks pressed together by ramped body forces."""
    r = HERTZ_DISK_R
    mass = HERTZ_DISK_RHO * math.pi * r * r
    accel = f_max / mass
    dt = 0.1 * dh / math.sqrt(HERTZ_DISK_E / HERTZ_DISK_RHO)
    material = {"kind": "linear", "E": HERTZ_DISK_E, "nu": HERTZ_DISK_NU,
                "rho": HERTZ_DISK_RHO}
    return {
        "grid": {"x_min": [-0.025, -0.0125], "x_max": [0.025, 0.0125], "dh": dh},
        "basis": {"mode": basis, "cc": cc},
        "step": {"n_steps": int(math.ceil(t_end / dt))},
        "fields": [
            {"name": "left_disk",
             "geometry": {"kind": "disk", "cx": -r, "cy": 0.0, "r": r},
             "points_per_cell": points_per_cell, "boundary_segments": segments,
             "seeding": "gauss",
             "material": dict(material),
             "body_force": {"vector": [accel, 0.0], "ramp_time": t_end}},
            {"name": "right_disk",
             "geometry": {"kind": "disk", "cx": r, "cy": 0.0, "r": r},
             "points_per_cell": points_per_cell, "boundary_segments": segments,
             "seeding": "gauss",
             "material": dict(material),
             "body_force": {"vector": [-accel, 0.0], "ramp_time": t_end}},
        ],
        "contact": [{"master": "left_disk", "slave": "right_disk",
                     "friction": 0.0}],
        "output": {"timeseries_every": 200},
    }


HERTZ_PLANE_R = 0.002
HERTZ_PLANE_E = 1.0e10
HERTZ_PLANE_F = 1.567e5    # N per unit length, total on the flat top
HERTZ_PLANE_RHO = 2000.0


def hertz_halfplane(dh=2.0e-4, basis="ebs", cc=0.5, segments=240,
                    f_total=HERTZ_PLANE_F, t_end=175.0e-6, points_per_cell=16):
    """Demi-disk pressed onto a rigid plane by a ramped surface load."""
    r = HERTZ_PLANE_R
    dt = 0.1 * dh / math.sqrt(HERTZ_PLANE_E / HERTZ_PLANE_RHO)
    return {
        "grid": {"x_min": [-0.005, -0.002], "x_max": [0.005, 0.004], "dh": dh},
        "basis": {"mode": basis, "cc": cc},
        "step": {"n_steps": int(math.ceil(t_end / dt))},
        "fields": [
            {"name": "plane",
             "geometry": {"kind": "rectangle", "x0": -0.004, "y0": -0.0008,
                          "x1": 0.004, "y1": 0.0},
             "points_per_cell": points_per_cell, "boundary_segments": 160,
             "seeding": "gauss",
             "material": {"kind": "linear", "E": HERTZ_PLANE_E, "nu": 0.0,
                          "rho": HERTZ_PLANE_RHO},
             "rigid": True},
            {"name": "demi_disk",
             "geometry": {"kind": "demi_disk", "cx": 0.0, "cy": r, "r": r,
                          "flat": "top"},
             "points_per_cell": points_per_cell, "boundary_segments": segments,
             "seeding": "gauss",
             "material": {"kind": "linear", "E": HERTZ_PLANE_E, "nu": 0.0,
                          "rho": HERTZ_PLANE_RHO},
             "tractions": [{"region": {"lo": [None, r * (1 - 1e-9)]},
                            "total_force": [0.0, -f_total],
                            "ramp_time": t_end}]},
        ],
        "contact": [{"master": "plane", "slave": "demi_disk", "friction": 0.0,
                     "omega_nor": HERTZ_PLANE_E / dh,
                     "omega_tan": HERTZ_PLANE_E / dh}],
        "output": {"timeseries_every": 200},
    }


RING_MU = 26.1e6
RING_LAM = 104.4e6
RING_RHO = 1010.0
RING_V0 = 0.03e-3 / 1.0e-6   # 0.03 mm/us in m/s


def neo_hookean_rings(dh=1.25e-3, basis="ebs", cc=0.5, v0=RING_V0,
                      t_end=4.0e-3, points_per_cell=16, segments=260):
    """Impact and rebound of two hollow Neo-Hookean cylinders."""
    material = {"kind": "neo_hookean", "mu": RING_MU, "lam": RING_LAM,
                "rho": RING_RHO}
    e_eff, _ = young_from_lame(RING_MU, RING_LAM)
    dt = 0.1 * dh / math.sqrt(e_eff / RING_RHO)
    return {
        "grid": {"x_min": [-0.05, 0.0], "x_max": [0.35, 0.15], "dh": dh},
        "basis": {"mode": basis, "cc": cc},
        "step": {"n_steps": int(math.ceil(t_end / dt))},
        "fields": [
            {"name": "left_ring",
             "geometry": {"kind": "annulus", "cx": 0.075, "cy": 0.075,
                          "r_in": 0.03, "r_out": 0.04},
             "points_per_cell": points_per_cell, "boundary_segments": segments,
             "seeding": "gauss",
             "material": dict(material), "initial_velocity": [v0, 0.0]},
            {"name": "right_ring",
             "geometry": {"kind": "annulus", "cx": 0.225, "cy": 0.075,
                          "r_in": 0.03, "r_out": 0.04},
             "points_per_cell": points_per_cell, "boundary_segments": segments,
             "seeding": "gauss",
             "material": dict(material), "initial_velocity": [-v0, 0.0]},
        ],
        "contact": [{"master": "left_ring", "slave": "right_ring",
                     "friction": 0.0}],
        "output": {"timeseries_every": 20},
    }


GRANULAR_DISK = {"kind": "linear", "E": 174857.14e6, "nu": 0.214, "rho": 1900.0}
GRANULAR_IMPACTOR = {"kind": "linear", "E": 17485.71e6, "nu": 0.214, "rho": 190000.0}
GRANULAR_V0 = 0.0056e-3 / 1.0e-6   # 0.0056 mm/us in m/s
GRANULAR_R = 0.02


def granular_impact_line(dh=5.0e-3, basis="ebs", cc=0.8, t_end=2.0e-4,
                         points_per_cell=16, segments=72):
    """Striker hitting a row of four collinear disks (all pairs frictionless)."""
    r = GRANULAR_R
    fields = [{
        "name": "striker",
        "geometry": {"kind": "rectangle", "x0": 0.02, "y0": 0.03, "x1": 0.06,
                     "y1": 0.07},
        "points_per_cell": points_per_cell, "boundary_segments": 64,
        "seeding": "gauss",
        "material": dict(GRANULAR_IMPACTOR),
        "initial_velocity": [GRANULAR_V0, 0.0],
    }]
    for k in range(4):
        fields.append({
            "name": f"disk{k + 1}",
            "geometry": {"kind": "disk", "cx": 0.08 + 2 * r * k, "cy": 0.05, "r": r},
            "points_per_cell": points_per_cell, "boundary_segments": segments,
            "seeding": "gauss",
            "material": dict(GRANULAR_DISK),
        })
    names = [f["name"] for f in fields]
    contact = [{"master": names[i], "slave": names[j], "friction": 0.0}
               for i in range(len(names)) for j in range(i + 1, len(names))]
    return {
        "grid": {"x_min": [0.0, 0.0], "x_max": [0.3, 0.1], "dh": dh},
        "basis": {"mode": basis, "cc": cc},
        "step": {"n_steps": int(math.ceil(
            t_end / (0.1 * dh / math.sqrt(GRANULAR_DISK["E"] / GRANULAR_DISK["rho"]))))},
        "fields": fields,
        "contact": contact,
        "output": {"timeseries_every": 10},
    }


def granular_impact_pile(dh=5.0e-3, basis="ebs", cc=0.8, t_end=2.0e-4,
                         points_per_cell=16, segments=72, friction=0.5):
    """Five disks packed at 45 degrees in a rigid enclosure, hit from the right."""
    r = GRANULAR_R
    s = 2.0 * r / math.sqrt(2.0)   # 45-degree contact offset
    bottoms = [(0.06, 0.04), (0.06 + 2 * s, 0.04), (0.06 + 4 * s, 0.04)]
    tops = [(0.06 + s, 0.04 + s), (0.06 + 3 * s, 0.04 + s)]
    fields = []
    for k, (cx, cy) in enumerate(bottoms + tops):
        fields.append({
            "name": f"disk{k + 1}",
            "geometry": {"kind": "disk", "cx": cx, "cy": cy, "r": r},
            "points_per_cell": points_per_cell, "boundary_segments": segments,
            "seeding": "gauss",
            "material": dict(GRANULAR_DISK),
        })
    x3 = bottoms[2][0] + r
    fields.append({
        "name": "impactor",
        "geometry": {"kind": "rectangle", "x0": x3, "y0": 0.02, "x1": x3 + 0.04,
                     "y1": 0.06},
        "points_per_cell": points_per_cell, "boundary_segments": 64,
        "seeding": "gauss",
        "material": dict(GRANULAR_IMPACTOR),
        "initial_velocity": [-GRANULAR_V0, 0.0],
    })
    fields.append({
        "name": "floor",
        "geometry": {"kind": "rectangle", "x0": 0.0, "y0": 0.01, "x1": 0.28,
                     "y1": 0.02},
        "points_per_cell": points_per_cell, "boundary_segments": 120,
        "seeding": "gauss",
        "material": dict(GRANULAR_DISK), "rigid": True,
    })
    fields.append({
        "name": "back_wall",
        "geometry": {"kind": "rectangle", "x0": 0.03, "y0": 0.02, "x1": 0.04,
                     "y1": 0.09},
        "points_per_cell": points_per_cell, "boundary_segments": 64,
        "seeding": "gauss",
        "material": dict(GRANULAR_DISK), "rigid": True,
    })
    disk_names = [f"disk{k + 1}" for k in range(5)]
    contact = [{"master": disk_names[i], "slave": disk_names[j], "friction": friction}
               for i in range(5) for j in range(i + 1, 5)]
    contact.append({"master": "disk3", "slave": "impactor", "friction": friction})
    for name in disk_names:
        contact.append({"master": "floor", "slave": name, "friction": 0.0})
    contact.append({"master": "back_wall", "slave": "disk1", "friction": 0.0})
    contact.append({"master": "floor", "slave": "impactor", "friction": 0.0})
    return {
        "grid": {"x_min": [0.0, 0.0], "x_max": [0.3, 0.12], "dh": dh},
        "basis": {"mode": basis, "cc": cc},
        "step": {"n_steps": int(math.ceil(
            t_end / (0.1 * dh / math.sqrt(GRANULAR_DISK["E"] / GRANULAR_DISK["rho"]))))},
        "fields": fields,
        "contact": contact,
        "output": {"timeseries_every": 10},
    }


PRESETS = {
    "two_bars_self_weight": two_bars_self_weight,
    "two_bars_impact": two_bars_impact,
    "hertz_disks": hertz_disks,
    "hertz_halfplane": hertz_halfplane,
    "neo_hookean_rings": neo_hookean_rings,
    "granular_impact_line": granular_impact_line,
    "granular_impact_pile": granular_impact_pile,
}


def preset_scenario(name, **overrides) -> Scenario:
    """Build a named benchmark preset, applying keyword overrides."""
    if name not in PRESETS:
        raise ConfigurationError(
            f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}")
    return parse_scenario_dict(PRESETS[name](**overrides))
