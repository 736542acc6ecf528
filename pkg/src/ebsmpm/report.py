"""CSV emission: time series, particle snapshots, contact log, reports.

All files are UTF-8 CSV with a header row; floating-point values carry 17
significant digits so runs can be compared bit for bit.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.17g}"
    return value


SNAPSHOT_COLUMNS = ["step", "time_s", "field_id", "point_id", "is_boundary",
                    "x", "y", "vx", "vy", "sxx", "syy", "sxy", "volume", "mass"]

CONTACT_COLUMNS = ["step", "time_s", "pair_id", "slave_id", "master_id_1",
                   "master_id_2", "g_nor", "g_tan", "beta", "f_nor", "f_tan",
                   "stick_or_slip"]


class RunWriter:
    """Streams engine outputs into an output directory during a run."""

    def __init__(self, out_dir, snapshot_every=0, contact_log=False):
        self.out_dir = out_dir
        self.snapshot_every = snapshot_every
        self.contact_log = contact_log
        self._snap_file = None
        self._snap = None
        self._contact_file = None
        self._contact = None

    def start(self, engine):
        os.makedirs(self.out_dir, exist_ok=True)
        if self.snapshot_every is not None:
            self._snap_file = open(os.path.join(self.out_dir, "snapshots.csv"),
                                   "w", newline="", encoding="utf-8")
            self._snap = csv.writer(self._snap_file)
            self._snap.writerow(SNAPSHOT_COLUMNS)
            self.write_snapshot(engine)
        if self.contact_log:
            self._contact_file = open(os.path.join(self.out_dir, "contact_log.csv"),
                                      "w", newline="", encoding="utf-8")
            self._contact = csv.writer(self._contact_file)
            self._contact.writerow(CONTACT_COLUMNS)

    def write_snapshot(self, engine):
        s = engine.state
        dim = engine.grid.dim
        for p in range(s.n_points):
            x = s.x[p]
            v = s.vel[p]
            sig = s.stress[p]
            if dim == 1:
                row = [engine.step_index, engine.time, int(s.field_id[p]), p,
                       int(s.is_boundary[p]), x[0], 0.0, v[0], 0.0,
                       sig[0], 0.0, 0.0, s.volume[p], s.mass[p]]
            else:
                row = [engine.step_index, engine.time, int(s.field_id[p]), p,
                       int(s.is_boundary[p]), x[0], x[1], v[0], v[1],
                       sig[0], sig[1], sig[2], s.volume[p], s.mass[p]]
            self._snap.writerow([_fmt(v) for v in row])

    def after_step(self, engine):
        if (self._snap is not None and self.snapshot_every
                and engine.step_index % self.snapshot_every == 0):
            self.write_snapshot(engine)
        if self._contact is not None:
            for pair_id, (ci, pair, f_nor, f_tan, stick) in enumerate(engine.active_pairs):
                row = [engine.step_index, engine.time, pair_id, pair.slave,
                       pair.master_1, pair.master_2, pair.g_nor, pair.g_tan,
                       pair.beta, f_nor, f_tan, "stick" if stick else "slip"]
                self._contact.writerow([_fmt(v) for v in row])

    def finish(self, engine):
        if self._snap is not None and engine.step_index > 0:
            self.write_snapshot(engine)
        self.write_timeseries(engine)
        for f in (self._snap_file, self._contact_file):
            if f is not None:
                f.close()

    def write_timeseries(self, engine):
        rows = engine.timeseries
        if not rows:
            return
        path = os.path.join(self.out_dir, "timeseries.csv")
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            cols = list(rows[0].keys())
            writer.writerow(cols)
            for row in rows:
                writer.writerow([_fmt(row[c]) for c in cols])


@dataclass
class MetricRow:
    name: str
    value: float
    threshold: str
    passed: bool


def emit_report(out_dir, benchmark_name, metrics):
    """Write the benchmark report as CSV and readable text.

    ``metrics`` is a list of :class:`MetricRow`.  Returns True when every
    metric passed.
    """
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "report.csv")
    txt_path = os.path.join(out_dir, "report.txt")
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["benchmark", "metric", "value", "threshold", "pass"])
        for m in metrics:
            writer.writerow([benchmark_name, m.name, _fmt(float(m.value)),
                             m.threshold, "pass" if m.passed else "fail"])
    all_pass = all(m.passed for m in metrics)
    with open(txt_path, "w", encoding="utf-8") as fh:
        fh.write(f"benchmark: {benchmark_name}\n")
        width = max((len(m.name) for m in metrics), default=10)
        for m in metrics:
            status = "PASS" if m.passed else "FAIL"
            fh.write(f"  {m.name:<{width}}  {m.value:< 14.6g}  "
                     f"(require {m.threshold})  {status}\n")
        fh.write(f"overall: {'PASS' if all_pass else 'FAIL'}\n")
    return all_pass


def write_basis_dump(path, engine, field_index=0):
    """Dump per-node basis classes and extension weights for one field.

    Columns: node_id, class, partner_id, weight.  Stable and exterior nodes
    appear once with an empty partner; each degenerated node gets one row
    per member of its stable block.
    """
    from .grid import BASIS_LABEL_NAMES, BASIS_DEGENERATED

    f = engine.fields[field_index]
    bc = engine.classify_field(f)
    grid = engine.grid
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node_id", "class", "partner_id", "weight"])
        for node in range(grid.n_nodes_total):
            lab = bc.label[node]
            if lab == BASIS_DEGENERATED:
                row = bc.node_to_deg[node]
                start = bc.deg_block_start[row]
                k = 0
                if grid.dim == 1:
                    for ox in range(3):
                        writer.writerow([node, "degenerated", int(start[0]) + ox,
                                         _fmt(float(bc.deg_weights[row, k]))])
                        k += 1
                else:
                    nby = int(grid.n_bases[1])
                    for ox in range(3):
                        for oy in range(3):
                            partner = (int(start[0]) + ox) * nby + (int(start[1]) + oy)
                            writer.writerow([node, "degenerated", partner,
                                             _fmt(float(bc.deg_weights[row, k]))])
                            k += 1
            else:
                writer.writerow([node, BASIS_LABEL_NAMES[lab], "", ""])
