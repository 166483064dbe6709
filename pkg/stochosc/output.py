# ==================================================================================
#       Copyright (c) 2026 The stochosc authors.
#
#   Licensed under the Apache License, Version 2.0 (the "License");
#   you may not use this file except in compliance with the License.
#   You may obtain a copy of the License at
#
#          http://www.apache.org/licenses/LICENSE-2.0
#
#   Unless required by applicable law or agreed to in writing, software
#   distributed under the License is distributed on an "AS IS" BASIS,
#   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
#   See the License for the specific language governing permissions and
#   limitations under the License.
# ==================================================================================
"""
Plain-text artifacts: CSV tables with a '#' comment header, JSON sidecars for grids,
and the echo of the effective configuration.
"""
import csv
import json
import os
from collections import OrderedDict, namedtuple
from dataclasses import dataclass, field
import numpy as np
from mdclogpy import Logger
from stochosc.config import FORMAT_VERSION, format_settings
from stochosc.ensemble import DIRECTIONS, ensemble_observables, jump_histogram
from stochosc.exceptions import OutputError
from stochosc.gaussian import classical_turning_point

mdc_logger = Logger(name=__name__)
mdc_logger.mdclog_format_init(configmap_monitor=True)

OBSERVABLE_COLUMNS = ("time", "mean_x", "mean_p", "var_x", "var_p", "energy", "coherence")
DIAGNOSTIC_COLUMNS = ("time", "cov_xp", "traj_var_x", "traj_var_p", "spread_mean_x")
EFFECTIVE_CONFIG = "effective.conf"

Table = namedtuple("Table", ["meta", "columns", "values"])


@dataclass(eq=False)
class VariantResult:
    """
    What one variant produced: its accumulator plus the grids and matrices computed from the snapshots,
    keyed by snapshot time.
    """

    variant: object
    accumulator: object
    wigner: dict = field(default_factory=dict)
    fock: dict = field(default_factory=dict)

    @property
    def observables(self):
        return ensemble_observables(self.accumulator)


def format_float(value):
    """17 significant digits; float(format_float(v)) == v"""
    return "%.17g" % value


def _cell(value):
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format_float(float(value))


def preflight(output_dir):
    """
    create output_dir if needed and make sure files can be written there; raises OutputError
    """
    try:
        os.makedirs(output_dir, exist_ok=True)
    except OSError as exc:
        raise OutputError("cannot create output directory {0!r}: {1}".format(output_dir, exc))
    if not os.path.isdir(output_dir) or not os.access(output_dir, os.W_OK):
        raise OutputError("output directory {0!r} is not writable".format(output_dir))


def _header(manifest, variant=None, **extra):
    meta = OrderedDict([("format_version", FORMAT_VERSION), ("master_seed", manifest.settings["master_seed"])])
    if variant is not None:
        meta["variant"] = variant.label
        meta["variant_seed"] = variant.config.master_seed
    meta.update(extra)
    return meta


def write_table(path, meta, columns, rows):
    """write a CSV with one '# key=value' line per meta entry before the header row"""
    try:
        with open(path, "w", newline="", encoding="utf-8") as f:
            for key, value in meta.items():
                f.write("# {0}={1}\n".format(key, value))
            writer = csv.writer(f)
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_cell(v) for v in row])
    except OSError as exc:
        raise OutputError("cannot write {0!r}: {1}".format(path, exc))
    mdc_logger.debug("wrote {0}".format(path))
    return path


def read_table(path):
    """
    Parse a file written by write_table. Returns Table(meta, columns, values) with values a float array
    (one row per data line). Not used by the run itself; it is the reader for plotting scripts and tests.
    """
    meta = OrderedDict()
    with open(path, newline="", encoding="utf-8") as f:
        lines = f.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            meta[key] = value
        else:
            body.append(line)
    rows = list(csv.reader(body))
    columns = tuple(rows[0])
    values = np.array([[float(v) for v in row] for row in rows[1:]], dtype=float).reshape(-1, len(columns))
    return Table(meta, columns, values)


def _time_tag(time):
    return "t{0:g}".format(time)


def _write_observables(manifest, result, out):
    observables = result.observables
    return write_table(
        os.path.join(out, "observables_{0}.csv".format(result.variant.label)),
        _header(manifest, result.variant),
        OBSERVABLE_COLUMNS,
        zip(*(observables[name] for name in OBSERVABLE_COLUMNS)),
    )


def _write_coherence(manifest, result, out):
    observables = result.observables
    return write_table(
        os.path.join(out, "coherence_{0}.csv".format(result.variant.label)),
        _header(manifest, result.variant),
        ("time", "coherence_x", "coherence_p"),
        zip(observables["time"], observables["coherence"], observables["coherence_p"]),
    )


def _write_diagnostics(manifest, result, out):
    observables = result.observables
    counts = result.accumulator.jump_counts
    extra = OrderedDict([
        ("trajectories", result.accumulator.count),
        ("jumps_12", result.accumulator.n_jumps((1, 2))),
        ("jumps_21", result.accumulator.n_jumps((2, 1))),
        ("mean_jumps_per_trajectory", format_float(float(np.mean(counts)))),
    ])
    return write_table(
        os.path.join(out, "diagnostics_{0}.csv".format(result.variant.label)),
        _header(manifest, result.variant, **extra),
        DIAGNOSTIC_COLUMNS,
        zip(*(observables[name] for name in DIAGNOSTIC_COLUMNS)),
    )


def _write_jumps(manifest, result, out):
    settings = manifest.settings
    config = result.variant.config
    initial_energy = float(result.observables["energy"][0])
    paths = []
    for direction in DIRECTIONS:
        histogram = jump_histogram(result.accumulator, direction, bins=settings["jump_bins"], extent=settings["jump_extent"] or None)
        turning = classical_turning_point(initial_energy, config.level_params(direction[0]))
        meta = _header(manifest, result.variant, direction="{0}->{1}".format(*direction),
                       jumps=result.accumulator.n_jumps(direction), turning_point=format_float(turning))
        paths.append(write_table(
            os.path.join(out, "jumps_{0}_{1}{2}.csv".format(result.variant.label, *direction)),
            meta,
            ("bin_left", "bin_right", "count"),
            zip(histogram.edges[:-1], histogram.edges[1:], histogram.counts),
        ))
    return paths


def _write_wigner(manifest, result, out, time, grid):
    base = os.path.join(out, "wigner_{0}_{1}".format(result.variant.label, _time_tag(time)))
    xs, ps = np.meshgrid(grid.x_axis, grid.p_axis, indexing="ij")
    csv_path = write_table(
        base + ".csv",
        _header(manifest, result.variant, time=format_float(time)),
        ("x", "p", "W"),
        zip(xs.ravel(), ps.ravel(), grid.values.ravel()),
    )
    sidecar = _header(manifest, result.variant, time=time)
    sidecar.update(grid.metadata)
    meta_path = base + ".meta.json"
    try:
        with open(meta_path, "w", encoding="utf-8") as f:
            json.dump(sidecar, f, indent=2)
    except OSError as exc:
        raise OutputError("cannot write {0!r}: {1}".format(meta_path, exc))
    mdc_logger.debug("wrote {0}".format(meta_path))
    return [csv_path, meta_path]


def _write_fock(manifest, result, out, time, matrix):
    base = os.path.join(out, "fock_{0}_{1}".format(result.variant.label, _time_tag(time)))
    meta = _header(manifest, result.variant, time=format_float(time), basis_omega=format_float(matrix.basis_omega),
                   n_max=matrix.n_max, leakage=format_float(matrix.leakage))
    size = matrix.n_max + 1
    rows, cols = np.indices((size, size))
    matrix_path = write_table(
        base + ".csv", meta, ("row", "col", "re", "im"),
        zip(rows.ravel(), cols.ravel(), matrix.values.real.ravel(), matrix.values.imag.ravel()),
    )
    populations = matrix.populations
    # quadrature noise can leave tiny negative populations; their log is floored
    logs = np.log(np.clip(populations, np.finfo(float).tiny, None))
    diag_path = write_table(base + "_diag.csv", meta, ("n", "population", "log_population"), zip(np.arange(size), populations, logs))
    return [matrix_path, diag_path]


def _write_energy(manifest, results, out):
    times = results[0].observables["time"]
    columns = ["time"] + ["energy_{0}".format(r.variant.label) for r in results]
    seeds = ",".join("{0}:{1}".format(r.variant.label, r.variant.config.master_seed) for r in results)
    return write_table(
        os.path.join(out, "energy.csv"),
        _header(manifest, variant_seeds=seeds),
        columns,
        zip(times, *(r.observables["energy"] for r in results)),
    )


def write_effective_config(manifest, out=None):
    path = os.path.join(out or manifest.output_dir, EFFECTIVE_CONFIG)
    try:
        with open(path, "w", encoding="utf-8") as f:
            f.write(format_settings(manifest.settings))
    except OSError as exc:
        raise OutputError("cannot write {0!r}: {1}".format(path, exc))
    return path


def write_outputs(manifest, results):
    """
    Write every artifact manifest asks for; returns the written paths in a fixed order.
    results is a list of VariantResult in manifest.variants order.
    """
    out = manifest.output_dir
    preflight(out)
    paths = [write_effective_config(manifest, out)]
    for result in results:
        if manifest.wants("observables"):
            paths.append(_write_observables(manifest, result, out))
        if manifest.wants("coherence"):
            paths.append(_write_coherence(manifest, result, out))
        if manifest.wants("diagnostics"):
            paths.append(_write_diagnostics(manifest, result, out))
        if manifest.wants("jumps"):
            paths.extend(_write_jumps(manifest, result, out))
        for time in sorted(result.wigner):
            paths.extend(_write_wigner(manifest, result, out, time, result.wigner[time]))
        for time in sorted(result.fock):
            paths.extend(_write_fock(manifest, result, out, time, result.fock[time]))
    if manifest.wants("observables") and len(results) > 1:
        paths.append(_write_energy(manifest, results, out))
    return paths
