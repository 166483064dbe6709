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
Main stochosc controller: resolves a preset or config file into a manifest, runs it and writes the artifacts.
Every entry point returns a (result, exit_code) tuple.
"""
import os
import numpy as np
from prometheus_client import REGISTRY, generate_latest
from mdclogpy import Logger
from stochosc import config, exceptions, output, presets
from stochosc.ensemble import run_ensemble
from stochosc.phasespace import GridAxes, check_fock_resolution, ensemble_wigner, fock_density_matrix

# constants
EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
METRICS_FILE = os.environ.get("STOCHOSC_METRICS_FILE")

mdc_logger = Logger(name=__name__)
mdc_logger.mdclog_format_init(configmap_monitor=True)


def _log_build_exit(exception, exit_code):
    """
    helper method that logs the exception and returns a tuple of (str, int) as a command result
    """
    msg = repr(exception)
    mdc_logger.warning("Command failed, returning {0}: {1}".format(exit_code, msg))
    return msg, exit_code


def _try_func_return(func):
    """
    helper method that runs the function and returns a detailed command result if an exception is raised.
    """
    try:
        return func()
    except (exceptions.ConfigError, exceptions.PresetNotFound, exceptions.ParameterError) as exc:
        return _log_build_exit(exc, EXIT_VALIDATION)
    except (exceptions.StepSizeError, exceptions.EnsembleAborted, exceptions.ResolutionError, exceptions.OutputError, exceptions.EmptyEnsembleError) as exc:
        return _log_build_exit(exc, EXIT_RUNTIME)
    # let other types of unexpected exceptions blow up and log


def load_manifest(source, output_dir=None):
    """
    source is a preset name or the path of a config document
    """
    if source in presets.PRESETS:
        return presets.preset(source, output_dir)
    if not os.path.isfile(source):
        raise exceptions.PresetNotFound("{0!r} is neither a config file nor a preset; valid presets: {1}".format(
            source, ", ".join(presets.preset_names())))
    try:
        with open(source, "rb") as f:
            raw = f.read()
    except OSError as exc:
        raise exceptions.ConfigError("cannot read {0!r}: {1}".format(source, exc))
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise exceptions.ConfigError("not valid UTF-8 ({0})".format(exc.reason), line=raw.count(b"\n", 0, exc.start) + 1)
    return config.parse_config(text, output_dir)


def fock_axis(settings):
    return np.linspace(-settings["fock_extent"], settings["fock_extent"], settings["fock_points"])


def check_resolution(manifest):
    """
    raises ResolutionError if the Fock quadrature grid cannot resolve the requested basis functions
    """
    settings = manifest.settings
    if not manifest.wants("fock"):
        return
    for variant in manifest.variants:
        check_fock_resolution(fock_axis(settings), variant.config.level_params(settings["fock_basis_level"]), settings["fock_n_max"])


def run_manifest(manifest, threads=None):
    """
    Run every variant of manifest and reduce its snapshots to the requested grids and matrices.
    Returns a list of output.VariantResult in variant order.
    """
    settings = manifest.settings
    # fail before any trajectory is simulated
    check_resolution(manifest)
    grid = GridAxes.symmetric(settings["grid_extent"], settings["grid_points"])

    results = []
    for variant in manifest.variants:
        mdc_logger.debug("running variant {0} (seed {1})".format(variant.label, variant.config.master_seed))
        acc = run_ensemble(variant.config, threads)
        result = output.VariantResult(variant, acc)
        if manifest.wants("wigner"):
            for time in settings["wigner_times"]:
                result.wigner[time] = ensemble_wigner(acc.snapshots[time], grid)
        if manifest.wants("fock"):
            basis = variant.config.level_params(settings["fock_basis_level"])
            for time in settings["fock_times"]:
                result.fock[time] = fock_density_matrix(acc.snapshots[time], basis, settings["fock_n_max"], fock_axis(settings))
        results.append(result)
    return results


def write_metrics(path):
    with open(path, "wb") as f:
        f.write(generate_latest(REGISTRY))


# Commands


def simulate(source, output_dir=None, seed=None, threads=None, dt=None, n_trajectories=None):
    """
    Handles `simulate`; the result is the list of written files
    """

    def run():
        manifest = config.with_overrides(load_manifest(source, output_dir), output_dir, master_seed=seed, dt=dt, n_trajectories=n_trajectories)
        check_resolution(manifest)
        output.preflight(manifest.output_dir)
        results = run_manifest(manifest, threads)
        paths = output.write_outputs(manifest, results)
        if METRICS_FILE:
            write_metrics(METRICS_FILE)
        return paths, EXIT_OK

    return _try_func_return(run)


def validate(source, output_dir=None):
    """
    Handles `validate`; the result is the manifest
    """
    return _try_func_return(lambda: (load_manifest(source, output_dir), EXIT_OK))


def list_presets():
    """
    Handles `presets`; the result is a list of (name, description)
    """
    return [(name, p.description) for name, p in presets.PRESETS.items()], EXIT_OK
