"""
qualitative behaviour of the two jump models on the standard run, at a reduced ensemble size
"""
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
import numpy as np
import pytest
from stochosc import config, presets
from stochosc.ensemble import ensemble_observables, run_ensemble
from stochosc.gaussian import classical_turning_point
from stochosc.phasespace import GridAxes, ensemble_wigner, fock_density_matrix

N_TRAJECTORIES = 4000

pytestmark = pytest.mark.slow


def _variants(name):
    manifest = config.with_overrides(presets.preset(name), n_trajectories=N_TRAJECTORIES)
    return {v.label: v for v in manifest.variants}, manifest


@pytest.fixture(scope="module")
def standard_runs():
    """
    constant and overlap ensembles of the paper preset, with snapshots
    """
    variants, manifest = _variants("paper")
    return {label: (v.config, run_ensemble(v.config, threads=1)) for label, v in variants.items()}, manifest


def test_energy_separation(standard_runs):
    runs, _ = standard_runs
    constant = ensemble_observables(runs["constant"][1])
    overlap = ensemble_observables(runs["overlap"][1])
    assert constant["energy"][0] == pytest.approx(1.3525)
    assert overlap["energy"][0] == pytest.approx(1.3525)
    assert constant["energy"][-1] > 3 * overlap["energy"][-1]
    assert constant["energy"][-1] > 10 * constant["energy"][0]

    window = (constant["time"] >= 5.0) & (constant["time"] <= 30.0)
    t, log_energy = constant["time"][window], np.log(constant["energy"][window])
    slope, intercept = np.polyfit(t, log_energy, 1)
    residual = log_energy - (slope * t + intercept)
    r_squared = 1 - np.sum(residual ** 2) / np.sum((log_energy - log_energy.mean()) ** 2)
    assert slope > 0
    assert r_squared > 0.95


def test_overlap_jumps_happen_near_the_centre(standard_runs):
    runs, _ = standard_runs
    for direction in ((1, 2), (2, 1)):
        fractions = {}
        for label, (simulation, acc) in runs.items():
            turning = classical_turning_point(1.3525, simulation.level_params(direction[0]))
            positions = acc.jump_positions[direction]
            assert len(positions) > 0
            fractions[label] = np.mean(np.abs(positions) < turning / 2)
        assert fractions["overlap"] > fractions["constant"]


def test_decoherence(standard_runs):
    runs, _ = standard_runs
    observables = ensemble_observables(runs["overlap"][1])
    coherence, time = observables["coherence"], observables["time"]
    start = coherence[0]
    assert start > 0
    assert coherence[np.searchsorted(time, 5.0)] < 0.1 * start
    assert coherence[np.searchsorted(time, 10.0)] < 0.05 * start


def test_fock_populations_fall_off_with_a_non_thermal_low_end(standard_runs):
    runs, manifest = standard_runs
    simulation, acc = runs["overlap"]
    settings = manifest.settings
    axis = np.linspace(-settings["fock_extent"], settings["fock_extent"], settings["fock_points"])
    matrix = fock_density_matrix(acc.snapshots[30.0], simulation.level_params(1), settings["fock_n_max"], axis)
    populations = matrix.populations
    n = np.arange(5, 21)
    slope, intercept = np.polyfit(n, np.log(populations[5:21]), 1)
    assert slope < 0
    # the ground level is depleted relative to its neighbour and the low end leaves the exponential tail
    assert populations[0] < populations[1]
    assert populations[1] > populations[2]
    assert abs(np.log(populations[0]) - intercept) > 0.5


def test_wigner_ring(standard_runs):
    runs, manifest = standard_runs
    settings = manifest.settings
    grid = ensemble_wigner(runs["overlap"][1].snapshots[30.0], GridAxes.symmetric(settings["grid_extent"], settings["grid_points"]))
    centre = len(grid.x_axis) // 2
    assert grid.values[centre, centre] < 0.8 * grid.values.max()


def test_p_squeezing_costs_energy(standard_runs):
    runs, _ = standard_runs
    variants, _ = _variants("fig11")
    squeezed = ensemble_observables(run_ensemble(variants["p_squeezed_overlap"].config, threads=1))
    standard = ensemble_observables(runs["overlap"][1])
    assert squeezed["energy"][-1] > standard["energy"][-1]
