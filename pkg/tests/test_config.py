"""
tests for config documents and presets
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
import pytest
from stochosc import config, presets
from stochosc.exceptions import ConfigError, PresetNotFound
from stochosc.gaussian import GaussianState
from stochosc.jumps import JumpKind


def test_empty_document_is_the_paper_preset():
    manifest = config.parse_config("")
    assert manifest == presets.preset("paper")
    assert [v.label for v in manifest.variants] == ["constant", "overlap"]
    first = manifest.config
    assert (first.omega1, first.omega2, first.nu, first.dt, first.sample_stride) == (0.7, 1.2, 0.8, 0.01, 10)
    assert first.n_trajectories == 30000
    assert first.snapshot_times == (0.0, 2.0, 4.0, 8.0, 30.0)
    assert manifest.format_version == config.FORMAT_VERSION


def test_minimal_document():
    manifest = config.parse_config("omega1 = 0.7\nomega2 = 1.2\nnu = 0.8  # base rate\nmodel = overlap\nn_trajectories = 100\n")
    assert len(manifest.variants) == 1
    variant = manifest.variants[0]
    assert variant.label == "overlap"
    assert variant.config.model is JumpKind.GROUND_OVERLAP
    assert variant.config.initial_state == GaussianState(2.0, 0.0, 0.5, 0.5, 0.0)
    assert variant.config.n_trajectories == 100


def test_step_size_rule():
    with pytest.raises(ConfigError) as excinfo:
        config.parse_config("nu = 0.8\ndt = 0.5\n")
    assert "nu*dt exceeds 0.1" in str(excinfo.value)
    assert excinfo.value.key == "dt"
    assert excinfo.value.line == 2


@pytest.mark.parametrize(
    "text, key, line",
    [
        ("colour = red", "colour", 1),
        ("\n\nn_trajectories = many", "n_trajectories", 3),
        ("n_trajectories = 2.5", "n_trajectories", 1),
        ("omega1 = -1", "omega1", 1),
        ("omega1 = nan", "omega1", 1),
        ("model = constant, random", "model", 1),
        ("model = ", "model", 1),
        ("dt = 0.01\ndt = 0.02", "dt", 2),
        ("wigner_times = 0, 40", "wigner_times", 1),
        ("fock_times = 2.005", "fock_times", 1),
    ],
)
def test_rejections(text, key, line):
    with pytest.raises(ConfigError) as excinfo:
        config.parse_config(text)
    assert excinfo.value.key == key
    assert excinfo.value.line == line


def test_line_without_equals():
    with pytest.raises(ConfigError) as excinfo:
        config.parse_config("# comment\nomega1 0.7\n")
    assert excinfo.value.line == 2
    assert str(excinfo.value).startswith("line 2")


def test_custom_initial_state():
    manifest = config.parse_config("initial_state = custom\nx0 = 1.0\np0 = 0.5\nvar_x = 2.0\nvar_p = 0.125\nmodel = constant\n")
    assert manifest.config.initial_state == GaussianState(1.0, 0.5, 2.0, 0.125, 0.0)
    with pytest.raises(ConfigError) as excinfo:
        config.parse_config("initial_state = custom\nvar_x = 0.1\nvar_p = 0.1\n")
    assert excinfo.value.key == "initial_state"


def test_variants_and_seeds():
    manifest = config.parse_config("initial_state = standard, x_squeezed\nmodel = constant, overlap\n")
    labels = [v.label for v in manifest.variants]
    assert labels == ["standard_constant", "standard_overlap", "x_squeezed_constant", "x_squeezed_overlap"]
    seeds = {v.config.master_seed for v in manifest.variants}
    assert len(seeds) == 4
    # a variant's seed does not depend on which other variants are requested
    alone = config.parse_config("initial_state = x_squeezed\nmodel = overlap\n")
    assert alone.config.master_seed == manifest.variants[3].config.master_seed
    assert alone.config.initial_state == GaussianState(2.0, 0.0, 0.25, 1.0, 0.0)
    reseeded = config.parse_config("initial_state = x_squeezed\nmodel = overlap\nmaster_seed = 1\n")
    assert reseeded.config.master_seed != alone.config.master_seed


def test_snapshots_follow_requested_outputs():
    manifest = config.parse_config("outputs = observables\nwigner_times = 0, 40\n")
    assert manifest.config.snapshot_times == ()
    manifest = config.parse_config("outputs = fock, wigner\nwigner_times = 1\nfock_times = 1, 3\n")
    assert manifest.config.snapshot_times == (1.0, 3.0)
    assert manifest.wants("fock") and not manifest.wants("jumps")


def test_shorter_run_keeps_default_snapshots_in_range():
    manifest = config.parse_config("t_final = 10\n")
    assert manifest.settings["wigner_times"] == [0.0, 2.0, 4.0, 8.0, 10.0]
    assert manifest.settings["fock_times"] == [10.0]
    assert manifest.config.snapshot_times == (0.0, 2.0, 4.0, 8.0, 10.0)

    manifest = config.parse_config("t_final = 5\nwigner_times = 0, 1\n")
    assert manifest.settings["wigner_times"] == [0.0, 1.0]
    assert manifest.settings["fock_times"] == [5.0]

    # times given explicitly are never adjusted
    with pytest.raises(ConfigError) as excinfo:
        config.parse_config("t_final = 10\nfock_times = 30\n")
    assert excinfo.value.key == "fock_times"
    assert excinfo.value.line == 2


def test_echo_parses_back(small_document):
    manifest = config.parse_config(small_document)
    echoed = config.parse_config(config.format_settings(manifest.settings))
    assert echoed == manifest
    assert config.format_settings(echoed.settings) == config.format_settings(manifest.settings)


def test_overrides(small_document):
    manifest = config.parse_config(small_document, output_dir="first")
    changed = config.with_overrides(manifest, "second", master_seed=3, dt=None, n_trajectories=12)
    assert changed.output_dir == "second"
    assert changed.settings["master_seed"] == 3
    assert changed.settings["dt"] == manifest.settings["dt"]
    assert all(v.config.n_trajectories == 12 for v in changed.variants)
    with pytest.raises(ConfigError):
        config.with_overrides(manifest, dt=0.5)
    with pytest.raises(ConfigError):
        config.with_overrides(manifest, colour="red")


def test_presets():
    assert presets.preset_names()[0] == "paper"
    assert {"fig{0}".format(n) for n in range(1, 16)} <= set(presets.preset_names())

    fig1 = presets.preset("fig1")
    assert fig1.config.n_trajectories == 30000
    assert fig1.config.t_final == 30.0
    assert [v.model for v in fig1.variants] == ["constant", "overlap"]
    assert fig1.wants("observables")

    fig8 = presets.preset("fig8")
    assert fig8.outputs == ("fock",)
    assert fig8.settings["fock_basis_level"] == 1
    assert fig8.config.snapshot_times == (30.0,)

    fig9 = presets.preset("fig9")
    assert fig9.settings["wigner_times"] == [0.0, 2.0, 4.0, 8.0]
    assert [v.model for v in fig9.variants] == ["overlap"]

    fig11 = presets.preset("fig11")
    assert {v.model for v in fig11.variants} == {"overlap"}
    states = {v.initial_state: v.config.initial_state for v in fig11.variants}
    assert states["x_squeezed"] == GaussianState(2.0, 0.0, 0.25, 1.0, 0.0)
    assert states["p_squeezed"] == GaussianState(2.0, 0.0, 1.0, 0.25, 0.0)


def test_presets_do_not_share_state():
    first = presets.preset("fig11")
    first.settings["initial_state"].append("standard")
    assert presets.preset("fig11").settings["initial_state"] == ["x_squeezed", "p_squeezed"]


def test_unknown_preset():
    with pytest.raises(PresetNotFound) as excinfo:
        presets.preset("fig99")
    assert "fig1" in str(excinfo.value)
