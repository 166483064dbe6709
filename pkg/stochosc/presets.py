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
Named runs, one per reference plot, plus ``paper`` which writes every artifact.
Every preset starts from the schema defaults (omega1=0.7, omega2=1.2, nu=0.8, N=30000, t_final=30).
"""
from collections import OrderedDict, namedtuple
from mdclogpy import Logger
from stochosc.config import build_manifest, default_settings
from stochosc.exceptions import PresetNotFound

mdc_logger = Logger(name=__name__)
mdc_logger.mdclog_format_init(configmap_monitor=True)

Preset = namedtuple("Preset", ["description", "overrides"])

BOTH_MODELS = ["constant", "overlap"]
SQUEEZED = ["x_squeezed", "p_squeezed"]

PRESETS = OrderedDict([
    ("paper", Preset("every artifact of the standard run, both jump models", {})),
    ("fig1", Preset("ensemble energy vs time, both models", {"model": BOTH_MODELS, "outputs": ["observables"]})),
    ("fig2", Preset("positions of 1->2 jumps, both models", {"model": BOTH_MODELS, "outputs": ["jumps"]})),
    ("fig3", Preset("positions of 2->1 jumps, both models", {"model": BOTH_MODELS, "outputs": ["jumps"]})),
    ("fig4", Preset("ensemble position vs time, both models", {"model": BOTH_MODELS, "outputs": ["observables"]})),
    ("fig5", Preset("ensemble momentum vs time, both models", {"model": BOTH_MODELS, "outputs": ["observables"]})),
    ("fig6", Preset("position variance vs time, both models", {"model": BOTH_MODELS, "outputs": ["observables", "diagnostics"]})),
    ("fig7", Preset("x-coherence vs time, both models", {"model": BOTH_MODELS, "outputs": ["observables", "coherence"]})),
    ("fig8", Preset("Fock populations at t=30 in the omega1 basis, both models",
                    {"model": BOTH_MODELS, "outputs": ["fock"], "fock_times": [30.0], "fock_basis_level": 1})),
    ("fig9", Preset("ensemble Wigner function at t=0, 2, 4, 8, overlap model",
                    {"model": ["overlap"], "outputs": ["wigner"], "wigner_times": [0.0, 2.0, 4.0, 8.0]})),
    ("fig10", Preset("ensemble Wigner function at t=30, overlap model",
                     {"model": ["overlap"], "outputs": ["wigner"], "wigner_times": [30.0]})),
    ("fig11", Preset("energy vs time from squeezed starts, overlap model",
                     {"model": ["overlap"], "initial_state": SQUEEZED, "outputs": ["observables"]})),
    ("fig12", Preset("jump positions from squeezed starts, overlap model",
                     {"model": ["overlap"], "initial_state": SQUEEZED, "outputs": ["jumps"]})),
    ("fig13", Preset("ensemble position from squeezed starts, overlap model",
                     {"model": ["overlap"], "initial_state": SQUEEZED, "outputs": ["observables"]})),
    ("fig14", Preset("position variance from squeezed starts, overlap model",
                     {"model": ["overlap"], "initial_state": SQUEEZED, "outputs": ["observables", "diagnostics"]})),
    ("fig15", Preset("x-coherence from squeezed starts, overlap model",
                     {"model": ["overlap"], "initial_state": SQUEEZED, "outputs": ["observables", "coherence"]})),
])


def preset_names():
    return list(PRESETS)


def preset(name, output_dir=None):
    """
    manifest of a named preset; raises PresetNotFound listing the valid names
    """
    if name not in PRESETS:
        raise PresetNotFound("unknown preset {0!r}; valid presets: {1}".format(name, ", ".join(PRESETS)))
    settings = default_settings()
    for key, value in PRESETS[name].overrides.items():
        settings[key] = list(value) if isinstance(value, list) else value
    mdc_logger.debug("resolved preset {0}".format(name))
    return build_manifest(settings, None, output_dir)
