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
Run configuration documents: parsing, validation against config_schema.json, and the
manifest of ensemble variants a document expands into.
"""
import json
import math
import os
from collections import OrderedDict
from dataclasses import dataclass
import numpy as np
from jsonschema import validate
from jsonschema.exceptions import ValidationError
from mdclogpy import Logger
from stochosc.ensemble import SimulationConfig
from stochosc.exceptions import ConfigError, ParameterError
from stochosc.gaussian import GaussianState, OscillatorParams, check_state
from stochosc.jumps import MAX_JUMP_PROBABILITY, JumpKind

# constants
FORMAT_VERSION = 1
OUTPUT_DIR = os.environ.get("STOCHOSC_OUTPUT_DIR", "stochosc-out")
SCHEMA_PATH = os.path.join(os.path.dirname(__file__), "config_schema.json")
with open(SCHEMA_PATH, encoding="utf-8") as _schema_file:
    SCHEMA = json.load(_schema_file, object_pairs_hook=OrderedDict)
PROPERTIES = SCHEMA["properties"]

NAMED_INITIAL_STATES = {
    "standard": GaussianState(2.0, 0.0, 0.5, 0.5, 0.0),
    "x_squeezed": GaussianState(2.0, 0.0, 0.25, 1.0, 0.0),
    "p_squeezed": GaussianState(2.0, 0.0, 1.0, 0.25, 0.0),
}
# stable codes keep a variant's seed independent of which other variants are requested
INITIAL_STATE_CODES = {"standard": 0, "x_squeezed": 1, "p_squeezed": 2, "custom": 3}
MODEL_CODES = {"constant": 0, "overlap": 1}
SNAPSHOT_KEYS = ("wigner_times", "fock_times")

mdc_logger = Logger(name=__name__)
mdc_logger.mdclog_format_init(configmap_monitor=True)


@dataclass(frozen=True)
class Variant:
    """one (initial state, jump model) ensemble of a manifest"""

    label: str
    model: str
    initial_state: str
    config: SimulationConfig


@dataclass(frozen=True, eq=False)
class RunManifest:
    """
    A validated run: the effective settings, the ensembles they expand into, the requested
    artifacts and where to write them.
    """

    settings: OrderedDict
    variants: tuple
    outputs: tuple
    output_dir: str
    format_version: int = FORMAT_VERSION

    @property
    def config(self):
        return self.variants[0].config

    def wants(self, artifact):
        return artifact in self.outputs

    def __eq__(self, other):
        if not isinstance(other, RunManifest):
            return NotImplemented
        return (dict(self.settings), self.variants, self.outputs, self.output_dir, self.format_version) == (
            dict(other.settings), other.variants, other.outputs, other.output_dir, other.format_version)


def default_settings():
    return OrderedDict((key, _copy(prop["default"])) for key, prop in PROPERTIES.items())


def _copy(value):
    return list(value) if isinstance(value, list) else value


def _coerce_scalar(kind, raw):
    if kind == "number":
        value = float(raw)
        if not math.isfinite(value):
            raise ValueError("not finite")
        return value
    if kind == "integer":
        return int(raw)
    return raw


def _coerce(key, raw, line):
    prop = PROPERTIES[key]
    kind = prop["type"]
    try:
        if kind == "array":
            items = [item.strip() for item in raw.split(",")]
            if items == [""]:
                return []
            if "" in items:
                raise ValueError("empty list item")
            return [_coerce_scalar(prop["items"]["type"], item) for item in items]
        return _coerce_scalar(kind, raw)
    except ValueError:
        expected = "a comma-separated list of {0}s".format(prop["items"]["type"]) if kind == "array" else "a{0} {1}".format("n" if kind == "integer" else "", kind)
        raise ConfigError("expected {0}, got {1!r}".format(expected, raw), line, key)


def parse_config(text, output_dir=None):
    """
    Parse a `key = value` document ('#' starts a comment) into a validated RunManifest.
    Keys left out take the defaults of config_schema.json, which reproduce the ``paper`` preset.
    """
    settings = default_settings()
    lines = {}
    for number, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        if "=" not in content:
            raise ConfigError("expected 'key = value'", number)
        key, raw = (part.strip() for part in content.split("=", 1))
        if key not in PROPERTIES:
            raise ConfigError("unknown key", number, key)
        if key in lines:
            raise ConfigError("duplicate key (first set on line {0})".format(lines[key]), number, key)
        settings[key] = _coerce(key, raw, number)
        lines[key] = number
    for key in SNAPSHOT_KEYS:
        if key not in lines:
            settings[key] = _clip_default_times(settings[key], settings["t_final"])
    return build_manifest(settings, lines, output_dir)


def _clip_default_times(times, t_final):
    """default snapshot times after t_final give way to t_final itself"""
    kept = [time for time in times if time <= t_final]
    if len(kept) < len(times) and t_final not in kept:
        kept.append(t_final)
    return kept


def format_settings(settings):
    """
    Render settings as a config document; parse_config(format_settings(s)) gives back s.
    """
    out = [
        "# stochosc effective configuration",
        "# format_version={0}".format(FORMAT_VERSION),
        "# master_seed={0}".format(settings["master_seed"]),
    ]
    for key, value in settings.items():
        if isinstance(value, list):
            text = ", ".join(_format_value(v) for v in value)
        else:
            text = _format_value(value)
        out.append("{0} = {1}".format(key, text))
    return "\n".join(out) + "\n"


def _format_value(value):
    if isinstance(value, float):
        return "%.17g" % value
    return str(value)


def with_overrides(manifest, output_dir=None, **overrides):
    """
    manifest with some settings replaced (command line flags); revalidated
    """
    settings = OrderedDict(manifest.settings)
    for key, value in overrides.items():
        if value is not None:
            if key not in PROPERTIES:
                raise ConfigError("unknown key", key=key)
            settings[key] = value
    return build_manifest(settings, None, output_dir or manifest.output_dir)


def variant_seed(master_seed, initial_state, model):
    """64-bit seed of one variant, derived from the master seed and the variant's stable codes"""
    sequence = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(INITIAL_STATE_CODES[initial_state], MODEL_CODES[model]))
    return int(sequence.generate_state(1, np.uint64)[0])


def build_manifest(settings, lines=None, output_dir=None):
    """
    Validate typed settings and expand them into a RunManifest.
    lines maps keys to the document line they came from, for error messages.
    """
    lines = lines or {}
    try:
        validate(instance=dict(settings), schema=SCHEMA)
    except ValidationError as exc:
        key = exc.path[0] if exc.path else None
        raise ConfigError(exc.message, lines.get(key), key)

    def fail(message, key):
        raise ConfigError(message, lines.get(key), key)

    if settings["nu"] * settings["dt"] > MAX_JUMP_PROBABILITY:
        fail("nu*dt exceeds {0}".format(MAX_JUMP_PROBABILITY), "dt" if "dt" in lines or "nu" not in lines else "nu")

    def simulation_config(initial, model, seed, snapshot_times=()):
        return SimulationConfig(
            omega1=settings["omega1"],
            omega2=settings["omega2"],
            mass=settings["mass"],
            hbar=settings["hbar"],
            nu=settings["nu"],
            model=JumpKind(model),
            initial_state=initial,
            initial_level=settings["initial_level"],
            t_final=settings["t_final"],
            dt=settings["dt"],
            sample_stride=settings["sample_stride"],
            n_trajectories=settings["n_trajectories"],
            master_seed=seed,
            chunk_size=settings["chunk_size"],
            snapshot_times=snapshot_times,
        )

    initial_states = OrderedDict()
    for initial_name in settings["initial_state"]:
        if initial_name == "custom":
            initial = GaussianState(settings["x0"], settings["p0"], settings["var_x"], settings["var_p"], settings["cov_xp"])
            try:
                check_state(initial, OscillatorParams(settings["omega1"], settings["mass"], settings["hbar"]))
            except ParameterError as exc:
                fail(str(exc), "initial_state")
        else:
            initial = NAMED_INITIAL_STATES[initial_name]
        initial_states[initial_name] = initial

    outputs = tuple(settings["outputs"])
    timing = simulation_config(next(iter(initial_states.values())), settings["model"][0], 0)
    snapshot_times = set()
    for artifact, key in (("wigner", "wigner_times"), ("fock", "fock_times")):
        if artifact in outputs:
            for time in settings[key]:
                if time > settings["t_final"]:
                    fail("time {0!r} is after t_final".format(time), key)
                try:
                    timing.sample_index(time)
                except ParameterError as exc:
                    fail(str(exc), key)
            snapshot_times.update(settings[key])

    variants = []
    for initial_name, initial in initial_states.items():
        for model in settings["model"]:
            label = model if len(initial_states) == 1 else "{0}_{1}".format(initial_name, model)
            seed = variant_seed(settings["master_seed"], initial_name, model)
            variants.append(Variant(label, model, initial_name, simulation_config(initial, model, seed, tuple(sorted(snapshot_times)))))

    mdc_logger.debug("manifest with {0} variants: {1}".format(len(variants), [v.label for v in variants]))
    return RunManifest(
        settings=OrderedDict(settings),
        variants=tuple(variants),
        outputs=outputs,
        output_dir=output_dir or OUTPUT_DIR,
    )
