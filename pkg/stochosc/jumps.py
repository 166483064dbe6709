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
Level-switching rules: constant rate, and rate weighted by the overlap with the
destination level's ground state.
"""
import math
from dataclasses import dataclass
from enum import Enum
import numpy as np
from stochosc.exceptions import ParameterError, StepSizeError
from stochosc.gaussian import GaussianState, ground_state_moments

# largest rate*dt accepted by the per-step Bernoulli draw
MAX_JUMP_PROBABILITY = 0.1
LEVELS = (1, 2)


class JumpKind(Enum):
    CONSTANT_RATE = "constant"
    GROUND_OVERLAP = "overlap"


@dataclass(frozen=True)
class JumpModel:
    """
    kind selects the rule; nu is the base rate (probability per unit time)
    """

    kind: JumpKind
    nu: float

    def __post_init__(self):
        if not isinstance(self.kind, JumpKind):
            raise ParameterError("unknown jump model kind {0!r}".format(self.kind))
        if not (math.isfinite(self.nu) and self.nu >= 0):
            raise ParameterError("nu must be finite and >= 0, got {0!r}".format(self.nu))


@dataclass(frozen=True)
class JumpEvent:
    time: float
    from_level: int
    to_level: int
    mean_x_at_jump: float

    def __post_init__(self):
        if self.from_level not in LEVELS or self.to_level not in LEVELS or self.from_level == self.to_level:
            raise ParameterError("a jump goes between levels 1 and 2, got {0} -> {1}".format(self.from_level, self.to_level))


def ground_state(params):
    """
    ground state of the oscillator params: zero means, minimum-uncertainty widths
    """
    var_x, var_p = ground_state_moments(params)
    return GaussianState(0.0, 0.0, var_x, var_p, 0.0)


def ground_overlap(state, source_params, target_params):
    """
    |<ground state of target | state>|^2 for a packet evolving on the source level.
    """
    if source_params.hbar != target_params.hbar:
        raise ParameterError("source and target levels must share hbar")
    target_var_x, _ = ground_state_moments(target_params)
    return float(overlap_arrays(state.mean_x, state.mean_p, state.var_x, state.cov_xp, source_params.hbar, target_var_x))


def jump_rate(model, state, source_params, target_params):
    """
    switching rate out of the source level; always in [0, nu]
    """
    if model.kind is JumpKind.CONSTANT_RATE or model.nu == 0:
        return float(model.nu)
    return model.nu * ground_overlap(state, source_params, target_params)


def sample_jump(rate, dt, rng):
    """
    Bernoulli draw with success probability rate*dt from a numpy Generator.
    Exactly one uniform is consumed per call, whatever the rate.
    """
    if not (math.isfinite(rate) and rate >= 0):
        raise ParameterError("rate must be finite and >= 0, got {0!r}".format(rate))
    probability = rate * dt
    if probability > MAX_JUMP_PROBABILITY:
        raise StepSizeError("rate*dt = {0:.6g} exceeds {1}; reduce dt".format(probability, MAX_JUMP_PROBABILITY))
    return bool(rng.random() < probability)


# Array kernels


def overlap_arrays(mean_x, mean_p, var_x, cov_xp, hbar, target_var_x):
    """
    Closed form of |integral phi0(x) psi(x) dx|^2 with psi the chirped, boosted Gaussian
    of the moments and phi0 the real Gaussian of variance target_var_x centred at 0.

    Writing psi ~ exp(-A (x - x0)^2 + i k (x - x0)) and phi0 ~ exp(-B x^2), the integral is
    sqrt(pi / (A + B)) exp(E) with E = (2 A x0 + i k)^2 / (4 (A + B)) - A x0^2 - i k x0.
    """
    a = 1.0 / (4.0 * var_x) - 1j * cov_xp / (2.0 * hbar * var_x)
    b = 1.0 / (4.0 * target_var_x)
    k = mean_p / hbar
    s = a + b
    linear = 2.0 * a * mean_x + 1j * k
    e = linear * linear / (4.0 * s) - a * mean_x * mean_x - 1j * k * mean_x
    value = np.exp(2.0 * e.real) / (2.0 * np.abs(s) * np.sqrt(var_x * target_var_x))
    return np.minimum(value, 1.0)
