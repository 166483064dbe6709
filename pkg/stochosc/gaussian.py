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
Gaussian wave packets represented by their first and second moments, and their exact
evolution in a fixed harmonic potential.

The public functions take and return GaussianState values. The underscore-free array
kernels at the bottom (rotation_coefficients, rotate_moments, ...) do the same maths on
numpy arrays so that a whole batch of trajectories can be stepped at once.
"""
import math
from dataclasses import dataclass
import numpy as np
from stochosc.exceptions import ParameterError

# slack allowed on the Heisenberg bound before a state is rejected
UNCERTAINTY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class OscillatorParams:
    """
    One potential level: angular frequency, mass and action scale (dimensionless units)
    """

    omega: float
    mass: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("omega", "mass", "hbar"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ParameterError("{0} must be finite and positive, got {1!r}".format(name, value))


@dataclass(frozen=True)
class GaussianState:
    """
    Pure Gaussian wave packet: means plus central second moments.
    cov_xp is the symmetrized covariance and is signed.
    """

    mean_x: float
    mean_p: float
    var_x: float
    var_p: float
    cov_xp: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in self.as_array()):
            raise ParameterError("state moments must be finite: {0!r}".format(self))
        if self.var_x <= 0 or self.var_p <= 0:
            raise ParameterError("variances must be positive: {0!r}".format(self))

    def as_array(self):
        """moments in the canonical column order (mean_x, mean_p, var_x, var_p, cov_xp)"""
        return np.array([self.mean_x, self.mean_p, self.var_x, self.var_p, self.cov_xp], dtype=float)

    @classmethod
    def from_array(cls, row):
        return cls(*(float(v) for v in row))

    @property
    def raw_moments(self):
        """
        (<x^2>, <p^2>, <xp>) with <xp> symmetrized; the quantities the moment equations evolve
        """
        return (
            self.var_x + self.mean_x ** 2,
            self.var_p + self.mean_p ** 2,
            self.cov_xp + self.mean_x * self.mean_p,
        )


def check_state(state, params, tolerance=UNCERTAINTY_TOLERANCE):
    """
    raises ParameterError if the state violates the Heisenberg bound for params.hbar
    """
    bound = params.hbar ** 2 / 4.0
    if uncertainty_invariant(state) < bound - tolerance * max(1.0, bound):
        raise ParameterError("state violates var_x*var_p - cov_xp^2 >= hbar^2/4: {0!r}".format(state))


def propagate(state, params, dt):
    """
    Advance state by dt under the fixed potential params.
    Exact for any dt, negative dt runs the motion backwards.
    """
    if not math.isfinite(dt):
        raise ParameterError("dt must be finite, got {0!r}".format(dt))
    check_state(state, params)
    c, a, b = rotation_coefficients(params.omega, params.mass, dt)
    moments = rotate_moments(state.mean_x, state.mean_p, state.var_x, state.var_p, state.cov_xp, c, a, b)
    return GaussianState(*(float(m) for m in moments))


def energy(state, params):
    """
    <p^2>/2m + m w^2 <x^2>/2 for the potential params
    """
    return float(energy_arrays(state.mean_x, state.mean_p, state.var_x, state.var_p, params.omega, params.mass))


def uncertainty_invariant(state):
    """var_x*var_p - cov_xp^2; hbar^2/4 for every pure Gaussian"""
    return state.var_x * state.var_p - state.cov_xp ** 2


def wavefunction(state, params, x):
    """
    Complex amplitude of the packet at position(s) x. The global phase is fixed to zero.
    Returns a complex scalar for scalar x, an array otherwise.
    """
    psi = wavefunction_arrays(np.asarray(x, dtype=float), state.mean_x, state.mean_p, state.var_x, state.cov_xp, params.hbar)
    return complex(psi) if np.ndim(psi) == 0 else psi


def ground_state_moments(params):
    """(var_x, var_p) of the ground state of params"""
    return params.hbar / (2.0 * params.mass * params.omega), params.hbar * params.mass * params.omega / 2.0


def classical_turning_point(total_energy, params):
    """position where a classical oscillator of this energy turns: sqrt(2E / (m w^2))"""
    return math.sqrt(2.0 * total_energy / (params.mass * params.omega ** 2))


# Array kernels


def rotation_coefficients(omega, mass, dt):
    """
    Entries of the phase-space rotation exp(dt * [[0, 1/m], [-m w^2, 0]]).
    Returns (c, a, b) with R = [[c, a], [-b, c]], a = sin/(m w), b = m w sin.
    omega and mass may be arrays.
    """
    phase = np.multiply(omega, dt)
    mw = np.multiply(mass, omega)
    s = np.sin(phase)
    return np.cos(phase), s / mw, mw * s


def rotate_moments(mean_x, mean_p, var_x, var_p, cov_xp, c, a, b):
    """
    Apply R (see rotation_coefficients) to the means and R S R^T to the covariance matrix S.
    Works elementwise on scalars or equally shaped arrays.
    """
    new_x = c * mean_x + a * mean_p
    new_p = c * mean_p - b * mean_x
    new_var_x = c * c * var_x + 2.0 * c * a * cov_xp + a * a * var_p
    new_var_p = b * b * var_x - 2.0 * c * b * cov_xp + c * c * var_p
    new_cov = -c * b * var_x + (c * c - a * b) * cov_xp + c * a * var_p
    return new_x, new_p, new_var_x, new_var_p, new_cov


def energy_arrays(mean_x, mean_p, var_x, var_p, omega, mass):
    return (var_p + mean_p * mean_p) / (2.0 * mass) + 0.5 * mass * omega * omega * (var_x + mean_x * mean_x)


def wavefunction_arrays(x, mean_x, mean_p, var_x, cov_xp, hbar):
    """
    (2 pi var_x)^(-1/4) exp(-d^2/(4 var_x) + i cov_xp d^2/(2 hbar var_x) + i mean_p d/hbar), d = x - mean_x.
    The moment arguments broadcast against x.
    """
    d = x - mean_x
    exponent = -d * d / (4.0 * var_x) + 1j * (cov_xp * d * d / (2.0 * hbar * var_x) + mean_p * d / hbar)
    return (2.0 * np.pi * var_x) ** -0.25 * np.exp(exponent)
