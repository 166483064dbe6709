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
Ensemble reconstructions: Wigner functions, position and Fock density matrices, and
the off-diagonal coherence measures of equal-weight mixtures of Gaussian states.
"""
from dataclasses import dataclass, field
import numpy as np
from mdclogpy import Logger
from stochosc.exceptions import EmptyEnsembleError, ParameterError, ResolutionError
from stochosc.gaussian import GaussianState, OscillatorParams, wavefunction_arrays

mdc_logger = Logger(name=__name__)
mdc_logger.mdclog_format_init(configmap_monitor=True)

# grids must cover this many mixture standard deviations
COVERAGE_SIGMAS = 6.0
# Hermite functions need this many grid points per local oscillation
POINTS_PER_OSCILLATION = 10.0
# extra ranges (in oscillator lengths) beyond the outermost classical turning point
TURNING_POINT_MARGIN = 4.0
# rescale the Hermite recurrence when values pass this size
RECURRENCE_RESCALE = 1e150
# soft cap on the number of floats held by one vectorized block
BLOCK_ELEMENTS = 4_000_000
LEAKAGE_WARNING = 1e-3


@dataclass(eq=False)
class StateCollection:
    """
    A batch of Gaussian states as an (n, 5) moment array plus the level each one was on.
    """

    moments: np.ndarray
    levels: np.ndarray
    hbar: float = 1.0

    def __post_init__(self):
        self.moments = np.atleast_2d(np.asarray(self.moments, dtype=float))
        self.levels = np.asarray(self.levels, dtype=np.int64).reshape(-1)
        if self.moments.shape[1:] != (5,) or len(self.levels) != len(self.moments):
            raise ParameterError("moments must be (n, 5) with one level per row")

    @classmethod
    def from_states(cls, states, hbar=None):
        """
        Accepts GaussianState items, or (GaussianState, level) / (GaussianState, OscillatorParams) pairs.
        hbar is taken from the params when pairs carry them.
        """
        rows, levels, hbars = [], [], set()
        for item in states:
            state, tag = (item, 1) if isinstance(item, GaussianState) else item
            if isinstance(tag, OscillatorParams):
                hbars.add(tag.hbar)
                tag = 1
            rows.append(state.as_array())
            levels.append(int(tag))
        if not rows:
            raise EmptyEnsembleError("no states given")
        if len(hbars) > 1:
            raise ParameterError("states carry different hbar values: {0}".format(sorted(hbars)))
        if hbar is None:
            hbar = hbars.pop() if hbars else 1.0
        return cls(np.vstack(rows), np.asarray(levels), hbar)

    def __len__(self):
        return len(self.moments)

    def concatenate(self, other):
        return StateCollection(np.vstack([self.moments, other.moments]), np.concatenate([self.levels, other.levels]), self.hbar)

    def columns(self):
        """mean_x, mean_p, var_x, var_p, cov_xp as separate arrays"""
        return tuple(self.moments[:, i] for i in range(5))

    def blocks(self, per_state):
        """yield column tuples for consecutive slices holding about BLOCK_ELEMENTS / per_state states"""
        size = max(1, BLOCK_ELEMENTS // max(1, per_state))
        for start in range(0, len(self), size):
            chunk = self.moments[start:start + size]
            yield tuple(chunk[:, i, None] for i in range(5))


@dataclass(frozen=True)
class GridAxes:
    x_axis: np.ndarray
    p_axis: np.ndarray

    @classmethod
    def symmetric(cls, extent, points):
        axis = np.linspace(-extent, extent, points)
        return cls(axis, axis.copy())


@dataclass(eq=False)
class WignerGrid:
    x_axis: np.ndarray
    p_axis: np.ndarray
    values: np.ndarray  # values[i, j] = W(x_axis[i], p_axis[j])
    metadata: dict = field(default_factory=dict)


@dataclass(eq=False)
class FockMatrix:
    n_max: int
    values: np.ndarray
    basis_omega: float
    leakage: float

    @property
    def populations(self):
        return self.values.diagonal().real.copy()


def _as_collection(states, hbar=None):
    if isinstance(states, StateCollection):
        collection = states
        if hbar is not None and hbar != states.hbar:
            collection = StateCollection(states.moments, states.levels, hbar)
    else:
        collection = StateCollection.from_states(states, hbar)
    if len(collection) == 0:
        raise EmptyEnsembleError("no states given")
    return collection


def _spacing(axis):
    axis = np.asarray(axis, dtype=float)
    if axis.ndim != 1 or len(axis) < 2:
        raise ParameterError("axes need at least two points")
    return (axis[-1] - axis[0]) / (len(axis) - 1)


def _trapezoid_weights(axis):
    weights = np.full(len(axis), _spacing(axis))
    weights[0] *= 0.5
    weights[-1] *= 0.5
    return weights


# Wigner functions


def wigner_of_state(state, params, grid):
    """
    Closed-form Wigner function of one Gaussian on the grid
    """
    return ensemble_wigner([(state, params)], grid)


def ensemble_wigner(states, grid, hbar=None):
    """
    Equal-weight average of the per-state Gaussian Wigner functions.

    Parameters
    ----------
    states: StateCollection or iterable
        see StateCollection.from_states
    grid: GridAxes
    hbar: float (optional)
        overrides the hbar carried by states
    """
    collection = _as_collection(states, hbar)
    x_axis = np.asarray(grid.x_axis, dtype=float)
    p_axis = np.asarray(grid.p_axis, dtype=float)
    total = np.zeros((len(x_axis), len(p_axis)))
    for mean_x, mean_p, var_x, var_p, cov_xp in collection.blocks(len(x_axis) * len(p_axis)):
        det = var_x * var_p - cov_xp * cov_xp
        if np.any(det <= 0):
            raise ParameterError("covariance matrix must be positive definite")
        dx = x_axis[None, :] - mean_x
        dp = p_axis[None, :] - mean_p
        q = (var_p[:, :, None] * dx[:, :, None] ** 2 - 2.0 * cov_xp[:, :, None] * dx[:, :, None] * dp[:, None, :]
             + var_x[:, :, None] * dp[:, None, :] ** 2) / det[:, :, None]
        total += np.sum(np.exp(-0.5 * q) / (2.0 * np.pi * np.sqrt(det[:, :, None])), axis=0)
    values = total / len(collection)
    cell = _spacing(x_axis) * _spacing(p_axis)
    warnings = _coverage_warnings(collection, x_axis, p_axis)
    for warning in warnings:
        mdc_logger.warning(warning)
    metadata = {
        "x_axis": [float(x_axis[0]), float(x_axis[-1]), len(x_axis)],
        "p_axis": [float(p_axis[0]), float(p_axis[-1]), len(p_axis)],
        "n_states": len(collection),
        "normalization_residual": float(values.sum() * cell - 1.0),
        "coverage_warnings": warnings,
    }
    return WignerGrid(x_axis, p_axis, values, metadata)


def _coverage_warnings(collection, x_axis, p_axis):
    mean_x, mean_p, var_x, var_p, _ = collection.columns()
    warnings = []
    for name, axis, means, variances in (("x", x_axis, mean_x, var_x), ("p", p_axis, mean_p, var_p)):
        centre = means.mean()
        sigma = np.sqrt(max(np.mean(variances + means * means) - centre * centre, 0.0))
        low, high = centre - COVERAGE_SIGMAS * sigma, centre + COVERAGE_SIGMAS * sigma
        if axis[0] > low or axis[-1] < high:
            warnings.append(
                "{0} grid [{1:.6g}, {2:.6g}] does not cover the mixture's +-{3:g} sigma range [{4:.6g}, {5:.6g}]".format(
                    name, axis[0], axis[-1], COVERAGE_SIGMAS, low, high
                )
            )
    return warnings


# Coherence


def coherence_x_arrays(mean_p, var_p, hbar):
    """
    Per-state value of int int (x1 - x2)^2 <x1|rho|x2>: 2 pi hbar^3 f(0) (1/var_p - mean_p^2/var_p^2),
    f the momentum density
    """
    f0 = np.exp(-mean_p * mean_p / (2.0 * var_p)) / np.sqrt(2.0 * np.pi * var_p)
    return 2.0 * np.pi * hbar ** 3 * f0 * (1.0 / var_p - mean_p * mean_p / (var_p * var_p))


def coherence_p_arrays(mean_x, var_x, hbar):
    """momentum-representation counterpart of coherence_x_arrays"""
    return coherence_x_arrays(mean_x, var_x, hbar)


def coherence_x(states, hbar=None):
    """ensemble average of the position off-diagonality"""
    collection = _as_collection(states, hbar)
    _, mean_p, _, var_p, _ = collection.columns()
    return float(np.mean(coherence_x_arrays(mean_p, var_p, collection.hbar)))


def coherence_p(states, hbar=None):
    """ensemble average of the momentum off-diagonality"""
    collection = _as_collection(states, hbar)
    mean_x, _, var_x, _, _ = collection.columns()
    return float(np.mean(coherence_p_arrays(mean_x, var_x, collection.hbar)))


# Density matrices


def _amplitudes(block, axis, hbar):
    mean_x, mean_p, var_x, _, cov_xp = block
    return wavefunction_arrays(axis[None, :], mean_x, mean_p, var_x, cov_xp, hbar)


def position_density_matrix(states, x1_axis, x2_axis, hbar=None):
    """
    rho(x1, x2) as the average of psi(x1) psi*(x2) over the states; rows follow x1_axis
    """
    collection = _as_collection(states, hbar)
    x1_axis = np.asarray(x1_axis, dtype=float)
    x2_axis = np.asarray(x2_axis, dtype=float)
    rho = np.zeros((len(x1_axis), len(x2_axis)), dtype=complex)
    for block in collection.blocks(2 * (len(x1_axis) + len(x2_axis))):
        psi1 = _amplitudes(block, x1_axis, collection.hbar)
        psi2 = _amplitudes(block, x2_axis, collection.hbar)
        rho += psi1.T @ psi2.conj()
    return rho / len(collection)


def check_fock_resolution(x_axis, basis, n_max):
    """
    raises ResolutionError unless x_axis samples every Hermite function up to n_max
    at POINTS_PER_OSCILLATION and reaches past its classical turning points
    """
    length = np.sqrt(basis.hbar / (basis.mass * basis.omega))
    root = np.sqrt(2.0 * n_max + 1.0)
    dx = _spacing(x_axis)
    points = 2.0 * np.pi * length / (root * dx)
    if points < POINTS_PER_OSCILLATION:
        raise ResolutionError(
            "grid spacing {0:.4g} gives {1:.3g} points per oscillation of n={2}, need {3:g}".format(dx, points, n_max, POINTS_PER_OSCILLATION)
        )
    reach = (root + TURNING_POINT_MARGIN) * length
    if x_axis[0] > -reach or x_axis[-1] < reach:
        raise ResolutionError("grid [{0:.4g}, {1:.4g}] must reach +-{2:.4g} for n={3}".format(x_axis[0], x_axis[-1], reach, n_max))


def fock_density_matrix(states, basis, n_max, x_axis, hbar=None):
    """
    <n1|rho|n2> in the eigenbasis of `basis`, truncated at n_max.

    The double integral over x1, x2 factorizes for a mixture of pure states, so each state is
    projected once (trapezoid rule) and the projections are averaged as outer products.
    """
    if n_max < 0:
        raise ParameterError("n_max must be >= 0")
    collection = _as_collection(states, hbar)
    x_axis = np.asarray(x_axis, dtype=float)
    check_fock_resolution(x_axis, basis, n_max)
    weighted = hermite_functions(n_max, x_axis, basis) * _trapezoid_weights(x_axis)[None, :]
    rho = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    for block in collection.blocks(2 * (len(x_axis) + n_max + 1)):
        coefficients = _amplitudes(block, x_axis, collection.hbar) @ weighted.T
        rho += coefficients.T @ coefficients.conj()
    rho /= len(collection)
    rho = 0.5 * (rho + rho.conj().T)
    leakage = float(1.0 - rho.trace().real)
    if leakage > LEAKAGE_WARNING:
        mdc_logger.warning("Fock truncation at n_max={0} leaks {1:.3g} of the trace".format(n_max, leakage))
    return FockMatrix(n_max, rho, basis.omega, leakage)


# Hermite functions


def hermite_functions(n_max, x, basis):
    """
    Rows 0..n_max of the normalized oscillator eigenfunctions <x|n> for `basis`.

    Uses the three-term recurrence of the normalized functions with the Gaussian factor held
    back; values that grow past RECURRENCE_RESCALE are divided down and the factor is kept in
    a per-point log scale, so high n stays finite far from the origin.
    """
    if n_max < 0:
        raise ParameterError("n must be >= 0")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    length = np.sqrt(basis.hbar / (basis.mass * basis.omega))
    xi = x / length
    norm = np.pi ** -0.25 / np.sqrt(length)
    log_scale = -0.5 * xi * xi
    out = np.empty((n_max + 1, len(x)))
    previous = np.zeros_like(xi)
    current = np.ones_like(xi)
    out[0] = norm * np.exp(log_scale)
    for n in range(n_max):
        following = np.sqrt(2.0 / (n + 1)) * xi * current - np.sqrt(n / (n + 1.0)) * previous
        previous, current = current, following
        big = np.abs(current) > RECURRENCE_RESCALE
        if np.any(big):
            factor = np.where(big, np.abs(current), 1.0)
            previous = previous / factor
            current = current / factor
            log_scale = log_scale + np.log(factor)
        out[n + 1] = norm * current * np.exp(log_scale)
    return out


def hermite_function(n, x, basis):
    """<x|n> for the oscillator `basis`; float for scalar x"""
    values = hermite_functions(n, x, basis)[n]
    return float(values[0]) if np.ndim(x) == 0 else values
