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
Stochastic trajectories and their ensemble reduction.

Trajectories are stepped in batches: every trajectory of a batch advances one dt per
iteration with numpy arrays holding the five moments, and each trajectory draws its
uniforms from its own stream seeded by (master_seed, trajectory_index). A trajectory
therefore comes out the same whether it is simulated alone or inside any batch.
"""
import math
import os
from collections import OrderedDict, namedtuple
from dataclasses import dataclass
import numpy as np
from joblib import Parallel, delayed
from mdclogpy import Logger
from prometheus_client import Counter
from stochosc.exceptions import EmptyEnsembleError, EnsembleAborted, ParameterError, StepSizeError, StochOscError
from stochosc.gaussian import GaussianState, OscillatorParams, check_state, energy_arrays, rotate_moments, rotation_coefficients
from stochosc.jumps import MAX_JUMP_PROBABILITY, JumpEvent, JumpKind, JumpModel, overlap_arrays
from stochosc.phasespace import StateCollection, coherence_p_arrays, coherence_x_arrays

# constants
THREADS = int(os.environ.get("STOCHOSC_THREADS", 1))
DIRECTIONS = ((1, 2), (2, 1))
SUM_FIELDS = ("mean_x", "mean_p", "x2", "p2", "xp", "energy", "coherence_x", "coherence_p", "var_x", "var_p", "mean_x_sq")
STANDARD_INITIAL_STATE = GaussianState(2.0, 0.0, 0.5, 0.5, 0.0)
# relative slack when matching a requested time to the sample grid
TIME_ALIGNMENT = 1e-9

mdc_logger = Logger(name=__name__)
mdc_logger.mdclog_format_init(configmap_monitor=True)

ensemble_counters = Counter('StochOscEnsemble', 'Trajectory and jump counters', ['counter'])

JumpHistogram = namedtuple("JumpHistogram", ["direction", "edges", "counts"])


@dataclass(frozen=True)
class SimulationConfig:
    """
    One ensemble run: two levels, a jump rule, an initial state and the time grid.
    snapshot_times lists sample times at which every trajectory's state is kept.
    """

    omega1: float = 0.7
    omega2: float = 1.2
    mass: float = 1.0
    hbar: float = 1.0
    nu: float = 0.8
    model: JumpKind = JumpKind.GROUND_OVERLAP
    initial_state: GaussianState = STANDARD_INITIAL_STATE
    initial_level: int = 1
    t_final: float = 30.0
    dt: float = 0.01
    sample_stride: int = 10
    n_trajectories: int = 30000
    master_seed: int = 19990
    chunk_size: int = 500
    snapshot_times: tuple = ()

    def __post_init__(self):
        # constructing these validates omega, mass, hbar and nu
        self.level_params(1)
        self.level_params(2)
        JumpModel(self.model, self.nu)
        if self.initial_level not in (1, 2):
            raise ParameterError("initial_level must be 1 or 2, got {0!r}".format(self.initial_level))
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ParameterError("dt must be positive, got {0!r}".format(self.dt))
        if not (math.isfinite(self.t_final) and self.t_final >= 0):
            raise ParameterError("t_final must be >= 0, got {0!r}".format(self.t_final))
        for name in ("sample_stride", "n_trajectories", "chunk_size"):
            if int(getattr(self, name)) < 1:
                raise ParameterError("{0} must be >= 1".format(name))
        if self.master_seed < 0:
            raise ParameterError("master_seed must be >= 0")
        if self.nu * self.dt > MAX_JUMP_PROBABILITY:
            raise StepSizeError("nu*dt exceeds {0}".format(MAX_JUMP_PROBABILITY))
        check_state(self.initial_state, self.level_params(self.initial_level))
        for time in self.snapshot_times:
            self.sample_index(time)

    def level_params(self, level):
        return OscillatorParams(self.omega1 if level == 1 else self.omega2, self.mass, self.hbar)

    @property
    def jump_model(self):
        return JumpModel(self.model, self.nu)

    @property
    def n_steps(self):
        return int(math.floor(self.t_final / self.dt + TIME_ALIGNMENT))

    @property
    def sample_steps(self):
        return np.arange(0, self.n_steps + 1, self.sample_stride)

    @property
    def sample_times(self):
        return self.sample_steps * self.dt

    def sample_index(self, time):
        """
        index of the sample taken at `time`; raises ParameterError if no sample falls there
        """
        position = time / (self.dt * self.sample_stride)
        index = int(round(position))
        if abs(position - index) > TIME_ALIGNMENT * max(1.0, abs(position)) or not 0 <= index < len(self.sample_steps):
            raise ParameterError("time {0!r} is not a sample time (sample every {1!r} up to {2!r})".format(
                time, self.dt * self.sample_stride, self.t_final))
        return index


@dataclass(eq=False)
class Trajectory:
    """
    One stochastic realization sampled every sample_stride steps.
    moments rows are (mean_x, mean_p, var_x, var_p, cov_xp); levels is the level each sample was taken on.
    """

    index: int
    sample_times: np.ndarray
    moments: np.ndarray
    levels: np.ndarray
    jumps: tuple

    @property
    def states(self):
        """the samples as GaussianState objects; for inspection, the run itself works on moments"""
        return [GaussianState.from_array(row) for row in self.moments]

    def energies(self, config):
        omegas = np.where(self.levels == 1, config.omega1, config.omega2)
        x, p, vx, vp, _ = self.moments.T
        return energy_arrays(x, p, vx, vp, omegas, config.mass)


@dataclass(eq=False)
class EnsembleAccumulator:
    """
    Mergeable per-sample sums over trajectories, jump records, and state snapshots.

    sums maps each SUM_FIELDS name to an array over sample_times. jump_times and
    jump_positions map a direction (from_level, to_level) to arrays of event times and
    mean_x at the jump. jump_counts holds one entry per accumulated trajectory.
    """

    sample_times: np.ndarray
    sums: dict
    jump_times: dict
    jump_positions: dict
    jump_counts: np.ndarray
    snapshots: dict
    count: int

    def merge(self, other):
        """
        combine two accumulators; sums add, records concatenate with self first
        """
        if not np.array_equal(self.sample_times, other.sample_times):
            raise ParameterError("cannot merge accumulators with different sample times")
        if set(self.snapshots) != set(other.snapshots):
            raise ParameterError("cannot merge accumulators with different snapshot times")
        return EnsembleAccumulator(
            sample_times=self.sample_times,
            sums={name: self.sums[name] + other.sums[name] for name in SUM_FIELDS},
            jump_times={d: np.concatenate([self.jump_times[d], other.jump_times[d]]) for d in DIRECTIONS},
            jump_positions={d: np.concatenate([self.jump_positions[d], other.jump_positions[d]]) for d in DIRECTIONS},
            jump_counts=np.concatenate([self.jump_counts, other.jump_counts]),
            snapshots={t: self.snapshots[t].concatenate(other.snapshots[t]) for t in self.snapshots},
            count=self.count + other.count,
        )

    def n_jumps(self, direction):
        return len(self.jump_positions[tuple(direction)])

    @classmethod
    def from_trajectory(cls, trajectory, config):
        """
        accumulator holding just one trajectory, built from its recorded samples.
        run_ensemble never goes through here; it is the reference the batch reduction is checked against.
        """
        x, p, vx, vp, cxp = trajectory.moments.T
        omegas = np.where(trajectory.levels == 1, config.omega1, config.omega2)
        values = _observables(x, p, vx, vp, cxp, omegas, config.mass, config.hbar)
        times = {d: [] for d in DIRECTIONS}
        positions = {d: [] for d in DIRECTIONS}
        for event in trajectory.jumps:
            times[(event.from_level, event.to_level)].append(event.time)
            positions[(event.from_level, event.to_level)].append(event.mean_x_at_jump)
        snapshots = {}
        for time in config.snapshot_times:
            j = config.sample_index(time)
            snapshots[time] = StateCollection(trajectory.moments[j:j + 1], trajectory.levels[j:j + 1], config.hbar)
        return cls(
            sample_times=trajectory.sample_times,
            sums={name: np.array(values[name], dtype=float) for name in SUM_FIELDS},
            jump_times={d: np.asarray(times[d], dtype=float) for d in DIRECTIONS},
            jump_positions={d: np.asarray(positions[d], dtype=float) for d in DIRECTIONS},
            jump_counts=np.array([len(trajectory.jumps)]),
            snapshots=snapshots,
            count=1,
        )


def trajectory_rng(master_seed, trajectory_index):
    """
    the private random stream of one trajectory, derived from (master_seed, trajectory_index) alone
    """
    return np.random.default_rng(np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(trajectory_index),)))


def merge_accumulators(accumulators):
    """
    pairwise merge in list order: ((a0 a1) (a2 a3)) ...; the tree depends only on the list length
    """
    level = list(accumulators)
    if not level:
        raise EmptyEnsembleError("nothing to merge")
    while len(level) > 1:
        merged = [level[i].merge(level[i + 1]) for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            merged.append(level[-1])
        level = merged
    return level[0]


# Batch kernel


def _observables(x, p, vx, vp, cxp, omega, mass, hbar):
    return {
        "mean_x": x,
        "mean_p": p,
        "x2": vx + x * x,
        "p2": vp + p * p,
        "xp": cxp + x * p,
        "energy": energy_arrays(x, p, vx, vp, omega, mass),
        "coherence_x": coherence_x_arrays(p, vp, hbar),
        "coherence_p": coherence_p_arrays(x, vx, hbar),
        "var_x": vx,
        "var_p": vp,
        "mean_x_sq": x * x,
    }


@dataclass(eq=False)
class _BatchResult:
    indices: np.ndarray
    sums: dict
    event_rows: np.ndarray
    event_steps: np.ndarray
    event_from: np.ndarray
    event_x: np.ndarray
    snapshots: dict
    record_moments: np.ndarray = None
    record_levels: np.ndarray = None


def _integrate(config, indices, record=False):
    """
    Step the trajectories `indices` through the whole run.

    At every step k the sample (if k is a sample step) is taken first, then the jump draw
    for the state at time k*dt, then one exact propagation over dt on the possibly new level.
    """
    indices = np.asarray(indices, dtype=np.int64)
    n = len(indices)
    n_steps = config.n_steps
    sample_of_step = {int(step): j for j, step in enumerate(config.sample_steps)}
    snapshot_of_sample = {config.sample_index(t): t for t in config.snapshot_times}
    n_samples = len(sample_of_step)

    uniforms = np.empty((n, n_steps))
    for row, index in enumerate(indices):
        uniforms[row] = trajectory_rng(config.master_seed, index).random(n_steps)

    omegas = np.array([config.omega1, config.omega2])
    c_table, a_table, b_table = rotation_coefficients(omegas, config.mass, config.dt)
    # the jump target of level index i is level index 1 - i
    target_var_x = (config.hbar / (2.0 * config.mass * omegas))[::-1]
    overlap_model = config.model is JumpKind.GROUND_OVERLAP

    start = config.initial_state
    x, p, vx, vp, cxp = (np.full(n, float(v)) for v in start.as_array())
    level = np.full(n, config.initial_level - 1, dtype=np.intp)

    sums = {name: np.zeros(n_samples) for name in SUM_FIELDS}
    snapshots = {}
    events = []
    record_moments = np.empty((n_samples, n, 5)) if record else None
    record_levels = np.empty((n_samples, n), dtype=np.int64) if record else None

    for step in range(n_steps + 1):
        j = sample_of_step.get(step)
        if j is not None:
            values = _observables(x, p, vx, vp, cxp, omegas[level], config.mass, config.hbar)
            for name in SUM_FIELDS:
                sums[name][j] = np.sum(values[name])
            if j in snapshot_of_sample:
                snapshots[snapshot_of_sample[j]] = StateCollection(np.column_stack([x, p, vx, vp, cxp]), level + 1, config.hbar)
            if record:
                record_moments[j] = np.column_stack([x, p, vx, vp, cxp])
                record_levels[j] = level + 1
        if step == n_steps:
            break

        if config.nu > 0:
            if overlap_model:
                rate = config.nu * overlap_arrays(x, p, vx, cxp, config.hbar, target_var_x[level])
            else:
                rate = config.nu
            jumped = uniforms[:, step] < rate * config.dt
            if jumped.any():
                rows = np.flatnonzero(jumped)
                events.append((rows, np.full(len(rows), step), level[rows] + 1, x[rows].copy()))
                level = np.where(jumped, 1 - level, level)

        x, p, vx, vp, cxp = rotate_moments(x, p, vx, vp, cxp, c_table[level], a_table[level], b_table[level])

    if events:
        event_rows, event_steps, event_from, event_x = (np.concatenate(parts) for parts in zip(*events))
    else:
        event_rows, event_steps, event_from = (np.empty(0, dtype=np.int64) for _ in range(3))
        event_x = np.empty(0)
    return _BatchResult(indices, sums, event_rows, event_steps, event_from, event_x, snapshots, record_moments, record_levels)


def _accumulator_from_batch(config, batch):
    times = batch.event_steps * config.dt
    jump_times, jump_positions = {}, {}
    for direction in DIRECTIONS:
        mask = batch.event_from == direction[0]
        jump_times[direction] = times[mask]
        jump_positions[direction] = batch.event_x[mask]
    return EnsembleAccumulator(
        sample_times=config.sample_times,
        sums=batch.sums,
        jump_times=jump_times,
        jump_positions=jump_positions,
        jump_counts=np.bincount(batch.event_rows, minlength=len(batch.indices)),
        snapshots=batch.snapshots,
        count=len(batch.indices),
    )


def _run_chunk(config, start, stop):
    mdc_logger.debug("simulating trajectories {0}..{1}".format(start, stop - 1))
    return _accumulator_from_batch(config, _integrate(config, np.arange(start, stop)))


# Public


def simulate_trajectory(config, trajectory_index):
    """
    Simulate one trajectory; deterministic given (config.master_seed, trajectory_index)
    """
    batch = _integrate(config, [trajectory_index], record=True)
    jumps = tuple(
        JumpEvent(float(step * config.dt), int(source), 3 - int(source), float(x))
        for step, source, x in zip(batch.event_steps, batch.event_from, batch.event_x)
    )
    return Trajectory(
        index=int(trajectory_index),
        sample_times=config.sample_times,
        moments=batch.record_moments[:, 0, :],
        levels=batch.record_levels[:, 0],
        jumps=jumps,
    )


def run_ensemble(config, threads=None):
    """
    Simulate config.n_trajectories trajectories and reduce them.

    Trajectories are cut into chunks of config.chunk_size by index; the chunks run on
    `threads` joblib workers and are merged pairwise in chunk order. The result depends on
    the chunk size but not on the number of workers.

    A StepSizeError raised in a chunk aborts the run as EnsembleAborted with the failing
    trajectory index. SimulationConfig already caps nu*dt and the overlap rate never exceeds
    nu, so a validated config does not reach that branch.
    """
    threads = THREADS if threads is None else threads
    bounds = [(start, min(start + config.chunk_size, config.n_trajectories)) for start in range(0, config.n_trajectories, config.chunk_size)]
    mdc_logger.debug("running {0} trajectories in {1} chunks on {2} workers".format(config.n_trajectories, len(bounds), threads))
    try:
        parts = Parallel(n_jobs=threads)(delayed(_run_chunk)(config, start, stop) for start, stop in bounds)
    except StepSizeError as exc:
        mdc_logger.error("ensemble aborted at trajectory {0}: {1}".format(exc.trajectory_index, exc))
        raise EnsembleAborted("trajectory {0} failed: {1}".format(exc.trajectory_index, exc), exc.trajectory_index)
    except StochOscError as exc:
        mdc_logger.error("ensemble aborted: {0}".format(exc))
        raise EnsembleAborted("ensemble aborted: {0}".format(exc))
    acc = merge_accumulators(parts)

    ensemble_counters.labels(counter='Trajectories').inc(acc.count)
    ensemble_counters.labels(counter='Jumps12').inc(acc.n_jumps((1, 2)))
    ensemble_counters.labels(counter='Jumps21').inc(acc.n_jumps((2, 1)))
    return acc


def ensemble_observables(acc):
    """
    Per-sample ensemble averages.

    var_x/var_p are the variances of the mixture (averaged raw second moments minus the
    squared averaged mean). traj_var_x/traj_var_p average the per-trajectory variances and
    spread_mean_x is the across-trajectory variance of mean_x.
    """
    if acc.count < 1:
        raise EmptyEnsembleError("accumulator holds no trajectories")
    mean = {name: acc.sums[name] / acc.count for name in SUM_FIELDS}
    return OrderedDict([
        ("time", acc.sample_times),
        ("mean_x", mean["mean_x"]),
        ("mean_p", mean["mean_p"]),
        ("var_x", mean["x2"] - mean["mean_x"] ** 2),
        ("var_p", mean["p2"] - mean["mean_p"] ** 2),
        ("energy", mean["energy"]),
        ("coherence", mean["coherence_x"]),
        ("coherence_p", mean["coherence_p"]),
        ("cov_xp", mean["xp"] - mean["mean_x"] * mean["mean_p"]),
        ("traj_var_x", mean["var_x"]),
        ("traj_var_p", mean["var_p"]),
        ("spread_mean_x", mean["mean_x_sq"] - mean["mean_x"] ** 2),
    ])


def jump_histogram(acc, direction, bins=80, extent=None):
    """
    Histogram of mean_x at the jumps in `direction` ((1, 2) or (2, 1)).
    bins is either an array of edges or a bin count over [-extent, extent]; without an
    extent the range is the largest recorded |mean_x|.
    """
    direction = tuple(direction)
    if direction not in DIRECTIONS:
        raise ParameterError("direction must be (1, 2) or (2, 1), got {0!r}".format(direction))
    positions = acc.jump_positions[direction]
    if np.ndim(bins) == 0:
        if not extent:
            extent = float(np.max(np.abs(positions))) if len(positions) else 1.0
        edges = np.linspace(-extent, extent, int(bins) + 1)
    else:
        edges = np.asarray(bins, dtype=float)
    counts, edges = np.histogram(positions, bins=edges)
    missed = len(positions) - int(counts.sum())
    if missed:
        mdc_logger.warning("{0} jumps {1}->{2} fall outside the histogram range".format(missed, *direction))
    return JumpHistogram(direction, edges, counts)
