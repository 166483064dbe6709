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
from stochosc.ensemble import SimulationConfig
from stochosc.gaussian import GaussianState, OscillatorParams
from stochosc.jumps import JumpKind


@pytest.fixture
def level1():
    return OscillatorParams(0.7)


@pytest.fixture
def level2():
    return OscillatorParams(1.2)


@pytest.fixture
def initial_state():
    """
    the standard starting packet: displaced to x=2 with equal widths
    """
    return GaussianState(2.0, 0.0, 0.5, 0.5, 0.0)


@pytest.fixture
def random_states():
    """
    minimum-uncertainty Gaussians with random means, widths and chirps (hbar=1)
    """
    rng = np.random.default_rng(1234)
    states = []
    for _ in range(50):
        var_x = rng.uniform(0.2, 2.0)
        cov = rng.uniform(-0.8, 0.8)
        var_p = (0.25 + cov * cov) / var_x
        states.append(GaussianState(rng.uniform(-3, 3), rng.uniform(-2, 2), var_x, var_p, cov))
    return states


@pytest.fixture
def small_config():
    """
    a short overlap-model ensemble that runs in well under a second
    """
    return SimulationConfig(
        model=JumpKind.GROUND_OVERLAP,
        t_final=3.0,
        n_trajectories=40,
        chunk_size=16,
        master_seed=7,
        snapshot_times=(0.0, 3.0),
    )


@pytest.fixture
def constant_config():
    return SimulationConfig(
        model=JumpKind.CONSTANT_RATE,
        t_final=3.0,
        n_trajectories=40,
        chunk_size=16,
        master_seed=7,
        snapshot_times=(0.0, 3.0),
    )


@pytest.fixture
def small_document():
    """
    a config document for a tiny run that requests every artifact
    """
    return """
# tiny run
n_trajectories = 24
chunk_size = 10
t_final = 2.0
model = constant, overlap
wigner_times = 0, 2
fock_times = 2
fock_n_max = 10
grid_points = 41
fock_points = 801
"""
