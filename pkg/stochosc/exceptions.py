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
Custom Exceptions
"""


class StochOscError(Exception):
    """A base class for stochosc exceptions."""

    def __init__(self, message):
        super(StochOscError, self).__init__(message)


class ParameterError(StochOscError):
    """oscillator parameters, a state, or a simulation config are out of range"""


class StepSizeError(StochOscError):
    """rate*dt exceeds the Bernoulli thinning cap; dt is too coarse for the requested rate"""

    def __init__(self, message, trajectory_index=None):
        super(StepSizeError, self).__init__(message)
        self.trajectory_index = trajectory_index

    def __reduce__(self):
        return (self.__class__, (self.args[0], self.trajectory_index))


class EmptyEnsembleError(StochOscError):
    """an ensemble reduction was asked for over zero states or trajectories"""


class ResolutionError(StochOscError):
    """a quadrature grid does not resolve the requested Hermite functions"""


class ConfigError(StochOscError):
    """a run configuration document could not be parsed or validated"""

    def __init__(self, message, line=None, key=None):
        where = []
        if line is not None:
            where.append("line {0}".format(line))
        if key is not None:
            where.append("key '{0}'".format(key))
        if where:
            message = "{0}: {1}".format(", ".join(where), message)
        super(ConfigError, self).__init__(message)
        self.line = line
        self.key = key


class PresetNotFound(StochOscError):
    """a preset name is not known"""


class EnsembleAborted(StochOscError):
    """a trajectory failed and the ensemble run was abandoned"""

    def __init__(self, message, trajectory_index=None):
        super(EnsembleAborted, self).__init__(message)
        self.trajectory_index = trajectory_index

    def __reduce__(self):
        return (self.__class__, (self.args[0], self.trajectory_index))


class OutputError(StochOscError):
    """the output directory cannot be written"""
