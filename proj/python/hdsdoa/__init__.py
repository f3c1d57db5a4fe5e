# SPDX-License-Identifier: Apache-2.0
#
# hdsdoa: 2-D DOA estimation toolkit for hybrid dynamic subarray receivers
# Copyright (C) 2026 The hdsdoa authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ------------------------------------------------------------------------


"""2-D DOA estimation for hybrid dynamic subarray receivers."""

import json as _json

from ._core import (
    ConfigError,
    DimensionError,
    Estimate,
    EstimatorOptions,
    Geometry,
    Observation,
    Trial,
    crlb_fd,
    detectability_edge,
    fd_music_2d,
    forward_eigenvalue,
    imrd_music,
    invert_eigenvalue,
    manifold,
    music_2d,
    projector_weight,
    rd_music,
    rmse,
    steering_vector,
)
from . import _core

__version__ = "0.1.0"


def _config_text(config):
    return config if isinstance(config, str) else _json.dumps(config)


def simulate(config=None, trial=0):
    """Draw one trial. `config` is a dict or JSON string in the experiment format."""
    return _core.simulate(_config_text(config or {}), trial)


def run_experiment(config=None):
    """Monte Carlo sweep; returns one dict per (sweep value, algorithm)."""
    return _core.run_experiment(_config_text(config or {}))


__all__ = [
    "ConfigError",
    "DimensionError",
    "Estimate",
    "EstimatorOptions",
    "Geometry",
    "Observation",
    "Trial",
    "crlb_fd",
    "detectability_edge",
    "fd_music_2d",
    "forward_eigenvalue",
    "imrd_music",
    "invert_eigenvalue",
    "manifold",
    "music_2d",
    "projector_weight",
    "rd_music",
    "rmse",
    "run_experiment",
    "simulate",
    "steering_vector",
]
