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


import numpy as np
import pytest

import hdsdoa

SMALL = {
    "array": {"nx": 8, "nz": 8},
    "tx_array": {"nx": 4, "nz": 4},
    "paths": 2,
    "streams": 16,
    "n_rf": 4,
    "pilots": 6,
    "noiseless": True,
    "algorithms": ["rd-music", "imrd-music"],
    "trials": 2,
    "sweep": {"param": "snr_db", "values": [10]},
    "timing": False,
}


def test_steering_vector_is_unit_modulus():
    g = hdsdoa.Geometry.half_wavelength(4, 4)
    a = hdsdoa.steering_vector(g, 20.0, 10.0)
    assert a.shape == (16,)
    assert np.allclose(np.abs(a), 1.0)
    A = hdsdoa.manifold(g, np.array([[20.0, 10.0], [-5.0, 30.0]]))
    assert A.shape == (16, 2)
    assert np.allclose(A[:, 0], a)


def test_spike_map_round_trip():
    lam = hdsdoa.forward_eigenvalue(1.0, 1.0, 2.0)
    assert lam == pytest.approx(4.5)
    assert hdsdoa.invert_eigenvalue(lam, 1.0, 1.0) == pytest.approx(2.0)
    assert hdsdoa.projector_weight(2.0, 1.0, 1.0) == pytest.approx(0.5)


def test_noiseless_trial_is_recovered():
    trial = hdsdoa.simulate(SMALL, 0)
    obs = trial.observation
    assert obs.Y.shape == (4 * 6, 16)
    assert obs.sigma2 == 0.0
    for estimator in (hdsdoa.rd_music, hdsdoa.imrd_music):
        est = estimator(obs, 2)
        assert est.resolved
        assert hdsdoa.rmse(trial.doas, est.doas) < 0.05


def test_digital_search_and_bound():
    cfg = dict(SMALL, noiseless=False)
    trial = hdsdoa.simulate(cfg, 1)
    opts = hdsdoa.EstimatorOptions()
    opts.grid_step = 1.0
    Y = trial.digital_snapshots(2, seed=5)
    assert Y.shape == (64, 32)
    est = hdsdoa.fd_music_2d(Y, trial.rx, 2, opts)
    assert est.doas.shape == (2, 2)
    bound = hdsdoa.crlb_fd(trial.rx, trial.doas, trial.S, trial.sigma2, 2)
    assert bound.shape == (4, 4)
    assert np.all(np.diag(bound) > 0)
    assert np.all(np.diag(trial.crlb()) >= np.diag(bound))


def test_run_experiment_rows():
    rows = hdsdoa.run_experiment(SMALL)
    assert [r["algorithm"] for r in rows] == ["rd-music", "imrd-music"]
    assert all(r["rmse_deg"] < 0.05 for r in rows)
    assert rows[0]["mean_ms"] is None


def test_bad_config_raises():
    with pytest.raises(ValueError):
        hdsdoa.run_experiment({"trails": 3})
