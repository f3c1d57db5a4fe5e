// SPDX-License-Identifier: Apache-2.0
//
// hdsdoa: 2-D DOA estimation toolkit for hybrid dynamic subarray receivers
// Copyright (C) 2026 The hdsdoa authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "hdsdoa/channel.hpp"
#include "hdsdoa/hds.hpp"

namespace hdsdoa
{
    struct PilotConfig
    {
        int n_a = 128;  // data streams, also the pilot length N_p
        int pilots = 12; // T
        double snr_db = 10.0;

        void validate() const;
    };

    /// Unitary DFT matrix of size n, so P P^H = I.
    ComplexMatrix dft_pilots(int n);

    /// Unit-modulus analog precoder N_t x N_a, redrawn until the equivalent
    /// signal of `paths` has condition number below `max_condition`.
    /// Throws std::runtime_error when `max_tries` draws all fail.
    ComplexMatrix draw_precoder(Rng &rng, const PathSet &paths, const UpaGeometry &tx, int n_a,
                                double max_condition = 1e6, int max_tries = 100);

    /// Per-element, per-sample noise variance giving `snr_db` against the LOS
    /// row of S: sigma^2 = (|S_0|^2 / N_a) / 10^(snr/10).
    double noise_variance_for_snr(const ComplexMatrix &S, double snr_db);

    /// Reconstructed observation of the hybrid receiver.
    struct ObservationSet
    {
        ComplexMatrix Y; // (N_RF T) x N_a, row q * T + tau
        ComplexMatrix W; // stacked combiner N_r x (N_RF T)
        UpaGeometry geometry;
        int n_rf = 0;
        int pilots = 0;
        double sigma2 = 0.0;

        int n_a() const { return static_cast<int>(Y.cols()); }
        /// Ybar_q, the T x N_a block of chain q.
        ComplexMatrix chain_block(int q) const;
    };

    /// Y_tau = (W_tau^H (H F_A P + N_tau)) P^H for each pilot tau with
    /// independent N_tau ~ CN(0, sigma2), then stacked chain-major.
    /// Noise is drawn with unit variance and scaled, so one noise stream gives
    /// common random numbers across SNR values. sigma2 = 0 skips the draw.
    ObservationSet transmit_and_correct(const ChannelRealization &ch, const ComplexMatrix &precoder,
                                        const CombinerStack &stack, const UpaGeometry &rx, double sigma2, Rng &rng);

    /// Rows of chain q (0-based) in `obs`.
    ComplexMatrix per_chain_decomposition(const ObservationSet &obs, int q);

    /// Noiseless chain-q block assembled subarray by subarray:
    /// sum_p w_{p,q,tau}^H A_s Psi_p S, with A_s the steering matrix of subarray 0.
    ComplexMatrix chain_model_by_subarray(const CombinerStack &stack, const HdsConfig &cfg, const UpaGeometry &rx,
                                          const PathSet &paths, const ComplexMatrix &S, int q);

    /// Fully digital observations with T_d pilot blocks: N_r x (N_a T_d),
    /// block tau = (H F_A P + N_tau) P^H.
    ComplexMatrix fd_observe(const ChannelRealization &ch, const ComplexMatrix &precoder, int fd_pilots,
                             double sigma2, Rng &rng);
}
