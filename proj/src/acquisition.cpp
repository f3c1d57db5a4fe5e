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

#include "hdsdoa/acquisition.hpp"

#include <cmath>
#include <stdexcept>

namespace hdsdoa
{
    void PilotConfig::validate() const
    {
        if (n_a < 1)
            throw ConfigError("PilotConfig: n_a must be >= 1");
        if (pilots < 1)
            throw ConfigError("PilotConfig: at least one pilot is required");
        if (!std::isfinite(snr_db))
            throw ConfigError("PilotConfig: snr_db must be finite");
    }

    ComplexMatrix dft_pilots(int n)
    {
        if (n < 1)
            throw DimensionError("dft_pilots: size must be >= 1");
        ComplexMatrix P(n, n);
        const double scale = 1.0 / std::sqrt(static_cast<double>(n));
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                P(i, j) = std::polar(scale, -2.0 * pi * static_cast<double>((static_cast<long>(i) * j) % n) / n);
        return P;
    }

    ComplexMatrix draw_precoder(Rng &rng, const PathSet &paths, const UpaGeometry &tx, int n_a,
                                double max_condition, int max_tries)
    {
        if (n_a < paths.size())
            throw ConfigError("draw_precoder: N_a must be >= L");
        for (int attempt = 0; attempt < max_tries; ++attempt)
        {
            ComplexMatrix F(tx.size(), n_a);
            for (Eigen::Index j = 0; j < F.cols(); ++j)
                for (Eigen::Index i = 0; i < F.rows(); ++i)
                    F(i, j) = unit_phasor(rng);
            if (signal_condition(equivalent_signal(paths, tx, F)) < max_condition)
                return F;
        }
        throw std::runtime_error("draw_precoder: equivalent signal stays rank deficient");
    }

    double noise_variance_for_snr(const ComplexMatrix &S, double snr_db)
    {
        require_dims(S.rows() >= 1 && S.cols() >= 1, "noise_variance_for_snr: empty signal matrix");
        const double p = S.row(0).squaredNorm() / static_cast<double>(S.cols());
        return p / std::pow(10.0, snr_db / 10.0);
    }

    ComplexMatrix ObservationSet::chain_block(int q) const
    {
        if (q < 0 || q >= n_rf)
            throw DimensionError("chain_block: chain index out of range");
        return Y.middleRows(static_cast<Eigen::Index>(q) * pilots, pilots);
    }

    ObservationSet transmit_and_correct(const ChannelRealization &ch, const ComplexMatrix &precoder,
                                        const CombinerStack &stack, const UpaGeometry &rx, double sigma2, Rng &rng)
    {
        require_dims(ch.H.rows() == rx.size() && stack.n_r == rx.size(), "transmit_and_correct: N_r mismatch");
        require_dims(ch.H.cols() == precoder.rows(), "transmit_and_correct: N_t mismatch");
        if (sigma2 < 0.0)
            throw ConfigError("transmit_and_correct: sigma2 must be >= 0");

        const Eigen::Index n_a = precoder.cols();
        const int T = stack.pilots();
        const ComplexMatrix P = dft_pilots(static_cast<int>(n_a));
        // W^H H F_A P P^H = W^H H F_A exactly; the unitary product is not formed.
        const ComplexMatrix HF = ch.H * precoder;
        const double sd = std::sqrt(sigma2);

        ObservationSet obs;
        obs.geometry = rx;
        obs.n_rf = stack.n_rf;
        obs.pilots = T;
        obs.sigma2 = sigma2;
        obs.W = stack.stacked();
        obs.Y.resize(static_cast<Eigen::Index>(stack.n_rf) * T, n_a);
        for (int tau = 0; tau < T; ++tau)
        {
            const ComplexMatrix &W = stack.per_pilot[tau].W;
            ComplexMatrix Yt = W.adjoint() * HF;
            if (sigma2 > 0.0)
            {
                const ComplexMatrix N = complex_normal_matrix(rng, rx.size(), n_a, 1.0);
                Yt.noalias() += sd * ((W.adjoint() * N) * P.adjoint());
            }
            for (int q = 0; q < stack.n_rf; ++q)
                obs.Y.row(static_cast<Eigen::Index>(q) * T + tau) = Yt.row(q);
        }
        return obs;
    }

    ComplexMatrix per_chain_decomposition(const ObservationSet &obs, int q)
    {
        return obs.chain_block(q);
    }

    ComplexMatrix chain_model_by_subarray(const CombinerStack &stack, const HdsConfig &cfg, const UpaGeometry &rx,
                                          const PathSet &paths, const ComplexMatrix &S, int q)
    {
        cfg.validate(rx);
        if (q < 0 || q >= cfg.n_rf)
            throw DimensionError("chain_model_by_subarray: chain index out of range");
        require_dims(S.rows() == paths.size(), "chain_model_by_subarray: S must have L rows");

        const int ns = cfg.subarray_size();
        const ComplexMatrix As = manifold(rx, paths.doas).topRows(ns);
        const int T = stack.pilots();
        ComplexMatrix out = ComplexMatrix::Zero(T, S.cols());
        for (int p = 0; p < cfg.n_rf; ++p)
        {
            const ComplexMatrix AsPsiS = As * subarray_phase(cfg, rx, paths.doas, p) * S;
            for (int tau = 0; tau < T; ++tau)
                out.row(tau) += stack.block(tau, p, q).adjoint() * AsPsiS;
        }
        return out;
    }

    ComplexMatrix fd_observe(const ChannelRealization &ch, const ComplexMatrix &precoder, int fd_pilots,
                             double sigma2, Rng &rng)
    {
        if (fd_pilots < 1)
            throw ConfigError("fd_observe: at least one pilot is required");
        require_dims(ch.H.cols() == precoder.rows(), "fd_observe: N_t mismatch");
        const Eigen::Index n_r = ch.H.rows();
        const Eigen::Index n_a = precoder.cols();
        const ComplexMatrix HF = ch.H * precoder;
        const ComplexMatrix P = dft_pilots(static_cast<int>(n_a));
        const double sd = std::sqrt(sigma2);

        ComplexMatrix Y(n_r, n_a * fd_pilots);
        for (int tau = 0; tau < fd_pilots; ++tau)
        {
            auto block = Y.middleCols(static_cast<Eigen::Index>(tau) * n_a, n_a);
            block = HF;
            if (sigma2 > 0.0)
                block.noalias() += sd * (complex_normal_matrix(rng, n_r, n_a, 1.0) * P.adjoint());
        }
        return Y;
    }
}
