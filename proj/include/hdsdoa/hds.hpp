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

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hdsdoa/geometry.hpp"
#include "hdsdoa/random.hpp"

namespace hdsdoa
{
    /// Switch-network families. HS and HFC are the rho = 1/N_RF and rho = 1
    /// limits of the dynamic subarray receiver.
    enum class Architecture
    {
        Hfc,
        Hs,
        HdsOverlap,
        HdsRandom
    };

    std::string to_string(Architecture a);
    Architecture parse_architecture(std::string_view s);

    /// The array is cut into n_rf subarrays of n_r / n_rf elements each. With
    /// x-fastest element ordering subarray p is the contiguous index range
    /// [p * n_s, (p + 1) * n_s), i.e. a slab of nz / n_rf rows along z.
    struct HdsConfig
    {
        int n_rf = 8;
        int n_r = 256;
        double rho = 0.5; // fraction of the n_rf^2 switches that are closed
        Architecture arch = Architecture::HdsRandom;
        bool special_pair = false; // chains 0 and 1 in the shifted-pair layout

        int subarray_size() const { return n_r / n_rf; }
        void validate() const;
        /// Additional checks that need the array shape (z-slab partition).
        void validate(const UpaGeometry &g) const;
    };

    /// Block-level switch state: entry (p, q) closed connects subarray p to chain q.
    using SwitchPattern = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

    struct PilotCombiner
    {
        SwitchPattern switches; // n_rf x n_rf
        ComplexMatrix phases;   // M_P, n_r x n_rf, entries of modulus 1/sqrt(n_r)
        ComplexMatrix W;        // W_A = M_S .* M_P
    };

    /// Analog combiners for T pilots.
    struct CombinerStack
    {
        int n_rf = 0;
        int n_r = 0;
        std::vector<PilotCombiner> per_pilot;

        int pilots() const { return static_cast<int>(per_pilot.size()); }
        int subarray_size() const { return n_r / n_rf; }

        /// W~ = [W_1bar, ..., W_Nrf bar], column q * T + tau holds chain q at pilot tau.
        ComplexMatrix stacked() const;

        /// Expanded binary M_S for pilot tau (n_r x n_rf).
        RealMatrix switch_mask(int tau) const;

        /// Combining vector w_{p,q,tau} (length n_s).
        ComplexVector block(int tau, int p, int q) const;

        int closed_switches(int tau) const;
    };

    /// Builds T per-pilot combiners. Phases are redrawn for every pilot.
    /// HS: block diagonal. HFC: all closed. HDS-overlap: chain 0 picks
    /// round(rho * n_rf) random subarrays, chain q uses that set shifted by q
    /// (mod n_rf). HDS-random: Bernoulli(rho) per switch, then every empty
    /// row and column gets one uniformly chosen switch closed.
    /// When cfg.special_pair is set the pair layout is applied afterwards.
    CombinerStack build_combiner(Rng &rng, const HdsConfig &cfg, int T);

    /// Rewires chains 0 and 1: chain 0 to subarrays 0..n_rf-2, chain 1 to
    /// 1..n_rf-1, with w_{i+1,1} = w_{i,0}. Requires n_rf >= 3.
    CombinerStack apply_special_pair(CombinerStack stack, const HdsConfig &cfg);

    /// Psi_p: diagonal phase offset between subarray p (0-based) and subarray 0.
    ComplexMatrix subarray_phase(const HdsConfig &cfg, const UpaGeometry &g, std::span<const DoaPair> doas, int p);

    /// Psi = Psi_1, the rotation between the paired chains.
    ComplexMatrix shift_operator(const HdsConfig &cfg, const UpaGeometry &g, std::span<const DoaPair> doas);
}
