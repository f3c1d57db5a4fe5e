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

#include <vector>

#include "hdsdoa/geometry.hpp"
#include "hdsdoa/random.hpp"

namespace hdsdoa
{
    /// L propagation paths. Path 0 is the LOS reference with unit gain.
    struct PathSet
    {
        std::vector<DoaPair> doas; // receive side
        std::vector<DoaPair> dods; // transmit side
        std::vector<cd> gains;

        int size() const { return static_cast<int>(doas.size()); }
    };

    struct PathDrawOptions
    {
        double nlos_attenuation_min_db = 5.0;
        double nlos_attenuation_max_db = 10.0;
        double min_elevation_separation_deg = 3.0;
        double max_abs_elevation_deg = 89.0;
        double max_abs_azimuth_deg = 90.0;
    };

    /// Draws L paths. Azimuths are uniform on [-180, 180], folded into
    /// [-90, 90] and kept when within +-max_abs_azimuth_deg; elevations are
    /// uniform on +-max_abs_elevation_deg with a minimum pairwise elevation
    /// separation (rejection sampling). DODs use the same limits.
    PathSet draw_paths(Rng &rng, int L, const PathDrawOptions &opt = {});

    struct ChannelRealization
    {
        PathSet paths;
        ComplexMatrix H; // N_r x N_t
    };

    /// H = A_r diag(gains) A_t^H.
    ChannelRealization build_channel(const PathSet &paths, const UpaGeometry &rx, const UpaGeometry &tx);

    /// H accumulated path by path, sum_l gain_l a_r,l a_t,l^H.
    ComplexMatrix channel_path_sum(const PathSet &paths, const UpaGeometry &rx, const UpaGeometry &tx);

    /// S = diag(gains) A_t^H F_A, L x N_a.
    ComplexMatrix equivalent_signal(const PathSet &paths, const UpaGeometry &tx, const ComplexMatrix &precoder);

    /// Row-space conditioning of S (sigma_max / sigma_L); +inf when S lacks
    /// full row rank, including S = 0.
    double signal_condition(const ComplexMatrix &S);
}
