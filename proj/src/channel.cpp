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

#include "hdsdoa/channel.hpp"

#include <cmath>
#include <limits>

namespace hdsdoa
{
    PathSet draw_paths(Rng &rng, int L, const PathDrawOptions &opt)
    {
        if (L < 1)
            throw ConfigError("draw_paths: at least one path is required");
        const double emax = opt.max_abs_elevation_deg;
        const double amax = opt.max_abs_azimuth_deg;
        if (!(emax > 0.0 && emax <= 90.0) || !(amax > 0.0 && amax <= 90.0))
            throw ConfigError("draw_paths: angle limits must lie in (0, 90]");
        const auto azimuth = [&] {
            for (;;)
            {
                const double th = fold_azimuth(uniform(rng, -180.0, 180.0));
                if (std::abs(th) <= amax)
                    return th;
            }
        };
        if (L > 1 && opt.min_elevation_separation_deg * (L - 1) > 2.0 * emax)
            throw ConfigError("draw_paths: elevation separation cannot be met");

        PathSet p;
        p.doas.reserve(L);
        p.dods.reserve(L);
        p.gains.reserve(L);
        for (int l = 0; l < L; ++l)
        {
            DoaPair doa;
            for (;;)
            {
                doa.theta = azimuth();
                doa.phi = uniform(rng, -emax, emax);
                bool ok = true;
                for (const DoaPair &other : p.doas)
                    ok = ok && std::abs(other.phi - doa.phi) >= opt.min_elevation_separation_deg;
                if (ok)
                    break;
            }
            DoaPair dod;
            dod.theta = azimuth();
            dod.phi = uniform(rng, -emax, emax);

            cd gain(1.0, 0.0);
            if (l > 0)
            {
                const double att_db = uniform(rng, opt.nlos_attenuation_min_db, opt.nlos_attenuation_max_db);
                gain = std::pow(10.0, -att_db / 20.0) * unit_phasor(rng);
            }
            p.doas.push_back(doa);
            p.dods.push_back(dod);
            p.gains.push_back(gain);
        }
        return p;
    }

    ChannelRealization build_channel(const PathSet &paths, const UpaGeometry &rx, const UpaGeometry &tx)
    {
        const ComplexMatrix Ar = manifold(rx, paths.doas);
        const ComplexMatrix At = manifold(tx, paths.dods);
        const ComplexVector g = Eigen::Map<const ComplexVector>(paths.gains.data(), paths.size());
        ChannelRealization ch;
        ch.paths = paths;
        ch.H = Ar * g.asDiagonal() * At.adjoint();
        return ch;
    }

    ComplexMatrix channel_path_sum(const PathSet &paths, const UpaGeometry &rx, const UpaGeometry &tx)
    {
        ComplexMatrix H = ComplexMatrix::Zero(rx.size(), tx.size());
        for (int l = 0; l < paths.size(); ++l)
            H += paths.gains[l] * steering_vector(rx, paths.doas[l]) * steering_vector(tx, paths.dods[l]).adjoint();
        return H;
    }

    ComplexMatrix equivalent_signal(const PathSet &paths, const UpaGeometry &tx, const ComplexMatrix &precoder)
    {
        require_dims(precoder.rows() == tx.size(), "equivalent_signal: precoder rows must equal N_t");
        const ComplexMatrix At = manifold(tx, paths.dods);
        const ComplexVector g = Eigen::Map<const ComplexVector>(paths.gains.data(), paths.size());
        return g.asDiagonal() * (At.adjoint() * precoder);
    }

    double signal_condition(const ComplexMatrix &S)
    {
        if (S.size() == 0 || S.rows() > S.cols())
            return std::numeric_limits<double>::infinity();
        Eigen::JacobiSVD<ComplexMatrix> svd(S);
        const RealVector &s = svd.singularValues();
        const double smin = s(S.rows() - 1);
        if (!(s(0) > 0.0) || !(smin > 0.0))
            return std::numeric_limits<double>::infinity();
        return s(0) / smin;
    }
}
