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

#include "hdsdoa/hds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hdsdoa
{
    std::string to_string(Architecture a)
    {
        switch (a)
        {
        case Architecture::Hfc:
            return "hfc";
        case Architecture::Hs:
            return "hs";
        case Architecture::HdsOverlap:
            return "hds-overlap";
        case Architecture::HdsRandom:
            return "hds-random";
        }
        return "unknown";
    }

    Architecture parse_architecture(std::string_view s)
    {
        if (s == "hfc")
            return Architecture::Hfc;
        if (s == "hs")
            return Architecture::Hs;
        if (s == "hds-overlap")
            return Architecture::HdsOverlap;
        if (s == "hds-random")
            return Architecture::HdsRandom;
        throw ConfigError("unknown architecture '" + std::string(s) + "'");
    }

    void HdsConfig::validate() const
    {
        if (n_rf < 1 || n_r < 1)
            throw ConfigError("HdsConfig: n_rf and n_r must be >= 1");
        if (n_r % n_rf != 0)
            throw ConfigError("HdsConfig: n_r must be divisible by n_rf");
        if (!(rho > 0.0) || rho > 1.0)
            throw ConfigError("HdsConfig: rho must lie in (0, 1]");
        if (special_pair && n_rf < 3)
            throw ConfigError("HdsConfig: the special pair layout needs n_rf >= 3");
    }

    void HdsConfig::validate(const UpaGeometry &g) const
    {
        validate();
        if (g.size() != n_r)
            throw ConfigError("HdsConfig: n_r does not match the array size");
        if (g.nz % n_rf != 0)
            throw ConfigError("HdsConfig: nz must be divisible by n_rf (z-slab subarrays)");
    }

    ComplexMatrix CombinerStack::stacked() const
    {
        const int T = pilots();
        ComplexMatrix Wt(n_r, n_rf * T);
        for (int q = 0; q < n_rf; ++q)
            for (int tau = 0; tau < T; ++tau)
                Wt.col(q * T + tau) = per_pilot[tau].W.col(q);
        return Wt;
    }

    RealMatrix CombinerStack::switch_mask(int tau) const
    {
        const int ns = subarray_size();
        const SwitchPattern &sw = per_pilot.at(tau).switches;
        RealMatrix m = RealMatrix::Zero(n_r, n_rf);
        for (int p = 0; p < n_rf; ++p)
            for (int q = 0; q < n_rf; ++q)
                if (sw(p, q))
                    m.block(p * ns, q, ns, 1).setOnes();
        return m;
    }

    ComplexVector CombinerStack::block(int tau, int p, int q) const
    {
        const int ns = subarray_size();
        return per_pilot.at(tau).W.block(p * ns, q, ns, 1);
    }

    int CombinerStack::closed_switches(int tau) const
    {
        return static_cast<int>(per_pilot.at(tau).switches.count());
    }

    namespace
    {
        int uniform_index(Rng &rng, int n)
        {
            return std::uniform_int_distribution<int>(0, n - 1)(rng);
        }

        SwitchPattern draw_switches(Rng &rng, const HdsConfig &cfg)
        {
            const int n = cfg.n_rf;
            SwitchPattern sw = SwitchPattern::Constant(n, n, false);
            switch (cfg.arch)
            {
            case Architecture::Hfc:
                sw.setConstant(true);
                break;
            case Architecture::Hs:
                for (int p = 0; p < n; ++p)
                    sw(p, p) = true;
                break;
            case Architecture::HdsOverlap:
            {
                const int k = std::clamp(static_cast<int>(std::lround(cfg.rho * n)), 1, n);
                std::vector<int> idx(n);
                std::iota(idx.begin(), idx.end(), 0);
                std::shuffle(idx.begin(), idx.end(), rng);
                for (int q = 0; q < n; ++q)
                    for (int i = 0; i < k; ++i)
                        sw((idx[i] + q) % n, q) = true;
                break;
            }
            case Architecture::HdsRandom:
            {
                if (cfg.rho >= 1.0)
                {
                    sw.setConstant(true);
                    break;
                }
                std::bernoulli_distribution closed(cfg.rho);
                for (int q = 0; q < n; ++q)
                    for (int p = 0; p < n; ++p)
                        sw(p, q) = closed(rng);
                for (int p = 0; p < n; ++p)
                    if (!sw.row(p).any())
                        sw(p, uniform_index(rng, n)) = true;
                for (int q = 0; q < n; ++q)
                    if (!sw.col(q).any())
                        sw(uniform_index(rng, n), q) = true;
                break;
            }
            }
            return sw;
        }

        void assemble(PilotCombiner &pc, int n_s)
        {
            const Eigen::Index n = pc.switches.rows();
            pc.W = ComplexMatrix::Zero(pc.phases.rows(), pc.phases.cols());
            for (Eigen::Index p = 0; p < n; ++p)
                for (Eigen::Index q = 0; q < n; ++q)
                    if (pc.switches(p, q))
                        pc.W.block(p * n_s, q, n_s, 1) = pc.phases.block(p * n_s, q, n_s, 1);
        }
    }

    CombinerStack build_combiner(Rng &rng, const HdsConfig &cfg, int T)
    {
        cfg.validate();
        if (T < 1)
            throw ConfigError("build_combiner: at least one pilot is required");

        CombinerStack stack;
        stack.n_rf = cfg.n_rf;
        stack.n_r = cfg.n_r;
        stack.per_pilot.resize(T);
        const double amp = 1.0 / std::sqrt(static_cast<double>(cfg.n_r));
        for (PilotCombiner &pc : stack.per_pilot)
        {
            pc.phases.resize(cfg.n_r, cfg.n_rf);
            for (Eigen::Index q = 0; q < pc.phases.cols(); ++q)
                for (Eigen::Index i = 0; i < pc.phases.rows(); ++i)
                    pc.phases(i, q) = amp * unit_phasor(rng);
            pc.switches = draw_switches(rng, cfg);
            assemble(pc, cfg.subarray_size());
        }
        if (cfg.special_pair)
            stack = apply_special_pair(std::move(stack), cfg);
        return stack;
    }

    CombinerStack apply_special_pair(CombinerStack stack, const HdsConfig &cfg)
    {
        const int n = stack.n_rf;
        if (n < 3)
            throw ConfigError("apply_special_pair: n_rf must be >= 3");
        if (n != cfg.n_rf || stack.n_r != cfg.n_r)
            throw DimensionError("apply_special_pair: stack does not match config");
        const int ns = stack.subarray_size();
        for (PilotCombiner &pc : stack.per_pilot)
        {
            pc.switches.col(0).setConstant(true);
            pc.switches(n - 1, 0) = false;
            pc.switches.col(1).setConstant(true);
            pc.switches(0, 1) = false;
            for (int i = 0; i + 1 < n; ++i)
                pc.phases.block((i + 1) * ns, 1, ns, 1) = pc.phases.block(i * ns, 0, ns, 1);
            assemble(pc, ns);
        }
        return stack;
    }

    ComplexMatrix subarray_phase(const HdsConfig &cfg, const UpaGeometry &g, std::span<const DoaPair> doas, int p)
    {
        cfg.validate(g);
        if (p < 0 || p >= cfg.n_rf)
            throw DimensionError("subarray_phase: subarray index out of range");
        const double rows_per_slab = static_cast<double>(g.nz) / cfg.n_rf;
        const Eigen::Index L = static_cast<Eigen::Index>(doas.size());
        ComplexMatrix psi = ComplexMatrix::Zero(L, L);
        for (Eigen::Index l = 0; l < L; ++l)
        {
            const double beta = p * rows_per_slab * std::sin(doas[l].phi * deg2rad);
            psi(l, l) = std::polar(1.0, 2.0 * pi * g.spacing_in_wavelengths() * beta);
        }
        return psi;
    }

    ComplexMatrix shift_operator(const HdsConfig &cfg, const UpaGeometry &g, std::span<const DoaPair> doas)
    {
        return subarray_phase(cfg, g, doas, 1);
    }
}
