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

#include <cstdint>
#include <random>

#include "hdsdoa/numerics.hpp"

namespace hdsdoa
{
    using Rng = std::mt19937_64;

    /// SplitMix64 finalizer, used to derive independent stream seeds.
    constexpr std::uint64_t splitmix64(std::uint64_t x)
    {
        x += 0x9E3779B97F4A7C15ull;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

    /// Seed of stream `salt` within trial `trial` of an experiment seeded
    /// with `base`: splitmix64(splitmix64(base ^ trial) + salt).
    constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t trial, std::uint64_t salt = 0)
    {
        return splitmix64(splitmix64(base ^ trial) + salt);
    }

    inline double uniform(Rng &rng, double lo, double hi)
    {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    }

    inline cd unit_phasor(Rng &rng)
    {
        return std::polar(1.0, uniform(rng, 0.0, 2.0 * pi));
    }

    /// Circular complex Gaussian CN(0, variance).
    inline cd complex_normal(Rng &rng, double variance)
    {
        std::normal_distribution<double> n(0.0, std::sqrt(0.5 * variance));
        const double re = n(rng);
        const double im = n(rng);
        return {re, im};
    }

    inline ComplexMatrix complex_normal_matrix(Rng &rng, Eigen::Index rows, Eigen::Index cols, double variance)
    {
        ComplexMatrix m(rows, cols);
        std::normal_distribution<double> n(0.0, std::sqrt(0.5 * variance));
        for (Eigen::Index j = 0; j < cols; ++j)
            for (Eigen::Index i = 0; i < rows; ++i)
            {
                const double re = n(rng);
                const double im = n(rng);
                m(i, j) = cd(re, im);
            }
        return m;
    }
}
