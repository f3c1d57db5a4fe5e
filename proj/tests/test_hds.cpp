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


#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "hdsdoa/hds.hpp"

using namespace hdsdoa;
using Catch::Matchers::WithinAbs;

namespace
{
    HdsConfig config(Architecture arch, int n_rf = 8, int n_r = 64, double rho = 0.5)
    {
        HdsConfig cfg;
        cfg.arch = arch;
        cfg.n_rf = n_rf;
        cfg.n_r = n_r;
        cfg.rho = rho;
        return cfg;
    }

    bool block_is_zero(const CombinerStack &s, int tau, int p, int q)
    {
        return s.block(tau, p, q).cwiseAbs().maxCoeff() == 0.0;
    }
}

TEST_CASE("architecture names round-trip")
{
    for (Architecture a : {Architecture::Hfc, Architecture::Hs, Architecture::HdsOverlap, Architecture::HdsRandom})
        CHECK(parse_architecture(to_string(a)) == a);
    CHECK_THROWS_AS(parse_architecture("fully-connected"), ConfigError);
}

TEST_CASE("HS is block diagonal")
{
    Rng rng(3);
    const HdsConfig cfg = config(Architecture::Hs, 4, 32);
    const CombinerStack s = build_combiner(rng, cfg, 5);
    for (int tau = 0; tau < s.pilots(); ++tau)
    {
        CHECK(s.closed_switches(tau) == 4);
        for (int p = 0; p < 4; ++p)
            for (int q = 0; q < 4; ++q)
                CHECK(block_is_zero(s, tau, p, q) == (p != q));
    }
}

TEST_CASE("HFC has no zero blocks and unit-modulus scaled entries")
{
    Rng rng(4);
    const HdsConfig cfg = config(Architecture::Hfc, 4, 32);
    const CombinerStack s = build_combiner(rng, cfg, 3);
    for (int tau = 0; tau < s.pilots(); ++tau)
    {
        CHECK(s.closed_switches(tau) == 16);
        const ComplexMatrix &W = s.per_pilot[tau].W;
        CHECK(W.cwiseAbs().minCoeff() > 0.0);
        CHECK_THAT(W.cwiseAbs().maxCoeff(), WithinAbs(1.0 / std::sqrt(32.0), 1e-15));
    }
}

TEST_CASE("random switches close a rho fraction")
{
    Rng rng(5);
    const HdsConfig cfg = config(Architecture::HdsRandom, 8, 64, 0.5);
    long closed = 0, total = 0;
    for (int k = 0; k < 10000; ++k)
    {
        const CombinerStack s = build_combiner(rng, cfg, 1);
        closed += s.closed_switches(0);
        total += 64;
    }
    CHECK_THAT(static_cast<double>(closed) / total, WithinAbs(0.5, 0.02));
}

TEST_CASE("random switches never leave a chain or subarray idle")
{
    Rng rng(6);
    const HdsConfig cfg = config(Architecture::HdsRandom, 4, 16, 0.25);
    for (int k = 0; k < 500; ++k)
    {
        const SwitchPattern sw = build_combiner(rng, cfg, 1).per_pilot[0].switches;
        for (int i = 0; i < 4; ++i)
        {
            CHECK(sw.row(i).any());
            CHECK(sw.col(i).any());
        }
    }
}

TEST_CASE("overlap layout closes the same count on every chain")
{
    Rng rng(7);
    for (double rho : {0.125, 0.25, 0.5, 0.75})
    {
        const HdsConfig cfg = config(Architecture::HdsOverlap, 8, 64, rho);
        const CombinerStack s = build_combiner(rng, cfg, 4);
        const int k = static_cast<int>(std::lround(rho * 8));
        for (int tau = 0; tau < s.pilots(); ++tau)
        {
            const SwitchPattern &sw = s.per_pilot[tau].switches;
            for (int q = 0; q < 8; ++q)
            {
                CHECK(sw.col(q).count() == k);
                CHECK(sw.row(q).count() == k);
            }
        }
    }
}

TEST_CASE("rho limits reduce to the static layouts")
{
    Rng rng(8);
    for (Architecture a : {Architecture::HdsOverlap, Architecture::HdsRandom})
    {
        const CombinerStack s = build_combiner(rng, config(a, 4, 32, 1.0), 2);
        CHECK(s.closed_switches(0) == 16);
        CHECK(s.closed_switches(1) == 16);
    }
    // One switch per chain and per subarray: HS up to a relabeling of chains.
    const CombinerStack s = build_combiner(rng, config(Architecture::HdsOverlap, 4, 32, 0.25), 3);
    for (int tau = 0; tau < s.pilots(); ++tau)
    {
        const SwitchPattern &sw = s.per_pilot[tau].switches;
        CHECK(sw.count() == 4);
        for (int i = 0; i < 4; ++i)
            CHECK((sw.row(i).count() == 1 && sw.col(i).count() == 1));
    }
}

TEST_CASE("switch mask and stacked layout")
{
    Rng rng(9);
    const HdsConfig cfg = config(Architecture::HdsRandom, 4, 16, 0.5);
    const CombinerStack s = build_combiner(rng, cfg, 3);
    for (int tau = 0; tau < 3; ++tau)
    {
        const ComplexMatrix &P = s.per_pilot[tau].phases;
        const ComplexMatrix masked = s.switch_mask(tau).cast<cd>().cwiseProduct(P);
        CHECK((masked - s.per_pilot[tau].W).norm() == 0.0);
    }
    const ComplexMatrix Wt = s.stacked();
    CHECK(Wt.rows() == 16);
    CHECK(Wt.cols() == 12);
    for (int q = 0; q < 4; ++q)
        for (int tau = 0; tau < 3; ++tau)
            CHECK((Wt.col(q * 3 + tau) - s.per_pilot[tau].W.col(q)).norm() == 0.0);
}

TEST_CASE("special pair shifts chain 0 down one subarray")
{
    Rng rng(10);
    HdsConfig cfg = config(Architecture::HdsRandom, 8, 64, 0.5);
    cfg.special_pair = true;
    const CombinerStack s = build_combiner(rng, cfg, 4);
    for (int tau = 0; tau < s.pilots(); ++tau)
    {
        for (int i = 0; i + 1 < 8; ++i)
        {
            CHECK((s.block(tau, i + 1, 1) - s.block(tau, i, 0)).norm() == 0.0);
            CHECK_FALSE(block_is_zero(s, tau, i, 0));
        }
        CHECK(block_is_zero(s, tau, 7, 0));
        CHECK(block_is_zero(s, tau, 0, 1));
        CHECK(numerical_rank(s.per_pilot[tau].W) == 8);
    }
}

TEST_CASE("special pair needs three chains")
{
    HdsConfig cfg = config(Architecture::HdsRandom, 2, 16, 0.5);
    cfg.special_pair = true;
    Rng rng(1);
    CHECK_THROWS_AS(build_combiner(rng, cfg, 1), ConfigError);
}

TEST_CASE("subarray phase")
{
    const UpaGeometry g = UpaGeometry::half_wavelength(8, 32);
    const HdsConfig cfg = config(Architecture::HdsRandom, 8, 256);
    const std::vector<DoaPair> flat{{20.0, 0.0}, {-40.0, 0.0}};
    const ComplexMatrix I = subarray_phase(cfg, g, flat, 5);
    CHECK((I - ComplexMatrix::Identity(2, 2)).norm() < 1e-15);

    const std::vector<DoaPair> tilted{{0.0, std::asin(0.1) / deg2rad}};
    const ComplexMatrix psi = shift_operator(cfg, g, tilted);
    CHECK_THAT(std::abs(psi(0, 0)), WithinAbs(1.0, 1e-15));
    CHECK_THAT(std::arg(psi(0, 0)), WithinAbs(0.4 * pi, 1e-12));
    const ComplexMatrix psi3 = subarray_phase(cfg, g, tilted, 3);
    CHECK(std::abs(psi3(0, 0) - std::pow(psi(0, 0), 3)) < 1e-12);
    CHECK_THROWS_AS(subarray_phase(cfg, g, tilted, 8), DimensionError);
}

TEST_CASE("special pair output is the chain 0 output rotated by the shift")
{
    Rng rng(11);
    const UpaGeometry g = UpaGeometry::half_wavelength(4, 16);
    HdsConfig cfg = config(Architecture::HdsRandom, 4, 64, 0.5);
    cfg.special_pair = true;
    const std::vector<DoaPair> doas{{10.0, 15.0}, {-30.0, -20.0}, {45.0, 40.0}};
    const int T = 6;
    const CombinerStack s = build_combiner(rng, cfg, T);
    const ComplexMatrix S = complex_normal_matrix(rng, 3, 12, 1.0);

    UpaGeometry sub = g;
    sub.nz = g.nz / cfg.n_rf;
    const ComplexMatrix As = manifold(sub, doas);
    const ComplexMatrix psi = shift_operator(cfg, g, doas);

    const ComplexMatrix A = manifold(g, doas);
    ComplexMatrix B0(T, 3);
    for (int tau = 0; tau < T; ++tau)
    {
        Eigen::RowVectorXcd acc = Eigen::RowVectorXcd::Zero(3);
        for (int p = 0; p < cfg.n_rf; ++p)
            acc += s.block(tau, p, 0).adjoint() * As * subarray_phase(cfg, g, doas, p);
        B0.row(tau) = acc;
    }
    ComplexMatrix Y0(T, 12), Y1(T, 12);
    for (int tau = 0; tau < T; ++tau)
    {
        Y0.row(tau) = s.per_pilot[tau].W.col(0).adjoint() * A * S;
        Y1.row(tau) = s.per_pilot[tau].W.col(1).adjoint() * A * S;
    }
    CHECK((Y0 - B0 * S).norm() < 1e-10 * Y0.norm());
    CHECK((Y1 - B0 * psi * S).norm() < 1e-10 * Y1.norm());
}

TEST_CASE("config validation")
{
    CHECK_THROWS_AS(config(Architecture::Hs, 3, 64).validate(), ConfigError);
    CHECK_THROWS_AS(config(Architecture::HdsRandom, 8, 64, 0.0).validate(), ConfigError);
    CHECK_THROWS_AS(config(Architecture::HdsRandom, 8, 64, 1.5).validate(), ConfigError);
    CHECK_THROWS_AS(config(Architecture::HdsRandom, 8, 64).validate(UpaGeometry::half_wavelength(16, 4)), ConfigError);
    Rng rng(1);
    CHECK_THROWS_AS(build_combiner(rng, config(Architecture::Hs, 4, 32), 0), ConfigError);
}
