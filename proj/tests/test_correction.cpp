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
#include <stdexcept>

#include "hdsdoa/correction.hpp"
#include "hdsdoa/random.hpp"

using namespace hdsdoa;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    // Y whose sample covariance is diag(lambda) with N_a columns.
    ComplexMatrix diagonal_data(const RealVector &lambda, int n_a)
    {
        ComplexMatrix Y = ComplexMatrix::Zero(lambda.size(), n_a);
        for (Eigen::Index i = 0; i < lambda.size(); ++i)
            Y(i, i) = std::sqrt(n_a * lambda(i));
        return Y;
    }
}

TEST_CASE("sample covariance of an orthonormal block")
{
    const ComplexMatrix Y = ComplexMatrix::Identity(6, 6);
    const SpectralDecomposition sd = sample_covariance(Y, 2);
    CHECK((sd.R - ComplexMatrix::Identity(6, 6) / 6.0).norm() < 1e-15);
    CHECK_THAT(sd.c, WithinAbs(1.0, 1e-15));
    CHECK(sd.Us.cols() == 2);
    CHECK(sd.Un.cols() == 4);
}

TEST_CASE("noiseless single source has one nonzero eigenvalue")
{
    Rng rng(31);
    const ComplexMatrix a = complex_normal_matrix(rng, 8, 1, 1.0);
    const ComplexMatrix s = complex_normal_matrix(rng, 1, 40, 1.0);
    const SpectralDecomposition sd = sample_covariance(a * s, 1);
    CHECK(sd.eigenvalues(0) > 0.0);
    CHECK(sd.eigenvalues.tail(7).cwiseAbs().maxCoeff() < 1e-12 * sd.eigenvalues(0));
    const double align = std::norm((sd.Us.col(0).adjoint() * a)(0)) / a.squaredNorm();
    CHECK_THAT(align, WithinAbs(1.0, 1e-12));
}

TEST_CASE("eigenvalues are descending and sum to the trace")
{
    Rng rng(32);
    const ComplexMatrix Y = complex_normal_matrix(rng, 10, 30, 1.0);
    const SpectralDecomposition sd = sample_covariance(Y, 3);
    for (Eigen::Index i = 1; i < sd.eigenvalues.size(); ++i)
        CHECK(sd.eigenvalues(i - 1) >= sd.eigenvalues(i));
    CHECK_THAT(sd.eigenvalues.sum(), WithinRel(Y.squaredNorm() / 30.0, 1e-12));
    ComplexMatrix U(10, 10);
    U << sd.Us, sd.Un;
    CHECK((U.adjoint() * U - ComplexMatrix::Identity(10, 10)).norm() < 1e-12);
    CHECK((U * sd.eigenvalues.cast<cd>().asDiagonal() * U.adjoint() - sd.R).norm() < 1e-12);
}

TEST_CASE("spike map fixtures")
{
    CHECK_THAT(forward_eigenvalue(1.0, 1.0, 2.0), WithinAbs(4.5, 1e-15));
    CHECK_THAT(invert_eigenvalue(4.5, 1.0, 1.0), WithinAbs(2.0, 1e-14));
    CHECK_THAT(projector_weight(2.0, 1.0, 1.0), WithinAbs(0.5, 1e-15));
    CHECK_THAT(detectability_edge(1.0, 0.25), WithinAbs(2.25, 1e-15));
    // Small aspect ratio: eigenvalue is signal plus noise.
    CHECK_THAT(forward_eigenvalue(0.7, 1e-12, 3.0), WithinAbs(3.7, 1e-10));
    CHECK_THAT(invert_eigenvalue(3.7, 0.7, 1e-12), WithinAbs(3.0, 1e-10));
    CHECK_THAT(projector_weight(3.0, 0.7, 1e-12), WithinAbs(1.0, 1e-10));
}

TEST_CASE("inverse undoes forward above the phase transition")
{
    Rng rng(33);
    for (int k = 0; k < 1000; ++k)
    {
        const double s2 = uniform(rng, 0.01, 10.0);
        const double c = uniform(rng, 0.01, 4.0);
        const double eps = s2 * std::sqrt(c) * uniform(rng, 1.001, 50.0);
        const double lambda = forward_eigenvalue(s2, c, eps);
        CHECK_THAT(invert_eigenvalue(lambda, s2, c), WithinRel(eps, 1e-10));
        CHECK(lambda > detectability_edge(s2, c));
    }
}

TEST_CASE("forward map is increasing above the transition")
{
    const double s2 = 1.3, c = 0.8;
    double prev = forward_eigenvalue(s2, c, s2 * std::sqrt(c));
    CHECK_THAT(prev, WithinRel(detectability_edge(s2, c), 1e-12));
    for (int k = 1; k <= 200; ++k)
    {
        const double eps = s2 * std::sqrt(c) * (1.0 + 0.05 * k);
        const double lambda = forward_eigenvalue(s2, c, eps);
        CHECK(lambda > prev);
        prev = lambda;
    }
}

TEST_CASE("alignment tends to one as the aspect ratio vanishes")
{
    double prev = 0.0;
    for (double c : {1.0, 0.1, 0.01, 1e-4, 1e-6})
    {
        const double w = projector_weight(2.0, 1.0, c);
        CHECK(w > prev);
        CHECK(w <= 1.0);
        prev = w;
    }
    CHECK_THAT(prev, WithinAbs(1.0, 1e-5));
}

TEST_CASE("inversion below the edge is NaN")
{
    CHECK(std::isnan(invert_eigenvalue(1.5, 1.0, 0.5)));
    CHECK(std::isnan(invert_eigenvalue(0.5, 1.0, 0.5)));
}

TEST_CASE("bias correction on a fixed spectrum")
{
    RealVector lambda(4);
    lambda << 6.0, 1.0, 1.0, 1.0;
    const SpectralDecomposition sd = sample_covariance(diagonal_data(lambda, 8), 1);
    REQUIRE_THAT(sd.c, WithinAbs(0.5, 1e-15));
    const BiasCorrection bc = correct_spectrum(sd);

    const double eps = 0.5 * (4.5 + std::sqrt(4.5 * 4.5 - 2.0));
    const double b = 0.5 * (1.0 + 1.0 / eps);
    const double s2t = 1.0 + b / 3.0;
    const double w = (eps * eps - s2t * s2t * 0.5) / (eps * (eps + s2t * 0.5));
    CHECK_THAT(bc.sigma2_hat, WithinAbs(1.0, 1e-12));
    CHECK_THAT(bc.eps_tilde(0), WithinAbs(eps, 1e-12));
    CHECK_THAT(bc.sigma2_tilde, WithinAbs(s2t, 1e-12));
    CHECK_THAT(bc.vartheta2(0), WithinAbs(w, 1e-12));
    CHECK(bc.all_resolvable());
    CHECK_THAT(bc.projector_scales()(0), WithinAbs(1.0 / w, 1e-12));
}

TEST_CASE("weak spike is flagged unresolvable")
{
    RealVector lambda(4);
    lambda << 6.0, 1.2, 1.0, 1.0;
    const SpectralDecomposition sd = sample_covariance(diagonal_data(lambda, 8), 2);
    const BiasCorrection bc = correct_spectrum(sd);
    CHECK(bc.resolvable[0]);
    CHECK_FALSE(bc.resolvable[1]);
    CHECK_FALSE(bc.all_resolvable());
    CHECK(std::isnan(bc.vartheta2(1)));
    CHECK(bc.projector_scales()(1) == 1.0);
    CHECK_THROWS_AS(corrected_noise_projector(sd, bc), std::domain_error);
}

TEST_CASE("corrected projector reflects a half-aligned direction")
{
    SpectralDecomposition sd;
    sd.R = ComplexMatrix::Identity(5, 5);
    sd.L = 1;
    sd.Us = ComplexMatrix::Zero(5, 1);
    sd.Us(2, 0) = 1.0;
    BiasCorrection bc;
    bc.vartheta2 = RealVector::Constant(1, 0.5);
    bc.eps_tilde = RealVector::Constant(1, 2.0);
    bc.resolvable = {true};
    const ComplexMatrix P = corrected_noise_projector(sd, bc);
    CHECK((P - P.adjoint()).norm() < 1e-15);
    const HermitianEvd e = hermitian_evd(P);
    RealVector sorted = e.values;
    std::sort(sorted.data(), sorted.data() + sorted.size());
    CHECK_THAT(sorted(0), WithinAbs(-1.0, 1e-12));
    for (int i = 1; i < 5; ++i)
        CHECK_THAT(sorted(i), WithinAbs(1.0, 1e-12));
}

TEST_CASE("classical projector is an orthogonal projector")
{
    Rng rng(34);
    const SpectralDecomposition sd = sample_covariance(complex_normal_matrix(rng, 8, 20, 1.0), 3);
    const ComplexMatrix P = classical_noise_projector(sd);
    CHECK((P * P - P).norm() < 1e-12);
    CHECK((P - P.adjoint()).norm() < 1e-12);
    CHECK_THAT(P.trace().real(), WithinAbs(5.0, 1e-12));
    CHECK((P * sd.Us).norm() < 1e-12);
}

TEST_CASE("large-sample spike recovery")
{
    // Population covariance s2 I + eps u u^H, N = 200, N_a = 400, averaged
    // over draws to suppress the O(1/sqrt(N_a)) spike fluctuation.
    Rng rng(35);
    const int N = 200, n_a = 400, draws = 20;
    const double s2 = 1.0, eps = 3.0;
    double s2t = 0.0, eps_t = 0.0, w = 0.0, align = 0.0;
    for (int k = 0; k < draws; ++k)
    {
        ComplexVector u = complex_normal_matrix(rng, N, 1, 1.0);
        u.normalize();
        const ComplexMatrix Y = std::sqrt(eps) * u * complex_normal_matrix(rng, 1, n_a, 1.0) +
                                complex_normal_matrix(rng, N, n_a, s2);
        const SpectralDecomposition sd = sample_covariance(Y, 1);
        const BiasCorrection bc = correct_spectrum(sd);
        s2t += bc.sigma2_tilde / draws;
        eps_t += bc.eps_tilde(0) / draws;
        w += bc.vartheta2(0) / draws;
        align += std::norm((sd.Us.col(0).adjoint() * u)(0)) / draws;
    }
    CHECK_THAT(s2t, WithinAbs(s2, 0.05));
    CHECK_THAT(eps_t / eps, WithinAbs(1.0, 0.05));
    CHECK_THAT(w, WithinAbs(align, 0.05));
    CHECK_THAT(w, WithinAbs(projector_weight(eps, s2, 0.5), 0.05));
    // The uncorrected projector overstates the alignment.
    CHECK(align < 0.9);
}

TEST_CASE("correction needs 1 <= L < N")
{
    Rng rng(36);
    const ComplexMatrix Y = complex_normal_matrix(rng, 4, 10, 1.0);
    CHECK_THROWS_AS(correct_spectrum(sample_covariance(Y, 4)), DimensionError);
}
