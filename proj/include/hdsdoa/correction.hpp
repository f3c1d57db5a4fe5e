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

#include "hdsdoa/numerics.hpp"

namespace hdsdoa
{
    struct SpectralDecomposition
    {
        ComplexMatrix R;         // sample covariance, N x N
        RealVector eigenvalues;  // descending
        ComplexMatrix Us;        // N x L
        ComplexMatrix Un;        // N x (N - L)
        double c = 0.0;          // N / N_a
        int L = 0;

        int dimension() const { return static_cast<int>(R.rows()); }
    };

    /// R = Y Y^H / N_a and its eigen-split into L signal and N - L noise vectors.
    SpectralDecomposition sample_covariance(const ComplexMatrix &Y, int L);

    /// lambda = (s2 + eps)(s2 c + eps) / eps.
    double forward_eigenvalue(double sigma2, double c, double eps);

    /// Threshold s2 (1 + sqrt(c))^2 below which a spike is not separable.
    double detectability_edge(double sigma2, double c);

    /// Larger root of eps^2 - (lambda - s2 (1 + c)) eps + s2^2 c = 0.
    /// Returns NaN below the detectability edge.
    double invert_eigenvalue(double lambda, double sigma2, double c);

    /// Squared eigenvector alignment (eps^2 - s2^2 c) / (eps (eps + s2 c)).
    double projector_weight(double eps, double sigma2, double c);

    struct BiasCorrection
    {
        double sigma2_hat = 0.0;   // mean of the N - L smallest eigenvalues
        double sigma2_tilde = 0.0; // debiased noise power
        RealVector eps_tilde;      // L debiased signal eigenvalues (NaN if unresolvable)
        RealVector vartheta2;      // L alignment factors (NaN if unresolvable)
        std::vector<bool> resolvable;

        bool all_resolvable() const;
        /// 1 / vartheta2 per path, 1 where the path is not resolvable.
        RealVector projector_scales() const;
    };

    /// Debiases noise power and signal eigenvalues of `sd`. Requires L < N.
    BiasCorrection correct_spectrum(const SpectralDecomposition &sd);

    /// I - sum_l u_l u_l^H / vartheta2_l. Throws std::domain_error if any
    /// path is unresolvable or has vartheta2 <= 0.
    ComplexMatrix corrected_noise_projector(const SpectralDecomposition &sd, const BiasCorrection &bc);

    /// I - Us Us^H.
    ComplexMatrix classical_noise_projector(const SpectralDecomposition &sd);
}
