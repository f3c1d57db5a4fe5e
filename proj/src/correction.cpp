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

#include "hdsdoa/correction.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hdsdoa
{
    SpectralDecomposition sample_covariance(const ComplexMatrix &Y, int L)
    {
        require_dims(Y.rows() >= 1 && Y.cols() >= 1, "sample_covariance: empty observation");
        if (L < 1 || L >= Y.rows())
            throw DimensionError("sample_covariance: need 1 <= L < N");

        SpectralDecomposition sd;
        const double n_a = static_cast<double>(Y.cols());
        sd.R = (Y * Y.adjoint()) / n_a;
        HermitianEvd evd = hermitian_evd(sd.R);
        sd.eigenvalues = std::move(evd.values);
        sd.Us = evd.vectors.leftCols(L);
        sd.Un = evd.vectors.rightCols(Y.rows() - L);
        sd.c = static_cast<double>(Y.rows()) / n_a;
        sd.L = L;
        return sd;
    }

    double forward_eigenvalue(double sigma2, double c, double eps)
    {
        return (sigma2 + eps) * (sigma2 * c + eps) / eps;
    }

    double detectability_edge(double sigma2, double c)
    {
        const double r = 1.0 + std::sqrt(c);
        return sigma2 * r * r;
    }

    double invert_eigenvalue(double lambda, double sigma2, double c)
    {
        const double b = lambda - sigma2 * (1.0 + c);
        const double disc = b * b - 4.0 * sigma2 * sigma2 * c;
        if (b < 0.0 || disc < 0.0)
            return std::numeric_limits<double>::quiet_NaN();
        return 0.5 * (b + std::sqrt(disc));
    }

    double projector_weight(double eps, double sigma2, double c)
    {
        return (eps * eps - sigma2 * sigma2 * c) / (eps * (eps + sigma2 * c));
    }

    bool BiasCorrection::all_resolvable() const
    {
        for (bool r : resolvable)
            if (!r)
                return false;
        return true;
    }

    RealVector BiasCorrection::projector_scales() const
    {
        RealVector s = RealVector::Ones(static_cast<Eigen::Index>(resolvable.size()));
        for (Eigen::Index l = 0; l < s.size(); ++l)
            if (resolvable[l])
                s(l) = 1.0 / vartheta2(l);
        return s;
    }

    BiasCorrection correct_spectrum(const SpectralDecomposition &sd)
    {
        const int N = sd.dimension();
        const int L = sd.L;
        if (L < 1 || L >= N)
            throw DimensionError("correct_spectrum: need 1 <= L < N");
        const double c = sd.c;

        BiasCorrection bc;
        bc.sigma2_hat = std::max(0.0, sd.eigenvalues.tail(N - L).mean());
        bc.eps_tilde.resize(L);
        bc.vartheta2.resize(L);
        bc.resolvable.assign(L, false);

        // b() needs sum 1/eps; the first pass uses eps evaluated at sigma2_hat.
        double inv_sum = 0.0;
        for (int l = 0; l < L; ++l)
        {
            const double e = invert_eigenvalue(sd.eigenvalues(l), bc.sigma2_hat, c);
            bc.eps_tilde(l) = e;
            if (e > 0.0)
                inv_sum += 1.0 / e;
        }
        const double b = std::sqrt(c / 2.0) * (L + bc.sigma2_hat * inv_sum);
        bc.sigma2_tilde = bc.sigma2_hat + b / (N - L) * bc.sigma2_hat * std::sqrt(2.0 * c);

        for (int l = 0; l < L; ++l)
        {
            const double e = bc.eps_tilde(l);
            if (!(e > 0.0))
            {
                bc.vartheta2(l) = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            const double w = projector_weight(e, bc.sigma2_tilde, c);
            bc.vartheta2(l) = w;
            bc.resolvable[l] = w > 0.0 && w <= 1.0 + 1e-12;
        }
        return bc;
    }

    ComplexMatrix corrected_noise_projector(const SpectralDecomposition &sd, const BiasCorrection &bc)
    {
        require_dims(bc.vartheta2.size() == sd.L, "corrected_noise_projector: weight count must equal L");
        for (int l = 0; l < sd.L; ++l)
            if (!(bc.vartheta2(l) > 0.0))
                throw std::domain_error("corrected_noise_projector: path " + std::to_string(l) + " is not resolvable");
        const RealVector scale = bc.vartheta2.cwiseInverse();
        ComplexMatrix Pn = ComplexMatrix::Identity(sd.dimension(), sd.dimension());
        Pn.noalias() -= sd.Us * scale.asDiagonal() * sd.Us.adjoint();
        return Pn;
    }

    ComplexMatrix classical_noise_projector(const SpectralDecomposition &sd)
    {
        ComplexMatrix Pn = ComplexMatrix::Identity(sd.dimension(), sd.dimension());
        Pn.noalias() -= sd.Us * sd.Us.adjoint();
        return Pn;
    }
}
