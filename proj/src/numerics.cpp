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

#include "hdsdoa/numerics.hpp"

#include <limits>

namespace hdsdoa
{
    HermitianEvd hermitian_evd(const ComplexMatrix &m)
    {
        require_dims(m.rows() == m.cols(), "hermitian_evd: matrix must be square");
        const ComplexMatrix sym = 0.5 * (m + m.adjoint());
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("hermitian_evd: eigensolver did not converge");

        // Eigen returns ascending order
        HermitianEvd out;
        out.values = solver.eigenvalues().reverse();
        out.vectors = solver.eigenvectors().rowwise().reverse();
        return out;
    }

    ComplexMatrix pseudoinverse(const ComplexMatrix &m)
    {
        if (m.size() == 0)
            return ComplexMatrix::Zero(m.cols(), m.rows());
        Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const RealVector &s = svd.singularValues();
        const double smax = s.size() ? s(0) : 0.0;
        const double tol = static_cast<double>(std::max(m.rows(), m.cols())) *
                           std::numeric_limits<double>::epsilon() * smax;
        RealVector inv = RealVector::Zero(s.size());
        for (Eigen::Index i = 0; i < s.size(); ++i)
            if (s(i) > tol && s(i) > 0.0)
                inv(i) = 1.0 / s(i);
        return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
    }

    ComplexVector general_evd(const ComplexMatrix &m)
    {
        require_dims(m.rows() == m.cols(), "general_evd: matrix must be square");
        Eigen::ComplexEigenSolver<ComplexMatrix> solver(m, false);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("general_evd: eigensolver did not converge");
        return solver.eigenvalues();
    }

    double condition_number(const ComplexMatrix &m)
    {
        if (m.size() == 0)
            return std::numeric_limits<double>::infinity();
        Eigen::JacobiSVD<ComplexMatrix> svd(m);
        const RealVector &s = svd.singularValues();
        const double smin = s(s.size() - 1);
        if (smin <= 0.0)
            return std::numeric_limits<double>::infinity();
        return s(0) / smin;
    }

    int numerical_rank(const ComplexMatrix &m, double rel_tol)
    {
        if (m.size() == 0)
            return 0;
        Eigen::JacobiSVD<ComplexMatrix> svd(m);
        const RealVector &s = svd.singularValues();
        if (s(0) <= 0.0)
            return 0;
        int r = 0;
        for (Eigen::Index i = 0; i < s.size(); ++i)
            if (s(i) > rel_tol * s(0))
                ++r;
        return r;
    }

    bool all_finite(const ComplexMatrix &m)
    {
        return m.allFinite();
    }
}
