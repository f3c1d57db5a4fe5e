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

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hdsdoa
{
    using cd = std::complex<double>;

    // Dense storage is Eigen's default column-major layout throughout.
    using ComplexMatrix = Eigen::MatrixXcd;
    using ComplexVector = Eigen::VectorXcd;
    using RealMatrix = Eigen::MatrixXd;
    using RealVector = Eigen::VectorXd;

    inline constexpr double pi = 3.14159265358979323846;
    inline constexpr double deg2rad = pi / 180.0;
    inline constexpr double rad2deg = 180.0 / pi;

    class DimensionError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    class ConfigError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    /// Eigen-pairs of a Hermitian matrix, eigenvalues sorted descending.
    struct HermitianEvd
    {
        RealVector values;
        ComplexMatrix vectors; // columns orthonormal, same order as values
    };

    /// Decomposes (m + m^H)/2. Throws DimensionError for non-square input.
    HermitianEvd hermitian_evd(const ComplexMatrix &m);

    /// Moore-Penrose pseudoinverse via SVD. Singular values below
    /// max(rows, cols) * eps * sigma_max are treated as zero.
    ComplexMatrix pseudoinverse(const ComplexMatrix &m);

    /// Eigenvalues of a general square matrix (roots of det(m - beta I)).
    ComplexVector general_evd(const ComplexMatrix &m);

    /// Condition number sigma_max / sigma_min; +inf for rank-deficient input.
    double condition_number(const ComplexMatrix &m);

    /// Numerical rank with relative singular-value threshold `rel_tol`.
    int numerical_rank(const ComplexMatrix &m, double rel_tol = 1e-10);

    bool all_finite(const ComplexMatrix &m);

    /// Throws DimensionError with `what` when the predicate fails.
    inline void require_dims(bool ok, const std::string &what)
    {
        if (!ok)
            throw DimensionError(what);
    }
}
