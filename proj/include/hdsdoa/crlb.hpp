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
#include <span>
#include <string>
#include <vector>

#include "hdsdoa/channel.hpp"
#include "hdsdoa/hds.hpp"

namespace hdsdoa
{
    /// Bound on [theta_1..theta_L, phi_1..phi_L] in radians^2.
    struct CrlbReport
    {
        RealMatrix fisher;
        RealMatrix crlb;
        std::string architecture; // "fd" or "hds"
        double rho = 1.0;
        int n_r = 0;
        int n_rf = 0;
        int pilots = 0; // T, or T_d for the digital array
        double sigma2 = 0.0;

        int paths() const { return static_cast<int>(crlb.rows() / 2); }
        /// Diagonal converted to deg^2.
        RealVector diagonal_deg2() const;
        /// sqrt(mean of the diagonal) in degrees, comparable to an RMSE.
        double rmse_bound_deg() const;
    };

    /// Hybrid receiver bound. Phi = W~^H is whitened by Q^{-1/2} with
    /// Q = Phi Phi^H (eigenvalues floored at 1e-12 lambda_max).
    /// Throws std::domain_error when the Fisher matrix is singular.
    CrlbReport crlb_hds(const CombinerStack &stack, const UpaGeometry &g, std::span<const DoaPair> doas,
                        const ComplexMatrix &S, double sigma2);

    /// Fully digital bound with S repeated over T_d pilot blocks.
    CrlbReport crlb_fd(const UpaGeometry &g, std::span<const DoaPair> doas, const ComplexMatrix &S, double sigma2,
                       int fd_pilots);

    /// N sum d_n^2 - (sum d_n)^2.
    double spread_factor(const RealVector &d);

    /// N sum a_n b_n - (sum a_n)(sum b_n).
    double cross_factor(const RealVector &a, const RealVector &b);

    /// Exact single-source digital Fisher block [[F_tt, F_tp], [F_pt, F_pp]].
    Eigen::Matrix2d fisher_closed_form_fd(const UpaGeometry &g, const DoaPair &doa, int n_a, int fd_pilots,
                                          double p_hat, double sigma2);

    /// Single-source hybrid Fisher under Q ~ rho I: the digital block with
    /// T_d = 1 scaled by K T, K = N_RF / N_r.
    Eigen::Matrix2d fisher_closed_form_hds(const UpaGeometry &g, int n_rf, const DoaPair &doa, int pilots, int n_a,
                                           double p_hat, double sigma2);

    /// Single-source hybrid Fisher from the whitened vectors a~, b~_1, b~_2
    /// (no approximation).
    Eigen::Matrix2d fisher_single_source_hds(const CombinerStack &stack, const UpaGeometry &g, const DoaPair &doa,
                                             int n_a, double p_hat, double sigma2);

    /// Elementwise mean of reports with the same shape.
    CrlbReport average_reports(std::span<const CrlbReport> reports);

    struct Theorem2Options
    {
        int nx = 16;
        int nz = 16;
        int n_rf = 16;
        int pilots = 8;
        int draws = 50;
        int n_a = 16;
        double sigma2 = 1.0;
        double rho = 0.5; // for the two dynamic families
        DoaPair doa{20.0, 10.0};
        std::uint64_t seed = 7;
    };

    struct Theorem2Report
    {
        std::vector<Architecture> architectures;
        std::vector<Eigen::Vector2d> mean_crlb; // per architecture, (theta, phi) in rad^2
        Eigen::Vector2d spread = Eigen::Vector2d::Zero(); // (max - min) / mean per angle

        double max_spread() const { return spread.maxCoeff(); }
    };

    /// Mean single-source CRLB per architecture over random phase draws.
    /// HS and HFC use their own switch fractions, the dynamic families use
    /// `rho`. Every draw uses the same unit-modulus signal for all families.
    Theorem2Report theorem2_check(const Theorem2Options &opt, std::span<const Architecture> architectures);

    /// Relative spread (max - min) / mean of each column of `values`.
    Eigen::Vector2d relative_spread(std::span<const Eigen::Vector2d> values);

    struct Theorem3Report
    {
        double predicted = 0.0;                            // N_r T_d / (N_RF T)
        RealVector measured;                               // diagonal ratios
        double max_relative_deviation = 0.0;
    };

    Theorem3Report theorem3_check(const CrlbReport &hds, const CrlbReport &fd);
}
