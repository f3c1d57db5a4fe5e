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

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hdsdoa/acquisition.hpp"
#include "hdsdoa/correction.hpp"

namespace hdsdoa
{
    enum class Algorithm
    {
        RdMusic,
        ImrdMusic,
        HdsMusic2d,
        FdMusic2d
    };

    std::string to_string(Algorithm a);
    Algorithm parse_algorithm(std::string_view s);

    /// Uniform angle grid lo, lo + step, ... up to hi (degrees).
    struct SearchGrid
    {
        double lo = -90.0;
        double hi = 90.0;
        double step = 0.5;

        void validate() const;
        std::vector<double> points() const;
        int size() const;
    };

    struct EstimatorOptions
    {
        SearchGrid elevation;
        SearchGrid azimuth;
        bool corrected = true;    // bias-corrected noise projector
        bool refine = true;       // local coarse-to-fine refinement after the grid
        double refine_step = 0.01;
        double window_deg = 2.0;  // IMRD elevation window half-width
        double window_step = 0.25;
        int min_separation_cells = 2;

        void validate() const;
    };

    struct StageTiming
    {
        double covariance_ms = 0.0; // SCM, EVD and correction
        double search_ms = 0.0;     // grid search or closed-form initialization
        double refine_ms = 0.0;     // local refinement and azimuth recovery
        double total_ms = 0.0;
    };

    struct DoaEstimate
    {
        std::vector<DoaPair> pairs;
        std::vector<double> cost;          // objective value at each estimate
        std::vector<bool> path_resolvable; // per signal eigenvalue, from the correction
        bool resolved = true;              // L separated minima were found
        bool fallback = false;             // IMRD fell back to the RD search
        StageTiming timing;
    };

    /// Noise-subspace spectra of a hybrid observation. With Wh = W~^H and
    /// E_n E_n^H = W~ (I - Us D Us^H) W~^H, all quantities are formed from
    /// the m x N_r products without building N_r x N_r matrices.
    class HdsSpectrum
    {
    public:
        /// `scales` holds D, one weight per column of Us (1 for classical MUSIC).
        HdsSpectrum(const ObservationSet &obs, const ComplexMatrix &Us, const RealVector &scales);

        const UpaGeometry &geometry() const { return g_; }

        /// Q(u) = (a_z(u) (x) I)^H E_n E_n^H (a_z(u) (x) I), N_x x N_x.
        ComplexMatrix reduced_matrix(double u) const;

        /// 1 / Re(d_1^H Q^{-1}(u) d_1) where Q(u) is positive definite, else the
        /// smallest eigenvalue of Q(u) (<= 0). Continuous through zero.
        double elevation_cost(double u) const;

        /// Q^{-1} d_1 / (d_1^H Q^{-1} d_1).
        ComplexVector azimuth_vector(double u) const;

        /// Re(a_x^H(v) Q a_x(v)).
        double azimuth_cost(const ComplexMatrix &Q, double v) const;

        /// a^H E_n E_n^H a for a = a_z(u) (x) a_x(v).
        double spectrum(double u, double v) const;

        /// Spectrum on the full grid, rows azimuth, columns elevation.
        RealMatrix spectrum_grid(const std::vector<double> &theta, const std::vector<double> &phi) const;

    private:
        ComplexMatrix fold_z(const ComplexMatrix &src, const ComplexVector &az) const;

        UpaGeometry g_;
        ComplexMatrix Wh_;  // m x N_r
        ComplexMatrix UWh_; // L x N_r
        RealVector scales_;
    };

    /// Subspace spectrum of fully digital snapshots: N_r - |Us^H a|^2.
    class DigitalSpectrum
    {
    public:
        DigitalSpectrum(const UpaGeometry &g, const ComplexMatrix &Us);

        double spectrum(double u, double v) const;
        RealMatrix spectrum_grid(const std::vector<double> &theta, const std::vector<double> &phi) const;

    private:
        UpaGeometry g_;
        ComplexMatrix UsH_; // L x N_r
    };

    /// Solves Q x = d_1, adding delta I when the reciprocal condition
    /// estimate falls below 1e-12 (delta = 1e-12 trace|Q| / N).
    ComplexVector solve_regularized(const ComplexMatrix &Q);

    /// Indices of up to L minima of `cost`: local minima (endpoints included)
    /// in ascending order, accepted greedily at least `min_sep` apart, then
    /// the global order. `ok` is false when fewer than L separated minima exist.
    struct MinimaPick
    {
        std::vector<int> index;
        bool ok = true;
    };
    MinimaPick pick_minima(const std::vector<double> &cost, int L, int min_sep);

    /// 2-D version with 8-neighbour minima and Chebyshev separation.
    /// Returns (row, col) pairs.
    struct MinimaPick2d
    {
        std::vector<std::pair<int, int>> index;
        bool ok = true;
    };
    MinimaPick2d pick_minima_2d(const RealMatrix &cost, int L, int min_sep);

    /// Same with a caller-supplied proximity test between grid cells.
    using CellPredicate = std::function<bool(const std::pair<int, int> &, const std::pair<int, int> &)>;
    MinimaPick2d pick_minima_2d(const RealMatrix &cost, int L, const CellPredicate &too_close);

    /// Coarse-to-fine 1-D minimization: scans center +- halfwidth at `step`,
    /// recenters on the best point, sets halfwidth = step and
    /// step = max(step / 5, final_step), until final_step has been scanned.
    /// Returns (argmin, value). Points outside [lo, hi] are skipped.
    std::pair<double, double> refine_minimum(const std::function<double(double)> &f, double center,
                                             double halfwidth, double step, double final_step, double lo = -90.0,
                                             double hi = 90.0);

    /// Sequential phase unwrapping of arg(x).
    RealVector unwrap_phases(const ComplexVector &x);

    /// Least-squares slope fit of the unwrapped phase of `ax`, returned as v
    /// for element spacing `spacing_in_wavelengths`.
    double ls_phase_slope(const ComplexVector &ax, double spacing_in_wavelengths);

    /// Candidate u = sin(phi) values per path from the eigenvalues of
    /// pinv(Us1) Us2, one per phase branch with |u| <= 1. Us1 and Us2 are the
    /// rows of chains 0 and 1. Throws DimensionError if Us1 is rank deficient.
    std::vector<std::vector<double>> rotational_elevation_seeds(const ObservationSet &obs, const ComplexMatrix &Us);

    /// True when chains 0 and 1 of `obs.W` satisfy the shifted-pair layout.
    bool has_special_pair(const ObservationSet &obs);

    /// Reduced-dimension MUSIC: 1-D elevation search of the Lagrangian cost,
    /// then a 1-D azimuth search per elevation.
    DoaEstimate rd_music(const ObservationSet &obs, int L, const EstimatorOptions &opt = {});

    /// Rotational-invariance elevation seed from the two paired chains,
    /// windowed elevation search, least-squares azimuth.
    DoaEstimate imrd_music(const ObservationSet &obs, int L, const EstimatorOptions &opt = {});

    /// Exhaustive 2-D MUSIC on the hybrid observation. Minima are separated
    /// by min_separation_cells grid steps measured in (u, v); refinement runs
    /// in (u, v) as well.
    DoaEstimate music_2d_oracle(const ObservationSet &obs, int L, const EstimatorOptions &opt = {});

    /// 2-D MUSIC on fully digital snapshots (N_r x samples), classical projector.
    DoaEstimate fd_music_2d(const ComplexMatrix &Y, const UpaGeometry &g, int L, const EstimatorOptions &opt = {});

    /// Minimal sum of squared angle errors (deg^2, both angles) over all
    /// assignments of estimates to truth.
    double matched_squared_error(std::span<const DoaPair> truth, std::span<const DoaPair> estimate);

    class RmseAccumulator
    {
    public:
        /// Unresolved estimates are counted but excluded from the error.
        void add(std::span<const DoaPair> truth, const DoaEstimate &est);
        void add(std::span<const DoaPair> truth, std::span<const DoaPair> estimate);

        double rmse_deg() const;
        int trials() const { return trials_; }
        int resolved() const { return resolved_; }
        double resolved_fraction() const;

    private:
        double sum_sq_ = 0.0;
        long entries_ = 0;
        int trials_ = 0;
        int resolved_ = 0;
    };
}
