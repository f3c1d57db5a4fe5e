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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hdsdoa/crlb.hpp"
#include "hdsdoa/estimators.hpp"

namespace hdsdoa
{
    /// Stream salts for derive_seed. Every trial draws its channel, precoder,
    /// combiner and noise from separate streams, so changing one component
    /// (e.g. the SNR) leaves the others untouched.
    namespace salt
    {
        inline constexpr std::uint64_t channel = 1;
        inline constexpr std::uint64_t precoder = 2;
        inline constexpr std::uint64_t combiner = 3;
        inline constexpr std::uint64_t noise = 4;
        inline constexpr std::uint64_t fd_noise = 5;
    }

    struct ExperimentSpec
    {
        std::string sweep_param = "snr_db"; // snr_db | n_rf | pilots | antennas | rho
        std::vector<double> sweep_values{-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0};

        int nx = 16;
        int nz = 16;
        int tx_nx = 8;
        int tx_nz = 8;
        double frequency_hz = 1.0e12;
        int paths = 3;
        int n_a = 128;
        int n_rf = 8;
        int pilots = 12;
        int fd_pilots = 0; // 0: same as pilots
        double rho = 0.5;
        Architecture arch = Architecture::HdsRandom;
        double snr_db = 10.0;
        bool noiseless = false;

        std::vector<Algorithm> algorithms{Algorithm::RdMusic, Algorithm::ImrdMusic};
        int trials = 200;
        std::uint64_t seed = 1;
        int workers = 0;       // 0: hardware concurrency
        bool timing = true;    // false leaves mean_ms empty
        bool with_crlb = true;
        bool oracle_refine = true; // false: the hybrid 2-D oracle stops at the grid
        EstimatorOptions estimator;
        // Paths are drawn inside a +-60 degree sector in both angles. Near end-fire
        // u = +-1 alias and the azimuth is unobservable.
        PathDrawOptions path_options{.max_abs_elevation_deg = 60.0, .max_abs_azimuth_deg = 60.0};
        std::string output;

        /// Throws ConfigError for any invalid combination, including every
        /// sweep value.
        void validate() const;
        /// Copy with the sweep parameter set to `value`.
        ExperimentSpec at(double value) const;
        HdsConfig hds_config() const;
        UpaGeometry rx_geometry() const;
        UpaGeometry tx_geometry() const;
        int digital_pilots() const { return fd_pilots > 0 ? fd_pilots : pilots; }
    };

    struct ResultRow
    {
        std::string sweep_param;
        double sweep_value = 0.0;
        std::string algorithm;
        double rmse_deg = 0.0;
        double resolved_frac = 0.0;
        std::optional<double> mean_ms;
        std::optional<double> crlb_deg;
        std::uint64_t seed = 0;
    };

    /// Everything one Monte Carlo trial draws.
    struct TrialData
    {
        UpaGeometry rx;
        UpaGeometry tx;
        HdsConfig cfg;
        ChannelRealization channel;
        ComplexMatrix precoder;
        ComplexMatrix S;
        CombinerStack stack;
        double sigma2 = 0.0;
        ObservationSet obs;
    };

    /// Trial `trial` of a (non-swept) spec, seeded by derive_seed(spec.seed, trial, salt).
    TrialData simulate_trial(const ExperimentSpec &spec, std::uint64_t trial);

    /// Runs one estimator on a trial. FD draws its own noise stream.
    DoaEstimate run_algorithm(const ExperimentSpec &spec, const TrialData &data, Algorithm alg, std::uint64_t trial);

    /// Monte Carlo sweep. Rows are ordered by sweep value, then by the order
    /// of spec.algorithms, and do not depend on the worker count.
    std::vector<ResultRow> run_experiment(const ExperimentSpec &spec);

    inline constexpr const char *csv_header = "sweep_param,sweep_value,algorithm,rmse_deg,resolved_frac,mean_ms,crlb_deg,seed";
    void write_csv(std::ostream &os, std::span<const ResultRow> rows);
    void write_csv(const std::string &path, std::span<const ResultRow> rows);

    /// Parses the JSON experiment description (see README).
    ExperimentSpec parse_experiment(const std::string &json_text);
    ExperimentSpec load_experiment(const std::string &path);

    /// Runs f(0..n-1) on `workers` threads (0: hardware concurrency).
    /// The first exception thrown by any call is rethrown after all threads join.
    void parallel_for(int n, int workers, const std::function<void(int)> &f);

    struct CrlbSweepSpec
    {
        int nx = 16;
        int nz = 16;
        int n_rf = 16;
        std::vector<int> pilots{8, 16};
        std::vector<double> rho; // empty: k / n_rf for k = 1..n_rf
        Architecture arch = Architecture::HdsRandom;
        int draws = 50;
        int n_a = 16;
        double sigma2 = 1.0;
        int fd_pilots = 16;
        DoaPair doa{20.0, 10.0};
        std::uint64_t seed = 7;
        int workers = 0;

        std::vector<double> rho_values() const;
    };

    struct CrlbSweepResult
    {
        std::vector<ResultRow> rows;              // per (T, rho) mean bound, and the digital reference
        std::vector<int> pilots;
        std::vector<Eigen::Vector2d> rho_spread;  // per T, relative spread of the bound over rho
        std::vector<Theorem2Report> theorem2;     // per T
        std::vector<Theorem3Report> theorem3;     // per T, mean hybrid bound vs digital
    };

    /// Mean single-source bound versus switch fraction, plus the family
    /// comparison and the hybrid/digital ratio for every T.
    CrlbSweepResult run_crlb_sweep(const CrlbSweepSpec &spec);

    struct BenchRow
    {
        std::string algorithm;
        double grid_step = 0.0;
        int runs = 0;
        double median_ms = 0.0;
        double covariance_ms = 0.0;
        double search_ms = 0.0;
        double refine_ms = 0.0;
    };

    struct BenchSpec
    {
        ExperimentSpec base;
        std::vector<Algorithm> algorithms{Algorithm::ImrdMusic, Algorithm::RdMusic, Algorithm::HdsMusic2d};
        std::vector<double> grid_steps{0.5};
        int runs = 10;
        int warmup = 1;
    };

    /// Median wall-clock per algorithm and grid step on one fixed trial.
    /// Warmup runs are not timed.
    std::vector<BenchRow> benchmark_runtimes(const BenchSpec &spec);

    inline constexpr const char *bench_csv_header = "algorithm,grid_step,runs,median_ms,covariance_ms,search_ms,refine_ms";
    void write_bench_csv(std::ostream &os, std::span<const BenchRow> rows);
}
