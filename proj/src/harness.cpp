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

#include "hdsdoa/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace hdsdoa
{
    namespace
    {
        bool is_integer(double x)
        {
            return std::isfinite(x) && std::floor(x) == x;
        }

        bool uses(const ExperimentSpec &s, Algorithm a)
        {
            return std::find(s.algorithms.begin(), s.algorithms.end(), a) != s.algorithms.end();
        }

        std::string format_number(double x, int digits = 10)
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.*g", digits, x);
            return buf;
        }

        double median(std::vector<double> v)
        {
            if (v.empty())
                return 0.0;
            std::sort(v.begin(), v.end());
            const std::size_t n = v.size();
            return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
        }
    }

    void parallel_for(int n, int workers, const std::function<void(int)> &f)
    {
        if (n <= 0)
            return;
        if (workers <= 0)
            workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
        workers = std::min(workers, n);
        if (workers == 1)
        {
            for (int i = 0; i < n; ++i)
                f(i);
            return;
        }
        std::atomic<int> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int i = next++; i < n; i = next++)
                {
                    try
                    {
                        f(i);
                    }
                    catch (...)
                    {
                        std::lock_guard<std::mutex> lock(error_mutex);
                        if (!error)
                            error = std::current_exception();
                        next = n;
                    }
                }
            });
        for (std::thread &t : pool)
            t.join();
        if (error)
            std::rethrow_exception(error);
    }

    ExperimentSpec ExperimentSpec::at(double value) const
    {
        ExperimentSpec s = *this;
        if (sweep_param == "snr_db")
            s.snr_db = value;
        else if (sweep_param == "n_rf")
            s.n_rf = static_cast<int>(value);
        else if (sweep_param == "pilots")
            s.pilots = static_cast<int>(value);
        else if (sweep_param == "antennas")
            s.nx = s.nz = static_cast<int>(value);
        else if (sweep_param == "rho")
            s.rho = value;
        else
            throw ConfigError("unknown sweep parameter '" + sweep_param + "'");
        s.sweep_values = {value};
        return s;
    }

    HdsConfig ExperimentSpec::hds_config() const
    {
        HdsConfig cfg;
        cfg.n_rf = n_rf;
        cfg.n_r = nx * nz;
        cfg.rho = rho;
        cfg.arch = arch;
        cfg.special_pair = uses(*this, Algorithm::ImrdMusic);
        return cfg;
    }

    UpaGeometry ExperimentSpec::rx_geometry() const
    {
        return UpaGeometry::half_wavelength(nx, nz, frequency_hz);
    }

    UpaGeometry ExperimentSpec::tx_geometry() const
    {
        return UpaGeometry::half_wavelength(tx_nx, tx_nz, frequency_hz);
    }

    void ExperimentSpec::validate() const
    {
        if (trials < 1)
            throw ConfigError("trials must be >= 1");
        if (algorithms.empty())
            throw ConfigError("at least one algorithm is required");
        if (sweep_values.empty())
            throw ConfigError("the sweep needs at least one value");
        if (workers < 0)
            throw ConfigError("workers must be >= 0");
        estimator.validate();
        for (double v : sweep_values)
        {
            if (sweep_param != "snr_db" && sweep_param != "rho" && !is_integer(v))
                throw ConfigError("sweep value " + format_number(v) + " must be an integer for " + sweep_param);
            const ExperimentSpec s = at(v);
            if (s.paths < 1)
                throw ConfigError("paths must be >= 1");
            if (s.n_a < s.paths)
                throw ConfigError("streams (N_a) must be >= paths");
            if (s.pilots < 1 || s.fd_pilots < 0)
                throw ConfigError("pilot counts must be positive");
            if (!std::isfinite(s.snr_db))
                throw ConfigError("snr_db must be finite");
            const UpaGeometry rx = s.rx_geometry();
            s.tx_geometry();
            s.hds_config().validate(rx);
            if (s.n_rf * s.pilots <= s.paths)
                throw ConfigError("N_RF * T must exceed the number of paths");
            if (uses(s, Algorithm::ImrdMusic) && s.pilots <= s.paths)
                throw ConfigError("imrd-music requires T > L");
            if (uses(s, Algorithm::FdMusic2d) && rx.size() <= s.paths)
                throw ConfigError("fd-2d-music requires N_r > L");
        }
    }

    TrialData simulate_trial(const ExperimentSpec &spec, std::uint64_t trial)
    {
        TrialData d;
        d.rx = spec.rx_geometry();
        d.tx = spec.tx_geometry();
        d.cfg = spec.hds_config();

        Rng ch_rng(derive_seed(spec.seed, trial, salt::channel));
        d.channel = build_channel(draw_paths(ch_rng, spec.paths, spec.path_options), d.rx, d.tx);
        Rng pre_rng(derive_seed(spec.seed, trial, salt::precoder));
        d.precoder = draw_precoder(pre_rng, d.channel.paths, d.tx, spec.n_a);
        d.S = equivalent_signal(d.channel.paths, d.tx, d.precoder);
        Rng comb_rng(derive_seed(spec.seed, trial, salt::combiner));
        d.stack = build_combiner(comb_rng, d.cfg, spec.pilots);
        d.sigma2 = spec.noiseless ? 0.0 : noise_variance_for_snr(d.S, spec.snr_db);
        Rng noise_rng(derive_seed(spec.seed, trial, salt::noise));
        d.obs = transmit_and_correct(d.channel, d.precoder, d.stack, d.rx, d.sigma2, noise_rng);
        return d;
    }

    DoaEstimate run_algorithm(const ExperimentSpec &spec, const TrialData &data, Algorithm alg, std::uint64_t trial)
    {
        const int L = spec.paths;
        switch (alg)
        {
        case Algorithm::RdMusic:
            return rd_music(data.obs, L, spec.estimator);
        case Algorithm::ImrdMusic:
            return imrd_music(data.obs, L, spec.estimator);
        case Algorithm::HdsMusic2d:
        {
            EstimatorOptions opt = spec.estimator;
            opt.refine = spec.oracle_refine;
            return music_2d_oracle(data.obs, L, opt);
        }
        case Algorithm::FdMusic2d:
        {
            Rng rng(derive_seed(spec.seed, trial, salt::fd_noise));
            const ComplexMatrix Y = fd_observe(data.channel, data.precoder, spec.digital_pilots(), data.sigma2, rng);
            return fd_music_2d(Y, data.rx, L, spec.estimator);
        }
        }
        throw ConfigError("unknown algorithm");
    }

    std::vector<ResultRow> run_experiment(const ExperimentSpec &spec)
    {
        spec.validate();
        const std::size_t n_alg = spec.algorithms.size();
        std::vector<ResultRow> rows;

        struct Outcome
        {
            std::vector<DoaPair> truth;
            std::vector<DoaEstimate> est;
            double crlb_hds = std::numeric_limits<double>::quiet_NaN(); // mean diagonal, deg^2
            double crlb_fd = std::numeric_limits<double>::quiet_NaN();
        };

        for (double value : spec.sweep_values)
        {
            const ExperimentSpec s = spec.at(value);
            const bool need_hds_crlb = s.with_crlb && !s.noiseless &&
                                       (uses(s, Algorithm::RdMusic) || uses(s, Algorithm::ImrdMusic) ||
                                        uses(s, Algorithm::HdsMusic2d));
            const bool need_fd_crlb = s.with_crlb && !s.noiseless && uses(s, Algorithm::FdMusic2d);

            std::vector<Outcome> out(static_cast<std::size_t>(s.trials));
            parallel_for(s.trials, s.workers, [&](int i) {
                const auto trial = static_cast<std::uint64_t>(i);
                const TrialData data = simulate_trial(s, trial);
                Outcome &o = out[static_cast<std::size_t>(i)];
                o.truth = data.channel.paths.doas;
                o.est.reserve(n_alg);
                for (Algorithm a : s.algorithms)
                    o.est.push_back(run_algorithm(s, data, a, trial));
                try
                {
                    if (need_hds_crlb)
                        o.crlb_hds = crlb_hds(data.stack, data.rx, o.truth, data.S, data.sigma2).diagonal_deg2().mean();
                    if (need_fd_crlb)
                        o.crlb_fd = crlb_fd(data.rx, o.truth, data.S, data.sigma2, s.digital_pilots())
                                        .diagonal_deg2()
                                        .mean();
                }
                catch (const std::domain_error &)
                {
                    // unidentifiable draw: left out of the bound average
                }
            });

            for (std::size_t k = 0; k < n_alg; ++k)
            {
                const Algorithm a = s.algorithms[k];
                RmseAccumulator acc;
                double ms = 0.0, bound = 0.0;
                int n_bound = 0;
                for (const Outcome &o : out)
                {
                    acc.add(o.truth, o.est[k]);
                    ms += o.est[k].timing.total_ms;
                    const double b = a == Algorithm::FdMusic2d ? o.crlb_fd : o.crlb_hds;
                    if (std::isfinite(b))
                    {
                        bound += b;
                        ++n_bound;
                    }
                }
                ResultRow r;
                r.sweep_param = s.sweep_param;
                r.sweep_value = value;
                r.algorithm = to_string(a);
                r.rmse_deg = acc.rmse_deg();
                r.resolved_frac = acc.resolved_fraction();
                if (s.timing)
                    r.mean_ms = ms / s.trials;
                if (n_bound > 0)
                    r.crlb_deg = std::sqrt(bound / n_bound);
                r.seed = s.seed;
                rows.push_back(std::move(r));
            }
        }
        return rows;
    }

    void write_csv(std::ostream &os, std::span<const ResultRow> rows)
    {
        os << csv_header << '\n';
        for (const ResultRow &r : rows)
        {
            os << r.sweep_param << ',' << format_number(r.sweep_value) << ',' << r.algorithm << ','
               << format_number(r.rmse_deg, 8) << ',' << format_number(r.resolved_frac, 6) << ',';
            if (r.mean_ms)
                os << format_number(*r.mean_ms, 6);
            os << ',';
            if (r.crlb_deg)
                os << format_number(*r.crlb_deg, 8);
            os << ',' << r.seed << '\n';
        }
    }

    void write_csv(const std::string &path, std::span<const ResultRow> rows)
    {
        std::ofstream f(path, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot open '" + path + "' for writing");
        write_csv(f, rows);
    }

    std::vector<double> CrlbSweepSpec::rho_values() const
    {
        if (!rho.empty())
            return rho;
        std::vector<double> r;
        for (int k = 1; k <= n_rf; ++k)
            r.push_back(static_cast<double>(k) / n_rf);
        return r;
    }

    CrlbSweepResult run_crlb_sweep(const CrlbSweepSpec &spec)
    {
        if (spec.draws < 1 || spec.pilots.empty())
            throw ConfigError("crlb sweep: need draws >= 1 and at least one T");
        const UpaGeometry g = UpaGeometry::half_wavelength(spec.nx, spec.nz);
        const std::vector<double> rhos = spec.rho_values();
        for (double r : rhos)
        {
            HdsConfig cfg{spec.n_rf, g.size(), r, spec.arch, false};
            cfg.validate(g);
        }
        const DoaPair doas[1] = {spec.doa};

        CrlbSweepResult res;
        res.pilots = spec.pilots;
        for (int T : spec.pilots)
        {
            // Signals are shared across rho values so the sweep isolates the switch fraction.
            std::vector<Eigen::Vector2d> per_rho(rhos.size(), Eigen::Vector2d::Zero());
            std::vector<ComplexMatrix> signals(static_cast<std::size_t>(spec.draws));
            for (int k = 0; k < spec.draws; ++k)
            {
                Rng srng(derive_seed(spec.seed, static_cast<std::uint64_t>(k), 11));
                signals[k].resize(1, spec.n_a);
                for (int n = 0; n < spec.n_a; ++n)
                    signals[k](0, n) = unit_phasor(srng);
            }
            std::vector<CrlbReport> hds_reports(static_cast<std::size_t>(spec.draws) * rhos.size());
            parallel_for(static_cast<int>(hds_reports.size()), spec.workers, [&](int idx) {
                const std::size_t i = static_cast<std::size_t>(idx) / spec.draws;
                const int k = idx % spec.draws;
                HdsConfig cfg{spec.n_rf, g.size(), rhos[i], spec.arch, false};
                Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(k), 100 + static_cast<std::uint64_t>(T)));
                const CombinerStack stack = build_combiner(rng, cfg, T);
                hds_reports[static_cast<std::size_t>(idx)] = crlb_hds(stack, g, doas, signals[k], spec.sigma2);
            });
            for (std::size_t i = 0; i < rhos.size(); ++i)
            {
                const std::span<const CrlbReport> block(hds_reports.data() + i * spec.draws,
                                                        static_cast<std::size_t>(spec.draws));
                const CrlbReport mean = average_reports(block);
                per_rho[i] = Eigen::Vector2d(mean.crlb(0, 0), mean.crlb(1, 1));
                ResultRow r;
                r.sweep_param = "rho";
                r.sweep_value = rhos[i];
                r.algorithm = "crlb-" + to_string(spec.arch) + "-T" + std::to_string(T);
                r.rmse_deg = std::numeric_limits<double>::quiet_NaN();
                r.resolved_frac = 1.0;
                r.crlb_deg = mean.rmse_bound_deg();
                r.seed = spec.seed;
                res.rows.push_back(r);
            }
            res.rho_spread.push_back(relative_spread(per_rho));

            // Digital reference against the mean hybrid bound at the largest rho.
            std::vector<CrlbReport> fd_reports;
            for (const ComplexMatrix &S : signals)
                fd_reports.push_back(crlb_fd(g, doas, S, spec.sigma2, spec.fd_pilots));
            const CrlbReport fd_mean = average_reports(fd_reports);
            const std::span<const CrlbReport> last(hds_reports.data() + (rhos.size() - 1) * spec.draws,
                                                   static_cast<std::size_t>(spec.draws));
            res.theorem3.push_back(theorem3_check(average_reports(last), fd_mean));
            ResultRow r;
            r.sweep_param = "rho";
            r.sweep_value = 1.0;
            r.algorithm = "crlb-fd-Td" + std::to_string(spec.fd_pilots);
            r.rmse_deg = std::numeric_limits<double>::quiet_NaN();
            r.resolved_frac = 1.0;
            r.crlb_deg = fd_mean.rmse_bound_deg();
            r.seed = spec.seed;
            res.rows.push_back(r);

            Theorem2Options t2;
            t2.nx = spec.nx;
            t2.nz = spec.nz;
            t2.n_rf = spec.n_rf;
            t2.pilots = T;
            t2.draws = spec.draws;
            t2.n_a = spec.n_a;
            t2.sigma2 = spec.sigma2;
            t2.doa = spec.doa;
            t2.seed = spec.seed;
            const Architecture all[] = {Architecture::Hfc, Architecture::Hs, Architecture::HdsOverlap,
                                        Architecture::HdsRandom};
            res.theorem2.push_back(theorem2_check(t2, all));
        }
        return res;
    }

    std::vector<BenchRow> benchmark_runtimes(const BenchSpec &spec)
    {
        if (spec.runs < 1 || spec.warmup < 0)
            throw ConfigError("bench: runs must be >= 1 and warmup >= 0");
        ExperimentSpec base = spec.base;
        base.algorithms = spec.algorithms;
        base.sweep_param = "snr_db";
        base.sweep_values = {base.snr_db};
        base.validate();
        const TrialData data = simulate_trial(base, 0);

        std::vector<BenchRow> rows;
        for (double step : spec.grid_steps)
        {
            ExperimentSpec s = base;
            s.estimator.elevation.step = step;
            s.estimator.azimuth.step = step;
            s.estimator.validate();
            for (Algorithm a : spec.algorithms)
            {
                for (int w = 0; w < spec.warmup; ++w)
                    run_algorithm(s, data, a, 0);
                std::vector<double> total, cov, search, refine;
                for (int k = 0; k < spec.runs; ++k)
                {
                    const auto t0 = std::chrono::steady_clock::now();
                    const DoaEstimate e = run_algorithm(s, data, a, 0);
                    total.push_back(
                        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
                    cov.push_back(e.timing.covariance_ms);
                    search.push_back(e.timing.search_ms);
                    refine.push_back(e.timing.refine_ms);
                }
                rows.push_back({to_string(a), step, spec.runs, median(total), median(cov), median(search),
                                median(refine)});
            }
        }
        return rows;
    }

    void write_bench_csv(std::ostream &os, std::span<const BenchRow> rows)
    {
        os << bench_csv_header << '\n';
        for (const BenchRow &r : rows)
            os << r.algorithm << ',' << format_number(r.grid_step) << ',' << r.runs << ','
               << format_number(r.median_ms, 6) << ',' << format_number(r.covariance_ms, 6) << ','
               << format_number(r.search_ms, 6) << ',' << format_number(r.refine_ms, 6) << '\n';
    }
}
