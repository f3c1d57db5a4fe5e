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


// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//   hdsdoa_acceptance [--only 1,5,7] [--workers N] [--trials N]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hdsdoa/harness.hpp"

using namespace hdsdoa;

namespace
{
    struct Outcome
    {
        bool pass = false;
        std::string detail;
    };

    std::string fmt(const char *f, double a)
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, f, a);
        return buf;
    }

    int workers = 0;
    int trials = 200;
    constexpr double cell = 0.5; // coarse grid step, degrees

    // Smallest over assignments of the largest per-angle error.
    double matched_chebyshev(const std::vector<DoaPair> &a, const std::vector<DoaPair> &b)
    {
        if (a.size() != b.size())
            return INFINITY;
        std::vector<int> p(a.size());
        std::iota(p.begin(), p.end(), 0);
        double best = INFINITY;
        do
        {
            double w = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i)
                w = std::max({w, std::abs(a[i].theta - b[p[i]].theta), std::abs(a[i].phi - b[p[i]].phi)});
            best = std::min(best, w);
        } while (std::next_permutation(p.begin(), p.end()));
        return best;
    }

    ExperimentSpec desk_spec()
    {
        ExperimentSpec s; // 16x16 receive array, N_RF = 8, T = 12, L = 3
        s.trials = trials;
        s.workers = workers;
        s.timing = false;
        s.with_crlb = false;
        return s;
    }

    Outcome model_identities()
    {
        double worst = 0.0;
        Rng rng(101);
        for (int k = 0; k < 50; ++k)
        {
            const UpaGeometry rx = UpaGeometry::half_wavelength(4 + 2 * (k % 3), 8 + 4 * (k % 2));
            const UpaGeometry tx = UpaGeometry::half_wavelength(4, 4);
            const PathSet paths = draw_paths(rng, 1 + k % 4);
            const ChannelRealization ch = build_channel(paths, rx, tx);
            worst = std::max(worst, (ch.H - channel_path_sum(paths, rx, tx)).cwiseAbs().maxCoeff());

            HdsConfig cfg;
            cfg.n_rf = 4;
            cfg.n_r = rx.size();
            cfg.rho = 0.25 * (1 + k % 4);
            cfg.arch = (k % 2) ? Architecture::HdsOverlap : Architecture::HdsRandom;
            cfg.special_pair = true;
            const ComplexMatrix F = draw_precoder(rng, paths, tx, 8);
            const ComplexMatrix S = equivalent_signal(paths, tx, F);
            const CombinerStack stack = build_combiner(rng, cfg, 2 + k % 5);
            const ObservationSet obs = transmit_and_correct(ch, F, stack, rx, 0.0, rng);
            for (int q = 0; q < cfg.n_rf; ++q)
                worst = std::max(worst, (obs.chain_block(q) - chain_model_by_subarray(stack, cfg, rx, paths, S, q))
                                            .cwiseAbs()
                                            .maxCoeff());

            // Chain 1 sees the chain 0 response rotated by the subarray shift.
            const ComplexMatrix psi = shift_operator(cfg, rx, paths.doas);
            const ComplexMatrix I = ComplexMatrix::Identity(paths.size(), paths.size());
            const ComplexMatrix B0 = chain_model_by_subarray(stack, cfg, rx, paths, I, 0);
            worst = std::max(worst, (obs.chain_block(1) - B0 * psi * S).cwiseAbs().maxCoeff());
        }
        return {worst < 1e-10, "max abs error " + fmt("%.2e", worst)};
    }

    Outcome spike_algebra()
    {
        Rng rng(102);
        double worst = 0.0;
        for (int k = 0; k < 1000; ++k)
        {
            const double s2 = uniform(rng, 0.01, 10.0);
            const double c = uniform(rng, 0.01, 4.0);
            const double eps = s2 * std::sqrt(c) * uniform(rng, 1.001, 50.0);
            const double back = invert_eigenvalue(forward_eigenvalue(s2, c, eps), s2, c);
            worst = std::max(worst, std::abs(back - eps) / eps);
        }
        const double w = projector_weight(2.0, 1.0, 1e-9);
        return {worst < 1e-10 && std::abs(w - 1.0) < 1e-6,
                "max rel error " + fmt("%.2e", worst) + ", alignment at c=1e-9 " + fmt("%.9f", w)};
    }

    Outcome noiseless_recovery()
    {
        ExperimentSpec s = desk_spec();
        s.noiseless = true;
        s.algorithms = {Algorithm::RdMusic, Algorithm::ImrdMusic, Algorithm::HdsMusic2d, Algorithm::FdMusic2d};
        std::map<Algorithm, double> worst;
        std::map<Algorithm, int> hits;
        for (int t = 0; t < 20; ++t)
        {
            const TrialData d = simulate_trial(s, static_cast<std::uint64_t>(t));
            for (Algorithm a : s.algorithms)
            {
                const double e = matched_chebyshev(d.channel.paths.doas, run_algorithm(s, d, a, t).pairs);
                worst[a] = std::max(worst[a], e);
                hits[a] += e <= cell;
            }
        }
        bool ok = true;
        std::string detail;
        for (Algorithm a : s.algorithms)
        {
            ok = ok && hits[a] == 20;
            detail += to_string(a) + " " + std::to_string(hits[a]) + "/20 (worst " + fmt("%.3f", worst[a]) + ") ";
        }
        return {ok, detail};
    }

    Outcome oracle_equivalence()
    {
        ExperimentSpec s = desk_spec();
        s.algorithms = {Algorithm::RdMusic, Algorithm::HdsMusic2d};
        s.snr_db = 10.0;
        double worst_clean = 0.0, worst_noisy = 0.0;
        for (bool noiseless : {true, false})
        {
            s.noiseless = noiseless;
            for (int t = 0; t < 20; ++t)
            {
                const TrialData d = simulate_trial(s, static_cast<std::uint64_t>(t));
                const double e = matched_chebyshev(run_algorithm(s, d, Algorithm::RdMusic, t).pairs,
                                                   run_algorithm(s, d, Algorithm::HdsMusic2d, t).pairs);
                (noiseless ? worst_clean : worst_noisy) = std::max(noiseless ? worst_clean : worst_noisy, e);
            }
        }
        return {worst_clean <= cell && worst_noisy <= cell,
                "max RD/2-D gap noiseless " + fmt("%.3f", worst_clean) + ", 10 dB " + fmt("%.3f", worst_noisy)};
    }

    // Strictly decreasing with at most one inversion of at most 5%.
    bool decreasing(const std::vector<double> &r)
    {
        int inversions = 0;
        for (std::size_t i = 1; i < r.size(); ++i)
            if (!(r[i] < r[i - 1]))
            {
                if (r[i] > 1.05 * r[i - 1])
                    return false;
                ++inversions;
            }
        return inversions <= 1;
    }

    Outcome snr_curves()
    {
        ExperimentSpec s = desk_spec();
        s.algorithms = {Algorithm::RdMusic, Algorithm::ImrdMusic};
        const std::vector<ResultRow> rows = run_experiment(s);
        std::vector<double> snr, rd, im;
        for (const ResultRow &r : rows)
        {
            if (r.algorithm == "rd-music")
            {
                snr.push_back(r.sweep_value);
                rd.push_back(r.rmse_deg);
            }
            else
                im.push_back(r.rmse_deg);
        }
        const bool a = decreasing(rd) && decreasing(im);
        bool b = true, c = true;
        std::string table;
        for (std::size_t i = 0; i < snr.size(); ++i)
        {
            if (snr[i] >= 0.0)
                b = b && std::abs(im[i] - rd[i]) <= 0.2 * rd[i];
            if (snr[i] < 0.0)
                c = c && im[i] <= rd[i];
            table += fmt("%g dB: ", snr[i]) + fmt("RD %.4g", rd[i]) + fmt(" IMRD %.4g; ", im[i]);
        }
        std::string detail = std::string("(a) ") + (a ? "pass" : "FAIL") + " (b) " + (b ? "pass" : "FAIL") +
                             " (c) " + (c ? "pass" : "FAIL") + " | " + table;
        return {a && b && c, detail};
    }

    double rd_rmse(int n_rf, int pilots)
    {
        ExperimentSpec s = desk_spec();
        s.algorithms = {Algorithm::RdMusic};
        s.sweep_values = {20.0};
        s.n_rf = n_rf;
        s.pilots = pilots;
        return run_experiment(s).front().rmse_deg;
    }

    // Evaluated at 20 dB, above the outlier threshold of the smallest configuration.
    Outcome resource_trends()
    {
        const double n4 = rd_rmse(4, 12), n8 = rd_rmse(8, 12), n16 = rd_rmse(16, 12);
        const double t8 = rd_rmse(8, 8), t16 = rd_rmse(8, 16);
        const double swap = rd_rmse(16, 8);
        const bool improves = n4 > n8 && n8 > n16 && t8 > n8 && n8 > t16;
        const double d_nrf = std::log(n4) - 2.0 * std::log(n8) + std::log(n16);
        const double d_t = std::log(t8) - 2.0 * std::log(n8) + std::log(t16);
        const double gap = std::abs(t16 - swap) / std::min(t16, swap);
        std::string detail = fmt("N_RF 4/8/16: %.4g/", n4) + fmt("%.4g/", n8) + fmt("%.4g", n16) +
                             fmt("; T 8/12/16: %.4g/", t8) + fmt("%.4g/", n8) + fmt("%.4g", t16) +
                             fmt("; 2nd diff %.3f", d_nrf) + fmt(", %.3f", d_t) +
                             fmt("; (8,16) vs (16,8) %.1f%%", 100 * gap);
        return {improves && 0.5 * (d_nrf + d_t) >= 0.0 && gap <= 0.25, detail};
    }

    CrlbSweepResult &crlb_sweep()
    {
        static CrlbSweepResult res = [] {
            CrlbSweepSpec s; // 16x16, N_RF = 16, T in {8, 16}, 50 draws
            s.workers = workers;
            return run_crlb_sweep(s);
        }();
        return res;
    }

    Outcome family_spread()
    {
        const CrlbSweepResult &r = crlb_sweep();
        double fam = 0.0, rho = 0.0;
        std::string detail;
        for (std::size_t i = 0; i < r.pilots.size(); ++i)
        {
            fam = std::max(fam, r.theorem2[i].max_spread());
            rho = std::max(rho, r.rho_spread[i].maxCoeff());
            detail += "T=" + std::to_string(r.pilots[i]) +
                      fmt(": family spread %.2f%%", 100 * r.theorem2[i].max_spread()) +
                      fmt(", rho spread %.2f%%; ", 100 * r.rho_spread[i].maxCoeff());
        }
        return {fam < 0.1 && rho < 0.1, detail};
    }

    Outcome digital_ratio()
    {
        const CrlbSweepResult &r = crlb_sweep();
        const auto it = std::find(r.pilots.begin(), r.pilots.end(), 16);
        const Theorem3Report &t = r.theorem3[static_cast<std::size_t>(it - r.pilots.begin())];
        return {t.max_relative_deviation < 0.15, fmt("predicted %.3g", t.predicted) +
                                                     fmt(", measured %.4g", t.measured(0)) +
                                                     fmt("/%.4g", t.measured(1)) +
                                                     fmt(", deviation %.2f%%", 100 * t.max_relative_deviation)};
    }

    Outcome digital_closed_form()
    {
        Rng rng(109);
        double worst = 0.0;
        for (int k = 0; k < 20; ++k)
        {
            const UpaGeometry g = UpaGeometry::half_wavelength(2 + k % 7, 2 + (3 * k) % 7);
            const DoaPair d{uniform(rng, -80.0, 80.0), uniform(rng, -80.0, 80.0)};
            const int n_a = 4 + k % 5, T_d = 1 + k % 3;
            const ComplexMatrix S = complex_normal_matrix(rng, 1, n_a, 1.0);
            const double sigma2 = uniform(rng, 0.1, 2.0);
            const DoaPair doas[1] = {d};
            const RealMatrix F = crlb_fd(g, doas, S, sigma2, T_d).fisher;
            const Eigen::Matrix2d C = fisher_closed_form_fd(g, d, n_a, T_d, S.squaredNorm() / n_a, sigma2);
            worst = std::max(worst, (F - C).norm() / C.norm());
        }
        return {worst < 1e-8, "max rel error " + fmt("%.2e", worst)};
    }

    Outcome runtime_ordering()
    {
        BenchSpec b;
        b.base = desk_spec();
        b.runs = 10;
        const std::vector<BenchRow> rows = benchmark_runtimes(b);
        std::map<std::string, double> ms;
        for (const BenchRow &r : rows)
            ms[r.algorithm] = r.median_ms;
        const double im = ms["imrd-music"], rd = ms["rd-music"], o = ms["2d-music"];
        return {rd >= 1.5 * im && o >= 1.5 * rd, fmt("median ms IMRD %.1f", im) + fmt(", RD %.1f", rd) +
                                                     fmt(", 2-D %.1f", o) + fmt("; ratios %.2f", rd / im) +
                                                     fmt(", %.2f", o / rd)};
    }

    Outcome determinism()
    {
        ExperimentSpec s = desk_spec();
        s.trials = 8;
        s.sweep_values = {0.0, 10.0};
        s.with_crlb = true;
        s.algorithms = {Algorithm::RdMusic, Algorithm::ImrdMusic, Algorithm::HdsMusic2d, Algorithm::FdMusic2d};
        std::vector<std::string> out;
        for (int w : {1, 2, 4})
        {
            s.workers = w;
            std::ostringstream os;
            write_csv(os, run_experiment(s));
            out.push_back(os.str());
        }
        const bool same = out[0] == out[1] && out[1] == out[2];
        return {same, std::string("workers 1/2/4 ") + (same ? "byte-identical" : "differ")};
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"hdsdoa acceptance run"};
    std::string only;
    app.add_option("--only", only, "comma list of criteria to run");
    app.add_option("--workers", workers, "worker threads (0: all cores)");
    app.add_option("--trials", trials, "Monte Carlo trials for the RMSE criteria");
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria{
        {"model identities", model_identities},
        {"spike map inversion", spike_algebra},
        {"noiseless recovery", noiseless_recovery},
        {"RD matches the 2-D search", oracle_equivalence},
        {"RMSE versus SNR", snr_curves},
        {"RF chains and pilots", resource_trends},
        {"bound across families and rho", family_spread},
        {"hybrid to digital bound ratio", digital_ratio},
        {"digital closed-form Fisher", digital_closed_form},
        {"runtime ordering", runtime_ordering},
        {"determinism", determinism},
    };

    std::vector<bool> selected(criteria.size(), only.empty());
    std::stringstream ss(only);
    for (std::string tok; std::getline(ss, tok, ',');)
    {
        const int k = std::stoi(tok);
        if (k < 1 || k > static_cast<int>(criteria.size()))
        {
            std::fprintf(stderr, "no criterion %d\n", k);
            return 2;
        }
        selected[k - 1] = true;
    }

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i)
    {
        if (!selected[i])
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = criteria[i].second();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("error: ") + e.what()};
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += !o.pass;
        std::printf("%s %2zu  %-30s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    o.detail.c_str(), s);
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
