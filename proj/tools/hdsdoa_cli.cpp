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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hdsdoa/harness.hpp"

using namespace hdsdoa;

namespace
{
    std::vector<std::string> split(const std::string &s, char sep)
    {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, sep))
            if (!item.empty())
                out.push_back(item);
        return out;
    }

    double to_double(const std::string &s)
    {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size())
            throw ConfigError("not a number: '" + s + "'");
        return v;
    }

    // a:b:step
    std::vector<double> parse_range(const std::string &s)
    {
        const std::vector<std::string> p = split(s, ':');
        if (p.size() != 3)
            throw ConfigError("expected a:b:step, got '" + s + "'");
        const double a = to_double(p[0]), b = to_double(p[1]), st = to_double(p[2]);
        if (!(st > 0.0) || b < a)
            throw ConfigError("range needs step > 0 and b >= a");
        std::vector<double> v;
        for (int i = 0; a + i * st <= b + 1e-9 * st; ++i)
            v.push_back(a + i * st);
        return v;
    }

    std::vector<double> parse_list(const std::string &s)
    {
        std::vector<double> v;
        for (const std::string &x : split(s, ','))
            v.push_back(to_double(x));
        return v;
    }

    template <typename Rows, typename Writer>
    void emit(const std::string &path, const Rows &rows, Writer w)
    {
        if (path.empty() || path == "-")
        {
            w(std::cout, rows);
            return;
        }
        std::ofstream f(path, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot open '" + path + "' for writing");
        w(f, rows);
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"2-D DOA estimation for hybrid dynamic subarray receivers"};
    app.require_subcommand(1);

    // run
    auto *run = app.add_subcommand("run", "Monte Carlo RMSE sweep");
    std::string config, snr, sweep, arch, algo, out;
    int nrf = 0, pilots = 0, trials = 0, workers = -1, antennas = 0;
    long long seed = -1;
    bool no_timing = false;
    run->add_option("--config", config, "JSON experiment file");
    run->add_option("--snr", snr, "SNR sweep a:b:step in dB");
    run->add_option("--sweep", sweep, "generic sweep PARAM:v1,v2,... (snr_db, n_rf, pilots, antennas, rho)");
    run->add_option("--nrf", nrf, "RF chains");
    run->add_option("--pilots", pilots, "pilot count T");
    run->add_option("--antennas", antennas, "receive array side (N_x = N_z)");
    run->add_option("--trials", trials, "Monte Carlo trials per point");
    run->add_option("--seed", seed, "base seed");
    run->add_option("--arch", arch, "hfc | hs | hds-overlap | hds-random");
    run->add_option("--algo", algo, "comma list of rd-music, imrd-music, 2d-music, fd-2d-music");
    run->add_option("--workers", workers, "worker threads (0: all cores)");
    run->add_flag("--no-timing", no_timing, "leave mean_ms empty (byte-stable output)");
    run->add_option("--out", out, "CSV path (default stdout)");

    // crlb
    auto *crlb = app.add_subcommand("crlb", "CRLB versus switch fraction and architecture");
    bool rho_sweep = false;
    std::string crlb_pilots = "8,16", crlb_arch = "hds-random", crlb_out, crlb_rho;
    int crlb_nrf = 16, draws = 50, crlb_side = 16, fd_pilots = 16;
    double theta = 20.0, phi = 10.0;
    long long crlb_seed = 7;
    crlb->add_flag("--rho-sweep", rho_sweep, "sweep rho from 1/N_RF to 1");
    crlb->add_option("--rho", crlb_rho, "explicit comma list of rho values");
    crlb->add_option("--nrf", crlb_nrf, "RF chains");
    crlb->add_option("--pilots", crlb_pilots, "comma list of T");
    crlb->add_option("--fd-pilots", fd_pilots, "digital pilot count T_d");
    crlb->add_option("--antennas", crlb_side, "array side");
    crlb->add_option("--draws", draws, "random phase draws");
    crlb->add_option("--arch", crlb_arch, "combiner family for the sweep");
    crlb->add_option("--theta", theta, "azimuth (deg)");
    crlb->add_option("--phi", phi, "elevation (deg)");
    crlb->add_option("--seed", crlb_seed, "base seed");
    crlb->add_option("--out", crlb_out, "CSV path (default stdout)");

    // bench
    auto *bench = app.add_subcommand("bench", "median runtime per algorithm");
    std::string bench_config, bench_algo = "imrd-music,rd-music,2d-music", bench_grid = "0.5", bench_out;
    int runs = 10;
    bench->add_option("--config", bench_config, "JSON experiment file for the fixed parameters");
    bench->add_option("--algo", bench_algo, "comma list of algorithms");
    bench->add_option("--grid", bench_grid, "comma list of coarse grid steps (deg)");
    bench->add_option("--runs", runs, "timed runs per algorithm");
    bench->add_option("--out", bench_out, "CSV path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*run)
        {
            ExperimentSpec s = config.empty() ? ExperimentSpec{} : load_experiment(config);
            if (!snr.empty())
            {
                s.sweep_param = "snr_db";
                s.sweep_values = parse_range(snr);
            }
            if (!sweep.empty())
            {
                const auto colon = sweep.find(':');
                if (colon == std::string::npos)
                    throw ConfigError("expected PARAM:v1,v2,...");
                s.sweep_param = sweep.substr(0, colon);
                s.sweep_values = parse_list(sweep.substr(colon + 1));
            }
            if (nrf > 0)
                s.n_rf = nrf;
            if (pilots > 0)
                s.pilots = pilots;
            if (antennas > 0)
                s.nx = s.nz = antennas;
            if (trials > 0)
                s.trials = trials;
            if (seed >= 0)
                s.seed = static_cast<std::uint64_t>(seed);
            if (!arch.empty())
                s.arch = parse_architecture(arch);
            if (!algo.empty())
            {
                s.algorithms.clear();
                for (const std::string &a : split(algo, ','))
                    s.algorithms.push_back(parse_algorithm(a));
            }
            if (workers >= 0)
                s.workers = workers;
            if (no_timing)
                s.timing = false;
            if (!out.empty())
                s.output = out;
            const std::vector<ResultRow> rows = run_experiment(s);
            emit(s.output, rows, [](std::ostream &os, const auto &r) { write_csv(os, r); });
        }
        else if (*crlb)
        {
            CrlbSweepSpec cs;
            cs.nx = cs.nz = crlb_side;
            cs.n_rf = crlb_nrf;
            cs.pilots.clear();
            for (double t : parse_list(crlb_pilots))
                cs.pilots.push_back(static_cast<int>(t));
            cs.fd_pilots = fd_pilots;
            cs.arch = parse_architecture(crlb_arch);
            cs.draws = draws;
            cs.doa = {theta, phi};
            cs.seed = static_cast<std::uint64_t>(crlb_seed);
            if (!crlb_rho.empty())
                cs.rho = parse_list(crlb_rho);
            else if (!rho_sweep)
                cs.rho = {0.5};
            const CrlbSweepResult res = run_crlb_sweep(cs);
            emit(crlb_out, res.rows, [](std::ostream &os, const auto &r) { write_csv(os, r); });
            for (std::size_t i = 0; i < res.pilots.size(); ++i)
            {
                std::fprintf(stderr, "T=%d rho spread theta %.4f phi %.4f\n", res.pilots[i], res.rho_spread[i](0),
                             res.rho_spread[i](1));
                std::fprintf(stderr, "T=%d family spread theta %.4f phi %.4f\n", res.pilots[i],
                             res.theorem2[i].spread(0), res.theorem2[i].spread(1));
                std::fprintf(stderr, "T=%d hybrid/digital ratio predicted %.4f max deviation %.4f\n", res.pilots[i],
                             res.theorem3[i].predicted, res.theorem3[i].max_relative_deviation);
            }
        }
        else if (*bench)
        {
            BenchSpec bs;
            if (!bench_config.empty())
                bs.base = load_experiment(bench_config);
            bs.base.trials = 1;
            bs.algorithms.clear();
            for (const std::string &a : split(bench_algo, ','))
                bs.algorithms.push_back(parse_algorithm(a));
            bs.grid_steps = parse_list(bench_grid);
            bs.runs = runs;
            const std::vector<BenchRow> rows = benchmark_runtimes(bs);
            emit(bench_out, rows, [](std::ostream &os, const auto &r) { write_bench_csv(os, r); });
        }
    }
    catch (const std::exception &e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
