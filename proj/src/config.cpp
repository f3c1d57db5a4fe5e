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

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hdsdoa/harness.hpp"

namespace hdsdoa
{
    namespace
    {
        using nlohmann::json;

        void check_keys(const json &j, const std::set<std::string> &allowed, const std::string &where)
        {
            if (!j.is_object())
                throw ConfigError(where + " must be an object");
            for (const auto &[key, value] : j.items())
                if (!allowed.count(key))
                    throw ConfigError("unknown key '" + key + "' in " + where);
        }

        template <typename T>
        void read(const json &j, const char *key, T &out)
        {
            if (!j.contains(key))
                return;
            try
            {
                out = j.at(key).get<T>();
            }
            catch (const json::exception &e)
            {
                throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
            }
        }

        std::vector<double> range_values(double start, double stop, double step)
        {
            if (!(step > 0.0) || stop < start)
                throw ConfigError("sweep range needs step > 0 and stop >= start");
            std::vector<double> v;
            const int n = static_cast<int>(std::floor((stop - start) / step + 1e-9));
            for (int i = 0; i <= n; ++i)
                v.push_back(start + i * step);
            return v;
        }

        void read_array(const json &j, int &nx, int &nz, double *freq)
        {
            std::set<std::string> keys{"nx", "nz"};
            if (freq)
                keys.insert("frequency_hz");
            check_keys(j, keys, "array");
            read(j, "nx", nx);
            read(j, "nz", nz);
            if (freq)
                read(j, "frequency_hz", *freq);
        }
    }

    ExperimentSpec parse_experiment(const std::string &json_text)
    {
        json j;
        try
        {
            j = json::parse(json_text);
        }
        catch (const json::parse_error &e)
        {
            throw ConfigError(std::string("invalid JSON: ") + e.what());
        }
        check_keys(j,
                   {"sweep", "array", "tx_array", "paths", "streams", "n_rf", "pilots", "fd_pilots", "rho",
                    "architecture", "snr_db", "noiseless", "algorithms", "trials", "seed", "workers", "timing",
                    "crlb", "oracle_refine", "grid", "path_draw", "output"},
                   "experiment");

        ExperimentSpec s;
        if (j.contains("sweep"))
        {
            const json &sw = j["sweep"];
            check_keys(sw, {"param", "values", "start", "stop", "step"}, "sweep");
            read(sw, "param", s.sweep_param);
            if (sw.contains("values"))
                read(sw, "values", s.sweep_values);
            else if (sw.contains("start"))
            {
                double a = 0.0, b = 0.0, st = 1.0;
                read(sw, "start", a);
                read(sw, "stop", b);
                read(sw, "step", st);
                s.sweep_values = range_values(a, b, st);
            }
        }
        if (j.contains("array"))
            read_array(j["array"], s.nx, s.nz, &s.frequency_hz);
        if (j.contains("tx_array"))
            read_array(j["tx_array"], s.tx_nx, s.tx_nz, nullptr);
        read(j, "paths", s.paths);
        read(j, "streams", s.n_a);
        read(j, "n_rf", s.n_rf);
        read(j, "pilots", s.pilots);
        read(j, "fd_pilots", s.fd_pilots);
        read(j, "rho", s.rho);
        if (j.contains("architecture"))
        {
            std::string arch;
            read(j, "architecture", arch);
            s.arch = parse_architecture(arch);
        }
        read(j, "snr_db", s.snr_db);
        read(j, "noiseless", s.noiseless);
        if (j.contains("algorithms"))
        {
            std::vector<std::string> names;
            read(j, "algorithms", names);
            s.algorithms.clear();
            for (const std::string &a : names)
                s.algorithms.push_back(parse_algorithm(a));
        }
        read(j, "trials", s.trials);
        read(j, "seed", s.seed);
        read(j, "workers", s.workers);
        read(j, "timing", s.timing);
        read(j, "crlb", s.with_crlb);
        read(j, "oracle_refine", s.oracle_refine);
        if (j.contains("grid"))
        {
            const json &g = j["grid"];
            check_keys(g, {"coarse_step", "refine", "refine_step", "window_deg", "window_step", "corrected",
                           "min_separation_cells"},
                       "grid");
            double step = s.estimator.elevation.step;
            read(g, "coarse_step", step);
            s.estimator.elevation.step = s.estimator.azimuth.step = step;
            read(g, "refine", s.estimator.refine);
            read(g, "refine_step", s.estimator.refine_step);
            read(g, "window_deg", s.estimator.window_deg);
            read(g, "window_step", s.estimator.window_step);
            read(g, "corrected", s.estimator.corrected);
            read(g, "min_separation_cells", s.estimator.min_separation_cells);
        }
        if (j.contains("path_draw"))
        {
            const json &p = j["path_draw"];
            check_keys(p, {"nlos_attenuation_min_db", "nlos_attenuation_max_db", "min_elevation_separation_deg",
                           "max_abs_elevation_deg", "max_abs_azimuth_deg"},
                       "path_draw");
            read(p, "nlos_attenuation_min_db", s.path_options.nlos_attenuation_min_db);
            read(p, "nlos_attenuation_max_db", s.path_options.nlos_attenuation_max_db);
            read(p, "min_elevation_separation_deg", s.path_options.min_elevation_separation_deg);
            read(p, "max_abs_elevation_deg", s.path_options.max_abs_elevation_deg);
            read(p, "max_abs_azimuth_deg", s.path_options.max_abs_azimuth_deg);
        }
        read(j, "output", s.output);
        return s;
    }

    ExperimentSpec load_experiment(const std::string &path)
    {
        std::ifstream f(path);
        if (!f)
            throw ConfigError("cannot read config '" + path + "'");
        std::stringstream ss;
        ss << f.rdbuf();
        return parse_experiment(ss.str());
    }
}
