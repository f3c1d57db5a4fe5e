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


#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>

#include "hdsdoa/harness.hpp"

namespace py = pybind11;
using namespace hdsdoa;

namespace
{
    using AngleArray = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>;

    std::vector<DoaPair> to_pairs(const AngleArray &a)
    {
        std::vector<DoaPair> v(static_cast<std::size_t>(a.rows()));
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            v[static_cast<std::size_t>(i)] = {a(i, 0), a(i, 1)};
        return v;
    }

    AngleArray to_array(const std::vector<DoaPair> &v)
    {
        AngleArray a(static_cast<Eigen::Index>(v.size()), 2);
        for (std::size_t i = 0; i < v.size(); ++i)
            a.row(static_cast<Eigen::Index>(i)) << v[i].theta, v[i].phi;
        return a;
    }

    void wrap_geometry(py::module_ &m)
    {
        py::class_<UpaGeometry>(m, "Geometry", "Uniform planar array, elements indexed x-fastest.")
            .def(py::init([](int nx, int nz, double spacing, double wavelength) {
                     UpaGeometry g{nx, nz, spacing, wavelength};
                     g.validate();
                     return g;
                 }),
                 py::arg("nx"), py::arg("nz"), py::arg("spacing") = 0.5, py::arg("wavelength") = 1.0)
            .def_static("half_wavelength", &UpaGeometry::half_wavelength, py::arg("nx"), py::arg("nz"),
                        py::arg("frequency_hz") = 1.0e12)
            .def_readonly("nx", &UpaGeometry::nx)
            .def_readonly("nz", &UpaGeometry::nz)
            .def_readonly("spacing", &UpaGeometry::spacing)
            .def_readonly("wavelength", &UpaGeometry::wavelength)
            .def_property_readonly("size", &UpaGeometry::size)
            .def("__repr__", [](const UpaGeometry &g) {
                return "Geometry(nx=" + std::to_string(g.nx) + ", nz=" + std::to_string(g.nz) + ")";
            });

        m.def(
            "steering_vector",
            [](const UpaGeometry &g, double theta, double phi) { return steering_vector(g, {theta, phi}); },
            py::arg("geometry"), py::arg("theta"), py::arg("phi"));
        m.def(
            "manifold", [](const UpaGeometry &g, const AngleArray &doas) { return manifold(g, to_pairs(doas)); },
            py::arg("geometry"), py::arg("doas"), "Steering matrix for an (L, 2) array of (theta, phi) in degrees.");
    }

    void wrap_correction(py::module_ &m)
    {
        m.def("forward_eigenvalue", &forward_eigenvalue, py::arg("sigma2"), py::arg("c"), py::arg("eps"));
        m.def("invert_eigenvalue", &invert_eigenvalue, py::arg("lam"), py::arg("sigma2"), py::arg("c"));
        m.def("projector_weight", &projector_weight, py::arg("eps"), py::arg("sigma2"), py::arg("c"));
        m.def("detectability_edge", &detectability_edge, py::arg("sigma2"), py::arg("c"));
    }

    void wrap_estimators(py::module_ &m)
    {
        py::class_<EstimatorOptions>(m, "EstimatorOptions")
            .def(py::init<>())
            .def_property(
                "grid_step", [](const EstimatorOptions &o) { return o.elevation.step; },
                [](EstimatorOptions &o, double s) { o.elevation.step = o.azimuth.step = s; })
            .def_readwrite("corrected", &EstimatorOptions::corrected)
            .def_readwrite("refine", &EstimatorOptions::refine)
            .def_readwrite("refine_step", &EstimatorOptions::refine_step)
            .def_readwrite("window_deg", &EstimatorOptions::window_deg)
            .def_readwrite("window_step", &EstimatorOptions::window_step)
            .def_readwrite("min_separation_cells", &EstimatorOptions::min_separation_cells);

        py::class_<DoaEstimate>(m, "Estimate")
            .def_property_readonly("doas", [](const DoaEstimate &e) { return to_array(e.pairs); })
            .def_readonly("cost", &DoaEstimate::cost)
            .def_readonly("resolved", &DoaEstimate::resolved)
            .def_readonly("fallback", &DoaEstimate::fallback)
            .def_property_readonly("total_ms", [](const DoaEstimate &e) { return e.timing.total_ms; });

        py::class_<ObservationSet>(m, "Observation")
            .def_readonly("Y", &ObservationSet::Y)
            .def_readonly("W", &ObservationSet::W)
            .def_readonly("geometry", &ObservationSet::geometry)
            .def_readonly("n_rf", &ObservationSet::n_rf)
            .def_readonly("pilots", &ObservationSet::pilots)
            .def_readonly("sigma2", &ObservationSet::sigma2);

        m.def("rd_music", &rd_music, py::arg("obs"), py::arg("L"), py::arg("options") = EstimatorOptions{});
        m.def("imrd_music", &imrd_music, py::arg("obs"), py::arg("L"), py::arg("options") = EstimatorOptions{});
        m.def("music_2d", &music_2d_oracle, py::arg("obs"), py::arg("L"), py::arg("options") = EstimatorOptions{});
        m.def("fd_music_2d", &fd_music_2d, py::arg("Y"), py::arg("geometry"), py::arg("L"),
              py::arg("options") = EstimatorOptions{});
        m.def(
            "rmse",
            [](const AngleArray &truth, const AngleArray &est) {
                RmseAccumulator acc;
                acc.add(to_pairs(truth), to_pairs(est));
                return acc.rmse_deg();
            },
            py::arg("truth"), py::arg("estimate"), "RMSE in degrees over both angles after optimal matching.");
    }

    void wrap_crlb(py::module_ &m)
    {
        m.def(
            "crlb_fd",
            [](const UpaGeometry &g, const AngleArray &doas, const ComplexMatrix &S, double sigma2, int fd_pilots) {
                return crlb_fd(g, to_pairs(doas), S, sigma2, fd_pilots).crlb;
            },
            py::arg("geometry"), py::arg("doas"), py::arg("S"), py::arg("sigma2"), py::arg("fd_pilots") = 1,
            "2L x 2L bound in rad^2, ordered [theta..., phi...].");
    }

    void wrap_harness(py::module_ &m)
    {
        py::class_<TrialData>(m, "Trial")
            .def_property_readonly("doas", [](const TrialData &t) { return to_array(t.channel.paths.doas); })
            .def_property_readonly("H", [](const TrialData &t) { return t.channel.H; })
            .def_readonly("S", &TrialData::S)
            .def_readonly("precoder", &TrialData::precoder)
            .def_readonly("sigma2", &TrialData::sigma2)
            .def_readonly("observation", &TrialData::obs)
            .def_readonly("rx", &TrialData::rx)
            .def(
                "crlb",
                [](const TrialData &t) { return crlb_hds(t.stack, t.rx, t.channel.paths.doas, t.S, t.sigma2).crlb; },
                "Hybrid receiver bound for this trial in rad^2.")
            .def(
                "digital_snapshots",
                [](const TrialData &t, int fd_pilots, std::uint64_t seed) {
                    Rng rng(seed);
                    return fd_observe(t.channel, t.precoder, fd_pilots, t.sigma2, rng);
                },
                py::arg("fd_pilots"), py::arg("seed") = 0);

        m.def(
            "simulate",
            [](const std::string &config, std::uint64_t trial) {
                const ExperimentSpec s = parse_experiment(config);
                s.validate();
                return simulate_trial(s.at(s.sweep_values.front()), trial);
            },
            py::arg("config_json"), py::arg("trial") = 0,
            "One trial of an experiment; the first sweep value is used.");

        m.def(
            "run_experiment",
            [](const std::string &config) {
                std::vector<ResultRow> rows;
                {
                    py::gil_scoped_release release;
                    rows = run_experiment(parse_experiment(config));
                }
                py::list out;
                for (const ResultRow &r : rows)
                {
                    py::dict d;
                    d["sweep_param"] = r.sweep_param;
                    d["sweep_value"] = r.sweep_value;
                    d["algorithm"] = r.algorithm;
                    d["rmse_deg"] = r.rmse_deg;
                    d["resolved_frac"] = r.resolved_frac;
                    d["mean_ms"] = r.mean_ms ? py::cast(*r.mean_ms) : py::none();
                    d["crlb_deg"] = r.crlb_deg ? py::cast(*r.crlb_deg) : py::none();
                    d["seed"] = r.seed;
                    out.append(d);
                }
                return out;
            },
            py::arg("config_json"));
    }
}

PYBIND11_MODULE(_core, m)
{
    m.doc() = "2-D DOA estimation for hybrid dynamic subarray receivers";
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    wrap_geometry(m);
    wrap_correction(m);
    wrap_estimators(m);
    wrap_crlb(m);
    wrap_harness(m);
}
