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

#include "hdsdoa/estimators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace hdsdoa
{
    std::string to_string(Algorithm a)
    {
        switch (a)
        {
        case Algorithm::RdMusic:
            return "rd-music";
        case Algorithm::ImrdMusic:
            return "imrd-music";
        case Algorithm::HdsMusic2d:
            return "2d-music";
        case Algorithm::FdMusic2d:
            return "fd-2d-music";
        }
        return "unknown";
    }

    Algorithm parse_algorithm(std::string_view s)
    {
        if (s == "rd-music")
            return Algorithm::RdMusic;
        if (s == "imrd-music")
            return Algorithm::ImrdMusic;
        if (s == "2d-music")
            return Algorithm::HdsMusic2d;
        if (s == "fd-2d-music")
            return Algorithm::FdMusic2d;
        throw ConfigError("unknown algorithm '" + std::string(s) + "'");
    }

    void SearchGrid::validate() const
    {
        if (!(step > 0.0))
            throw ConfigError("SearchGrid: step must be positive");
        if (!(lo <= hi) || lo < -90.0 || hi > 90.0)
            throw ConfigError("SearchGrid: range must lie inside [-90, 90]");
    }

    int SearchGrid::size() const
    {
        return static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
    }

    std::vector<double> SearchGrid::points() const
    {
        validate();
        const int n = size();
        std::vector<double> p(n);
        for (int i = 0; i < n; ++i)
            p[i] = lo + i * step;
        return p;
    }

    void EstimatorOptions::validate() const
    {
        elevation.validate();
        azimuth.validate();
        if (!(refine_step > 0.0) || !(window_deg > 0.0) || !(window_step > 0.0))
            throw ConfigError("EstimatorOptions: refinement steps and window must be positive");
        if (min_separation_cells < 1)
            throw ConfigError("EstimatorOptions: min_separation_cells must be >= 1");
    }

    namespace
    {
        using Clock = std::chrono::steady_clock;

        double ms_since(Clock::time_point t)
        {
            return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
        }

        // sum_iz az[iz] * src(:, iz*nx : iz*nx + nx)
        ComplexMatrix fold_columns(const ComplexMatrix &src, const ComplexVector &az, int nx)
        {
            ComplexMatrix out = ComplexMatrix::Zero(src.rows(), nx);
            for (Eigen::Index iz = 0; iz < az.size(); ++iz)
                out.noalias() += az(iz) * src.middleCols(iz * nx, nx);
            return out;
        }

        ComplexMatrix azimuth_block(const UpaGeometry &g, const std::vector<double> &theta, double phi_deg)
        {
            ComplexMatrix AX(g.nx, static_cast<Eigen::Index>(theta.size()));
            const double cphi = std::cos(phi_deg * deg2rad);
            for (std::size_t i = 0; i < theta.size(); ++i)
                AX.col(static_cast<Eigen::Index>(i)) =
                    axis_vector(g.nx, g.spacing_in_wavelengths(), std::sin(theta[i] * deg2rad) * cphi);
            return AX;
        }

        double clamp_unit(double x)
        {
            return std::clamp(x, -1.0, 1.0);
        }

        double asin_deg(double x)
        {
            return std::asin(clamp_unit(x)) * rad2deg;
        }

        double theta_from_v(double v, double phi_deg)
        {
            const double c = std::cos(phi_deg * deg2rad);
            if (c <= 0.0)
                return 0.0;
            return asin_deg(v / c);
        }

        struct Prepared
        {
            SpectralDecomposition sd;
            RealVector scales;
            std::vector<bool> flags;
        };

        Prepared prepare(const ComplexMatrix &Y, int L, bool corrected)
        {
            if (L < 1)
                throw DimensionError("estimator: L must be >= 1");
            Prepared p{sample_covariance(Y, L), RealVector::Ones(L), std::vector<bool>(L, true)};
            if (corrected)
            {
                const BiasCorrection bc = correct_spectrum(p.sd);
                p.scales = bc.projector_scales();
                p.flags = bc.resolvable;
            }
            return p;
        }

        // Coarse-to-fine search in direction cosines (u, v), where the
        // spectrum valleys are round; angle space shears them near end-fire.
        std::pair<DoaPair, double> refine_uv(const std::function<double(double, double)> &f, const DoaPair &start,
                                             double halfwidth, double step, double final_step)
        {
            ReducedCoords best = ReducedCoords::from(start);
            double best_val = f(best.u, best.v);
            double hw = halfwidth, st = step;
            for (;;)
            {
                const int n = static_cast<int>(std::lround(hw / st));
                const ReducedCoords c = best;
                for (int i = -n; i <= n; ++i)
                    for (int j = -n; j <= n; ++j)
                    {
                        const double u = c.u + j * st, v = c.v + i * st;
                        if (u * u + v * v > 1.0)
                            continue;
                        const double val = f(u, v);
                        if (val < best_val)
                        {
                            best_val = val;
                            best = {u, v};
                        }
                    }
                if (st <= final_step * (1.0 + 1e-9))
                    break;
                hw = st;
                st = std::max(st / 5.0, final_step);
            }
            const double phi = asin_deg(best.u);
            return {{theta_from_v(best.v, phi), phi}, best_val};
        }

        DoaEstimate grid_2d_estimate(const RealMatrix &grid, const std::vector<double> &theta,
                                     const std::vector<double> &phi, int L, const EstimatorOptions &opt,
                                     const std::function<double(double, double)> &spectrum_uv)
        {
            DoaEstimate est;
            const double cell = std::max(opt.azimuth.step, opt.elevation.step) * deg2rad;
            const double min_dist = opt.min_separation_cells * cell;
            const auto too_close = [&](const std::pair<int, int> &a, const std::pair<int, int> &b) {
                const ReducedCoords x = ReducedCoords::from({theta[a.first], phi[a.second]});
                const ReducedCoords y = ReducedCoords::from({theta[b.first], phi[b.second]});
                return std::hypot(x.u - y.u, x.v - y.v) < min_dist;
            };
            const MinimaPick2d pick = pick_minima_2d(grid, L, too_close);
            est.resolved = pick.ok;
            const auto t0 = Clock::now();
            for (const auto &[i, j] : pick.index)
            {
                DoaPair d{theta[i], phi[j]};
                double c = grid(i, j);
                if (opt.refine)
                    std::tie(d, c) = refine_uv(spectrum_uv, d, cell, cell / 5.0, opt.refine_step * deg2rad / 4.0);
                est.pairs.push_back(d);
                est.cost.push_back(c);
            }
            est.timing.refine_ms = ms_since(t0);
            return est;
        }
    }

    HdsSpectrum::HdsSpectrum(const ObservationSet &obs, const ComplexMatrix &Us, const RealVector &scales)
        : g_(obs.geometry), Wh_(obs.W.adjoint()), scales_(scales)
    {
        require_dims(obs.W.rows() == g_.size(), "HdsSpectrum: combiner rows must equal N_r");
        require_dims(Us.rows() == obs.W.cols(), "HdsSpectrum: subspace rows must equal N_RF T");
        require_dims(scales.size() == Us.cols(), "HdsSpectrum: one scale per signal vector");
        UWh_ = Us.adjoint() * Wh_;
    }

    ComplexMatrix HdsSpectrum::fold_z(const ComplexMatrix &src, const ComplexVector &az) const
    {
        return fold_columns(src, az, g_.nx);
    }

    ComplexMatrix HdsSpectrum::reduced_matrix(double u) const
    {
        const ComplexVector az = axis_vector(g_.nz, g_.spacing_in_wavelengths(), u);
        const ComplexMatrix M = fold_z(Wh_, az);
        const ComplexMatrix N = fold_z(UWh_, az);
        ComplexMatrix Q = M.adjoint() * M;
        Q.noalias() -= N.adjoint() * scales_.asDiagonal() * N;
        return Q;
    }

    ComplexVector solve_regularized(const ComplexMatrix &Q)
    {
        require_dims(Q.rows() == Q.cols() && Q.rows() >= 1, "solve_regularized: Q must be square");
        const Eigen::Index n = Q.rows();
        const ComplexVector d1 = ComplexVector::Unit(n, 0);
        Eigen::PartialPivLU<ComplexMatrix> lu(Q);
        if (!(lu.rcond() >= 1e-12))
        {
            const double delta = 1e-12 * Q.diagonal().cwiseAbs().sum() / static_cast<double>(n);
            lu.compute(Q + ComplexMatrix::Identity(n, n) * cd(std::max(delta, 1e-300), 0.0));
        }
        return lu.solve(d1);
    }

    double HdsSpectrum::elevation_cost(double u) const
    {
        const ComplexMatrix Q = reduced_matrix(u);
        const Eigen::LLT<ComplexMatrix> llt(Q);
        if (llt.info() == Eigen::Success)
        {
            const ComplexVector x = llt.solve(ComplexVector::Unit(Q.rows(), 0));
            if (x.allFinite() && x(0).real() > 0.0)
                return 1.0 / x(0).real();
        }
        // Indefinite Q(u): the constrained minimum is unbounded below, use the
        // most negative eigenvalue instead.
        const Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(Q, Eigen::EigenvaluesOnly);
        return std::min(es.eigenvalues()(0), 0.0);
    }

    ComplexVector HdsSpectrum::azimuth_vector(double u) const
    {
        const ComplexVector x = solve_regularized(reduced_matrix(u));
        return x / x(0);
    }

    double HdsSpectrum::azimuth_cost(const ComplexMatrix &Q, double v) const
    {
        const ComplexVector ax = axis_vector(g_.nx, g_.spacing_in_wavelengths(), v);
        return ax.dot(Q * ax).real();
    }

    double HdsSpectrum::spectrum(double u, double v) const
    {
        const double dl = g_.spacing_in_wavelengths();
        const ComplexVector az = axis_vector(g_.nz, dl, u);
        const ComplexVector ax = axis_vector(g_.nx, dl, v);
        const ComplexVector y = fold_z(Wh_, az) * ax;
        const ComplexVector z = fold_z(UWh_, az) * ax;
        return y.squaredNorm() - scales_.dot(z.cwiseAbs2());
    }

    RealMatrix HdsSpectrum::spectrum_grid(const std::vector<double> &theta, const std::vector<double> &phi) const
    {
        RealMatrix out(theta.size(), phi.size());
        const double dl = g_.spacing_in_wavelengths();
        for (std::size_t j = 0; j < phi.size(); ++j)
        {
            const ComplexVector az = axis_vector(g_.nz, dl, std::sin(phi[j] * deg2rad));
            const ComplexMatrix AX = azimuth_block(g_, theta, phi[j]);
            const ComplexMatrix Y = fold_z(Wh_, az) * AX;
            const ComplexMatrix Z = fold_z(UWh_, az) * AX;
            out.col(static_cast<Eigen::Index>(j)) =
                Y.colwise().squaredNorm().transpose() - (scales_.transpose() * Z.cwiseAbs2()).transpose();
        }
        return out;
    }

    DigitalSpectrum::DigitalSpectrum(const UpaGeometry &g, const ComplexMatrix &Us)
        : g_(g), UsH_(Us.adjoint())
    {
        require_dims(Us.rows() == g.size(), "DigitalSpectrum: subspace rows must equal N_r");
    }

    double DigitalSpectrum::spectrum(double u, double v) const
    {
        const double dl = g_.spacing_in_wavelengths();
        const ComplexVector az = axis_vector(g_.nz, dl, u);
        const ComplexVector ax = axis_vector(g_.nx, dl, v);
        return g_.size() - (fold_columns(UsH_, az, g_.nx) * ax).squaredNorm();
    }

    RealMatrix DigitalSpectrum::spectrum_grid(const std::vector<double> &theta, const std::vector<double> &phi) const
    {
        RealMatrix out(theta.size(), phi.size());
        const double dl = g_.spacing_in_wavelengths();
        for (std::size_t j = 0; j < phi.size(); ++j)
        {
            const ComplexVector az = axis_vector(g_.nz, dl, std::sin(phi[j] * deg2rad));
            const ComplexMatrix Z = fold_columns(UsH_, az, g_.nx) * azimuth_block(g_, theta, phi[j]);
            out.col(static_cast<Eigen::Index>(j)) =
                (RealVector::Constant(static_cast<Eigen::Index>(theta.size()), g_.size()) -
                 Z.cwiseAbs2().colwise().sum().transpose());
        }
        return out;
    }

    MinimaPick pick_minima(const std::vector<double> &cost, int L, int min_sep)
    {
        const int n = static_cast<int>(cost.size());
        std::vector<int> local, all(n);
        std::iota(all.begin(), all.end(), 0);
        for (int i = 0; i < n; ++i)
        {
            const bool left = i == 0 || cost[i] <= cost[i - 1];
            const bool right = i == n - 1 || cost[i] <= cost[i + 1];
            if (left && right)
                local.push_back(i);
        }
        const auto by_cost = [&](int a, int b) { return cost[a] < cost[b] || (cost[a] == cost[b] && a < b); };
        std::sort(local.begin(), local.end(), by_cost);
        std::sort(all.begin(), all.end(), by_cost);

        MinimaPick pick;
        const auto far = [&](int i) {
            for (int j : pick.index)
                if (std::abs(i - j) < min_sep)
                    return false;
            return true;
        };
        for (const std::vector<int> *pool : {&local, &all})
            for (int i : *pool)
                if (static_cast<int>(pick.index.size()) < L && far(i))
                    pick.index.push_back(i);
        if (static_cast<int>(pick.index.size()) < L)
        {
            pick.ok = false;
            for (int i : all)
                if (static_cast<int>(pick.index.size()) < L &&
                    std::find(pick.index.begin(), pick.index.end(), i) == pick.index.end())
                    pick.index.push_back(i);
        }
        return pick;
    }

    MinimaPick2d pick_minima_2d(const RealMatrix &cost, int L, int min_sep)
    {
        return pick_minima_2d(cost, L, [min_sep](const std::pair<int, int> &a, const std::pair<int, int> &b) {
            return std::max(std::abs(a.first - b.first), std::abs(a.second - b.second)) < min_sep;
        });
    }

    MinimaPick2d pick_minima_2d(const RealMatrix &cost, int L, const CellPredicate &too_close)
    {
        const int R = static_cast<int>(cost.rows()), C = static_cast<int>(cost.cols());
        std::vector<std::pair<int, int>> local, all;
        all.reserve(static_cast<std::size_t>(R) * C);
        for (int j = 0; j < C; ++j)
            for (int i = 0; i < R; ++i)
            {
                all.emplace_back(i, j);
                bool is_min = true;
                for (int di = -1; di <= 1 && is_min; ++di)
                    for (int dj = -1; dj <= 1; ++dj)
                    {
                        const int a = i + di, b = j + dj;
                        if ((di == 0 && dj == 0) || a < 0 || a >= R || b < 0 || b >= C)
                            continue;
                        if (cost(a, b) < cost(i, j))
                        {
                            is_min = false;
                            break;
                        }
                    }
                if (is_min)
                    local.emplace_back(i, j);
            }
        const auto by_cost = [&](const std::pair<int, int> &a, const std::pair<int, int> &b) {
            const double ca = cost(a.first, a.second), cb = cost(b.first, b.second);
            return ca < cb || (ca == cb && a < b);
        };
        std::sort(local.begin(), local.end(), by_cost);

        MinimaPick2d pick;
        const auto far = [&](const std::pair<int, int> &p) {
            for (const auto &q : pick.index)
                if (too_close(p, q))
                    return false;
            return true;
        };
        for (const auto &p : local)
            if (static_cast<int>(pick.index.size()) < L && far(p))
                pick.index.push_back(p);
        if (static_cast<int>(pick.index.size()) < L)
        {
            std::sort(all.begin(), all.end(), by_cost);
            for (const auto &p : all)
                if (static_cast<int>(pick.index.size()) < L && far(p))
                    pick.index.push_back(p);
        }
        if (static_cast<int>(pick.index.size()) < L)
        {
            pick.ok = false;
            for (const auto &p : all)
                if (static_cast<int>(pick.index.size()) < L &&
                    std::find(pick.index.begin(), pick.index.end(), p) == pick.index.end())
                    pick.index.push_back(p);
        }
        return pick;
    }

    std::pair<double, double> refine_minimum(const std::function<double(double)> &f, double center, double halfwidth,
                                             double step, double final_step, double lo, double hi)
    {
        if (!(step > 0.0) || !(final_step > 0.0) || halfwidth < 0.0)
            throw ConfigError("refine_minimum: steps must be positive");
        double x = std::clamp(center, lo, hi);
        double best = f(x);
        double hw = halfwidth, st = step;
        for (;;)
        {
            const int n = static_cast<int>(std::lround(hw / st));
            const double c = x;
            for (int i = -n; i <= n; ++i)
            {
                const double t = c + i * st;
                if (i == 0 || t < lo || t > hi)
                    continue;
                const double v = f(t);
                if (v < best)
                {
                    best = v;
                    x = t;
                }
            }
            if (st <= final_step * (1.0 + 1e-9))
                break;
            hw = st;
            st = std::max(st / 5.0, final_step);
        }
        return {x, best};
    }

    RealVector unwrap_phases(const ComplexVector &x)
    {
        RealVector g(x.size());
        if (x.size() == 0)
            return g;
        g(0) = std::arg(x(0));
        for (Eigen::Index n = 1; n < x.size(); ++n)
            g(n) = g(n - 1) + std::arg(x(n) * std::conj(x(n - 1)));
        return g;
    }

    double ls_phase_slope(const ComplexVector &ax, double spacing_in_wavelengths)
    {
        require_dims(ax.size() >= 2, "ls_phase_slope: need at least two elements");
        // Unwrap around the lag-one slope so steps near +-pi survive noise.
        const Eigen::Index n = ax.size();
        const double w0 = std::arg((ax.tail(n - 1).array() * ax.head(n - 1).conjugate().array()).sum());
        ComplexVector r(n);
        for (Eigen::Index k = 0; k < n; ++k)
            r(k) = ax(k) * std::polar(1.0, -w0 * static_cast<double>(k));
        RealVector g = unwrap_phases(r);
        for (Eigen::Index k = 0; k < n; ++k)
            g(k) += w0 * static_cast<double>(k);
        Eigen::MatrixX2d P(n, 2);
        P.col(0).setOnes();
        P.col(1) = RealVector::LinSpaced(n, 0.0, static_cast<double>(n - 1));
        const Eigen::Vector2d c = P.colPivHouseholderQr().solve(g);
        return c(1) / (2.0 * pi * spacing_in_wavelengths);
    }

    bool has_special_pair(const ObservationSet &obs)
    {
        const int n = obs.n_rf, T = obs.pilots;
        if (n < 3 || T < 1 || obs.W.cols() != static_cast<Eigen::Index>(n) * T || obs.W.rows() % n != 0)
            return false;
        const Eigen::Index ns = obs.W.rows() / n;
        for (int tau = 0; tau < T; ++tau)
        {
            const auto w0 = obs.W.col(tau);
            const auto w1 = obs.W.col(T + tau);
            if (!w0.segment((n - 1) * ns, ns).isZero(0.0) || !w1.segment(0, ns).isZero(0.0))
                return false;
            for (int i = 0; i + 1 < n; ++i)
                if (w1.segment((i + 1) * ns, ns) != w0.segment(i * ns, ns))
                    return false;
        }
        return true;
    }

    std::vector<std::vector<double>> rotational_elevation_seeds(const ObservationSet &obs, const ComplexMatrix &Us)
    {
        const int T = obs.pilots;
        const Eigen::Index L = Us.cols();
        require_dims(Us.rows() >= 2 * T, "rotational_elevation_seeds: need two chains");
        if (obs.geometry.nz % obs.n_rf != 0)
            throw ConfigError("rotational_elevation_seeds: nz must be divisible by n_rf");
        const ComplexMatrix Us1 = Us.topRows(T);
        const ComplexMatrix Us2 = Us.middleRows(T, T);
        if (numerical_rank(Us1, 1e-8) < L)
            throw DimensionError("rotational_elevation_seeds: Us1 is rank deficient");
        const ComplexVector beta = general_evd(pseudoinverse(Us1) * Us2);

        const double kappa =
            2.0 * pi * obs.geometry.spacing_in_wavelengths() * obs.geometry.nz / static_cast<double>(obs.n_rf);
        const int kmax = static_cast<int>(std::ceil(kappa / (2.0 * pi))) + 1;
        std::vector<std::vector<double>> seeds(L);
        for (Eigen::Index l = 0; l < L; ++l)
        {
            const double ang = std::arg(beta(l));
            for (int k = -kmax; k <= kmax; ++k)
            {
                const double u = (ang + 2.0 * pi * k) / kappa;
                if (std::abs(u) <= 1.0)
                    seeds[l].push_back(u);
            }
            if (seeds[l].empty())
                seeds[l].push_back(clamp_unit(ang / kappa));
        }
        return seeds;
    }

    DoaEstimate rd_music(const ObservationSet &obs, int L, const EstimatorOptions &opt)
    {
        opt.validate();
        const auto start = Clock::now();
        const Prepared prep = prepare(obs.Y, L, opt.corrected);
        const HdsSpectrum spec(obs, prep.sd.Us, prep.scales);

        DoaEstimate est;
        est.path_resolvable = prep.flags;
        est.timing.covariance_ms = ms_since(start);

        auto t = Clock::now();
        const std::vector<double> phi = opt.elevation.points();
        std::vector<double> cost(phi.size());
        for (std::size_t i = 0; i < phi.size(); ++i)
            cost[i] = spec.elevation_cost(std::sin(phi[i] * deg2rad));
        const MinimaPick pick = pick_minima(cost, L, opt.min_separation_cells);
        est.resolved = pick.ok;
        est.timing.search_ms = ms_since(t);

        // Refined positions are held to the same separation as grid picks, so
        // two cells in one basin cannot both survive refinement.
        t = Clock::now();
        const auto elev = [&](double p) { return spec.elevation_cost(std::sin(p * deg2rad)); };
        const double sep = opt.min_separation_cells * opt.elevation.step;
        std::vector<std::pair<double, double>> chosen;
        const std::vector<int> ranked =
            opt.refine ? pick_minima(cost, static_cast<int>(cost.size()), opt.min_separation_cells).index : pick.index;
        for (int idx : ranked)
        {
            if (static_cast<int>(chosen.size()) == L)
                break;
            double ph = phi[idx], c = cost[idx];
            if (opt.refine)
                std::tie(ph, c) = refine_minimum(elev, ph, opt.elevation.step, opt.elevation.step / 5.0,
                                                 opt.refine_step, opt.elevation.lo, opt.elevation.hi);
            if (std::any_of(chosen.begin(), chosen.end(), [&](const auto &q) { return std::abs(q.first - ph) < sep; }))
                continue;
            chosen.emplace_back(ph, c);
        }
        for (std::size_t k = 0; static_cast<int>(chosen.size()) < L; ++k)
        {
            est.resolved = false;
            chosen.emplace_back(phi[pick.index[k]], cost[pick.index[k]]);
        }

        const std::vector<double> theta = opt.azimuth.points();
        for (const auto &[ph, c] : chosen)
        {
            const ComplexMatrix Q = spec.reduced_matrix(std::sin(ph * deg2rad));
            const double cphi = std::cos(ph * deg2rad);
            const auto azim = [&](double th) { return spec.azimuth_cost(Q, std::sin(th * deg2rad) * cphi); };
            double th = theta.front(), best = std::numeric_limits<double>::infinity();
            for (double x : theta)
            {
                const double v = azim(x);
                if (v < best)
                {
                    best = v;
                    th = x;
                }
            }
            if (opt.refine)
                th = refine_minimum(azim, th, opt.azimuth.step, opt.azimuth.step / 5.0, opt.refine_step,
                                    opt.azimuth.lo, opt.azimuth.hi)
                         .first;
            est.pairs.push_back({th, ph});
            est.cost.push_back(c);
        }
        est.timing.refine_ms = ms_since(t);
        est.timing.total_ms = ms_since(start);
        return est;
    }

    DoaEstimate imrd_music(const ObservationSet &obs, int L, const EstimatorOptions &opt)
    {
        opt.validate();
        if (!has_special_pair(obs))
            throw ConfigError("imrd_music: observation was not built with the special pair layout");
        if (obs.pilots <= L)
            throw ConfigError("imrd_music: requires T > L");

        const auto start = Clock::now();
        const Prepared prep = prepare(obs.Y, L, opt.corrected);
        const HdsSpectrum spec(obs, prep.sd.Us, prep.scales);
        const double cov_ms = ms_since(start);

        auto t = Clock::now();
        std::vector<std::vector<double>> seeds;
        try
        {
            seeds = rotational_elevation_seeds(obs, prep.sd.Us);
        }
        catch (const DimensionError &)
        {
            DoaEstimate est = rd_music(obs, L, opt);
            est.fallback = true;
            return est;
        }

        DoaEstimate est;
        est.path_resolvable = prep.flags;
        est.timing.covariance_ms = cov_ms;
        const auto elev = [&](double p) { return spec.elevation_cost(std::sin(p * deg2rad)); };
        std::vector<double> phi0(L), c0(L);
        for (int l = 0; l < L; ++l)
        {
            c0[l] = std::numeric_limits<double>::infinity();
            for (double u : seeds[l])
            {
                const double p = asin_deg(u);
                const double c = elev(p);
                if (c < c0[l])
                {
                    c0[l] = c;
                    phi0[l] = p;
                }
            }
        }
        est.timing.search_ms = ms_since(t);

        t = Clock::now();
        const double dl = obs.geometry.spacing_in_wavelengths();
        for (int l = 0; l < L; ++l)
        {
            double ph = phi0[l], c = c0[l];
            if (opt.refine)
                std::tie(ph, c) = refine_minimum(elev, ph, opt.window_deg, opt.window_step, opt.refine_step,
                                                 opt.elevation.lo, opt.elevation.hi);
            const double v = ls_phase_slope(spec.azimuth_vector(std::sin(ph * deg2rad)), dl);
            est.pairs.push_back({theta_from_v(v, ph), ph});
            est.cost.push_back(c);
        }
        // A minimum on the window edge means the seed missed its path; two
        // seeds or refined elevations closer than the peak separation mean a
        // path was lost.
        const double sep = opt.min_separation_cells * opt.elevation.step;
        bool missed = false;
        for (int l = 0; l < L; ++l)
            missed = missed || (opt.refine && std::abs(est.pairs[l].phi - phi0[l]) >= opt.window_deg - opt.window_step / 2);
        for (int a = 0; a < L; ++a)
            for (int b = a + 1; b < L; ++b)
                missed = missed || std::abs(est.pairs[a].phi - est.pairs[b].phi) < sep ||
                         std::abs(phi0[a] - phi0[b]) < sep;
        if (missed)
        {
            DoaEstimate rd = rd_music(obs, L, opt);
            rd.fallback = true;
            rd.timing.total_ms = ms_since(start);
            return rd;
        }
        est.timing.refine_ms = ms_since(t);
        est.timing.total_ms = ms_since(start);
        return est;
    }

    DoaEstimate music_2d_oracle(const ObservationSet &obs, int L, const EstimatorOptions &opt)
    {
        opt.validate();
        const auto start = Clock::now();
        const Prepared prep = prepare(obs.Y, L, opt.corrected);
        const HdsSpectrum spec(obs, prep.sd.Us, prep.scales);
        const double cov_ms = ms_since(start);

        const auto t = Clock::now();
        const std::vector<double> theta = opt.azimuth.points();
        const std::vector<double> phi = opt.elevation.points();
        const RealMatrix grid = spec.spectrum_grid(theta, phi);
        const double search_ms = ms_since(t);

        const auto point = [&](double u, double v) { return spec.spectrum(u, v); };
        DoaEstimate est = grid_2d_estimate(grid, theta, phi, L, opt, point);
        est.path_resolvable = prep.flags;
        est.timing.covariance_ms = cov_ms;
        est.timing.search_ms = search_ms;
        est.timing.total_ms = ms_since(start);
        return est;
    }

    DoaEstimate fd_music_2d(const ComplexMatrix &Y, const UpaGeometry &g, int L, const EstimatorOptions &opt)
    {
        opt.validate();
        require_dims(Y.rows() == g.size(), "fd_music_2d: snapshot rows must equal N_r");
        const auto start = Clock::now();
        const Prepared prep = prepare(Y, L, false);
        const DigitalSpectrum spec(g, prep.sd.Us);
        const double cov_ms = ms_since(start);

        const auto t = Clock::now();
        const std::vector<double> theta = opt.azimuth.points();
        const std::vector<double> phi = opt.elevation.points();
        const RealMatrix grid = spec.spectrum_grid(theta, phi);
        const double search_ms = ms_since(t);

        const auto point = [&](double u, double v) { return spec.spectrum(u, v); };
        DoaEstimate est = grid_2d_estimate(grid, theta, phi, L, opt, point);
        est.path_resolvable = prep.flags;
        est.timing.covariance_ms = cov_ms;
        est.timing.search_ms = search_ms;
        est.timing.total_ms = ms_since(start);
        return est;
    }

    double matched_squared_error(std::span<const DoaPair> truth, std::span<const DoaPair> estimate)
    {
        require_dims(truth.size() == estimate.size() && !truth.empty(),
                     "matched_squared_error: truth and estimate sizes differ");
        std::vector<int> perm(truth.size());
        std::iota(perm.begin(), perm.end(), 0);
        double best = std::numeric_limits<double>::infinity();
        do
        {
            double s = 0.0;
            for (std::size_t l = 0; l < truth.size(); ++l)
            {
                const double dt = estimate[perm[l]].theta - truth[l].theta;
                const double dp = estimate[perm[l]].phi - truth[l].phi;
                s += dt * dt + dp * dp;
            }
            best = std::min(best, s);
        } while (std::next_permutation(perm.begin(), perm.end()));
        return best;
    }

    void RmseAccumulator::add(std::span<const DoaPair> truth, const DoaEstimate &est)
    {
        if (!est.resolved || est.pairs.size() != truth.size())
        {
            ++trials_;
            return;
        }
        add(truth, std::span<const DoaPair>(est.pairs));
    }

    void RmseAccumulator::add(std::span<const DoaPair> truth, std::span<const DoaPair> estimate)
    {
        ++trials_;
        ++resolved_;
        sum_sq_ += matched_squared_error(truth, estimate);
        entries_ += 2 * static_cast<long>(truth.size());
    }

    double RmseAccumulator::rmse_deg() const
    {
        if (entries_ == 0)
            return std::numeric_limits<double>::quiet_NaN();
        return std::sqrt(sum_sq_ / static_cast<double>(entries_));
    }

    double RmseAccumulator::resolved_fraction() const
    {
        return trials_ == 0 ? 0.0 : static_cast<double>(resolved_) / trials_;
    }
}
