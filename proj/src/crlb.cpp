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

#include "hdsdoa/crlb.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hdsdoa/random.hpp"

namespace hdsdoa
{
    RealVector CrlbReport::diagonal_deg2() const
    {
        return crlb.diagonal() * (rad2deg * rad2deg);
    }

    double CrlbReport::rmse_bound_deg() const
    {
        return std::sqrt(diagonal_deg2().mean());
    }

    namespace
    {
        ComplexMatrix derivative_matrix(const UpaGeometry &g, std::span<const DoaPair> doas)
        {
            const Eigen::Index L = static_cast<Eigen::Index>(doas.size());
            ComplexMatrix B(g.size(), 2 * L);
            for (Eigen::Index l = 0; l < L; ++l)
            {
                const SteeringDerivatives d = steering_derivatives(g, doas[l]);
                B.col(l) = d.d_theta;
                B.col(L + l) = d.d_phi;
            }
            return B;
        }

        // (2 / s2) Re{(B^H P B) .* R^T} with P the projector orthogonal to A
        // and R the summed outer products of [s; s].
        RealMatrix assemble_fisher(const ComplexMatrix &A, const ComplexMatrix &B, const ComplexMatrix &SSh,
                                   double sigma2)
        {
            const Eigen::Index L = A.cols();
            const ComplexMatrix AhA = A.adjoint() * A;
            const ComplexMatrix AhB = A.adjoint() * B;
            ComplexMatrix G = B.adjoint() * B;
            G.noalias() -= AhB.adjoint() * (pseudoinverse(AhA) * AhB);

            ComplexMatrix Rs(2 * L, 2 * L);
            Rs << SSh, SSh, SSh, SSh;
            RealMatrix F = (2.0 / sigma2) * G.cwiseProduct(Rs.transpose()).real();
            return 0.5 * (F + F.transpose());
        }

        CrlbReport finish(RealMatrix F)
        {
            Eigen::SelfAdjointEigenSolver<RealMatrix> es(F);
            const double lmax = es.eigenvalues().maxCoeff();
            const double lmin = es.eigenvalues().minCoeff();
            if (!(lmax > 0.0) || !(lmin > 1e-13 * lmax))
                throw std::domain_error("Fisher matrix is singular (condition " + std::to_string(lmax / lmin) + ")");
            CrlbReport r;
            r.crlb = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
            r.crlb = 0.5 * (r.crlb + r.crlb.transpose());
            r.fisher = std::move(F);
            return r;
        }

        // Q^{-1/2} Phi with Q = Phi Phi^H.
        ComplexMatrix whiten(const ComplexMatrix &Phi)
        {
            const HermitianEvd evd = hermitian_evd(Phi * Phi.adjoint());
            const double floor = 1e-12 * evd.values(0);
            const RealVector w = evd.values.cwiseMax(floor).cwiseSqrt().cwiseInverse();
            return evd.vectors * w.asDiagonal() * (evd.vectors.adjoint() * Phi);
        }

        void check_inputs(std::span<const DoaPair> doas, const ComplexMatrix &S, double sigma2)
        {
            if (doas.empty())
                throw DimensionError("crlb: at least one path is required");
            require_dims(S.rows() == static_cast<Eigen::Index>(doas.size()), "crlb: S must have L rows");
            if (!(sigma2 > 0.0))
                throw ConfigError("crlb: sigma2 must be positive");
        }
    }

    CrlbReport crlb_hds(const CombinerStack &stack, const UpaGeometry &g, std::span<const DoaPair> doas,
                        const ComplexMatrix &S, double sigma2)
    {
        check_inputs(doas, S, sigma2);
        require_dims(stack.n_r == g.size(), "crlb_hds: combiner does not match the array");
        const ComplexMatrix Phi = whiten(stack.stacked().adjoint());
        const ComplexMatrix A = Phi * manifold(g, doas);
        const ComplexMatrix B = Phi * derivative_matrix(g, doas);
        CrlbReport r = finish(assemble_fisher(A, B, S * S.adjoint(), sigma2));
        r.architecture = "hds";
        r.n_r = g.size();
        r.n_rf = stack.n_rf;
        r.pilots = stack.pilots();
        r.sigma2 = sigma2;
        double closed = 0.0;
        for (const PilotCombiner &pc : stack.per_pilot)
            closed += static_cast<double>(pc.switches.count());
        r.rho = closed / (static_cast<double>(stack.n_rf) * stack.n_rf * stack.pilots());
        return r;
    }

    CrlbReport crlb_fd(const UpaGeometry &g, std::span<const DoaPair> doas, const ComplexMatrix &S, double sigma2,
                       int fd_pilots)
    {
        check_inputs(doas, S, sigma2);
        if (fd_pilots < 1)
            throw ConfigError("crlb_fd: at least one pilot is required");
        if (g.size() <= static_cast<int>(doas.size()))
            throw DimensionError("crlb_fd: need N_r > L");
        const ComplexMatrix SSh = static_cast<double>(fd_pilots) * (S * S.adjoint());
        CrlbReport r = finish(assemble_fisher(manifold(g, doas), derivative_matrix(g, doas), SSh, sigma2));
        r.architecture = "fd";
        r.n_r = g.size();
        r.n_rf = g.size();
        r.pilots = fd_pilots;
        r.sigma2 = sigma2;
        return r;
    }

    double spread_factor(const RealVector &d)
    {
        return static_cast<double>(d.size()) * d.squaredNorm() - d.sum() * d.sum();
    }

    double cross_factor(const RealVector &a, const RealVector &b)
    {
        require_dims(a.size() == b.size(), "cross_factor: length mismatch");
        return static_cast<double>(a.size()) * a.dot(b) - a.sum() * b.sum();
    }

    Eigen::Matrix2d fisher_closed_form_fd(const UpaGeometry &g, const DoaPair &doa, int n_a, int fd_pilots,
                                          double p_hat, double sigma2)
    {
        const double ct = std::cos(doa.theta * deg2rad);
        const double cp = std::cos(doa.phi * deg2rad);
        const RealVector d1 = horizontal_offsets(g);
        const RealVector d2 = elevation_offsets(g, doa);
        const double lam = g.wavelength;
        const double k = 8.0 * n_a * fd_pilots * p_hat * pi * pi / (g.size() * sigma2 * lam * lam);
        Eigen::Matrix2d F;
        F(0, 0) = k * ct * ct * cp * cp * spread_factor(d1);
        F(1, 1) = k * spread_factor(d2);
        F(0, 1) = F(1, 0) = k * ct * cp * cross_factor(d1, d2);
        return F;
    }

    Eigen::Matrix2d fisher_closed_form_hds(const UpaGeometry &g, int n_rf, const DoaPair &doa, int pilots, int n_a,
                                           double p_hat, double sigma2)
    {
        const double K = static_cast<double>(n_rf) / g.size();
        return K * pilots * fisher_closed_form_fd(g, doa, n_a, 1, p_hat, sigma2);
    }

    Eigen::Matrix2d fisher_single_source_hds(const CombinerStack &stack, const UpaGeometry &g, const DoaPair &doa,
                                             int n_a, double p_hat, double sigma2)
    {
        const ComplexMatrix Phi = whiten(stack.stacked().adjoint());
        const ComplexVector a = Phi * steering_vector(g, doa);
        const SteeringDerivatives d = steering_derivatives(g, doa);
        const ComplexVector b1 = Phi * d.d_theta;
        const ComplexVector b2 = Phi * d.d_phi;
        const double na2 = a.squaredNorm();
        const double k = 2.0 * n_a * p_hat / (sigma2 * na2);
        Eigen::Matrix2d F;
        F(0, 0) = k * (na2 * b1.squaredNorm() - std::norm(b1.dot(a)));
        F(1, 1) = k * (na2 * b2.squaredNorm() - std::norm(b2.dot(a)));
        F(0, 1) = k * (na2 * b1.dot(b2) - b1.dot(a) * a.dot(b2)).real();
        F(1, 0) = k * (na2 * b2.dot(b1) - b2.dot(a) * a.dot(b1)).real();
        return F;
    }

    CrlbReport average_reports(std::span<const CrlbReport> reports)
    {
        if (reports.empty())
            throw DimensionError("average_reports: no reports");
        CrlbReport out = reports.front();
        for (std::size_t i = 1; i < reports.size(); ++i)
        {
            require_dims(reports[i].crlb.rows() == out.crlb.rows(), "average_reports: shape mismatch");
            out.crlb += reports[i].crlb;
            out.fisher += reports[i].fisher;
            out.rho += reports[i].rho;
        }
        const double n = static_cast<double>(reports.size());
        out.crlb /= n;
        out.fisher /= n;
        out.rho /= n;
        return out;
    }

    Eigen::Vector2d relative_spread(std::span<const Eigen::Vector2d> values)
    {
        if (values.empty())
            return Eigen::Vector2d::Zero();
        Eigen::Vector2d lo = values.front(), hi = values.front(), sum = Eigen::Vector2d::Zero();
        for (const Eigen::Vector2d &v : values)
        {
            lo = lo.cwiseMin(v);
            hi = hi.cwiseMax(v);
            sum += v;
        }
        const Eigen::Vector2d mean = sum / static_cast<double>(values.size());
        return (hi - lo).cwiseQuotient(mean);
    }

    Theorem2Report theorem2_check(const Theorem2Options &opt, std::span<const Architecture> architectures)
    {
        if (opt.draws < 1 || architectures.empty())
            throw ConfigError("theorem2_check: need at least one draw and one architecture");
        const UpaGeometry g = UpaGeometry::half_wavelength(opt.nx, opt.nz);
        const DoaPair doas[1] = {opt.doa};

        Theorem2Report rep;
        rep.architectures.assign(architectures.begin(), architectures.end());
        rep.mean_crlb.assign(architectures.size(), Eigen::Vector2d::Zero());
        for (int k = 0; k < opt.draws; ++k)
        {
            Rng srng(derive_seed(opt.seed, static_cast<std::uint64_t>(k), 11));
            ComplexMatrix S(1, opt.n_a);
            for (int n = 0; n < opt.n_a; ++n)
                S(0, n) = unit_phasor(srng);
            for (std::size_t i = 0; i < architectures.size(); ++i)
            {
                HdsConfig cfg;
                cfg.n_rf = opt.n_rf;
                cfg.n_r = g.size();
                cfg.arch = architectures[i];
                cfg.rho = architectures[i] == Architecture::Hs    ? 1.0 / opt.n_rf
                          : architectures[i] == Architecture::Hfc ? 1.0
                                                                  : opt.rho;
                // Seeded by family, so a family listed twice sees the same draws.
                const auto family = static_cast<std::uint64_t>(architectures[i]);
                Rng rng(derive_seed(opt.seed, static_cast<std::uint64_t>(k), 100 + family));
                const CombinerStack stack = build_combiner(rng, cfg, opt.pilots);
                const CrlbReport r = crlb_hds(stack, g, doas, S, opt.sigma2);
                rep.mean_crlb[i] += Eigen::Vector2d(r.crlb(0, 0), r.crlb(1, 1)) / opt.draws;
            }
        }
        rep.spread = relative_spread(rep.mean_crlb);
        return rep;
    }

    Theorem3Report theorem3_check(const CrlbReport &hds, const CrlbReport &fd)
    {
        require_dims(hds.crlb.rows() == fd.crlb.rows(), "theorem3_check: reports differ in size");
        Theorem3Report r;
        r.predicted = static_cast<double>(fd.n_r) * fd.pilots / (static_cast<double>(hds.n_rf) * hds.pilots);
        r.measured = hds.crlb.diagonal().cwiseQuotient(fd.crlb.diagonal());
        r.max_relative_deviation = ((r.measured.array() - r.predicted).abs() / r.predicted).maxCoeff();
        return r;
    }
}
