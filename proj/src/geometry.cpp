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

#include "hdsdoa/geometry.hpp"

#include <cmath>

namespace hdsdoa
{
    namespace
    {
        constexpr double speed_of_light = 299792458.0;
    }

    UpaGeometry UpaGeometry::half_wavelength(int nx, int nz, double frequency_hz)
    {
        if (frequency_hz <= 0.0)
            throw ConfigError("UpaGeometry: carrier frequency must be positive");
        UpaGeometry g;
        g.nx = nx;
        g.nz = nz;
        g.wavelength = speed_of_light / frequency_hz;
        g.spacing = 0.5 * g.wavelength;
        g.validate();
        return g;
    }

    void UpaGeometry::validate() const
    {
        if (nx < 1 || nz < 1)
            throw ConfigError("UpaGeometry: nx and nz must be >= 1");
        if (!(spacing > 0.0) || !(wavelength > 0.0))
            throw ConfigError("UpaGeometry: spacing and wavelength must be positive");
    }

    ReducedCoords ReducedCoords::from(const DoaPair &a)
    {
        const double th = a.theta * deg2rad;
        const double ph = a.phi * deg2rad;
        return {std::sin(ph), std::sin(th) * std::cos(ph)};
    }

    double fold_azimuth(double theta_deg)
    {
        if (theta_deg > 90.0)
            return 180.0 - theta_deg;
        if (theta_deg < -90.0)
            return -180.0 - theta_deg;
        return theta_deg;
    }

    ComplexVector axis_vector(int n, double spacing_in_wavelengths, double s)
    {
        ComplexVector out(n);
        const double step = 2.0 * pi * spacing_in_wavelengths * s;
        for (int i = 0; i < n; ++i)
            out(i) = std::polar(1.0, step * i);
        return out;
    }

    AxisVectors axis_vectors(const UpaGeometry &g, const ReducedCoords &c)
    {
        const double dl = g.spacing_in_wavelengths();
        return {axis_vector(g.nx, dl, c.v), axis_vector(g.nz, dl, c.u)};
    }

    ComplexVector steering_vector(const UpaGeometry &g, const DoaPair &a)
    {
        const ReducedCoords c = ReducedCoords::from(a);
        const double kx = 2.0 * pi * g.spacing_in_wavelengths() * c.v;
        const double kz = 2.0 * pi * g.spacing_in_wavelengths() * c.u;
        ComplexVector out(g.size());
        for (int iz = 0; iz < g.nz; ++iz)
            for (int ix = 0; ix < g.nx; ++ix)
                out(iz * g.nx + ix) = std::polar(1.0, kx * ix + kz * iz);
        return out;
    }

    ComplexMatrix manifold(const UpaGeometry &g, std::span<const DoaPair> doas)
    {
        if (doas.empty())
            throw DimensionError("manifold: at least one DOA is required");
        ComplexMatrix A(g.size(), static_cast<Eigen::Index>(doas.size()));
        for (std::size_t l = 0; l < doas.size(); ++l)
            A.col(static_cast<Eigen::Index>(l)) = steering_vector(g, doas[l]);
        return A;
    }

    RealVector horizontal_offsets(const UpaGeometry &g)
    {
        RealVector d(g.size());
        for (int iz = 0; iz < g.nz; ++iz)
            for (int ix = 0; ix < g.nx; ++ix)
                d(iz * g.nx + ix) = ix * g.spacing;
        return d;
    }

    RealVector elevation_offsets(const UpaGeometry &g, const DoaPair &a)
    {
        const double th = a.theta * deg2rad;
        const double ph = a.phi * deg2rad;
        RealVector d(g.size());
        for (int iz = 0; iz < g.nz; ++iz)
            for (int ix = 0; ix < g.nx; ++ix)
                d(iz * g.nx + ix) = iz * g.spacing * std::cos(ph) -
                                    ix * g.spacing * std::sin(th) * std::sin(ph);
        return d;
    }

    SteeringDerivatives steering_derivatives(const UpaGeometry &g, const DoaPair &a)
    {
        const double th = a.theta * deg2rad;
        const double ph = a.phi * deg2rad;
        const double k = 2.0 * pi / g.wavelength;
        const ComplexVector s = steering_vector(g, a);
        const RealVector d1 = horizontal_offsets(g);
        const RealVector d2 = elevation_offsets(g, a);
        const cd jk(0.0, k);
        SteeringDerivatives out;
        out.d_theta = (jk * std::cos(th) * std::cos(ph)) * (d1.cast<cd>().cwiseProduct(s));
        out.d_phi = jk * (d2.cast<cd>().cwiseProduct(s));
        return out;
    }
}
