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

#include <span>
#include <vector>

#include "hdsdoa/numerics.hpp"

namespace hdsdoa
{
    /// Uniform planar array with nx elements along the horizontal axis and nz
    /// along the vertical axis. Elements are indexed x-fastest:
    /// n = iz * nx + ix, which makes a(theta, phi) = a_z(u) (x) a_x(v).
    struct UpaGeometry
    {
        int nx = 1;
        int nz = 1;
        double spacing = 0.5;    // meters
        double wavelength = 1.0; // meters

        /// Half-wavelength spaced array at carrier `frequency_hz`.
        static UpaGeometry half_wavelength(int nx, int nz, double frequency_hz = 1.0e12);

        int size() const { return nx * nz; }
        double spacing_in_wavelengths() const { return spacing / wavelength; }
        void validate() const;
    };

    /// Azimuth / elevation pair in degrees.
    struct DoaPair
    {
        double theta = 0.0; // azimuth
        double phi = 0.0;   // elevation
    };

    /// u = sin(phi), v = sin(theta) cos(phi).
    struct ReducedCoords
    {
        double u = 0.0;
        double v = 0.0;

        static ReducedCoords from(const DoaPair &a);
    };

    /// Maps an azimuth in [-180, 180] onto [-90, 90] keeping sin(theta).
    double fold_azimuth(double theta_deg);

    /// Geometric sequence [1, e^{j 2 pi d s / lambda}, ..., ] of length n.
    ComplexVector axis_vector(int n, double spacing_in_wavelengths, double s);

    struct AxisVectors
    {
        ComplexVector ax; // length nx, phase slope in v
        ComplexVector az; // length nz, phase slope in u
    };

    AxisVectors axis_vectors(const UpaGeometry &g, const ReducedCoords &c);

    ComplexVector steering_vector(const UpaGeometry &g, const DoaPair &a);

    /// Columns are steering vectors of `doas`. Throws on an empty list.
    ComplexMatrix manifold(const UpaGeometry &g, std::span<const DoaPair> doas);

    struct SteeringDerivatives
    {
        ComplexVector d_theta; // da/dtheta, per radian
        ComplexVector d_phi;   // da/dphi, per radian
    };

    SteeringDerivatives steering_derivatives(const UpaGeometry &g, const DoaPair &a);

    /// Diagonal of D_1: horizontal element offsets (ix * d), x-fastest.
    RealVector horizontal_offsets(const UpaGeometry &g);

    /// Diagonal of D_2 at `a`: iz*d*cos(phi) - ix*d*sin(theta)*sin(phi).
    RealVector elevation_offsets(const UpaGeometry &g, const DoaPair &a);
}
