// SPDX-License-Identifier: Apache-2.0
//
// trihybrid: link-level simulator for tri-hybrid MIMO transmitters
// Copyright (C) 2026 The trihybrid authors
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

#ifndef TRIHYBRID_GEOMETRY_HPP
#define TRIHYBRID_GEOMETRY_HPP

#include "trihybrid/types.hpp"

#include <array>
#include <vector>

namespace trihybrid
{
    using Vec3 = std::array<double, 3>;

    // Azimuth is measured from the array boresight (+y) towards +x, elevation from the
    // x-y plane towards +z. az = 0 is broadside to a ULA laid along x, az = pi/2 is endfire.
    struct Direction
    {
        double azimuth = 0.0;   // rad, [-pi, pi]
        double elevation = 0.0; // rad, [-pi/2, pi/2]
    };

    Vec3 unit_vector(const Direction &dir);

    enum class Topology
    {
        uniform_linear,
        uniform_planar,
    };

    // Element positions in units of the carrier wavelength.
    class ArrayGeometry
    {
    public:
        // ULA along x: element n sits at n * spacing.
        static ArrayGeometry uniform_linear(std::size_t count, double spacing);

        // UPA in the x-z plane, columns along x; element (row, col) -> index row * cols + col.
        static ArrayGeometry uniform_planar(std::size_t rows, std::size_t cols, double spacing);

        std::size_t size() const { return positions_.size(); }
        const std::vector<Vec3> &positions() const { return positions_; }
        const Vec3 &position(std::size_t n) const { return positions_.at(n); }
        double spacing() const { return spacing_; }
        Topology topology() const { return topology_; }

        // Sub-array of consecutive elements [first, first + count).
        ArrayGeometry slice(std::size_t first, std::size_t count) const;

    private:
        ArrayGeometry(std::vector<Vec3> positions, double spacing, Topology topology);

        std::vector<Vec3> positions_;
        double spacing_ = 0.5;
        Topology topology_ = Topology::uniform_linear;
    };

    // Spatial phase exp(j 2 pi <r, u(dir)>) of a single position.
    cplx spatial_phase(const Vec3 &position, const Direction &dir);

    // Array response: entry n = exp(j 2 pi <r_n, u(dir)>).
    CVector steering_vector(const ArrayGeometry &geometry, const Direction &dir);
}

#endif
