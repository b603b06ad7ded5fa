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

#include "trihybrid/geometry.hpp"

#include <cmath>

namespace trihybrid
{
    Vec3 unit_vector(const Direction &dir)
    {
        const double ce = std::cos(dir.elevation);
        return {std::sin(dir.azimuth) * ce, std::cos(dir.azimuth) * ce, std::sin(dir.elevation)};
    }

    ArrayGeometry::ArrayGeometry(std::vector<Vec3> positions, double spacing, Topology topology)
        : positions_(std::move(positions)), spacing_(spacing), topology_(topology)
    {
    }

    ArrayGeometry ArrayGeometry::uniform_linear(std::size_t count, double spacing)
    {
        if (count == 0)
            throw ConfigError("ArrayGeometry: element count must be >= 1");
        if (!(spacing > 0.0) || !std::isfinite(spacing))
            throw ConfigError("ArrayGeometry: spacing must be > 0");

        std::vector<Vec3> pos(count);
        for (std::size_t n = 0; n < count; ++n)
            pos[n] = {static_cast<double>(n) * spacing, 0.0, 0.0};
        return ArrayGeometry(std::move(pos), spacing, Topology::uniform_linear);
    }

    ArrayGeometry ArrayGeometry::uniform_planar(std::size_t rows, std::size_t cols, double spacing)
    {
        if (rows == 0 || cols == 0)
            throw ConfigError("ArrayGeometry: planar array needs rows, cols >= 1");
        if (!(spacing > 0.0) || !std::isfinite(spacing))
            throw ConfigError("ArrayGeometry: spacing must be > 0");

        std::vector<Vec3> pos;
        pos.reserve(rows * cols);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c)
                pos.push_back({static_cast<double>(c) * spacing, 0.0, static_cast<double>(r) * spacing});
        return ArrayGeometry(std::move(pos), spacing, Topology::uniform_planar);
    }

    ArrayGeometry ArrayGeometry::slice(std::size_t first, std::size_t count) const
    {
        if (count == 0 || first + count > positions_.size())
            throw ConfigError("ArrayGeometry::slice: range out of bounds");
        std::vector<Vec3> pos(positions_.begin() + static_cast<std::ptrdiff_t>(first),
                              positions_.begin() + static_cast<std::ptrdiff_t>(first + count));
        return ArrayGeometry(std::move(pos), spacing_, topology_);
    }

    cplx spatial_phase(const Vec3 &position, const Direction &dir)
    {
        const Vec3 u = unit_vector(dir);
        const double proj = position[0] * u[0] + position[1] * u[1] + position[2] * u[2];
        return std::polar(1.0, two_pi * proj);
    }

    CVector steering_vector(const ArrayGeometry &geometry, const Direction &dir)
    {
        CVector a(static_cast<Eigen::Index>(geometry.size()));
        for (std::size_t n = 0; n < geometry.size(); ++n)
            a(static_cast<Eigen::Index>(n)) = spatial_phase(geometry.position(n), dir);
        return a;
    }
}
