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

#ifndef TRIHYBRID_CHANNEL_HPP
#define TRIHYBRID_CHANNEL_HPP

#include "trihybrid/geometry.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <vector>

namespace trihybrid
{
    struct Path
    {
        cplx gain;         // dimensionless complex amplitude
        Direction departure;
        Direction arrival;
    };

    // Discrete geometric multipath: the propagation part of the link, independent of any
    // antenna reconfiguration.
    struct PathSet
    {
        std::vector<Path> paths;

        std::size_t size() const { return paths.size(); }
        double total_power() const;
        std::uint64_t id() const; // content hash
    };

    struct AngleRange
    {
        double min = 0.0;
        double max = 0.0;
    };

    // Random path generator settings. Gains are CN(0, q_l) with q_l proportional to
    // 10^(-decay_db * l / 10) and sum_l q_l = 1, so E[sum |gain|^2] = 1.
    struct GainProfile
    {
        double decay_db_per_path = 0.0;
        AngleRange departure_azimuth{-pi / 2, pi / 2};
        AngleRange departure_elevation{0.0, 0.0};
        AngleRange arrival_azimuth{-pi / 2, pi / 2};
        AngleRange arrival_elevation{0.0, 0.0};
    };

    void validate(const GainProfile &profile);

    // Deterministic in (seed, count, profile).
    PathSet draw_paths(std::uint64_t seed, std::size_t count, const GainProfile &profile = {});

    // Multiplies every path gain by c.
    PathSet scaled(const PathSet &paths, cplx c);

    // Feed-domain response of the transmit side for one departure direction.
    using DirectionalResponse = std::function<CVector(const Direction &)>;

    struct EffectiveChannel
    {
        CMatrix matrix; // N_rx x N_feed
        std::uint64_t path_set_id = 0;
        std::uint64_t em_config_hash = 0;
    };

    // H = sum_l gain_l * a_rx(arrival_l) * g(departure_l)^T.
    EffectiveChannel assemble_effective_channel(const PathSet &paths, const ArrayGeometry &rx,
                                                const DirectionalResponse &tx_response,
                                                std::uint64_t em_config_hash = 0);

    // Channel from every transmit element (isotropic) to the receive array, N_rx x N_tx.
    CMatrix element_channel(const PathSet &paths, const ArrayGeometry &rx, const ArrayGeometry &tx);

    // JSON records {gain_re, gain_im, aod_az, aod_el, aoa_az, aoa_el}.
    nlohmann::json path_set_to_json(const PathSet &paths);
    PathSet path_set_from_json(const nlohmann::json &records);
}

#endif
