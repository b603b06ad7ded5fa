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

#include "trihybrid/channel.hpp"
#include "trihybrid/hash.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <iomanip>

namespace trihybrid
{
    std::string to_hex(std::uint64_t v)
    {
        std::ostringstream os;
        os << std::hex << std::setw(16) << std::setfill('0') << v;
        return os.str();
    }

    double PathSet::total_power() const
    {
        double p = 0.0;
        for (const auto &path : paths)
            p += std::norm(path.gain);
        return p;
    }

    std::uint64_t PathSet::id() const
    {
        Fnv1a h;
        for (const auto &p : paths)
            h.real(p.gain.real()).real(p.gain.imag())
                .real(p.departure.azimuth).real(p.departure.elevation)
                .real(p.arrival.azimuth).real(p.arrival.elevation);
        return h.value();
    }

    static void check_range(const AngleRange &r, double lo, double hi, const char *name)
    {
        if (!(r.min <= r.max) || r.min < lo || r.max > hi)
            throw ConfigError(std::string("GainProfile: ") + name + " must satisfy " + std::to_string(lo) +
                              " <= min <= max <= " + std::to_string(hi));
    }

    void validate(const GainProfile &profile)
    {
        if (!std::isfinite(profile.decay_db_per_path) || profile.decay_db_per_path < 0.0)
            throw ConfigError("GainProfile: decay_db_per_path must be >= 0");
        check_range(profile.departure_azimuth, -pi, pi, "departure_azimuth");
        check_range(profile.arrival_azimuth, -pi, pi, "arrival_azimuth");
        check_range(profile.departure_elevation, -pi / 2, pi / 2, "departure_elevation");
        check_range(profile.arrival_elevation, -pi / 2, pi / 2, "arrival_elevation");
    }

    PathSet draw_paths(std::uint64_t seed, std::size_t count, const GainProfile &profile)
    {
        if (count == 0)
            throw ConfigError("draw_paths: path count L must be >= 1");
        validate(profile);

        std::vector<double> q(count);
        double qsum = 0.0;
        for (std::size_t l = 0; l < count; ++l)
        {
            q[l] = std::pow(10.0, -profile.decay_db_per_path * static_cast<double>(l) / 10.0);
            qsum += q[l];
        }

        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        auto uniform = [&rng](const AngleRange &r)
        {
            if (r.min == r.max)
                return r.min;
            return std::uniform_real_distribution<double>(r.min, r.max)(rng);
        };

        PathSet out;
        out.paths.reserve(count);
        for (std::size_t l = 0; l < count; ++l)
        {
            const double sigma = std::sqrt(q[l] / qsum / 2.0);
            Path p;
            const double re = normal(rng);
            const double im = normal(rng);
            p.gain = cplx(sigma * re, sigma * im);
            p.departure.azimuth = uniform(profile.departure_azimuth);
            p.departure.elevation = uniform(profile.departure_elevation);
            p.arrival.azimuth = uniform(profile.arrival_azimuth);
            p.arrival.elevation = uniform(profile.arrival_elevation);
            out.paths.push_back(p);
        }
        return out;
    }

    PathSet scaled(const PathSet &paths, cplx c)
    {
        PathSet out = paths;
        for (auto &p : out.paths)
            p.gain *= c;
        return out;
    }

    EffectiveChannel assemble_effective_channel(const PathSet &paths, const ArrayGeometry &rx,
                                                const DirectionalResponse &tx_response,
                                                std::uint64_t em_config_hash)
    {
        if (paths.size() == 0)
            throw ConfigError("assemble_effective_channel: empty path set");

        EffectiveChannel out;
        out.path_set_id = paths.id();
        out.em_config_hash = em_config_hash;

        Eigen::Index n_feed = -1;
        for (const auto &p : paths.paths)
        {
            const CVector g = tx_response(p.departure);
            if (n_feed < 0)
            {
                n_feed = g.size();
                out.matrix = CMatrix::Zero(static_cast<Eigen::Index>(rx.size()), n_feed);
            }
            else if (g.size() != n_feed)
                throw ModelError("assemble_effective_channel: response length " + std::to_string(g.size()) +
                                 " differs from " + std::to_string(n_feed) + " seen for an earlier direction");
            out.matrix.noalias() += p.gain * steering_vector(rx, p.arrival) * g.transpose();
        }
        if (!out.matrix.allFinite())
            throw ModelError("assemble_effective_channel: non-finite channel entries");
        return out;
    }

    CMatrix element_channel(const PathSet &paths, const ArrayGeometry &rx, const ArrayGeometry &tx)
    {
        return assemble_effective_channel(paths, rx, [&tx](const Direction &d) { return steering_vector(tx, d); })
            .matrix;
    }

    nlohmann::json path_set_to_json(const PathSet &paths)
    {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto &p : paths.paths)
            arr.push_back({{"gain_re", p.gain.real()},
                           {"gain_im", p.gain.imag()},
                           {"aod_az", p.departure.azimuth},
                           {"aod_el", p.departure.elevation},
                           {"aoa_az", p.arrival.azimuth},
                           {"aoa_el", p.arrival.elevation}});
        return arr;
    }

    PathSet path_set_from_json(const nlohmann::json &records)
    {
        if (!records.is_array() || records.empty())
            throw ConfigError("path set: expected a non-empty array of path records");
        PathSet out;
        for (std::size_t i = 0; i < records.size(); ++i)
        {
            const auto &r = records[i];
            auto field = [&](const char *key)
            {
                if (!r.contains(key) || !r[key].is_number())
                    throw ConfigError("path set: record " + std::to_string(i) + " missing numeric field '" + key + "'");
                return r[key].get<double>();
            };
            for (const auto &[key, _] : r.items())
                if (key != "gain_re" && key != "gain_im" && key != "aod_az" && key != "aod_el" && key != "aoa_az" &&
                    key != "aoa_el")
                    throw ConfigError("path set: record " + std::to_string(i) + " has unknown key '" + key + "'");
            Path p;
            p.gain = cplx(field("gain_re"), field("gain_im"));
            p.departure = {field("aod_az"), field("aod_el")};
            p.arrival = {field("aoa_az"), field("aoa_el")};
            const bool ok = std::abs(p.departure.azimuth) <= pi && std::abs(p.arrival.azimuth) <= pi &&
                            std::abs(p.departure.elevation) <= pi / 2 && std::abs(p.arrival.elevation) <= pi / 2;
            if (!ok)
                throw ConfigError("path set: record " + std::to_string(i) + " has angles outside [-pi,pi]x[-pi/2,pi/2]");
            out.paths.push_back(p);
        }
        return out;
    }
}
