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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "trihybrid/channel.hpp"

#include <random>
#include <set>

using namespace trihybrid;

TEST_CASE("steering vector examples")
{
    const auto one = ArrayGeometry::uniform_linear(1, 0.5);
    const CVector a1 = steering_vector(one, {0.7, 0.2});
    REQUIRE(a1.size() == 1);
    CHECK(std::abs(a1(0) - cplx(1.0, 0.0)) < 1e-15);

    const auto two = ArrayGeometry::uniform_linear(2, 0.5);
    const CVector broadside = steering_vector(two, {0.0, 0.0});
    CHECK(std::abs(broadside(0) - 1.0) < 1e-15);
    CHECK(std::abs(broadside(1) - 1.0) < 1e-15);

    const CVector endfire = steering_vector(two, {pi / 2, 0.0});
    CHECK(std::abs(endfire(0) - 1.0) < 1e-15);
    CHECK(std::abs(endfire(1) - cplx(-1.0, 0.0)) < 1e-12);
}

TEST_CASE("steering vectors have unit modulus entries")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> az(-pi, pi), el(-pi / 2, pi / 2), sp(0.05, 2.0);
    for (int trial = 0; trial < 200; ++trial)
    {
        const auto g = trial % 2 ? ArrayGeometry::uniform_linear(7, sp(rng))
                                 : ArrayGeometry::uniform_planar(3, 4, sp(rng));
        const CVector a = steering_vector(g, {az(rng), el(rng)});
        for (Eigen::Index n = 0; n < a.size(); ++n)
            CHECK(std::abs(std::abs(a(n)) - 1.0) < 1e-12);
    }
}

TEST_CASE("uniform linear geometry")
{
    const auto g = ArrayGeometry::uniform_linear(16, 0.2);
    CHECK(g.size() == 16);
    CHECK(g.topology() == Topology::uniform_linear);
    std::set<std::tuple<double, double, double>> seen;
    for (std::size_t n = 0; n < g.size(); ++n)
    {
        CHECK(g.position(n)[0] == static_cast<double>(n) * 0.2);
        CHECK(g.position(n)[1] == 0.0);
        CHECK(g.position(n)[2] == 0.0);
        seen.insert({g.position(n)[0], g.position(n)[1], g.position(n)[2]});
    }
    CHECK(seen.size() == g.size());
    CHECK_THROWS_AS(ArrayGeometry::uniform_linear(4, 0.0), ConfigError);
    CHECK_THROWS_AS(ArrayGeometry::uniform_linear(0, 0.5), ConfigError);
    CHECK_THROWS_AS(ArrayGeometry::uniform_planar(2, 2, -1.0), ConfigError);
}

TEST_CASE("draw_paths is deterministic and seed sensitive")
{
    const PathSet a = draw_paths(11, 1);
    const PathSet b = draw_paths(11, 1);
    REQUIRE(a.size() == 1);
    CHECK(a.paths[0].gain == b.paths[0].gain);
    CHECK(a.paths[0].departure.azimuth == b.paths[0].departure.azimuth);
    CHECK(a.id() == b.id());

    const PathSet c = draw_paths(1, 4), d = draw_paths(2, 4);
    bool differ = false;
    for (std::size_t l = 0; l < 4; ++l)
        differ = differ || c.paths[l].gain != d.paths[l].gain;
    CHECK(differ);
    CHECK_THROWS_AS(draw_paths(1, 0), ConfigError);
}

TEST_CASE("draw_paths normalization and angle ranges")
{
    const PathSet p = draw_paths(5, 1000);
    CHECK(std::abs(p.total_power() - 1.0) < 0.1);

    GainProfile prof;
    prof.decay_db_per_path = 3.0;
    prof.departure_elevation = {-0.3, 0.3};
    // E[sum |a|^2] = 1 also with a decaying profile: average over seeds
    double mean = 0.0;
    for (std::uint64_t s = 0; s < 2000; ++s)
    {
        const PathSet q = draw_paths(s, 6, prof);
        mean += q.total_power();
        for (const auto &path : q.paths)
        {
            CHECK(path.departure.azimuth >= -pi / 2);
            CHECK(path.departure.azimuth <= pi / 2);
            CHECK(std::abs(path.departure.elevation) <= 0.3);
        }
    }
    CHECK(std::abs(mean / 2000.0 - 1.0) < 0.05);
}

TEST_CASE("effective channel with an isotropic single feed is the receive steering vector")
{
    PathSet p;
    p.paths.push_back({cplx(1.0, 0.0), {0.4, 0.0}, {-0.3, 0.1}});
    const auto rx = ArrayGeometry::uniform_linear(4, 0.5);
    const EffectiveChannel h = assemble_effective_channel(p, rx, [](const Direction &) { return CVector::Ones(1); });
    const CVector a = steering_vector(rx, {-0.3, 0.1});
    REQUIRE(h.matrix.rows() == 4);
    REQUIRE(h.matrix.cols() == 1);
    CHECK((h.matrix.col(0) - a).norm() < 1e-15);
    CHECK(h.path_set_id == p.id());
}

TEST_CASE("zero path gains give a zero channel")
{
    PathSet p = draw_paths(3, 5);
    for (auto &path : p.paths)
        path.gain = 0.0;
    const auto rx = ArrayGeometry::uniform_linear(3, 0.5), tx = ArrayGeometry::uniform_linear(4, 0.5);
    CHECK(element_channel(p, rx, tx).norm() == 0.0);
}

TEST_CASE("two paths, two static feeds: straight-line oracle")
{
    const PathSet p = draw_paths(9, 2);
    const auto rx = ArrayGeometry::uniform_linear(3, 0.5), tx = ArrayGeometry::uniform_linear(2, 0.3);
    const CMatrix h = element_channel(p, rx, tx);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 2; ++j)
        {
            oracle::cx sum = 0.0;
            for (const auto &path : p.paths)
            {
                const double ua = std::sin(path.arrival.azimuth) * std::cos(path.arrival.elevation);
                const double ud = std::sin(path.departure.azimuth) * std::cos(path.departure.elevation);
                const double phase = 2 * oracle::pi * (0.5 * static_cast<double>(i) * ua + 0.3 * static_cast<double>(j) * ud);
                sum += path.gain * std::exp(oracle::cx(0.0, phase));
            }
            CHECK(std::abs(h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - sum) < 1e-12);
        }
}

TEST_CASE("linearity and separation of the effective channel")
{
    const PathSet p = draw_paths(21, 6);
    const auto rx = ArrayGeometry::uniform_linear(4, 0.5), tx = ArrayGeometry::uniform_linear(8, 0.2);
    const CMatrix h = element_channel(p, rx, tx);
    const cplx c(0.5, -2.0);
    const CMatrix hc = element_channel(scaled(p, c), rx, tx);
    CHECK((hc - c * h).norm() <= 1e-14 * h.norm());
    // regeneration with unchanged inputs is bit-identical
    const CMatrix again = element_channel(p, rx, tx);
    CHECK(again == h);
}

TEST_CASE("mismatched response lengths are rejected")
{
    const PathSet p = draw_paths(1, 2);
    const auto rx = ArrayGeometry::uniform_linear(2, 0.5);
    int calls = 0;
    auto bad = [&calls](const Direction &) { return CVector::Ones(++calls); };
    CHECK_THROWS_AS(assemble_effective_channel(p, rx, bad), ModelError);
}

TEST_CASE("path set JSON round trip and validation")
{
    const PathSet p = draw_paths(4, 3);
    const PathSet q = path_set_from_json(path_set_to_json(p));
    REQUIRE(q.size() == 3);
    CHECK(q.id() == p.id());

    nlohmann::json bad = path_set_to_json(p);
    bad[0]["extra"] = 1.0;
    CHECK_THROWS_AS(path_set_from_json(bad), ConfigError);
    nlohmann::json out_of_range = path_set_to_json(p);
    out_of_range[1]["aoa_el"] = 2.0;
    CHECK_THROWS_AS(path_set_from_json(out_of_range), ConfigError);
    CHECK_THROWS_AS(path_set_from_json(nlohmann::json::array()), ConfigError);
}
