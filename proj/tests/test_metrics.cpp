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
#include "trihybrid/experiments.hpp"

#include <random>

using namespace trihybrid;

namespace
{
    PowerCatalog zero_catalog()
    {
        return {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    }

    Scenario sweep_scenario()
    {
        Scenario s;
        s.architectures = default_architectures();
        s.em.kind = EmKind::dma;
        return s;
    }

    double power_of(const std::vector<AperturePoint> &pts, std::size_t n, const std::string &arch)
    {
        for (const auto &p : pts)
            if (p.aperture == n && p.architecture == arch)
                return p.power_w;
        FAIL("missing sweep point");
        return 0.0;
    }
}

TEST_CASE("spectral efficiency examples")
{
    CHECK(spectral_efficiency(CMatrix::Ones(1, 1), CMatrix::Ones(1, 1), 1.0, 1.0) == doctest::Approx(1.0));
    CHECK(spectral_efficiency(CMatrix::Zero(2, 3), CMatrix::Ones(3, 1) / std::sqrt(3.0), 1.0, 5.0) == 0.0);
    CHECK(spectral_efficiency(CMatrix::Identity(2, 2), CMatrix::Identity(2, 2), 1.0, 2.0) == doctest::Approx(2.0));
    // efficiency scales the SNR
    CHECK(spectral_efficiency(CMatrix::Ones(1, 1), CMatrix::Ones(1, 1), 1.0, 2.0, 0.5) == doctest::Approx(1.0));
    CMatrix bad = CMatrix::Ones(1, 1);
    bad(0, 0) = cplx(std::nan(""), 0.0);
    CHECK_THROWS_AS(spectral_efficiency(bad, CMatrix::Ones(1, 1), 1.0, 1.0), ModelError);
    CHECK_THROWS(spectral_efficiency(CMatrix::Ones(1, 1), CMatrix::Ones(1, 1), 0.0, 1.0));
}

TEST_CASE("spectral efficiency is monotone in transmit power")
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial)
    {
        CMatrix h(3, 4), f(4, 2);
        for (Eigen::Index i = 0; i < h.size(); ++i)
            h(i) = cplx(n(rng), n(rng));
        for (Eigen::Index i = 0; i < f.size(); ++i)
            f(i) = cplx(n(rng), n(rng));
        double last = 0.0;
        for (int k = 0; k <= 40; ++k)
        {
            const double se = spectral_efficiency(h, f, 0.3, 0.1 * k);
            CHECK(se >= last - 1e-12);
            last = se;
        }
    }
}

TEST_CASE("power examples")
{
    ArchitectureSpec dig;
    dig.streams = 1;
    dig.rf_chains = dig.feeds = 4;
    CHECK(power_total(dig, zero_catalog()).total == 0.0);
    PowerCatalog c = zero_catalog();
    c.rf_chain = 1.0;
    CHECK(power_total(dig, c).total == 4.0);

    PowerCatalog neg;
    neg.dac = -1.0;
    CHECK_THROWS_AS(validate(neg), ConfigError);
}

TEST_CASE("power breakdown is additive and linear in the catalog")
{
    const PowerCatalog base;
    const EmLayerModel em{.kind = EmKind::dma};
    for (const auto &arch : default_architectures())
        for (std::size_t n : {8u, 64u, 256u})
        {
            const ArchitectureSpec spec = make_layout(arch, n, 0.5, 4, em).spec;
            const PowerBreakdown b = power_total(spec, base);
            double sum = 0.0;
            for (const auto &[_, v] : b.terms)
            {
                CHECK(v >= 0.0);
                sum += v;
            }
            CHECK(sum == b.total);

            // total(c1 + c2) = total(c1) + total(c2), total(2 c) = 2 total(c)
            PowerCatalog twice = base;
            twice.common *= 2;
            twice.local_oscillator *= 2;
            twice.rf_chain *= 2;
            twice.dac *= 2;
            twice.phase_shifter *= 2;
            twice.power_amplifier *= 2;
            twice.switch_element *= 2;
            twice.em_control_per_bit *= 2;
            CHECK(power_total(spec, twice).total == doctest::Approx(2 * b.total).epsilon(1e-14));
            PowerCatalog only_ps = zero_catalog(), rest = base;
            only_ps.phase_shifter = base.phase_shifter;
            rest.phase_shifter = 0.0;
            CHECK(power_total(spec, only_ps).total + power_total(spec, rest).total ==
                  doctest::Approx(b.total).epsilon(1e-14));
        }
}

TEST_CASE("power ordering at a large aperture")
{
    const EmLayerModel em{.kind = EmKind::dma};
    const PowerCatalog cat;
    double p[3];
    int i = 0;
    for (const auto &arch : default_architectures())
        p[i++] = power_total(make_layout(arch, 256, 0.5, 4, em).spec, cat).total;
    CHECK(p[2] < p[1]);
    CHECK(p[1] < p[0]);
}

TEST_CASE("power term formulas by hand")
{
    const PowerCatalog c;
    ArchitectureSpec h;
    h.kind = ArchitectureKind::hybrid;
    h.streams = 2;
    h.rf_chains = 4;
    h.feeds = 16;
    h.phase_bits = 2;
    const double chains = c.common + c.local_oscillator + 4 * (c.rf_chain + 2 * c.dac);
    CHECK(power_total(h, c).total == doctest::Approx(chains + 16 * c.power_amplifier + 64 * c.phase_shifter));
    h.connectivity = Connectivity::subarray;
    CHECK(power_total(h, c).total == doctest::Approx(chains + 16 * c.power_amplifier + 16 * c.phase_shifter));
    h.kind = ArchitectureKind::tri_hybrid;
    h.em = {.tunable_elements = 128, .control_bits = 3, .switched_elements = 0};
    CHECK(power_total(h, c).total ==
          doctest::Approx(chains + 16 * c.power_amplifier + 16 * c.phase_shifter + 128 * 3 * c.em_control_per_bit));
}

TEST_CASE("energy efficiency examples")
{
    PowerBreakdown one{"x", {{"a", 1.0}}, 1.0};
    CHECK(energy_efficiency(1.0, 1.0, one) == 1.0);
    PowerBreakdown two{"x", {{"a", 2.0}}, 2.0};
    CHECK(energy_efficiency(3.0, 10.0, two) == doctest::Approx(0.5 * energy_efficiency(3.0, 10.0, one)));
    PowerBreakdown none{"x", {}, 0.0};
    CHECK_THROWS_AS(energy_efficiency(1.0, 1.0, none), ConfigError);
}

TEST_CASE("aperture sweep")
{
    Scenario s = sweep_scenario();
    s.aperture_sweep.apertures = {1};
    s.architectures = {s.architectures[0]};
    const auto single = sweep_aperture(s);
    REQUIRE(single.size() == 1);
    const PowerCatalog c;
    CHECK(single[0].power_w ==
          doctest::Approx(c.common + c.local_oscillator + c.rf_chain + 2 * c.dac + c.power_amplifier));
    CHECK(to_table(single).rows.size() == 1);
    CHECK(to_table(single).columns == std::vector<std::string>{"N", "arch", "power_W", "se_bps_hz"});

    s = sweep_scenario();
    const auto pts = sweep_aperture(s);
    double gap = -1.0;
    for (std::size_t n : s.aperture_sweep.apertures)
    {
        if (n < 8)
            continue; // tri-hybrid needs at least one full waveguide
        const double g = power_of(pts, n, "digital") - power_of(pts, n, "tri-hybrid");
        CHECK(g > gap);
        gap = g;
        if (n >= 64)
        {
            CHECK(power_of(pts, n, "tri-hybrid") < power_of(pts, n, "hybrid"));
            CHECK(power_of(pts, n, "hybrid") < power_of(pts, n, "digital"));
        }
    }
    const auto d = threshold_crossing(pts, "digital", 10.0);
    const auto h = threshold_crossing(pts, "hybrid", 10.0);
    const auto t = threshold_crossing(pts, "tri-hybrid", 10.0);
    REQUIRE(d);
    REQUIRE(h);
    REQUIRE(t);
    CHECK(*d < *h);
    CHECK(*h < *t);
    CHECK_FALSE(threshold_crossing(pts, "digital", 1e9));

    s.aperture_sweep.apertures = {16, 8};
    CHECK_THROWS_AS(sweep_aperture(s), ConfigError);
}

TEST_CASE("EE-SE frontier on a small aperture")
{
    Scenario s = sweep_scenario();
    s.tx.elements = 16;
    s.rx.elements = 2;
    s.architectures[1].rf_chains = s.architectures[1].streams = 2;
    s.architectures[2].rf_chains = s.architectures[2].streams = 2;
    s.architectures[2].connectivity = Connectivity::subarray;
    s.search.rounds = 5;
    const auto pts = ee_se_frontier(s);
    REQUIRE(pts.size() == 4);
    CHECK(pts[3].architecture == "dma-only");
    for (const auto &p : pts)
    {
        // independent scalar oracle for EE
        CHECK(p.energy_efficiency == doctest::Approx(p.spectral_efficiency * s.bandwidth_hz / p.power_w).epsilon(1e-14));
        CHECK(p.energy_efficiency * p.power_w == doctest::Approx(p.spectral_efficiency * s.bandwidth_hz));
    }
    CHECK(pts[2].energy_efficiency > pts[0].energy_efficiency);
    CHECK(pts[0].spectral_efficiency >= pts[2].spectral_efficiency);
    for (std::size_t k = 0; k < 3; ++k)
        CHECK(pts[3].spectral_efficiency < pts[k].spectral_efficiency);
    CHECK(pts[3].energy_efficiency > pts[0].energy_efficiency);
    // deterministic under the seed
    const auto again = ee_se_frontier(s, 2);
    for (std::size_t k = 0; k < pts.size(); ++k)
        CHECK(again[k].spectral_efficiency == pts[k].spectral_efficiency);

    // two power levels: SE grows with P
    s.frontier.tx_power_w = {0.5, 2.0};
    s.frontier.include_dma_only = false;
    const auto two = ee_se_frontier(s);
    REQUIRE(two.size() == 6);
    CHECK(to_table(two).rows[0][0] == "digital@0.5W");
    for (std::size_t k = 0; k < 3; ++k)
        CHECK(two[k + 3].spectral_efficiency >= two[k].spectral_efficiency);

    s.architectures.resize(1);
    CHECK_THROWS_AS(ee_se_frontier(s), ConfigError);
}

TEST_CASE("DMA coefficient map")
{
    DmaMapSpec spec;
    spec.resolution = 16;
    const auto pts = dma_coefficient_map(spec);
    REQUIRE(pts.size() == 3 * 16 * 16);
    CHECK(to_table(pts).columns == std::vector<std::string>{"alpha", "phi1", "phi2", "t_abs", "t_arg"});
    CHECK(pts[0].phi1 == doctest::Approx(two_pi * 0.5 / 16));

    auto at = [&](std::size_t a, std::size_t i, std::size_t j) { return pts[a * 256 + i * 16 + j]; };
    double var = 0.0, asym = 0.0;
    for (std::size_t i = 0; i < 16; ++i)
        for (std::size_t j = 0; j < 16; ++j)
        {
            var = std::max(var, std::abs(at(2, i, j).t_abs - at(2, i, 0).t_abs));
            asym = std::max(asym, std::abs(at(0, i, j).t_abs - at(0, j, i).t_abs));
            const MapPoint p = at(1, i, j);
            DmaConfig c;
            c.slots = 2;
            c.leakage = 0.75;
            c.phase_states = {p.phi1, p.phi2};
            CHECK(std::abs(std::polar(p.t_abs, p.t_arg) - dma_transmission_coefficient(c)) < 1e-14);
        }
    CHECK(var < 1e-12);
    CHECK(asym < 1e-12);

    spec.resolution = 64;
    CHECK(phase_sensitivity(0.5, spec) < phase_sensitivity(0.75, spec));
    CHECK(phase_sensitivity(0.75, spec) < phase_sensitivity(1.0, spec));

    spec.resolution = 4;
    CHECK_THROWS_AS(dma_coefficient_map(spec), ConfigError);
    spec.resolution = 16;
    spec.leakages = {1.2};
    CHECK_THROWS_AS(dma_coefficient_map(spec), ConfigError);
}

TEST_CASE("fixed-point formatting")
{
    CHECK(format_fixed(1.0) == "1.00000000");
    CHECK(format_fixed(0.000123456789) == "0.000123456789");
    CHECK(format_fixed(123456789.4) == "123456789");
    CHECK(format_fixed(-2.5) == "-2.50000000");
    CHECK(format_fixed(0.0) == "0");
}
