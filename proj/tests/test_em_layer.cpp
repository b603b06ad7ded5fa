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
#include "trihybrid/em_layer.hpp"

#include <random>

using namespace trihybrid;

namespace
{
    DmaConfig dma(std::size_t slots, double alpha, std::vector<double> phases = {},
                  Termination t = Termination::radiating, double bd = 0.0)
    {
        DmaConfig c;
        c.slots = slots;
        c.leakage = alpha;
        c.phase_states = std::move(phases);
        c.termination = t;
        c.electrical_spacing = bd;
        return c;
    }
}

TEST_CASE("lorentzian weight examples")
{
    CHECK(std::abs(lorentzian_weight(0.0) - cplx(0.5, 0.5)) < 1e-15);
    CHECK(std::abs(lorentzian_weight(pi / 2) - cplx(0.0, 1.0)) < 1e-15);
    CHECK(std::abs(lorentzian_weight(pi) - cplx(-0.5, 0.5)) < 1e-15);
}

TEST_CASE("lorentzian circle holds for random phases")
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int i = 0; i < 10000; ++i)
        CHECK(std::abs(std::abs(lorentzian_weight(u(rng)) - cplx(0.0, 0.5)) - 0.5) < 1e-15);
}

TEST_CASE("slot excitation examples")
{
    const CVector e1 = dma_slot_excitations(dma(2, 1.0));
    CHECK(std::abs(e1(0) - 1.0) < 1e-15);
    CHECK(std::abs(e1(1)) < 1e-15);

    const CVector e2 = dma_slot_excitations(dma(2, 0.5));
    CHECK(std::abs(e2(0) - std::sqrt(0.5)) < 1e-15);
    CHECK(std::abs(e2(1) - std::sqrt(0.5)) < 1e-15);

    const CVector e3 = dma_slot_excitations(dma(3, 0.5));
    CHECK(std::abs(e3(0) - 0.7071067811865476) < 1e-12);
    CHECK(std::abs(e3(1) - 0.5) < 1e-15);
    CHECK(std::abs(e3(2) - 0.5) < 1e-15);

    // electrical spacing only rotates the phase
    const CVector e4 = dma_slot_excitations(dma(3, 0.5, {}, Termination::radiating, 0.7));
    CHECK(std::abs(e4(2) - 0.5 * std::polar(1.0, -1.4)) < 1e-15);

    CHECK_THROWS_AS(dma_slot_excitations(dma(2, 1.5)), ConfigError);
    CHECK_THROWS_AS(dma_slot_excitations(dma(2, 0.0)), ConfigError);
}

TEST_CASE("waveguide conservation and monotone imbalance")
{
    for (std::size_t n = 1; n <= 64; ++n)
        for (int k = 1; k <= 10; ++k)
        {
            const auto p = dma_power_fractions(dma(n, 0.1 * k));
            double s = 0.0;
            for (double x : p)
                s += x;
            CHECK(std::abs(s - 1.0) < 1e-12);
        }
    double last = -1.0;
    for (int k = 0; k <= 50; ++k)
    {
        const double alpha = 0.5 + 0.01 * k;
        const auto p = dma_power_fractions(dma(2, alpha));
        CHECK(p[0] - p[1] >= last);
        last = p[0] - p[1];
    }
    const auto absorbed = dma_power_fractions(dma(2, 0.5, {}, Termination::absorbing));
    CHECK(std::abs(absorbed[1] - 0.25) < 1e-15);
}

TEST_CASE("transmission coefficient examples")
{
    // alpha = 1: T = w1 regardless of phi2
    for (double phi2 : {0.0, 1.0, 2.5, 5.0})
        CHECK(std::abs(dma_transmission_coefficient(dma(2, 1.0, {0.3, phi2})) - lorentzian_weight(0.3)) < 1e-15);

    const cplx t = dma_transmission_coefficient(dma(2, 0.5, {pi / 2, pi / 2}));
    CHECK(std::abs(t - cplx(0.0, std::sqrt(2.0))) < 1e-12);

    // swap symmetry of |T| at alpha = 0.5, beta d = 0 (and beta d = 2 pi)
    for (double bd : {0.0, two_pi})
        for (int i = 0; i < 16; ++i)
            for (int k = 0; k < 16; ++k)
            {
                const double a = two_pi * i / 16.0, b = two_pi * k / 16.0;
                const double t12 = std::abs(dma_transmission_coefficient(dma(2, 0.5, {a, b}, Termination::radiating, bd)));
                const double t21 = std::abs(dma_transmission_coefficient(dma(2, 0.5, {b, a}, Termination::radiating, bd)));
                CHECK(std::abs(t12 - t21) < 1e-12);
            }
}

TEST_CASE("alpha = 1 makes T independent of phi2 (finite differences)")
{
    const double h = 1e-6;
    for (int i = 0; i < 32; ++i)
    {
        const double phi1 = two_pi * i / 32.0, phi2 = 0.37 * i;
        const cplx d = (dma_transmission_coefficient(dma(2, 1.0, {phi1, phi2 + h})) -
                        dma_transmission_coefficient(dma(2, 1.0, {phi1, phi2 - h}))) /
                       (2 * h);
        CHECK(std::abs(d) < 1e-12);
    }
}

TEST_CASE("triangle bound on T")
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, two_pi), a(0.05, 1.0);
    for (int trial = 0; trial < 500; ++trial)
    {
        const std::size_t n = 1 + trial % 8;
        std::vector<double> ph(n);
        for (auto &x : ph)
            x = u(rng);
        const DmaConfig c = dma(n, a(rng), ph, trial % 3 ? Termination::radiating : Termination::absorbing, u(rng));
        CHECK(std::abs(dma_transmission_coefficient(c)) <= dma_slot_excitations(c).cwiseAbs().sum() + 1e-12);
    }
}

TEST_CASE("DMA directional response")
{
    // single slot, alpha = 1, phi = pi/2: g = j everywhere
    const auto one = ArrayGeometry::uniform_linear(1, 0.2);
    for (double az : {-1.0, 0.0, 0.4, 1.5})
        CHECK(std::abs(dma_directional_response(dma(1, 1.0, {pi / 2}), one, {az, 0.2}) - cplx(0.0, 1.0)) < 1e-15);

    // broadside of a collinear guide: equals T
    const auto four = ArrayGeometry::uniform_linear(4, 0.2);
    const DmaConfig c = dma(4, 0.6, {0.1, 2.0, 4.0, 5.5});
    CHECK(std::abs(dma_directional_response(c, four, {0.0, 0.0}) - dma_transmission_coefficient(c)) < 1e-14);

    // term-by-term oracle
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, two_pi);
    for (int trial = 0; trial < 50; ++trial)
    {
        std::vector<double> ph(4);
        for (auto &x : ph)
            x = u(rng);
        const DmaConfig r = dma(4, 0.3 + 0.01 * trial, ph, Termination::radiating, 0.5);
        const Direction d{u(rng) / 2 - pi / 2, 0.1};
        const auto p = dma_power_fractions(r);
        oracle::cx sum = 0.0;
        for (int n = 0; n < 4; ++n)
        {
            const oracle::cx w = (oracle::cx(0, 1) + std::exp(oracle::cx(0, ph[n]))) / 2.0;
            const oracle::cx e = std::sqrt(p[n]) * std::exp(oracle::cx(0, -0.5 * n));
            const double proj = 0.2 * n * std::sin(d.azimuth) * std::cos(d.elevation);
            sum += w * e * std::exp(oracle::cx(0, 2 * oracle::pi * proj));
        }
        const cplx g = dma_directional_response(r, four, d);
        CHECK(std::abs(g - sum) < 1e-12);
        CHECK(std::abs(g) <= dma_slot_excitations(r).cwiseAbs().sum() + 1e-12);
    }
    CHECK_THROWS_AS(dma_directional_response(c, one, {0.0, 0.0}), ConfigError);
}

TEST_CASE("DMA weights are quantized on the grid")
{
    DmaConfig c = dma(3, 0.5, {0.1, 1.7, 3.3});
    c.phase_bits = 2;
    const CVector w = dma_weights(c);
    CHECK(std::abs(w(0) - lorentzian_weight(0.0)) < 1e-15);
    CHECK(std::abs(w(1) - lorentzian_weight(pi / 2)) < 1e-15);
    CHECK(std::abs(w(2) - lorentzian_weight(pi)) < 1e-15);
    CHECK(quantize_phase(7.0, 3) == doctest::Approx(pi / 4 * std::round(7.0 / (pi / 4)) - two_pi).epsilon(1e-12));
}

TEST_CASE("ESPAR Ohm's law and open-circuit limit")
{
    EsparConfig single{CMatrix::Constant(1, 1, cplx(50.0, 0.0)), 0, {}, cplx(1.0, 0.0), 0.0};
    const EsparSolution s = espar_currents(single);
    CHECK(std::abs(s.currents(0) - cplx(1.0 / 50.0, 0.0)) < 1e-15);

    const CMatrix z = exponential_coupling_impedance(3);
    EsparConfig open{z, 0, {1e6, 1e6}, cplx(1.0, 0.0), 0.0};
    const EsparSolution so = espar_currents(open);
    const cplx isolated = 1.0 / z(0, 0);
    CHECK(std::abs(so.currents(0) - isolated) < 1e-3 * std::abs(isolated));
    CHECK(std::abs(so.currents(1)) < 1e-3 * std::abs(isolated));
    CHECK(std::abs(so.currents(2)) < 1e-3 * std::abs(isolated));
    const auto geo = ArrayGeometry::uniform_linear(3, 0.25);
    for (double az : {-1.0, 0.2, 1.3})
        CHECK(std::abs(espar_directional_response(open, geo, {az, 0.0}) - isolated) < 1e-3 * std::abs(isolated));
}

TEST_CASE("ESPAR currents match a dense solve oracle")
{
    CMatrix z(3, 3);
    z << cplx(73, 42.5), cplx(20, -10), cplx(-5, 8), cplx(20, -10), cplx(73, 42.5), cplx(20, -10), cplx(-5, 8),
        cplx(20, -10), cplx(73, 42.5);
    EsparConfig c{z, 1, {-30.0, 55.0}, cplx(1.0, 0.2), 2.0};
    const EsparSolution s = espar_currents(c);
    oracle::Mat a = oracle::zeros(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            a[i][j] = z(i, j);
    a[0][0] += oracle::cx(2.0, -30.0);
    a[1][1] += 2.0;
    a[2][2] += oracle::cx(2.0, 55.0);
    const auto x = oracle::solve(a, {0.0, oracle::cx(1.0, 0.2), 0.0});
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(s.currents(i) - x[i]) < 1e-13);
}

TEST_CASE("ESPAR passivity over random reactance states")
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> x(-300.0, 300.0), loss(0.0, 5.0);
    const CMatrix z = exponential_coupling_impedance(5, 73.0, 42.5, 0.4);
    for (int trial = 0; trial < 1000; ++trial)
    {
        EsparConfig c{z, 2, {x(rng), x(rng), x(rng), x(rng)}, cplx(1.0, 0.0), trial % 2 ? loss(rng) : 0.0};
        const EsparSolution s = espar_currents(c);
        CHECK(s.radiated_power <= s.input_power * (1 + 1e-12));
        const double eta = radiated_power_fraction(c);
        CHECK(eta >= 0.0);
        CHECK(eta <= 1.0 + 1e-12);
    }
}

TEST_CASE("ESPAR validation and singular states")
{
    const CMatrix z = exponential_coupling_impedance(3);
    CMatrix asym = z;
    asym(0, 1) += cplx(1.0, 0.0);
    CHECK_THROWS_AS(validate(EsparConfig{asym, 0, {0.0, 0.0}}), ConfigError);
    CMatrix active_gain = z;
    active_gain(1, 1) = cplx(-100.0, 0.0);
    CHECK_THROWS_AS(validate(EsparConfig{active_gain, 0, {0.0, 0.0}}), ConfigError);
    CHECK_THROWS_AS(validate(EsparConfig{z, 3, {0.0, 0.0}}), ConfigError);
    CHECK_THROWS_AS(validate(EsparConfig{z, 0, {0.0}}), ConfigError);

    // purely reactive 1x1 impedance cancelled by the load
    CMatrix zr(2, 2);
    zr << cplx(0.0, 10.0), cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 25.0);
    try
    {
        espar_currents(EsparConfig{zr, 0, {-25.0}, cplx(1.0, 0.0), 0.0});
        FAIL("expected a singular-matrix error");
    }
    catch (const ModelError &e)
    {
        CHECK(std::string(e.what()).find("-25") != std::string::npos);
    }
}

TEST_CASE("radiated power fraction examples")
{
    SwitchedPatternConfig sw{gaussian_beam_library(2), {0}, 3.0, true};
    CHECK(radiated_power_fraction(sw) == doctest::Approx(0.501187).epsilon(1e-5));

    // absorbing guide, unit-magnitude weights (phi = pi/2 gives w = j)
    CHECK(radiated_power_fraction(dma(2, 0.5, {pi / 2, pi / 2}, Termination::absorbing)) ==
          doctest::Approx(0.75).epsilon(1e-14));
    CHECK(radiated_power_fraction(dma(2, 0.5, {pi / 2, pi / 2})) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(radiated_power_fraction(StaticElement{}) == 1.0);

    // ESPAR open circuit: efficiency of the isolated element R / (R + r_loss)
    const CMatrix z = exponential_coupling_impedance(3);
    EsparConfig open{z, 0, {1e7, 1e7}, cplx(1.0, 0.0), 2.0};
    CHECK(radiated_power_fraction(open) == doctest::Approx(73.0 / 75.0).epsilon(1e-6));
}

TEST_CASE("switched pattern responses")
{
    const auto geo = ArrayGeometry::uniform_linear(2, 0.5);
    // K = 1: nothing to control
    const auto lib1 = gaussian_beam_library(1);
    SwitchedPatternConfig one{lib1, {0, 0}, 0.0, true};
    const CVector r1 = switched_pattern_response(one, geo, {0.3, 0.0});
    CHECK(std::abs(r1(0) - lib1[0].at({0.3, 0.0}, true)) < 1e-15);

    // two-pattern table, index flip switches exactly between the table values
    PatternTable a{{-1.0, 0.0, 1.0}, {0.0}, CMatrix(1, 3)}, b = a;
    a.gains << cplx(1, 0), cplx(0, 0), cplx(0, 1);
    b.gains << cplx(0, 0), cplx(2, 0), cplx(0, 0);
    SwitchedPatternConfig cfg{{a, b}, {0, 1}, 0.0, false};
    const CVector r = switched_pattern_response(cfg, geo, {1.0, 0.0});
    CHECK(std::abs(r(0) - cplx(0, 1)) < 1e-15);
    CHECK(std::abs(r(1)) < 1e-15);
    cfg.selected = {1, 0};
    const CVector flipped = switched_pattern_response(cfg, geo, {0.0, 0.0});
    CHECK(std::abs(flipped(0) - cplx(2, 0)) < 1e-15);
    CHECK(std::abs(flipped(1)) < 1e-15);

    // interpolation midpoint is the arithmetic mean
    CHECK(std::abs(a.at({-0.5, 0.0}, true) - cplx(0.5, 0.0)) < 1e-15);
    CHECK(std::abs(a.at({0.5, 0.0}, true) - cplx(0.0, 0.5)) < 1e-15);
    CHECK_THROWS_AS(a.at({0.5, 0.0}, false), ModelError);
    CHECK_THROWS_AS(a.at({1.5, 0.0}, true), ModelError);

    // insertion loss scales by sqrt(eta)
    SwitchedPatternConfig lossy = cfg;
    lossy.insertion_loss_db = 3.0;
    const CVector rl = switched_pattern_response(lossy, geo, {0.0, 0.0});
    CHECK(std::abs(rl(0) - std::sqrt(std::pow(10.0, -0.3)) * flipped(0)) < 1e-15);

    CHECK_THROWS_AS(validate(SwitchedPatternConfig{{a}, {1}, 0.0, true}), ConfigError);
    CHECK_THROWS_AS(validate(SwitchedPatternConfig{{a}, {0}, -1.0, true}), ConfigError);
}

TEST_CASE("pattern library JSON round trip")
{
    const auto lib = gaussian_beam_library(3);
    const auto back = pattern_library_from_json(pattern_library_to_json(lib));
    REQUIRE(back.size() == 3);
    for (std::size_t k = 0; k < 3; ++k)
        CHECK((back[k].gains - lib[k].gains).norm() < 1e-15);
    CHECK_THROWS_AS(pattern_library_from_json(nlohmann::json::object()), ConfigError);
}

TEST_CASE("EM responses and config hashes")
{
    const auto geo = ArrayGeometry::uniform_linear(4, 0.2);
    const DmaConfig c = dma(4, 0.5, {0.0, 1.0, 2.0, 3.0});
    const EmResponse r = make_em_response(c, geo);
    CHECK(std::abs(r.response({0.3, 0.0})(0) - dma_directional_response(c, geo, {0.3, 0.0})) < 1e-15);
    CHECK(r.efficiency == doctest::Approx(radiated_power_fraction(c)));
    DmaConfig c2 = c;
    c2.phase_states[1] = 1.5;
    CHECK(em_config_hash(c) != em_config_hash(c2));
    CHECK(em_config_hash(c) == em_config_hash(dma(4, 0.5, {0.0, 1.0, 2.0, 3.0})));
}
