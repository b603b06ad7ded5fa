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

#ifndef TRIHYBRID_LINK_HPP
#define TRIHYBRID_LINK_HPP

#include "trihybrid/channel.hpp"
#include "trihybrid/em_layer.hpp"
#include "trihybrid/metrics.hpp"
#include "trihybrid/precoder.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace trihybrid
{
    enum class EmKind
    {
        none, // static isotropic element per feed
        dma,
        espar,
        switched_pattern,
    };

    std::string to_string(EmKind kind);

    struct EsparTemplate
    {
        std::size_t elements = 3;         // per feed, one active plus parasitics
        std::optional<CMatrix> impedance; // default: exponential_coupling_impedance(elements)
        std::size_t active = 0;
        std::vector<double> reactance_levels{-100.0, -50.0, -25.0, 0.0, 25.0, 50.0, 100.0, 200.0};
        double loss_resistance = 1.0;
    };

    struct SwitchedTemplate
    {
        std::vector<PatternTable> library = gaussian_beam_library(4);
        double insertion_loss_db = 1.0;
        bool interpolate = true;
    };

    // Per-feed reconfigurable antenna used by a tri-hybrid transmitter. The DMA slot count
    // is taken from the layout; dma.phase_bits sets the number of tuning states per slot.
    struct EmLayerModel
    {
        EmKind kind = EmKind::none;
        DmaConfig dma{.slots = 8, .leakage = 0.5, .electrical_spacing = 0.0, .termination = Termination::radiating, .phase_states = {}, .phase_bits = 3};
        EsparTemplate espar;
        SwitchedTemplate switched;

        unsigned control_bits() const;
    };

    // Scenario-level description of one architecture; concrete dimensions follow from the
    // aperture size.
    struct ArchitectureTemplate
    {
        std::string name = "digital";
        ArchitectureKind kind = ArchitectureKind::digital;
        std::size_t rf_chains = 4;
        std::size_t streams = 4;
        Connectivity connectivity = Connectivity::fully_connected;
        AnalogMode analog = AnalogMode::phase_shifters;
        unsigned phase_bits = 2;
        EmKind em = EmKind::none;
        std::size_t feeds = 0;             // 0: derived from the aperture and elements per feed
        std::size_t elements_per_feed = 0; // 0: DMA slots per feed / ESPAR elements from the EM model
    };

    struct TransmitterLayout
    {
        std::string name;
        ArchitectureSpec spec;
        EmLayerModel em;
        ArrayGeometry elements = ArrayGeometry::uniform_linear(1, 0.5); // radiating aperture
        std::size_t elements_per_feed = 1;
    };

    // Fixes the layer dimensions of `arch` for an aperture of `aperture` radiating elements
    // on a ULA with `spacing`:
    //  digital      one RF chain per element;
    //  hybrid       min(rf_chains, N) chains, one feed per element;
    //  tri-hybrid   N / elements_per_feed feeds; subarray chain count reduced to the largest
    //               divisor of the feed count; pass-through uses one chain per feed.
    // Streams are capped by the chain count and the receive array size.
    TransmitterLayout make_layout(const ArchitectureTemplate &arch, std::size_t aperture, double spacing,
                                  std::size_t rx_elements, const EmLayerModel &em);

    enum class Objective
    {
        spectral_efficiency,
        energy_efficiency,
    };

    struct LinkParameters
    {
        double tx_power = 1.0;    // W
        double noise_power = 0.1; // W
        double bandwidth_hz = 1e8;
        Objective objective = Objective::spectral_efficiency;
        PowerCatalog catalog;
    };

    enum class Layer
    {
        analog,
        em,
    };

    // One discrete tuning knob: an analog phase shifter (feed, chain) or an EM state
    // (feed, slot / parasitic / pattern selector).
    struct Coordinate
    {
        Layer layer = Layer::analog;
        std::size_t feed = 0;
        std::size_t index = 0;
        std::uint32_t levels = 1;
        bool cyclic = true; // phase grids wrap around, reactance ladders do not
    };

    using State = std::vector<std::uint32_t>;

    struct LinkConfiguration
    {
        State state;
        std::vector<CVector> em_weights; // per feed, over that feed's ports
        CMatrix feed_channel;            // H_eff, N_rx x N_feed
        PrecoderStack stack;
        CMatrix precoder; // F_A F_D, normalized
        std::vector<double> feed_efficiency;
        double spectral_efficiency = 0.0;
        double energy_efficiency = 0.0;
        PowerBreakdown power;
    };

    // Single-user link: fixed propagation (paths) and a transmitter whose analog and EM
    // layers are set by a discrete State; the digital layer is always set optimally.
    class LinkProblem
    {
    public:
        LinkProblem(TransmitterLayout layout, const PathSet &paths, const ArrayGeometry &rx, LinkParameters params);

        const TransmitterLayout &layout() const { return layout_; }
        const ArchitectureSpec &spec() const { return layout_.spec; }
        const LinkParameters &params() const { return params_; }
        const std::vector<Coordinate> &coordinates() const { return coords_; }
        const CMatrix &port_channel() const { return port_channel_; }
        const PowerBreakdown &power() const { return power_; }
        std::size_t rx_elements() const { return static_cast<std::size_t>(port_channel_.rows()); }

        // Number of states, saturating at ~1.8e19.
        std::uint64_t state_count() const;
        State zero_state() const { return State(coords_.size(), 0); }
        State random_state(std::mt19937_64 &rng) const;

        // Objective (SE or EE) with the optimal digital layer. Asserts feasibility.
        double evaluate(const State &state) const;
        double spectral_efficiency(const State &state) const;
        double objective_from_se(double se) const;

        // Throws std::logic_error if the state violates a layer constraint.
        void check_feasible(const State &state) const;

        CMatrix analog_matrix(const State &state) const;
        CMatrix feed_channel(const State &state) const;

        // EM weights of one feed over its ports, from that feed's EM levels (in coordinate order).
        CVector feed_weights(std::size_t feed, std::span<const std::uint32_t> em_levels) const;
        CVector feed_column(std::size_t feed, std::span<const std::uint32_t> em_levels) const;
        const std::vector<std::size_t> &em_coordinates(std::size_t feed) const { return em_coords_.at(feed); }
        // coordinate index of analog entry (feed, chain), or npos when off-support
        std::size_t analog_coordinate(std::size_t feed, std::size_t chain) const;
        static constexpr std::size_t npos = static_cast<std::size_t>(-1);

        // Far-field response of each port of `feed` towards `dir` (unit path gain).
        CVector port_response(std::size_t feed, const Direction &dir) const;

        // SE of G = H_eff F_A given K = F_A^H F_A, with water-filling over range(F_A).
        double capacity(const CMatrix &g, const CMatrix &k) const;

        LinkConfiguration realize(const State &state) const;

    private:
        std::vector<std::uint32_t> em_levels_of(std::size_t feed, const State &state) const;

        TransmitterLayout layout_;
        LinkParameters params_;
        CMatrix port_channel_;
        std::vector<std::size_t> port_begin_;
        std::vector<std::size_t> port_count_;
        std::vector<Coordinate> coords_;
        std::vector<std::vector<std::size_t>> em_coords_;
        std::vector<std::size_t> analog_index_; // feed * rf_chains + chain -> coordinate
        CVector dma_excitation_;
        std::vector<cplx> dma_level_weights_;
        CMatrix espar_impedance_;
        PowerBreakdown power_;
    };

    // SE from the eigenvalues sigma^2 of the whitened Gram matrix, top `streams` modes.
    double waterfilled_rate(std::vector<double> squared_gains, std::size_t streams, double power, double noise);
}

#endif
