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

#ifndef TRIHYBRID_PRECODER_HPP
#define TRIHYBRID_PRECODER_HPP

#include "trihybrid/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace trihybrid
{
    enum class ArchitectureKind
    {
        digital,
        hybrid,
        tri_hybrid,
    };

    enum class Connectivity
    {
        fully_connected,
        subarray, // feeds split into equal consecutive blocks, block r driven by chain r
    };

    enum class AnalogMode
    {
        phase_shifters,
        pass_through, // F_A = I, requires rf_chains == feeds
    };

    std::string to_string(ArchitectureKind kind);
    std::string to_string(Connectivity c);
    std::string to_string(AnalogMode m);

    // Control hardware of the reconfigurable-antenna layer, used for power accounting.
    struct EmHardware
    {
        std::size_t tunable_elements = 0;  // elements with a control DAC
        unsigned control_bits = 0;         // DAC resolution per tunable element
        std::size_t switched_elements = 0; // elements with an RF switch network
    };

    // Layer dimensions of one transmitter. Feeds are the physical antenna ports; for a
    // tri-hybrid transmitter each feed drives one reconfigurable antenna.
    struct ArchitectureSpec
    {
        ArchitectureKind kind = ArchitectureKind::digital;
        std::size_t streams = 1;
        std::size_t rf_chains = 1;
        std::size_t feeds = 1;
        Connectivity connectivity = Connectivity::fully_connected;
        AnalogMode analog = AnalogMode::phase_shifters;
        unsigned phase_bits = 0; // analog phase resolution, 0 = unquantized
        EmHardware em;           // empty unless tri-hybrid

        bool has_phase_shifters() const { return kind != ArchitectureKind::digital && analog == AnalogMode::phase_shifters; }
        std::size_t phase_shifter_count() const;
        bool on_support(std::size_t feed, std::size_t chain) const;
    };

    void validate(const ArchitectureSpec &spec);

    struct PrecoderStack
    {
        CMatrix digital; // F_D, rf_chains x streams
        CMatrix analog;  // F_A, feeds x rf_chains
    };

    // Snaps every nonzero entry to the nearest point of the 2^bits-point unit-circle grid
    // anchored at phase 0; zeros stay zero.
    CMatrix quantize_phases(const CMatrix &analog, unsigned bits);

    struct PowerAllocation
    {
        std::vector<double> powers; // in input order
        double water_level = 0.0;
    };

    // p_k = max(0, mu - N0 / sigma_k^2) with sum p_k = P.
    PowerAllocation waterfilling(std::span<const double> gains, double total_power, double noise);

    // Largest violation of the KKT conditions of the water-filling problem.
    double waterfilling_kkt_residual(std::span<const double> gains, double total_power, double noise,
                                     const PowerAllocation &alloc);

    // F_A F_D scaled to ||F||_F^2 = streams. Rejects off-support entries, non-unit-modulus
    // analog weights and off-grid phases (when phase_bits > 0).
    CMatrix compose_stack(const ArchitectureSpec &spec, const PrecoderStack &stack);

    // Throws ConfigError naming the first offending analog entry.
    void check_analog_constraints(const ArchitectureSpec &spec, const CMatrix &analog);

    // Right singular vectors of H weighted by water-filling powers; F_A = I.
    PrecoderStack svd_digital_precoder(const CMatrix &channel, std::size_t streams, double power, double noise);

    struct DigitalSolution
    {
        CMatrix digital;
        double spectral_efficiency = 0.0;
        std::vector<double> mode_gains;  // sigma_k of the whitened channel, descending
        std::vector<double> mode_powers; // water-filling powers for the first `streams` modes
    };

    // Optimal F_D for a fixed F_A: water-filling over the channel restricted to range(F_A),
    // subject to ||F_A F_D||_F^2 = streams. An empty `analog` stands for the identity.
    DigitalSolution optimal_digital_precoder(const CMatrix &channel, const CMatrix &analog, std::size_t streams,
                                             double power, double noise);
}

#endif
