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

#ifndef TRIHYBRID_EM_LAYER_HPP
#define TRIHYBRID_EM_LAYER_HPP

#include "trihybrid/channel.hpp"
#include "trihybrid/geometry.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

namespace trihybrid
{
    // ---- phase grids ----------------------------------------------------------------

    // Uniform B-bit grid on [0, 2pi), anchored at 0 so that the B-bit grid is contained in
    // the (B+1)-bit grid.
    double grid_phase(std::size_t index, unsigned bits);
    std::size_t nearest_grid_index(double phase, unsigned bits);
    double quantize_phase(double phase, unsigned bits);

    // ---- dynamic metasurface antenna ------------------------------------------------

    // Lorentzian-constrained slot weight (j + e^{j phi}) / 2, on the circle |w - j/2| = 1/2.
    cplx lorentzian_weight(double phi);

    enum class Termination
    {
        radiating, // remaining guided power is radiated by the last slot
        absorbing, // remaining guided power is dissipated in a matched load
    };

    // One waveguide feed with N_s tunable slots.
    struct DmaConfig
    {
        std::size_t slots = 2;
        double leakage = 0.5;            // alpha in (0, 1]
        double electrical_spacing = 0.0; // beta * d between consecutive slots, rad
        Termination termination = Termination::radiating;
        std::vector<double> phase_states; // phi_n per slot; empty means all zero
        unsigned phase_bits = 0;          // 0: continuous phases, else snapped to the B-bit grid
    };

    void validate(const DmaConfig &cfg);

    // Fraction of the feed power radiated by each slot:
    // p_n = alpha (1 - alpha)^(n-1) for n < N_s, last slot (1 - alpha)^(N_s - 1) when the guide
    // end radiates and alpha (1 - alpha)^(N_s - 1) when it is absorbed.
    std::vector<double> dma_power_fractions(const DmaConfig &cfg);

    // e_n = sqrt(p_n) exp(-j beta d (n - 1)).
    CVector dma_slot_excitations(const DmaConfig &cfg);

    // Slot weights w_n = lorentzian_weight(phi_n), with phi_n quantized if phase_bits > 0.
    CVector dma_weights(const DmaConfig &cfg);

    // T = sum_n w_n e_n: scattered field over feed excitation at the reference direction.
    cplx dma_transmission_coefficient(const DmaConfig &cfg);

    // g(dir) = sum_n w_n e_n exp(j 2 pi <r_n, u(dir)>), slot positions from `slots`.
    cplx dma_directional_response(const DmaConfig &cfg, const ArrayGeometry &slots, const Direction &dir);

    // ---- electronically steerable parasitic array -----------------------------------

    struct EsparConfig
    {
        CMatrix impedance;              // mutual impedance Z, ohms, N_el x N_el
        std::size_t active = 0;         // driven element
        std::vector<double> reactances; // loads of the parasitic elements in index order, ohms
        cplx feed_voltage{1.0, 0.0};
        double loss_resistance = 0.0; // ohmic loss per element, ohms
    };

    void validate(const EsparConfig &cfg);

    // Z_mn = (r0 + j x0) rho^|m-n|: exponentially decaying coupling. Re(Z) is PSD for |rho| < 1.
    CMatrix exponential_coupling_impedance(std::size_t elements, double r0 = 73.0, double x0 = 42.5,
                                           double rho = 0.3);

    struct EsparSolution
    {
        CVector currents;
        double input_power = 0.0;    // Re(conj(v0) i_active) / 2
        double radiated_power = 0.0; // Re(i^H Re(Z) i) / 2
    };

    // Solves (Z + r I + j diag(x)) i = v with v zero except v0 at the active element.
    EsparSolution espar_currents(const EsparConfig &cfg);

    cplx espar_directional_response(const EsparConfig &cfg, const ArrayGeometry &elements, const Direction &dir);

    // ---- switched-pattern antenna ---------------------------------------------------

    // Complex gain tabulated on a rectilinear (elevation x azimuth) grid. Both axes sorted
    // ascending; a single-point axis means the pattern does not vary along it.
    struct PatternTable
    {
        std::vector<double> azimuths;
        std::vector<double> elevations;
        CMatrix gains; // elevations.size() x azimuths.size()

        cplx at(const Direction &dir, bool interpolate) const;
    };

    struct SwitchedPatternConfig
    {
        std::vector<PatternTable> library;
        std::vector<std::size_t> selected; // per element
        double insertion_loss_db = 0.0;
        bool interpolate = true;
    };

    void validate(const SwitchedPatternConfig &cfg);

    // Response per element: library[selected_n](dir) * sqrt(eta) * spatial phase of element n.
    CVector switched_pattern_response(const SwitchedPatternConfig &cfg, const ArrayGeometry &elements,
                                      const Direction &dir);

    // K beams with Gaussian azimuth profile, centres spread over [-spread, spread], tabulated
    // on a 1 degree azimuth grid, flat in elevation, each normalized to unit mean power.
    std::vector<PatternTable> gaussian_beam_library(std::size_t beams, double spread = pi / 3,
                                                    double beamwidth = pi / 8);

    // Tables as JSON: array of patterns, each an array of records {az, el, gain_re, gain_im}.
    std::vector<PatternTable> pattern_library_from_json(const nlohmann::json &j);
    nlohmann::json pattern_library_to_json(const std::vector<PatternTable> &library);

    // ---- common surface -------------------------------------------------------------

    struct StaticElement
    {
    };

    using EmConfig = std::variant<StaticElement, DmaConfig, EsparConfig, SwitchedPatternConfig>;

    // Fraction of the input power that is radiated, in [0, 1].
    // DMA: (1 or 1 - (1 - alpha)^N_s) * sum |w_n|^2 p_n / sum p_n; ESPAR: P_rad / P_in;
    // switched pattern: 10^(-insertion_loss / 10); static: 1.
    double radiated_power_fraction(const EmConfig &cfg);

    std::uint64_t em_config_hash(const EmConfig &cfg);

    struct EmResponse
    {
        DirectionalResponse response; // direction -> per-feed complex gain
        double efficiency = 1.0;      // radiated power fraction
    };

    // DMA and ESPAR are single-feed apertures over `geometry`; switched patterns return one
    // entry per element; a static element is isotropic at the first position.
    EmResponse make_em_response(const EmConfig &cfg, const ArrayGeometry &geometry);
}

#endif
