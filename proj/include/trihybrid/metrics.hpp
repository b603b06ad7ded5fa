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

#ifndef TRIHYBRID_METRICS_HPP
#define TRIHYBRID_METRICS_HPP

#include "trihybrid/precoder.hpp"

#include <string>
#include <utility>
#include <vector>

namespace trihybrid
{
    // log2 det(I + eta P / (N_s N0) H F F^H H^H), N_s = F.cols().
    double spectral_efficiency(const CMatrix &channel, const CMatrix &precoder, double noise, double power,
                               double efficiency = 1.0);

    // Per-component power constants, watts.
    struct PowerCatalog
    {
        double common = 0.2;              // baseband and shared circuitry
        double local_oscillator = 0.0225;
        double rf_chain = 0.0403;         // mixer, filters and LO buffer of one chain
        double dac = 0.1;                 // per converter, two per chain (I and Q)
        double phase_shifter = 0.0216;
        double power_amplifier = 0.06;    // per feed
        double switch_element = 0.005;    // per switched-pattern element
        double em_control_per_bit = 1e-4; // control DAC, per tunable element per bit
    };

    void validate(const PowerCatalog &catalog);

    struct PowerBreakdown
    {
        std::string architecture;
        std::vector<std::pair<std::string, double>> terms;
        double total = 0.0;

        double term(const std::string &name) const;
    };

    // Additive consumed power. digital: common + LO + N_feed (chain + 2 DAC + PA);
    // hybrid / tri-hybrid: common + LO + N_rf (chain + 2 DAC) + N_feed PA + phase shifters,
    // plus tunable elements * control bits * per-bit cost and switches for tri-hybrid.
    PowerBreakdown power_total(const ArchitectureSpec &spec, const PowerCatalog &catalog);

    // bits per joule
    double energy_efficiency(double spectral_efficiency, double bandwidth_hz, const PowerBreakdown &breakdown);
}

#endif
