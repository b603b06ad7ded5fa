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

#ifndef TRIHYBRID_EXPERIMENTS_HPP
#define TRIHYBRID_EXPERIMENTS_HPP

#include "trihybrid/optimizer.hpp"
#include "trihybrid/scenario.hpp"

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace trihybrid
{
    // Plot-ready long-format table; cells are already formatted.
    struct Table
    {
        std::vector<std::string> columns;
        std::vector<std::vector<std::string>> rows;
    };

    // Fixed-point decimal with 9 significant digits, no exponent.
    std::string format_fixed(double value);

    // Comma separated, LF line ends, header row first.
    void write_csv(std::ostream &out, const Table &table);

    // Runs fn(0..count-1) on up to `jobs` threads; results keep index order.
    void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)> &fn);

    // Propagation paths of a scenario: the explicit path file, else drawn from the seed.
    PathSet scenario_paths(const Scenario &scenario);

    LinkParameters link_parameters(const Scenario &scenario, double tx_power_w);

    LinkProblem make_problem(const Scenario &scenario, const ArchitectureTemplate &arch, std::size_t aperture,
                             double tx_power_w);

    // Best-found configuration with the scenario's search settings; `seed` feeds the
    // stochastic methods.
    OptResult run_search(const LinkProblem &problem, const SearchSpec &search, const std::string &method,
                         std::uint64_t seed);

    // One-waveguide DMA transmitter: a single chain and feed, no digital multiplexing.
    ArchitectureTemplate dma_only_architecture();

    // ---- aperture sweep -----------------------------------------------------------------

    struct AperturePoint
    {
        std::size_t aperture = 0;
        std::string architecture;
        double power_w = 0.0;
        std::optional<double> spectral_efficiency;
        std::uint64_t evaluations = 0;
    };

    // Rows ordered by aperture, then architecture list order.
    std::vector<AperturePoint> sweep_aperture(const Scenario &scenario, unsigned jobs = 1);
    Table to_table(const std::vector<AperturePoint> &points);

    // First aperture whose power exceeds `threshold_w`, per architecture (nullopt if none).
    std::optional<std::size_t> threshold_crossing(const std::vector<AperturePoint> &points,
                                                  const std::string &architecture, double threshold_w);

    // ---- EE-SE frontier -----------------------------------------------------------------

    struct FrontierPoint
    {
        std::string architecture;
        double tx_power_w = 0.0;
        double spectral_efficiency = 0.0;
        double energy_efficiency = 0.0;
        double power_w = 0.0;
        std::uint64_t evaluations = 0;
    };

    // Every architecture (plus DMA-only when enabled) at every transmit power, on the
    // scenario's aperture. Ordered by transmit power, then architecture.
    std::vector<FrontierPoint> ee_se_frontier(const Scenario &scenario, unsigned jobs = 1);
    Table to_table(const std::vector<FrontierPoint> &points);

    // ---- DMA coefficient map ------------------------------------------------------------

    struct MapPoint
    {
        double alpha = 0.0;
        double phi1 = 0.0;
        double phi2 = 0.0;
        double t_abs = 0.0;
        double t_arg = 0.0;
    };

    // Two-slot transmission coefficient over a cell-centred grid phi_k = 2 pi (k + 1/2) / R,
    // ordered by alpha, phi1, phi2.
    std::vector<MapPoint> dma_coefficient_map(const DmaMapSpec &spec, unsigned jobs = 1);
    Table to_table(const std::vector<MapPoint> &points);

    // max over the grid of |wrapped finite difference of arg T| / grid step, along both axes.
    double phase_sensitivity(double alpha, const DmaMapSpec &spec);

    // ---- single link and optimizer comparison -------------------------------------------

    struct LinkReport
    {
        std::string architecture;
        std::size_t aperture = 0;
        std::size_t feeds = 0;
        std::size_t rf_chains = 0;
        std::size_t streams = 0;
        double spectral_efficiency = 0.0;
        double energy_efficiency = 0.0;
        PowerBreakdown power;
        std::uint64_t evaluations = 0;
    };

    std::vector<LinkReport> link_experiment(const Scenario &scenario, unsigned jobs = 1);
    Table to_table(const std::vector<LinkReport> &reports);

    struct OptimizerRun
    {
        std::string method;
        std::uint64_t seed = 0;
        OptResult result;
    };

    std::vector<OptimizerRun> optimizer_comparison(const Scenario &scenario, unsigned jobs = 1);
    Table to_table(const std::vector<OptimizerRun> &runs);
}

#endif
