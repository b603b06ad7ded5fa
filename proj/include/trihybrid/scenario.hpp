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

#ifndef TRIHYBRID_SCENARIO_HPP
#define TRIHYBRID_SCENARIO_HPP

#include "trihybrid/link.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace trihybrid
{
    inline constexpr int schema_version = 1;

    struct ArraySpec
    {
        std::size_t elements = 1;
        double spacing = 0.5; // wavelengths
    };

    struct ChannelSpec
    {
        std::size_t paths = 4;
        GainProfile profile;
        std::optional<PathSet> explicit_paths; // loaded from path_file
        std::string path_file;                 // as written in the config, "" if none
    };

    // Configuration search used wherever an experiment needs a good analog / EM state.
    struct SearchSpec
    {
        std::string method = "alternating"; // alternating | annealing | genetic | random | two-stage | exhaustive
        std::uint64_t budget = 20000;       // evaluations for stochastic methods
        std::size_t rounds = 20;            // alternating rounds
        std::size_t beams = 16;             // steering codebook size
        double initial_temperature = 0.05;
        double cooling = 0.999;
        std::uint64_t iterations_per_temperature = 10;
        std::size_t population = 40;
        std::uint64_t cap = std::uint64_t{1} << 30;
    };

    struct ApertureSweepSpec
    {
        std::vector<std::size_t> apertures{1, 2, 4, 8, 16, 24, 32, 48, 64, 96, 128, 192, 256, 384, 512, 768, 1024,
                                           1536, 2048};
        bool with_se = false;
    };

    struct FrontierSpec
    {
        std::vector<double> tx_power_w{1.0};
        bool include_dma_only = true;
    };

    struct DmaMapSpec
    {
        std::vector<double> leakages{0.5, 0.75, 1.0};
        std::size_t resolution = 64;
        double electrical_spacing = 0.0;
        Termination termination = Termination::radiating;
    };

    struct OptimizeSpec
    {
        std::string architecture = "tri-hybrid"; // name in the architecture list
        std::vector<std::string> methods{"two-stage", "alternating", "annealing", "genetic", "random"};
        std::size_t restarts = 1; // seeds per stochastic method
    };

    struct Scenario
    {
        int schema_version = trihybrid::schema_version;
        std::uint64_t seed = 0;
        std::string experiment = "link";
        double carrier_ghz = 15.0;
        double bandwidth_hz = 1e8;
        double tx_power_w = 1.0;
        double noise_power_w = 0.1;
        Objective objective = Objective::spectral_efficiency;
        ArraySpec tx{64, 0.5};
        ArraySpec rx{4, 0.5};
        ChannelSpec channel;
        std::vector<ArchitectureTemplate> architectures;
        EmLayerModel em;
        std::string pattern_file; // switched-pattern library, "" for the built-in beams
        std::size_t pattern_beams = 4;
        PowerCatalog catalog;
        SearchSpec search;
        ApertureSweepSpec aperture_sweep;
        FrontierSpec frontier;
        DmaMapSpec dma_map;
        OptimizeSpec optimize;
        std::string output_directory = "out";
    };

    // All validation failures of one config, each prefixed with its field path.
    class ScenarioError : public ConfigError
    {
    public:
        explicit ScenarioError(std::vector<std::string> errors);
        const std::vector<std::string> &errors() const { return errors_; }

    private:
        std::vector<std::string> errors_;
    };

    // Digital, hybrid and DMA tri-hybrid templates used when a config lists none.
    std::vector<ArchitectureTemplate> default_architectures();

    // Relative path_file / pattern_file entries resolve against `base_dir`.
    Scenario scenario_from_json(const nlohmann::json &j, const std::filesystem::path &base_dir = {});
    nlohmann::json scenario_to_json(const Scenario &scenario);
    Scenario parse_scenario(const std::filesystem::path &path);

    // FNV-1a over the canonical JSON form.
    std::uint64_t config_hash(const Scenario &scenario);

    const std::vector<std::string> &experiment_names();
}

#endif
