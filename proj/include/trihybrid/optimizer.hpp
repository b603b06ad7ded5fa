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

#ifndef TRIHYBRID_OPTIMIZER_HPP
#define TRIHYBRID_OPTIMIZER_HPP

#include "trihybrid/link.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace trihybrid
{
    // Ordered list of configurations of one LinkProblem.
    struct Codebook
    {
        std::vector<State> entries;
        unsigned bits = 0;     // analog phase resolution the entries were built for
        std::size_t beams = 0; // number of steering directions, 0 if not a beam codebook
    };

    // Nonempty, no duplicates, every entry feasible. Throws ConfigError.
    void validate(const Codebook &codebook, const LinkProblem &problem);

    // Every state of the problem, in mixed-radix order (first coordinate fastest).
    Codebook full_codebook(const LinkProblem &problem, std::uint64_t cap = 1u << 20);

    // One entry per azimuth: every chain steered towards that azimuth (quantized phases), and
    // each reconfigurable antenna set to the state that best matches the direction.
    Codebook steering_codebook(const LinkProblem &problem, const std::vector<double> &azimuths);

    struct TracePoint
    {
        std::uint64_t step = 0;
        double stage = 0.0; // temperature for annealing, generation for genetic search
        double objective = 0.0;
        bool accepted = true;
    };

    struct OptResult
    {
        std::string method;
        State state;
        double objective = 0.0;
        double spectral_efficiency = 0.0;
        std::uint64_t evaluations = 0;
        std::vector<TracePoint> trace;
    };

    void write_trace_csv(std::ostream &out, const OptResult &result);

    inline constexpr std::uint64_t default_evaluation_cap = std::uint64_t{1} << 30;

    // Exact argmax over the codebook, lowest index on ties (within 1e-12 relative). Refuses codebooks larger than cap.
    OptResult exhaustive_search(const LinkProblem &problem, const Codebook &codebook,
                                std::uint64_t cap = default_evaluation_cap);

    // Exact argmax over the whole discrete space. Channels whose columns factor per RF chain
    // (no EM layer, subarray or pass-through analog) are enumerated column by column with each
    // chain's common phase fixed; other layouts fall back to plain enumeration. The cap bounds
    // the number of column tuples (or states) examined; exceeding it throws ModelError.
    OptResult exhaustive_search(const LinkProblem &problem, std::uint64_t cap = default_evaluation_cap);

    // Stage 1 scores entries with an identity digital layer; stage 2 sets the digital layer
    // optimally for the winner.
    struct TwoStageResult
    {
        OptResult result;
        std::size_t stage1_index = 0;
        double stage1_objective = 0.0;
    };

    TwoStageResult two_stage_search(const LinkProblem &problem, const Codebook &coarse);

    struct AnnealSchedule
    {
        double initial_temperature = 0.05; // relative to the start objective
        double cooling = 0.999;
        std::uint64_t iterations_per_temperature = 10;
        std::uint64_t budget = 20000; // objective evaluations, including the start state
        std::uint64_t seed = 0;
        std::optional<State> start; // default: uniform random state
    };

    void validate(const AnnealSchedule &schedule);

    OptResult simulated_annealing(const LinkProblem &problem, const AnnealSchedule &schedule);

    struct GeneticConfig
    {
        std::size_t population = 40;
        std::uint64_t budget = 20000;
        std::size_t tournament = 3;
        double crossover_rate = 0.9;
        double mutation_rate = -1.0; // per gene; negative means 1 / coordinate count
        std::size_t elites = 2;
        std::uint64_t seed = 0;
        std::vector<State> initial; // optional initial population, filled up at random
    };

    void validate(const GeneticConfig &config);

    OptResult genetic_search(const LinkProblem &problem, const GeneticConfig &config);

    // Rounds of EM coordinate descent followed by analog per-entry best response; the digital
    // layer is optimal for every evaluated state. Stops early when a round changes nothing.
    OptResult alternating_optimization(const LinkProblem &problem, std::size_t rounds,
                                       std::optional<State> start = std::nullopt);

    // Deterministic starting point for local searches: the best of a steering codebook over
    // `beams` azimuths and, with phase shifters, the phase projection of the optimal
    // unconstrained precoder (EM states taken from the best steering entry).
    State heuristic_start(const LinkProblem &problem, std::size_t beams = 16);

    OptResult random_search(const LinkProblem &problem, std::uint64_t budget, std::uint64_t seed);
}

#endif
