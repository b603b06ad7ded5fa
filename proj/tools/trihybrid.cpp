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

// trihybrid: runs one experiment from a scenario file and writes
// <out>/<experiment>_<hash>.csv plus a JSON metadata sidecar.

#include "trihybrid/experiments.hpp"
#include "trihybrid/hash.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace trihybrid;

namespace
{
    enum ExitCode
    {
        exit_ok = 0,
        exit_config = 2,
        exit_model = 3,
    };

    int report(int code, const std::string &kind, const std::string &message,
               const std::vector<std::string> &details = {})
    {
        nlohmann::json err = {{"error", kind}, {"exit_code", code}, {"message", message}};
        if (!details.empty())
            err["details"] = details;
        std::cerr << err.dump() << '\n';
        return code;
    }

    void write_file(const fs::path &path, const std::string &content)
    {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw ModelError("cannot write '" + path.string() + "'");
        out << content;
        if (!out)
            throw ModelError("write failed for '" + path.string() + "'");
    }

    std::string csv_text(const Table &table)
    {
        std::ostringstream s;
        write_csv(s, table);
        return s.str();
    }

    struct Options
    {
        std::string scenario;
        std::string out;
        std::optional<std::uint64_t> seed;
        unsigned jobs = 1;
    };

    int run(const std::string &experiment, const Options &opt)
    {
        const auto start = std::chrono::steady_clock::now();
        Scenario s = parse_scenario(opt.scenario);
        s.experiment = experiment;
        if (opt.seed)
            s.seed = *opt.seed;
        if (!opt.out.empty())
            s.output_directory = opt.out;

        const std::uint64_t hash = config_hash(s);
        const std::string stem = experiment + "_" + to_hex(hash);
        const fs::path dir(s.output_directory);
        fs::create_directories(dir);

        nlohmann::json extra = nlohmann::json::object();
        std::vector<std::pair<fs::path, std::string>> files;
        std::uint64_t evaluations = 0;
        if (experiment == "link")
        {
            const auto reports = link_experiment(s, opt.jobs);
            nlohmann::json terms = nlohmann::json::object();
            for (const auto &r : reports)
            {
                evaluations += r.evaluations;
                for (const auto &[name, w] : r.power.terms)
                    terms[r.architecture][name] = w;
            }
            extra["power_terms_W"] = terms;
            files.emplace_back(dir / (stem + ".csv"), csv_text(to_table(reports)));
        }
        else if (experiment == "aperture-sweep")
        {
            const auto pts = sweep_aperture(s, opt.jobs);
            for (const auto &p : pts)
                evaluations += p.evaluations;
            nlohmann::json crossing = nlohmann::json::object();
            for (const auto &a : s.architectures)
            {
                const auto n = threshold_crossing(pts, a.name, 10.0);
                crossing[a.name] = n ? nlohmann::json(*n) : nlohmann::json(nullptr);
            }
            extra["first_N_above_10W"] = crossing;
            files.emplace_back(dir / (stem + ".csv"), csv_text(to_table(pts)));
        }
        else if (experiment == "frontier")
        {
            const auto pts = ee_se_frontier(s, opt.jobs);
            for (const auto &p : pts)
                evaluations += p.evaluations;
            files.emplace_back(dir / (stem + ".csv"), csv_text(to_table(pts)));
        }
        else if (experiment == "dma-map")
        {
            files.emplace_back(dir / (stem + ".csv"), csv_text(to_table(dma_coefficient_map(s.dma_map, opt.jobs))));
            nlohmann::json sens = nlohmann::json::object();
            for (double a : s.dma_map.leakages)
                sens[format_fixed(a)] = phase_sensitivity(a, s.dma_map);
            extra["max_phase_sensitivity"] = sens;
        }
        else if (experiment == "optimize")
        {
            const auto runs = optimizer_comparison(s, opt.jobs);
            files.emplace_back(dir / (stem + ".csv"), csv_text(to_table(runs)));
            for (const auto &r : runs)
            {
                evaluations += r.result.evaluations;
                std::ostringstream trace;
                write_trace_csv(trace, r.result);
                files.emplace_back(dir / (stem + "_trace_" + r.method + "_" + std::to_string(r.seed) + ".csv"),
                                   trace.str());
            }
        }
        else
            throw ConfigError("unknown experiment '" + experiment + "'");

        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        nlohmann::json meta = {{"config_hash", to_hex(hash)},
                               {"seed", s.seed},
                               {"version", TRIHYBRID_VERSION},
                               {"experiment", experiment},
                               {"elapsed_s", elapsed},
                               {"search",
                                {{"method", s.search.method},
                                 {"budget", s.search.budget},
                                 {"rounds", s.search.rounds},
                                 {"beams", s.search.beams},
                                 {"evaluations", evaluations}}},
                               {"files", nlohmann::json::array()}};
        for (auto &[k, v] : extra.items())
            meta[k] = v;
        for (const auto &[path, content] : files)
        {
            write_file(path, content);
            meta["files"].push_back(path.filename().string());
        }
        write_file(dir / (stem + ".json"), meta.dump(2) + "\n");
        std::cout << (dir / (stem + ".csv")).string() << '\n';
        return exit_ok;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"trihybrid: link-level simulator for digital, hybrid and tri-hybrid MIMO transmitters"};
    app.require_subcommand(1);
    Options opt;
    std::uint64_t seed = 0;
    std::vector<std::pair<CLI::App *, std::string>> subs;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"link", "evaluate every architecture on one link"},
        {"aperture-sweep", "consumed power (and optionally SE) against aperture size"},
        {"frontier", "energy efficiency against spectral efficiency"},
        {"dma-map", "two-slot DMA transmission coefficient maps"},
        {"optimize", "compare configuration search methods"}};
    for (const auto &[name, help] : commands)
    {
        CLI::App *sub = app.add_subcommand(name, help);
        sub->add_option("--scenario", opt.scenario, "scenario JSON file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "output directory (overrides output.directory)");
        sub->add_option("--seed", seed, "seed (overrides the scenario seed)");
        sub->add_option("--jobs", opt.jobs, "worker threads")->check(CLI::Range(1u, 1024u));
        subs.emplace_back(sub, name);
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        return report(exit_config, "usage", e.what());
    }

    for (const auto &[sub, name] : subs)
    {
        if (!sub->parsed())
            continue;
        if (sub->count("--seed"))
            opt.seed = seed;
        try
        {
            return run(name, opt);
        }
        catch (const ScenarioError &e)
        {
            return report(exit_config, "config", "invalid scenario", e.errors());
        }
        catch (const ConfigError &e)
        {
            return report(exit_config, "config", e.what());
        }
        catch (const ModelError &e)
        {
            return report(exit_model, "model", e.what());
        }
        catch (const std::exception &e)
        {
            return report(exit_model, "runtime", e.what());
        }
    }
    return exit_config;
}
