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

#include "trihybrid/experiments.hpp"
#include "trihybrid/hash.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <sys/wait.h>

using namespace trihybrid;
using nlohmann::json;
namespace fs = std::filesystem;

namespace
{
    struct Run
    {
        int code = -1;
        std::string out;
        std::string err;
    };

    fs::path scratch(const std::string &name)
    {
        const fs::path p = fs::temp_directory_path() / ("trihybrid_test_" + name);
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }

    std::string slurp(const fs::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    void dump(const fs::path &p, const json &j)
    {
        std::ofstream(p) << j.dump(2);
    }

    Run cli(const std::string &args, const fs::path &dir)
    {
        const fs::path err = dir / "stderr.txt";
        const std::string cmd = std::string(TRIHYBRID_CLI) + " " + args + " 2>" + err.string();
        Run r;
        FILE *pipe = popen(cmd.c_str(), "r");
        REQUIRE(pipe != nullptr);
        std::array<char, 4096> buf{};
        std::size_t n;
        while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0)
            r.out.append(buf.data(), n);
        const int status = pclose(pipe);
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.err = slurp(err);
        return r;
    }

    json light_link()
    {
        return {{"schema_version", 1},
                {"seed", 3},
                {"arrays", {{"tx", {{"elements", 16}, {"spacing", 0.5}}}, {"rx", {{"elements", 2}, {"spacing", 0.5}}}}},
                {"architectures",
                 {{{"name", "digital"}, {"kind", "digital"}},
                  {{"name", "tri-hybrid"},
                   {"kind", "tri-hybrid"},
                   {"rf_chains", 2},
                   {"streams", 2},
                   {"connectivity", "subarray"},
                   {"em", "dma"}}}},
                {"em", {{"dma", {{"slots", 4}}}}},
                {"search", {{"rounds", 3}, {"beams", 4}}}};
    }

    json versioned(json j)
    {
        j["schema_version"] = 1;
        return j;
    }

    std::string first_error(const json &j)
    {
        try
        {
            scenario_from_json(versioned(j));
        }
        catch (const ScenarioError &e)
        {
            return e.errors().empty() ? "" : e.errors().front();
        }
        return "";
    }
}

TEST_CASE("defaults")
{
    const Scenario s = scenario_from_json(versioned(json::object()));
        try
    {
        scenario_from_json(json::object());
        FAIL("schema_version is required");
    }
    catch (const ScenarioError &e)
    {
        CHECK(e.errors().front().find("schema_version") != std::string::npos);
    }
    CHECK(s.seed == 0);
    CHECK(s.tx.elements == 64);
    CHECK(s.architectures.size() == 3);
    CHECK(s.dma_map.leakages == std::vector<double>{0.5, 0.75, 1.0});
    CHECK(s.search.method == "alternating");
    CHECK(experiment_names().size() == 5);
}

TEST_CASE("validation errors name the field")
{
    const std::string e = first_error({{"em", {{"dma", {{"normalized_leakage", 1.5}}}}}});
    CHECK(e.find("em.dma.normalized_leakage") != std::string::npos);

    try
    {
        scenario_from_json(versioned({{"seed", -1}, {"arrays", {{"tx", {{"elements", 0}}}}}, {"bogus", 1}}));
        FAIL("expected errors");
    }
    catch (const ScenarioError &err)
    {
        CHECK(err.errors().size() >= 3);
        std::string all;
        for (const auto &m : err.errors())
            all += m + "\n";
        CHECK(all.find("seed") != std::string::npos);
        CHECK(all.find("arrays.tx.elements") != std::string::npos);
        CHECK(all.find("bogus") != std::string::npos);
    }
    CHECK_FALSE(first_error({{"objective", "throughput"}}).empty());
    try
    {
        scenario_from_json({{"schema_version", 99}});
        FAIL("unsupported schema version");
    }
    catch (const ScenarioError &) {}
    CHECK_FALSE(first_error({{"dma_map", {{"resolution", 4}}}}).empty());
    CHECK_FALSE(first_error({{"architectures", {{{"name", "x"}, {"kind", "analog"}}}}}).empty());
}

TEST_CASE("JSON round trip and hash")
{
    const Scenario s = scenario_from_json(light_link());
    const Scenario back = scenario_from_json(scenario_to_json(s));
    CHECK(scenario_to_json(back) == scenario_to_json(s));
    CHECK(config_hash(back) == config_hash(s));

    json changed = light_link();
    changed["seed"] = 4;
    CHECK(config_hash(scenario_from_json(changed)) != config_hash(s));
    changed = light_link();
    changed["em"]["dma"]["normalized_leakage"] = 0.6;
    CHECK(config_hash(scenario_from_json(changed)) != config_hash(s));
}

TEST_CASE("scenario files")
{
    const fs::path dir = scratch("files");
    CHECK_THROWS_AS(parse_scenario(dir / "missing.json"), ConfigError);
    std::ofstream(dir / "broken.json") << "{ not json";
    CHECK_THROWS_AS(parse_scenario(dir / "broken.json"), ConfigError);

    // path files resolve relative to the scenario
    fs::create_directories(dir / "sub");
    PathSet ps;
    ps.paths.push_back({cplx(0.5, -0.5), {0.2, 0.0}, {-0.1, 0.0}});
    dump(dir / "sub" / "paths.json", path_set_to_json(ps));
    json j = light_link();
    j["channel"] = {{"path_file", "paths.json"}};
    dump(dir / "sub" / "scenario.json", j);
    const Scenario s = parse_scenario(dir / "sub" / "scenario.json");
    REQUIRE(s.channel.explicit_paths);
    CHECK(s.channel.explicit_paths->paths.size() == 1);
    CHECK(scenario_paths(s).paths[0].gain == cplx(0.5, -0.5));

    j["channel"]["path_file"] = "nowhere.json";
    dump(dir / "sub" / "scenario.json", j);
    CHECK_THROWS_AS(parse_scenario(dir / "sub" / "scenario.json"), ConfigError);

    for (const char *name : {"link", "aperture_sweep", "frontier", "dma_map", "optimize_toy"})
        CHECK_NOTHROW(parse_scenario(fs::path(TRIHYBRID_SOURCE_DIR) / "scenarios" / (std::string(name) + ".json")));
}

TEST_CASE("CLI writes deterministic artifacts")
{
    const fs::path dir = scratch("cli");
    dump(dir / "link.json", light_link());
    const std::string args = "link --scenario " + (dir / "link.json").string() + " --out " + (dir / "out").string();
    const Run a = cli(args, dir);
    REQUIRE(a.code == 0);
    const fs::path csv = fs::path(a.out.substr(0, a.out.find('\n')));
    CHECK(csv.parent_path() == dir / "out");
    CHECK(csv.filename().string().rfind("link_", 0) == 0);
    const std::string first = slurp(csv);
    CHECK(first.rfind("arch,N,feeds,rf_chains,streams,se_bps_hz,ee_bits_per_joule,power_W\n", 0) == 0);

    json meta = json::parse(slurp(fs::path(csv).replace_extension(".json")));
    for (const char *key : {"config_hash", "seed", "version", "experiment", "search", "files"})
        CHECK(meta.contains(key));
    CHECK(meta["seed"] == 3);
    CHECK(meta["search"].contains("budget"));

    const Run b = cli(args + " --jobs 2", dir);
    REQUIRE(b.code == 0);
    CHECK(b.out == a.out);
    CHECK(slurp(csv) == first);

    // the seed override changes the artifact name
    const Run c = cli(args + " --seed 4", dir);
    REQUIRE(c.code == 0);
    CHECK(c.out != a.out);

    for (const auto &entry : fs::recursive_directory_iterator(dir / "out"))
        CHECK(entry.path().parent_path() == dir / "out");
}

TEST_CASE("CLI dma-map has one group per leakage")
{
    const fs::path dir = scratch("map");
    dump(dir / "map.json", versioned({{"dma_map", {{"resolution", 8}}}}));
    const Run r = cli("dma-map --scenario " + (dir / "map.json").string() + " --out " + (dir / "out").string(), dir);
    REQUIRE(r.code == 0);
    std::istringstream lines(slurp(r.out.substr(0, r.out.find('\n'))));
    std::string line;
    std::getline(lines, line);
    CHECK(line == "alpha,phi1,phi2,t_abs,t_arg");
    std::set<std::string> alphas;
    std::size_t rows = 0;
    while (std::getline(lines, line))
    {
        alphas.insert(line.substr(0, line.find(',')));
        ++rows;
    }
    CHECK(alphas.size() == 3);
    CHECK(rows == 3 * 64);
}

TEST_CASE("CLI error reporting")
{
    const fs::path dir = scratch("errors");
    const Run usage = cli("frobnicate", dir);
    CHECK(usage.code == 2);

    const Run missing = cli("link --scenario " + (dir / "nope.json").string(), dir);
    CHECK(missing.code == 2);

    dump(dir / "bad.json", versioned({{"em", {{"dma", {{"normalized_leakage", 1.5}}}}}}));
    const Run bad = cli("link --scenario " + (dir / "bad.json").string() + " --out " + (dir / "out").string(), dir);
    CHECK(bad.code == 2);
    const json err = json::parse(bad.err);
    CHECK(err["exit_code"] == 2);
    CHECK(err["error"] == "config");
    CHECK(err["details"].dump().find("normalized_leakage") != std::string::npos);

    // a search that would blow the cap is a model error
    json opt = light_link();
    opt["optimize"] = {{"architecture", "tri-hybrid"}, {"methods", {"exhaustive"}}};
    opt["search"]["cap"] = 10;
    dump(dir / "opt.json", opt);
    const Run model = cli("optimize --scenario " + (dir / "opt.json").string() + " --out " + (dir / "out").string(), dir);
    CHECK(model.code == 3);
    CHECK(json::parse(model.err)["error"] == "model");
    const bool wrote = fs::exists(dir / "out") && !fs::is_empty(dir / "out");
    CHECK_FALSE(wrote);
}
