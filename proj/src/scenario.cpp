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

#include "trihybrid/scenario.hpp"
#include "trihybrid/hash.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace trihybrid
{
    using nlohmann::json;

    namespace
    {
        std::string join(const std::vector<std::string> &errors)
        {
            std::string out = "invalid scenario:";
            for (const auto &e : errors)
                out += "\n  " + e;
            return out;
        }

        std::string child(const std::string &path, const std::string &key)
        {
            return path.empty() ? key : path + "." + key;
        }

        // Collects every problem instead of stopping at the first one.
        class Reader
        {
        public:
            std::vector<std::string> errors;

            void fail(const std::string &path, const std::string &what) { errors.push_back(path + ": " + what); }

            bool object(const json &j, const std::string &path, const std::set<std::string> &allowed)
            {
                if (!j.is_object())
                {
                    fail(path.empty() ? "<root>" : path, "expected an object");
                    return false;
                }
                for (const auto &[k, v] : j.items())
                    if (!allowed.count(k))
                        fail(child(path, k), "unknown key");
                return true;
            }

            void real(const json &o, const std::string &path, const char *key, double &out,
                      const std::function<bool(double)> &ok = {}, const char *range = "")
            {
                if (!o.contains(key))
                    return;
                const json &v = o.at(key);
                if (!v.is_number())
                {
                    fail(child(path, key), "expected a number");
                    return;
                }
                const double x = v.get<double>();
                if (!std::isfinite(x) || (ok && !ok(x)))
                {
                    fail(child(path, key), std::string("value out of range, must be ") + range);
                    return;
                }
                out = x;
            }

            template <class U>
            void integer(const json &o, const std::string &path, const char *key, U &out, std::uint64_t lo = 0,
                         std::uint64_t hi = std::numeric_limits<std::uint64_t>::max())
            {
                if (!o.contains(key))
                    return;
                const json &v = o.at(key);
                if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
                {
                    fail(child(path, key), "expected a nonnegative integer");
                    return;
                }
                const auto x = v.get<std::uint64_t>();
                if (x < lo || x > hi)
                {
                    fail(child(path, key), "value out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
                    return;
                }
                out = static_cast<U>(x);
            }

            void boolean(const json &o, const std::string &path, const char *key, bool &out)
            {
                if (!o.contains(key))
                    return;
                if (!o.at(key).is_boolean())
                    fail(child(path, key), "expected true or false");
                else
                    out = o.at(key).get<bool>();
            }

            void text(const json &o, const std::string &path, const char *key, std::string &out,
                      const std::vector<std::string> &choices = {})
            {
                if (!o.contains(key))
                    return;
                if (!o.at(key).is_string())
                {
                    fail(child(path, key), "expected a string");
                    return;
                }
                const auto s = o.at(key).get<std::string>();
                if (!choices.empty() && std::find(choices.begin(), choices.end(), s) == choices.end())
                {
                    std::string opts;
                    for (const auto &c : choices)
                        opts += (opts.empty() ? "" : ", ") + c;
                    fail(child(path, key), "'" + s + "' is not one of " + opts);
                    return;
                }
                out = s;
            }

            template <class T>
            void list(const json &o, const std::string &path, const char *key, std::vector<T> &out,
                      const std::function<bool(const json &)> &ok, const char *what)
            {
                if (!o.contains(key))
                    return;
                const json &v = o.at(key);
                if (!v.is_array())
                {
                    fail(child(path, key), "expected an array");
                    return;
                }
                std::vector<T> tmp;
                for (std::size_t i = 0; i < v.size(); ++i)
                {
                    if (!ok(v[i]))
                    {
                        fail(child(path, key) + "[" + std::to_string(i) + "]", std::string("expected ") + what);
                        return;
                    }
                    tmp.push_back(v[i].get<T>());
                }
                out = std::move(tmp);
            }
        };

        template <class E>
        E enum_from(const std::string &s, const std::vector<std::pair<std::string, E>> &table)
        {
            for (const auto &[name, value] : table)
                if (name == s)
                    return value;
            return table.front().second;
        }

        template <class E>
        std::vector<std::string> names_of(const std::vector<std::pair<std::string, E>> &table)
        {
            std::vector<std::string> out;
            for (const auto &p : table)
                out.push_back(p.first);
            return out;
        }

        const std::vector<std::pair<std::string, ArchitectureKind>> kinds{
            {"digital", ArchitectureKind::digital},
            {"hybrid", ArchitectureKind::hybrid},
            {"tri-hybrid", ArchitectureKind::tri_hybrid}};
        const std::vector<std::pair<std::string, Connectivity>> connectivities{
            {"fully-connected", Connectivity::fully_connected}, {"subarray", Connectivity::subarray}};
        const std::vector<std::pair<std::string, AnalogMode>> analog_modes{
            {"phase-shifters", AnalogMode::phase_shifters}, {"pass-through", AnalogMode::pass_through}};
        const std::vector<std::pair<std::string, EmKind>> em_kinds{{"none", EmKind::none},
                                                                   {"dma", EmKind::dma},
                                                                   {"espar", EmKind::espar},
                                                                   {"switched-pattern", EmKind::switched_pattern}};
        const std::vector<std::pair<std::string, Termination>> terminations{{"radiating", Termination::radiating},
                                                                            {"absorbing", Termination::absorbing}};
        const std::vector<std::pair<std::string, Objective>> objectives{
            {"spectral-efficiency", Objective::spectral_efficiency},
            {"energy-efficiency", Objective::energy_efficiency}};
        const std::vector<std::string> methods{"alternating", "annealing", "genetic",
                                               "random",      "two-stage", "exhaustive"};

        template <class E>
        std::string name_of(E value, const std::vector<std::pair<std::string, E>> &table)
        {
            for (const auto &[name, v] : table)
                if (v == value)
                    return name;
            return "?";
        }

        bool is_real(const json &v) { return v.is_number() && std::isfinite(v.get<double>()); }
        bool is_count(const json &v) { return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0); }

        json read_json_file(const std::filesystem::path &path, const std::string &field, Reader &rd)
        {
            std::ifstream in(path);
            if (!in)
            {
                rd.fail(field, "cannot open '" + path.string() + "'");
                return {};
            }
            try
            {
                return json::parse(in);
            }
            catch (const json::parse_error &e)
            {
                rd.fail(field, std::string("malformed JSON in '") + path.string() + "': " + e.what());
                return {};
            }
        }

        void read_range(Reader &rd, const json &o, const std::string &path, const char *key, AngleRange &out)
        {
            std::vector<double> v;
            rd.list<double>(o, path, key, v, is_real, "a number");
            if (!o.contains(key))
                return;
            if (v.size() != 2)
            {
                if (o.at(key).is_array())
                    rd.fail(child(path, key), "expected [min, max]");
                return;
            }
            out = {v[0], v[1]};
        }

        json range_json(const AngleRange &r) { return json::array({r.min, r.max}); }
    }

    ScenarioError::ScenarioError(std::vector<std::string> errors)
        : ConfigError(join(errors)), errors_(std::move(errors))
    {
    }

    std::vector<ArchitectureTemplate> default_architectures()
    {
        ArchitectureTemplate dig;
        dig.name = "digital";
        dig.kind = ArchitectureKind::digital;
        ArchitectureTemplate hyb;
        hyb.name = "hybrid";
        hyb.kind = ArchitectureKind::hybrid;
        ArchitectureTemplate tri;
        tri.name = "tri-hybrid";
        tri.kind = ArchitectureKind::tri_hybrid;
        tri.connectivity = Connectivity::subarray;
        tri.em = EmKind::dma;
        return {dig, hyb, tri};
    }

    const std::vector<std::string> &experiment_names()
    {
        static const std::vector<std::string> names{"link", "aperture-sweep", "frontier", "dma-map", "optimize"};
        return names;
    }

    Scenario scenario_from_json(const json &j, const std::filesystem::path &base_dir)
    {
        Reader rd;
        Scenario s;
        if (!rd.object(j, "",
                       {"schema_version", "seed", "experiment", "carrier_ghz", "bandwidth_hz", "tx_power_w",
                        "noise_power_w", "objective", "arrays", "channel", "architectures", "em", "power_catalog",
                        "search", "aperture_sweep", "frontier", "dma_map", "optimize", "output"}))
            throw ScenarioError(rd.errors);

        if (!j.contains("schema_version"))
            rd.fail("schema_version", "missing");
        else
        {
            rd.integer(j, "", "schema_version", s.schema_version, 0, 1000);
            if (rd.errors.empty() && s.schema_version != schema_version)
                rd.fail("schema_version", "unsupported version " + std::to_string(s.schema_version) + ", expected " +
                                              std::to_string(schema_version));
        }
        rd.integer(j, "", "seed", s.seed);
        rd.text(j, "", "experiment", s.experiment, experiment_names());
        auto positive = [](double x) { return x > 0.0; };
        rd.real(j, "", "carrier_ghz", s.carrier_ghz, positive, "> 0");
        rd.real(j, "", "bandwidth_hz", s.bandwidth_hz, positive, "> 0");
        rd.real(j, "", "tx_power_w", s.tx_power_w, positive, "> 0");
        rd.real(j, "", "noise_power_w", s.noise_power_w, positive, "> 0");
        {
            std::string o = name_of(s.objective, objectives);
            rd.text(j, "", "objective", o, names_of(objectives));
            s.objective = enum_from(o, objectives);
        }

        if (j.contains("arrays") && rd.object(j["arrays"], "arrays", {"tx", "rx"}))
            for (const char *side : {"tx", "rx"})
            {
                const std::string p = std::string("arrays.") + side;
                ArraySpec &a = std::string(side) == "tx" ? s.tx : s.rx;
                if (j["arrays"].contains(side) && rd.object(j["arrays"][side], p, {"elements", "spacing"}))
                {
                    rd.integer(j["arrays"][side], p, "elements", a.elements, 1, 1u << 16);
                    rd.real(j["arrays"][side], p, "spacing", a.spacing, positive, "> 0");
                }
            }

        if (j.contains("channel") &&
            rd.object(j["channel"], "channel",
                      {"paths", "decay_db_per_path", "aod_azimuth", "aod_elevation", "aoa_azimuth", "aoa_elevation",
                       "path_file"}))
        {
            const json &c = j["channel"];
            rd.integer(c, "channel", "paths", s.channel.paths, 1, 1u << 16);
            rd.real(c, "channel", "decay_db_per_path", s.channel.profile.decay_db_per_path,
                    [](double x) { return x >= 0.0; }, ">= 0");
            read_range(rd, c, "channel", "aod_azimuth", s.channel.profile.departure_azimuth);
            read_range(rd, c, "channel", "aod_elevation", s.channel.profile.departure_elevation);
            read_range(rd, c, "channel", "aoa_azimuth", s.channel.profile.arrival_azimuth);
            read_range(rd, c, "channel", "aoa_elevation", s.channel.profile.arrival_elevation);
            try
            {
                validate(s.channel.profile);
            }
            catch (const ConfigError &e)
            {
                rd.fail("channel", e.what());
            }
            rd.text(c, "channel", "path_file", s.channel.path_file);
            if (!s.channel.path_file.empty())
            {
                const json records = read_json_file(base_dir / s.channel.path_file, "channel.path_file", rd);
                if (!records.is_null())
                    try
                    {
                        s.channel.explicit_paths = path_set_from_json(records);
                        s.channel.paths = s.channel.explicit_paths->size();
                    }
                    catch (const ConfigError &e)
                    {
                        rd.fail("channel.path_file", e.what());
                    }
            }
        }

        if (j.contains("architectures"))
        {
            if (!j["architectures"].is_array() || j["architectures"].empty())
                rd.fail("architectures", "expected a nonempty array");
            else
            {
                std::set<std::string> names;
                for (std::size_t i = 0; i < j["architectures"].size(); ++i)
                {
                    const json &a = j["architectures"][i];
                    const std::string p = "architectures[" + std::to_string(i) + "]";
                    ArchitectureTemplate t;
                    if (!rd.object(a, p,
                                   {"name", "kind", "rf_chains", "streams", "connectivity", "analog", "phase_bits",
                                    "em", "feeds", "elements_per_feed"}))
                        continue;
                    if (!a.contains("name") || !a.contains("kind"))
                        rd.fail(p, "'name' and 'kind' are required");
                    rd.text(a, p, "name", t.name);
                    if (!names.insert(t.name).second)
                        rd.fail(p + ".name", "duplicate architecture name '" + t.name + "'");
                    std::string k = "digital", conn = "fully-connected", an = "phase-shifters", em = "none";
                    rd.text(a, p, "kind", k, names_of(kinds));
                    rd.text(a, p, "connectivity", conn, names_of(connectivities));
                    rd.text(a, p, "analog", an, names_of(analog_modes));
                    rd.text(a, p, "em", em, names_of(em_kinds));
                    t.kind = enum_from(k, kinds);
                    t.connectivity = enum_from(conn, connectivities);
                    t.analog = enum_from(an, analog_modes);
                    t.em = enum_from(em, em_kinds);
                    rd.integer(a, p, "rf_chains", t.rf_chains, 1, 1u << 16);
                    rd.integer(a, p, "streams", t.streams, 1, 1u << 16);
                    rd.integer(a, p, "phase_bits", t.phase_bits, 1, 16);
                    rd.integer(a, p, "feeds", t.feeds, 0, 1u << 16);
                    rd.integer(a, p, "elements_per_feed", t.elements_per_feed, 0, 1u << 16);
                    if (t.kind != ArchitectureKind::tri_hybrid && t.em != EmKind::none)
                        rd.fail(p + ".em", "only tri-hybrid architectures have an EM layer");
                    s.architectures.push_back(t);
                }
            }
        }
        else
            s.architectures = default_architectures();

        if (j.contains("em") && rd.object(j["em"], "em", {"dma", "espar", "switched_pattern"}))
        {
            const json &e = j["em"];
            if (e.contains("dma") &&
                rd.object(e["dma"], "em.dma",
                          {"slots", "normalized_leakage", "electrical_spacing", "termination", "phase_bits"}))
            {
                DmaConfig &d = s.em.dma;
                rd.integer(e["dma"], "em.dma", "slots", d.slots, 1, 4096);
                rd.real(e["dma"], "em.dma", "normalized_leakage", d.leakage,
                        [](double x) { return x > 0.0 && x <= 1.0; }, "in (0, 1]");
                rd.real(e["dma"], "em.dma", "electrical_spacing", d.electrical_spacing);
                std::string t = name_of(d.termination, terminations);
                rd.text(e["dma"], "em.dma", "termination", t, names_of(terminations));
                d.termination = enum_from(t, terminations);
                rd.integer(e["dma"], "em.dma", "phase_bits", d.phase_bits, 1, 16);
            }
            if (e.contains("espar") &&
                rd.object(e["espar"], "em.espar",
                          {"elements", "active", "reactance_levels", "loss_resistance", "impedance"}))
            {
                EsparTemplate &t = s.em.espar;
                const json &o = e["espar"];
                rd.integer(o, "em.espar", "elements", t.elements, 1, 64);
                rd.integer(o, "em.espar", "active", t.active, 0, 63);
                rd.list<double>(o, "em.espar", "reactance_levels", t.reactance_levels, is_real, "a number");
                if (t.reactance_levels.empty())
                    rd.fail("em.espar.reactance_levels", "needs at least one level");
                rd.real(o, "em.espar", "loss_resistance", t.loss_resistance, [](double x) { return x >= 0.0; },
                        ">= 0");
                if (o.contains("impedance"))
                {
                    const json &z = o["impedance"];
                    bool ok = z.is_array() && !z.empty();
                    const std::size_t n = ok ? z.size() : 0;
                    CMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
                    for (std::size_t r = 0; ok && r < n; ++r)
                    {
                        ok = z[r].is_array() && z[r].size() == n;
                        for (std::size_t c = 0; ok && c < n; ++c)
                        {
                            ok = z[r][c].is_array() && z[r][c].size() == 2 && is_real(z[r][c][0]) &&
                                 is_real(z[r][c][1]);
                            if (ok)
                                m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                                    cplx(z[r][c][0].get<double>(), z[r][c][1].get<double>());
                        }
                    }
                    if (!ok)
                        rd.fail("em.espar.impedance", "expected a square array of [re, im] pairs");
                    else
                    {
                        t.impedance = m;
                        t.elements = n;
                    }
                }
                if (t.active >= t.elements)
                    rd.fail("em.espar.active", "index must be below the element count");
                else if (rd.errors.empty())
                    try
                    {
                        const CMatrix z = t.impedance ? *t.impedance : exponential_coupling_impedance(t.elements);
                        validate(EsparConfig{z, t.active, std::vector<double>(t.elements - 1, t.reactance_levels[0]),
                                             1.0, t.loss_resistance});
                    }
                    catch (const ConfigError &ex)
                    {
                        rd.fail("em.espar", ex.what());
                    }
            }
            if (e.contains("switched_pattern") &&
                rd.object(e["switched_pattern"], "em.switched_pattern",
                          {"beams", "insertion_loss_db", "interpolate", "library_file"}))
            {
                const json &o = e["switched_pattern"];
                SwitchedTemplate &t = s.em.switched;
                rd.integer(o, "em.switched_pattern", "beams", s.pattern_beams, 1, 1024);
                rd.real(o, "em.switched_pattern", "insertion_loss_db", t.insertion_loss_db,
                        [](double x) { return x >= 0.0; }, ">= 0");
                rd.boolean(o, "em.switched_pattern", "interpolate", t.interpolate);
                rd.text(o, "em.switched_pattern", "library_file", s.pattern_file);
                if (!s.pattern_file.empty())
                {
                    const json lib =
                        read_json_file(base_dir / s.pattern_file, "em.switched_pattern.library_file", rd);
                    if (!lib.is_null())
                        try
                        {
                            t.library = pattern_library_from_json(lib);
                            s.pattern_beams = t.library.size();
                        }
                        catch (const ConfigError &ex)
                        {
                            rd.fail("em.switched_pattern.library_file", ex.what());
                        }
                }
                else
                    t.library = gaussian_beam_library(s.pattern_beams);
            }
        }

        if (j.contains("power_catalog") &&
            rd.object(j["power_catalog"], "power_catalog",
                      {"common_w", "local_oscillator_w", "rf_chain_w", "dac_w", "phase_shifter_w",
                       "power_amplifier_w", "switch_w", "em_control_w_per_bit"}))
        {
            const json &o = j["power_catalog"];
            auto nonneg = [](double x) { return x >= 0.0; };
            PowerCatalog &c = s.catalog;
            rd.real(o, "power_catalog", "common_w", c.common, nonneg, ">= 0");
            rd.real(o, "power_catalog", "local_oscillator_w", c.local_oscillator, nonneg, ">= 0");
            rd.real(o, "power_catalog", "rf_chain_w", c.rf_chain, nonneg, ">= 0");
            rd.real(o, "power_catalog", "dac_w", c.dac, nonneg, ">= 0");
            rd.real(o, "power_catalog", "phase_shifter_w", c.phase_shifter, nonneg, ">= 0");
            rd.real(o, "power_catalog", "power_amplifier_w", c.power_amplifier, nonneg, ">= 0");
            rd.real(o, "power_catalog", "switch_w", c.switch_element, nonneg, ">= 0");
            rd.real(o, "power_catalog", "em_control_w_per_bit", c.em_control_per_bit, nonneg, ">= 0");
        }

        if (j.contains("search") &&
            rd.object(j["search"], "search",
                      {"method", "budget", "rounds", "beams", "initial_temperature", "cooling",
                       "iterations_per_temperature", "population", "cap"}))
        {
            const json &o = j["search"];
            SearchSpec &sp = s.search;
            rd.text(o, "search", "method", sp.method, methods);
            rd.integer(o, "search", "budget", sp.budget, 1);
            rd.integer(o, "search", "rounds", sp.rounds, 1);
            rd.integer(o, "search", "beams", sp.beams, 1, 1u << 16);
            rd.real(o, "search", "initial_temperature", sp.initial_temperature, positive, "> 0");
            rd.real(o, "search", "cooling", sp.cooling, [](double x) { return x > 0.0 && x < 1.0; }, "in (0, 1)");
            rd.integer(o, "search", "iterations_per_temperature", sp.iterations_per_temperature, 1);
            rd.integer(o, "search", "population", sp.population, 2, 1u << 20);
            rd.integer(o, "search", "cap", sp.cap, 1);
            if (sp.budget < sp.population && sp.method == "genetic")
                rd.fail("search.budget", "must be >= search.population for genetic search");
        }

        if (j.contains("aperture_sweep") &&
            rd.object(j["aperture_sweep"], "aperture_sweep", {"apertures", "with_se"}))
        {
            const json &o = j["aperture_sweep"];
            rd.list<std::size_t>(o, "aperture_sweep", "apertures", s.aperture_sweep.apertures,
                                 [](const json &v) { return is_count(v) && v.get<std::uint64_t>() >= 1; },
                                 "a positive integer");
            const auto &a = s.aperture_sweep.apertures;
            if (a.empty())
                rd.fail("aperture_sweep.apertures", "needs at least one size");
            for (std::size_t i = 1; i < a.size(); ++i)
                if (a[i] <= a[i - 1])
                {
                    rd.fail("aperture_sweep.apertures", "must be strictly ascending");
                    break;
                }
            rd.boolean(o, "aperture_sweep", "with_se", s.aperture_sweep.with_se);
        }

        if (j.contains("frontier") && rd.object(j["frontier"], "frontier", {"tx_power_w", "include_dma_only"}))
        {
            const json &o = j["frontier"];
            rd.list<double>(o, "frontier", "tx_power_w", s.frontier.tx_power_w,
                            [](const json &v) { return is_real(v) && v.get<double>() > 0.0; }, "a positive number");
            if (s.frontier.tx_power_w.empty())
                rd.fail("frontier.tx_power_w", "needs at least one operating point");
            rd.boolean(o, "frontier", "include_dma_only", s.frontier.include_dma_only);
        }

        if (j.contains("dma_map") &&
            rd.object(j["dma_map"], "dma_map",
                      {"normalized_leakage", "resolution", "electrical_spacing", "termination"}))
        {
            const json &o = j["dma_map"];
            rd.list<double>(o, "dma_map", "normalized_leakage", s.dma_map.leakages,
                            [](const json &v) { return is_real(v) && v.get<double>() > 0.0 && v.get<double>() <= 1.0; },
                            "a number in (0, 1]");
            if (s.dma_map.leakages.empty())
                rd.fail("dma_map.normalized_leakage", "needs at least one value");
            rd.integer(o, "dma_map", "resolution", s.dma_map.resolution, 8, 4096);
            rd.real(o, "dma_map", "electrical_spacing", s.dma_map.electrical_spacing);
            std::string t = name_of(s.dma_map.termination, terminations);
            rd.text(o, "dma_map", "termination", t, names_of(terminations));
            s.dma_map.termination = enum_from(t, terminations);
        }

        if (j.contains("optimize") &&
            rd.object(j["optimize"], "optimize", {"architecture", "methods", "restarts"}))
        {
            const json &o = j["optimize"];
            rd.text(o, "optimize", "architecture", s.optimize.architecture);
            rd.list<std::string>(o, "optimize", "methods", s.optimize.methods,
                                 [](const json &v)
                                 { return v.is_string() && std::find(methods.begin(), methods.end(),
                                                                     v.get<std::string>()) != methods.end(); },
                                 "a search method name");
            if (s.optimize.methods.empty())
                rd.fail("optimize.methods", "needs at least one method");
            rd.integer(o, "optimize", "restarts", s.optimize.restarts, 1, 1u << 16);
        }

        if (j.contains("output") && rd.object(j["output"], "output", {"directory"}))
        {
            rd.text(j["output"], "output", "directory", s.output_directory);
            if (s.output_directory.empty())
                rd.fail("output.directory", "must not be empty");
        }

        // cross-section checks
        if (s.experiment == "optimize")
        {
            bool found = false;
            for (const auto &a : s.architectures)
                found = found || a.name == s.optimize.architecture;
            if (!found)
                rd.fail("optimize.architecture", "no architecture named '" + s.optimize.architecture + "'");
        }
        if (s.experiment == "frontier" && s.architectures.size() + (s.frontier.include_dma_only ? 1 : 0) < 2)
            rd.fail("architectures", "the frontier needs at least two architectures");

        if (!rd.errors.empty())
            throw ScenarioError(rd.errors);
        return s;
    }

    json scenario_to_json(const Scenario &s)
    {
        json j;
        j["schema_version"] = s.schema_version;
        j["seed"] = s.seed;
        j["experiment"] = s.experiment;
        j["carrier_ghz"] = s.carrier_ghz;
        j["bandwidth_hz"] = s.bandwidth_hz;
        j["tx_power_w"] = s.tx_power_w;
        j["noise_power_w"] = s.noise_power_w;
        j["objective"] = name_of(s.objective, objectives);
        j["arrays"] = {{"tx", {{"elements", s.tx.elements}, {"spacing", s.tx.spacing}}},
                       {"rx", {{"elements", s.rx.elements}, {"spacing", s.rx.spacing}}}};
        const GainProfile &g = s.channel.profile;
        j["channel"] = {{"paths", s.channel.paths},
                        {"decay_db_per_path", g.decay_db_per_path},
                        {"aod_azimuth", range_json(g.departure_azimuth)},
                        {"aod_elevation", range_json(g.departure_elevation)},
                        {"aoa_azimuth", range_json(g.arrival_azimuth)},
                        {"aoa_elevation", range_json(g.arrival_elevation)}};
        if (!s.channel.path_file.empty())
            j["channel"]["path_file"] = s.channel.path_file;
        j["architectures"] = json::array();
        for (const auto &a : s.architectures)
            j["architectures"].push_back({{"name", a.name},
                                          {"kind", name_of(a.kind, kinds)},
                                          {"rf_chains", a.rf_chains},
                                          {"streams", a.streams},
                                          {"connectivity", name_of(a.connectivity, connectivities)},
                                          {"analog", name_of(a.analog, analog_modes)},
                                          {"phase_bits", a.phase_bits},
                                          {"em", name_of(a.em, em_kinds)},
                                          {"feeds", a.feeds},
                                          {"elements_per_feed", a.elements_per_feed}});
        const DmaConfig &d = s.em.dma;
        const EsparTemplate &e = s.em.espar;
        json espar = {{"elements", e.elements},
                      {"active", e.active},
                      {"reactance_levels", e.reactance_levels},
                      {"loss_resistance", e.loss_resistance}};
        if (e.impedance)
        {
            json z = json::array();
            for (Eigen::Index r = 0; r < e.impedance->rows(); ++r)
            {
                json row = json::array();
                for (Eigen::Index c = 0; c < e.impedance->cols(); ++c)
                    row.push_back({(*e.impedance)(r, c).real(), (*e.impedance)(r, c).imag()});
                z.push_back(row);
            }
            espar["impedance"] = z;
        }
        json switched = {{"beams", s.pattern_beams},
                         {"insertion_loss_db", s.em.switched.insertion_loss_db},
                         {"interpolate", s.em.switched.interpolate}};
        if (!s.pattern_file.empty())
            switched["library_file"] = s.pattern_file;
        j["em"] = {{"dma",
                    {{"slots", d.slots},
                     {"normalized_leakage", d.leakage},
                     {"electrical_spacing", d.electrical_spacing},
                     {"termination", name_of(d.termination, terminations)},
                     {"phase_bits", d.phase_bits}}},
                   {"espar", espar},
                   {"switched_pattern", switched}};
        const PowerCatalog &c = s.catalog;
        j["power_catalog"] = {{"common_w", c.common},
                              {"local_oscillator_w", c.local_oscillator},
                              {"rf_chain_w", c.rf_chain},
                              {"dac_w", c.dac},
                              {"phase_shifter_w", c.phase_shifter},
                              {"power_amplifier_w", c.power_amplifier},
                              {"switch_w", c.switch_element},
                              {"em_control_w_per_bit", c.em_control_per_bit}};
        const SearchSpec &sp = s.search;
        j["search"] = {{"method", sp.method},
                       {"budget", sp.budget},
                       {"rounds", sp.rounds},
                       {"beams", sp.beams},
                       {"initial_temperature", sp.initial_temperature},
                       {"cooling", sp.cooling},
                       {"iterations_per_temperature", sp.iterations_per_temperature},
                       {"population", sp.population},
                       {"cap", sp.cap}};
        j["aperture_sweep"] = {{"apertures", s.aperture_sweep.apertures}, {"with_se", s.aperture_sweep.with_se}};
        j["frontier"] = {{"tx_power_w", s.frontier.tx_power_w}, {"include_dma_only", s.frontier.include_dma_only}};
        j["dma_map"] = {{"normalized_leakage", s.dma_map.leakages},
                        {"resolution", s.dma_map.resolution},
                        {"electrical_spacing", s.dma_map.electrical_spacing},
                        {"termination", name_of(s.dma_map.termination, terminations)}};
        j["optimize"] = {{"architecture", s.optimize.architecture},
                         {"methods", s.optimize.methods},
                         {"restarts", s.optimize.restarts}};
        j["output"] = {{"directory", s.output_directory}};
        return j;
    }

    Scenario parse_scenario(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("cannot open scenario file '" + path.string() + "'");
        json j;
        try
        {
            j = json::parse(in);
        }
        catch (const json::parse_error &e)
        {
            throw ConfigError("scenario file '" + path.string() + "' is not valid JSON: " + e.what());
        }
        return scenario_from_json(j, path.parent_path());
    }

    std::uint64_t config_hash(const Scenario &s)
    {
        Fnv1a h;
        h.text(scenario_to_json(s).dump());
        // file-backed inputs enter through their content
        if (s.channel.explicit_paths)
            h.integer(s.channel.explicit_paths->id());
        if (!s.pattern_file.empty())
            h.text(pattern_library_to_json(s.em.switched.library).dump());
        return h.value();
    }
}
