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

#include "trihybrid/experiments.hpp"
#include "trihybrid/hash.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

namespace trihybrid
{
    std::string format_fixed(double value)
    {
        if (std::isnan(value))
            return "nan";
        if (std::isinf(value))
            return value > 0 ? "inf" : "-inf";
        if (value == 0.0)
            return "0";
        const int magnitude = static_cast<int>(std::floor(std::log10(std::abs(value))));
        const int decimals = std::max(0, 8 - magnitude);
        char buf[512];
        std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
        std::string s(buf);
        if (s.find_first_not_of("-0.") == std::string::npos)
            return "0"; // rounded to zero
        return s;
    }

    void write_csv(std::ostream &out, const Table &table)
    {
        std::string text;
        for (std::size_t c = 0; c < table.columns.size(); ++c)
            text += (c ? "," : "") + table.columns[c];
        text += '\n';
        for (const auto &row : table.rows)
        {
            for (std::size_t c = 0; c < row.size(); ++c)
                text += (c ? "," : "") + row[c];
            text += '\n';
        }
        out << text;
    }

    void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)> &fn)
    {
        const std::size_t workers = std::min<std::size_t>(std::max(1u, jobs), count);
        if (workers <= 1)
        {
            for (std::size_t i = 0; i < count; ++i)
                fn(i);
            return;
        }
        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(
                [&]
                {
                    for (std::size_t i = next++; i < count; i = next++)
                    {
                        try
                        {
                            fn(i);
                        }
                        catch (...)
                        {
                            std::lock_guard lock(error_mutex);
                            if (!error)
                                error = std::current_exception();
                        }
                    }
                });
        for (auto &t : pool)
            t.join();
        if (error)
            std::rethrow_exception(error);
    }

    PathSet scenario_paths(const Scenario &s)
    {
        if (s.channel.explicit_paths)
            return *s.channel.explicit_paths;
        return draw_paths(s.seed, s.channel.paths, s.channel.profile);
    }

    LinkParameters link_parameters(const Scenario &s, double tx_power_w)
    {
        LinkParameters p;
        p.tx_power = tx_power_w;
        p.noise_power = s.noise_power_w;
        p.bandwidth_hz = s.bandwidth_hz;
        p.objective = s.objective;
        p.catalog = s.catalog;
        return p;
    }

    LinkProblem make_problem(const Scenario &s, const ArchitectureTemplate &arch, std::size_t aperture,
                             double tx_power_w)
    {
        return LinkProblem(make_layout(arch, aperture, s.tx.spacing, s.rx.elements, s.em), scenario_paths(s),
                           ArrayGeometry::uniform_linear(s.rx.elements, s.rx.spacing),
                           link_parameters(s, tx_power_w));
    }

    OptResult run_search(const LinkProblem &problem, const SearchSpec &search, const std::string &method,
                         std::uint64_t seed)
    {
        if (method == "exhaustive")
            return exhaustive_search(problem, search.cap);
        if (method == "two-stage")
        {
            std::vector<double> az;
            for (std::size_t b = 0; b < search.beams; ++b)
                az.push_back(-pi / 2 + pi * (static_cast<double>(b) + 0.5) / static_cast<double>(search.beams));
            return two_stage_search(problem, steering_codebook(problem, az)).result;
        }
        if (method == "alternating")
            return alternating_optimization(problem, search.rounds, heuristic_start(problem, search.beams));
        if (method == "annealing")
        {
            AnnealSchedule a;
            a.initial_temperature = search.initial_temperature;
            a.cooling = search.cooling;
            a.iterations_per_temperature = search.iterations_per_temperature;
            a.budget = search.budget;
            a.seed = seed;
            return simulated_annealing(problem, a);
        }
        if (method == "genetic")
        {
            GeneticConfig g;
            g.population = search.population;
            g.budget = search.budget;
            g.seed = seed;
            return genetic_search(problem, g);
        }
        if (method == "random")
            return random_search(problem, search.budget, seed);
        throw ConfigError("unknown search method '" + method + "'");
    }

    ArchitectureTemplate dma_only_architecture()
    {
        ArchitectureTemplate t;
        t.name = "dma-only";
        t.kind = ArchitectureKind::tri_hybrid;
        t.rf_chains = 1;
        t.streams = 1;
        t.analog = AnalogMode::pass_through;
        t.em = EmKind::dma;
        t.feeds = 1;
        return t;
    }

    namespace
    {
        // shortest round-trip form, e.g. 0.5 or 2
        std::string power_label(double watts)
        {
            char buf[32];
            const auto r = std::to_chars(buf, buf + sizeof buf, watts);
            return std::string(buf, r.ptr);
        }

        std::uint64_t point_seed(std::uint64_t seed, const std::string &name, std::size_t aperture, double power)
        {
            return Fnv1a().integer(seed).text(name).integer(aperture).real(power).value();
        }
    }

    // ---- aperture sweep -----------------------------------------------------------------

    std::vector<AperturePoint> sweep_aperture(const Scenario &s, unsigned jobs)
    {
        const auto &apertures = s.aperture_sweep.apertures;
        for (std::size_t i = 1; i < apertures.size(); ++i)
            if (apertures[i] <= apertures[i - 1])
                throw ConfigError("sweep_aperture: aperture list must be strictly ascending");
        const std::size_t n_arch = s.architectures.size();
        std::vector<AperturePoint> out(apertures.size() * n_arch);
        parallel_for(out.size(), jobs,
                     [&](std::size_t i)
                     {
                         const std::size_t n = apertures[i / n_arch];
                         const ArchitectureTemplate &arch = s.architectures[i % n_arch];
                         AperturePoint &pt = out[i];
                         pt.aperture = n;
                         pt.architecture = arch.name;
                         if (s.aperture_sweep.with_se)
                         {
                             const LinkProblem problem = make_problem(s, arch, n, s.tx_power_w);
                             const OptResult r = run_search(problem, s.search, s.search.method,
                                                            point_seed(s.seed, arch.name, n, s.tx_power_w));
                             pt.power_w = problem.power().total;
                             pt.spectral_efficiency = r.spectral_efficiency;
                             pt.evaluations = r.evaluations;
                         }
                         else
                         {
                             const TransmitterLayout layout =
                                 make_layout(arch, n, s.tx.spacing, s.rx.elements, s.em);
                             pt.power_w = power_total(layout.spec, s.catalog).total;
                         }
                     });
        return out;
    }

    Table to_table(const std::vector<AperturePoint> &points)
    {
        Table t{{"N", "arch", "power_W", "se_bps_hz"}, {}};
        for (const auto &p : points)
            t.rows.push_back({std::to_string(p.aperture), p.architecture, format_fixed(p.power_w),
                              p.spectral_efficiency ? format_fixed(*p.spectral_efficiency) : ""});
        return t;
    }

    std::optional<std::size_t> threshold_crossing(const std::vector<AperturePoint> &points,
                                                  const std::string &architecture, double threshold_w)
    {
        for (const auto &p : points)
            if (p.architecture == architecture && p.power_w > threshold_w)
                return p.aperture;
        return std::nullopt;
    }

    // ---- frontier -----------------------------------------------------------------------

    std::vector<FrontierPoint> ee_se_frontier(const Scenario &s, unsigned jobs)
    {
        std::vector<ArchitectureTemplate> archs = s.architectures;
        if (s.frontier.include_dma_only)
            archs.push_back(dma_only_architecture());
        if (archs.size() < 2)
            throw ConfigError("ee_se_frontier: needs at least two architectures");
        const auto &powers = s.frontier.tx_power_w;
        const bool label_power = powers.size() > 1;
        std::vector<FrontierPoint> out(powers.size() * archs.size());
        parallel_for(out.size(), jobs,
                     [&](std::size_t i)
                     {
                         const double p_tx = powers[i / archs.size()];
                         const ArchitectureTemplate &arch = archs[i % archs.size()];
                         const LinkProblem problem = make_problem(s, arch, s.tx.elements, p_tx);
                         const OptResult r = run_search(problem, s.search, s.search.method,
                                                        point_seed(s.seed, arch.name, s.tx.elements, p_tx));
                         FrontierPoint &pt = out[i];
                         pt.architecture = label_power ? arch.name + "@" + power_label(p_tx) + "W" : arch.name;
                         pt.tx_power_w = p_tx;
                         pt.spectral_efficiency = r.spectral_efficiency;
                         pt.power_w = problem.power().total;
                         pt.energy_efficiency = energy_efficiency(r.spectral_efficiency, s.bandwidth_hz, problem.power());
                         pt.evaluations = r.evaluations;
                     });
        return out;
    }

    Table to_table(const std::vector<FrontierPoint> &points)
    {
        Table t{{"arch", "se_bps_hz", "ee_bits_per_joule", "power_W"}, {}};
        for (const auto &p : points)
            t.rows.push_back({p.architecture, format_fixed(p.spectral_efficiency), format_fixed(p.energy_efficiency),
                              format_fixed(p.power_w)});
        return t;
    }

    // ---- DMA map ------------------------------------------------------------------------

    namespace
    {
        void check(const DmaMapSpec &spec)
        {
            if (spec.resolution < 8)
                throw ConfigError("dma_coefficient_map: resolution must be >= 8");
            if (spec.leakages.empty())
                throw ConfigError("dma_coefficient_map: no leakage values");
            for (double a : spec.leakages)
                if (!(a > 0.0 && a <= 1.0))
                    throw ConfigError("dma_coefficient_map: normalized_leakage must lie in (0, 1]");
        }

        double map_phase(std::size_t k, std::size_t resolution)
        {
            return two_pi * (static_cast<double>(k) + 0.5) / static_cast<double>(resolution);
        }

        cplx coefficient(double alpha, double phi1, double phi2, const DmaMapSpec &spec)
        {
            DmaConfig cfg;
            cfg.slots = 2;
            cfg.leakage = alpha;
            cfg.electrical_spacing = spec.electrical_spacing;
            cfg.termination = spec.termination;
            cfg.phase_states = {phi1, phi2};
            return dma_transmission_coefficient(cfg);
        }
    }

    std::vector<MapPoint> dma_coefficient_map(const DmaMapSpec &spec, unsigned jobs)
    {
        check(spec);
        const std::size_t r = spec.resolution;
        std::vector<MapPoint> out(spec.leakages.size() * r * r);
        parallel_for(spec.leakages.size() * r, jobs,
                     [&](std::size_t row)
                     {
                         const double alpha = spec.leakages[row / r];
                         const double phi1 = map_phase(row % r, r);
                         for (std::size_t k = 0; k < r; ++k)
                         {
                             const double phi2 = map_phase(k, r);
                             const cplx t = coefficient(alpha, phi1, phi2, spec);
                             out[row * r + k] = {alpha, phi1, phi2, std::abs(t), std::arg(t)};
                         }
                     });
        return out;
    }

    Table to_table(const std::vector<MapPoint> &points)
    {
        Table t{{"alpha", "phi1", "phi2", "t_abs", "t_arg"}, {}};
        for (const auto &p : points)
            t.rows.push_back({format_fixed(p.alpha), format_fixed(p.phi1), format_fixed(p.phi2), format_fixed(p.t_abs),
                              format_fixed(p.t_arg)});
        return t;
    }

    double phase_sensitivity(double alpha, const DmaMapSpec &spec)
    {
        DmaMapSpec one = spec;
        one.leakages = {alpha};
        check(one);
        const std::size_t r = spec.resolution;
        const double step = two_pi / static_cast<double>(r);
        std::vector<double> arg(r * r);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t k = 0; k < r; ++k)
                arg[i * r + k] = std::arg(coefficient(alpha, map_phase(i, r), map_phase(k, r), spec));
        auto wrapped = [](double d) { return std::remainder(d, two_pi); };
        double worst = 0.0;
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t k = 0; k < r; ++k)
            {
                // periodic grid: neighbours wrap around
                worst = std::max(worst, std::abs(wrapped(arg[((i + 1) % r) * r + k] - arg[i * r + k])) / step);
                worst = std::max(worst, std::abs(wrapped(arg[i * r + (k + 1) % r] - arg[i * r + k])) / step);
            }
        return worst;
    }

    // ---- link ---------------------------------------------------------------------------

    std::vector<LinkReport> link_experiment(const Scenario &s, unsigned jobs)
    {
        std::vector<LinkReport> out(s.architectures.size());
        parallel_for(out.size(), jobs,
                     [&](std::size_t i)
                     {
                         const ArchitectureTemplate &arch = s.architectures[i];
                         const LinkProblem problem = make_problem(s, arch, s.tx.elements, s.tx_power_w);
                         const OptResult r = run_search(problem, s.search, s.search.method,
                                                        point_seed(s.seed, arch.name, s.tx.elements, s.tx_power_w));
                         const LinkConfiguration cfg = problem.realize(r.state);
                         LinkReport &rep = out[i];
                         rep.architecture = arch.name;
                         rep.aperture = s.tx.elements;
                         rep.feeds = problem.spec().feeds;
                         rep.rf_chains = problem.spec().rf_chains;
                         rep.streams = problem.spec().streams;
                         rep.spectral_efficiency = cfg.spectral_efficiency;
                         rep.energy_efficiency = cfg.energy_efficiency;
                         rep.power = cfg.power;
                         rep.evaluations = r.evaluations;
                     });
        return out;
    }

    Table to_table(const std::vector<LinkReport> &reports)
    {
        Table t{{"arch", "N", "feeds", "rf_chains", "streams", "se_bps_hz", "ee_bits_per_joule", "power_W"}, {}};
        for (const auto &r : reports)
            t.rows.push_back({r.architecture, std::to_string(r.aperture), std::to_string(r.feeds),
                              std::to_string(r.rf_chains), std::to_string(r.streams),
                              format_fixed(r.spectral_efficiency), format_fixed(r.energy_efficiency),
                              format_fixed(r.power.total)});
        return t;
    }

    // ---- optimizer comparison -----------------------------------------------------------

    std::vector<OptimizerRun> optimizer_comparison(const Scenario &s, unsigned jobs)
    {
        const auto it = std::find_if(s.architectures.begin(), s.architectures.end(),
                                     [&](const ArchitectureTemplate &a) { return a.name == s.optimize.architecture; });
        if (it == s.architectures.end())
            throw ConfigError("optimize.architecture: no architecture named '" + s.optimize.architecture + "'");
        const LinkProblem problem = make_problem(s, *it, s.tx.elements, s.tx_power_w);

        struct Job
        {
            std::string method;
            std::uint64_t seed;
        };
        std::vector<Job> work;
        for (const auto &m : s.optimize.methods)
        {
            const bool stochastic = m == "annealing" || m == "genetic" || m == "random";
            const std::size_t n = stochastic ? s.optimize.restarts : 1;
            for (std::size_t k = 0; k < n; ++k)
                work.push_back({m, s.seed + k});
        }
        std::vector<OptimizerRun> out(work.size());
        parallel_for(work.size(), jobs,
                     [&](std::size_t i)
                     {
                         out[i].method = work[i].method;
                         out[i].seed = work[i].seed;
                         out[i].result = run_search(problem, s.search, work[i].method, work[i].seed);
                     });
        return out;
    }

    Table to_table(const std::vector<OptimizerRun> &runs)
    {
        Table t{{"method", "seed", "objective", "se_bps_hz", "evaluations"}, {}};
        for (const auto &r : runs)
            t.rows.push_back({r.method, std::to_string(r.seed), format_fixed(r.result.objective),
                              format_fixed(r.result.spectral_efficiency), std::to_string(r.result.evaluations)});
        return t;
    }
}
