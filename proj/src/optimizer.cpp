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

#include "trihybrid/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace trihybrid
{
    namespace
    {
        // a * b with saturation at uint64 max
        std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b)
        {
            if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
                return std::numeric_limits<std::uint64_t>::max();
            return a * b;
        }

        // Mixed-radix increment over `coords` of `state` (first coordinate fastest).
        bool advance(State &state, const std::vector<std::size_t> &coords, const std::vector<Coordinate> &all)
        {
            for (std::size_t c : coords)
            {
                if (++state[c] < all[c].levels)
                    return true;
                state[c] = 0;
            }
            return false;
        }

        OptResult finish(const LinkProblem &problem, std::string method, State state, std::uint64_t evaluations)
        {
            OptResult r;
            r.method = std::move(method);
            r.spectral_efficiency = problem.spectral_efficiency(state);
            r.objective = problem.objective_from_se(r.spectral_efficiency);
            r.state = std::move(state);
            r.evaluations = evaluations;
            return r;
        }

        // sum_p a_p b_p
        cplx along(const CVector &a, const CVector &b) { return (a.array() * b.array()).sum(); }

        // |sum of port weights x port responses| of one feed towards a direction, maximized
        // over that feed's EM states (exhaustive when small, coordinate ascent otherwise).
        void steer_feed(const LinkProblem &problem, std::size_t feed, const Direction &dir, State &state)
        {
            const auto &coords = problem.em_coordinates(feed);
            if (coords.empty())
                return;
            const CVector resp = problem.port_response(feed, dir);
            const auto &all = problem.coordinates();
            std::vector<std::uint32_t> levels(coords.size(), 0);
            auto gain = [&](const std::vector<std::uint32_t> &l)
            { return std::abs(along(resp, problem.feed_weights(feed, l))); };

            std::uint64_t count = 1;
            for (std::size_t c : coords)
                count = sat_mul(count, all[c].levels);
            std::vector<std::uint32_t> best = levels;
            double best_gain = gain(levels);
            if (count <= 4096)
            {
                for (std::uint64_t i = 1; i < count; ++i)
                {
                    for (std::size_t k = 0; k < coords.size(); ++k)
                    {
                        if (++levels[k] < all[coords[k]].levels)
                            break;
                        levels[k] = 0;
                    }
                    const double g = gain(levels);
                    if (g > best_gain)
                    {
                        best_gain = g;
                        best = levels;
                    }
                }
            }
            else
            {
                for (int sweep = 0; sweep < 3; ++sweep)
                    for (std::size_t k = 0; k < coords.size(); ++k)
                    {
                        levels = best;
                        for (std::uint32_t l = 0; l < all[coords[k]].levels; ++l)
                        {
                            levels[k] = l;
                            const double g = gain(levels);
                            if (g > best_gain)
                            {
                                best_gain = g;
                                best = levels;
                            }
                        }
                    }
            }
            for (std::size_t k = 0; k < coords.size(); ++k)
                state[coords[k]] = best[k];
        }

    }

    // ---- codebooks --------------------------------------------------------------------

    void validate(const Codebook &codebook, const LinkProblem &problem)
    {
        if (codebook.entries.empty())
            throw ConfigError("codebook: empty");
        std::set<State> seen;
        for (std::size_t i = 0; i < codebook.entries.size(); ++i)
        {
            if (!seen.insert(codebook.entries[i]).second)
                throw ConfigError("codebook: entry " + std::to_string(i) + " duplicates an earlier entry");
            try
            {
                problem.check_feasible(codebook.entries[i]);
            }
            catch (const std::logic_error &e)
            {
                throw ConfigError("codebook: entry " + std::to_string(i) + ": " + e.what());
            }
        }
    }

    Codebook full_codebook(const LinkProblem &problem, std::uint64_t cap)
    {
        const std::uint64_t n = problem.state_count();
        if (n > cap)
            throw ModelError("full_codebook: " + std::to_string(n) + " states exceed the cap of " +
                             std::to_string(cap));
        Codebook cb;
        cb.bits = problem.spec().phase_bits;
        std::vector<std::size_t> order(problem.coordinates().size());
        std::iota(order.begin(), order.end(), 0);
        State s = problem.zero_state();
        do
            cb.entries.push_back(s);
        while (advance(s, order, problem.coordinates()));
        return cb;
    }

    Codebook steering_codebook(const LinkProblem &problem, const std::vector<double> &azimuths)
    {
        if (azimuths.empty())
            throw ConfigError("steering_codebook: no azimuths");
        const ArchitectureSpec &spec = problem.spec();
        Codebook cb;
        cb.bits = spec.phase_bits;
        cb.beams = azimuths.size();
        std::set<State> seen;
        for (double az : azimuths)
        {
            const Direction dir{az, 0.0};
            State s = problem.zero_state();
            for (std::size_t f = 0; f < spec.feeds; ++f)
                steer_feed(problem, f, dir, s);
            if (spec.has_phase_shifters())
            {
                for (std::size_t f = 0; f < spec.feeds; ++f)
                {
                    const auto levels = [&]
                    {
                        std::vector<std::uint32_t> l;
                        for (std::size_t c : problem.em_coordinates(f))
                            l.push_back(s[c]);
                        return l;
                    }();
                    const cplx z = along(problem.port_response(f, dir), problem.feed_weights(f, levels));
                    const auto level = static_cast<std::uint32_t>(nearest_grid_index(-std::arg(z), spec.phase_bits));
                    for (std::size_t r = 0; r < spec.rf_chains; ++r)
                        if (const std::size_t c = problem.analog_coordinate(f, r); c != LinkProblem::npos)
                            s[c] = level;
                }
            }
            if (seen.insert(s).second)
                cb.entries.push_back(std::move(s));
        }
        return cb;
    }

    void write_trace_csv(std::ostream &out, const OptResult &result)
    {
        out << "step,stage,objective,accepted\n";
        for (const auto &t : result.trace)
        {
            std::ostringstream line;
            line << t.step << ',' << std::setprecision(9) << t.stage << ',' << t.objective << ','
                 << (t.accepted ? 1 : 0) << '\n';
            out << line.str();
        }
    }

    // ---- exhaustive search -------------------------------------------------------------

    OptResult exhaustive_search(const LinkProblem &problem, const Codebook &codebook, std::uint64_t cap)
    {
        if (codebook.entries.size() > cap)
            throw ModelError("exhaustive_search: codebook of " + std::to_string(codebook.entries.size()) +
                             " entries exceeds the evaluation cap of " + std::to_string(cap));
        validate(codebook, problem);
        OptResult r;
        r.method = "exhaustive";
        std::size_t best = 0;
        double best_value = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < codebook.entries.size(); ++i)
        {
            const double v = problem.evaluate(codebook.entries[i]);
            // values within rounding of the incumbent count as ties
            const bool better = v > best_value + 1e-12 * std::abs(best_value);
            r.trace.push_back({i, 0.0, v, better});
            if (better)
            {
                best_value = v;
                best = i;
            }
        }
        OptResult out = finish(problem, "exhaustive", codebook.entries[best], codebook.entries.size());
        out.trace = std::move(r.trace);
        return out;
    }

    namespace
    {
        // Candidate columns of one RF chain: g = H_eff(em) f over the chain's own coordinates.
        struct ChainCandidates
        {
            std::vector<std::size_t> coords; // enumerated coordinates, first fastest
            std::uint64_t count = 1;
            std::vector<double> g_re, g_im; // count x n_rx
            std::vector<double> f_re, f_im; // count x n_feed, only for fully connected layouts
            std::vector<double> norm_g;     // |g|^2
            double norm_f = 0.0;            // |f|^2, the same for every candidate
        };

        struct Factorization
        {
            bool possible = false;
            std::vector<ChainCandidates> chains;
            bool symmetric = false; // chains share one candidate set
        };

        bool factorable(const LinkProblem &problem)
        {
            const ArchitectureSpec &s = problem.spec();
            if (s.kind == ArchitectureKind::digital)
                return false;
            bool has_em = false;
            for (std::size_t f = 0; f < s.feeds; ++f)
                has_em = has_em || !problem.em_coordinates(f).empty();
            return !has_em || s.analog == AnalogMode::pass_through || s.connectivity == Connectivity::subarray;
        }

        // Each chain's first analog coordinate is pinned to level 0: a common phase on a column
        // of F_A does not change range(F_A) and hence not the capacity.
        std::vector<std::vector<std::size_t>> chain_coordinates(const LinkProblem &problem,
                                                                std::vector<std::vector<std::size_t>> *feeds_out)
        {
            const ArchitectureSpec &s = problem.spec();
            std::vector<std::vector<std::size_t>> out(s.rf_chains), feeds(s.rf_chains);
            for (std::size_t r = 0; r < s.rf_chains; ++r)
            {
                bool first = true;
                for (std::size_t f = 0; f < s.feeds; ++f)
                {
                    const bool on = s.analog == AnalogMode::pass_through ? f == r : s.on_support(f, r);
                    if (!on)
                        continue;
                    feeds[r].push_back(f);
                    if (s.has_phase_shifters())
                    {
                        const std::size_t c = problem.analog_coordinate(f, r);
                        if (!first)
                            out[r].push_back(c);
                        first = false;
                    }
                }
            }
            // EM states belong to the chain that drives the feed (subarray / pass-through only)
            for (std::size_t r = 0; r < s.rf_chains; ++r)
                for (std::size_t f : feeds[r])
                    for (std::size_t c : problem.em_coordinates(f))
                        out[r].push_back(c);
            if (feeds_out)
                *feeds_out = std::move(feeds);
            return out;
        }

        Factorization factorize(const LinkProblem &problem, std::uint64_t cap)
        {
            Factorization fz;
            if (!factorable(problem))
                return fz;
            const ArchitectureSpec &s = problem.spec();
            const auto &all = problem.coordinates();
            std::vector<std::vector<std::size_t>> feeds;
            const auto coords = chain_coordinates(problem, &feeds);
            const bool fc = s.has_phase_shifters() && s.connectivity == Connectivity::fully_connected;
            fz.symmetric = fc;
            const auto n_rx = static_cast<std::size_t>(problem.rx_elements());

            // feed columns per EM tuple, computed once per feed
            std::vector<std::vector<CVector>> feed_cols(s.feeds);
            for (std::size_t f = 0; f < s.feeds; ++f)
            {
                const auto &ec = problem.em_coordinates(f);
                std::uint64_t n = 1;
                for (std::size_t c : ec)
                    n = sat_mul(n, all[c].levels);
                if (n > cap)
                    throw ModelError("exhaustive_search: feed " + std::to_string(f) + " has " + std::to_string(n) +
                                     " EM states, above the cap of " + std::to_string(cap));
                std::vector<std::uint32_t> levels(ec.size(), 0);
                for (std::uint64_t i = 0; i < n; ++i)
                {
                    feed_cols[f].push_back(problem.feed_column(f, levels));
                    for (std::size_t k = 0; k < ec.size(); ++k)
                    {
                        if (++levels[k] < all[ec[k]].levels)
                            break;
                        levels[k] = 0;
                    }
                }
            }

            for (std::size_t r = 0; r < s.rf_chains; ++r)
            {
                if (fz.symmetric && r > 0)
                {
                    ChainCandidates c = fz.chains[0];
                    c.coords.clear();
                    for (std::size_t k : coords[r])
                        c.coords.push_back(k);
                    fz.chains.push_back(std::move(c));
                    continue;
                }
                ChainCandidates cc;
                cc.coords = coords[r];
                for (std::size_t c : cc.coords)
                    cc.count = sat_mul(cc.count, all[c].levels);
                if (cc.count > cap)
                    throw ModelError("exhaustive_search: chain " + std::to_string(r) + " has " +
                                     std::to_string(cc.count) + " candidate columns, above the cap of " +
                                     std::to_string(cap));
                cc.norm_f = static_cast<double>(feeds[r].size());
                cc.g_re.reserve(cc.count * n_rx);
                cc.g_im.reserve(cc.count * n_rx);
                State st = problem.zero_state();
                for (std::uint64_t i = 0; i < cc.count; ++i)
                {
                    CVector g = CVector::Zero(static_cast<Eigen::Index>(n_rx));
                    std::vector<cplx> fcol(s.feeds, cplx(0.0, 0.0));
                    for (std::size_t f : feeds[r])
                    {
                        const auto &ec = problem.em_coordinates(f);
                        std::uint64_t idx = 0, stride = 1;
                        for (std::size_t c : ec)
                        {
                            idx += st[c] * stride;
                            stride *= all[c].levels;
                        }
                        cplx a(1.0, 0.0);
                        if (s.has_phase_shifters())
                            a = std::polar(1.0, grid_phase(st[problem.analog_coordinate(f, r)], s.phase_bits));
                        fcol[f] = a;
                        g += feed_cols[f][idx] * a;
                    }
                    double ng = 0.0;
                    for (std::size_t k = 0; k < n_rx; ++k)
                    {
                        const cplx v = g(static_cast<Eigen::Index>(k));
                        cc.g_re.push_back(v.real());
                        cc.g_im.push_back(v.imag());
                        ng += std::norm(v);
                    }
                    cc.norm_g.push_back(ng);
                    if (fc)
                        for (const cplx &v : fcol)
                        {
                            cc.f_re.push_back(v.real());
                            cc.f_im.push_back(v.imag());
                        }
                    advance(st, cc.coords, all);
                }
                fz.chains.push_back(std::move(cc));
            }
            fz.possible = true;
            return fz;
        }

        // Monotone surrogate of the water-filled rate for two generalized eigenvalues with
        // trace t and product d: returns 1 + SNR-like argument of log2.
        double rate_argument(double t, double d, std::size_t streams, double power, double noise)
        {
            const double disc = std::max(0.0, t * t - 4.0 * d);
            if (streams >= 2 && d > 0.0)
            {
                const double pd = power * d / noise;
                if (pd * pd > disc)
                {
                    const double num = power * d + noise * t;
                    return num * num / (4.0 * noise * noise * d);
                }
            }
            const double l1 = 0.5 * (t + std::sqrt(disc));
            return 1.0 + power * l1 / noise;
        }

        void set_candidate(State &state, const ChainCandidates &c, std::uint64_t index,
                           const std::vector<Coordinate> &all)
        {
            for (std::size_t k : c.coords)
            {
                state[k] = static_cast<std::uint32_t>(index % all[k].levels);
                index /= all[k].levels;
            }
        }

        OptResult exhaustive_factored(const LinkProblem &problem, const Factorization &fz, std::uint64_t cap)
        {
            const ArchitectureSpec &s = problem.spec();
            const auto &all = problem.coordinates();
            const std::size_t n_rx = problem.rx_elements();
            const std::size_t n_feed = s.feeds;
            const std::size_t n_rf = fz.chains.size();
            const double power = problem.params().tx_power;
            const double noise = problem.params().noise_power;

            std::uint64_t tuples = 1;
            if (fz.symmetric)
            {
                // multisets of size n_rf from count candidates, saturating
                const std::uint64_t n = fz.chains[0].count;
                for (std::size_t k = 0; k < n_rf; ++k)
                    tuples = sat_mul(tuples, n + k) / (k + 1);
            }
            else
                for (const auto &c : fz.chains)
                    tuples = sat_mul(tuples, c.count);
            if (tuples > cap)
                throw ModelError("exhaustive_search: " + std::to_string(tuples) +
                                 " column combinations required, above the evaluation cap of " + std::to_string(cap));

            std::vector<std::uint64_t> best(n_rf, 0);
            if (n_rf == 2)
            {
                const ChainCandidates &c0 = fz.chains[0], &c1 = fz.chains[1];
                const bool fc = !c0.f_re.empty();
                const double k11 = c0.norm_f, k22 = c1.norm_f;
                double best_arg = -1.0;
                for (std::uint64_t i = 0; i < c0.count; ++i)
                {
                    const double *gr = &c0.g_re[i * n_rx], *gi = &c0.g_im[i * n_rx];
                    const double a11 = c0.norm_g[i];
                    for (std::uint64_t j = fz.symmetric ? i : 0; j < c1.count; ++j)
                    {
                        const double *hr = &c1.g_re[j * n_rx], *hi = &c1.g_im[j * n_rx];
                        double re = 0.0, im = 0.0; // a12 = g^H h
                        for (std::size_t k = 0; k < n_rx; ++k)
                        {
                            re += gr[k] * hr[k] + gi[k] * hi[k];
                            im += gr[k] * hi[k] - gi[k] * hr[k];
                        }
                        const double a22 = c1.norm_g[j];
                        const double det_a = std::max(0.0, a11 * a22 - (re * re + im * im));
                        double kr = 0.0, ki = 0.0; // k12 = f^H e
                        if (fc)
                        {
                            const double *fr = &c0.f_re[i * n_feed], *fi = &c0.f_im[i * n_feed];
                            const double *er = &c1.f_re[j * n_feed], *ei = &c1.f_im[j * n_feed];
                            for (std::size_t k = 0; k < n_feed; ++k)
                            {
                                kr += fr[k] * er[k] + fi[k] * ei[k];
                                ki += fr[k] * ei[k] - fi[k] * er[k];
                            }
                        }
                        const double det_k = k11 * k22 - (kr * kr + ki * ki);
                        double arg;
                        if (det_k <= 1e-10 * k11 * k22)
                            arg = 1.0 + power * (a11 / k11) / noise; // parallel columns: rank one
                        else
                        {
                            const double t = (a11 * k22 + a22 * k11 - 2.0 * (re * kr + im * ki)) / det_k;
                            arg = rate_argument(t, det_a / det_k, s.streams, power, noise);
                        }
                        if (arg > best_arg)
                        {
                            best_arg = arg;
                            best = {i, j};
                        }
                    }
                }
            }
            else
            {
                // generic path: assemble G and K per tuple
                double best_value = -std::numeric_limits<double>::infinity();
                std::vector<std::uint64_t> idx(n_rf, 0);
                CMatrix g(static_cast<Eigen::Index>(n_rx), static_cast<Eigen::Index>(n_rf));
                CMatrix f(static_cast<Eigen::Index>(n_feed), static_cast<Eigen::Index>(n_rf));
                const bool fc = !fz.chains[0].f_re.empty();
                while (true)
                {
                    for (std::size_t r = 0; r < n_rf; ++r)
                    {
                        const ChainCandidates &c = fz.chains[r];
                        for (std::size_t k = 0; k < n_rx; ++k)
                            g(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(r)) =
                                cplx(c.g_re[idx[r] * n_rx + k], c.g_im[idx[r] * n_rx + k]);
                        if (fc)
                            for (std::size_t k = 0; k < n_feed; ++k)
                                f(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(r)) =
                                    cplx(c.f_re[idx[r] * n_feed + k], c.f_im[idx[r] * n_feed + k]);
                    }
                    CMatrix kmat;
                    if (fc)
                        kmat = f.adjoint() * f;
                    else
                    {
                        kmat = CMatrix::Zero(static_cast<Eigen::Index>(n_rf), static_cast<Eigen::Index>(n_rf));
                        for (std::size_t r = 0; r < n_rf; ++r)
                            kmat(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r)) = fz.chains[r].norm_f;
                    }
                    const double v = problem.capacity(g, kmat);
                    if (v > best_value)
                    {
                        best_value = v;
                        best = idx;
                    }
                    // next tuple (nondecreasing indices when symmetric)
                    bool more = false;
                    for (std::size_t r = n_rf; r-- > 0;)
                        if (++idx[r] < fz.chains[r].count)
                        {
                            for (std::size_t q = r + 1; q < n_rf; ++q)
                                idx[q] = fz.symmetric ? idx[r] : 0;
                            more = true;
                            break;
                        }
                    if (!more)
                        break;
                }
            }

            State state = problem.zero_state();
            for (std::size_t r = 0; r < n_rf; ++r)
                set_candidate(state, fz.chains[r], best[r], all);
            return finish(problem, "exhaustive", std::move(state), tuples);
        }
    }

    OptResult exhaustive_search(const LinkProblem &problem, std::uint64_t cap)
    {
        const Factorization fz = factorize(problem, cap);
        if (fz.possible)
            return exhaustive_factored(problem, fz, cap);

        // plain enumeration, chain phase references pinned
        const auto coords = chain_coordinates(problem, nullptr);
        const ArchitectureSpec &s = problem.spec();
        std::vector<std::size_t> free;
        std::set<std::size_t> pinned;
        if (s.has_phase_shifters())
            for (std::size_t r = 0; r < s.rf_chains; ++r)
                for (std::size_t f = 0; f < s.feeds; ++f)
                    if (const std::size_t c = problem.analog_coordinate(f, r); c != LinkProblem::npos)
                    {
                        pinned.insert(c);
                        break;
                    }
        for (std::size_t c = 0; c < problem.coordinates().size(); ++c)
            if (!pinned.count(c))
                free.push_back(c);
        std::uint64_t n = 1;
        for (std::size_t c : free)
            n = sat_mul(n, problem.coordinates()[c].levels);
        if (n > cap)
            throw ModelError("exhaustive_search: " + std::to_string(n) +
                             " states required, above the evaluation cap of " + std::to_string(cap));
        State s0 = problem.zero_state(), best = s0;
        double best_value = -std::numeric_limits<double>::infinity();
        do
        {
            const double v = problem.spectral_efficiency(s0);
            if (v > best_value)
            {
                best_value = v;
                best = s0;
            }
        } while (advance(s0, free, problem.coordinates()));
        return finish(problem, "exhaustive", std::move(best), n);
    }

    // ---- two-stage ---------------------------------------------------------------------

    TwoStageResult two_stage_search(const LinkProblem &problem, const Codebook &coarse)
    {
        validate(coarse, problem);
        const ArchitectureSpec &spec = problem.spec();
        const auto &params = problem.params();
        TwoStageResult out;
        out.stage1_objective = -std::numeric_limits<double>::infinity();
        std::vector<TracePoint> trace;
        for (std::size_t i = 0; i < coarse.entries.size(); ++i)
        {
            const State &st = coarse.entries[i];
            problem.check_feasible(st);
            PrecoderStack stack;
            stack.digital = CMatrix::Identity(static_cast<Eigen::Index>(spec.rf_chains),
                                              static_cast<Eigen::Index>(spec.streams));
            if (spec.kind != ArchitectureKind::digital)
                stack.analog = problem.analog_matrix(st);
            const double se = spectral_efficiency(problem.feed_channel(st), compose_stack(spec, stack),
                                                  params.noise_power, params.tx_power, 1.0);
            const double v = problem.objective_from_se(se);
            trace.push_back({i, 1.0, v, v > out.stage1_objective});
            if (v > out.stage1_objective)
            {
                out.stage1_objective = v;
                out.stage1_index = i;
            }
        }
        out.result = finish(problem, "two-stage", coarse.entries[out.stage1_index], coarse.entries.size() + 1);
        trace.push_back({coarse.entries.size(), 2.0, out.result.objective, true});
        out.result.trace = std::move(trace);
        return out;
    }

    // ---- simulated annealing ----------------------------------------------------------

    void validate(const AnnealSchedule &s)
    {
        if (!(s.initial_temperature > 0.0))
            throw ConfigError("anneal: initial_temperature must be > 0");
        if (!(s.cooling > 0.0 && s.cooling < 1.0))
            throw ConfigError("anneal: cooling must lie in (0, 1)");
        if (s.iterations_per_temperature < 1)
            throw ConfigError("anneal: iterations_per_temperature must be >= 1");
        if (s.budget < 1)
            throw ConfigError("anneal: budget must be >= 1");
    }

    OptResult simulated_annealing(const LinkProblem &problem, const AnnealSchedule &schedule)
    {
        validate(schedule);
        const auto &all = problem.coordinates();
        std::mt19937_64 rng(schedule.seed);
        State cur = schedule.start ? *schedule.start : problem.random_state(rng);
        double f_cur = problem.evaluate(cur);
        std::uint64_t evals = 1;
        State best = cur;
        double f_best = f_cur;

        OptResult r;
        r.method = "annealing";
        r.trace.push_back({0, schedule.initial_temperature, f_cur, true});

        std::vector<std::size_t> movable;
        for (std::size_t c = 0; c < all.size(); ++c)
            if (all[c].levels > 1)
                movable.push_back(c);

        // temperatures are relative to the magnitude of the start objective
        double scale = std::abs(f_cur);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (std::uint64_t step = 1; evals < schedule.budget && !movable.empty(); ++step)
        {
            const double temp = schedule.initial_temperature *
                                std::pow(schedule.cooling, static_cast<double>((step - 1) /
                                                                               schedule.iterations_per_temperature));
            const std::size_t c = movable[std::uniform_int_distribution<std::size_t>(0, movable.size() - 1)(rng)];
            const std::uint32_t levels = all[c].levels;
            int dir = (rng() & 1u) ? 1 : -1;
            State cand = cur;
            if (all[c].cyclic)
                cand[c] = dir > 0 ? (cur[c] + 1) % levels : (cur[c] + levels - 1) % levels;
            else
            {
                if ((dir < 0 && cur[c] == 0) || (dir > 0 && cur[c] + 1 == levels))
                    dir = -dir;
                cand[c] = static_cast<std::uint32_t>(static_cast<int>(cur[c]) + dir);
            }
            const double f_cand = problem.evaluate(cand);
            ++evals;
            if (scale == 0.0)
                scale = std::abs(f_cand);
            const double delta = f_cand - f_cur;
            bool accept = delta >= 0.0;
            if (!accept && scale > 0.0)
                accept = unit(rng) < std::exp(delta / (temp * scale));
            r.trace.push_back({step, temp, f_cand, accept});
            if (accept)
            {
                cur = std::move(cand);
                f_cur = f_cand;
                if (f_cur > f_best)
                {
                    f_best = f_cur;
                    best = cur;
                }
            }
        }
        OptResult out = finish(problem, "annealing", std::move(best), evals);
        out.trace = std::move(r.trace);
        return out;
    }

    // ---- genetic search ----------------------------------------------------------------

    void validate(const GeneticConfig &g)
    {
        if (g.population < 2)
            throw ConfigError("genetic: population must be >= 2");
        if (g.budget < g.population)
            throw ConfigError("genetic: budget must be >= population");
        if (g.tournament < 1)
            throw ConfigError("genetic: tournament size must be >= 1");
        if (!(g.crossover_rate >= 0.0 && g.crossover_rate <= 1.0))
            throw ConfigError("genetic: crossover_rate must lie in [0, 1]");
        if (g.mutation_rate > 1.0)
            throw ConfigError("genetic: mutation_rate must be <= 1");
        if (g.elites >= g.population)
            throw ConfigError("genetic: elites must be < population");
        if (g.initial.size() > g.population)
            throw ConfigError("genetic: initial population larger than population");
    }

    OptResult genetic_search(const LinkProblem &problem, const GeneticConfig &config)
    {
        validate(config);
        const auto &all = problem.coordinates();
        const std::size_t n = all.size();
        const double mutation = config.mutation_rate < 0.0 ? (n > 0 ? 1.0 / static_cast<double>(n) : 0.0)
                                                            : config.mutation_rate;
        std::mt19937_64 rng(config.seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);

        std::vector<State> pop = config.initial;
        for (const auto &s : pop)
            problem.check_feasible(s);
        while (pop.size() < config.population)
            pop.push_back(problem.random_state(rng));
        std::vector<double> fit;
        for (const auto &s : pop)
            fit.push_back(problem.evaluate(s));
        std::uint64_t evals = pop.size();

        auto best_of = [&]
        { return static_cast<std::size_t>(std::max_element(fit.begin(), fit.end()) - fit.begin()); };
        std::size_t b = best_of();
        State best = pop[b];
        double f_best = fit[b];

        OptResult r;
        r.method = "genetic";
        r.trace.push_back({evals, 0.0, f_best, true});

        auto tournament = [&]
        {
            std::size_t win = std::uniform_int_distribution<std::size_t>(0, pop.size() - 1)(rng);
            for (std::size_t k = 1; k < config.tournament; ++k)
            {
                const std::size_t c = std::uniform_int_distribution<std::size_t>(0, pop.size() - 1)(rng);
                if (fit[c] > fit[win] || (fit[c] == fit[win] && c < win))
                    win = c;
            }
            return win;
        };

        const std::size_t children = config.population - config.elites;
        for (std::size_t gen = 1; evals + children <= config.budget; ++gen)
        {
            std::vector<std::size_t> order(pop.size());
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) { return fit[a] > fit[c]; });
            std::vector<State> next;
            std::vector<double> next_fit;
            for (std::size_t e = 0; e < config.elites; ++e)
            {
                next.push_back(pop[order[e]]);
                next_fit.push_back(fit[order[e]]);
            }
            while (next.size() < config.population)
            {
                const State &p1 = pop[tournament()];
                const State &p2 = pop[tournament()];
                State child = p1;
                if (n > 1 && unit(rng) < config.crossover_rate)
                {
                    const std::size_t cut = std::uniform_int_distribution<std::size_t>(1, n - 1)(rng);
                    std::copy(p2.begin() + static_cast<std::ptrdiff_t>(cut), p2.end(),
                              child.begin() + static_cast<std::ptrdiff_t>(cut));
                }
                for (std::size_t c = 0; c < n; ++c)
                    if (all[c].levels > 1 && mutation > 0.0 && unit(rng) < mutation)
                    {
                        const auto shift = std::uniform_int_distribution<std::uint32_t>(1, all[c].levels - 1)(rng);
                        child[c] = (child[c] + shift) % all[c].levels;
                    }
                next_fit.push_back(problem.evaluate(child));
                next.push_back(std::move(child));
                ++evals;
            }
            pop = std::move(next);
            fit = std::move(next_fit);
            b = best_of();
            if (fit[b] > f_best)
            {
                f_best = fit[b];
                best = pop[b];
            }
            r.trace.push_back({evals, static_cast<double>(gen), f_best, true});
            if (children == 0)
                break;
        }
        OptResult out = finish(problem, "genetic", std::move(best), evals);
        out.trace = std::move(r.trace);
        return out;
    }

    // ---- alternating optimization ------------------------------------------------------

    OptResult alternating_optimization(const LinkProblem &problem, std::size_t rounds, std::optional<State> start)
    {
        if (rounds < 1)
            throw ConfigError("alternating_optimization: rounds must be >= 1");
        const auto &all = problem.coordinates();
        State cur = start ? *start : problem.zero_state();
        double f_cur = problem.evaluate(cur);
        std::uint64_t evals = 1;
        OptResult r;
        r.method = "alternating";
        r.trace.push_back({0, 0.0, f_cur, true});

        // one pass of single-coordinate best responses over the chosen layer
        auto sweep = [&](Layer layer)
        {
            bool changed = false;
            for (std::size_t c = 0; c < all.size(); ++c)
            {
                if (all[c].layer != layer)
                    continue;
                const std::uint32_t keep = cur[c];
                std::uint32_t best_level = keep;
                for (std::uint32_t l = 0; l < all[c].levels; ++l)
                {
                    if (l == keep)
                        continue;
                    cur[c] = l;
                    const double v = problem.evaluate(cur);
                    ++evals;
                    if (v > f_cur)
                    {
                        f_cur = v;
                        best_level = l;
                    }
                }
                cur[c] = best_level;
                changed = changed || best_level != keep;
            }
            return changed;
        };

        for (std::size_t round = 1; round <= rounds; ++round)
        {
            const bool em = sweep(Layer::em);
            r.trace.push_back({evals, static_cast<double>(round), f_cur, em});
            const bool an = sweep(Layer::analog);
            r.trace.push_back({evals, static_cast<double>(round), f_cur, an});
            if (!em && !an)
                break;
        }
        OptResult out = finish(problem, "alternating", std::move(cur), evals);
        out.trace = std::move(r.trace);
        return out;
    }

    State heuristic_start(const LinkProblem &problem, std::size_t beams)
    {
        if (beams < 1)
            throw ConfigError("heuristic_start: beams must be >= 1");
        std::vector<double> az;
        for (std::size_t b = 0; b < beams; ++b)
            az.push_back(-pi / 2 + pi * (static_cast<double>(b) + 0.5) / static_cast<double>(beams));
        const Codebook cb = steering_codebook(problem, az);
        State best = cb.entries.front();
        double f_best = problem.evaluate(best);
        for (std::size_t i = 1; i < cb.entries.size(); ++i)
            if (const double v = problem.evaluate(cb.entries[i]); v > f_best)
            {
                f_best = v;
                best = cb.entries[i];
            }

        const ArchitectureSpec &spec = problem.spec();
        if (!spec.has_phase_shifters())
            return best;
        State proj = best;
        const CMatrix h = problem.feed_channel(best);
        const Eigen::JacobiSVD<CMatrix> svd(h, Eigen::ComputeThinV);
        const CMatrix &v = svd.matrixV();
        for (std::size_t r = 0; r < spec.rf_chains; ++r)
            for (std::size_t f = 0; f < spec.feeds; ++f)
                if (const std::size_t c = problem.analog_coordinate(f, r); c != LinkProblem::npos)
                {
                    // chains beyond the channel rank reuse the dominant modes
                    const auto col = static_cast<Eigen::Index>(r % static_cast<std::size_t>(v.cols()));
                    proj[c] = static_cast<std::uint32_t>(
                        nearest_grid_index(std::arg(v(static_cast<Eigen::Index>(f), col)), spec.phase_bits));
                }
        if (problem.evaluate(proj) > f_best)
            return proj;
        return best;
    }

    // ---- random search -----------------------------------------------------------------

    OptResult random_search(const LinkProblem &problem, std::uint64_t budget, std::uint64_t seed)
    {
        if (budget < 1)
            throw ConfigError("random_search: budget must be >= 1");
        std::mt19937_64 rng(seed);
        OptResult r;
        State best;
        double f_best = -std::numeric_limits<double>::infinity();
        for (std::uint64_t i = 0; i < budget; ++i)
        {
            State s = problem.random_state(rng);
            const double v = problem.evaluate(s);
            r.trace.push_back({i, 0.0, v, v > f_best});
            if (v > f_best)
            {
                f_best = v;
                best = std::move(s);
            }
        }
        OptResult out = finish(problem, "random", std::move(best), budget);
        out.trace = std::move(r.trace);
        return out;
    }
}
