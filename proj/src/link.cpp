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

#include "trihybrid/link.hpp"
#include "trihybrid/hash.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace trihybrid
{
    std::string to_string(EmKind kind)
    {
        switch (kind)
        {
        case EmKind::none:
            return "static";
        case EmKind::dma:
            return "dma";
        case EmKind::espar:
            return "espar";
        case EmKind::switched_pattern:
            return "switched-pattern";
        }
        return "?";
    }

    static unsigned bits_for(std::size_t levels)
    {
        return levels <= 1 ? 0u : static_cast<unsigned>(std::bit_width(levels - 1));
    }

    unsigned EmLayerModel::control_bits() const
    {
        switch (kind)
        {
        case EmKind::dma:
            return dma.phase_bits;
        case EmKind::espar:
            return bits_for(espar.reactance_levels.size());
        case EmKind::switched_pattern:
            return bits_for(switched.library.size());
        case EmKind::none:
            break;
        }
        return 0;
    }

    static std::size_t largest_divisor_at_most(std::size_t n, std::size_t cap)
    {
        for (std::size_t d = std::min(n, cap); d > 1; --d)
            if (n % d == 0)
                return d;
        return 1;
    }

    TransmitterLayout make_layout(const ArchitectureTemplate &arch, std::size_t aperture, double spacing,
                                  std::size_t rx_elements, const EmLayerModel &em)
    {
        if (aperture < 1)
            throw ConfigError("architecture '" + arch.name + "': aperture must be >= 1 element");
        if (rx_elements < 1)
            throw ConfigError("architecture '" + arch.name + "': receiver needs >= 1 element");
        if (arch.rf_chains < 1 || arch.streams < 1)
            throw ConfigError("architecture '" + arch.name + "': rf_chains and streams must be >= 1");

        TransmitterLayout out;
        out.name = arch.name;
        out.elements = ArrayGeometry::uniform_linear(aperture, spacing);
        ArchitectureSpec &s = out.spec;
        s.kind = arch.kind;
        s.connectivity = arch.connectivity;
        s.analog = arch.analog;
        s.phase_bits = arch.phase_bits;

        switch (arch.kind)
        {
        case ArchitectureKind::digital:
            s.feeds = s.rf_chains = aperture;
            out.elements_per_feed = 1;
            break;
        case ArchitectureKind::hybrid:
            s.feeds = aperture;
            s.rf_chains = std::min(arch.rf_chains, aperture);
            if (s.analog == AnalogMode::pass_through)
                s.rf_chains = s.feeds;
            else if (s.connectivity == Connectivity::subarray)
                s.rf_chains = largest_divisor_at_most(s.feeds, s.rf_chains);
            out.elements_per_feed = 1;
            break;
        case ArchitectureKind::tri_hybrid:
        {
            out.em = em;
            out.em.kind = arch.em;
            std::size_t per_feed = 1;
            if (arch.feeds > 0)
            {
                if (aperture % arch.feeds != 0)
                    throw ConfigError("architecture '" + arch.name + "': aperture " + std::to_string(aperture) +
                                      " not divisible by " + std::to_string(arch.feeds) + " feeds");
                per_feed = aperture / arch.feeds;
            }
            else if (arch.elements_per_feed > 0)
                per_feed = arch.elements_per_feed;
            else if (arch.em == EmKind::dma)
                per_feed = em.dma.slots;
            else if (arch.em == EmKind::espar)
                per_feed = em.espar.impedance ? static_cast<std::size_t>(em.espar.impedance->rows()) : em.espar.elements;

            if (arch.em == EmKind::switched_pattern && per_feed != 1)
                throw ConfigError("architecture '" + arch.name + "': switched-pattern antennas have one element per feed");
            if (arch.em == EmKind::dma || arch.em == EmKind::none)
                per_feed = std::min(per_feed, aperture);
            if (aperture % per_feed != 0)
                throw ConfigError("architecture '" + arch.name + "': aperture " + std::to_string(aperture) +
                                  " not divisible by " + std::to_string(per_feed) + " elements per feed");
            if (arch.em == EmKind::espar)
            {
                if (em.espar.impedance && static_cast<std::size_t>(em.espar.impedance->rows()) != per_feed)
                    throw ConfigError("architecture '" + arch.name + "': ESPAR impedance matrix size differs from "
                                      "elements per feed");
                if (em.espar.active >= per_feed)
                    throw ConfigError("architecture '" + arch.name + "': ESPAR active index out of range");
            }

            out.elements_per_feed = per_feed;
            out.em.dma.slots = per_feed;
            out.em.espar.elements = per_feed;
            s.feeds = aperture / per_feed;
            if (s.analog == AnalogMode::pass_through)
                s.rf_chains = s.feeds;
            else
            {
                s.rf_chains = std::min(arch.rf_chains, s.feeds);
                if (s.connectivity == Connectivity::subarray)
                    s.rf_chains = largest_divisor_at_most(s.feeds, s.rf_chains);
            }

            switch (arch.em)
            {
            case EmKind::dma:
                s.em.tunable_elements = aperture;
                break;
            case EmKind::espar:
                s.em.tunable_elements = s.feeds * (per_feed - 1);
                break;
            case EmKind::switched_pattern:
                s.em.tunable_elements = s.feeds;
                s.em.switched_elements = s.feeds;
                break;
            case EmKind::none:
                break;
            }
            s.em.control_bits = out.em.control_bits();
            break;
        }
        }
        s.streams = std::min({arch.streams, s.rf_chains, rx_elements});
        validate(s);
        return out;
    }

    // ---- LinkProblem --------------------------------------------------------------

    LinkProblem::LinkProblem(TransmitterLayout layout, const PathSet &paths, const ArrayGeometry &rx,
                             LinkParameters params)
        : layout_(std::move(layout)), params_(std::move(params))
    {
        const ArchitectureSpec &s = layout_.spec;
        validate(s);
        validate(params_.catalog);
        if (!(params_.tx_power > 0.0) || !(params_.noise_power > 0.0) || !(params_.bandwidth_hz > 0.0))
            throw ConfigError("link: tx_power, noise_power and bandwidth must be > 0");
        const EmKind kind = s.kind == ArchitectureKind::tri_hybrid ? layout_.em.kind : EmKind::none;
        const std::size_t per_feed = layout_.elements_per_feed;
        if (s.feeds * per_feed != layout_.elements.size())
            throw ConfigError("link: feeds x elements_per_feed does not match the aperture");
        if (s.has_phase_shifters() && s.phase_bits < 1)
            throw ConfigError("link: analog phase shifters need phase_bits >= 1 for discrete configuration");

        // ports: one per radiating element, or K virtual ports per switched-pattern element
        struct Port
        {
            Vec3 position;
            const PatternTable *pattern;
        };
        std::vector<Port> ports;
        for (std::size_t f = 0; f < s.feeds; ++f)
        {
            port_begin_.push_back(ports.size());
            if (kind == EmKind::switched_pattern)
            {
                validate(SwitchedPatternConfig{layout_.em.switched.library, {}, layout_.em.switched.insertion_loss_db,
                                               layout_.em.switched.interpolate});
                for (const auto &p : layout_.em.switched.library)
                    ports.push_back({layout_.elements.position(f), &p});
            }
            else
                for (std::size_t n = 0; n < per_feed; ++n)
                    ports.push_back({layout_.elements.position(f * per_feed + n), nullptr});
            port_count_.push_back(ports.size() - port_begin_.back());
        }

        const bool interp = layout_.em.switched.interpolate;
        port_channel_ = assemble_effective_channel(paths, rx,
                                                   [&ports, interp](const Direction &d)
                                                   {
                                                       CVector g(static_cast<Eigen::Index>(ports.size()));
                                                       for (std::size_t p = 0; p < ports.size(); ++p)
                                                       {
                                                           cplx v = spatial_phase(ports[p].position, d);
                                                           if (ports[p].pattern)
                                                               v *= ports[p].pattern->at(d, interp);
                                                           g(static_cast<Eigen::Index>(p)) = v;
                                                       }
                                                       return g;
                                                   })
                            .matrix;

        // coordinates: analog entries chain-major, then EM states feed-major
        analog_index_.assign(s.feeds * s.rf_chains, npos);
        if (s.has_phase_shifters())
        {
            const auto levels = static_cast<std::uint32_t>(1u << s.phase_bits);
            for (std::size_t r = 0; r < s.rf_chains; ++r)
                for (std::size_t f = 0; f < s.feeds; ++f)
                    if (s.on_support(f, r))
                    {
                        analog_index_[f * s.rf_chains + r] = coords_.size();
                        coords_.push_back({Layer::analog, f, r, levels, true});
                    }
        }

        em_coords_.assign(s.feeds, {});
        if (kind == EmKind::dma)
        {
            DmaConfig dma = layout_.em.dma;
            dma.slots = per_feed;
            dma.phase_states.clear();
            validate(dma);
            if (dma.phase_bits < 1)
                throw ConfigError("link: DMA needs phase_bits >= 1 for discrete configuration");
            dma_excitation_ = dma_slot_excitations(dma);
            const std::size_t levels = std::size_t{1} << dma.phase_bits;
            for (std::size_t k = 0; k < levels; ++k)
                dma_level_weights_.push_back(lorentzian_weight(grid_phase(k, dma.phase_bits)));
            for (std::size_t f = 0; f < s.feeds; ++f)
                for (std::size_t n = 0; n < per_feed; ++n)
                {
                    em_coords_[f].push_back(coords_.size());
                    coords_.push_back({Layer::em, f, n, static_cast<std::uint32_t>(levels), true});
                }
        }
        else if (kind == EmKind::espar)
        {
            const EsparTemplate &t = layout_.em.espar;
            espar_impedance_ = t.impedance ? *t.impedance : exponential_coupling_impedance(per_feed);
            if (t.reactance_levels.empty())
                throw ConfigError("link: ESPAR needs at least one reactance level");
            // validates Z, active index and loss
            validate(EsparConfig{espar_impedance_, t.active, std::vector<double>(per_feed - 1, t.reactance_levels[0]),
                                 1.0, t.loss_resistance});
            for (std::size_t f = 0; f < s.feeds; ++f)
                for (std::size_t n = 0; n + 1 < per_feed; ++n)
                {
                    em_coords_[f].push_back(coords_.size());
                    coords_.push_back(
                        {Layer::em, f, n, static_cast<std::uint32_t>(t.reactance_levels.size()), false});
                }
        }
        else if (kind == EmKind::switched_pattern)
        {
            for (std::size_t f = 0; f < s.feeds; ++f)
            {
                em_coords_[f].push_back(coords_.size());
                coords_.push_back(
                    {Layer::em, f, 0, static_cast<std::uint32_t>(layout_.em.switched.library.size()), true});
            }
        }

        power_ = power_total(s, params_.catalog);
        power_.architecture = layout_.name;
    }

    std::uint64_t LinkProblem::state_count() const
    {
        std::uint64_t n = 1;
        for (const auto &c : coords_)
        {
            if (n > std::numeric_limits<std::uint64_t>::max() / c.levels)
                return std::numeric_limits<std::uint64_t>::max();
            n *= c.levels;
        }
        return n;
    }

    State LinkProblem::random_state(std::mt19937_64 &rng) const
    {
        State s(coords_.size());
        for (std::size_t i = 0; i < coords_.size(); ++i)
            s[i] = static_cast<std::uint32_t>(std::uniform_int_distribution<std::uint32_t>(0, coords_[i].levels - 1)(rng));
        return s;
    }

    std::vector<std::uint32_t> LinkProblem::em_levels_of(std::size_t feed, const State &state) const
    {
        std::vector<std::uint32_t> levels;
        levels.reserve(em_coords_[feed].size());
        for (std::size_t c : em_coords_[feed])
            levels.push_back(state[c]);
        return levels;
    }

    std::size_t LinkProblem::analog_coordinate(std::size_t feed, std::size_t chain) const
    {
        return analog_index_.at(feed * layout_.spec.rf_chains + chain);
    }

    CVector LinkProblem::feed_weights(std::size_t feed, std::span<const std::uint32_t> em_levels) const
    {
        const ArchitectureSpec &s = layout_.spec;
        const EmKind kind = s.kind == ArchitectureKind::tri_hybrid ? layout_.em.kind : EmKind::none;
        const auto count = static_cast<Eigen::Index>(port_count_.at(feed));
        if (em_levels.size() != em_coords_.at(feed).size())
            throw std::logic_error("feed_weights: wrong number of EM levels for feed " + std::to_string(feed));

        switch (kind)
        {
        case EmKind::none:
            return CVector::Ones(count);
        case EmKind::dma:
        {
            CVector c(count);
            for (Eigen::Index n = 0; n < count; ++n)
                c(n) = dma_level_weights_.at(em_levels[static_cast<std::size_t>(n)]) * dma_excitation_(n);
            return c;
        }
        case EmKind::espar:
        {
            const EsparTemplate &t = layout_.em.espar;
            EsparConfig cfg{espar_impedance_, t.active, {}, cplx(1.0, 0.0), t.loss_resistance};
            for (auto l : em_levels)
                cfg.reactances.push_back(t.reactance_levels.at(l));
            const EsparSolution sol = espar_currents(cfg);
            if (!(sol.input_power > 0.0))
                throw ModelError("link: ESPAR input power is not positive");
            const auto a = static_cast<Eigen::Index>(t.active);
            // unit input power; an isolated lossless element becomes the unit isotropic response
            return sol.currents * std::sqrt(espar_impedance_(a, a).real() / (2.0 * sol.input_power));
        }
        case EmKind::switched_pattern:
        {
            CVector c = CVector::Zero(count);
            c(static_cast<Eigen::Index>(em_levels[0])) =
                std::sqrt(std::pow(10.0, -layout_.em.switched.insertion_loss_db / 10.0));
            return c;
        }
        }
        return {};
    }

    CVector LinkProblem::port_response(std::size_t feed, const Direction &dir) const
    {
        const bool switched =
            layout_.spec.kind == ArchitectureKind::tri_hybrid && layout_.em.kind == EmKind::switched_pattern;
        const auto count = static_cast<Eigen::Index>(port_count_.at(feed));
        CVector g(count);
        for (Eigen::Index p = 0; p < count; ++p)
        {
            if (switched)
                g(p) = spatial_phase(layout_.elements.position(feed), dir) *
                       layout_.em.switched.library[static_cast<std::size_t>(p)].at(dir, layout_.em.switched.interpolate);
            else
                g(p) = spatial_phase(
                    layout_.elements.position(feed * layout_.elements_per_feed + static_cast<std::size_t>(p)), dir);
        }
        return g;
    }

    CVector LinkProblem::feed_column(std::size_t feed, std::span<const std::uint32_t> em_levels) const
    {
        const CVector c = feed_weights(feed, em_levels);
        return port_channel_.middleCols(static_cast<Eigen::Index>(port_begin_[feed]), c.size()) * c;
    }

    CMatrix LinkProblem::feed_channel(const State &state) const
    {
        const auto n_feed = static_cast<Eigen::Index>(layout_.spec.feeds);
        if (layout_.spec.kind != ArchitectureKind::tri_hybrid)
            return port_channel_;
        CMatrix h(port_channel_.rows(), n_feed);
        for (Eigen::Index f = 0; f < n_feed; ++f)
        {
            const auto levels = em_levels_of(static_cast<std::size_t>(f), state);
            h.col(f) = feed_column(static_cast<std::size_t>(f), levels);
        }
        return h;
    }

    CMatrix LinkProblem::analog_matrix(const State &state) const
    {
        const ArchitectureSpec &s = layout_.spec;
        const auto n_f = static_cast<Eigen::Index>(s.feeds);
        const auto n_r = static_cast<Eigen::Index>(s.rf_chains);
        if (!s.has_phase_shifters())
            return CMatrix::Identity(n_f, n_r);
        CMatrix fa = CMatrix::Zero(n_f, n_r);
        for (std::size_t i = 0; i < coords_.size(); ++i)
        {
            const Coordinate &c = coords_[i];
            if (c.layer == Layer::analog)
                fa(static_cast<Eigen::Index>(c.feed), static_cast<Eigen::Index>(c.index)) =
                    std::polar(1.0, grid_phase(state[i], s.phase_bits));
        }
        return fa;
    }

    void LinkProblem::check_feasible(const State &state) const
    {
        if (state.size() != coords_.size())
            throw std::logic_error("infeasible configuration: state has " + std::to_string(state.size()) +
                                   " coordinates, expected " + std::to_string(coords_.size()));
        for (std::size_t i = 0; i < coords_.size(); ++i)
            if (state[i] >= coords_[i].levels)
                throw std::logic_error("infeasible configuration: coordinate " + std::to_string(i) + " level " +
                                       std::to_string(state[i]) + " >= " + std::to_string(coords_[i].levels));
        if (layout_.spec.has_phase_shifters())
        {
            try
            {
                check_analog_constraints(layout_.spec, analog_matrix(state));
            }
            catch (const ConfigError &e)
            {
                throw std::logic_error(std::string("infeasible configuration: ") + e.what());
            }
        }
        for (std::size_t i = 0; i < coords_.size(); ++i)
            if (coords_[i].layer == Layer::em && !dma_level_weights_.empty())
            {
                const cplx w = dma_level_weights_[state[i]];
                if (std::abs(std::abs(w - j_unit / 2.0) - 0.5) > 1e-12)
                    throw std::logic_error("infeasible configuration: DMA weight off the Lorentzian circle");
            }
    }

    double waterfilled_rate(std::vector<double> squared_gains, std::size_t streams, double power, double noise)
    {
        std::sort(squared_gains.begin(), squared_gains.end(), std::greater<>());
        const double top = squared_gains.empty() ? 0.0 : squared_gains.front();
        std::vector<double> gains;
        for (std::size_t k = 0; k < std::min(streams, squared_gains.size()); ++k)
            if (squared_gains[k] > 1e-28 * std::max(1.0, top))
                gains.push_back(std::sqrt(squared_gains[k]));
        if (gains.empty())
            return 0.0;
        const PowerAllocation alloc = waterfilling(gains, power, noise);
        double rate = 0.0;
        for (std::size_t k = 0; k < gains.size(); ++k)
            rate += std::log2(1.0 + alloc.powers[k] * gains[k] * gains[k] / noise);
        return rate;
    }

    static std::vector<double> squared_singular_values(const CMatrix &m)
    {
        const CMatrix gram = m.rows() <= m.cols() ? CMatrix(m * m.adjoint()) : CMatrix(m.adjoint() * m);
        const Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
        const RVector ev = eig.eigenvalues();
        std::vector<double> out(ev.data(), ev.data() + ev.size());
        for (auto &v : out)
            v = std::max(0.0, v);
        return out;
    }

    double LinkProblem::capacity(const CMatrix &g, const CMatrix &k) const
    {
        const ArchitectureSpec &s = layout_.spec;
        if (k.size() == 0)
            return waterfilled_rate(squared_singular_values(g), s.streams, params_.tx_power, params_.noise_power);

        const Eigen::SelfAdjointEigenSolver<CMatrix> eig(k);
        const RVector lam = eig.eigenvalues();
        const double lmax = lam.maxCoeff();
        Eigen::Index kept = 0;
        for (Eigen::Index i = 0; i < lam.size(); ++i)
            kept += lam(i) > 1e-10 * lmax ? 1 : 0;
        if (kept == 0)
            return 0.0;
        CMatrix whiten(k.rows(), kept);
        for (Eigen::Index i = lam.size() - kept, c = 0; i < lam.size(); ++i, ++c)
            whiten.col(c) = eig.eigenvectors().col(i) / std::sqrt(lam(i));
        return waterfilled_rate(squared_singular_values(g * whiten), s.streams, params_.tx_power,
                                params_.noise_power);
    }

    double LinkProblem::spectral_efficiency(const State &state) const
    {
        check_feasible(state);
        const CMatrix h = feed_channel(state);
        if (!layout_.spec.has_phase_shifters())
            return capacity(h, CMatrix());
        const CMatrix fa = analog_matrix(state);
        return capacity(h * fa, fa.adjoint() * fa);
    }

    double LinkProblem::objective_from_se(double se) const
    {
        if (params_.objective == Objective::energy_efficiency)
            return energy_efficiency(se, params_.bandwidth_hz, power_);
        return se;
    }

    double LinkProblem::evaluate(const State &state) const
    {
        return objective_from_se(spectral_efficiency(state));
    }

    LinkConfiguration LinkProblem::realize(const State &state) const
    {
        check_feasible(state);
        const ArchitectureSpec &s = layout_.spec;
        const EmKind kind = s.kind == ArchitectureKind::tri_hybrid ? layout_.em.kind : EmKind::none;

        LinkConfiguration out;
        out.state = state;
        out.feed_channel = feed_channel(state);
        for (std::size_t f = 0; f < s.feeds; ++f)
        {
            const auto levels = em_levels_of(f, state);
            out.em_weights.push_back(feed_weights(f, levels));
            EmConfig cfg = StaticElement{};
            if (kind == EmKind::dma)
            {
                DmaConfig d = layout_.em.dma;
                d.slots = layout_.elements_per_feed;
                d.phase_states.clear();
                for (auto l : levels)
                    d.phase_states.push_back(grid_phase(l, d.phase_bits));
                cfg = d;
            }
            else if (kind == EmKind::espar)
            {
                const EsparTemplate &t = layout_.em.espar;
                EsparConfig e{espar_impedance_, t.active, {}, cplx(1.0, 0.0), t.loss_resistance};
                for (auto l : levels)
                    e.reactances.push_back(t.reactance_levels[l]);
                cfg = e;
            }
            else if (kind == EmKind::switched_pattern)
                cfg = SwitchedPatternConfig{{}, {}, layout_.em.switched.insertion_loss_db, true};
            out.feed_efficiency.push_back(radiated_power_fraction(cfg));
        }

        const CMatrix fa = s.has_phase_shifters() ? analog_matrix(state) : CMatrix();
        const DigitalSolution dig =
            optimal_digital_precoder(out.feed_channel, fa, s.streams, params_.tx_power, params_.noise_power);
        out.stack.digital = dig.digital;
        if (s.kind != ArchitectureKind::digital)
            out.stack.analog = analog_matrix(state);
        out.precoder = compose_stack(s, out.stack);
        out.spectral_efficiency =
            trihybrid::spectral_efficiency(out.feed_channel, out.precoder, params_.noise_power, params_.tx_power, 1.0);
        out.power = power_;
        out.energy_efficiency = energy_efficiency(out.spectral_efficiency, params_.bandwidth_hz, power_);
        return out;
    }
}
