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

#include "trihybrid/em_layer.hpp"
#include "trihybrid/hash.hpp"

#include <algorithm>
#include <cmath>

namespace trihybrid
{
    double grid_phase(std::size_t index, unsigned bits)
    {
        const double levels = std::ldexp(1.0, static_cast<int>(bits));
        return two_pi * static_cast<double>(index) / levels;
    }

    std::size_t nearest_grid_index(double phase, unsigned bits)
    {
        const std::size_t levels = std::size_t{1} << bits;
        double wrapped = std::fmod(phase, two_pi);
        if (wrapped < 0.0)
            wrapped += two_pi;
        const auto k = static_cast<std::size_t>(std::llround(wrapped / two_pi * static_cast<double>(levels)));
        return k % levels;
    }

    double quantize_phase(double phase, unsigned bits)
    {
        return grid_phase(nearest_grid_index(phase, bits), bits);
    }

    cplx lorentzian_weight(double phi)
    {
        return (j_unit + std::polar(1.0, phi)) / 2.0;
    }

    // ---- DMA ----------------------------------------------------------------------

    void validate(const DmaConfig &cfg)
    {
        if (cfg.slots < 1)
            throw ConfigError("DmaConfig: slots_per_feed must be >= 1");
        if (!(cfg.leakage > 0.0 && cfg.leakage <= 1.0))
            throw ConfigError("DmaConfig: normalized_leakage must lie in (0, 1], got " + std::to_string(cfg.leakage));
        if (!std::isfinite(cfg.electrical_spacing))
            throw ConfigError("DmaConfig: electrical_spacing must be finite");
        if (!cfg.phase_states.empty() && cfg.phase_states.size() != cfg.slots)
            throw ConfigError("DmaConfig: phase_states has " + std::to_string(cfg.phase_states.size()) +
                              " entries for " + std::to_string(cfg.slots) + " slots");
        for (double phi : cfg.phase_states)
            if (!std::isfinite(phi))
                throw ConfigError("DmaConfig: phase_states must be finite");
        if (cfg.phase_bits > 16)
            throw ConfigError("DmaConfig: phase_bits must be <= 16");
    }

    std::vector<double> dma_power_fractions(const DmaConfig &cfg)
    {
        validate(cfg);
        const double a = cfg.leakage;
        std::vector<double> p(cfg.slots);
        double remaining = 1.0;
        for (std::size_t n = 0; n + 1 < cfg.slots; ++n)
        {
            p[n] = a * remaining;
            remaining *= (1.0 - a);
        }
        p[cfg.slots - 1] = cfg.termination == Termination::radiating ? remaining : a * remaining;
        return p;
    }

    CVector dma_slot_excitations(const DmaConfig &cfg)
    {
        const auto p = dma_power_fractions(cfg);
        CVector e(static_cast<Eigen::Index>(cfg.slots));
        for (std::size_t n = 0; n < cfg.slots; ++n)
            e(static_cast<Eigen::Index>(n)) =
                std::polar(std::sqrt(p[n]), -cfg.electrical_spacing * static_cast<double>(n));
        return e;
    }

    CVector dma_weights(const DmaConfig &cfg)
    {
        validate(cfg);
        CVector w(static_cast<Eigen::Index>(cfg.slots));
        for (std::size_t n = 0; n < cfg.slots; ++n)
        {
            double phi = cfg.phase_states.empty() ? 0.0 : cfg.phase_states[n];
            if (cfg.phase_bits > 0)
                phi = quantize_phase(phi, cfg.phase_bits);
            w(static_cast<Eigen::Index>(n)) = lorentzian_weight(phi);
        }
        return w;
    }

    cplx dma_transmission_coefficient(const DmaConfig &cfg)
    {
        const CVector w = dma_weights(cfg);
        const CVector e = dma_slot_excitations(cfg);
        cplx t = 0.0;
        for (Eigen::Index n = 0; n < w.size(); ++n)
            t += w(n) * e(n);
        return t;
    }

    cplx dma_directional_response(const DmaConfig &cfg, const ArrayGeometry &slots, const Direction &dir)
    {
        if (slots.size() != cfg.slots)
            throw ConfigError("dma_directional_response: geometry has " + std::to_string(slots.size()) +
                              " positions for " + std::to_string(cfg.slots) + " slots");
        const CVector w = dma_weights(cfg);
        const CVector e = dma_slot_excitations(cfg);
        const CVector a = steering_vector(slots, dir);
        cplx g = 0.0;
        for (Eigen::Index n = 0; n < w.size(); ++n)
            g += w(n) * e(n) * a(n);
        return g;
    }

    // ---- ESPAR --------------------------------------------------------------------

    void validate(const EsparConfig &cfg)
    {
        const Eigen::Index n = cfg.impedance.rows();
        if (n < 1 || cfg.impedance.cols() != n)
            throw ConfigError("EsparConfig: impedance must be a non-empty square matrix");
        if (!cfg.impedance.allFinite())
            throw ConfigError("EsparConfig: impedance has non-finite entries");
        if ((cfg.impedance - cfg.impedance.transpose()).cwiseAbs().maxCoeff() >
            1e-9 * (1.0 + cfg.impedance.cwiseAbs().maxCoeff()))
            throw ConfigError("EsparConfig: impedance must be symmetric (reciprocity)");
        const RMatrix re = cfg.impedance.real();
        Eigen::SelfAdjointEigenSolver<RMatrix> eig(0.5 * (re + re.transpose()));
        if (eig.eigenvalues().minCoeff() < -1e-9 * (1.0 + re.cwiseAbs().maxCoeff()))
            throw ConfigError("EsparConfig: Re(impedance) must be positive semidefinite (passive structure)");
        if (cfg.active >= static_cast<std::size_t>(n))
            throw ConfigError("EsparConfig: active element index out of range");
        if (cfg.reactances.size() != static_cast<std::size_t>(n) - 1)
            throw ConfigError("EsparConfig: expected " + std::to_string(n - 1) + " parasitic reactances, got " +
                              std::to_string(cfg.reactances.size()));
        for (double x : cfg.reactances)
            if (!std::isfinite(x))
                throw ConfigError("EsparConfig: reactances must be finite");
        if (!(cfg.loss_resistance >= 0.0) || !std::isfinite(cfg.loss_resistance))
            throw ConfigError("EsparConfig: loss_resistance must be >= 0");
    }

    CMatrix exponential_coupling_impedance(std::size_t elements, double r0, double x0, double rho)
    {
        const auto n = static_cast<Eigen::Index>(elements);
        CMatrix z(n, n);
        for (Eigen::Index m = 0; m < n; ++m)
            for (Eigen::Index k = 0; k < n; ++k)
                z(m, k) = cplx(r0, x0) * std::pow(rho, static_cast<double>(std::abs(m - k)));
        return z;
    }

    EsparSolution espar_currents(const EsparConfig &cfg)
    {
        validate(cfg);
        const Eigen::Index n = cfg.impedance.rows();
        CMatrix system = cfg.impedance;
        for (Eigen::Index k = 0, p = 0; k < n; ++k)
        {
            system(k, k) += cfg.loss_resistance;
            if (static_cast<std::size_t>(k) != cfg.active)
                system(k, k) += j_unit * cfg.reactances[static_cast<std::size_t>(p++)];
        }

        Eigen::FullPivLU<CMatrix> lu(system);
        lu.setThreshold(1e-12);
        if (lu.rank() < n)
        {
            std::string state = "[";
            for (std::size_t k = 0; k < cfg.reactances.size(); ++k)
                state += (k ? ", " : "") + std::to_string(cfg.reactances[k]);
            throw ModelError("espar_currents: Z + j diag(x) is singular for reactance state " + state + "] ohm");
        }

        CVector v = CVector::Zero(n);
        v(static_cast<Eigen::Index>(cfg.active)) = cfg.feed_voltage;

        EsparSolution out;
        out.currents = lu.solve(v);
        const cplx ia = out.currents(static_cast<Eigen::Index>(cfg.active));
        out.input_power = 0.5 * (std::conj(cfg.feed_voltage) * ia).real();
        const CVector ri = cfg.impedance.real().cast<cplx>() * out.currents;
        out.radiated_power = 0.5 * out.currents.dot(ri).real();
        return out;
    }

    cplx espar_directional_response(const EsparConfig &cfg, const ArrayGeometry &elements, const Direction &dir)
    {
        if (static_cast<Eigen::Index>(elements.size()) != cfg.impedance.rows())
            throw ConfigError("espar_directional_response: geometry size does not match impedance matrix");
        const EsparSolution sol = espar_currents(cfg);
        return sol.currents.transpose() * steering_vector(elements, dir);
    }

    // ---- switched pattern ---------------------------------------------------------

    namespace
    {
        // Locates x on a sorted axis: lower index and interpolation weight of the upper node.
        struct AxisHit
        {
            std::size_t lo = 0;
            double t = 0.0;
        };

        AxisHit locate(const std::vector<double> &axis, double x, bool interpolate, const char *name)
        {
            if (axis.size() == 1)
                return {0, 0.0};
            constexpr double tol = 1e-12;
            if (x < axis.front() - tol || x > axis.back() + tol)
                throw ModelError(std::string("pattern table: ") + name + " " + std::to_string(x) +
                                 " outside tabulated domain [" + std::to_string(axis.front()) + ", " +
                                 std::to_string(axis.back()) + "]");
            auto it = std::upper_bound(axis.begin(), axis.end(), x);
            std::size_t hi = std::min<std::size_t>(static_cast<std::size_t>(it - axis.begin()), axis.size() - 1);
            std::size_t lo = hi == 0 ? 0 : hi - 1;
            if (hi == lo)
                hi = lo + 1;
            const double span = axis[hi] - axis[lo];
            const double t = std::clamp((x - axis[lo]) / span, 0.0, 1.0);
            if (!interpolate)
            {
                if (std::abs(x - axis[lo]) <= tol)
                    return {lo, 0.0};
                if (std::abs(x - axis[hi]) <= tol)
                    return {lo, 1.0};
                throw ModelError(std::string("pattern table: ") + name + " " + std::to_string(x) +
                                 " is not a grid node and interpolation is disabled");
            }
            return {lo, t};
        }
    }

    cplx PatternTable::at(const Direction &dir, bool interpolate) const
    {
        const AxisHit az = locate(azimuths, dir.azimuth, interpolate, "azimuth");
        const AxisHit el = locate(elevations, dir.elevation, interpolate, "elevation");
        const auto r0 = static_cast<Eigen::Index>(el.lo);
        const auto c0 = static_cast<Eigen::Index>(az.lo);
        const Eigen::Index r1 = elevations.size() > 1 ? r0 + 1 : r0;
        const Eigen::Index c1 = azimuths.size() > 1 ? c0 + 1 : c0;
        const cplx top = (1.0 - az.t) * gains(r0, c0) + az.t * gains(r0, c1);
        const cplx bottom = (1.0 - az.t) * gains(r1, c0) + az.t * gains(r1, c1);
        return (1.0 - el.t) * top + el.t * bottom;
    }

    static void validate(const PatternTable &t, std::size_t k)
    {
        const auto sorted = [](const std::vector<double> &v)
        { return !v.empty() && std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end(); };
        if (!sorted(t.azimuths) || !sorted(t.elevations))
            throw ConfigError("pattern " + std::to_string(k) + ": grid axes must be non-empty and strictly ascending");
        if (t.gains.rows() != static_cast<Eigen::Index>(t.elevations.size()) ||
            t.gains.cols() != static_cast<Eigen::Index>(t.azimuths.size()))
            throw ConfigError("pattern " + std::to_string(k) + ": gain table does not match grid size");
        if (!t.gains.allFinite())
            throw ConfigError("pattern " + std::to_string(k) + ": non-finite gain");
    }

    void validate(const SwitchedPatternConfig &cfg)
    {
        if (cfg.library.empty())
            throw ConfigError("SwitchedPatternConfig: pattern library must hold at least one pattern");
        for (std::size_t k = 0; k < cfg.library.size(); ++k)
            validate(cfg.library[k], k);
        for (std::size_t s : cfg.selected)
            if (s >= cfg.library.size())
                throw ConfigError("SwitchedPatternConfig: selected index " + std::to_string(s) + " outside [0, " +
                                  std::to_string(cfg.library.size()) + ")");
        if (!(cfg.insertion_loss_db >= 0.0) || !std::isfinite(cfg.insertion_loss_db))
            throw ConfigError("SwitchedPatternConfig: insertion_loss must be >= 0 dB");
    }

    CVector switched_pattern_response(const SwitchedPatternConfig &cfg, const ArrayGeometry &elements,
                                      const Direction &dir)
    {
        validate(cfg);
        if (cfg.selected.size() != elements.size())
            throw ConfigError("switched_pattern_response: one selected index per element required");
        const double amp = std::sqrt(radiated_power_fraction(cfg));
        CVector g(static_cast<Eigen::Index>(elements.size()));
        for (std::size_t n = 0; n < elements.size(); ++n)
            g(static_cast<Eigen::Index>(n)) =
                cfg.library[cfg.selected[n]].at(dir, cfg.interpolate) * amp * spatial_phase(elements.position(n), dir);
        return g;
    }

    std::vector<PatternTable> gaussian_beam_library(std::size_t beams, double spread, double beamwidth)
    {
        if (beams == 0)
            throw ConfigError("gaussian_beam_library: need at least one beam");
        if (!(beamwidth > 0.0))
            throw ConfigError("gaussian_beam_library: beamwidth must be > 0");
        const std::size_t n_az = 361;
        std::vector<double> az(n_az);
        for (std::size_t i = 0; i < n_az; ++i)
            az[i] = -pi + two_pi * static_cast<double>(i) / static_cast<double>(n_az - 1);

        std::vector<PatternTable> lib;
        for (std::size_t k = 0; k < beams; ++k)
        {
            const double centre =
                beams == 1 ? 0.0 : -spread + 2.0 * spread * static_cast<double>(k) / static_cast<double>(beams - 1);
            RVector amp(static_cast<Eigen::Index>(n_az));
            for (std::size_t i = 0; i < n_az; ++i)
            {
                const double d = std::remainder(az[i] - centre, two_pi) / beamwidth;
                amp(static_cast<Eigen::Index>(i)) = std::exp(-0.5 * d * d);
            }
            // the end points coincide (-pi == pi), so average over the first n_az - 1 samples
            const double mean_power = amp.head(static_cast<Eigen::Index>(n_az - 1)).squaredNorm() /
                                      static_cast<double>(n_az - 1);
            amp /= std::sqrt(mean_power);

            PatternTable t;
            t.azimuths = az;
            t.elevations = {-pi / 2, pi / 2};
            t.gains.resize(2, static_cast<Eigen::Index>(n_az));
            t.gains.row(0) = amp.transpose().cast<cplx>();
            t.gains.row(1) = amp.transpose().cast<cplx>();
            lib.push_back(std::move(t));
        }
        return lib;
    }

    std::vector<PatternTable> pattern_library_from_json(const nlohmann::json &j)
    {
        if (!j.is_array() || j.empty())
            throw ConfigError("pattern library: expected a non-empty array of patterns");
        std::vector<PatternTable> lib;
        for (std::size_t k = 0; k < j.size(); ++k)
        {
            const auto &records = j[k];
            if (!records.is_array() || records.empty())
                throw ConfigError("pattern " + std::to_string(k) + ": expected a non-empty array of records");
            std::vector<double> az, el;
            for (const auto &r : records)
            {
                for (const char *key : {"az", "el", "gain_re", "gain_im"})
                    if (!r.contains(key) || !r[key].is_number())
                        throw ConfigError("pattern " + std::to_string(k) + ": record missing numeric '" + key + "'");
                az.push_back(r["az"].get<double>());
                el.push_back(r["el"].get<double>());
            }
            std::sort(az.begin(), az.end());
            az.erase(std::unique(az.begin(), az.end()), az.end());
            std::sort(el.begin(), el.end());
            el.erase(std::unique(el.begin(), el.end()), el.end());

            PatternTable t;
            t.azimuths = az;
            t.elevations = el;
            t.gains = CMatrix::Constant(static_cast<Eigen::Index>(el.size()), static_cast<Eigen::Index>(az.size()),
                                        cplx(std::nan(""), 0.0));
            for (const auto &r : records)
            {
                const auto c = std::lower_bound(az.begin(), az.end(), r["az"].get<double>()) - az.begin();
                const auto e = std::lower_bound(el.begin(), el.end(), r["el"].get<double>()) - el.begin();
                t.gains(e, c) = cplx(r["gain_re"].get<double>(), r["gain_im"].get<double>());
            }
            if (!t.gains.allFinite())
                throw ConfigError("pattern " + std::to_string(k) + ": records do not cover the full az x el grid");
            lib.push_back(std::move(t));
        }
        return lib;
    }

    nlohmann::json pattern_library_to_json(const std::vector<PatternTable> &library)
    {
        nlohmann::json out = nlohmann::json::array();
        for (const auto &t : library)
        {
            nlohmann::json records = nlohmann::json::array();
            for (std::size_t e = 0; e < t.elevations.size(); ++e)
                for (std::size_t a = 0; a < t.azimuths.size(); ++a)
                {
                    const cplx g = t.gains(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(a));
                    records.push_back(
                        {{"az", t.azimuths[a]}, {"el", t.elevations[e]}, {"gain_re", g.real()}, {"gain_im", g.imag()}});
                }
            out.push_back(std::move(records));
        }
        return out;
    }

    // ---- common -------------------------------------------------------------------

    namespace
    {
        struct EfficiencyVisitor
        {
            double operator()(const StaticElement &) const { return 1.0; }

            double operator()(const DmaConfig &cfg) const
            {
                const auto p = dma_power_fractions(cfg);
                const CVector w = dma_weights(cfg);
                double sum_p = 0.0, sum_wp = 0.0;
                for (std::size_t n = 0; n < p.size(); ++n)
                {
                    sum_p += p[n];
                    sum_wp += std::norm(w(static_cast<Eigen::Index>(n))) * p[n];
                }
                const double base = cfg.termination == Termination::radiating
                                        ? 1.0
                                        : 1.0 - std::pow(1.0 - cfg.leakage, static_cast<double>(cfg.slots));
                return std::clamp(base * sum_wp / sum_p, 0.0, 1.0);
            }

            double operator()(const EsparConfig &cfg) const
            {
                const EsparSolution sol = espar_currents(cfg);
                if (!(sol.input_power > 0.0))
                    throw ModelError("radiated_power_fraction: ESPAR input power is not positive");
                return std::clamp(sol.radiated_power / sol.input_power, 0.0, 1.0);
            }

            double operator()(const SwitchedPatternConfig &cfg) const
            {
                if (!(cfg.insertion_loss_db >= 0.0))
                    throw ConfigError("SwitchedPatternConfig: insertion_loss must be >= 0 dB");
                return std::pow(10.0, -cfg.insertion_loss_db / 10.0);
            }
        };

        struct HashVisitor
        {
            Fnv1a &h;
            void operator()(const StaticElement &) const { h.text("static"); }
            void operator()(const DmaConfig &c) const
            {
                h.text("dma").integer(c.slots).real(c.leakage).real(c.electrical_spacing);
                h.integer(c.termination == Termination::radiating ? 1 : 0).integer(c.phase_bits);
                for (double p : c.phase_states)
                    h.real(p);
            }
            void operator()(const EsparConfig &c) const
            {
                h.text("espar").integer(c.active).real(c.feed_voltage.real()).real(c.feed_voltage.imag());
                h.real(c.loss_resistance);
                for (Eigen::Index k = 0; k < c.impedance.size(); ++k)
                    h.real(c.impedance(k).real()).real(c.impedance(k).imag());
                for (double x : c.reactances)
                    h.real(x);
            }
            void operator()(const SwitchedPatternConfig &c) const
            {
                h.text("switched").real(c.insertion_loss_db).integer(c.interpolate ? 1 : 0);
                for (auto s : c.selected)
                    h.integer(s);
                for (const auto &t : c.library)
                {
                    for (double a : t.azimuths)
                        h.real(a);
                    for (double e : t.elevations)
                        h.real(e);
                    for (Eigen::Index k = 0; k < t.gains.size(); ++k)
                        h.real(t.gains(k).real()).real(t.gains(k).imag());
                }
            }
        };
    }

    double radiated_power_fraction(const EmConfig &cfg)
    {
        return std::visit(EfficiencyVisitor{}, cfg);
    }

    std::uint64_t em_config_hash(const EmConfig &cfg)
    {
        Fnv1a h;
        std::visit(HashVisitor{h}, cfg);
        return h.value();
    }

    EmResponse make_em_response(const EmConfig &cfg, const ArrayGeometry &geometry)
    {
        EmResponse out;
        out.efficiency = radiated_power_fraction(cfg);
        out.response = std::visit(
            [&geometry](const auto &c) -> DirectionalResponse
            {
                using T = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<T, StaticElement>)
                {
                    const Vec3 pos = geometry.position(0);
                    return [pos](const Direction &d) { return CVector::Constant(1, spatial_phase(pos, d)); };
                }
                else if constexpr (std::is_same_v<T, DmaConfig>)
                {
                    validate(c);
                    if (geometry.size() != c.slots)
                        throw ConfigError("make_em_response: DMA slot count does not match geometry");
                    const CVector we = dma_weights(c).cwiseProduct(dma_slot_excitations(c));
                    return [we, geometry](const Direction &d)
                    { return CVector::Constant(1, we.transpose() * steering_vector(geometry, d)); };
                }
                else if constexpr (std::is_same_v<T, EsparConfig>)
                {
                    if (static_cast<Eigen::Index>(geometry.size()) != c.impedance.rows())
                        throw ConfigError("make_em_response: ESPAR element count does not match geometry");
                    const CVector i = espar_currents(c).currents;
                    return [i, geometry](const Direction &d)
                    { return CVector::Constant(1, i.transpose() * steering_vector(geometry, d)); };
                }
                else
                {
                    validate(c);
                    return [c, geometry](const Direction &d) { return switched_pattern_response(c, geometry, d); };
                }
            },
            cfg);
        return out;
    }
}
