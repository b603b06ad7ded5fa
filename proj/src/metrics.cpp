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

#include "trihybrid/metrics.hpp"

#include <cmath>

namespace trihybrid
{
    double spectral_efficiency(const CMatrix &channel, const CMatrix &precoder, double noise, double power,
                               double efficiency)
    {
        if (!channel.allFinite())
            throw ModelError("spectral_efficiency: non-finite channel entries");
        if (!precoder.allFinite())
            throw ModelError("spectral_efficiency: non-finite precoder entries");
        if (channel.cols() != precoder.rows())
            throw ConfigError("spectral_efficiency: channel has " + std::to_string(channel.cols()) +
                              " columns, precoder has " + std::to_string(precoder.rows()) + " rows");
        if (!(noise > 0.0))
            throw ConfigError("spectral_efficiency: noise must be > 0");
        if (!(power >= 0.0))
            throw ConfigError("spectral_efficiency: power must be >= 0");
        if (!(efficiency >= 0.0 && efficiency <= 1.0))
            throw ConfigError("spectral_efficiency: efficiency must lie in [0, 1]");
        if (precoder.cols() == 0)
            return 0.0;

        const double rho = efficiency * power / (static_cast<double>(precoder.cols()) * noise);
        const CMatrix a = channel * precoder;
        // det(I + rho A A^H) = det(I + rho A^H A); factor the smaller side
        CMatrix m = a.rows() <= a.cols() ? CMatrix(a * a.adjoint()) : CMatrix(a.adjoint() * a);
        m *= rho;
        m.diagonal().array() += 1.0;
        const Eigen::LLT<CMatrix> llt(m);
        if (llt.info() != Eigen::Success)
            throw ModelError("spectral_efficiency: I + rho A A^H is not positive definite");
        double logdet = 0.0;
        for (Eigen::Index k = 0; k < m.rows(); ++k)
            logdet += std::log(llt.matrixL()(k, k).real());
        return std::max(0.0, 2.0 * logdet / std::log(2.0));
    }

    void validate(const PowerCatalog &c)
    {
        const std::pair<const char *, double> entries[] = {
            {"common", c.common},
            {"local_oscillator", c.local_oscillator},
            {"rf_chain", c.rf_chain},
            {"dac", c.dac},
            {"phase_shifter", c.phase_shifter},
            {"power_amplifier", c.power_amplifier},
            {"switch_element", c.switch_element},
            {"em_control_per_bit", c.em_control_per_bit},
        };
        for (const auto &[name, v] : entries)
            if (!(v >= 0.0) || !std::isfinite(v))
                throw ConfigError(std::string("power catalog: ") + name + " must be a finite value >= 0");
    }

    double PowerBreakdown::term(const std::string &name) const
    {
        for (const auto &[k, v] : terms)
            if (k == name)
                return v;
        return 0.0;
    }

    PowerBreakdown power_total(const ArchitectureSpec &spec, const PowerCatalog &catalog)
    {
        validate(spec);
        validate(catalog);
        const auto n_rf = static_cast<double>(spec.rf_chains);
        const auto n_feed = static_cast<double>(spec.feeds);

        PowerBreakdown out;
        out.architecture = to_string(spec.kind);
        out.terms = {
            {"common", catalog.common},
            {"local_oscillator", catalog.local_oscillator},
            {"rf_chains", n_rf * catalog.rf_chain},
            {"dacs", 2.0 * n_rf * catalog.dac},
            {"power_amplifiers", n_feed * catalog.power_amplifier},
            {"phase_shifters", static_cast<double>(spec.phase_shifter_count()) * catalog.phase_shifter},
            {"em_control", 0.0},
            {"switches", 0.0},
        };
        if (spec.kind == ArchitectureKind::tri_hybrid)
        {
            out.terms[6].second = static_cast<double>(spec.em.tunable_elements) *
                                  static_cast<double>(spec.em.control_bits) * catalog.em_control_per_bit;
            out.terms[7].second = static_cast<double>(spec.em.switched_elements) * catalog.switch_element;
        }
        for (const auto &[_, v] : out.terms)
            out.total += v;
        return out;
    }

    double energy_efficiency(double se, double bandwidth_hz, const PowerBreakdown &breakdown)
    {
        if (!(breakdown.total > 0.0))
            throw ConfigError("energy_efficiency: consumed power must be > 0");
        if (!(bandwidth_hz > 0.0))
            throw ConfigError("energy_efficiency: bandwidth must be > 0");
        return se * bandwidth_hz / breakdown.total;
    }
}
