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

#include "trihybrid/precoder.hpp"
#include "trihybrid/em_layer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace trihybrid
{
    std::string to_string(ArchitectureKind kind)
    {
        switch (kind)
        {
        case ArchitectureKind::digital:
            return "digital";
        case ArchitectureKind::hybrid:
            return "hybrid";
        case ArchitectureKind::tri_hybrid:
            return "tri-hybrid";
        }
        return "?";
    }

    std::string to_string(Connectivity c)
    {
        return c == Connectivity::fully_connected ? "fully-connected" : "subarray";
    }

    std::string to_string(AnalogMode m)
    {
        return m == AnalogMode::phase_shifters ? "phase-shifters" : "pass-through";
    }

    std::size_t ArchitectureSpec::phase_shifter_count() const
    {
        if (!has_phase_shifters())
            return 0;
        return connectivity == Connectivity::fully_connected ? rf_chains * feeds : feeds;
    }

    bool ArchitectureSpec::on_support(std::size_t feed, std::size_t chain) const
    {
        if (!has_phase_shifters())
            return feed == chain;
        if (connectivity == Connectivity::fully_connected)
            return true;
        return feed / (feeds / rf_chains) == chain;
    }

    void validate(const ArchitectureSpec &spec)
    {
        if (spec.streams < 1 || spec.rf_chains < 1 || spec.feeds < 1)
            throw ConfigError("architecture: streams, rf_chains and feeds must be >= 1");
        if (spec.streams > spec.rf_chains || spec.rf_chains > spec.feeds)
            throw ConfigError("architecture: need streams <= rf_chains <= feeds, got " + std::to_string(spec.streams) +
                              ", " + std::to_string(spec.rf_chains) + ", " + std::to_string(spec.feeds));
        if (spec.kind == ArchitectureKind::digital && spec.rf_chains != spec.feeds)
            throw ConfigError("architecture: digital requires rf_chains == feeds");
        if (spec.kind != ArchitectureKind::digital && spec.analog == AnalogMode::pass_through &&
            spec.rf_chains != spec.feeds)
            throw ConfigError("architecture: pass-through analog layer requires rf_chains == feeds");
        if (spec.has_phase_shifters() && spec.connectivity == Connectivity::subarray &&
            spec.feeds % spec.rf_chains != 0)
            throw ConfigError("architecture: subarray connectivity needs feeds divisible by rf_chains");
        if (spec.phase_bits > 16)
            throw ConfigError("architecture: phase_bits must be <= 16");
    }

    CMatrix quantize_phases(const CMatrix &analog, unsigned bits)
    {
        if (bits < 1)
            throw ConfigError("quantize_phases: bits must be >= 1");
        CMatrix out = analog;
        for (Eigen::Index k = 0; k < out.size(); ++k)
        {
            const cplx z = out(k);
            if (z == cplx(0.0, 0.0))
                continue;
            out(k) = std::polar(1.0, grid_phase(nearest_grid_index(std::arg(z), bits), bits));
        }
        return out;
    }

    PowerAllocation waterfilling(std::span<const double> gains, double total_power, double noise)
    {
        if (gains.empty())
            throw ConfigError("waterfilling: empty gain list");
        if (!(total_power > 0.0) || !(noise > 0.0))
            throw ConfigError("waterfilling: total power and noise must be > 0");
        for (double g : gains)
            if (!(g > 0.0) || !std::isfinite(g))
                throw ConfigError("waterfilling: gains must be positive and finite");

        // floor_k = N0 / sigma_k^2, activate modes from the lowest floor upwards
        std::vector<double> floor(gains.size());
        for (std::size_t k = 0; k < gains.size(); ++k)
            floor[k] = noise / (gains[k] * gains[k]);
        std::vector<std::size_t> order(gains.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return floor[a] < floor[b]; });

        double mu = 0.0;
        double acc = 0.0;
        for (std::size_t m = 1; m <= order.size(); ++m)
        {
            acc += floor[order[m - 1]];
            const double level = (total_power + acc) / static_cast<double>(m);
            if (m == order.size() || level <= floor[order[m]])
            {
                mu = level;
                break;
            }
        }

        PowerAllocation out;
        out.water_level = mu;
        out.powers.resize(gains.size());
        for (std::size_t k = 0; k < gains.size(); ++k)
            out.powers[k] = std::max(0.0, mu - floor[k]);
        return out;
    }

    double waterfilling_kkt_residual(std::span<const double> gains, double total_power, double noise,
                                     const PowerAllocation &alloc)
    {
        double sum = 0.0;
        double worst = 0.0;
        for (std::size_t k = 0; k < gains.size(); ++k)
        {
            const double p = alloc.powers.at(k);
            const double floor = noise / (gains[k] * gains[k]);
            sum += p;
            worst = std::max(worst, std::max(0.0, -p));
            if (p > 0.0)
                worst = std::max(worst, std::abs(alloc.water_level - floor - p)); // stationarity on active modes
            else
                worst = std::max(worst, std::max(0.0, alloc.water_level - floor)); // inactive modes lie above the water
        }
        return std::max(worst, std::abs(sum - total_power));
    }

    void check_analog_constraints(const ArchitectureSpec &spec, const CMatrix &analog)
    {
        const auto n_f = static_cast<Eigen::Index>(spec.feeds);
        const auto n_r = static_cast<Eigen::Index>(spec.rf_chains);
        if (analog.rows() != n_f || analog.cols() != n_r)
            throw ConfigError("analog precoder must be " + std::to_string(n_f) + " x " + std::to_string(n_r));

        constexpr double tol = 1e-9;
        for (Eigen::Index f = 0; f < n_f; ++f)
            for (Eigen::Index r = 0; r < n_r; ++r)
            {
                const cplx z = analog(f, r);
                const auto where = "(" + std::to_string(f) + ", " + std::to_string(r) + ")";
                if (!spec.on_support(static_cast<std::size_t>(f), static_cast<std::size_t>(r)))
                {
                    if (z != cplx(0.0, 0.0))
                        throw ConfigError("connectivity violation: nonzero analog entry " + where +
                                          " outside the " + to_string(spec.connectivity) + " support");
                    continue;
                }
                if (!spec.has_phase_shifters())
                {
                    if (std::abs(z - cplx(1.0, 0.0)) > tol)
                        throw ConfigError("analog entry " + where + " must be 1 without phase shifters");
                    continue;
                }
                if (std::abs(std::abs(z) - 1.0) > tol)
                    throw ConfigError("analog entry " + where + " is not unit modulus");
                if (spec.phase_bits > 0)
                {
                    const double q = quantize_phase(std::arg(z), spec.phase_bits);
                    if (std::abs(std::polar(1.0, q) - z) > tol)
                        throw ConfigError("analog entry " + where + " is off the " +
                                          std::to_string(spec.phase_bits) + "-bit phase grid");
                }
            }
    }

    CMatrix compose_stack(const ArchitectureSpec &spec, const PrecoderStack &stack)
    {
        validate(spec);
        if (stack.digital.rows() != static_cast<Eigen::Index>(spec.rf_chains) ||
            stack.digital.cols() != static_cast<Eigen::Index>(spec.streams))
            throw ConfigError("digital precoder must be rf_chains x streams");

        CMatrix f;
        if (spec.kind == ArchitectureKind::digital)
            f = stack.digital;
        else
        {
            check_analog_constraints(spec, stack.analog);
            f = stack.analog * stack.digital;
        }
        const double norm2 = f.squaredNorm();
        if (!(norm2 > 0.0) || !std::isfinite(norm2))
            throw ModelError("compose_stack: precoder has zero or non-finite power");
        f *= std::sqrt(static_cast<double>(spec.streams) / norm2);
        return f;
    }

    PrecoderStack svd_digital_precoder(const CMatrix &channel, std::size_t streams, double power, double noise)
    {
        if (streams < 1)
            throw ConfigError("svd_digital_precoder: streams must be >= 1");
        const Eigen::JacobiSVD<CMatrix> svd(channel, Eigen::ComputeThinV);
        const RVector s = svd.singularValues();
        const double tol = std::max(channel.rows(), channel.cols()) * 1e-12 * (s.size() ? s(0) : 0.0);
        std::size_t rank = 0;
        for (Eigen::Index k = 0; k < s.size(); ++k)
            rank += s(k) > tol ? 1 : 0;
        if (rank < streams)
            throw ModelError("svd_digital_precoder: channel rank " + std::to_string(rank) + " below " +
                             std::to_string(streams) + " streams");

        const std::vector<double> gains(s.data(), s.data() + static_cast<std::ptrdiff_t>(streams));
        const PowerAllocation alloc = waterfilling(gains, power, noise);

        PrecoderStack out;
        const auto n = channel.cols();
        out.analog = CMatrix::Identity(n, n);
        out.digital = CMatrix::Zero(n, static_cast<Eigen::Index>(streams));
        for (std::size_t k = 0; k < streams; ++k)
            out.digital.col(static_cast<Eigen::Index>(k)) =
                svd.matrixV().col(static_cast<Eigen::Index>(k)) *
                std::sqrt(alloc.powers[k] * static_cast<double>(streams) / power);
        return out;
    }

    DigitalSolution optimal_digital_precoder(const CMatrix &channel, const CMatrix &analog, std::size_t streams,
                                             double power, double noise)
    {
        const bool identity = analog.size() == 0;
        if (!identity && channel.cols() != analog.rows())
            throw ConfigError("optimal_digital_precoder: channel and analog precoder dimensions disagree");
        if (!(power > 0.0) || !(noise > 0.0))
            throw ConfigError("optimal_digital_precoder: power and noise must be > 0");

        // orthonormal basis of range(F_A): Q = F_A U+ Lambda+^{-1/2}
        CMatrix whiten;
        if (!identity)
        {
            const CMatrix gram = analog.adjoint() * analog;
            const Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram);
            const RVector lam = eig.eigenvalues();
            const double lmax = lam.size() ? lam.maxCoeff() : 0.0;
            std::vector<Eigen::Index> keep;
            for (Eigen::Index k = lam.size() - 1; k >= 0; --k)
                if (lam(k) > 1e-10 * lmax)
                    keep.push_back(k);
            if (keep.empty())
                throw ModelError("optimal_digital_precoder: analog precoder is zero");
            whiten.resize(analog.cols(), static_cast<Eigen::Index>(keep.size()));
            for (std::size_t i = 0; i < keep.size(); ++i)
                whiten.col(static_cast<Eigen::Index>(i)) = eig.eigenvectors().col(keep[i]) / std::sqrt(lam(keep[i]));
        }

        const CMatrix reduced = identity ? channel : CMatrix(channel * (analog * whiten));
        const Eigen::JacobiSVD<CMatrix> svd(reduced, Eigen::ComputeThinV);
        const RVector s = svd.singularValues();

        DigitalSolution out;
        out.mode_gains.assign(s.data(), s.data() + s.size());
        out.digital = CMatrix::Zero(identity ? channel.cols() : analog.cols(), static_cast<Eigen::Index>(streams));

        const std::size_t usable = std::min<std::size_t>(streams, static_cast<std::size_t>(s.size()));
        std::vector<double> gains;
        for (std::size_t k = 0; k < usable; ++k)
            if (s(static_cast<Eigen::Index>(k)) > 1e-14 * std::max(1.0, s(0)))
                gains.push_back(s(static_cast<Eigen::Index>(k)));

        std::vector<double> powers(usable, 0.0);
        if (gains.empty())
        {
            // zero channel: any feasible precoder is optimal; spread power over the first modes
            for (auto &p : powers)
                p = power / static_cast<double>(usable);
        }
        else
        {
            const PowerAllocation alloc = waterfilling(gains, power, noise);
            for (std::size_t k = 0; k < gains.size(); ++k)
            {
                powers[k] = alloc.powers[k];
                out.spectral_efficiency += std::log2(1.0 + alloc.powers[k] * gains[k] * gains[k] / noise);
            }
        }
        out.mode_powers = powers;
        for (std::size_t k = 0; k < usable; ++k)
        {
            const double scale = std::sqrt(powers[k] * static_cast<double>(streams) / power);
            const auto v = svd.matrixV().col(static_cast<Eigen::Index>(k));
            if (identity)
                out.digital.col(static_cast<Eigen::Index>(k)) = v * scale;
            else
                out.digital.col(static_cast<Eigen::Index>(k)) = whiten * v * scale;
        }
        return out;
    }
}
