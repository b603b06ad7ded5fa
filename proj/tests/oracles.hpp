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

// Independent reference computations for the unit tests. Plain loops over std::complex,
// no Eigen, so they share no code path with the library.

#ifndef TRIHYBRID_TESTS_ORACLES_HPP
#define TRIHYBRID_TESTS_ORACLES_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace oracle
{
    using cx = std::complex<double>;
    using Mat = std::vector<std::vector<cx>>;
    inline constexpr double pi = 3.14159265358979323846;

    inline Mat zeros(std::size_t r, std::size_t c) { return Mat(r, std::vector<cx>(c, cx(0.0, 0.0))); }

    // Gaussian elimination with partial pivoting.
    inline std::vector<cx> solve(Mat a, std::vector<cx> b)
    {
        const std::size_t n = a.size();
        for (std::size_t k = 0; k < n; ++k)
        {
            std::size_t p = k;
            for (std::size_t i = k + 1; i < n; ++i)
                if (std::abs(a[i][k]) > std::abs(a[p][k]))
                    p = i;
            if (std::abs(a[p][k]) == 0.0)
                throw std::runtime_error("singular");
            std::swap(a[p], a[k]);
            std::swap(b[p], b[k]);
            for (std::size_t i = k + 1; i < n; ++i)
            {
                const cx f = a[i][k] / a[k][k];
                for (std::size_t j = k; j < n; ++j)
                    a[i][j] -= f * a[k][j];
                b[i] -= f * b[k];
            }
        }
        std::vector<cx> x(n);
        for (std::size_t i = n; i-- > 0;)
        {
            cx s = b[i];
            for (std::size_t j = i + 1; j < n; ++j)
                s -= a[i][j] * x[j];
            x[i] = s / a[i][i];
        }
        return x;
    }

    // Determinant by elimination.
    inline cx det(Mat a)
    {
        const std::size_t n = a.size();
        cx d(1.0, 0.0);
        for (std::size_t k = 0; k < n; ++k)
        {
            std::size_t p = k;
            for (std::size_t i = k + 1; i < n; ++i)
                if (std::abs(a[i][k]) > std::abs(a[p][k]))
                    p = i;
            if (std::abs(a[p][k]) == 0.0)
                return 0.0;
            if (p != k)
            {
                std::swap(a[p], a[k]);
                d = -d;
            }
            d *= a[k][k];
            for (std::size_t i = k + 1; i < n; ++i)
            {
                const cx f = a[i][k] / a[k][k];
                for (std::size_t j = k; j < n; ++j)
                    a[i][j] -= f * a[k][j];
            }
        }
        return d;
    }

    // log2 det(I + rho H F F^H H^H) by direct products.
    inline double log_det_rate(const Mat &h, const Mat &f, double rho)
    {
        const std::size_t r = h.size(), k = f[0].size(), n = f.size();
        Mat hf = zeros(r, k);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < k; ++j)
                for (std::size_t m = 0; m < n; ++m)
                    hf[i][j] += h[i][m] * f[m][j];
        Mat a = zeros(r, r);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j)
            {
                for (std::size_t m = 0; m < k; ++m)
                    a[i][j] += rho * hf[i][m] * std::conj(hf[j][m]);
                if (i == j)
                    a[i][j] += 1.0;
            }
        return std::log2(std::abs(det(a)));
    }

    // Brute-force maximizer of sum log2(1 + p_k g_k^2 / n0) over a simplex grid (two modes).
    inline std::vector<double> grid_waterfilling2(double g1, double g2, double power, double n0, double step)
    {
        double best = -1.0, p1b = 0.0;
        const auto steps = static_cast<long>(std::llround(power / step));
        for (long i = 0; i <= steps; ++i)
        {
            const double p1 = power * static_cast<double>(i) / static_cast<double>(steps);
            const double v = std::log2(1 + p1 * g1 * g1 / n0) + std::log2(1 + (power - p1) * g2 * g2 / n0);
            if (v > best)
            {
                best = v;
                p1b = p1;
            }
        }
        return {p1b, power - p1b};
    }
}

#endif
