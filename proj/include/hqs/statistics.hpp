/*
   Copyright 2026 The hqs Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace hqs::stats {

/// Standard deviation of an observed frequency with success probability p over n trials.
inline double binomial_sigma(double p, std::uint64_t n)
{
    return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

/// |freq - p| <= k * sigma; with p in {0, 1} this demands an exact match.
inline bool within_sigma(double freq, double p, std::uint64_t n, double k = 4.0)
{
    return std::abs(freq - p) <= k * binomial_sigma(p, n);
}

/// Upper tail of the chi-square distribution.
inline double chi_square_sf(double statistic, double dof)
{
    if (dof <= 0.0) {
        throw std::invalid_argument("chi_square_sf: dof must be positive");
    }
    if (statistic <= 0.0) {
        return 1.0;
    }
    return boost::math::gamma_q(dof / 2.0, statistic / 2.0);
}

struct ChiSquareResult {
    double statistic = 0.0;
    std::size_t dof = 0;
    double p_value = 1.0;
};

/**
 * Pearson goodness of fit of counts against probabilities. Cells with an
 * expected count below `min_expected` are pooled into one cell (dropped if
 * the pool itself stays below the threshold and observed nothing).
 */
inline ChiSquareResult chi_square_test(std::span<std::uint64_t const> counts,
                                       std::span<double const> probabilities,
                                       double min_expected = 5.0)
{
    if (counts.size() != probabilities.size() || counts.empty()) {
        throw std::invalid_argument("chi_square_test: size mismatch");
    }
    double n = 0.0;
    for (auto c : counts) {
        n += static_cast<double>(c);
    }
    double stat = 0.0;
    std::size_t cells = 0;
    double pool_expected = 0.0;
    double pool_observed = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        double const expected = n * probabilities[i];
        double const observed = static_cast<double>(counts[i]);
        if (expected < min_expected) {
            pool_expected += expected;
            pool_observed += observed;
            continue;
        }
        stat += (observed - expected) * (observed - expected) / expected;
        ++cells;
    }
    if (pool_expected > 0.0 && (pool_expected >= min_expected || pool_observed > 0.0)) {
        stat += (pool_observed - pool_expected) * (pool_observed - pool_expected) / pool_expected;
        ++cells;
    }
    if (cells < 2) {
        return {stat, 0, 1.0};
    }
    return {stat, cells - 1, chi_square_sf(stat, static_cast<double>(cells - 1))};
}

/// (max - min) / (max + min); 0 for an all-zero sample.
inline double visibility(std::span<double const> values)
{
    if (values.empty()) {
        throw std::invalid_argument("visibility: empty sample");
    }
    auto const [lo, hi] = std::minmax_element(values.begin(), values.end());
    double const sum = *hi + *lo;
    return sum > 0.0 ? (*hi - *lo) / sum : 0.0;
}

namespace detail {

/// Golden-section search for an extremum of f on [a, b]; `sign` +1 finds a minimum.
inline double golden_section(std::function<double(double)> const& f, double a, double b, double sign)
{
    constexpr double inv_phi = 0.61803398874989484820;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = sign * f(c);
    double fd = sign * f(d);
    for (int it = 0; it < 200 && std::abs(b - a) > 1e-15 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = sign * f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = sign * f(d);
        }
    }
    return 0.5 * (a + b);
}

} // namespace detail

struct FringeExtrema {
    std::vector<double> maxima; ///< positions
    std::vector<double> minima;
    double visibility = 0.0;
};

/**
 * Locates the interior extrema of a continuous profile on [a, b] by a
 * `samples`-point scan refined with golden-section search, and returns
 * (Imax - Imin) / (Imax + Imin) over them. A profile without an interior
 * maximum and minimum has visibility 0.
 */
inline FringeExtrema fringe_extrema(std::function<double(double)> const& intensity, double a,
                                    double b, std::size_t samples = 20001)
{
    if (!(b > a) || samples < 5) {
        throw std::invalid_argument("fringe_extrema: bad interval");
    }
    std::vector<double> xs(samples);
    std::vector<double> ys(samples);
    double const h = (b - a) / static_cast<double>(samples - 1);
    for (std::size_t i = 0; i < samples; ++i) {
        xs[i] = a + h * static_cast<double>(i);
        ys[i] = intensity(xs[i]);
    }
    double const scale = *std::max_element(ys.begin(), ys.end());
    double const flat = 1e-12 * std::max(scale, std::numeric_limits<double>::min());

    FringeExtrema out;
    for (std::size_t i = 1; i + 1 < samples; ++i) {
        bool const is_max = ys[i] > ys[i - 1] + flat && ys[i] >= ys[i + 1] + flat;
        bool const is_min = ys[i] < ys[i - 1] - flat && ys[i] <= ys[i + 1] - flat;
        if (is_max) {
            out.maxima.push_back(detail::golden_section(intensity, xs[i - 1], xs[i + 1], -1.0));
        } else if (is_min) {
            out.minima.push_back(detail::golden_section(intensity, xs[i - 1], xs[i + 1], +1.0));
        }
    }
    if (out.maxima.empty() || out.minima.empty()) {
        return out;
    }
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (double x : out.maxima) {
        hi = std::max(hi, intensity(x));
    }
    for (double x : out.minima) {
        lo = std::min(lo, intensity(x));
    }
    out.visibility = hi + lo > 0.0 ? (hi - lo) / (hi + lo) : 0.0;
    return out;
}

/// Composite 8-point Gauss-Legendre quadrature over `panels` equal panels.
inline double integrate(std::function<double(double)> const& f, double a, double b,
                        std::size_t panels = 64)
{
    static constexpr std::array<double, 4> nodes{0.1834346424956498, 0.5255324099163290,
                                                 0.7966664774136267, 0.9602898564975363};
    static constexpr std::array<double, 4> weights{0.3626837833783620, 0.3137066458778873,
                                                   0.2223810344533745, 0.1012285362903763};
    if (b == a) {
        return 0.0;
    }
    double const h = (b - a) / static_cast<double>(panels);
    double sum = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        double const mid = a + h * (static_cast<double>(p) + 0.5);
        double const half = 0.5 * h;
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            sum += weights[k] * half * (f(mid - half * nodes[k]) + f(mid + half * nodes[k]));
        }
    }
    return sum;
}

} // namespace hqs::stats
