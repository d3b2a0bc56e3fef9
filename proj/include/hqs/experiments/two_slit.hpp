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

#include <hqs/network.hpp>
#include <hqs/statistics.hpp>
#include <hqs/wavecore.hpp>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hqs::experiments {

struct IntensityProfile {
    std::vector<double> bin_centers; ///< screen coordinate, wavelengths
    std::vector<double> probabilities;
    double visibility = 0.0;
    std::vector<double> maxima; ///< interior extrema of the continuous profile
    std::vector<double> minima;
};

struct TwoSlitConfig {
    double slit_separation = 20.0;  ///< d, wavelengths
    double screen_distance = 2000.0; ///< L, wavelengths
    std::size_t bins = 201;
    double half_width = 150.0;
    bool labeled = false; ///< slit 2 rotated to H by a half-wave plate at 45 degrees
};

inline void check(TwoSlitConfig const& cfg)
{
    if (cfg.bins < 3 || cfg.bins % 2 == 0) {
        throw std::invalid_argument("two_slit: bins must be odd and >= 3");
    }
    if (!(cfg.slit_separation > 0.0) || !(cfg.screen_distance > cfg.slit_separation) ||
        !(cfg.half_width > 0.0)) {
        throw std::invalid_argument("two_slit: need 0 < d < L and half_width > 0");
    }
}

/// Source -> two equal-phase apertures at +d/2 (slit 1) and -d/2 (slit 2) -> screen `screen_id`.
inline OpticalNetwork two_slit_network(TwoSlitConfig const& cfg, std::string const& screen_id = "screen")
{
    check(cfg);
    element::Screen screen{cfg.bins, cfg.half_width, cfg.screen_distance,
                           {0.5 * cfg.slit_separation, -0.5 * cfg.slit_separation}};
    NetworkBuilder b;
    b.add("L", element::Source{}).add("slits", element::Fanout{2}).add(screen_id, screen);
    b.connect("L", "out", "slits").connect("slits", "out0", screen_id, "in0");
    if (cfg.labeled) {
        b.add("HWP", element::HalfWavePlate{45.0});
        b.connect("slits", "out1", "HWP").connect("HWP", "out", screen_id, "in1");
    } else {
        b.connect("slits", "out1", screen_id, "in1");
    }
    return b.build();
}

/// Distance from slit 2 minus distance from slit 1 at screen coordinate x.
inline double path_difference(TwoSlitConfig const& cfg, double x)
{
    double const half = 0.5 * cfg.slit_separation;
    return std::hypot(cfg.screen_distance, x + half) - std::hypot(cfg.screen_distance, x - half);
}

/// Continuous screen intensity (unnormalized) from the two slit amplitudes.
inline double two_slit_intensity(TwoSlitConfig const& cfg, double x)
{
    double const half = 0.5 * cfg.slit_separation;
    auto const one = path_phase(std::hypot(cfg.screen_distance, x - half)) *
                     PolarizedAmplitude::vertical();
    auto two = path_phase(std::hypot(cfg.screen_distance, x + half)) * PolarizedAmplitude::vertical();
    if (cfg.labeled) {
        two = waveplate_apply(two, WaveplateKind::half, 45.0);
    }
    return 0.5 * (one + two).norm2();
}

/**
 * Screen profile: bin probabilities come from the network's echo table;
 * visibility and fringe positions from the continuous intensity.
 */
inline IntensityProfile two_slit(TwoSlitConfig const& cfg)
{
    auto const net = two_slit_network(cfg);
    auto const table = echo_table(net);
    auto const& screen = std::get<element::Screen>(net.at("screen").kind);

    IntensityProfile profile;
    profile.bin_centers.reserve(cfg.bins);
    profile.probabilities.reserve(cfg.bins);
    for (std::size_t k = 0; k < cfg.bins; ++k) {
        profile.bin_centers.push_back(screen.bin_center(k));
        profile.probabilities.push_back(table.entries[k].echo);
    }
    auto const fringes = stats::fringe_extrema(
        [&](double x) { return two_slit_intensity(cfg, x); }, -cfg.half_width, cfg.half_width);
    profile.visibility = fringes.visibility;
    profile.maxima = fringes.maxima;
    profile.minima = fringes.minima;
    return profile;
}

enum class DecisionTime { before_slits, after_slits };

inline std::string_view to_string(DecisionTime t)
{
    return t == DecisionTime::before_slits ? "before_slits" : "after_slits";
}

inline DecisionTime decision_time_from(std::string_view s)
{
    if (s == "before_slits") {
        return DecisionTime::before_slits;
    }
    if (s == "after_slits") {
        return DecisionTime::after_slits;
    }
    throw std::invalid_argument("decision_time must be before_slits or after_slits");
}

/// Screen up: the two-slit screen sigma1. Screen down: a lens images each
/// slit onto its own detector 1' or 2'.
inline OpticalNetwork delayed_choice_network(bool screen_up, TwoSlitConfig const& cfg = {})
{
    if (screen_up) {
        return two_slit_network(cfg, "sigma1");
    }
    NetworkBuilder b;
    b.add("L", element::Source{})
        .add("slits", element::Fanout{2})
        .add("1'", element::Detector{})
        .add("2'", element::Detector{});
    b.connect("L", "out", "slits").connect("slits", "out0", "1'").connect("slits", "out1", "2'");
    return b.build();
}

/**
 * Delayed-choice run. The decision time is part of the configuration but the
 * absorber set (and so the echo table) depends only on whether the screen
 * is up.
 */
inline EventRun delayed_choice(bool screen_up, DecisionTime decision_time, std::uint64_t n,
                               std::uint64_t seed, RunOptions const& options = {})
{
    static_cast<void>(decision_time);
    return run_events(delayed_choice_network(screen_up), n, seed, options);
}

struct AfsharResult {
    double intercepted_fraction = 0.0;
    std::vector<double> wire_centers; ///< fringe-period units
};

/**
 * Wires of width `wire_width` (fringe periods) centred on the interference
 * minima of a far-field sinusoidal fringe cos^2(pi x) over an aperture of
 * `wire_count` periods. With one slit the wire plane is uniformly lit.
 */
inline AfsharResult afshar(std::size_t wire_count, double wire_width, bool both_slits)
{
    if (wire_count < 1) {
        throw std::invalid_argument("afshar: wire_count must be >= 1");
    }
    if (!(wire_width >= 0.0)) {
        throw std::invalid_argument("afshar: wire_width must be >= 0");
    }
    if (wire_width > 1.0) {
        throw std::invalid_argument("afshar: wires overlapping (width exceeds the fringe period)");
    }
    auto const intensity = [both_slits](double x) {
        if (!both_slits) {
            return 1.0;
        }
        double const c = std::cos(std::numbers::pi * x);
        return c * c;
    };
    auto const first = -static_cast<double>(wire_count / 2);
    double const aperture_lo = first;
    double const aperture_hi = first + static_cast<double>(wire_count);

    AfsharResult result;
    double on_wires = 0.0;
    for (std::size_t m = 0; m < wire_count; ++m) {
        double const centre = first + static_cast<double>(m) + 0.5;
        result.wire_centers.push_back(centre);
        on_wires += stats::integrate(intensity, centre - 0.5 * wire_width, centre + 0.5 * wire_width, 16);
    }
    double const total = stats::integrate(intensity, aperture_lo, aperture_hi, 64 * wire_count);
    result.intercepted_fraction = on_wires / total;
    return result;
}

} // namespace hqs::experiments
