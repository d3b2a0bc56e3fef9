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
#include <hqs/random.hpp>
#include <hqs/statistics.hpp>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

namespace hqs::experiments {

struct EraserConfig {
    bool qwp_in = false;           ///< double-pass QWP at 45 deg on the reflected history
    bool eraser_filter_in = false; ///< 45 deg polarizer in front of the idler detector
    bool delayed = false;          ///< lengthen the idler path by a whole number of wavelengths
};

/// Extra idler path length used when `delayed` is set, in wavelengths.
inline constexpr double kEraserDelayWavelengths = 200000.0;

/**
 * The two production histories (direct and reflected) as the arms of an
 * interferometer. The pump-mirror phase is a phase segment on the reflected
 * arm; DI registers a coincidence, `lost` collects the other output port and
 * `filter` the light the eraser polarizer rejects.
 */
inline OpticalNetwork eraser_network(EraserConfig const& cfg, double pump_phase_radians)
{
    if (!std::isfinite(pump_phase_radians)) {
        throw std::invalid_argument("eraser: phase must be finite");
    }
    double turns = pump_phase_radians / (2.0 * std::numbers::pi);
    turns -= std::floor(turns);

    NetworkBuilder b;
    b.add("pump", element::Source{})
        .add("crystal", element::BeamSplitter{})
        .add("direct", element::Mirror{})
        .add("pump_mirror", element::PhaseSegment{turns})
        .add("reflected", element::Mirror{})
        .add("overlap", element::BeamSplitter{})
        .add("DI", element::Detector{})
        .add("lost", element::Detector{});
    b.connect("pump", "out", "crystal", "in0")
        .connect("crystal", "out0", "direct")
        .connect("direct", "out", "overlap", "in1")
        .connect("crystal", "out1", "pump_mirror")
        .connect("overlap", "out1", "lost");

    if (cfg.qwp_in) {
        b.add("QWP", element::QuarterWaveDouble{45.0});
        b.connect("pump_mirror", "out", "QWP").connect("QWP", "out", "reflected");
    } else {
        b.connect("pump_mirror", "out", "reflected");
    }
    b.connect("reflected", "out", "overlap", "in0");

    std::string tail = "overlap";
    std::string tail_port = "out0";
    if (cfg.delayed) {
        b.add("delay", element::PhaseSegment{kEraserDelayWavelengths});
        b.connect(tail, tail_port, "delay");
        tail = "delay";
        tail_port = "out";
    }
    if (cfg.eraser_filter_in) {
        b.add("eraser", element::Polarizer{45.0}).add("filter", element::Blocker{});
        b.connect(tail, tail_port, "eraser").connect("eraser", "reject", "filter");
        tail = "eraser";
        tail_port = "out";
    }
    b.connect(tail, tail_port, "DI");
    return b.build();
}

struct EraserResult {
    std::vector<double> phases;
    std::vector<double> analytic_rates; ///< coincidence probability per pair
    double analytic_visibility = 0.0;
    std::vector<std::uint64_t> counts; ///< empty in analytic mode
    std::vector<double> empirical_rates;
    std::optional<double> empirical_visibility;
};

inline constexpr std::size_t kMinEraserScan = 8;

/// Coincidence rate over a pump-phase scan; with `n_per_point` > 0 each scan
/// point k also runs n events seeded with derive_seed(seed, k).
inline EraserResult eraser(EraserConfig const& cfg, std::vector<double> const& phase_scan,
                           std::uint64_t n_per_point = 0, std::uint64_t seed = 0,
                           RunOptions options = {})
{
    if (phase_scan.size() < kMinEraserScan) {
        throw std::invalid_argument("eraser: phase scan needs at least 8 points");
    }
    options.keep_records = false;
    EraserResult r;
    r.phases = phase_scan;
    for (std::size_t k = 0; k < phase_scan.size(); ++k) {
        auto const net = eraser_network(cfg, phase_scan[k]);
        auto const table = echo_table(net);
        r.analytic_rates.push_back(table.at("DI"));
        if (n_per_point > 0) {
            auto const run = run_events(net, n_per_point, derive_seed(seed, k), options);
            r.counts.push_back(run.count("DI"));
            r.empirical_rates.push_back(double(run.count("DI")) / double(n_per_point));
        }
    }
    r.analytic_visibility = stats::visibility(r.analytic_rates);
    if (n_per_point > 0) {
        r.empirical_visibility = stats::visibility(r.empirical_rates);
    }
    return r;
}

/// `points` evenly spaced phases over one period, starting at 0.
inline std::vector<double> uniform_phase_scan(std::size_t points)
{
    std::vector<double> phases;
    phases.reserve(points);
    for (std::size_t k = 0; k < points; ++k) {
        phases.push_back(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(points));
    }
    return phases;
}

} // namespace hqs::experiments
