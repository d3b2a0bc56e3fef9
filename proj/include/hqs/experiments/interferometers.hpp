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
#include <hqs/parallel.hpp>
#include <hqs/random.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hqs::experiments {

/**
 * Balanced Mach-Zehnder interferometer: L -> S1, reflected arm via mirror A,
 * transmitted arm via mirror B, recombined at S2 into D1 (bright) and D2
 * (dark). With `blocked`, an opaque object Obj absorbs everything on arm A.
 */
inline OpticalNetwork mach_zehnder_network(bool blocked)
{
    NetworkBuilder b;
    b.add("L", element::Source{})
        .add("S1", element::BeamSplitter{})
        .add("A", element::Mirror{})
        .add("B", element::Mirror{})
        .add("S2", element::BeamSplitter{})
        .add("D1", element::Detector{})
        .add("D2", element::Detector{});
    if (blocked) {
        b.add("Obj", element::Blocker{});
    }
    b.connect("L", "out", "S1", "in0")
        .connect("S1", "out1", "A")
        .connect("S1", "out0", "B")
        .connect("B", "out", "S2", "in1")
        .connect("S2", "out0", "D1")
        .connect("S2", "out1", "D2");
    if (blocked) {
        b.connect("A", "out", "Obj");
    } else {
        b.connect("A", "out", "S2", "in0");
    }
    return b.build();
}

inline EchoTable mach_zehnder(bool blocked)
{
    return echo_table(mach_zehnder_network(blocked));
}

struct EvRecursiveResult {
    std::uint64_t trials = 0;
    std::uint64_t detected = 0; ///< trials ending with a D2 click
    std::uint64_t absorbed = 0; ///< trials ending at Obj
    std::uint64_t photons = 0;  ///< photons sent over all trials

    [[nodiscard]] double detected_fraction() const { return double(detected) / double(trials); }
    [[nodiscard]] double absorbed_fraction() const { return double(absorbed) / double(trials); }
    [[nodiscard]] double mean_photons() const { return double(photons) / double(trials); }
};

/// Limits of the repeat-until-decisive procedure: detected fraction
/// p(D2) / (1 - p(D1)) and mean photon count 1 / (1 - p(D1)).
struct EvRecursiveAnalytic {
    double detected = 0.0;
    double absorbed = 0.0;
    double mean_photons = 0.0;
};

inline EvRecursiveAnalytic ev_recursive_analytic()
{
    auto const table = mach_zehnder(true);
    double const d1 = table.at("D1");
    double const decisive = 1.0 - d1;
    return {table.at("D2") / decisive, table.at("Obj") / decisive, 1.0 / decisive};
}

/**
 * Interaction-free detection with repetition: each trial sends photons
 * through the blocked interferometer until one lands on D2 or Obj. Trial t
 * draws photon k from RandomStream(seed, t).
 */
inline EvRecursiveResult ev_recursive(std::uint64_t n_trials, std::uint64_t seed,
                                      unsigned workers = 0)
{
    if (n_trials < 1) {
        throw std::invalid_argument("ev_recursive: n_trials must be >= 1");
    }
    auto const table = mach_zehnder(true);
    TransactionSampler const sampler(table);
    auto const d2 = *table.index_of("D2");
    auto const obj = *table.index_of("Obj");

    auto body = [&](EvRecursiveResult& r, std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t t = begin; t < end; ++t) {
            RandomStream stream(seed, t);
            for (;;) {
                ++r.photons;
                auto const row = sampler.pick(stream.uniform());
                if (row == d2) {
                    ++r.detected;
                    break;
                }
                if (row == obj) {
                    ++r.absorbed;
                    break;
                }
            }
        }
    };
    auto merge = [](EvRecursiveResult& into, EvRecursiveResult&& part) {
        into.detected += part.detected;
        into.absorbed += part.absorbed;
        into.photons += part.photons;
    };
    auto result = parallel_accumulate(n_trials, EvRecursiveResult{}, body, merge,
                                      workers == 0 ? worker_count() : workers);
    result.trials = n_trials;
    return result;
}

/// Isotropic emission toward `n_detectors` equivalent absorbers D[00]..D[n-1].
inline OpticalNetwork einstein_bubble_network(std::size_t n_detectors)
{
    if (n_detectors < 2) {
        throw std::invalid_argument("einstein_bubble: n_detectors must be >= 2");
    }
    NetworkBuilder b;
    b.add("L", element::Source{}).add("shell", element::Fanout{n_detectors});
    b.connect("L", "out", "shell");
    for (std::size_t i = 0; i < n_detectors; ++i) {
        auto const id = screen_bin_id("D", i, n_detectors);
        b.add(id, element::Detector{});
        b.connect("shell", "out" + std::to_string(i), id);
    }
    return b.build();
}

inline EventRun einstein_bubble(std::size_t n_detectors, std::uint64_t n_events, std::uint64_t seed,
                                RunOptions const& options = {})
{
    return run_events(einstein_bubble_network(n_detectors), n_events, seed, options);
}

} // namespace hqs::experiments
