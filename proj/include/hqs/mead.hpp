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

#include <hqs/parallel.hpp>
#include <hqs/random.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hqs::mead {

inline constexpr double kElementaryCharge = 1.602176634e-19; // C
inline constexpr double kReducedPlanck = 1.054571817e-34;    // J s
inline constexpr double kSpeedOfLight = 299792458.0;         // m/s

/// Beat frequency (E1 - E0)/hbar in rad/s for level energies in eV.
inline double beat_frequency(double e1_ev, double e0_ev)
{
    if (!(e1_ev >= e0_ev)) {
        throw std::invalid_argument("beat_frequency: e1 must be >= e0");
    }
    return (e1_ev - e0_ev) * kElementaryCharge / kReducedPlanck;
}

/// Modulus of the ground/excited cross term for excited population x.
/// Pure states (x = 0 or 1) carry no dipole.
inline double dipole_amplitude(double x)
{
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::invalid_argument("dipole_amplitude: population must lie in [0, 1]");
    }
    return std::sqrt(x * (1.0 - x));
}

struct TwoLevelAtom {
    double e0 = 0.0; ///< eV
    double e1 = 0.0; ///< eV
    double x = 0.0;  ///< excited population

    [[nodiscard]] double excited_amplitude() const { return std::sqrt(x); }
    [[nodiscard]] double ground_amplitude() const { return std::sqrt(1.0 - x); }
    [[nodiscard]] double omega() const { return beat_frequency(e1, e0); }
};

struct AtomPairState {
    double x_emitter_excited = 1.0;
    double x_absorber_excited = 0.0;
    double t = 0.0;
};

/// (excited, ground) amplitudes of the emitter.
inline std::array<double, 2> emitter_amplitudes(AtomPairState const& s)
{
    return {std::sqrt(s.x_emitter_excited), std::sqrt(1.0 - s.x_emitter_excited)};
}

struct AvalancheConfig {
    double k = 1.0;                ///< coupling rate, 1/time
    double x0 = 0.01;              ///< initial absorber excitation
    double t_end = 20.0;
    double dt = 0.0;               ///< 0 selects 0.01/k
    double noise_amplitude = 0.0;  ///< relative jitter of x0, uniform in [-a, a]
    std::uint64_t seed = 0;
    double omega = 0.0;            ///< beat frequency in the same time units; 0 = unconstrained

    [[nodiscard]] double step() const { return dt > 0.0 ? dt : 0.01 / k; }
};

inline void check(AvalancheConfig const& c)
{
    if (!(c.k > 0.0) || !std::isfinite(c.k)) {
        throw std::invalid_argument("avalanche: k must be positive");
    }
    if (!(c.x0 > 0.0 && c.x0 < 0.5)) {
        throw std::invalid_argument("avalanche: x0 must lie in (0, 0.5)");
    }
    if (!(c.t_end > 0.0) || !(c.noise_amplitude >= 0.0 && c.noise_amplitude < 1.0) || c.omega < 0.0) {
        throw std::invalid_argument("avalanche: need t_end > 0, 0 <= noise_amplitude < 1, omega >= 0");
    }
    double bound = 0.02 / c.k;
    if (c.omega > 0.0) {
        bound = std::min(bound, 2.0 * std::numbers::pi / c.omega / 40.0);
    }
    if (!(c.step() > 0.0) || c.step() > bound * (1.0 + 1e-12)) {
        throw std::invalid_argument("avalanche: dt " + std::to_string(c.step()) +
                                    " violates the stability bound " + std::to_string(bound));
    }
}

/// Energy transfer rate k d_E d_A with the emitter population slaved to
/// 1 - x_A; algebraically k x_A (1 - x_A).
inline double transfer_rate(double k, double x_absorber)
{
    double const x = std::clamp(x_absorber, 0.0, 1.0);
    return k * dipole_amplitude(1.0 - x) * dipole_amplitude(x);
}

/**
 * Emitter/absorber pair sharing one quantum, integrated with classical RK4
 * at fixed step. Sample i is at t = i * dt exactly.
 */
inline std::vector<AtomPairState> integrate_pair(AvalancheConfig const& cfg)
{
    check(cfg);
    double const dt = cfg.step();
    double x = cfg.x0;
    if (cfg.noise_amplitude > 0.0) {
        RandomStream stream(cfg.seed, 0);
        x *= 1.0 + cfg.noise_amplitude * (2.0 * stream.uniform() - 1.0);
    }
    auto const steps = static_cast<std::size_t>(std::ceil(cfg.t_end / dt - 1e-9));
    std::vector<AtomPairState> traj;
    traj.reserve(steps + 1);
    traj.push_back({1.0 - x, x, 0.0});
    for (std::size_t i = 1; i <= steps; ++i) {
        double const k1 = transfer_rate(cfg.k, x);
        double const k2 = transfer_rate(cfg.k, x + 0.5 * dt * k1);
        double const k3 = transfer_rate(cfg.k, x + 0.5 * dt * k2);
        double const k4 = transfer_rate(cfg.k, x + dt * k3);
        x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        traj.push_back({1.0 - x, x, static_cast<double>(i) * dt});
    }
    return traj;
}

/// Absorber dipole signal d(x_A(t)) cos(omega t + phase) at the trajectory samples.
inline std::vector<double> dipole_signal(std::vector<AtomPairState> const& traj, double omega,
                                         double phase = 0.0)
{
    std::vector<double> out;
    out.reserve(traj.size());
    for (auto const& s : traj) {
        out.push_back(dipole_amplitude(std::clamp(s.x_absorber_excited, 0.0, 1.0)) *
                      std::cos(omega * s.t + phase));
    }
    return out;
}

/// Frequency (cycles per time unit) of the largest non-DC DFT bin.
inline double dft_peak_frequency(std::vector<double> const& samples, double dt)
{
    std::size_t const n = samples.size();
    if (n < 4) {
        throw std::invalid_argument("dft_peak_frequency: need at least 4 samples");
    }
    std::size_t best = 1;
    double best_power = -1.0;
    for (std::size_t k = 1; k <= n / 2; ++k) {
        std::complex<double> acc{};
        for (std::size_t j = 0; j < n; ++j) {
            double const angle = -2.0 * std::numbers::pi * static_cast<double>(k * j % n) / static_cast<double>(n);
            acc += samples[j] * std::polar(1.0, angle);
        }
        if (std::norm(acc) > best_power) {
            best_power = std::norm(acc);
            best = k;
        }
    }
    return static_cast<double>(best) / (static_cast<double>(n) * dt);
}

// ---------------------------------------------------------------------------
// Competition between absorbers

struct CompeteConfig {
    std::vector<double> k_list{1.0, 1.0};
    double x0_max = 0.01;
    std::uint64_t trials = 10000;
    std::uint64_t seed = 0;
    double dt = 0.0;               ///< 0 selects 0.01/max(k)
    double cross_inhibition = 1.0; ///< beta; 0 gives independent growth against the shared emitter
    double threshold = 0.99;
    double t_max = 0.0;            ///< 0 selects 400/min(k)
};

struct TrialOutcome {
    std::size_t winner = 0;
    double time = 0.0;
    bool tie = false;     ///< several absorbers crossed in the same step
    bool timeout = false; ///< nobody crossed before t_max; winner is the largest
};

struct CompeteResult {
    std::vector<std::uint64_t> wins;
    std::vector<TrialOutcome> log;

    [[nodiscard]] double fraction(std::size_t absorber) const
    {
        return static_cast<double>(wins.at(absorber)) / static_cast<double>(log.size());
    }
};

/// Seeds x0_i drawn uniformly from (0, x0_max] with RandomStream(seed, trial).
inline std::vector<double> compete_seeds(CompeteConfig const& cfg, std::uint64_t trial)
{
    RandomStream stream(cfg.seed, trial);
    std::vector<double> x(cfg.k_list.size());
    for (auto& xi : x) {
        xi = cfg.x0_max * (1.0 - stream.uniform());
    }
    return x;
}

/**
 * One trial of several absorbers drawing on a single excited emitter:
 *   dx_i/dt = k_i x_i (x_E - beta * sum_{j != i} x_j),   x_E = 1 - sum_j x_j.
 * A lone absorber follows the pair logistic. With beta > 0 coexistence is
 * unstable and one absorber completes the transfer.
 */
inline TrialOutcome compete_trial(CompeteConfig const& cfg, std::vector<double> x)
{
    auto const& k = cfg.k_list;
    std::size_t const m = k.size();
    double const k_max = *std::max_element(k.begin(), k.end());
    double const k_min = *std::min_element(k.begin(), k.end());
    double const dt = cfg.dt > 0.0 ? cfg.dt : 0.01 / k_max;
    double const t_max = cfg.t_max > 0.0 ? cfg.t_max : 400.0 / k_min;

    auto rhs = [&](std::vector<double> const& s, std::vector<double>& out) {
        double total = 0.0;
        for (double v : s) {
            total += v;
        }
        for (std::size_t i = 0; i < m; ++i) {
            double const others = total - s[i];
            out[i] = k[i] * s[i] * ((1.0 - total) - cfg.cross_inhibition * others);
        }
    };

    std::vector<double> k1(m), k2(m), k3(m), k4(m), tmp(m);
    auto const steps = static_cast<std::uint64_t>(std::ceil(t_max / dt));
    for (std::uint64_t step = 1; step <= steps; ++step) {
        rhs(x, k1);
        for (std::size_t i = 0; i < m; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
        rhs(tmp, k2);
        for (std::size_t i = 0; i < m; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
        rhs(tmp, k3);
        for (std::size_t i = 0; i < m; ++i) tmp[i] = x[i] + dt * k3[i];
        rhs(tmp, k4);
        for (std::size_t i = 0; i < m; ++i) {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }

        std::size_t crossed = 0;
        std::optional<std::size_t> first;
        for (std::size_t i = 0; i < m; ++i) {
            if (x[i] >= cfg.threshold) {
                ++crossed;
                if (!first) {
                    first = i;
                }
            }
        }
        if (first) {
            return {*first, static_cast<double>(step) * dt, crossed > 1, false};
        }
    }
    auto const best = static_cast<std::size_t>(std::max_element(x.begin(), x.end()) - x.begin());
    return {best, t_max, false, true};
}

inline CompeteResult compete(CompeteConfig const& cfg, unsigned workers = 0)
{
    if (cfg.k_list.size() < 2) {
        throw std::invalid_argument("compete: need at least two absorbers");
    }
    for (double k : cfg.k_list) {
        if (!(k > 0.0) || !std::isfinite(k)) {
            throw std::invalid_argument("compete: couplings must be positive");
        }
    }
    if (!(cfg.x0_max > 0.0 && cfg.x0_max < 1.0 / static_cast<double>(cfg.k_list.size()))) {
        throw std::invalid_argument("compete: x0_max must lie in (0, 1/absorbers)");
    }
    if (cfg.trials < 1 || !(cfg.cross_inhibition >= 0.0) || !(cfg.threshold > 0.5 && cfg.threshold < 1.0)) {
        throw std::invalid_argument("compete: need trials >= 1, beta >= 0, 0.5 < threshold < 1");
    }
    double const k_max = *std::max_element(cfg.k_list.begin(), cfg.k_list.end());
    if (cfg.dt > 0.02 / k_max * (1.0 + 1e-12)) {
        throw std::invalid_argument("compete: dt violates the stability bound 0.02/max(k)");
    }

    std::vector<TrialOutcome> log(cfg.trials);
    auto body = [&](int&, std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t t = begin; t < end; ++t) {
            log[t] = compete_trial(cfg, compete_seeds(cfg, t));
        }
    };
    parallel_accumulate(cfg.trials, 0, body, [](int&, int&&) {},
                        workers == 0 ? worker_count() : workers);

    CompeteResult r;
    r.wins.assign(cfg.k_list.size(), 0);
    for (auto const& o : log) {
        ++r.wins[o.winner];
    }
    r.log = std::move(log);
    return r;
}

// ---------------------------------------------------------------------------
// Radiated potential of the coupled dipoles

struct Dipole {
    double x = 0.0;      ///< position, m
    double y = 0.0;
    double excited = 0.0; ///< excited population
    double phase = 0.0;  ///< rad
};

struct FieldGrid {
    double x_min = -1.0, x_max = 1.0, y_min = -1.0, y_max = 1.0; ///< m
    std::size_t nx = 101, ny = 101;

    [[nodiscard]] double dx() const { return (x_max - x_min) / static_cast<double>(nx - 1); }
    [[nodiscard]] double dy() const { return (y_max - y_min) / static_cast<double>(ny - 1); }
    // measured from the centre so that mirrored nodes get bitwise mirrored coordinates
    [[nodiscard]] double x_at(std::size_t i) const { return node(x_min, x_max, i, nx); }
    [[nodiscard]] double y_at(std::size_t j) const { return node(y_min, y_max, j, ny); }

private:
    static double node(double lo, double hi, std::size_t i, std::size_t n)
    {
        double const steps = static_cast<double>(n - 1);
        return 0.5 * (lo + hi) + 0.5 * (hi - lo) * (2.0 * static_cast<double>(i) - steps) / steps;
    }
};

struct FieldSnapshot {
    FieldGrid grid;
    std::vector<double> values; ///< row-major, values[j * nx + i] at (x_i, y_j)

    [[nodiscard]] double at(std::size_t i, std::size_t j) const { return values[j * grid.nx + i]; }
};

/**
 * Sum over the two atoms of d(x_i) cos(omega (t - r_i/c) + phase_i) / max(r_i, r_min),
 * with r_min half a grid cell.
 */
inline FieldSnapshot field_snapshot(std::array<Dipole, 2> const& atoms, double omega, double t,
                                    FieldGrid const& grid)
{
    if (grid.nx < 2 || grid.ny < 2 || !(grid.x_max > grid.x_min) || !(grid.y_max > grid.y_min)) {
        throw std::invalid_argument("field_snapshot: grid needs nx, ny >= 2 and a positive extent");
    }
    double const cell = std::max(grid.dx(), grid.dy());
    if (std::hypot(atoms[0].x - atoms[1].x, atoms[0].y - atoms[1].y) < 4.0 * cell) {
        throw std::invalid_argument("field_snapshot: atoms must be at least 4 grid cells apart");
    }
    double const r_min = 0.5 * std::min(grid.dx(), grid.dy());
    std::array<double, 2> const moment{dipole_amplitude(atoms[0].excited),
                                       dipole_amplitude(atoms[1].excited)};

    FieldSnapshot snap{grid, std::vector<double>(grid.nx * grid.ny, 0.0)};
    for (std::size_t j = 0; j < grid.ny; ++j) {
        for (std::size_t i = 0; i < grid.nx; ++i) {
            double sum = 0.0;
            for (std::size_t a = 0; a < 2; ++a) {
                double const r = std::hypot(grid.x_at(i) - atoms[a].x, grid.y_at(j) - atoms[a].y);
                sum += moment[a] * std::cos(omega * (t - r / kSpeedOfLight) + atoms[a].phase) /
                       std::max(r, r_min);
            }
            snap.values[j * grid.nx + i] = sum;
        }
    }
    return snap;
}

// ---------------------------------------------------------------------------
// CSV output

/// Columns: t, x_emitter, x_absorber, dipole_emitter, dipole_absorber.
inline void write_trajectory_csv(std::ostream& os, std::vector<AtomPairState> const& traj)
{
    auto const old = os.precision(17);
    os << "t,x_emitter,x_absorber,dipole_emitter,dipole_absorber\n";
    for (auto const& s : traj) {
        os << s.t << ',' << s.x_emitter_excited << ',' << s.x_absorber_excited << ','
           << dipole_amplitude(std::clamp(s.x_emitter_excited, 0.0, 1.0)) << ','
           << dipole_amplitude(std::clamp(s.x_absorber_excited, 0.0, 1.0)) << '\n';
    }
    os.precision(old);
}

/// Header line "nx,ny,x_min,x_max,y_min,y_max" then ny rows of nx values.
inline void write_field_csv(std::ostream& os, FieldSnapshot const& snap)
{
    auto const old = os.precision(17);
    auto const& g = snap.grid;
    os << g.nx << ',' << g.ny << ',' << g.x_min << ',' << g.x_max << ',' << g.y_min << ',' << g.y_max
       << '\n';
    for (std::size_t j = 0; j < g.ny; ++j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            os << (i ? "," : "") << snap.at(i, j);
        }
        os << '\n';
    }
    os.precision(old);
}

} // namespace hqs::mead
