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
#include <hqs/wavecore.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hqs::experiments {

/// Outcome label -> probability for a composite (multi-vertex) transaction.
/// Shares the echo-table layout so transaction selection applies unchanged.
using JointOutcomeTable = EchoTable;

// ---------------------------------------------------------------------------
// Polarization-entangled pairs

/**
 * Joint analyzer outcomes for the pair (|HH> + |VV>)/sqrt2 with linear
 * analyzers at theta_left / theta_right degrees. "H" means the photon passed
 * along its analyzer axis, "V" that it exited the orthogonal port. Labels
 * are ordered HH, HV, VH, VV (left, right).
 */
inline JointOutcomeTable epr_table(double theta_left, double theta_right)
{
    // pair[i][j]: amplitude of (left i, right j), i/j = 0 for H, 1 for V.
    constexpr double s = detail::kInvSqrt2;
    std::array<std::array<ComplexAmplitude, 2>, 2> const pair{{{s, 0.0}, {0.0, s}}};
    auto component = [](PolarizedAmplitude const& a, int i) { return i == 0 ? a.h : a.v; };

    std::array<PolarizedAmplitude, 2> const left{PolarizedAmplitude::linear(theta_left),
                                                 PolarizedAmplitude::linear(theta_left + 90.0)};
    std::array<PolarizedAmplitude, 2> const right{PolarizedAmplitude::linear(theta_right),
                                                  PolarizedAmplitude::linear(theta_right + 90.0)};
    static constexpr std::array<std::string_view, 2> names{"H", "V"};

    JointOutcomeTable table;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            ComplexAmplitude amp{};
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) {
                    amp += std::conj(component(left[a], i)) * std::conj(component(right[b], j)) *
                           pair[i][j];
                }
            }
            table.entries.push_back({std::string(names[a]) + std::string(names[b]), std::norm(amp)});
        }
    }
    return table;
}

struct Correlation {
    double p_same = 0.0;
    double p_different = 0.0;
    [[nodiscard]] double E() const noexcept { return p_same - p_different; }
};

inline Correlation correlation(JointOutcomeTable const& t)
{
    return {t.at("HH") + t.at("VV"), t.at("HV") + t.at("VH")};
}

inline Correlation correlation(EventRun const& run)
{
    double const n = static_cast<double>(run.total());
    return {double(run.count("HH") + run.count("VV")) / n, double(run.count("HV") + run.count("VH")) / n};
}

struct EprResult {
    JointOutcomeTable table;
    EventRun run;
};

inline EprResult epr(double theta_left, double theta_right, std::uint64_t n, std::uint64_t seed,
                     RunOptions const& options = {})
{
    auto table = epr_table(theta_left, theta_right);
    auto run = sample_events(table, n, seed, options);
    return {std::move(table), std::move(run)};
}

struct ChshResult {
    double S = 0.0;
    double stderr_ = 0.0;
    std::array<double, 4> E{}; ///< (a,b), (a,b'), (a',b), (a',b')
};

/// S = E(a,b) - E(a,b') + E(a',b) + E(a',b') from the joint outcome tables.
inline ChshResult chsh_analytic(double a, double a_prime, double b, double b_prime)
{
    ChshResult r;
    r.E = {correlation(epr_table(a, b)).E(), correlation(epr_table(a, b_prime)).E(),
           correlation(epr_table(a_prime, b)).E(), correlation(epr_table(a_prime, b_prime)).E()};
    r.S = r.E[0] - r.E[1] + r.E[2] + r.E[3];
    return r;
}

/// Monte Carlo CHSH; setting k uses derive_seed(seed, k). The standard error
/// combines the per-setting variances (1 - E^2) / n.
inline ChshResult chsh(double a, double a_prime, double b, double b_prime, std::uint64_t n_per_setting,
                       std::uint64_t seed, RunOptions options = {})
{
    options.keep_records = false;
    std::array<std::array<double, 2>, 4> const settings{
        {{a, b}, {a, b_prime}, {a_prime, b}, {a_prime, b_prime}}};
    ChshResult r;
    double var = 0.0;
    for (std::size_t k = 0; k < settings.size(); ++k) {
        auto const run = sample_events(epr_table(settings[k][0], settings[k][1]), n_per_setting,
                                       derive_seed(seed, k), options);
        r.E[k] = correlation(run).E();
        var += (1.0 - r.E[k] * r.E[k]) / static_cast<double>(n_per_setting);
    }
    r.S = r.E[0] - r.E[1] + r.E[2] + r.E[3];
    r.stderr_ = std::sqrt(var);
    return r;
}

// ---------------------------------------------------------------------------
// Single atom as the blocking object

enum class AtomPreparation { x_plus, z_plus, z_minus };

inline AtomPreparation atom_preparation_from(std::string_view s)
{
    if (s == "x+" || s == "x_plus") {
        return AtomPreparation::x_plus;
    }
    if (s == "z+" || s == "z_plus") {
        return AtomPreparation::z_plus;
    }
    if (s == "z-" || s == "z_minus") {
        return AtomPreparation::z_minus;
    }
    throw std::invalid_argument("atom must be x+, z+ or z-");
}

struct HardyAnalytic {
    JointOutcomeTable outcomes; ///< absorbed, D1_x+, D1_x-, D2_x+, D2_x-
    double absorbed = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double p_xminus_given_d1 = 0.0;
    double p_xminus_given_d2 = 0.0;
};

/**
 * Joint photon-atom amplitudes for the interferometer whose reflected arm v
 * passes through the atom's z+ box. The atom in z+ absorbs the photon on v;
 * the surviving amplitudes recombine at S2 (same port conventions as the
 * Mach-Zehnder network), and the atom is then measured along X.
 */
inline HardyAnalytic hardy_analytic(AtomPreparation prep = AtomPreparation::x_plus)
{
    using C = ComplexAmplitude;
    constexpr double s = detail::kInvSqrt2;
    std::array<C, 2> atom{}; // (z+, z-)
    switch (prep) {
    case AtomPreparation::x_plus:
        atom = {C{s, 0.0}, C{s, 0.0}};
        break;
    case AtomPreparation::z_plus:
        atom = {C{1.0, 0.0}, C{}};
        break;
    case AtomPreparation::z_minus:
        atom = {C{}, C{1.0, 0.0}};
        break;
    }

    enum Photon { v, w, d1, d2, absorbed, photon_states };
    std::array<std::array<C, 2>, photon_states> psi{};
    for (int z = 0; z < 2; ++z) {
        psi[v][z] = kReflection * atom[z];
        psi[w][z] = kTransmission * atom[z];
    }
    psi[absorbed][0] = psi[v][0];
    psi[v][0] = C{};
    for (int z = 0; z < 2; ++z) {
        psi[d1][z] = kTransmission * psi[v][z] + kReflection * psi[w][z];
        psi[d2][z] = kReflection * psi[v][z] + kTransmission * psi[w][z];
        psi[v][z] = psi[w][z] = C{};
    }

    auto prob = [&](int photon) { return std::norm(psi[photon][0]) + std::norm(psi[photon][1]); };
    auto x_prob = [&](int photon, double sign) {
        return std::norm(s * (psi[photon][0] + sign * psi[photon][1]));
    };

    HardyAnalytic h;
    h.absorbed = prob(absorbed);
    h.d1 = prob(d1);
    h.d2 = prob(d2);
    h.outcomes.entries = {{"absorbed", h.absorbed},
                          {"D1_x+", x_prob(d1, +1.0)},
                          {"D1_x-", x_prob(d1, -1.0)},
                          {"D2_x+", x_prob(d2, +1.0)},
                          {"D2_x-", x_prob(d2, -1.0)}};
    h.p_xminus_given_d1 = h.d1 > 0.0 ? x_prob(d1, -1.0) / h.d1 : 0.0;
    h.p_xminus_given_d2 = h.d2 > 0.0 ? x_prob(d2, -1.0) / h.d2 : 0.0;
    return h;
}

struct HardyResult {
    HardyAnalytic analytic;
    EventRun run;

    [[nodiscard]] std::uint64_t d1_events() const { return run.count("D1_x+") + run.count("D1_x-"); }
    [[nodiscard]] std::uint64_t d2_events() const { return run.count("D2_x+") + run.count("D2_x-"); }
    [[nodiscard]] double p_xminus_given_d2() const
    {
        auto const n = d2_events();
        return n == 0 ? 0.0 : double(run.count("D2_x-")) / double(n);
    }
};

inline HardyResult hardy(std::uint64_t n, std::uint64_t seed,
                         AtomPreparation prep = AtomPreparation::x_plus, RunOptions const& options = {})
{
    auto analytic = hardy_analytic(prep);
    auto run = sample_events(analytic.outcomes, n, seed, options);
    return {std::move(analytic), std::move(run)};
}

} // namespace hqs::experiments
