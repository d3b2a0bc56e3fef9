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


#include <hqs/experiments/entangled.hpp>
#include <hqs/experiments/eraser.hpp>
#include <hqs/experiments/interferometers.hpp>
#include <hqs/experiments/two_slit.hpp>
#include <hqs/statistics.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <complex>

namespace {

using namespace hqs;
using namespace hqs::experiments;
using C = std::complex<double>;

constexpr double kEps = 1e-12;

// ---------------------------------------------------------------------------
// Interaction-free detection

TEST(EvRecursive, AnalyticMatchesGeometricSeries)
{
    auto const a = ev_recursive_analytic();
    double mean = 0.0, detected = 0.0;
    for (int k = 1; k < 200; ++k) {
        double const pk = std::pow(0.25, k - 1);
        mean += k * pk * 0.75;
        detected += pk * 0.25;
    }
    EXPECT_NEAR(a.mean_photons, mean, 1e-12);
    EXPECT_NEAR(a.detected, detected, 1e-12);
    EXPECT_NEAR(a.detected, 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(a.absorbed, 2.0 / 3.0, 1e-12);
}

TEST(EvRecursive, MonteCarlo)
{
    auto const r = ev_recursive(100000, 5);
    EXPECT_EQ(r.detected + r.absorbed, r.trials);
    EXPECT_LE(std::abs(r.detected_fraction() - 1.0 / 3.0), 4.0 * std::sqrt((2.0 / 9.0) / 1e5));
    EXPECT_NEAR(r.mean_photons(), 4.0 / 3.0, 0.01);
    auto const again = ev_recursive(100000, 5, 3);
    EXPECT_EQ(r.photons, again.photons);
    EXPECT_EQ(r.detected, again.detected);
}

TEST(EinsteinBubble, SymmetricEchoes)
{
    auto const table = echo_table(einstein_bubble_network(4));
    ASSERT_EQ(table.size(), 4u);
    for (auto const& e : table.entries) {
        EXPECT_NEAR(e.echo, 0.25, kEps);
    }
    EXPECT_THROW(einstein_bubble_network(1), std::invalid_argument);
}

TEST(EinsteinBubble, OneDetectionPerEventAndUniform)
{
    auto const run = einstein_bubble(64, 100000, 9);
    EXPECT_EQ(run.total(), 100000u);
    EXPECT_EQ(run.records.size(), 100000u);
    std::vector<double> const probs(64, 1.0 / 64.0);
    EXPECT_GT(stats::chi_square_test(run.counts, probs).p_value, 0.001);
}

// ---------------------------------------------------------------------------
// Two slits

TEST(TwoSlit, MinimaAtHalfIntegerPathDifference)
{
    TwoSlitConfig const cfg;
    auto const p = two_slit(cfg);
    EXPECT_GE(p.visibility, 1.0 - 1e-9);
    ASSERT_FALSE(p.minima.empty());
    for (double x : p.minima) {
        double const delta = std::abs(path_difference(cfg, x));
        EXPECT_NEAR(delta - std::floor(delta), 0.5, 1e-6) << x;
    }
}

TEST(TwoSlit, CenterIsGlobalMaximum)
{
    TwoSlitConfig const cfg;
    auto const p = two_slit(cfg);
    auto const center = cfg.bins / 2;
    EXPECT_NEAR(p.bin_centers[center], 0.0, kEps);
    for (double q : p.probabilities) {
        EXPECT_LE(q, p.probabilities[center] + 1e-15);
    }
}

TEST(TwoSlit, BinsMatchTwoPhasorOracle)
{
    TwoSlitConfig const cfg;
    auto const p = two_slit(cfg);
    double const half = cfg.slit_separation / 2.0;
    std::vector<double> oracle;
    double total = 0.0;
    for (double x : p.bin_centers) {
        double const r1 = std::hypot(cfg.screen_distance, x - half);
        double const r2 = std::hypot(cfg.screen_distance, x + half);
        double const i = std::norm(std::polar(1.0, 2 * M_PI * r1) + std::polar(1.0, 2 * M_PI * r2));
        oracle.push_back(i);
        total += i;
    }
    for (std::size_t k = 0; k < oracle.size(); ++k) {
        EXPECT_NEAR(p.probabilities[k], oracle[k] / total, 1e-9);
    }
}

TEST(TwoSlit, LabeledHasNoFringes)
{
    TwoSlitConfig cfg;
    cfg.labeled = true;
    auto const p = two_slit(cfg);
    EXPECT_LE(p.visibility, 1e-9);
    // intensity follows the one-slit sum of the two squared moduli: flat here
    for (double q : p.probabilities) {
        EXPECT_NEAR(q, 1.0 / static_cast<double>(cfg.bins), 1e-12);
    }
}

TEST(TwoSlit, MonteCarloHistogram)
{
    TwoSlitConfig const cfg;
    auto const net = two_slit_network(cfg);
    auto const run = run_events(net, 100000, 4, {false, 0});
    std::vector<double> probs;
    for (auto const& e : run.table.entries) {
        probs.push_back(e.echo);
    }
    EXPECT_GT(stats::chi_square_test(run.counts, probs).p_value, 0.001);
}

TEST(TwoSlit, BadConfig)
{
    TwoSlitConfig cfg;
    cfg.bins = 200;
    EXPECT_THROW(two_slit(cfg), std::invalid_argument);
}

TEST(DelayedChoice, DecisionTimeIrrelevant)
{
    for (bool up : {true, false}) {
        auto const a = delayed_choice(up, DecisionTime::before_slits, 50000, 21);
        auto const b = delayed_choice(up, DecisionTime::after_slits, 50000, 21);
        EXPECT_EQ(a.counts, b.counts);
    }
}

TEST(DelayedChoice, ScreenDownSplitsEvenly)
{
    auto const run = delayed_choice(false, DecisionTime::after_slits, 100000, 8);
    ASSERT_EQ(run.table.size(), 2u);
    for (auto c : run.counts) {
        EXPECT_LE(std::abs(double(c) / 1e5 - 0.5), 4.0 * std::sqrt(0.25 / 1e5));
    }
    EXPECT_EQ(decision_time_from(to_string(DecisionTime::after_slits)), DecisionTime::after_slits);
    EXPECT_THROW(decision_time_from("later"), std::invalid_argument);
}

TEST(Afshar, ClosedFormPerWire)
{
    // cos^2 fringes: each wire of width w (periods) on a zero removes w - sin(pi w)/pi of a period's light
    for (double w : {0.0, 0.01, 0.06, 0.2}) {
        double const closed = w - std::sin(M_PI * w) / M_PI;
        EXPECT_NEAR(afshar(10, w, true).intercepted_fraction, closed, 1e-12) << w;
        EXPECT_NEAR(afshar(10, w, false).intercepted_fraction, w, 1e-12) << w;
    }
    EXPECT_LT(afshar(10, 0.06, true).intercepted_fraction, 0.002);
    EXPECT_NEAR(afshar(10, 0.06, true).intercepted_fraction, std::pow(M_PI, 2) * std::pow(0.06, 3) / 6.0, 2e-6);
    EXPECT_THROW(afshar(10, 1.5, true), std::invalid_argument);
    EXPECT_THROW(afshar(0, 0.06, true), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Entangled pairs

/// P(a, b) for (HH + VV)/sqrt2 with a, b in {pass, reject} of linear analyzers.
double joint_oracle(double tl, double tr, int a, int b)
{
    auto axis = [](double t, int pass) {
        double const r = t * M_PI / 180.0;
        return pass == 0 ? std::array<double, 2>{std::cos(r), std::sin(r)}
                         : std::array<double, 2>{-std::sin(r), std::cos(r)};
    };
    auto const l = axis(tl, a);
    auto const rr = axis(tr, b);
    double const amp = (l[0] * rr[0] + l[1] * rr[1]) / std::sqrt(2.0);
    return amp * amp;
}

TEST(Epr, TableMatchesEnumeration)
{
    RandomStream s(2, 0);
    char const* labels[2][2] = {{"HH", "HV"}, {"VH", "VV"}};
    for (int i = 0; i < 50; ++i) {
        double const tl = 360.0 * s.uniform();
        double const tr = 360.0 * s.uniform();
        auto const t = epr_table(tl, tr);
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                EXPECT_NEAR(t.at(labels[a][b]), joint_oracle(tl, tr, a, b), 1e-12);
            }
        }
    }
}

TEST(Epr, Examples)
{
    auto const same = correlation(epr_table(0, 0));
    EXPECT_NEAR(same.p_different, 0.0, kEps);
    EXPECT_NEAR(correlation(epr_table(0, 90)).p_same, 0.0, kEps);
    EXPECT_NEAR(correlation(epr_table(10, 40)).p_different, 0.25, kEps);
    for (double d = 0; d <= 90; d += 5) {
        double const s = std::sin(d * M_PI / 180.0);
        EXPECT_NEAR(correlation(epr_table(17, 17 + d)).p_different, s * s, 1e-12);
    }
}

TEST(Chsh, Analytic)
{
    EXPECT_NEAR(chsh_analytic(0, 45, 22.5, 67.5).S, 2.0 * std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(chsh_analytic(30, 30, 30, 30).S, 2.0, 1e-12);
}

TEST(Chsh, MonteCarlo)
{
    auto const r = chsh(0, 45, 22.5, 67.5, 100000, 77);
    EXPECT_LE(std::abs(r.S - 2.0 * std::sqrt(2.0)), 4.0 * r.stderr_);
    auto const again = chsh(0, 45, 22.5, 67.5, 100000, 77, {false, 4});
    EXPECT_EQ(r.S, again.S);
}

// ---------------------------------------------------------------------------
// Atom in one arm

TEST(Hardy, PathSumOracle)
{
    C const t{M_SQRT1_2, 0}, r{0, M_SQRT1_2};
    double const a = M_SQRT1_2;
    // photon via the atom arm (reflected at S1) is absorbed when the atom is z+
    C const d1_zp = t * r * a;                 // transmitted arm only
    C const d1_zm = (r * t + t * r) * a;       // both arms
    C const d2_zp = t * t * a;
    C const d2_zm = (r * r + t * t) * a;
    auto x = [](C zp, C zm, double sign) { return std::norm((zp + sign * zm) / std::sqrt(2.0)); };

    auto const h = hardy_analytic();
    EXPECT_NEAR(h.outcomes.at("absorbed"), std::norm(r * a), kEps);
    EXPECT_NEAR(h.outcomes.at("D1_x+"), x(d1_zp, d1_zm, 1), kEps);
    EXPECT_NEAR(h.outcomes.at("D1_x-"), x(d1_zp, d1_zm, -1), kEps);
    EXPECT_NEAR(h.outcomes.at("D2_x+"), x(d2_zp, d2_zm, 1), kEps);
    EXPECT_NEAR(h.outcomes.at("D2_x-"), x(d2_zp, d2_zm, -1), kEps);

    EXPECT_NEAR(h.absorbed, 0.25, kEps);
    EXPECT_NEAR(h.d1, 0.625, kEps);
    EXPECT_NEAR(h.d2, 0.125, kEps);
    EXPECT_NEAR(h.p_xminus_given_d2, 0.5, kEps);
    EXPECT_NEAR(h.p_xminus_given_d1, 0.1, kEps);
    EXPECT_NEAR(h.outcomes.total(), 1.0, kEps);
}

TEST(Hardy, Preparations)
{
    auto const zp = hardy_analytic(AtomPreparation::z_plus);
    EXPECT_NEAR(zp.absorbed, 0.5, kEps);
    auto const zm = hardy_analytic(AtomPreparation::z_minus);
    EXPECT_NEAR(zm.absorbed, 0.0, kEps);
    EXPECT_NEAR(zm.d2, 0.0, kEps);
    EXPECT_EQ(atom_preparation_from("z-"), AtomPreparation::z_minus);
    EXPECT_THROW(atom_preparation_from("y+"), std::invalid_argument);
}

TEST(Hardy, MonteCarlo)
{
    auto const r = hardy(100000, 13);
    EXPECT_GE(r.d2_events(), 10000u);
    EXPECT_NEAR(r.p_xminus_given_d2(), 0.5, 0.02);
}

// ---------------------------------------------------------------------------
// Eraser

TEST(Eraser, Visibilities)
{
    auto const scan = uniform_phase_scan(32);
    EXPECT_GE(eraser({false, false, false}, scan, 0, 0).analytic_visibility, 1.0 - 1e-9);
    EXPECT_LE(eraser({true, false, false}, scan, 0, 0).analytic_visibility, 1e-9);
    EXPECT_GE(eraser({true, true, false}, scan, 0, 0).analytic_visibility, 1.0 - 1e-9);
}

TEST(Eraser, RatesAreASingleCosine)
{
    auto const scan = uniform_phase_scan(32);
    for (bool qwp : {false, true}) {
        for (bool filter : {false, true}) {
            auto const r = eraser({qwp, filter, false}, scan, 0, 0);
            // project onto 1, cos, sin and check the residual vanishes
            double a0 = 0, ac = 0, as = 0;
            for (std::size_t k = 0; k < scan.size(); ++k) {
                a0 += r.analytic_rates[k] / 32.0;
                ac += 2.0 * r.analytic_rates[k] * std::cos(scan[k]) / 32.0;
                as += 2.0 * r.analytic_rates[k] * std::sin(scan[k]) / 32.0;
            }
            for (std::size_t k = 0; k < scan.size(); ++k) {
                EXPECT_NEAR(r.analytic_rates[k], a0 + ac * std::cos(scan[k]) + as * std::sin(scan[k]), 1e-12);
            }
        }
    }
}

TEST(Eraser, DelayIsInvisible)
{
    auto const scan = uniform_phase_scan(16);
    auto const a = eraser({true, true, false}, scan, 5000, 3);
    auto const b = eraser({true, true, true}, scan, 5000, 3);
    EXPECT_EQ(a.counts, b.counts);
    EXPECT_EQ(a.analytic_rates, b.analytic_rates);
}

TEST(Eraser, ShortScanRejected)
{
    EXPECT_THROW(eraser({}, uniform_phase_scan(7), 0, 0), std::invalid_argument);
}

} // namespace
