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


// Acceptance gate: runs each criterion at its stated tolerance and time
// budget and prints one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (capped at 1).

#include <hqs/experiments/entangled.hpp>
#include <hqs/experiments/eraser.hpp>
#include <hqs/experiments/interferometers.hpp>
#include <hqs/experiments/two_slit.hpp>
#include <hqs/io/command.hpp>
#include <hqs/mead.hpp>
#include <hqs/statistics.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace hqs;
using namespace hqs::experiments;

constexpr std::uint64_t kSeed = 20261016;

/// Accumulates sub-checks of one criterion.
struct Verdict {
    bool ok = true;
    std::string detail;

    void check(bool cond, std::string const& what)
    {
        if (!detail.empty()) {
            detail += "; ";
        }
        detail += what;
        if (!cond) {
            detail += " [violated]";
            ok = false;
        }
    }
};

std::string fmt(char const* f, double a, double b = 0.0, double c = 0.0)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

struct Criterion {
    int id;
    std::string name;
    double budget_s;
    std::function<Verdict()> body;
};

// ---------------------------------------------------------------------------

Verdict mz_open()
{
    Verdict v;
    auto const table = mach_zehnder(false);
    v.check(table.at("D1") == 1.0 || std::abs(table.at("D1") - 1.0) <= 1e-15,
            fmt("analytic D1 = %.17g", table.at("D1")));
    v.check(table.at("D2") == 0.0, fmt("analytic D2 = %.17g", table.at("D2")));
    auto const run = run_events(mach_zehnder_network(false), 100000, kSeed, {false, 0});
    v.check(run.count("D2") == 0, fmt("MC counts[D2] = %.0f of 1e5", double(run.count("D2"))));
    return v;
}

Verdict mz_blocked()
{
    Verdict v;
    auto const run = run_events(mach_zehnder_network(true), 100000, kSeed, {false, 0});
    for (auto const& [label, p] : {std::pair{"D1", 0.25}, {"D2", 0.25}, {"Obj", 0.5}}) {
        double const f = double(run.count(label)) / 1e5;
        double const bound = 4.0 * std::sqrt(p * (1 - p) / 1e5);
        v.check(std::abs(f - p) <= bound, std::string(label) + fmt(" %.5f (|d| %.5f <= %.5f)", f, std::abs(f - p), bound));
    }
    return v;
}

Verdict ev_recursion()
{
    Verdict v;
    auto const r = ev_recursive(100000, kSeed);
    v.check(std::abs(r.detected_fraction() - 1.0 / 3.0) <= 0.012, fmt("D2 fraction %.5f", r.detected_fraction()));
    v.check(std::abs(r.mean_photons() - 4.0 / 3.0) <= 0.01, fmt("photons/trial %.5f", r.mean_photons()));
    return v;
}

Verdict bubble()
{
    Verdict v;
    auto const run = einstein_bubble(64, 100000, kSeed, {true, 0});
    bool one_each = run.records.size() == 100000 && run.total() == 100000;
    for (std::size_t i = 0; one_each && i < run.records.size(); ++i) {
        one_each = run.records[i].event_index == i;
    }
    v.check(one_each, "one detection per event over 1e5 events");
    std::vector<double> const probs(64, 1.0 / 64.0);
    auto const chi = stats::chi_square_test(run.counts, probs);
    v.check(chi.p_value > 0.001, fmt("chi-square p = %.4f (stat %.2f, dof %.0f)", chi.p_value, chi.statistic, double(chi.dof)));
    return v;
}

Verdict two_slits()
{
    Verdict v;
    TwoSlitConfig cfg;
    auto const p = two_slit(cfg);
    v.check(p.visibility >= 1.0 - 1e-9, fmt("unlabeled V = %.12f", p.visibility));
    double worst = 0.0;
    for (double x : p.minima) {
        double const d = std::abs(path_difference(cfg, x));
        worst = std::max(worst, std::abs(d - std::floor(d) - 0.5));
    }
    v.check(!p.minima.empty() && worst < 1e-6,
            fmt("%.0f minima at half-integer path difference (max dev %.2g)", double(p.minima.size()), worst));
    TwoSlitConfig labeled = cfg;
    labeled.labeled = true;
    double const vl = two_slit(labeled).visibility;
    v.check(vl <= 1e-9, fmt("labeled V = %.3g", vl));
    auto const run = run_events(two_slit_network(cfg), 100000, kSeed, {false, 0});
    std::vector<double> probs;
    for (auto const& e : run.table.entries) {
        probs.push_back(e.echo);
    }
    auto const chi = stats::chi_square_test(run.counts, probs);
    v.check(chi.p_value > 0.001, fmt("histogram chi-square p = %.4f", chi.p_value));
    return v;
}

Verdict delayed()
{
    Verdict v;
    for (bool up : {true, false}) {
        auto const a = delayed_choice(up, DecisionTime::before_slits, 100000, kSeed, {false, 0});
        auto const b = delayed_choice(up, DecisionTime::after_slits, 100000, kSeed, {false, 0});
        v.check(a.counts == b.counts, up ? "screen up: before == after" : "screen down: before == after");
    }
    return v;
}

Verdict afshar_wires()
{
    Verdict v;
    double const both = afshar(10, 0.06, true).intercepted_fraction;
    double const one = afshar(10, 0.06, false).intercepted_fraction;
    v.check(both < 0.002, fmt("both slits %.3e", both));
    v.check(std::abs(one - 0.06) <= 0.003, fmt("one slit %.4f", one));
    return v;
}

Verdict epr_chsh()
{
    Verdict v;
    double sq = 0.0;
    for (int i = 0; i < 19; ++i) {
        double const delta = 5.0 * i;
        auto const run = epr(0.0, delta, 20000, derive_seed(kSeed, static_cast<std::uint64_t>(i)), {false, 0}).run;
        double const s = std::sin(delta * M_PI / 180.0);
        double const r = correlation(run).p_different - s * s;
        sq += r * r;
    }
    double const rms = std::sqrt(sq / 19.0);
    v.check(rms < 0.01, fmt("Malus RMS residual %.5f", rms));
    auto const c = chsh(0, 45, 22.5, 67.5, 1000000, kSeed);
    v.check(std::abs(c.S - 2.828) <= 0.02, fmt("S = %.5f (stderr %.5f)", c.S, c.stderr_));
    return v;
}

Verdict hardy_atom()
{
    Verdict v;
    auto const r = hardy(100000, kSeed, AtomPreparation::x_plus, {false, 0});
    double const n = 1e5;
    for (auto const& [name, p, k] : {std::tuple{"absorbed", 0.25, double(r.run.count("absorbed"))},
                                     std::tuple{"D1", 0.625, double(r.d1_events())},
                                     std::tuple{"D2", 0.125, double(r.d2_events())}}) {
        double const f = k / n;
        v.check(std::abs(f - p) <= 4.0 * std::sqrt(p * (1 - p) / n), std::string(name) + fmt(" %.5f", f));
    }
    v.check(r.d2_events() >= 10000, fmt("%.0f conditional events", double(r.d2_events())));
    v.check(std::abs(r.p_xminus_given_d2() - 0.5) <= 0.02, fmt("P(x-|D2) = %.4f", r.p_xminus_given_d2()));
    return v;
}

Verdict eraser_scans()
{
    Verdict v;
    auto const scan = uniform_phase_scan(32);
    auto const plain = eraser({false, false, false}, scan, 20000, kSeed);
    auto const qwp = eraser({true, false, false}, scan, 20000, kSeed);
    auto const erased = eraser({true, true, false}, scan, 20000, kSeed);
    v.check(*plain.empirical_visibility >= 0.98, fmt("no QWP V = %.4f", *plain.empirical_visibility));
    v.check(*qwp.empirical_visibility <= 0.02, fmt("QWP V = %.4f", *qwp.empirical_visibility));
    v.check(*erased.empirical_visibility >= 0.98, fmt("QWP+eraser V = %.4f", *erased.empirical_visibility));
    bool same = true;
    for (bool qwp_in : {false, true}) {
        for (bool filter : {false, true}) {
            auto const a = eraser({qwp_in, filter, false}, scan, 20000, kSeed);
            auto const b = eraser({qwp_in, filter, true}, scan, 20000, kSeed);
            same = same && a.counts == b.counts;
        }
    }
    v.check(same, "delayed flag bit-identical");
    return v;
}

Verdict avalanche()
{
    Verdict v;
    mead::AvalancheConfig cfg;
    cfg.omega = 2.0 * M_PI * 2.0;
    auto const traj = mead::integrate_pair(cfg);
    double err = 0.0, cons = 0.0;
    for (auto const& s : traj) {
        double const exact = cfg.x0 / (cfg.x0 + (1.0 - cfg.x0) * std::exp(-cfg.k * s.t));
        err = std::max(err, std::abs(s.x_absorber_excited - exact));
        cons = std::max(cons, std::abs(s.x_emitter_excited + s.x_absorber_excited - 1.0));
    }
    v.check(err < 1e-8, fmt("max |x - logistic| = %.2e", err));
    v.check(cons < 1e-9, fmt("max |xE + xA - 1| = %.2e", cons));

    // log-slope fit while x_A < 0.05, started deep in the linear regime
    mead::AvalancheConfig early = cfg;
    early.x0 = 1e-4;
    early.omega = 0.0;
    double st = 0, sy = 0, stt = 0, sty = 0, n = 0;
    for (auto const& s : mead::integrate_pair(early)) {
        if (s.x_absorber_excited >= 0.05) {
            break;
        }
        double const y = std::log(s.x_absorber_excited);
        st += s.t, sy += y, stt += s.t * s.t, sty += s.t * y, n += 1;
    }
    double const rate = (n * sty - st * sy) / (n * stt - st * st);
    v.check(std::abs(rate / early.k - 1.0) <= 0.02, fmt("early rate %.4f k", rate / early.k));

    double const dt = cfg.step();
    double const peak = mead::dft_peak_frequency(mead::dipole_signal(traj, cfg.omega), dt);
    double const bin = 1.0 / (static_cast<double>(traj.size()) * dt);
    v.check(std::abs(peak - cfg.omega / (2.0 * M_PI)) <= bin, fmt("spectral peak %.4f vs %.4f (bin %.4f)", peak, cfg.omega / (2.0 * M_PI), bin));
    return v;
}

Verdict competition()
{
    Verdict v;
    mead::CompeteConfig cfg;
    cfg.trials = 10000;
    cfg.seed = kSeed;
    auto const even = mead::compete(cfg);
    double const f = even.fraction(0);
    v.check(std::abs(f - 0.5) <= 4.0 * std::sqrt(0.25 / 1e4), fmt("equal couplings: %.4f / %.4f", f, 1.0 - f));
    std::string fractions;
    double prev = -1.0;
    bool monotone = true;
    for (double k0 : {1.0, 2.0, 4.0, 8.0}) {
        mead::CompeteConfig c = cfg;
        c.k_list = {k0, 1.0};
        double const w = mead::compete(c).fraction(0);
        monotone = monotone && w >= prev;
        prev = w;
        fractions += fmt(" %.4f", w);
    }
    v.check(monotone, "win fraction vs k0 = 1,2,4,8:" + fractions);
    return v;
}

Verdict reproducibility()
{
    namespace fs = std::filesystem;
    Verdict v;
    auto const dir = fs::temp_directory_path() / "hqs_acceptance";
    fs::create_directories(dir);
    auto const s = std::to_string(kSeed);
    std::vector<std::pair<std::string, std::vector<std::string>>> const runs{
        {"mz_open", {"run", "mz", "--events", "100000", "--seed", s}},
        {"mz_blocked", {"run", "mz", "--param", "blocked=true", "--events", "100000", "--seed", s}},
        {"ev", {"run", "ev_recursive", "--events", "100000", "--seed", s}},
        {"bubble", {"run", "einstein_bubble", "--events", "100000", "--seed", s}},
        {"two_slit", {"run", "two_slit", "--events", "100000", "--seed", s, "--format", "csv"}},
        {"delayed", {"run", "delayed_choice", "--param", "decision_time=after_slits", "--events", "100000", "--seed", s}},
        {"afshar", {"run", "afshar", "--events", "100000", "--seed", s}},
        {"epr", {"scan", "epr", "--param", "delta=0:90:19", "--events", "20000", "--seed", s}},
        {"chsh", {"run", "chsh", "--events", "1000000", "--seed", s}},
        {"hardy", {"run", "hardy", "--events", "100000", "--seed", s}},
        {"eraser", {"run", "eraser", "--param", "qwp_in=true", "--events", "20000", "--seed", s}},
        {"avalanche", {"dynamics", "avalanche", "--param", "omega=12.566370614359172", "--seed", s}},
        {"compete", {"dynamics", "compete", "--param", "trials=10000", "--seed", s}},
    };
    bool all_same = true;
    std::string differing;
    for (auto const& [name, args] : runs) {
        std::string bytes[2];
        char const* threads[2] = {"1", "3"};
        for (int t = 0; t < 2; ++t) {
            ::setenv("HQS_THREADS", threads[t], 1);
            auto const path = dir / (name + ".out"); // same path: the spec echo records it
            auto full = args;
            full.push_back("--out");
            full.push_back(path.string());
            std::ostringstream out, err;
            int const code = io::run_command(full, out, err);
            if (code != 0) {
                all_same = false;
                differing += " " + name + "(exit " + std::to_string(code) + ")";
            }
            std::ifstream in(path, std::ios::binary);
            bytes[t].assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
        }
        ::unsetenv("HQS_THREADS");
        if (bytes[0] != bytes[1] || bytes[0].empty()) {
            all_same = false;
            differing += " " + name;
        }
    }
    fs::remove_all(dir);
    v.check(all_same, std::to_string(runs.size()) + " result files, HQS_THREADS=1 vs 3" +
                          (differing.empty() ? std::string() : ", differing:" + differing));
    return v;
}

} // namespace

int main()
{
    std::vector<Criterion> const criteria{
        {1, "MZ open", 1.0, mz_open},
        {2, "MZ blocked", 1.0, mz_blocked},
        {3, "EV recursion", 2.0, ev_recursion},
        {4, "Einstein bubble", 1.0, bubble},
        {5, "Two-slit", 2.0, two_slits},
        {6, "Delayed choice", 1.0, delayed},
        {7, "Afshar", 1.0, afshar_wires},
        {8, "EPR / CHSH", 30.0, epr_chsh},
        {9, "Hardy", 5.0, hardy_atom},
        {10, "Eraser", 10.0, eraser_scans},
        {11, "Mead avalanche", 2.0, avalanche},
        {12, "Competition", 10.0, competition},
        {13, "Reproducibility", 120.0, reproducibility},
    };
    int failed = 0;
    for (auto const& c : criteria) {
        auto const t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.body();
        } catch (std::exception const& e) {
            v.check(false, std::string("exception: ") + e.what());
        }
        double const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool const in_time = secs < c.budget_s;
        bool const pass = v.ok && in_time;
        failed += pass ? 0 : 1;
        std::printf("%s %2d %-16s %6.2fs (budget %gs%s) %s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), secs,
                    c.budget_s, in_time ? "" : ", exceeded", v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
