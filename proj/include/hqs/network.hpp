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
#include <hqs/wavecore.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace hqs {

namespace element {

struct Source {
    PolarizedAmplitude emission = PolarizedAmplitude::vertical();
};
/// Ports in0/in1 -> out0/out1; in0->out0 and in1->out1 transmit.
struct BeamSplitter {};
struct Mirror {};
struct PhaseSegment {
    double length = 0.0; ///< wavelengths
};
struct HalfWavePlate {
    double axis = 0.0; ///< degrees from H
};
struct QuarterWaveDouble {
    double axis = 0.0;
};
/// `out` carries the projection on the axis, `reject` the orthogonal projection.
struct Polarizer {
    double axis = 0.0;
};
/// One input spread over `ways` outputs with real amplitude 1/sqrt(ways).
struct Fanout {
    std::size_t ways = 2;
};
struct Blocker {};
struct Detector {};
/// Array of terminal bins at `distance` behind a plane of apertures; input
/// port in<j> is the aperture at transverse position apertures[j].
struct Screen {
    std::size_t bins = 0;
    double half_width = 0.0;
    double distance = 0.0;
    std::vector<double> apertures;

    [[nodiscard]] double bin_center(std::size_t k) const
    {
        if (bins == 1) {
            return 0.0;
        }
        return -half_width + 2.0 * half_width * static_cast<double>(k) / static_cast<double>(bins - 1);
    }
};

} // namespace element

using ElementKind =
    std::variant<element::Source, element::BeamSplitter, element::Mirror, element::PhaseSegment,
                 element::HalfWavePlate, element::QuarterWaveDouble, element::Polarizer,
                 element::Fanout, element::Blocker, element::Detector, element::Screen>;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline std::string_view kind_name(ElementKind const& kind)
{
    return std::visit(
        overloaded{[](element::Source const&) { return "source"; },
                   [](element::BeamSplitter const&) { return "beamsplitter"; },
                   [](element::Mirror const&) { return "mirror"; },
                   [](element::PhaseSegment const&) { return "phase_segment"; },
                   [](element::HalfWavePlate const&) { return "halfwave_plate"; },
                   [](element::QuarterWaveDouble const&) { return "quarterwave_double"; },
                   [](element::Polarizer const&) { return "polarizer"; },
                   [](element::Fanout const&) { return "fanout"; },
                   [](element::Blocker const&) { return "blocker"; },
                   [](element::Detector const&) { return "detector"; },
                   [](element::Screen const&) { return "screen"; }},
        kind);
}

inline bool is_absorber(ElementKind const& kind)
{
    return std::holds_alternative<element::Blocker>(kind) ||
           std::holds_alternative<element::Detector>(kind) ||
           std::holds_alternative<element::Screen>(kind);
}

inline std::vector<std::string> numbered_ports(std::string_view prefix, std::size_t count)
{
    std::vector<std::string> ports;
    ports.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        ports.push_back(std::string(prefix) + std::to_string(i));
    }
    return ports;
}

inline std::vector<std::string> input_ports(ElementKind const& kind)
{
    return std::visit(overloaded{[](element::Source const&) { return std::vector<std::string>{}; },
                                 [](element::BeamSplitter const&) { return numbered_ports("in", 2); },
                                 [](element::Screen const& s) {
                                     return numbered_ports("in", s.apertures.size());
                                 },
                                 [](auto const&) { return std::vector<std::string>{"in"}; }},
                      kind);
}

inline std::vector<std::string> output_ports(ElementKind const& kind)
{
    return std::visit(
        overloaded{[](element::Source const&) { return std::vector<std::string>{"out"}; },
                   [](element::BeamSplitter const&) { return numbered_ports("out", 2); },
                   [](element::Polarizer const&) { return std::vector<std::string>{"out", "reject"}; },
                   [](element::Fanout const& f) { return numbered_ports("out", f.ways); },
                   [](element::Blocker const&) { return std::vector<std::string>{}; },
                   [](element::Detector const&) { return std::vector<std::string>{}; },
                   [](element::Screen const&) { return std::vector<std::string>{}; },
                   [](auto const&) { return std::vector<std::string>{"out"}; }},
        kind);
}

struct Link {
    std::string target;
    std::string port;
};

struct Element {
    std::string id;
    ElementKind kind;
    std::map<std::string, Link> outputs; ///< output port -> downstream input
};

/// Amplitude leaving one output port of a non-terminal element.
struct Emission {
    std::string port;
    PolarizedAmplitude amplitude;
    double added_length = 0.0;
};

/// Scattering rule of a non-terminal element for light arriving at `in_port`.
inline std::vector<Emission> scatter(ElementKind const& kind, std::string_view in_port,
                                     PolarizedAmplitude const& in)
{
    return std::visit(
        overloaded{
            [&](element::Source const&) -> std::vector<Emission> {
                throw std::logic_error("scatter: a source has no inputs");
            },
            [&](element::BeamSplitter const&) -> std::vector<Emission> {
                auto const [t, r] = beamsplitter_scatter(in);
                if (in_port == "in0") {
                    return {{"out0", t}, {"out1", r}};
                }
                return {{"out0", r}, {"out1", t}};
            },
            [&](element::Mirror const&) -> std::vector<Emission> { return {{"out", in}}; },
            [&](element::PhaseSegment const& p) -> std::vector<Emission> {
                return {{"out", path_phase(p.length) * in, p.length}};
            },
            [&](element::HalfWavePlate const& p) -> std::vector<Emission> {
                return {{"out", waveplate_apply(in, WaveplateKind::half, p.axis)}};
            },
            [&](element::QuarterWaveDouble const& p) -> std::vector<Emission> {
                return {{"out", waveplate_apply(in, WaveplateKind::quarter_double_pass, p.axis)}};
            },
            [&](element::Polarizer const& p) -> std::vector<Emission> {
                return {{"out", polarizer_project(in, p.axis)},
                        {"reject", polarizer_project(in, p.axis + 90.0)}};
            },
            [&](element::Fanout const& f) -> std::vector<Emission> {
                double const scale = 1.0 / std::sqrt(static_cast<double>(f.ways));
                std::vector<Emission> out;
                out.reserve(f.ways);
                for (std::size_t i = 0; i < f.ways; ++i) {
                    out.push_back({"out" + std::to_string(i), ComplexAmplitude{scale, 0.0} * in});
                }
                return out;
            },
            [&](auto const&) -> std::vector<Emission> {
                throw std::logic_error("scatter: absorbers are terminal");
            }},
        kind);
}

/// Label of screen bin k, zero-padded so lexicographic order is bin order.
inline std::string screen_bin_id(std::string const& screen_id, std::size_t k, std::size_t bins)
{
    std::string digits = std::to_string(k);
    std::size_t const width = std::to_string(bins > 0 ? bins - 1 : 0).size();
    if (digits.size() < width) {
        digits.insert(0, width - digits.size(), '0');
    }
    return screen_id + "[" + digits + "]";
}

/**
 * Immutable directed graph of optical elements with one source. Built with
 * NetworkBuilder; structural defects (dangling ports, cycles) are reported
 * by validate() rather than rejected here.
 */
class OpticalNetwork {
public:
    [[nodiscard]] std::vector<Element> const& elements() const noexcept { return elements_; }
    [[nodiscard]] std::string const& source_id() const noexcept { return elements_[source_].id; }
    [[nodiscard]] std::size_t source_index() const noexcept { return source_; }
    [[nodiscard]] PolarizedAmplitude const& emission() const
    {
        return std::get<element::Source>(elements_[source_].kind).emission;
    }

    [[nodiscard]] std::optional<std::size_t> find(std::string_view id) const
    {
        auto const it = index_.find(std::string(id));
        if (it == index_.end()) {
            return std::nullopt;
        }
        return it->second;
    }
    [[nodiscard]] Element const& at(std::string_view id) const
    {
        auto const idx = find(id);
        if (!idx) {
            throw std::out_of_range("no element '" + std::string(id) + "'");
        }
        return elements_[*idx];
    }

    /// Absorber labels in declaration order, screen bins expanded in bin order.
    [[nodiscard]] std::vector<std::string> const& absorbers() const noexcept { return absorbers_; }
    /// First absorber slot of element `element_index` (absorbers only).
    [[nodiscard]] std::size_t absorber_offset(std::size_t element_index) const
    {
        return absorber_offset_.at(element_index);
    }

private:
    friend class NetworkBuilder;

    std::vector<Element> elements_;
    std::unordered_map<std::string, std::size_t> index_;
    std::size_t source_ = 0;
    std::vector<std::string> absorbers_;
    std::unordered_map<std::size_t, std::size_t> absorber_offset_;
};

class NetworkBuilder {
public:
    NetworkBuilder& add(std::string id, ElementKind kind)
    {
        elements_.push_back({std::move(id), std::move(kind), {}});
        return *this;
    }

    /// Wire `from`.`out_port` to `to`.`in_port`. An empty `in_port` picks the
    /// target's only input when that is unambiguous (resolved at build time).
    NetworkBuilder& connect(std::string const& from, std::string const& out_port, std::string to,
                            std::string in_port = {})
    {
        auto it = std::find_if(elements_.begin(), elements_.end(),
                               [&](Element const& e) { return e.id == from; });
        if (it == elements_.end()) {
            throw std::invalid_argument("connect: unknown element '" + from + "'");
        }
        it->outputs[out_port] = Link{std::move(to), std::move(in_port)};
        return *this;
    }

    [[nodiscard]] OpticalNetwork build() const
    {
        OpticalNetwork net;
        net.elements_ = elements_;
        std::optional<std::size_t> source;
        for (std::size_t i = 0; i < net.elements_.size(); ++i) {
            auto const& e = net.elements_[i];
            if (e.id.empty()) {
                throw std::invalid_argument("element with empty id");
            }
            if (!net.index_.emplace(e.id, i).second) {
                throw std::invalid_argument("duplicate element id '" + e.id + "'");
            }
            if (std::holds_alternative<element::Source>(e.kind)) {
                if (source) {
                    throw std::invalid_argument("more than one source ('" +
                                                net.elements_[*source].id + "', '" + e.id + "')");
                }
                source = i;
            }
            check_parameters(e);
        }
        if (!source) {
            throw std::invalid_argument("network has no source");
        }
        net.source_ = *source;

        for (auto& e : net.elements_) {
            for (auto& [port, link] : e.outputs) {
                if (!link.port.empty()) {
                    continue;
                }
                if (auto t = net.index_.find(link.target); t != net.index_.end()) {
                    auto const ins = input_ports(net.elements_[t->second].kind);
                    if (ins.size() == 1) {
                        link.port = ins.front();
                    }
                }
            }
        }

        for (std::size_t i = 0; i < net.elements_.size(); ++i) {
            auto const& e = net.elements_[i];
            if (!is_absorber(e.kind)) {
                continue;
            }
            net.absorber_offset_[i] = net.absorbers_.size();
            if (auto const* s = std::get_if<element::Screen>(&e.kind)) {
                for (std::size_t k = 0; k < s->bins; ++k) {
                    net.absorbers_.push_back(screen_bin_id(e.id, k, s->bins));
                }
            } else {
                net.absorbers_.push_back(e.id);
            }
        }
        return net;
    }

private:
    static void check_parameters(Element const& e)
    {
        auto fail = [&](std::string const& what) {
            throw std::invalid_argument("element '" + e.id + "': " + what);
        };
        std::visit(overloaded{[&](element::Source const& s) {
                                  if (!s.emission.finite() || s.emission.norm2() == 0.0) {
                                      fail("emission must be finite and nonzero");
                                  }
                              },
                              [&](element::PhaseSegment const& p) {
                                  if (!std::isfinite(p.length) || p.length < 0.0) {
                                      fail("phase_segment length must be >= 0");
                                  }
                              },
                              [&](element::Fanout const& f) {
                                  if (f.ways < 1) {
                                      fail("fanout needs at least one output");
                                  }
                              },
                              [&](element::Screen const& s) {
                                  if (s.bins < 1 || s.apertures.empty()) {
                                      fail("screen needs bins >= 1 and at least one aperture");
                                  }
                                  if (!(s.distance > 0.0) || !(s.half_width >= 0.0)) {
                                      fail("screen needs distance > 0 and half_width >= 0");
                                  }
                              },
                              [](auto const&) {}},
                   e.kind);
    }

    std::vector<Element> elements_;
};

// ---------------------------------------------------------------------------
// Validation

struct Defect {
    enum class Kind { dangling_port, cycle, unreachable_absorber, echo_sum };
    Kind kind;
    std::string element_id;
    std::string message;
};

struct ValidationReport {
    std::vector<Defect> defects;
    std::optional<double> echo_sum; ///< absent when the graph has a cycle

    [[nodiscard]] bool ok() const noexcept { return defects.empty(); }
    [[nodiscard]] bool has(Defect::Kind kind) const noexcept
    {
        return std::any_of(defects.begin(), defects.end(),
                           [&](Defect const& d) { return d.kind == kind; });
    }
};

inline constexpr double kEchoSumTolerance = 1e-9;
inline constexpr std::size_t kDefaultPathCap = 1'000'000;

namespace detail {

/// Resolved downstream (element index, input port) or nullopt when dangling.
inline std::optional<std::pair<std::size_t, std::string>>
resolve(OpticalNetwork const& net, Link const& link)
{
    auto const idx = net.find(link.target);
    if (!idx) {
        return std::nullopt;
    }
    auto const ins = input_ports(net.elements()[*idx].kind);
    if (std::find(ins.begin(), ins.end(), link.port) == ins.end()) {
        return std::nullopt;
    }
    return std::pair{*idx, link.port};
}

inline std::vector<std::vector<std::size_t>> successors(OpticalNetwork const& net)
{
    std::vector<std::vector<std::size_t>> next(net.elements().size());
    for (std::size_t i = 0; i < net.elements().size(); ++i) {
        for (auto const& [port, link] : net.elements()[i].outputs) {
            if (auto r = resolve(net, link)) {
                next[i].push_back(r->first);
            }
        }
    }
    return next;
}

/// Element on a cycle, if any (iterative three-colour DFS).
inline std::optional<std::size_t> find_cycle(std::vector<std::vector<std::size_t>> const& next)
{
    enum : unsigned char { white, grey, black };
    std::vector<unsigned char> colour(next.size(), white);
    for (std::size_t root = 0; root < next.size(); ++root) {
        if (colour[root] != white) {
            continue;
        }
        std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
        colour[root] = grey;
        while (!stack.empty()) {
            auto& [node, child] = stack.back();
            if (child == next[node].size()) {
                colour[node] = black;
                stack.pop_back();
                continue;
            }
            std::size_t const n = next[node][child++];
            if (colour[n] == grey) {
                return n;
            }
            if (colour[n] == white) {
                colour[n] = grey;
                stack.emplace_back(n, 0);
            }
        }
    }
    return std::nullopt;
}

struct Walker {
    OpticalNetwork const& net;
    std::size_t cap;
    bool skip_dangling;
    std::vector<PathRecord> paths{};
    std::vector<std::string> trail{};

    void emit(PathRecord record)
    {
        if (paths.size() >= cap) {
            throw std::runtime_error("path explosion: more than " + std::to_string(cap) + " paths");
        }
        paths.push_back(std::move(record));
    }

    void leave(std::size_t idx, std::string const& out_port, PolarizedAmplitude const& amp,
               double length)
    {
        auto const& e = net.elements()[idx];
        auto const it = e.outputs.find(out_port);
        std::optional<std::pair<std::size_t, std::string>> next;
        if (it != e.outputs.end()) {
            next = resolve(net, it->second);
        }
        if (!next) {
            if (skip_dangling) {
                return;
            }
            throw std::invalid_argument("dangling port '" + e.id + "." + out_port + "'");
        }
        enter(next->first, next->second, amp, length);
    }

    void enter(std::size_t idx, std::string const& in_port, PolarizedAmplitude const& amp,
               double length)
    {
        auto const& e = net.elements()[idx];
        trail.push_back(e.id);
        if (auto const* screen = std::get_if<element::Screen>(&e.kind)) {
            std::size_t const port = std::stoul(in_port.substr(2));
            double const y = screen->apertures[port];
            double const scale = 1.0 / std::sqrt(static_cast<double>(screen->bins));
            std::size_t const offset = net.absorber_offset(idx);
            for (std::size_t k = 0; k < screen->bins; ++k) {
                double const dx = screen->bin_center(k) - y;
                double const r = std::hypot(screen->distance, dx);
                PathRecord rec;
                rec.element_ids = trail;
                rec.element_ids.back() = net.absorbers()[offset + k];
                rec.amplitude = (scale * path_phase(r)) * amp;
                rec.accumulated_length = length + r;
                rec.absorber_index = offset + k;
                rec.screen_port = std::pair{e.id, port};
                emit(std::move(rec));
            }
        } else if (is_absorber(e.kind)) {
            emit(PathRecord{trail, amp, length, net.absorber_offset(idx), std::nullopt});
        } else {
            for (auto const& out : scatter(e.kind, in_port, amp)) {
                leave(idx, out.port, out.amplitude, length + out.added_length);
            }
        }
        trail.pop_back();
    }

    void run()
    {
        std::size_t const src = net.source_index();
        trail.push_back(net.source_id());
        leave(src, "out", net.emission(), 0.0);
        trail.pop_back();
    }
};

inline std::vector<PathRecord> enumerate_paths(OpticalNetwork const& net, std::size_t cap,
                                               bool skip_dangling)
{
    Walker walker{net, cap, skip_dangling};
    walker.run();
    std::stable_sort(walker.paths.begin(), walker.paths.end(),
                     [](PathRecord const& a, PathRecord const& b) {
                         return a.element_ids < b.element_ids;
                     });
    return std::move(walker.paths);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Echo table and transaction selection

/// Confirmation echo per absorber, in deterministic absorber order.
struct EchoTable {
    struct Entry {
        std::string absorber;
        double echo = 0.0;
    };
    std::vector<Entry> entries;

    [[nodiscard]] double total() const noexcept
    {
        double sum = 0.0;
        for (auto const& e : entries) {
            sum += e.echo;
        }
        return sum;
    }
    [[nodiscard]] std::optional<std::size_t> index_of(std::string_view absorber) const
    {
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (entries[i].absorber == absorber) {
                return i;
            }
        }
        return std::nullopt;
    }
    [[nodiscard]] double at(std::string_view absorber) const
    {
        if (auto i = index_of(absorber)) {
            return entries[*i].echo;
        }
        throw std::out_of_range("no absorber '" + std::string(absorber) + "' in echo table");
    }
    [[nodiscard]] std::size_t size() const noexcept { return entries.size(); }
};

/**
 * Groups paths by absorber and applies born_echo to each group. Screen bins
 * are then rescaled so that each screen as a whole receives the coherent
 * flux delivered to its apertures; bins sample the pattern shape.
 */
inline EchoTable echo_table(std::span<PathRecord const> paths)
{
    if (paths.empty()) {
        throw std::invalid_argument("echo_table: empty path list");
    }
    std::map<std::size_t, std::vector<PathRecord>> by_absorber;
    for (auto const& p : paths) {
        by_absorber[p.absorber_index].push_back(p);
    }

    EchoTable table;
    struct ScreenFlux {
        std::vector<std::size_t> rows;
        double raw = 0.0;
        double delivered = 0.0;
    };
    std::map<std::string, ScreenFlux> screens;
    for (auto const& [index, group] : by_absorber) {
        double const echo = born_echo(group);
        if (auto const& sp = group.front().screen_port) {
            auto& s = screens[sp->first];
            s.rows.push_back(table.entries.size());
            s.raw += echo;
            std::map<std::size_t, PolarizedAmplitude> per_port;
            for (auto const& p : group) {
                per_port[p.screen_port->second] += p.amplitude;
            }
            for (auto const& [port, amp] : per_port) {
                s.delivered += amp.norm2();
            }
        }
        table.entries.push_back({group.front().absorber(), echo});
    }
    for (auto const& [id, s] : screens) {
        double const scale = s.raw > 0.0 ? s.delivered / s.raw : 0.0;
        for (auto row : s.rows) {
            table.entries[row].echo *= scale;
        }
    }
    return table;
}

/// Inverse-CDF sampler over a normalized echo table.
class TransactionSampler {
public:
    explicit TransactionSampler(EchoTable const& table)
    {
        if (table.entries.empty()) {
            throw std::invalid_argument("incomplete absorber set: empty echo table");
        }
        double const total = table.total();
        if (!(std::abs(total - 1.0) <= kEchoSumTolerance)) {
            throw std::invalid_argument("incomplete absorber set: echo sum " + std::to_string(total));
        }
        cumulative_.reserve(table.entries.size());
        double running = 0.0;
        for (std::size_t i = 0; i < table.entries.size(); ++i) {
            double const echo = table.entries[i].echo;
            if (echo < 0.0 || !std::isfinite(echo)) {
                throw std::invalid_argument("echo for '" + table.entries[i].absorber +
                                            "' is negative or not finite");
            }
            running += echo / total;
            cumulative_.push_back(running);
            if (echo > 0.0) {
                last_positive_ = i;
            }
        }
    }

    /// Index of the first absorber whose cumulative echo exceeds `u`.
    [[nodiscard]] std::size_t pick(double u) const noexcept
    {
        auto const it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        if (it == cumulative_.end()) {
            return last_positive_;
        }
        return static_cast<std::size_t>(it - cumulative_.begin());
    }

private:
    std::vector<double> cumulative_;
    std::size_t last_positive_ = 0;
};

/// One uniform draw from `stream` against the cumulative echoes.
inline std::string select_transaction(EchoTable const& table, RandomStream& stream)
{
    TransactionSampler const sampler(table);
    return table.entries[sampler.pick(stream.uniform())].absorber;
}

inline ValidationReport validate(OpticalNetwork const& net)
{
    ValidationReport report;
    auto const& elements = net.elements();
    for (auto const& e : elements) {
        for (auto const& port : output_ports(e.kind)) {
            auto const it = e.outputs.find(port);
            if (it == e.outputs.end()) {
                report.defects.push_back({Defect::Kind::dangling_port, e.id,
                                          "dangling port: " + e.id + "." + port + " is not connected"});
            } else if (!detail::resolve(net, it->second)) {
                report.defects.push_back({Defect::Kind::dangling_port, e.id,
                                          "dangling port: " + e.id + "." + port + " -> '" +
                                              it->second.target + ":" + it->second.port +
                                              "' is not an input"});
            }
        }
        auto const outs = output_ports(e.kind);
        for (auto const& [port, link] : e.outputs) {
            if (std::find(outs.begin(), outs.end(), port) == outs.end()) {
                report.defects.push_back({Defect::Kind::dangling_port, e.id,
                                          "dangling port: " + e.id + " has no output port '" +
                                              port + "'"});
            }
        }
    }

    auto const next = detail::successors(net);
    if (auto const c = detail::find_cycle(next)) {
        report.defects.push_back(
            {Defect::Kind::cycle, elements[*c].id, "cycle through '" + elements[*c].id + "'"});
        return report;
    }

    std::vector<bool> reached(elements.size(), false);
    std::vector<std::size_t> frontier{net.source_index()};
    reached[net.source_index()] = true;
    while (!frontier.empty()) {
        auto const n = frontier.back();
        frontier.pop_back();
        for (auto m : next[n]) {
            if (!reached[m]) {
                reached[m] = true;
                frontier.push_back(m);
            }
        }
    }
    for (std::size_t i = 0; i < elements.size(); ++i) {
        if (is_absorber(elements[i].kind) && !reached[i]) {
            report.defects.push_back({Defect::Kind::unreachable_absorber, elements[i].id,
                                      "unreachable absorber '" + elements[i].id + "'"});
        }
    }

    auto const paths = detail::enumerate_paths(net, kDefaultPathCap, true);
    double const sum = paths.empty() ? 0.0 : echo_table(paths).total();
    report.echo_sum = sum;
    if (!(std::abs(sum - 1.0) <= kEchoSumTolerance)) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "echo-sum %.12g", sum);
        report.defects.push_back({Defect::Kind::echo_sum, net.source_id(), buf});
    }
    return report;
}

/// All source-to-absorber offer paths, sorted by element-id sequence.
/// Requires an acyclic network without dangling ports.
inline std::vector<PathRecord> propagate_offers(OpticalNetwork const& net,
                                                std::size_t path_cap = kDefaultPathCap)
{
    if (auto const c = detail::find_cycle(detail::successors(net))) {
        throw std::invalid_argument("propagate_offers: cycle through '" + net.elements()[*c].id + "'");
    }
    return detail::enumerate_paths(net, path_cap, false);
}

inline EchoTable echo_table(OpticalNetwork const& net)
{
    return echo_table(propagate_offers(net));
}

// ---------------------------------------------------------------------------
// Event generation

struct EventRecord {
    std::uint64_t event_index = 0;
    std::uint32_t selected = 0; ///< row in the run's echo table
    double rng_draw = 0.0;
};

struct EventRun {
    EchoTable table;
    std::vector<std::uint64_t> counts; ///< aligned with table.entries
    std::vector<EventRecord> records;

    [[nodiscard]] std::uint64_t count(std::string_view absorber) const
    {
        if (auto i = table.index_of(absorber)) {
            return counts[*i];
        }
        throw std::out_of_range("no absorber '" + std::string(absorber) + "'");
    }
    [[nodiscard]] std::string const& absorber_of(EventRecord const& r) const
    {
        return table.entries[r.selected].absorber;
    }
    [[nodiscard]] std::uint64_t total() const noexcept
    {
        std::uint64_t n = 0;
        for (auto c : counts) {
            n += c;
        }
        return n;
    }
};

struct RunOptions {
    bool keep_records = true;
    unsigned workers = 0; ///< 0: worker_count()
};

/**
 * n independent transactions against a fixed echo table. Event i draws from
 * RandomStream(seed, i), so counts do not depend on the worker count.
 */
inline EventRun sample_events(EchoTable table, std::uint64_t n, std::uint64_t seed,
                              RunOptions const& options = {})
{
    if (n < 1) {
        throw std::invalid_argument("event count must be >= 1");
    }
    TransactionSampler const sampler(table);
    std::size_t const rows = table.entries.size();

    struct Partial {
        std::vector<std::uint64_t> counts;
        std::vector<EventRecord> records;
    };
    auto body = [&](Partial& part, std::uint64_t begin, std::uint64_t end) {
        part.counts.assign(rows, 0);
        if (options.keep_records) {
            part.records.reserve(end - begin);
        }
        for (std::uint64_t i = begin; i < end; ++i) {
            RandomStream stream(seed, i);
            double const u = stream.uniform();
            auto const row = sampler.pick(u);
            ++part.counts[row];
            if (options.keep_records) {
                part.records.push_back({i, static_cast<std::uint32_t>(row), u});
            }
        }
    };
    auto merge = [](Partial& into, Partial&& part) {
        if (into.counts.empty()) {
            into.counts.assign(part.counts.size(), 0);
        }
        for (std::size_t r = 0; r < part.counts.size(); ++r) {
            into.counts[r] += part.counts[r];
        }
        into.records.insert(into.records.end(), part.records.begin(), part.records.end());
    };
    unsigned const workers = options.workers == 0 ? worker_count() : options.workers;
    Partial all = parallel_accumulate(n, Partial{}, body, merge, workers);

    EventRun run{std::move(table), std::move(all.counts), std::move(all.records)};
    return run;
}

/// Validates the network, then runs n events against its echo table.
inline EventRun run_events(OpticalNetwork const& net, std::uint64_t n, std::uint64_t seed,
                           RunOptions const& options = {})
{
    auto const report = validate(net);
    if (!report.ok()) {
        std::string msg = "network failed validation:";
        for (auto const& d : report.defects) {
            msg += " [" + d.message + "]";
        }
        throw std::invalid_argument(msg);
    }
    return sample_events(echo_table(net), n, seed, options);
}

} // namespace hqs
