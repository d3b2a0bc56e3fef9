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
#include <hqs/wavecore.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hqs::io {

using json = nlohmann::json;

/// Rejected input. Maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::string const& what, std::string element_id = {},
                         std::optional<std::size_t> byte_offset = std::nullopt)
        : std::runtime_error(decorate(what, element_id, byte_offset)),
          element_id_(std::move(element_id)), byte_offset_(byte_offset)
    {
    }

    [[nodiscard]] std::string const& element_id() const noexcept { return element_id_; }
    [[nodiscard]] std::optional<std::size_t> byte_offset() const noexcept { return byte_offset_; }

private:
    static std::string decorate(std::string const& what, std::string const& id,
                                std::optional<std::size_t> offset)
    {
        std::string s = what;
        if (!id.empty()) {
            s += " (element '" + id + "'";
            s += offset ? ", byte " + std::to_string(*offset) + ")" : ")";
        } else if (offset) {
            s += " (byte " + std::to_string(*offset) + ")";
        }
        return s;
    }

    std::string element_id_;
    std::optional<std::size_t> byte_offset_;
};

enum class OutputFormat { json, csv };

inline std::string_view to_string(OutputFormat f) { return f == OutputFormat::json ? "json" : "csv"; }

inline OutputFormat output_format_from(std::string_view s)
{
    if (s == "json") {
        return OutputFormat::json;
    }
    if (s == "csv") {
        return OutputFormat::csv;
    }
    throw ConfigError("unknown output format '" + std::string(s) + "' (expected json or csv)");
}

/// A fully resolved run request; `parameters` always holds every parameter
/// of the experiment (defaults filled in).
struct RunSpec {
    std::string experiment;
    json parameters = json::object();
    std::optional<std::uint64_t> events; ///< absent: analytic mode
    std::uint64_t seed = 0;
    OutputFormat format = OutputFormat::json;
    std::optional<std::string> output_path;

    friend bool operator==(RunSpec const&, RunSpec const&) = default;
};

inline json to_json(RunSpec const& spec)
{
    json j;
    j["experiment"] = spec.experiment;
    j["parameters"] = spec.parameters;
    j["n"] = spec.events ? json(*spec.events) : json(nullptr);
    j["seed"] = spec.seed;
    j["format"] = std::string(to_string(spec.format));
    j["output"] = spec.output_path ? json(*spec.output_path) : json(nullptr);
    return j;
}

enum class ParamType { boolean, integer, real, text, real_list, network };

struct ParamSpec {
    std::string name;
    ParamType type;
    json default_value;
    std::string help;
};

inline std::string_view to_string(ParamType t)
{
    switch (t) {
    case ParamType::boolean: return "bool";
    case ParamType::integer: return "int";
    case ParamType::real: return "real";
    case ParamType::text: return "string";
    case ParamType::real_list: return "real list";
    case ParamType::network: return "network object";
    }
    return "?";
}

/// Checks (and normalizes) a JSON parameter value against its declared type.
inline json coerce(ParamSpec const& p, json const& value)
{
    auto fail = [&] {
        return ConfigError("parameter '" + p.name + "' expects " + std::string(to_string(p.type)) +
                           ", got " + value.dump());
    };
    switch (p.type) {
    case ParamType::boolean:
        if (!value.is_boolean()) throw fail();
        return value;
    case ParamType::integer:
        if (value.is_number_integer()) return json(value.get<std::int64_t>());
        if (value.is_number_float() && value.get<double>() == std::floor(value.get<double>()))
            return json(static_cast<std::int64_t>(value.get<double>()));
        throw fail();
    case ParamType::real:
        if (!value.is_number()) throw fail();
        return json(value.get<double>());
    case ParamType::text:
        if (!value.is_string()) throw fail();
        return value;
    case ParamType::real_list: {
        if (!value.is_array()) throw fail();
        json out = json::array();
        for (auto const& v : value) {
            if (!v.is_number()) throw fail();
            out.push_back(v.get<double>());
        }
        return out;
    }
    case ParamType::network:
        if (!value.is_object()) throw fail();
        return value;
    }
    throw fail();
}

/// Parses a command-line "k=v" value into JSON according to the declared type.
inline json parse_param_text(ParamSpec const& p, std::string_view text)
{
    std::string const s(text);
    try {
        switch (p.type) {
        case ParamType::boolean:
            if (s == "true" || s == "1") return true;
            if (s == "false" || s == "0") return false;
            break;
        case ParamType::integer: {
            std::size_t used = 0;
            auto const v = std::stoll(s, &used);
            if (used == s.size()) return v;
            break;
        }
        case ParamType::real: {
            std::size_t used = 0;
            double const v = std::stod(s, &used);
            if (used == s.size()) return v;
            break;
        }
        case ParamType::text:
            return s;
        case ParamType::real_list: {
            json out = json::array();
            std::size_t start = 0;
            while (start <= s.size()) {
                auto const comma = s.find(',', start);
                auto const item = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
                std::size_t used = 0;
                double const v = std::stod(item, &used);
                if (used != item.size()) throw std::invalid_argument(item);
                out.push_back(v);
                if (comma == std::string::npos) break;
                start = comma + 1;
            }
            return out;
        }
        case ParamType::network:
            return json::parse(s);
        }
    } catch (ConfigError const&) {
        throw;
    } catch (std::exception const&) {
    }
    throw ConfigError("cannot parse '" + s + "' as " + std::string(to_string(p.type)) +
                      " for parameter '" + p.name + "'");
}

// ---------------------------------------------------------------------------
// Byte offsets of array items inside raw JSON text

namespace detail {

class OffsetScanner {
public:
    explicit OffsetScanner(std::string_view text) : text_(text) {}

    /// Start offsets of the items of the array at `path` (object keys).
    std::vector<std::size_t> array_items(std::vector<std::string> const& path)
    {
        pos_ = 0;
        for (auto const& key : path) {
            if (!enter_key(key)) {
                return {};
            }
        }
        skip_ws();
        std::vector<std::size_t> items;
        if (peek() != '[') {
            return items;
        }
        ++pos_;
        skip_ws();
        if (peek() == ']') {
            return items;
        }
        for (;;) {
            skip_ws();
            items.push_back(pos_);
            skip_value();
            skip_ws();
            if (peek() != ',') {
                break;
            }
            ++pos_;
        }
        return items;
    }

private:
    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    void skip_ws()
    {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\n' ||
                                       text_[pos_] == '\r' || text_[pos_] == '\t')) {
            ++pos_;
        }
    }
    std::string read_string()
    {
        std::string out;
        ++pos_; // opening quote
        while (pos_ < text_.size() && text_[pos_] != '"') {
            if (text_[pos_] == '\\') {
                out += text_[pos_++];
            }
            if (pos_ < text_.size()) {
                out += text_[pos_++];
            }
        }
        ++pos_;
        return out;
    }
    void skip_value()
    {
        skip_ws();
        char const c = peek();
        if (c == '"') {
            read_string();
            return;
        }
        if (c == '{' || c == '[') {
            int depth = 0;
            while (pos_ < text_.size()) {
                char const d = text_[pos_];
                if (d == '"') {
                    read_string();
                    continue;
                }
                if (d == '{' || d == '[') ++depth;
                if (d == '}' || d == ']') --depth;
                ++pos_;
                if (depth == 0) return;
            }
            return;
        }
        while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != '}' && text_[pos_] != ']') {
            ++pos_;
        }
    }
    /// With pos_ at an object, moves to the value of `key`.
    bool enter_key(std::string const& key)
    {
        skip_ws();
        if (peek() != '{') return false;
        ++pos_;
        for (;;) {
            skip_ws();
            if (peek() != '"') return false;
            auto const k = read_string();
            skip_ws();
            if (peek() != ':') return false;
            ++pos_;
            skip_ws();
            if (k == key) return true;
            skip_value();
            skip_ws();
            if (peek() != ',') return false;
            ++pos_;
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline std::vector<std::size_t> array_item_offsets(std::string_view text, std::vector<std::string> const& path)
{
    return detail::OffsetScanner(text).array_items(path);
}

// ---------------------------------------------------------------------------
// Network description <-> OpticalNetwork

namespace detail {

inline ComplexAmplitude complex_from(json const& j, std::string const& id)
{
    if (j.is_number()) {
        return {j.get<double>(), 0.0};
    }
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    throw ConfigError("complex amplitude must be a number or [re, im]", id);
}

inline ElementKind element_kind_from(std::string const& kind, json const& params, std::string const& id,
                                     std::optional<std::size_t> offset)
{
    auto const allowed = [&](std::initializer_list<std::string_view> names) {
        for (auto const& [k, v] : params.items()) {
            if (std::find(names.begin(), names.end(), k) == names.end()) {
                throw ConfigError("unknown parameter '" + k + "' for kind '" + kind + "'", id, offset);
            }
        }
    };
    auto number = [&](std::string const& key, std::optional<double> fallback = std::nullopt) {
        if (!params.contains(key)) {
            if (fallback) return *fallback;
            throw ConfigError("missing parameter '" + key + "' for kind '" + kind + "'", id, offset);
        }
        if (!params[key].is_number()) {
            throw ConfigError("parameter '" + key + "' must be a number", id, offset);
        }
        return params[key].get<double>();
    };
    auto count = [&](std::string const& key) {
        double const v = number(key);
        if (v < 0 || v != std::floor(v)) {
            throw ConfigError("parameter '" + key + "' must be a non-negative integer", id, offset);
        }
        return static_cast<std::size_t>(v);
    };

    if (kind == "source") {
        allowed({"polarization", "h", "v"});
        element::Source s;
        if (params.contains("polarization")) {
            auto const& pol = params["polarization"];
            if (pol == "H") s.emission = PolarizedAmplitude::horizontal();
            else if (pol == "V") s.emission = PolarizedAmplitude::vertical();
            else if (pol.is_number()) s.emission = PolarizedAmplitude::linear(pol.get<double>());
            else throw ConfigError("polarization must be \"H\", \"V\" or an angle in degrees", id, offset);
        } else if (params.contains("h") || params.contains("v")) {
            s.emission = {params.contains("h") ? complex_from(params["h"], id) : ComplexAmplitude{},
                          params.contains("v") ? complex_from(params["v"], id) : ComplexAmplitude{}};
        }
        return s;
    }
    if (kind == "beamsplitter") { allowed({}); return element::BeamSplitter{}; }
    if (kind == "mirror") { allowed({}); return element::Mirror{}; }
    if (kind == "blocker") { allowed({}); return element::Blocker{}; }
    if (kind == "detector") { allowed({}); return element::Detector{}; }
    if (kind == "phase_segment") { allowed({"length"}); return element::PhaseSegment{number("length")}; }
    if (kind == "halfwave_plate") { allowed({"axis"}); return element::HalfWavePlate{number("axis")}; }
    if (kind == "quarterwave_double") { allowed({"axis"}); return element::QuarterWaveDouble{number("axis")}; }
    if (kind == "polarizer") { allowed({"axis"}); return element::Polarizer{number("axis")}; }
    if (kind == "fanout") { allowed({"ways"}); return element::Fanout{count("ways")}; }
    if (kind == "screen") {
        allowed({"bins", "half_width", "distance", "apertures"});
        element::Screen s{count("bins"), number("half_width"), number("distance"), {}};
        if (!params.contains("apertures") || !params["apertures"].is_array()) {
            throw ConfigError("screen needs an 'apertures' array", id, offset);
        }
        for (auto const& a : params["apertures"]) {
            if (!a.is_number()) throw ConfigError("apertures must be numbers", id, offset);
            s.apertures.push_back(a.get<double>());
        }
        return s;
    }
    throw ConfigError("unknown kind '" + kind + "'", id, offset);
}

} // namespace detail

/**
 * Builds a network from {"source": id, "elements": [{id, kind, params,
 * outputs: {port: "target" | "target:port"}}]}. `offsets` are the byte
 * offsets of the element objects in the original text, when known.
 */
inline OpticalNetwork network_from_json(json const& doc, std::vector<std::size_t> const& offsets = {})
{
    if (!doc.is_object() || !doc.contains("elements") || !doc["elements"].is_array()) {
        throw ConfigError("network description needs an \"elements\" array");
    }
    for (auto const& [k, v] : doc.items()) {
        if (k != "elements" && k != "source") {
            throw ConfigError("unknown network field '" + k + "'");
        }
    }
    auto offset_of = [&](std::size_t i) -> std::optional<std::size_t> {
        return i < offsets.size() ? std::optional{offsets[i]} : std::nullopt;
    };

    NetworkBuilder builder;
    std::vector<std::string> ids;
    auto const& elements = doc["elements"];
    for (std::size_t i = 0; i < elements.size(); ++i) {
        auto const& e = elements[i];
        if (!e.is_object() || !e.contains("id") || !e["id"].is_string() || !e.contains("kind") ||
            !e["kind"].is_string()) {
            throw ConfigError("element " + std::to_string(i) + " needs string 'id' and 'kind'", "",
                              offset_of(i));
        }
        auto const id = e["id"].get<std::string>();
        for (auto const& [k, v] : e.items()) {
            if (k != "id" && k != "kind" && k != "params" && k != "outputs") {
                throw ConfigError("unknown element field '" + k + "'", id, offset_of(i));
            }
        }
        json const params = e.value("params", json::object());
        if (!params.is_object()) {
            throw ConfigError("'params' must be an object", id, offset_of(i));
        }
        builder.add(id, detail::element_kind_from(e["kind"].get<std::string>(), params, id, offset_of(i)));
        ids.push_back(id);
    }
    for (std::size_t i = 0; i < elements.size(); ++i) {
        auto const& e = elements[i];
        if (!e.contains("outputs")) {
            continue;
        }
        if (!e["outputs"].is_object()) {
            throw ConfigError("'outputs' must be an object", ids[i], offset_of(i));
        }
        for (auto const& [port, target] : e["outputs"].items()) {
            if (!target.is_string()) {
                throw ConfigError("output '" + port + "' must name a target", ids[i], offset_of(i));
            }
            auto const t = target.get<std::string>();
            auto const colon = t.rfind(':');
            if (colon == std::string::npos) {
                builder.connect(ids[i], port, t);
            } else {
                builder.connect(ids[i], port, t.substr(0, colon), t.substr(colon + 1));
            }
        }
    }

    OpticalNetwork net = [&] {
        try {
            return builder.build();
        } catch (std::invalid_argument const& e) {
            throw ConfigError(e.what());
        }
    }();
    if (doc.contains("source")) {
        if (!doc["source"].is_string() || doc["source"].get<std::string>() != net.source_id()) {
            throw ConfigError("\"source\" does not name the source element '" + net.source_id() + "'");
        }
    }

    auto const report = validate(net);
    for (auto const& d : report.defects) {
        if (d.kind == Defect::Kind::dangling_port) {
            auto const pos = std::find(ids.begin(), ids.end(), d.element_id) - ids.begin();
            throw ConfigError(d.message, d.element_id, offset_of(static_cast<std::size_t>(pos)));
        }
    }
    return net;
}

inline json to_json(OpticalNetwork const& net)
{
    auto complex_json = [](ComplexAmplitude c) { return json::array({c.real(), c.imag()}); };
    json elements = json::array();
    for (auto const& e : net.elements()) {
        json j;
        j["id"] = e.id;
        j["kind"] = std::string(kind_name(e.kind));
        json params = json::object();
        std::visit(overloaded{[&](element::Source const& s) {
                                  params["h"] = complex_json(s.emission.h);
                                  params["v"] = complex_json(s.emission.v);
                              },
                              [&](element::PhaseSegment const& p) { params["length"] = p.length; },
                              [&](element::HalfWavePlate const& p) { params["axis"] = p.axis; },
                              [&](element::QuarterWaveDouble const& p) { params["axis"] = p.axis; },
                              [&](element::Polarizer const& p) { params["axis"] = p.axis; },
                              [&](element::Fanout const& f) { params["ways"] = f.ways; },
                              [&](element::Screen const& s) {
                                  params["bins"] = s.bins;
                                  params["half_width"] = s.half_width;
                                  params["distance"] = s.distance;
                                  params["apertures"] = s.apertures;
                              },
                              [](auto const&) {}},
                   e.kind);
        j["params"] = params;
        json outputs = json::object();
        for (auto const& [port, link] : e.outputs) {
            outputs[port] = link.port.empty() ? link.target : link.target + ":" + link.port;
        }
        j["outputs"] = outputs;
        elements.push_back(j);
    }
    return json{{"source", net.source_id()}, {"elements", elements}};
}

} // namespace hqs::io
