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

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hqs {

using ComplexAmplitude = std::complex<double>;

namespace detail {

inline constexpr double kInvSqrt2 = 0.70710678118654752440;

/// (cos, sin) of an angle in degrees; exact for multiples of 45 degrees.
inline std::pair<double, double> cos_sin_deg(double degrees)
{
    double const turns8 = degrees / 45.0;
    if (std::isfinite(turns8) && turns8 == std::floor(turns8)) {
        static constexpr std::pair<double, double> table[8] = {
            {1.0, 0.0},  {kInvSqrt2, kInvSqrt2},   {0.0, 1.0},  {-kInvSqrt2, kInvSqrt2},
            {-1.0, 0.0}, {-kInvSqrt2, -kInvSqrt2}, {0.0, -1.0}, {kInvSqrt2, -kInvSqrt2}};
        auto idx = static_cast<long long>(std::fmod(turns8, 8.0));
        if (idx < 0) {
            idx += 8;
        }
        return table[idx];
    }
    double const rad = degrees * std::numbers::pi / 180.0;
    return {std::cos(rad), std::sin(rad)};
}

} // namespace detail

/// Jones vector in the (H, V) basis.
struct PolarizedAmplitude {
    ComplexAmplitude h{};
    ComplexAmplitude v{};

    static constexpr PolarizedAmplitude horizontal() noexcept { return {{1.0, 0.0}, {0.0, 0.0}}; }
    static constexpr PolarizedAmplitude vertical() noexcept { return {{0.0, 0.0}, {1.0, 0.0}}; }
    static PolarizedAmplitude linear(double axis_degrees)
    {
        auto const [c, s] = detail::cos_sin_deg(axis_degrees);
        return {{c, 0.0}, {s, 0.0}};
    }

    [[nodiscard]] double norm2() const noexcept { return std::norm(h) + std::norm(v); }
    [[nodiscard]] bool finite() const noexcept
    {
        return std::isfinite(h.real()) && std::isfinite(h.imag()) && std::isfinite(v.real()) &&
               std::isfinite(v.imag());
    }
    [[nodiscard]] PolarizedAmplitude conj() const noexcept { return {std::conj(h), std::conj(v)}; }

    PolarizedAmplitude& operator+=(PolarizedAmplitude const& o) noexcept
    {
        h += o.h;
        v += o.v;
        return *this;
    }
    friend PolarizedAmplitude operator+(PolarizedAmplitude a, PolarizedAmplitude const& b) noexcept
    {
        return a += b;
    }
    friend PolarizedAmplitude operator*(ComplexAmplitude s, PolarizedAmplitude const& a) noexcept
    {
        return {s * a.h, s * a.v};
    }
    friend PolarizedAmplitude operator*(PolarizedAmplitude const& a, ComplexAmplitude s) noexcept
    {
        return s * a;
    }
    friend bool operator==(PolarizedAmplitude const&, PolarizedAmplitude const&) = default;
};

/// <a|b>, conjugate-linear in the first argument.
inline ComplexAmplitude inner(PolarizedAmplitude const& a, PolarizedAmplitude const& b) noexcept
{
    return std::conj(a.h) * b.h + std::conj(a.v) * b.v;
}

/// Rotates the global phase so the first component with modulus above
/// `threshold` is real and positive. Used for "equal up to global phase".
inline PolarizedAmplitude canonical_phase(PolarizedAmplitude const& a, double threshold = 1e-12)
{
    ComplexAmplitude const lead = std::abs(a.h) > threshold ? a.h : a.v;
    if (std::abs(lead) <= threshold) {
        return a;
    }
    return (std::conj(lead) / std::abs(lead)) * a;
}

/**
 * One source-to-absorber offer path. `element_ids` lists the traversed
 * elements; the final entry is the absorber id (a screen bin has its own id).
 */
struct PathRecord {
    std::vector<std::string> element_ids;
    PolarizedAmplitude amplitude;
    double accumulated_length = 0.0;

    /// Position of the absorber in the network's absorber order.
    std::size_t absorber_index = 0;
    /// Screen bins only: the screen element id and the aperture port the path entered by.
    std::optional<std::pair<std::string, std::size_t>> screen_port;

    [[nodiscard]] std::string const& absorber() const { return element_ids.back(); }
};

/// Coherent sum of Jones amplitudes.
inline PolarizedAmplitude coherent_sum(std::span<PolarizedAmplitude const> amplitudes) noexcept
{
    PolarizedAmplitude total;
    for (auto const& a : amplitudes) {
        total += a;
    }
    return total;
}

/**
 * Confirmation echo received at the source from one absorber: the squared
 * modulus of the coherent path sum, taken per Jones component. Orthogonally
 * polarized paths add by intensity.
 */
inline double born_echo(std::span<PathRecord const> paths_at_one_absorber)
{
    if (paths_at_one_absorber.empty()) {
        throw std::invalid_argument("born_echo: no paths");
    }
    auto const& absorber = paths_at_one_absorber.front().absorber();
    PolarizedAmplitude total;
    for (auto const& p : paths_at_one_absorber) {
        if (p.absorber() != absorber) {
            throw std::invalid_argument("born_echo: paths end at different absorbers ('" + absorber +
                                        "', '" + p.absorber() + "')");
        }
        total += p.amplitude;
    }
    return total.norm2();
}

struct SplitAmplitudes {
    PolarizedAmplitude transmitted;
    PolarizedAmplitude reflected;
};

inline constexpr ComplexAmplitude kTransmission{detail::kInvSqrt2, 0.0};
inline constexpr ComplexAmplitude kReflection{0.0, detail::kInvSqrt2};

/// 50:50 splitter: transmission 1/sqrt2, reflection i/sqrt2 (90 degree lag on reflection).
inline SplitAmplitudes beamsplitter_scatter(PolarizedAmplitude const& in) noexcept
{
    return {kTransmission * in, kReflection * in};
}

/// Both input ports at once: out0 = t*in0 + r*in1, out1 = r*in0 + t*in1.
inline std::pair<PolarizedAmplitude, PolarizedAmplitude>
beamsplitter_combine(PolarizedAmplitude const& in0, PolarizedAmplitude const& in1) noexcept
{
    return {kTransmission * in0 + kReflection * in1, kReflection * in0 + kTransmission * in1};
}

/// exp(2*pi*i*length) for a length in wavelengths. Only the fractional part
/// is used; eighth-wave multiples are exact.
inline ComplexAmplitude path_phase(double length)
{
    if (!std::isfinite(length) || length < 0.0) {
        throw std::invalid_argument("path_phase: length must be finite and non-negative");
    }
    double const frac = length - std::floor(length);
    auto const [c, s] = detail::cos_sin_deg(frac * 360.0);
    return {c, s};
}

inline PolarizedAmplitude polarizer_project(PolarizedAmplitude const& in, double axis_degrees)
{
    auto const axis = PolarizedAmplitude::linear(axis_degrees);
    return inner(axis, in) * axis;
}

enum class WaveplateKind { half, quarter_double_pass };

namespace detail {

/// Real 2x2 Jones matrix [[a, b], [c, d]] applied to (h, v).
inline PolarizedAmplitude apply(double a, double b, double c, double d, PolarizedAmplitude const& in)
{
    return {a * in.h + b * in.v, c * in.h + d * in.v};
}

/// Quarter-wave plate with fast axis at `axis_degrees`: R(-t) diag(1, i) R(t).
inline PolarizedAmplitude quarter_wave(PolarizedAmplitude const& in, double axis_degrees)
{
    auto const [c, s] = cos_sin_deg(axis_degrees);
    ComplexAmplitude const fast = c * in.h + s * in.v;
    ComplexAmplitude const slow = ComplexAmplitude{0.0, 1.0} * (-s * in.h + c * in.v);
    return {c * fast - s * slow, s * fast + c * slow};
}

} // namespace detail

/**
 * Half-wave plate: reflects the Jones vector about the axis. Double transit
 * of a quarter-wave plate composes two quarter-wave retardations, which is a
 * half-wave action about the same axis.
 */
inline PolarizedAmplitude waveplate_apply(PolarizedAmplitude const& in, WaveplateKind kind,
                                          double axis_degrees)
{
    switch (kind) {
    case WaveplateKind::half: {
        auto const [c2, s2] = detail::cos_sin_deg(2.0 * axis_degrees);
        return detail::apply(c2, s2, s2, -c2, in);
    }
    case WaveplateKind::quarter_double_pass:
        return detail::quarter_wave(detail::quarter_wave(in, axis_degrees), axis_degrees);
    }
    throw std::invalid_argument("waveplate_apply: unknown kind");
}

} // namespace hqs
