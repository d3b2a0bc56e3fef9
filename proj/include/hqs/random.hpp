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

#include <array>
#include <cstdint>

namespace hqs {

/**
 * Philox4x32-10 counter-based generator (Salmon et al., SC'11).
 *
 * A pure function of (key, counter): no state is carried between calls, so
 * any draw of any event can be reproduced independently of the order in
 * which events are processed.
 */
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter generate(Counter ctr, Key key) noexcept
    {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            ctr = single_round(ctr, key);
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static constexpr Counter single_round(Counter const& c, Key const& k) noexcept
    {
        std::uint64_t const p0 = std::uint64_t{kMul0} * c[0];
        std::uint64_t const p1 = std::uint64_t{kMul1} * c[2];
        auto const hi0 = static_cast<std::uint32_t>(p0 >> 32);
        auto const lo0 = static_cast<std::uint32_t>(p0);
        auto const hi1 = static_cast<std::uint32_t>(p1 >> 32);
        auto const lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

/**
 * Uniform stream keyed by (seed, stream index). The n-th draw is Philox of
 * counter (stream, n) under key seed, so two streams never overlap and a
 * stream can be rebuilt from its indices alone.
 */
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream) noexcept
        : seed_(seed), stream_(stream)
    {
    }

    /// Raw 64-bit value for draw number `draw` (does not advance).
    [[nodiscard]] std::uint64_t at(std::uint64_t draw) const noexcept
    {
        Philox4x32::Counter const ctr{
            static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32),
            static_cast<std::uint32_t>(draw), static_cast<std::uint32_t>(draw >> 32)};
        Philox4x32::Key const key{static_cast<std::uint32_t>(seed_),
                                  static_cast<std::uint32_t>(seed_ >> 32)};
        auto const out = Philox4x32::generate(ctr, key);
        return (std::uint64_t{out[1]} << 32) | out[0];
    }

    std::uint64_t next_u64() noexcept { return at(draw_++); }

    /// Uniform in [0, 1): the top 53 bits scaled by 2^-53.
    double uniform() noexcept
    {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t stream() const noexcept { return stream_; }
    [[nodiscard]] std::uint64_t draws() const noexcept { return draw_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t draw_ = 0;
};

/// Independent seed for a sub-experiment `tag` of a run seeded with `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept
{
    constexpr std::uint64_t kDomain = 0x5EED5EED5EED5EEDull;
    return RandomStream(seed ^ kDomain, tag).at(0xFFFFFFFFFFFFFFFFull);
}

} // namespace hqs
