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


#include <hqs/parallel.hpp>
#include <hqs/random.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <cmath>
#include <set>

namespace {

using hqs::Philox4x32;
using hqs::RandomStream;

// Known-answer vectors of the reference Philox4x32-10 implementation.
TEST(Philox, KnownAnswerZero)
{
    auto const out = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(out, (Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerOnes)
{
    auto const out = Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                          {0xffffffffu, 0xffffffffu});
    EXPECT_EQ(out, (Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPi)
{
    auto const out = Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                          {0xa4093822u, 0x299f31d0u});
    EXPECT_EQ(out, (Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(RandomStream, DrawsAreAddressable)
{
    RandomStream a(42, 7);
    std::vector<std::uint64_t> seq;
    for (int i = 0; i < 16; ++i) {
        seq.push_back(a.next_u64());
    }
    RandomStream b(42, 7);
    for (int i = 15; i >= 0; --i) {
        EXPECT_EQ(b.at(static_cast<std::uint64_t>(i)), seq[static_cast<std::size_t>(i)]);
    }
}

TEST(RandomStream, StreamsAndSeedsDiffer)
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        for (std::uint64_t stream = 0; stream < 8; ++stream) {
            seen.insert(RandomStream(seed, stream).at(0));
        }
    }
    EXPECT_EQ(seen.size(), 64u);
}

TEST(RandomStream, UniformRangeAndMean)
{
    RandomStream s(1, 0);
    double sum = 0.0;
    constexpr int n = 200000;
    for (int i = 0; i < n; ++i) {
        double const u = s.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    // mean of n uniforms has sigma 1/sqrt(12 n)
    EXPECT_NEAR(sum / n, 0.5, 4.0 / std::sqrt(12.0 * n));
}

TEST(DeriveSeed, DistinctTags)
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t tag = 0; tag < 100; ++tag) {
        seen.insert(hqs::derive_seed(9, tag));
    }
    EXPECT_EQ(seen.size(), 100u);
    EXPECT_EQ(hqs::derive_seed(9, 3), hqs::derive_seed(9, 3));
    EXPECT_NE(hqs::derive_seed(9, 3), hqs::derive_seed(10, 3));
}

TEST(Parallel, BlockOrderMerge)
{
    auto body = [](std::vector<std::uint64_t>& v, std::uint64_t b, std::uint64_t e) {
        for (auto i = b; i < e; ++i) {
            v.push_back(i);
        }
    };
    auto merge = [](std::vector<std::uint64_t>& into, std::vector<std::uint64_t>&& part) {
        into.insert(into.end(), part.begin(), part.end());
    };
    for (unsigned w : {1u, 2u, 3u, 7u, 64u}) {
        auto const v = hqs::parallel_accumulate(50, std::vector<std::uint64_t>{}, body, merge, w);
        ASSERT_EQ(v.size(), 50u);
        for (std::uint64_t i = 0; i < 50; ++i) {
            EXPECT_EQ(v[i], i);
        }
    }
}

TEST(Parallel, ExceptionsPropagate)
{
    auto body = [](int&, std::uint64_t b, std::uint64_t) {
        if (b > 0) {
            throw std::runtime_error("boom");
        }
    };
    auto merge = [](int&, int&&) {};
    EXPECT_THROW(hqs::parallel_accumulate(10, 0, body, merge, 4), std::runtime_error);
}

TEST(Parallel, WorkerCountFromEnvironment)
{
    ::setenv("HQS_THREADS", "3", 1);
    EXPECT_EQ(hqs::worker_count(), 3u);
    ::setenv("HQS_THREADS", "0", 1);
    EXPECT_THROW(hqs::worker_count(), std::invalid_argument);
    ::setenv("HQS_THREADS", "two", 1);
    EXPECT_THROW(hqs::worker_count(), std::invalid_argument);
    ::unsetenv("HQS_THREADS");
    EXPECT_GE(hqs::worker_count(), 1u);
}

} // namespace
