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


#include <hqs/random.hpp>
#include <hqs/statistics.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

namespace {

namespace stats = hqs::stats;

TEST(ChiSquare, SurvivalClosedForms)
{
    for (double x : {0.1, 1.0, 3.0, 7.5, 20.0}) {
        EXPECT_NEAR(stats::chi_square_sf(x, 2.0), std::exp(-x / 2.0), 1e-14);
        EXPECT_NEAR(stats::chi_square_sf(x, 1.0), std::erfc(std::sqrt(x / 2.0)), 1e-14);
    }
    EXPECT_NEAR(stats::chi_square_sf(3.841458820694124, 1.0), 0.05, 1e-12);
    EXPECT_THROW(stats::chi_square_sf(1.0, 0.0), std::invalid_argument);
}

TEST(ChiSquare, PerfectFitAndPooling)
{
    std::vector<std::uint64_t> const counts{250, 250, 500};
    std::vector<double> const probs{0.25, 0.25, 0.5};
    auto const r = stats::chi_square_test(counts, probs);
    EXPECT_EQ(r.statistic, 0.0);
    EXPECT_EQ(r.dof, 2u);
    EXPECT_NEAR(r.p_value, 1.0, 1e-12);

    // 1 expected count per small cell: pooled into one cell
    std::vector<std::uint64_t> const c2{96, 1, 2, 1};
    std::vector<double> const p2{0.97, 0.01, 0.01, 0.01};
    EXPECT_EQ(stats::chi_square_test(c2, p2).dof, 1u);
}

TEST(ChiSquare, UniformSamplesPass)
{
    hqs::RandomStream s(3, 0);
    std::vector<std::uint64_t> counts(20, 0);
    for (int i = 0; i < 100000; ++i) {
        ++counts[static_cast<std::size_t>(s.uniform() * 20.0)];
    }
    std::vector<double> const probs(20, 0.05);
    EXPECT_GT(stats::chi_square_test(counts, probs).p_value, 0.001);
    std::vector<double> skewed(20, 0.04);
    skewed[0] = 0.24;
    EXPECT_LT(stats::chi_square_test(counts, skewed).p_value, 1e-10);
}

TEST(Binomial, Sigma)
{
    EXPECT_DOUBLE_EQ(stats::binomial_sigma(0.25, 100000), std::sqrt(0.25 * 0.75 / 100000));
    EXPECT_TRUE(stats::within_sigma(0.25061, 0.25, 100000));
    EXPECT_FALSE(stats::within_sigma(0.26, 0.25, 100000));
}

TEST(Visibility, Sample)
{
    std::vector<double> const v{1.0, 3.0, 2.0};
    EXPECT_DOUBLE_EQ(stats::visibility(v), 0.5);
    std::vector<double> const zero{0.0, 0.0};
    EXPECT_EQ(stats::visibility(zero), 0.0);
}

TEST(FringeExtrema, CosineSquared)
{
    auto const f = [](double x) { return 0.2 + std::pow(std::cos(M_PI * x), 2); };
    auto const r = stats::fringe_extrema(f, -1.3, 1.3);
    ASSERT_EQ(r.maxima.size(), 3u);
    ASSERT_EQ(r.minima.size(), 2u);
    EXPECT_NEAR(r.maxima[1], 0.0, 1e-7);
    EXPECT_NEAR(r.minima[0], -0.5, 1e-7);
    EXPECT_NEAR(r.visibility, 1.0 / 1.4, 1e-12);
}

TEST(FringeExtrema, FlatProfile)
{
    auto const r = stats::fringe_extrema([](double) { return 0.5; }, 0.0, 1.0);
    EXPECT_TRUE(r.maxima.empty());
    EXPECT_EQ(r.visibility, 0.0);
}

TEST(Integrate, Polynomials)
{
    EXPECT_NEAR(stats::integrate([](double x) { return std::sin(x); }, 0.0, M_PI), 2.0, 1e-14);
    EXPECT_NEAR(stats::integrate([](double x) { return std::pow(x, 15); }, 0.0, 1.0, 1), 1.0 / 16.0, 1e-14);
}

} // namespace
