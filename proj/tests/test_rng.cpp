#include "memrl/rng.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <vector>

using memrl::Rng;

TEST(Rng, SameSeedSameStream) {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) {
        EXPECT_EQ(a.next_u64(), b.next_u64());
    }
}

TEST(Rng, SplitIgnoresParentProgress) {
    Rng a(7), b(7);
    for (int i = 0; i < 13; ++i) a.next_u64();
    Rng ca = a.split(3), cb = b.split(3);
    EXPECT_EQ(ca.next_u64(), cb.next_u64());
    EXPECT_NE(a.split(3).next_u64(), a.split(4).next_u64());
}

TEST(Rng, UniformRangeAndMean) {
    Rng r(1);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / n, 0.5, 3 * std::sqrt(1.0 / 12 / n));
}

TEST(Rng, NormalMoments) {
    Rng r(2);
    double s1 = 0, s2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = r.normal();
        s1 += z;
        s2 += z * z;
    }
    EXPECT_NEAR(s1 / n, 0.0, 0.01);
    EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(Rng, CategoricalFrequencies) {
    Rng r(3);
    const std::array<double, 3> w{1.0, 2.0, 0.0};
    std::array<int, 3> count{};
    const int n = 90000;
    for (int i = 0; i < n; ++i) ++count[r.categorical(w)];
    EXPECT_EQ(count[2], 0);
    EXPECT_NEAR(count[0] / double(n), 1.0 / 3, 0.01);
}

TEST(Rng, CategoricalRejectsBadWeights) {
    Rng r(3);
    const std::vector<double> zero{0.0, 0.0};
    const std::vector<double> neg{1.0, -1.0};
    EXPECT_THROW(r.categorical(zero), std::invalid_argument);
    EXPECT_THROW(r.categorical(neg), std::invalid_argument);
}
