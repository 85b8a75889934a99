#include <cmath>

#include <gtest/gtest.h>

#include "common.hpp"

using namespace testing_support;

TEST(Truncated, MonotoneInN) {
    for (const char* name : {"zero-transitions", "one-transition", "minkowski"})
        for (double q : {0.0, 0.5, 2.0}) {
            const auto& p = preset_pair(name);
            double prev = -std::numeric_limits<double>::infinity();
            for (std::uint64_t n : {2u, 10u, 100u, 1000u, 10000u}) {
                double T = oracle::truncated_temperature(p, q, n).T_n;
                EXPECT_GE(T, prev - 1e-13) << name << " q=" << q << " n=" << n;
                prev = T;
            }
            EXPECT_LE(prev, temperature(p, q).T.value() + 1e-10) << name << " q=" << q;
        }
}

TEST(Truncated, ApproachesOne) {
    double t10 = oracle::truncated_temperature(shifted3(), 0, 10).T_n;
    double t4 = oracle::truncated_temperature(shifted3(), 0, 10000).T_n;
    EXPECT_LT(t10, t4);
    EXPECT_LT(t4, 1);
    EXPECT_NEAR(oracle::truncated_temperature(minkowski(), 0, 10000).T_n, 1, 1e-3);
}

TEST(Truncated, FrozenStaysBelowBoundary) {
    const auto& p = powerlog12();
    double tt = t_tilde(p, 3).value();
    for (std::uint64_t n : {100u, 1000u, 10000u}) EXPECT_LE(oracle::truncated_temperature(p, 3, n).T_n, tt + 1e-12);
}

TEST(BruteLegendre, MaximumAndSlack) {
    const auto& p = shifted3();
    oracle::TSamples s;
    auto rows = temperature_rows(p, -10, 10, 2001, {});
    for (const auto& r : rows) s.push_back({r.q, r.T_value});
    double a0 = alpha_of_q(p, 0);
    EXPECT_NEAR(oracle::brute_legendre(s, a0), 1, oracle::grid_slack(s, a0) + 1e-12);
    EXPECT_LE(oracle::brute_legendre(s, a0), 1 + 1e-12);
}
