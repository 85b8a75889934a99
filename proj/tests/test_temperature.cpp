#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "common.hpp"
#include "reference_values.hpp"

using namespace testing_support;

TEST(Temperature, ReferenceValues) {
    for (const auto& r : ref::shifted3) {
        auto t = temperature(shifted3(), r.q);
        EXPECT_EQ(t.regime, Regime::AnalyticBranch);
        EXPECT_NEAR(t.T.value(), r.T, 1e-10) << "q=" << r.q;
        EXPECT_NEAR(alpha_of_q(shifted3(), r.q), r.alpha, 1e-9) << "q=" << r.q;
    }
    for (const auto& r : ref::powerlog12) {
        EXPECT_NEAR(temperature(powerlog12(), r.q).T.value(), r.T, 1e-10) << "q=" << r.q;
        EXPECT_NEAR(alpha_of_q(powerlog12(), r.q), r.alpha, 1e-9) << "q=" << r.q;
    }
}

TEST(Temperature, GaussMetricGivesOneAtZero) {
    for (const auto& p : presets()) {
        PotentialPair pair(p.phi, p.psi);
        EXPECT_NEAR(temperature(pair, 0).T.value(), 1, 1e-9) << p.name;
    }
}

TEST(Temperature, NormalizedPhiGivesZeroAtOne) {
    EXPECT_NEAR(temperature(shifted3(), 1).T.value(), 0, 1e-10);
    EXPECT_NEAR(temperature(powerlog12(), 1).T.value(), 0, 1e-10);
}

TEST(Temperature, FrozenExample) {
    auto r = temperature(powerlog12(), 3);
    EXPECT_EQ(r.regime, Regime::Frozen);
    EXPECT_NEAR(r.T.value(), -1.3, 1e-15);
    EXPECT_NEAR(alpha_of_q(powerlog12(), 3), 0.6, 1e-15);
}

TEST(Temperature, MinkowskiInfiniteBelowZero) {
    auto r = temperature(minkowski(), -1);
    EXPECT_TRUE(r.T.is_plus_infinity());
    EXPECT_EQ(r.regime, Regime::Frozen);
    auto z = temperature(minkowski(), 0);
    EXPECT_EQ(z.regime, Regime::AnalyticBranch);
    EXPECT_NEAR(z.T.value(), 1, 1e-10);
    // Gibbs state at q = 0 is the Gauss measure, under which the digit has no mean
    EXPECT_THROW(alpha_of_q(minkowski(), 0), AlphaDiverges);
}

TEST(Temperature, PressureVanishesOnAnalyticBranch) {
    for (const char* name : {"zero-transitions", "one-transition", "three-transitions", "minkowski"})
        for (double q : {-4.0, -1.0, 0.3, 1.0, 2.2}) {
            const auto& p = preset_pair(name);
            auto r = temperature(p, q);
            if (r.regime != Regime::AnalyticBranch || !r.T.is_finite()) continue;
            auto P = pressure(p, q, r.T.value());
            ASSERT_TRUE(P.finite);
            EXPECT_NEAR(P.value.value(), 0, 1e-10) << name << " q=" << q;
            EXPECT_GE(r.T.as_double(), t_tilde(p, q).as_double());
        }
}

TEST(Temperature, ConvexDecreasingWithAlphaDecreasing) {
    for (const char* name : {"zero-transitions", "one-transition", "two-transitions", "infinite-transitions"}) {
        const auto& p = preset_pair(name);
        auto rows = temperature_rows(p, -5, 8, 131, {});
        std::vector<std::pair<double, double>> s;
        double prevT = std::numeric_limits<double>::infinity(), prevA = std::numeric_limits<double>::infinity();
        for (const auto& r : rows) {
            s.push_back({r.q, r.T_value});
            EXPECT_LE(r.T_value, prevT + 1e-12) << name << " q=" << r.q;
            prevT = r.T_value;
            if (r.regime == "analytic") {
                double a = std::stod(r.alpha);
                EXPECT_LT(a, prevA) << name << " q=" << r.q;
                prevA = a;
            }
        }
        EXPECT_TRUE(convex_ok(s, 1e-8)) << name;
    }
}

TEST(Temperature, CentralDifferenceMatchesAlpha) {
    const double h = 1e-4;
    for (const char* name : {"zero-transitions", "one-transition", "three-transitions"})
        for (double q : {-2.0, -0.5, 0.0, 0.4, 1.0}) {
            const auto& p = preset_pair(name);
            auto r = temperature(p, q);
            if (r.regime != Regime::AnalyticBranch) continue;
            double d = -(temperature(p, q + h).T.value() - temperature(p, q - h).T.value()) / (2 * h);
            double a = alpha_of_q(p, q);
            EXPECT_NEAR(d, a, 1e-6 * std::abs(a)) << name << " q=" << q;
        }
}

TEST(Frozen, Examples) {
    EXPECT_FALSE(frozen(shifted3(), 1));
    EXPECT_TRUE(frozen(powerlog12(), 3));
    EXPECT_TRUE(frozen(minkowski(), -1));
    EXPECT_FALSE(frozen(powerlog12(), 1.15));
}

TEST(QSetScan, Kinds) {
    EXPECT_EQ(q_set(shifted3()).kind, QSet::Kind::Empty);
    auto m = q_set(minkowski());
    EXPECT_EQ(m.kind, QSet::Kind::RayDown);
    ASSERT_TRUE(m.q1.has_value());
    EXPECT_EQ(*m.q1, 0.0);
    auto one = q_set(powerlog12());
    ASSERT_EQ(one.kind, QSet::Kind::RayUp);
    EXPECT_GT(*one.q0, 1.2);
    const double d = 1e-9;
    EXPECT_TRUE(frozen(powerlog12(), *one.q0 + d));
    EXPECT_FALSE(frozen(powerlog12(), *one.q0 - d));
    auto three = q_set(preset_pair("three-transitions"));
    ASSERT_EQ(three.kind, QSet::Kind::ClosedInterval);
    EXPECT_TRUE(frozen(preset_pair("three-transitions"), *three.q1 - d));
    EXPECT_FALSE(frozen(preset_pair("three-transitions"), *three.q1 + d));
}

TEST(GibbsWeights, Normalized) {
    auto w = gibbs_weights(shifted3(), 0, 1);
    for (std::uint64_t i : {1ull, 2ull, 10ull, 1000ull})
        EXPECT_NEAR(w.weight(i), 6 / (std::numbers::pi * std::numbers::pi) / double(i * i), 1e-15);
    EXPECT_NEAR(w.tail_mass(100000), 6 / (std::numbers::pi * std::numbers::pi) * 1e-5, 1e-9);

    auto f = gibbs_weights(powerlog12(), 3, -1.3);
    EXPECT_LE(f.log_z(), 0);
    EXPECT_GT(f.weight(1), 0);
    EXPECT_NEAR(f.log_weight(1), 3 * log_weight(powerlog12().phi(), 1) - 1.3 * log_weight(gauss(), 1) - f.log_z(),
                1e-14);
    EXPECT_THROW(gibbs_weights(shifted3(), 1, -1), NoGibbsState);
}
