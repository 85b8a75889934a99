#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "common.hpp"

using namespace testing_support;

TEST(LogWeight, ClosedForms) {
    EXPECT_NEAR(log_weight(gauss(), 1), std::log(6 / (std::numbers::pi * std::numbers::pi)), 1e-15);
    EXPECT_NEAR(log_weight(gauss(), 1), -0.49770, 5e-6);
    EXPECT_NEAR(log_weight({Geometric{0.5, 1.0}, Role::NegativePotential}, 3), 3 * std::log(0.5), 1e-15);
    EXPECT_NEAR(log_weight({ShiftedPower{3, 4.9491}, Role::NegativePotential}, 1), std::log(4.9491 / 8), 1e-15);
    EXPECT_NEAR(log_weight({ShiftedPower{3, 4.9491}, Role::NegativePotential}, 1), -0.48024, 5e-6);
}

TEST(LogWeight, IndexZeroRejected) { EXPECT_THROW(log_weight(gauss(), 0), DomainError); }

TEST(LogWeight, NegativeForEveryPreset) {
    for (const auto& p : presets())
        for (std::uint64_t i : {1ull, 2ull, 3ull, 7ull, 64ull, 1000ull, 123456ull, 10000000ull}) {
            EXPECT_LT(log_weight(p.phi, i), 0) << p.name << " i=" << i;
            EXPECT_LT(log_weight(p.psi, i), 0) << p.name << " i=" << i;
        }
}

TEST(Normalize, Constants) {
    auto s = normalize({ShiftedPower{3, {}}, Role::NegativePotential});
    EXPECT_NEAR(*std::get<ShiftedPower>(s.family).scale, 1 / (std::riemann_zeta(3.0) - 1), 1e-12);
    EXPECT_NEAR(*std::get<ShiftedPower>(s.family).scale, 4.9491, 5e-5);

    auto p = normalize({PowerLog{1.2, 2, 2, {}}, Role::NegativePotential});
    EXPECT_NEAR(*std::get<PowerLog>(p.family).scale, 0.67569, 5e-6);

    auto g = normalize({Geometric{0.5, {}}, Role::NegativePotential});
    EXPECT_DOUBLE_EQ(*std::get<Geometric>(g.family).scale, 1.0);
}

TEST(Normalize, NonSummableRejected) {
    EXPECT_THROW(normalize({PowerLog{1.0, 1.0, 2, {}}, Role::NegativePotential}), NotNormalizable);
    EXPECT_THROW(normalize({PowerLog{0.8, 3.0, 2, {}}, Role::NegativePotential}), NotNormalizable);
    EXPECT_THROW(normalize({Geometric{1.5, {}}, Role::NegativePotential}), NotNormalizable);
}

// partial sum plus certified tail brackets one for every normalized preset
TEST(Normalize, MassOne) {
    for (const auto& p : presets()) {
        auto tot = detail::sum_weights(p.phi);
        ASSERT_EQ(tot.verdict, Verdict::Convergent) << p.name;
        const double scale = std::exp(tot.sum.log_scale());
        const double lo = (tot.sum.value() - tot.sum.uncertainty()) * scale;
        const double hi = (tot.sum.value() + tot.sum.uncertainty()) * scale;
        EXPECT_LE(lo, 1 + 1e-12) << p.name;
        EXPECT_GE(hi, 1 - 1e-12) << p.name;
        EXPECT_LT(hi - lo, 1e-11) << p.name;
    }
}

TEST(AlphaLim, Families) {
    auto a = alpha_lim(shifted3());
    ASSERT_TRUE(a.finite());
    EXPECT_NEAR(a.value, 1.5, 1e-15);
    a = alpha_lim(powerlog12());
    ASSERT_TRUE(a.finite());
    EXPECT_NEAR(a.value, 0.6, 1e-15);
    EXPECT_EQ(alpha_lim(minkowski()).kind, AlphaLim::Kind::PlusInfinity);
    EXPECT_EQ(alpha_lim(preset_pair("infinite-transitions")).kind, AlphaLim::Kind::DoesNotExist);
}

TEST(AlphaLim, ScaleInvariant) {
    for (double C : {0.1, 0.5, 0.9}) {
        PotentialPair p({PowerLog{1.2, 2, 2, C}, Role::NegativePotential}, {PowerLog{2, 0, 2, 0.5}, Role::PositiveMetric});
        EXPECT_NEAR(alpha_lim(p).value, 0.6, 1e-15);
    }
}

TEST(PotentialPair, RoleChecks) {
    auto ph = phi(ShiftedPower{3, {}});
    EXPECT_THROW(PotentialPair(gauss(), gauss()), DomainError);
    EXPECT_THROW(PotentialPair(ph, ph), DomainError);
    EXPECT_NO_THROW(PotentialPair(ph, gauss()));
}

TEST(PiecewisePartition, ClassesPartitionSymbols) {
    PiecewisePartition p;
    p.classes = {{1.2, 2, 1}, {0.7, 3, 1}, {0.6, 4, 1}};
    // later primes win: 64 = 4^3 is a cube
    EXPECT_EQ(detail::partition_class_of(p, 1), 0u);
    EXPECT_EQ(detail::partition_class_of(p, 6), 0u);
    EXPECT_EQ(detail::partition_class_of(p, 4), 1u);
    EXPECT_EQ(detail::partition_class_of(p, 16), 1u);
    EXPECT_EQ(detail::partition_class_of(p, 32), 0u);
    EXPECT_EQ(detail::partition_class_of(p, 27), 2u);
    EXPECT_EQ(detail::partition_class_of(p, 64), 2u);
    // every symbol lands in exactly one class
    for (std::uint64_t m = 1; m < 5000; ++m) EXPECT_LT(detail::partition_class_of(p, m), p.classes.size());
}

TEST(SpikedPowerLog, SpikeRaisesOneWeight) {
    auto base = phi(PowerLog{1.2, 2, 2, {}});
    auto sp = phi(SpikedPowerLog{PowerLog{1.2, 2, 2, {}}, 2, 1.8});
    EXPECT_GT(log_weight(sp, 2), log_weight(base, 2));
    EXPECT_LT(log_weight(sp, 3), log_weight(base, 3));
    EXPECT_NEAR(log_weight(sp, 5) - log_weight(sp, 7), log_weight(base, 5) - log_weight(base, 7), 1e-14);
}
