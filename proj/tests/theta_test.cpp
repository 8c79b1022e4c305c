#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "spinortheta/spinortheta.hpp"

using namespace spinortheta;

namespace {
const TernaryForm Q1 = TernaryForm::from_coeffs(4, 16, 64);
const TernaryForm Q2 = TernaryForm::from_coeffs(20, 16, 16, 16, 0, 0);
const TernaryForm I3 = TernaryForm::from_coeffs(1, 1, 1);
}  // namespace

TEST(short_vectors, examples) {
    EXPECT_TRUE(short_vectors(Q1, 3).empty());
    EXPECT_EQ(short_vectors(I3, 1).size(), 3u);
    auto sv = short_vectors(Q1, 4);
    ASSERT_EQ(sv.size(), 1u);
    EXPECT_EQ(sv[0].value, 4);
    Vec3 e1{1, 0, 0};
    EXPECT_TRUE(sv[0].x == e1 || sv[0].x == negated(e1));
}

TEST(rep_number, paper_table) {
    EXPECT_EQ(rep_number(Q1, 4), 2);
    EXPECT_EQ(rep_number(Q1, 16), 4);
    EXPECT_EQ(rep_number(Q2, 4), 0);
    EXPECT_EQ(rep_number(Q2, 16), 4);
    EXPECT_EQ(rep_number(Q1, -5), 0);
    EXPECT_EQ(rep_number(Q2, 0), 1);
}

TEST(theta_coefficients, q1_slice_matches_brute_force) {
    ThetaSlice slice = theta_coefficients(Q1, 20);
    std::map<std::int64_t, std::int64_t> expected{{0, 1}, {4, 2}, {16, 4}, {20, 4}};
    EXPECT_EQ(slice.coeffs, expected);
    EXPECT_EQ(slice.coeffs, oracles::box_theta(Q1, 20));
}

TEST(theta_coefficients, degenerate_bound) {
    ThetaSlice slice = theta_coefficients(Q1, 0);
    std::map<std::int64_t, std::int64_t> expected{{0, 1}};
    EXPECT_EQ(slice.coeffs, expected);
}

TEST(theta_coefficients, pointwise_consistent_with_rep_number) {
    std::mt19937_64 rng(8101);
    for (int trial = 0; trial < 5; ++trial) {
        TernaryForm f = oracles::random_reduced_form(rng);
        ThetaSlice slice = theta_coefficients(f, 60);
        for (std::int64_t m = 0; m <= 60; ++m) EXPECT_EQ(slice.r(m), rep_number(f, m));
    }
}

TEST(theta_coefficients, independent_of_worker_partitioning) {
    ThetaSlice wide = theta_coefficients(Q2, 500);
    ::setenv("SPINOR_THETA_THREADS", "1", 1);
    ThetaSlice serial = theta_coefficients(Q2, 500);
    ::unsetenv("SPINOR_THETA_THREADS");
    EXPECT_EQ(wide.coeffs, serial.coeffs);
}

TEST(rep_number, agrees_with_box_oracle_on_random_forms) {
    std::mt19937_64 rng(8102);
    for (int trial = 0; trial < 8; ++trial) {
        TernaryForm f = oracles::random_reduced_form(rng);
        auto oracle = oracles::box_theta(f, 200);
        ThetaSlice slice = theta_coefficients(f, 200);
        EXPECT_EQ(slice.coeffs, oracle);
    }
}

TEST(rep_number, invariant_under_equivalence) {
    std::mt19937_64 rng(8103);
    std::uniform_int_distribution<int> idx(0, 2);
    std::uniform_int_distribution<std::int64_t> coef(-2, 2);
    for (int trial = 0; trial < 6; ++trial) {
        TernaryForm f = oracles::random_reduced_form(rng);
        Mat3 u = Mat3::identity();
        for (int s = 0; s < 3; ++s) {
            int i = idx(rng), j = idx(rng);
            std::int64_t c = coef(rng);
            if (i != j)
                for (int r = 0; r < 3; ++r) u.at(r, j) += c * u.at(r, i);
        }
        TernaryForm g(u.transposed() * f.doubled_gram() * u);
        for (std::int64_t m = 0; m <= 80; ++m) EXPECT_EQ(rep_number(f, m), rep_number(g, m));
    }
}

TEST(rep_number, parity_and_lacunarity_of_q1) {
    ThetaSlice slice = theta_coefficients(Q1, 10000);
    for (const auto& [m, r] : slice.coeffs) {
        if (m == 0) continue;
        EXPECT_EQ(r % 2, 0) << "odd count at m=" << m;
        EXPECT_EQ(m % 4, 0) << "Q1 = 4(x^2+4y^2+16z^2) cannot represent m=" << m;
    }
}
