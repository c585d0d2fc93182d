#include <gtest/gtest.h>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qfs/common.hpp"

namespace {

TEST(Bitstring, FirstAtomIsLeftmostCharacter) {
    EXPECT_EQ(qfs::bitstring_to_string(0b001, 3), "100");
    EXPECT_EQ(qfs::bitstring_to_string(0b100, 3), "001");
    EXPECT_EQ(qfs::bitstring_to_string(0, 3), "000");
}

TEST(Bitstring, StringRoundTrip) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng() % 20;
        const std::uint64_t mask = rng() & ((std::uint64_t{1} << n) - 1);
        EXPECT_EQ(qfs::bitstring_from_string(qfs::bitstring_to_string(mask, n)), mask);
    }
}

TEST(SquareMatrix, SymmetricSetAndTriangleRoundTrip) {
    qfs::SquareMatrix m(3);
    m.set_symmetric(0, 1, 2.5);
    m.set_symmetric(1, 2, -1.0);
    EXPECT_DOUBLE_EQ(m(1, 0), 2.5);
    EXPECT_DOUBLE_EQ(m(2, 1), -1.0);
    const qfs::SquareMatrix back = qfs::SquareMatrix::from_lower_triangle(m.lower_triangle());
    ASSERT_EQ(back.size(), m.size());
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(back(i, j), m(i, j));
}

TEST(SubsetEnergyTable, MatchesDirectBitLoop) {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    const std::size_t n = 6;
    std::vector<double> linear(n);
    for (double& v : linear) v = coeff(rng);
    qfs::SquareMatrix quadratic(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) quadratic.set_symmetric(i, j, coeff(rng));

    const std::vector<double> table = qfs::subset_energy_table(linear, quadratic);
    ASSERT_EQ(table.size(), std::size_t{1} << n);
    for (std::uint64_t mask = 0; mask < table.size(); ++mask) {
        double direct = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!qfs::bit_get(mask, i)) continue;
            direct += linear[i];
            for (std::size_t j = i + 1; j < n; ++j)
                if (qfs::bit_get(mask, j)) direct += quadratic(i, j);
        }
        EXPECT_NEAR(table[mask], direct, 1e-12);
    }
}

TEST(FormatDouble, ShortestRoundTrip) {
    for (double v : {0.0, 1.0, -1.5, 0.1, 1e-6, 7.5188e-6, 3.0e7, 1.0 / 3.0,
                     -2.2250738585072014e-308}) {
        EXPECT_EQ(std::stod(qfs::format_double(v)), v);
    }
    EXPECT_EQ(qfs::format_double(0.5), "0.5");
    EXPECT_EQ(qfs::format_double(10.0), "10");
}

TEST(Statistics, MeanAndMedian) {
    EXPECT_DOUBLE_EQ(qfs::mean({1.0, 2.0, 6.0}), 3.0);
    EXPECT_DOUBLE_EQ(qfs::median({3.0, 1.0, 2.0}), 2.0);
    EXPECT_DOUBLE_EQ(qfs::median({4.0, 1.0, 2.0, 3.0}), 2.5);
}

}  // namespace
