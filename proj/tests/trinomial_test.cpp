#include <numeric>

#include <gtest/gtest.h>

#include "tbs/trinomial.hpp"

namespace {

using tbs::Integer;
using tbs::TrinomialCase;
using tbs::Valuation;

// Multinomial expansion over i + j + k = n with i, j, k all < n.
Integer u3_oracle(unsigned a, unsigned b, unsigned c, unsigned n) {
    Integer total = 0;
    for (unsigned i = 0; i <= n; ++i) {
        for (unsigned j = 0; i + j <= n; ++j) {
            const unsigned k = n - i - j;
            if (i == n || j == n || k == n) {
                continue;
            }
            const Integer coeff = tbs::binom(n, i) * tbs::binom(n - i, j);
            total += coeff * tbs::pow_exact(a, i) * tbs::pow_exact(b, j) * tbs::pow_exact(c, k);
        }
    }
    return total;
}

unsigned divide_loop(Integer x, unsigned n) {
    unsigned k = 0;
    while (x % n == 0) {
        x /= n;
        ++k;
    }
    return k;
}

tbs::TrinomialInstance raw(unsigned a, unsigned b, unsigned c, unsigned n) {
    return {a, b, c, n, 1};
}

TEST(ComputeU3, Examples) {
    EXPECT_EQ(tbs::compute_U3(raw(1, 1, 1, 2)), 6);
    EXPECT_EQ(tbs::compute_U3(raw(1, 1, 3, 3)), 96);
    EXPECT_EQ(tbs::compute_U3(raw(1, 2, 3, 3)), 180);
}

TEST(ComputeU3, SplitMatchesMultinomialOracle) {
    for (unsigned n = 2; n <= 12; ++n) {
        for (unsigned a = 1; a <= 25; a += 2) {
            for (unsigned b = 1; b <= 25; b += 3) {
                for (unsigned c = 1; c <= 25; ++c) {
                    ASSERT_EQ(tbs::compute_U3(raw(a, b, c, n)), u3_oracle(a, b, c, n)) << a << b << c << n;
                }
            }
        }
    }
}

TEST(ComputeU3, PermutationInvariantTotal) {
    for (unsigned n = 2; n <= 9; ++n) {
        for (unsigned a = 1; a <= 12; ++a) {
            for (unsigned b = 1; b <= 12; ++b) {
                for (unsigned c = 1; c <= 12; ++c) {
                    const Integer u = tbs::compute_U3(raw(a, b, c, n));
                    ASSERT_EQ(u, tbs::compute_U3(raw(b, c, a, n)));
                    ASSERT_EQ(u, tbs::compute_U3(raw(c, a, b, n)));
                    ASSERT_EQ(u, tbs::compute_U3(raw(b, a, c, n)));
                    // Alternative association U(b,c) + U(a, b+c).
                    ASSERT_EQ(u, tbs::truncated_binomial(b, c, n) + tbs::truncated_binomial(a, b + c, n));
                }
            }
        }
    }
}

TEST(Normalize3, DividesByTripleGcd) {
    const auto inst = tbs::normalize3(6, 10, 15, 3);  // pairwise gcds > 1, triple gcd 1
    EXPECT_EQ(inst.extracted_gcd, 1);
    const auto inst2 = tbs::normalize3(4, 8, 12, 3);
    EXPECT_EQ(inst2.extracted_gcd, 4);
    EXPECT_EQ(inst2.a, 1);
    EXPECT_EQ(inst2.c, 3);
    EXPECT_THROW(tbs::normalize3(0, 1, 1, 3), tbs::domain_error);
    EXPECT_THROW(tbs::normalize3(1, 1, 1, 1), tbs::domain_error);
}

TEST(Classify3, Examples) {
    EXPECT_EQ(tbs::classify3(raw(1, 1, 3, 3)), TrinomialCase::t_case1);
    EXPECT_EQ(tbs::classify3(raw(1, 2, 3, 3)), TrinomialCase::t_case2);
    EXPECT_EQ(tbs::classify3(raw(1, 1, 1, 2)), TrinomialCase::uncovered);
    EXPECT_EQ(tbs::classify3(raw(3, 1, 3, 3)), TrinomialCase::uncovered);
    EXPECT_THROW(tbs::classify3(raw(3, 6, 9, 3)), tbs::domain_error);
}

TEST(Classify3, ComponentCasesForUncovered) {
    // n = 3: (1, 1, 1) -> U(1,1) none-divisible, U(2,1) sum-divisible.
    const auto comp = tbs::component_cases(raw(1, 1, 1, 3));
    EXPECT_EQ(comp.ab, tbs::Case::none_divisible);
    EXPECT_EQ(comp.ab_c, tbs::Case::sum_divisible);
    // (1, 2, 3): a + b and c both divisible by 3.
    const auto comp2 = tbs::component_cases(raw(1, 2, 3, 3));
    EXPECT_EQ(comp2.ab, tbs::Case::sum_divisible);
    EXPECT_FALSE(comp2.ab_c.has_value());
}

TEST(Predict3, Examples) {
    EXPECT_EQ(tbs::predict3(TrinomialCase::t_case1, 3).guaranteed_lower_bound, 1u);
    EXPECT_EQ(tbs::predict3(TrinomialCase::t_case1, 3).basis, tbs::Basis::tcase1_prime);
    EXPECT_EQ(tbs::predict3(TrinomialCase::t_case2, 3).guaranteed_lower_bound, 2u);
    const auto even = tbs::predict3(TrinomialCase::t_case2, 4);
    EXPECT_EQ(even.guaranteed_lower_bound, 0u);
    EXPECT_EQ(even.exactness, tbs::Exactness::exact);
    const auto two = tbs::predict3(TrinomialCase::t_case2, 2);
    EXPECT_EQ(two.guaranteed_lower_bound, 1u);
    EXPECT_EQ(two.basis, tbs::Basis::tcase2_n2_exception);
    EXPECT_EQ(tbs::predict3(TrinomialCase::t_case1, 9).exactness, tbs::Exactness::no_guarantee);
    EXPECT_EQ(tbs::predict3(TrinomialCase::uncovered, 5).basis, tbs::Basis::uncovered);
}

TEST(Verify3, Examples) {
    const auto r1 = tbs::verify3(1, 1, 3, 3);
    EXPECT_EQ(r1.label, TrinomialCase::t_case1);
    EXPECT_EQ(r1.actual, Valuation::exact(1));
    EXPECT_FALSE(r1.anomaly);
    const auto r2 = tbs::verify3(1, 2, 3, 3);
    EXPECT_EQ(r2.label, TrinomialCase::t_case2);
    EXPECT_EQ(r2.actual, Valuation::exact(2));
    const auto r3 = tbs::verify3(1, 2, 9, 3);
    EXPECT_EQ(r3.label, TrinomialCase::t_case2);
    EXPECT_GE(r3.actual.value, 2u);
    EXPECT_EQ(r3.actual, Valuation::exact(divide_loop(u3_oracle(1, 2, 9, 3), 3)));
    EXPECT_FALSE(r3.anomaly);
}

TEST(Verify3, BoundsHoldAgainstOracle) {
    for (unsigned n = 2; n <= 13; ++n) {
        const bool prime = tbs::is_prime(std::uint64_t{n});
        for (unsigned a = 1; a <= 24; ++a) {
            for (unsigned b = 1; b <= 24; ++b) {
                for (unsigned c = 1; c <= 24; ++c) {
                    if (std::gcd(std::gcd(a, b), c) != 1) {
                        continue;
                    }
                    const auto label = tbs::classify3(raw(a, b, c, n));
                    if (label == TrinomialCase::uncovered) {
                        continue;
                    }
                    const unsigned k = divide_loop(tbs::compute_U3(raw(a, b, c, n)), n);
                    if (label == TrinomialCase::t_case1 && prime) {
                        ASSERT_GE(k, 1u) << a << "," << b << "," << c << " n=" << n;
                    }
                    if (label == TrinomialCase::t_case2) {
                        if (n % 2 == 1) {
                            ASSERT_GE(k, 2u);
                        } else {
                            ASSERT_EQ(k, n == 2 ? 1u : 0u) << a << "," << b << "," << c << " n=" << n;
                        }
                    }
                    const auto rep = tbs::verify3(a, b, c, n);
                    ASSERT_EQ(rep.actual, Valuation::exact(k));
                    ASSERT_FALSE(rep.anomaly);
                }
            }
        }
    }
}

TEST(Verify3, TCase1PrimeBoundToSixty) {
    for (unsigned n : {2u, 3u, 5u, 7u, 11u, 13u}) {
        for (unsigned a = 1; a <= 60; ++a) {
            for (unsigned b = 1; b <= 60; ++b) {
                if ((a + b) % n == 0 || a % n == 0 || b % n == 0) {
                    continue;
                }
                for (unsigned c = n; c <= 60; c += n) {
                    if (std::gcd(std::gcd(a, b), c) != 1) {
                        continue;
                    }
                    const auto v = tbs::valuation_capped3(raw(a, b, c, n), 1);
                    ASSERT_TRUE(v.at_least || v.value >= 1) << a << "," << b << "," << c << " n=" << n;
                }
            }
        }
    }
}

} // namespace
