#include <numeric>

#include <gtest/gtest.h>

#include "tbs/binomial.hpp"

namespace {

using tbs::Case;
using tbs::Exactness;
using tbs::Integer;
using tbs::Valuation;

// Direct expansion (a+b)^n - a^n - b^n by repeated multiplication.
Integer u_oracle(unsigned a, unsigned b, unsigned n) {
    Integer q = 1;
    Integer pa = 1;
    Integer pb = 1;
    for (unsigned i = 0; i < n; ++i) {
        q *= a + b;
        pa *= a;
        pb *= b;
    }
    return q - pa - pb;
}

unsigned divide_loop(Integer x, unsigned n) {
    unsigned k = 0;
    while (x % n == 0) {
        x /= n;
        ++k;
    }
    return k;
}

tbs::CaseLabel label_of(unsigned a, unsigned b, unsigned n) {
    return tbs::classify(tbs::decompose(tbs::normalize(a, b, n)), n);
}

TEST(Normalize, Examples) {
    const auto i1 = tbs::normalize(6, 9, 5);
    EXPECT_EQ(i1.a, 2);
    EXPECT_EQ(i1.b, 3);
    EXPECT_EQ(i1.extracted_gcd, 3);
    const auto i2 = tbs::normalize(1, 2, 3);
    EXPECT_EQ(i2.a, 1);
    EXPECT_EQ(i2.extracted_gcd, 1);
    const auto i3 = tbs::normalize(10, 15, 5);
    EXPECT_EQ(i3.a, 2);
    EXPECT_EQ(i3.b, 3);
    EXPECT_EQ(i3.extracted_gcd, 5);
}

TEST(Normalize, DegenerateInputs) {
    const auto same = tbs::normalize(7, 7, 3);
    EXPECT_EQ(same.a, 1);
    EXPECT_EQ(same.b, 1);
    EXPECT_EQ(same.extracted_gcd, 7);
    EXPECT_THROW(tbs::normalize(0, 3, 3), tbs::domain_error);
    EXPECT_THROW(tbs::normalize(3, 0, 3), tbs::domain_error);
    EXPECT_THROW(tbs::normalize(1, 2, 1), tbs::domain_error);
    EXPECT_THROW(tbs::normalize(-1, 2, 3), tbs::domain_error);
}

TEST(Decompose, Examples) {
    const auto d1 = tbs::decompose(tbs::normalize(7, 5, 3));
    EXPECT_EQ(d1.g_a, 2);
    EXPECT_EQ(d1.r_a, 1u);
    EXPECT_EQ(d1.g_b, 1);
    EXPECT_EQ(d1.r_b, 2u);
    EXPECT_EQ(d1.G, 3);
    EXPECT_EQ(d1.R, 3u);

    const auto d2 = tbs::decompose(tbs::normalize(1, 3, 3));
    EXPECT_EQ(d2.g_a, 0);
    EXPECT_EQ(d2.r_a, 1u);
    EXPECT_EQ(d2.g_b, 1);
    EXPECT_EQ(d2.r_b, 0u);
    EXPECT_EQ(d2.R, 1u);

    const auto d3 = tbs::decompose(tbs::normalize(4, 9, 6));
    EXPECT_EQ(d3.r_a, 4u);
    EXPECT_EQ(d3.r_b, 3u);
    EXPECT_EQ(d3.R, 7u);
}

TEST(Decompose, FlagsQuotientsDivisibleByN) {
    const auto d = tbs::decompose(tbs::normalize(10, 7, 3));  // g_a = 3, g_b = 2
    EXPECT_TRUE(d.g_a_divisible_by_n);
    EXPECT_FALSE(d.g_b_divisible_by_n);
}

TEST(Decompose, ReconstructsInputs) {
    for (unsigned n = 2; n <= 12; ++n) {
        for (unsigned a = 1; a <= 50; ++a) {
            for (unsigned b = 1; b <= 50; ++b) {
                const tbs::DivisibilityInstance inst{a, b, n, 1};
                const auto d = tbs::decompose(inst);
                ASSERT_EQ(d.g_a * n + d.r_a, a);
                ASSERT_EQ(d.g_b * n + d.r_b, b);
                ASSERT_LT(d.r_a, n);
                ASSERT_LT(d.r_b, n);
            }
        }
    }
}

TEST(Classify, Examples) {
    EXPECT_EQ(label_of(1, 3, 3).kind, Case::one_side_divisible);
    EXPECT_EQ(label_of(1, 3, 3).divisible_side, tbs::DivisibleSide::b);
    EXPECT_EQ(label_of(3, 1, 3).divisible_side, tbs::DivisibleSide::a);
    EXPECT_EQ(label_of(1, 2, 3).kind, Case::sum_divisible);
    EXPECT_EQ(label_of(1, 1, 3).kind, Case::none_divisible);
    EXPECT_TRUE(label_of(1, 1, 3).n_is_prime);
    EXPECT_FALSE(label_of(1, 1, 3).n_is_even);
    EXPECT_TRUE(label_of(1, 1, 4).n_is_even);
}

TEST(Classify, RejectsBothRemaindersZero) {
    tbs::ResidueDecomposition d;
    EXPECT_THROW(tbs::classify(d, 5), tbs::domain_error);
}

TEST(Classify, ExactlyOneLabelOnNormalizedInstances) {
    for (unsigned n = 2; n <= 16; ++n) {
        for (unsigned a = 1; a <= 40; ++a) {
            for (unsigned b = 1; b <= 40; ++b) {
                const auto inst = tbs::normalize(a, b, n);
                const auto d = tbs::decompose(inst);
                ASSERT_FALSE(d.r_a == 0 && d.r_b == 0);
                const auto label = tbs::classify(d, n);
                const bool one = (d.r_a == 0) != (d.r_b == 0);
                const bool two = d.r_a != 0 && d.r_b != 0 && d.R == n;
                const bool three = d.r_a != 0 && d.r_b != 0 && d.R != n;
                ASSERT_EQ(one + two + three, 1);
                ASSERT_EQ(label.kind == Case::one_side_divisible, one);
                ASSERT_EQ(label.kind == Case::sum_divisible, two);
                ASSERT_EQ(label.kind == Case::none_divisible, three);
            }
        }
    }
}

TEST(ComputeU, Examples) {
    EXPECT_EQ(tbs::compute_U(tbs::normalize(1, 1, 2)).U, 2);
    EXPECT_EQ(tbs::compute_U(tbs::normalize(1, 2, 3)).U, 18);
    const auto s = tbs::compute_U(tbs::normalize(1, 2, 7));
    EXPECT_EQ(s.U, 2058);
    EXPECT_EQ(s.q, 3);
    EXPECT_EQ(s.Q, 129);
}

TEST(ComputeU, FormsAgreeAndMatchOracle) {
    for (unsigned n = 2; n <= 20; ++n) {
        for (unsigned a = 1; a <= 60; ++a) {
            for (unsigned b = 1; b <= 60; ++b) {
                const auto s = tbs::compute_U(tbs::DivisibilityInstance{a, b, n, 1});
                ASSERT_EQ(s.U, u_oracle(a, b, n));
                ASSERT_GE(s.U, 1);
            }
        }
    }
}

TEST(ComputeU, Symmetric) {
    for (unsigned n = 2; n <= 10; ++n) {
        for (unsigned a = 1; a <= 30; ++a) {
            for (unsigned b = 1; b <= 30; ++b) {
                ASSERT_EQ(tbs::compute_U(tbs::DivisibilityInstance{a, b, n, 1}).U,
                          tbs::compute_U(tbs::DivisibilityInstance{b, a, n, 1}).U);
            }
        }
    }
}

TEST(ValuationCapped, Examples) {
    EXPECT_EQ(tbs::valuation_capped(tbs::normalize(1, 2, 3), 5), Valuation::exact(2));
    EXPECT_EQ(tbs::valuation_capped(tbs::normalize(1, 2, 7), 5), Valuation::exact(3));
    EXPECT_EQ(tbs::valuation_capped(tbs::normalize(1, 1, 4), 5), Valuation::exact(0));
}

TEST(ValuationCapped, SentinelWhenCapReached) {
    // v_7(U(1,2)) = 3, so a cap of 2 saturates at "at least 3".
    EXPECT_EQ(tbs::valuation_capped(tbs::normalize(1, 2, 7), 2), Valuation::saturated(3));
    EXPECT_EQ(tbs::valuation_capped(tbs::normalize(1, 2, 7), 2).to_string(), "ge:3");
    EXPECT_EQ(tbs::valuation_capped(tbs::normalize(1, 2, 7), 3), Valuation::exact(3));
    EXPECT_THROW(tbs::valuation_capped(tbs::normalize(1, 2, 7), 0), tbs::domain_error);
}

TEST(ValuationCapped, AgreesWithExactValuation) {
    for (unsigned n = 2; n <= 24; ++n) {
        for (unsigned a = 1; a <= 40; ++a) {
            for (unsigned b = 1; b <= 40; ++b) {
                const tbs::DivisibilityInstance inst{a, b, n, 1};
                const unsigned exact = divide_loop(u_oracle(a, b, n), n);
                for (unsigned cap : {1u, 2u, 3u, 64u}) {
                    const auto v = tbs::valuation_capped(inst, cap);
                    if (exact <= cap) {
                        ASSERT_EQ(v, Valuation::exact(exact)) << a << "," << b << " n=" << n << " cap " << cap;
                    } else {
                        ASSERT_EQ(v, Valuation::saturated(cap + 1)) << a << "," << b << " n=" << n << " cap " << cap;
                    }
                }
            }
        }
    }
}

TEST(Predict, Examples) {
    tbs::CaseLabel c1{Case::one_side_divisible};
    EXPECT_EQ(tbs::predict(c1, 6).guaranteed_lower_bound, 2u);
    EXPECT_EQ(tbs::predict(c1, 6).basis, tbs::Basis::case1);

    tbs::CaseLabel c2{Case::sum_divisible};
    EXPECT_EQ(tbs::predict(c2, 9).guaranteed_lower_bound, 2u);
    EXPECT_EQ(tbs::predict(c2, 9).basis, tbs::Basis::case2_odd);

    tbs::CaseLabel c3{Case::none_divisible};
    EXPECT_EQ(tbs::predict(c3, 4).exactness, Exactness::no_guarantee);
    EXPECT_EQ(tbs::predict(c3, 4).basis, tbs::Basis::case3_composite);
}

TEST(Predict, FullTable) {
    const tbs::CaseLabel c2{Case::sum_divisible};
    const tbs::CaseLabel c3{Case::none_divisible};
    const auto even = tbs::predict(c2, 8);
    EXPECT_EQ(even.guaranteed_lower_bound, 0u);
    EXPECT_EQ(even.exactness, Exactness::exact);
    EXPECT_EQ(even.basis, tbs::Basis::case2_even);
    const auto two = tbs::predict(c2, 2);
    EXPECT_EQ(two.guaranteed_lower_bound, 1u);
    EXPECT_EQ(two.exactness, Exactness::exact);
    EXPECT_EQ(two.basis, tbs::Basis::case2_n2_exception);
    const auto prime = tbs::predict(c3, 13);
    EXPECT_EQ(prime.guaranteed_lower_bound, 1u);
    EXPECT_EQ(prime.exactness, Exactness::lower_bound);
    EXPECT_EQ(prime.basis, tbs::Basis::case3_prime);
}

TEST(Verify, Examples) {
    const auto r1 = tbs::verify(1, 3, 3);
    EXPECT_EQ(r1.label.kind, Case::one_side_divisible);
    EXPECT_EQ(r1.actual, Valuation::exact(2));
    EXPECT_EQ(r1.prediction.guaranteed_lower_bound, 2u);
    EXPECT_FALSE(r1.anomaly);

    const auto r2 = tbs::verify(1, 2, 3);
    EXPECT_EQ(r2.label.kind, Case::sum_divisible);
    EXPECT_EQ(r2.prediction.basis, tbs::Basis::case2_odd);
    EXPECT_EQ(r2.actual, Valuation::exact(2));
    EXPECT_FALSE(r2.anomaly);

    tbs::VerifyOptions opts;
    opts.materialize_series = true;
    const auto r3 = tbs::verify(1, 5, 6, opts);
    EXPECT_EQ(r3.label.kind, Case::sum_divisible);
    EXPECT_EQ(r3.prediction.basis, tbs::Basis::case2_even);
    EXPECT_EQ(r3.series->U, 31030);
    EXPECT_EQ(r3.actual, Valuation::exact(0));
    EXPECT_FALSE(r3.anomaly);
}

TEST(Verify, ExactFallbackBeyondCap) {
    tbs::VerifyOptions opts;
    opts.cap = 1;
    const auto with = tbs::verify(1, 2, 7, opts);
    EXPECT_EQ(with.actual, Valuation::exact(3));
    opts.exact_fallback = false;
    const auto without = tbs::verify(1, 2, 7, opts);
    EXPECT_EQ(without.actual, Valuation::saturated(2));
    EXPECT_TRUE(without.exceptional);
    EXPECT_FALSE(without.anomaly);
}

TEST(Verify, NormalizesBeforeAnalysis) {
    const auto r = tbs::verify(10, 20, 3);  // -> (1, 2)
    EXPECT_EQ(r.instance.extracted_gcd, 10);
    EXPECT_EQ(r.label.kind, Case::sum_divisible);
    EXPECT_EQ(r.actual, Valuation::exact(2));
}

TEST(Contradicts, Semantics) {
    const tbs::Prediction lower{2, Exactness::lower_bound, tbs::Basis::case1};
    EXPECT_TRUE(tbs::contradicts(Valuation::exact(1), lower));
    EXPECT_FALSE(tbs::contradicts(Valuation::exact(2), lower));
    EXPECT_FALSE(tbs::contradicts(Valuation::saturated(65), lower));
    const tbs::Prediction exact0{0, Exactness::exact, tbs::Basis::case2_even};
    EXPECT_FALSE(tbs::contradicts(Valuation::exact(0), exact0));
    EXPECT_TRUE(tbs::contradicts(Valuation::exact(1), exact0));
    const tbs::Prediction none{0, Exactness::no_guarantee, tbs::Basis::case3_composite};
    EXPECT_FALSE(tbs::contradicts(Valuation::exact(0), none));
}

// The proven bounds, checked against the divide-loop oracle on exact U.
TEST(Bounds, HoldAgainstExactOracle) {
    for (unsigned n = 2; n <= 24; ++n) {
        for (unsigned a = 1; a <= 60; ++a) {
            for (unsigned b = 1; b <= 60; ++b) {
                if (std::gcd(a, b) != 1) {
                    continue;
                }
                const unsigned k = divide_loop(u_oracle(a, b, n), n);
                const auto label = label_of(a, b, n);
                switch (label.kind) {
                case Case::one_side_divisible:
                    ASSERT_GE(k, 2u) << a << "," << b << " n=" << n;
                    break;
                case Case::sum_divisible:
                    if (n % 2 == 1) {
                        ASSERT_GE(k, 2u) << a << "," << b << " n=" << n;
                    } else {
                        ASSERT_EQ(k, n == 2 ? 1u : 0u) << a << "," << b << " n=" << n;
                    }
                    break;
                case Case::none_divisible:
                    if (tbs::is_prime(std::uint64_t{n})) {
                        ASSERT_GE(k, 1u) << a << "," << b << " n=" << n;
                    }
                    break;
                }
                const auto rep = tbs::verify(a, b, n);
                ASSERT_EQ(rep.actual, Valuation::exact(k));
                ASSERT_FALSE(rep.anomaly);
            }
        }
    }
}

TEST(Bounds, CompositeNoneDivisibleHasValuationZeroWitness) {
    for (unsigned n = 4; n <= 24; ++n) {
        if (tbs::is_prime(std::uint64_t{n})) {
            continue;
        }
        bool found = false;
        for (unsigned a = 1; a <= 50 && !found; ++a) {
            for (unsigned b = 1; b <= 50 && !found; ++b) {
                if (std::gcd(a, b) == 1 && label_of(a, b, n).kind == Case::none_divisible &&
                    divide_loop(u_oracle(a, b, n), n) == 0) {
                    found = true;
                }
            }
        }
        EXPECT_TRUE(found) << "n=" << n;
    }
    EXPECT_EQ(u_oracle(1, 1, 4), 14);
}

TEST(Case2Identity, Examples) {
    EXPECT_TRUE(tbs::case2_identity_check(1, 3));
    EXPECT_TRUE(tbs::case2_identity_check(1, 2));
    EXPECT_TRUE(tbs::case2_identity_check(2, 5));
    EXPECT_THROW(tbs::case2_identity_check(0, 5), tbs::domain_error);
    EXPECT_THROW(tbs::case2_identity_check(5, 5), tbs::domain_error);
}

TEST(Case2Identity, HoldsUpToThirty) {
    for (unsigned n = 2; n <= 30; ++n) {
        for (unsigned r = 1; r < n; ++r) {
            ASSERT_TRUE(tbs::case2_identity_check(r, n)) << r << " " << n;
        }
    }
}

TEST(ValuationText, ParseAndFormat) {
    EXPECT_EQ(Valuation::parse("3"), Valuation::exact(3));
    EXPECT_EQ(Valuation::parse("ge:65"), Valuation::saturated(65));
    EXPECT_FALSE(Valuation::parse("").has_value());
    EXPECT_FALSE(Valuation::parse("ge:").has_value());
    EXPECT_FALSE(Valuation::parse("-1").has_value());
    for (const auto& [basis, name] : tbs::kBasisNames) {
        EXPECT_EQ(tbs::parse_basis(name), basis);
    }
}

} // namespace
