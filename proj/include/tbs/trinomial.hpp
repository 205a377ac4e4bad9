#pragma once

// Truncated trinomial series
//
//   U(a, b, c) = (a+b+c)^n - a^n - b^n - c^n = U(a, b) + U(a+b, c)
//
// The covered condition patterns inherit their bounds from the two
// binomial summands.

#include <optional>
#include <string_view>

#include "tbs/binomial.hpp"

namespace tbs {

struct TrinomialInstance {
    Integer a;
    Integer b;
    Integer c;
    unsigned n = 2;
    Integer extracted_gcd = 1;
};

enum class TrinomialCase {
    t_case1,    // a, b, a+b not divisible by n; n | c
    t_case2,    // a, b not divisible by n; n | a+b and n | c
    uncovered,
};

inline std::string_view to_string(TrinomialCase c) {
    switch (c) {
    case TrinomialCase::t_case1: return "tcase1";
    case TrinomialCase::t_case2: return "tcase2";
    case TrinomialCase::uncovered: return "uncovered";
    }
    return "?";
}

/// Case of one binomial summand; empty when both of its arguments are
/// divisible by n (the summand is then a multiple of n^n).
struct ComponentCases {
    std::optional<Case> ab;
    std::optional<Case> ab_c;
};

struct TrinomialReport {
    TrinomialInstance instance;
    TrinomialCase label = TrinomialCase::uncovered;
    ComponentCases components;
    std::optional<Integer> U;
    Valuation actual;
    Prediction prediction;
    bool anomaly = false;
};

inline TrinomialInstance normalize3(const Integer& a, const Integer& b, const Integer& c, unsigned n) {
    detail::require_positive(a, "a");
    detail::require_positive(b, "b");
    detail::require_positive(c, "c");
    detail::require_exponent(n);
    const Integer g = gcd(gcd(a, b), c);
    return {a / g, b / g, c / g, n, g};
}

inline Integer truncated_binomial(const Integer& x, const Integer& y, unsigned n) {
    return pow_exact(x + y, n) - pow_exact(x, n) - pow_exact(y, n);
}

/// Direct form and the split U(a,b) + U(a+b, c); both must agree.
inline Integer compute_U3(const TrinomialInstance& inst) {
    detail::require_exponent(inst.n);
    const Integer direct = pow_exact(inst.a + inst.b + inst.c, inst.n) - pow_exact(inst.a, inst.n) -
                           pow_exact(inst.b, inst.n) - pow_exact(inst.c, inst.n);
    const Integer split = truncated_binomial(inst.a, inst.b, inst.n) + truncated_binomial(inst.a + inst.b, inst.c, inst.n);
    if (direct != split) {
        throw invariant_violation("compute_U3: direct " + direct.get_str() + " != split " + split.get_str());
    }
    return direct;
}

inline TrinomialCase classify3(const TrinomialInstance& inst) {
    detail::require_exponent(inst.n);
    const unsigned r_a = detail::small_mod(inst.a, inst.n);
    const unsigned r_b = detail::small_mod(inst.b, inst.n);
    const unsigned r_c = detail::small_mod(inst.c, inst.n);
    if (r_a == 0 && r_b == 0 && r_c == 0) {
        throw domain_error("classify3: a, b and c are all divisible by n; extract their gcd first");
    }
    if (r_a == 0 || r_b == 0 || r_c != 0) {
        return TrinomialCase::uncovered;
    }
    return (r_a + r_b) % inst.n == 0 ? TrinomialCase::t_case2 : TrinomialCase::t_case1;
}

inline ComponentCases component_cases(const TrinomialInstance& inst) {
    const auto case_of = [n = inst.n](const Integer& x, const Integer& y) -> std::optional<Case> {
        ResidueDecomposition dec;
        dec.r_a = detail::small_mod(x, n);
        dec.r_b = detail::small_mod(y, n);
        dec.R = dec.r_a + dec.r_b;
        if (dec.r_a == 0 && dec.r_b == 0) {
            return std::nullopt;
        }
        return classify(dec, n).kind;
    };
    return {case_of(inst.a, inst.b), case_of(inst.a + inst.b, inst.c)};
}

inline Prediction predict3(TrinomialCase label, unsigned n) {
    detail::require_exponent(n);
    switch (label) {
    case TrinomialCase::t_case1:
        if (is_prime(std::uint64_t{n})) {
            return {1, Exactness::lower_bound, Basis::tcase1_prime};
        }
        return {0, Exactness::no_guarantee, Basis::tcase1_composite};
    case TrinomialCase::t_case2:
        if (n % 2 == 1) {
            return {2, Exactness::lower_bound, Basis::tcase2_odd};
        }
        if (n == 2) {
            return {1, Exactness::exact, Basis::tcase2_n2_exception};
        }
        return {0, Exactness::exact, Basis::tcase2_even};
    case TrinomialCase::uncovered:
        break;
    }
    return {0, Exactness::no_guarantee, Basis::uncovered};
}

inline Valuation valuation_capped3(const TrinomialInstance& inst, unsigned cap) {
    detail::require_exponent(inst.n);
    if (cap < 1) {
        throw domain_error("valuation cap must be >= 1");
    }
    const Integer modulus = pow_exact(Integer(inst.n), cap + 1);
    const Integer e = inst.n;
    Integer residue = pow_mod(inst.a + inst.b + inst.c, e, modulus) - pow_mod(inst.a, e, modulus) -
                      pow_mod(inst.b, e, modulus) - pow_mod(inst.c, e, modulus);
    mpz_fdiv_r(residue.get_mpz_t(), residue.get_mpz_t(), modulus.get_mpz_t());
    if (sgn(residue) == 0) {
        return Valuation::saturated(cap + 1);
    }
    return Valuation::exact(valuation(residue, inst.n));
}

inline TrinomialReport verify3(const Integer& a, const Integer& b, const Integer& c, unsigned n,
                               const VerifyOptions& opts = {}) {
    TrinomialReport rep;
    rep.instance = normalize3(a, b, c, n);
    rep.label = classify3(rep.instance);
    rep.components = component_cases(rep.instance);
    rep.prediction = predict3(rep.label, n);
    if (opts.materialize_series) {
        rep.U = compute_U3(rep.instance);
    }
    rep.actual = valuation_capped3(rep.instance, opts.cap);
    if (rep.actual.at_least && opts.exact_fallback) {
        if (!rep.U) {
            rep.U = compute_U3(rep.instance);
        }
        rep.actual = Valuation::exact(valuation(*rep.U, n));
    }
    rep.anomaly = contradicts(rep.actual, rep.prediction);
    return rep;
}

inline TrinomialReport verify3(const Integer& a, const Integer& b, const Integer& c, unsigned n, unsigned cap) {
    VerifyOptions opts;
    opts.cap = cap;
    return verify3(a, b, c, n, opts);
}

} // namespace tbs
