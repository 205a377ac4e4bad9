#pragma once

// Truncated binomial series U(a, b) = (a + b)^n - a^n - b^n and its
// divisibility by the exponent n.
//
// Pipeline: normalize -> decompose -> classify -> predict -> measure.

#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "tbs/exact_arith.hpp"

namespace tbs {

/// Coprime pair (a, b) with exponent n; extracted_gcd is what normalize divided out.
struct DivisibilityInstance {
    Integer a;
    Integer b;
    unsigned n = 2;
    Integer extracted_gcd = 1;
};

struct SeriesValue {
    Integer q;  // a + b
    Integer Q;  // a^n + b^n
    Integer U;  // q^n - Q
};

/// a = g_a*n + r_a, b = g_b*n + r_b with 0 <= r < n.
struct ResidueDecomposition {
    Integer g_a;
    Integer g_b;
    unsigned r_a = 0;
    unsigned r_b = 0;
    Integer G;       // g_a + g_b
    unsigned R = 0;  // r_a + r_b, in [0, 2n - 2]
    // The classical derivation assumes neither quotient is a multiple of n.
    // Recorded only; nothing downstream depends on it.
    bool g_a_divisible_by_n = false;
    bool g_b_divisible_by_n = false;
};

enum class Case {
    one_side_divisible,   // exactly one of r_a, r_b is zero
    sum_divisible,        // both nonzero, r_a + r_b = n
    none_divisible,       // both nonzero, r_a + r_b != n
};

enum class DivisibleSide { none, a, b };

struct CaseLabel {
    Case kind = Case::none_divisible;
    DivisibleSide divisible_side = DivisibleSide::none;
    bool n_is_prime = false;
    bool n_is_even = false;
};

enum class Exactness { lower_bound, exact, no_guarantee };

enum class Basis {
    case1,
    case2_odd,
    case2_even,
    case2_n2_exception,
    case3_prime,
    case3_composite,
    tcase1_prime,
    tcase1_composite,
    tcase2_odd,
    tcase2_even,
    tcase2_n2_exception,
    uncovered,
};

/// Claim that n^guaranteed_lower_bound divides U. With Exactness::exact the
/// valuation is claimed to equal the bound.
struct Prediction {
    unsigned guaranteed_lower_bound = 0;
    Exactness exactness = Exactness::no_guarantee;
    Basis basis = Basis::case3_composite;
};

/// Either an exact valuation k, or "at least k" when the cap was reached.
struct Valuation {
    unsigned value = 0;
    bool at_least = false;

    static Valuation exact(unsigned k) { return {k, false}; }
    static Valuation saturated(unsigned k) { return {k, true}; }

    /// Decimal string, or "ge:<k>" for a saturated value.
    std::string to_string() const {
        return at_least ? "ge:" + std::to_string(value) : std::to_string(value);
    }

    static std::optional<Valuation> parse(std::string_view text) {
        bool sat = false;
        if (text.substr(0, 3) == "ge:") {
            sat = true;
            text.remove_prefix(3);
        }
        if (text.empty() || text.size() > 9) {
            return std::nullopt;
        }
        unsigned k = 0;
        for (char ch : text) {
            if (ch < '0' || ch > '9') {
                return std::nullopt;
            }
            k = k * 10 + static_cast<unsigned>(ch - '0');
        }
        return Valuation{k, sat};
    }

    friend bool operator==(const Valuation&, const Valuation&) = default;
};

/// True when the measurement contradicts the prediction: below a guaranteed
/// bound, or different from an exact one.
inline bool contradicts(const Valuation& actual, const Prediction& pred) {
    if (pred.exactness == Exactness::no_guarantee) {
        return false;
    }
    if (!actual.at_least && actual.value < pred.guaranteed_lower_bound) {
        return true;
    }
    if (pred.exactness == Exactness::exact) {
        return actual.at_least || actual.value != pred.guaranteed_lower_bound;
    }
    return false;
}

struct ValuationReport {
    DivisibilityInstance instance;
    ResidueDecomposition decomposition;
    CaseLabel label;
    std::optional<SeriesValue> series;
    Valuation actual;
    Prediction prediction;
    bool anomaly = false;
    // none_divisible case with n^2 | U.
    bool exceptional = false;
};

inline constexpr unsigned kDefaultValuationCap = 64;

inline std::string_view to_string(Case c) {
    switch (c) {
    case Case::one_side_divisible: return "case1";
    case Case::sum_divisible: return "case2";
    case Case::none_divisible: return "case3";
    }
    return "?";
}

inline std::string_view to_string(Exactness e) {
    switch (e) {
    case Exactness::lower_bound: return "lower-bound";
    case Exactness::exact: return "exact";
    case Exactness::no_guarantee: return "no-guarantee";
    }
    return "?";
}

inline constexpr std::pair<Basis, std::string_view> kBasisNames[] = {
    {Basis::case1, "case1"},
    {Basis::case2_odd, "case2-odd"},
    {Basis::case2_even, "case2-even"},
    {Basis::case2_n2_exception, "case2-n2-exception"},
    {Basis::case3_prime, "case3-prime"},
    {Basis::case3_composite, "case3-composite"},
    {Basis::tcase1_prime, "tcase1-prime"},
    {Basis::tcase1_composite, "tcase1-composite"},
    {Basis::tcase2_odd, "tcase2-odd"},
    {Basis::tcase2_even, "tcase2-even"},
    {Basis::tcase2_n2_exception, "tcase2-n2-exception"},
    {Basis::uncovered, "uncovered"},
};

inline std::string_view to_string(Basis b) {
    for (const auto& [basis, name] : kBasisNames) {
        if (basis == b) {
            return name;
        }
    }
    return "?";
}

inline std::optional<Basis> parse_basis(std::string_view text) {
    for (const auto& [basis, name] : kBasisNames) {
        if (name == text) {
            return basis;
        }
    }
    return std::nullopt;
}

namespace detail {

inline void require_exponent(unsigned n) {
    if (n < 2) {
        throw domain_error("exponent n must be >= 2, got " + std::to_string(n));
    }
}

inline void require_positive(const Integer& x, const char* name) {
    if (sgn(x) <= 0) {
        throw domain_error(std::string(name) + " must be >= 1, got " + x.get_str());
    }
}

inline unsigned small_mod(const Integer& x, unsigned n) {
    return static_cast<unsigned>(mpz_fdiv_ui(x.get_mpz_t(), n));
}

} // namespace detail

inline DivisibilityInstance normalize(const Integer& a, const Integer& b, unsigned n) {
    detail::require_positive(a, "a");
    detail::require_positive(b, "b");
    detail::require_exponent(n);
    Integer g = gcd(a, b);
    return {a / g, b / g, n, g};
}

inline ResidueDecomposition decompose(const DivisibilityInstance& inst) {
    detail::require_exponent(inst.n);
    ResidueDecomposition dec;
    mpz_fdiv_q_ui(dec.g_a.get_mpz_t(), inst.a.get_mpz_t(), inst.n);
    mpz_fdiv_q_ui(dec.g_b.get_mpz_t(), inst.b.get_mpz_t(), inst.n);
    dec.r_a = detail::small_mod(inst.a, inst.n);
    dec.r_b = detail::small_mod(inst.b, inst.n);
    dec.G = dec.g_a + dec.g_b;
    dec.R = dec.r_a + dec.r_b;
    dec.g_a_divisible_by_n = detail::small_mod(dec.g_a, inst.n) == 0;
    dec.g_b_divisible_by_n = detail::small_mod(dec.g_b, inst.n) == 0;
    return dec;
}

inline CaseLabel classify(const ResidueDecomposition& dec, unsigned n) {
    detail::require_exponent(n);
    if (dec.r_a == 0 && dec.r_b == 0) {
        throw domain_error("classify: both a and b are divisible by n; extract their gcd first");
    }
    CaseLabel label;
    label.n_is_prime = is_prime(std::uint64_t{n});
    label.n_is_even = n % 2 == 0;
    if (dec.r_a == 0 || dec.r_b == 0) {
        label.kind = Case::one_side_divisible;
        label.divisible_side = dec.r_a == 0 ? DivisibleSide::a : DivisibleSide::b;
    } else if (dec.R == n) {
        label.kind = Case::sum_divisible;
    } else {
        label.kind = Case::none_divisible;
    }
    return label;
}

/// U by the power form and by the binomial sum; both must agree.
inline SeriesValue compute_U(const DivisibilityInstance& inst) {
    detail::require_exponent(inst.n);
    SeriesValue s;
    s.q = inst.a + inst.b;
    s.Q = pow_exact(inst.a, inst.n) + pow_exact(inst.b, inst.n);
    s.U = pow_exact(s.q, inst.n) - s.Q;

    Integer sum = 0;
    Integer a_pow = inst.a;                          // a^v
    Integer b_pow = pow_exact(inst.b, inst.n - 1);   // b^(n-v)
    for (unsigned v = 1; v < inst.n; ++v) {
        sum += binom(inst.n, v) * a_pow * b_pow;
        a_pow *= inst.a;
        mpz_divexact(b_pow.get_mpz_t(), b_pow.get_mpz_t(), inst.b.get_mpz_t());
    }
    if (sum != s.U) {
        throw invariant_violation("compute_U: power form " + s.U.get_str() + " != sum form " + sum.get_str());
    }
    return s;
}

/// Valuation of U by n from U mod n^(cap+1), without materializing U.
/// Returns "at least cap+1" when the residue vanishes.
inline Valuation valuation_capped(const DivisibilityInstance& inst, unsigned cap) {
    detail::require_exponent(inst.n);
    if (cap < 1) {
        throw domain_error("valuation cap must be >= 1");
    }
    const Integer modulus = pow_exact(Integer(inst.n), cap + 1);
    const Integer e = inst.n;
    Integer residue = pow_mod(inst.a + inst.b, e, modulus) - pow_mod(inst.a, e, modulus) -
                      pow_mod(inst.b, e, modulus);
    mpz_fdiv_r(residue.get_mpz_t(), residue.get_mpz_t(), modulus.get_mpz_t());
    if (sgn(residue) == 0) {
        return Valuation::saturated(cap + 1);
    }
    // n^k | U iff n^k | residue for every k <= cap + 1.
    return Valuation::exact(valuation(residue, inst.n));
}

inline Prediction predict(const CaseLabel& label, unsigned n) {
    detail::require_exponent(n);
    switch (label.kind) {
    case Case::one_side_divisible:
        return {2, Exactness::lower_bound, Basis::case1};
    case Case::sum_divisible:
        if (n % 2 == 1) {
            return {2, Exactness::lower_bound, Basis::case2_odd};
        }
        if (n == 2) {
            // U = 2ab with a, b odd.
            return {1, Exactness::exact, Basis::case2_n2_exception};
        }
        // U = -2 r_a^n (mod n) with r_a a unit mod n.
        return {0, Exactness::exact, Basis::case2_even};
    case Case::none_divisible:
        if (is_prime(std::uint64_t{n})) {
            return {1, Exactness::lower_bound, Basis::case3_prime};
        }
        return {0, Exactness::no_guarantee, Basis::case3_composite};
    }
    return {};
}

struct VerifyOptions {
    unsigned cap = kDefaultValuationCap;
    // Recompute exactly when the capped valuation saturates.
    bool exact_fallback = true;
    bool materialize_series = false;
};

inline ValuationReport verify(const Integer& a, const Integer& b, unsigned n, const VerifyOptions& opts = {}) {
    ValuationReport rep;
    rep.instance = normalize(a, b, n);
    rep.decomposition = decompose(rep.instance);
    rep.label = classify(rep.decomposition, n);
    rep.prediction = predict(rep.label, n);
    if (opts.materialize_series) {
        rep.series = compute_U(rep.instance);
    }
    rep.actual = valuation_capped(rep.instance, opts.cap);
    if (rep.actual.at_least && opts.exact_fallback) {
        if (!rep.series) {
            rep.series = compute_U(rep.instance);
        }
        rep.actual = Valuation::exact(valuation(rep.series->U, n));
    }
    rep.anomaly = contradicts(rep.actual, rep.prediction);
    rep.exceptional = rep.label.kind == Case::none_divisible && (rep.actual.at_least || rep.actual.value >= 2);
    return rep;
}

inline ValuationReport verify(const Integer& a, const Integer& b, unsigned n, unsigned cap) {
    VerifyOptions opts;
    opts.cap = cap;
    return verify(a, b, n, opts);
}

/// Checks sum_{v=1}^{n-1} C(n,v) r^v (n-r)^(n-v) = n^n - r^n - (n-r)^n exactly.
inline bool case2_identity_check(unsigned r_a, unsigned n) {
    detail::require_exponent(n);
    if (r_a < 1 || r_a >= n) {
        throw domain_error("case2_identity_check: r_a must lie in [1, n-1]");
    }
    const Integer r = r_a;
    const Integer s = n - r_a;
    Integer lhs = 0;
    for (unsigned v = 1; v < n; ++v) {
        lhs += binom(n, v) * pow_exact(r, v) * pow_exact(s, n - v);
    }
    const Integer rhs = pow_exact(Integer(n), n) - pow_exact(r, n) - pow_exact(s, n);
    return lhs == rhs;
}

} // namespace tbs
