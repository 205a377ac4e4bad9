#pragma once

// Fermat quotients and the quotient decomposition of U(a, b) for a prime
// exponent p:
//
//   mu(x)  = (x^p - x) / p
//   U(a,b) = (a+b)^p - a^p - b^p = p * (mu(a+b) - mu(a) - mu(b))
//
// so p^2 | U exactly when the combination M = mu(a+b) - mu(a) - mu(b) is
// divisible by p. Also: Wieferich-type sweeps base^(p-1) = 1 (mod p^r).

#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

#include "tbs/binomial.hpp"

namespace tbs {

struct QuotientTriple {
    unsigned p = 2;
    Integer mu_a;
    Integer mu_b;
    Integer mu_ab;
    Integer combination_M;  // signed; mu_ab - mu_a - mu_b
};

struct WieferichHit {
    std::uint64_t base = 2;
    std::uint64_t p = 2;
    unsigned max_power_r = 2;

    friend bool operator==(const WieferichHit&, const WieferichHit&) = default;
};

namespace detail {

inline void require_prime(unsigned p) {
    if (!is_prime(std::uint64_t{p})) {
        throw domain_error(std::to_string(p) + " is not prime");
    }
}

} // namespace detail

inline Integer mu(const Integer& x, unsigned p) {
    detail::require_natural(x, "mu argument");
    detail::require_prime(p);
    Integer out = pow_exact(x, p) - x;
    mpz_divexact_ui(out.get_mpz_t(), out.get_mpz_t(), p);
    return out;
}

inline Integer fermat_quotient(const Integer& x, unsigned p) {
    detail::require_natural(x, "fermat_quotient argument");
    detail::require_prime(p);
    if (mpz_divisible_ui_p(x.get_mpz_t(), p) != 0) {
        throw domain_error("fermat_quotient: " + std::to_string(p) + " divides " + x.get_str());
    }
    Integer out = pow_exact(x, p - 1) - 1;
    mpz_divexact_ui(out.get_mpz_t(), out.get_mpz_t(), p);
    return out;
}

inline QuotientTriple combination(const Integer& a, const Integer& b, unsigned p) {
    QuotientTriple t;
    t.p = p;
    t.mu_a = mu(a, p);
    t.mu_b = mu(b, p);
    t.mu_ab = mu(a + b, p);
    t.combination_M = t.mu_ab - t.mu_a - t.mu_b;
    const Integer U = pow_exact(a + b, p) - pow_exact(a, p) - pow_exact(b, p);
    if (U != t.combination_M * p) {
        throw invariant_violation("combination: U = " + U.get_str() + " != p*M for p = " + std::to_string(p));
    }
    return t;
}

struct ExceptionalCheck {
    unsigned residue = 0;      // M mod p
    bool exceptional = false;  // residue == 0, i.e. p^2 | U
    bool is_case3 = false;     // (a, b) is in the none-divisible case for exponent p
};

/// p^2 | U(a, b) decided through M mod p. The pair is expected to be in the
/// none-divisible case; is_case3 flags when it is not.
inline ExceptionalCheck exceptional_criterion(const Integer& a, const Integer& b, unsigned p) {
    const QuotientTriple t = combination(a, b, p);
    ExceptionalCheck out;
    out.residue = static_cast<unsigned>(mpz_fdiv_ui(t.combination_M.get_mpz_t(), p));
    out.exceptional = out.residue == 0;
    const unsigned r_a = detail::small_mod(a, p);
    const unsigned r_b = detail::small_mod(b, p);
    out.is_case3 = r_a != 0 && r_b != 0 && r_a + r_b != p;
    return out;
}

struct WieferichOptions {
    // Odd primes only unless set.
    bool include_two = false;
    // Lower end of the prime range; lets a sweep be split into sub-ranges.
    std::uint64_t p_from = 2;
    unsigned workers = 1;
};

namespace detail {

// Largest r' <= ceiling with base^(p-1) = 1 mod p^r'.
inline unsigned wieferich_power(std::uint64_t base, std::uint64_t p, unsigned ceiling) {
    const Integer P = from_u64(p);
    const Integer modulus = pow_exact(P, ceiling);
    Integer d = pow_mod(from_u64(base), P - 1, modulus) - 1;
    if (sgn(d) == 0) {
        return ceiling;
    }
    if (sgn(d) < 0) {
        d += modulus;
    }
    return valuation(d, P);
}

inline std::vector<WieferichHit> wieferich_range(std::uint64_t base, unsigned r,
                                                 const std::vector<std::uint64_t>& primes,
                                                 std::size_t begin, std::size_t end) {
    std::vector<WieferichHit> hits;
    for (std::size_t i = begin; i < end; ++i) {
        const std::uint64_t p = primes[i];
        if (base % p == 0) {
            continue;
        }
        const unsigned got = wieferich_power(base, p, r + 2);
        if (got >= r) {
            hits.push_back({base, p, got});
        }
    }
    return hits;
}

} // namespace detail

/// Primes p <= p_limit, p not dividing base, with base^(p-1) = 1 (mod p^r),
/// ascending. Each hit carries the largest power reached, capped at r + 2.
inline std::vector<WieferichHit> wieferich_scan(std::uint64_t base, std::uint64_t p_limit, unsigned r,
                                                const WieferichOptions& opts = {}) {
    if (base < 2) {
        throw domain_error("wieferich_scan: base must be >= 2");
    }
    if (r < 2) {
        throw domain_error("wieferich_scan: power r must be >= 2");
    }
    const std::vector<std::uint64_t> primes = primes_in(std::max<std::uint64_t>(opts.p_from, opts.include_two ? 2 : 3), p_limit);
    const std::size_t workers = std::clamp<std::size_t>(opts.workers, 1, std::max<std::size_t>(primes.size(), 1));
    if (workers == 1) {
        return detail::wieferich_range(base, r, primes, 0, primes.size());
    }

    // Contiguous chunks, concatenated in chunk order, keep the output ascending.
    std::vector<std::vector<WieferichHit>> parts(workers);
    {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (primes.size() + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t begin = std::min(primes.size(), w * chunk);
            const std::size_t end = std::min(primes.size(), begin + chunk);
            pool.emplace_back([&, w, begin, end] { parts[w] = detail::wieferich_range(base, r, primes, begin, end); });
        }
    }
    std::vector<WieferichHit> hits;
    for (auto& part : parts) {
        hits.insert(hits.end(), part.begin(), part.end());
    }
    return hits;
}

} // namespace tbs
