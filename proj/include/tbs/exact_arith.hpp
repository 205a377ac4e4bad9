#pragma once

// Exact integer primitives shared by every analysis layer.
//
// All magnitudes are carried as GMP integers. Functions that are documented
// to take a "natural" reject negative arguments with tbs::domain_error.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace tbs {

using Integer = mpz_class;

/// Raised when an argument lies outside an operation's domain.
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised when two independent computations of the same quantity disagree.
/// Never expected; its presence means a bug.
class invariant_violation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

namespace detail {

inline void require_natural(const Integer& x, const char* what) {
    if (sgn(x) < 0) {
        throw domain_error(std::string(what) + " must be nonnegative, got " + x.get_str());
    }
}

inline std::uint64_t mul_mod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t pow_mod_u64(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t result = 1 % m;
    base %= m;
    while (exp != 0) {
        if (exp & 1U) {
            result = mul_mod_u64(result, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1U;
    }
    return result;
}

inline bool fits_u64(const Integer& x) {
    return sgn(x) >= 0 && mpz_sizeinbase(x.get_mpz_t(), 2) <= 64;
}

inline std::uint64_t to_u64(const Integer& x) {
    std::uint64_t out = 0;
    mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, x.get_mpz_t());
    return out;
}

inline Integer from_u64(std::uint64_t x) {
    Integer out;
    mpz_import(out.get_mpz_t(), 1, -1, sizeof(x), 0, 0, &x);
    return out;
}

// Strong-probable-prime test to one base; n odd, n > base.
inline bool sprp_u64(std::uint64_t n, std::uint64_t base) {
    std::uint64_t d = n - 1;
    unsigned s = 0;
    while ((d & 1U) == 0) {
        d >>= 1U;
        ++s;
    }
    std::uint64_t x = pow_mod_u64(base, d, n);
    if (x == 1 || x == n - 1) {
        return true;
    }
    for (unsigned i = 1; i < s; ++i) {
        x = mul_mod_u64(x, x, n);
        if (x == n - 1) {
            return true;
        }
    }
    return false;
}

inline bool sprp(const Integer& n, const Integer& base) {
    Integer d = n - 1;
    const auto s = static_cast<unsigned>(mpz_scan1(d.get_mpz_t(), 0));
    d >>= s;
    Integer x;
    mpz_powm(x.get_mpz_t(), base.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    const Integer minus_one = n - 1;
    if (x == 1 || x == minus_one) {
        return true;
    }
    for (unsigned i = 1; i < s; ++i) {
        x = x * x % n;
        if (x == minus_one) {
            return true;
        }
    }
    return false;
}

inline constexpr std::uint64_t kMillerRabinBases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};

} // namespace detail

/// Binomial coefficient C(n, v), exact.
inline Integer binom(unsigned n, unsigned v) {
    if (v > n) {
        throw domain_error("binom: v = " + std::to_string(v) + " exceeds n = " + std::to_string(n));
    }
    if (v > n - v) {
        v = n - v;
    }
    // Each partial product C(n - v + i, i) is an integer, so the division is exact.
    Integer acc = 1;
    for (unsigned i = 1; i <= v; ++i) {
        acc *= n - v + i;
        mpz_divexact_ui(acc.get_mpz_t(), acc.get_mpz_t(), i);
    }
    return acc;
}

inline Integer pow_exact(const Integer& base, unsigned long exp) {
    Integer out;
    mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), exp);
    return out;
}

/// base^exp mod modulus by left-to-right square-and-multiply. The base may be
/// negative; the result is always the least nonnegative residue.
inline Integer pow_mod(const Integer& base, const Integer& exp, const Integer& modulus) {
    detail::require_natural(exp, "pow_mod exponent");
    if (modulus < 2) {
        throw domain_error("pow_mod: modulus must be >= 2, got " + modulus.get_str());
    }
    Integer b = base % modulus;
    if (sgn(b) < 0) {
        b += modulus;
    }
    Integer result = 1;
    for (auto bit = static_cast<long>(mpz_sizeinbase(exp.get_mpz_t(), 2)) - 1; bit >= 0; --bit) {
        result = result * result % modulus;
        if (mpz_tstbit(exp.get_mpz_t(), static_cast<mp_bitcnt_t>(bit)) != 0) {
            result = result * b % modulus;
        }
    }
    return result;
}

/// Largest k with base^k | x. Divide loop on the exact value; x may be negative.
inline unsigned valuation(const Integer& x, const Integer& base) {
    if (sgn(x) == 0) {
        throw domain_error("valuation: x = 0 has no finite valuation");
    }
    if (base < 2) {
        throw domain_error("valuation: base must be >= 2, got " + base.get_str());
    }
    Integer rest = abs(x);
    Integer q;
    Integer r;
    unsigned k = 0;
    for (;;) {
        mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), rest.get_mpz_t(), base.get_mpz_t());
        if (sgn(r) != 0) {
            return k;
        }
        rest.swap(q);
        ++k;
    }
}

/// Deterministic Miller-Rabin. The 13 prime bases are a proven witness set
/// for every n < 3.3 * 10^24, which covers all of uint64.
inline bool is_prime(std::uint64_t n) {
    if (n < 2) {
        return false;
    }
    for (std::uint64_t p : detail::kMillerRabinBases) {
        if (n % p == 0) {
            return n == p;
        }
    }
    if (n < 41 * 41) {
        return true;
    }
    for (std::uint64_t base : detail::kMillerRabinBases) {
        if (!detail::sprp_u64(n, base)) {
            return false;
        }
    }
    return true;
}

inline bool is_prime(const Integer& n) {
    if (sgn(n) <= 0) {
        return false;
    }
    if (detail::fits_u64(n)) {
        return is_prime(detail::to_u64(n));
    }
    // 3317044064679887385961981 = 3.3e24, bound of the 13-base witness set.
    static const Integer kDeterministicLimit("3317044064679887385961981");
    if (n >= kDeterministicLimit) {
        throw domain_error("is_prime: " + n.get_str() + " exceeds the deterministic range");
    }
    if (mpz_even_p(n.get_mpz_t()) != 0) {
        return false;
    }
    for (std::uint64_t base : detail::kMillerRabinBases) {
        if (!detail::sprp(n, detail::from_u64(base))) {
            return false;
        }
    }
    return true;
}

inline Integer gcd(const Integer& x, const Integer& y) {
    detail::require_natural(x, "gcd argument");
    detail::require_natural(y, "gcd argument");
    if (sgn(x) == 0 && sgn(y) == 0) {
        throw domain_error("gcd(0, 0) is undefined");
    }
    Integer out;
    mpz_gcd(out.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
    return out;
}

/// Sieve of Eratosthenes: every prime in [lo, hi], ascending.
inline std::vector<std::uint64_t> primes_in(std::uint64_t lo, std::uint64_t hi) {
    std::vector<std::uint64_t> out;
    if (hi < 2 || lo > hi) {
        return out;
    }
    std::vector<bool> composite(hi + 1, false);
    for (std::uint64_t i = 2; i * i <= hi; ++i) {
        if (!composite[i]) {
            for (std::uint64_t j = i * i; j <= hi; j += i) {
                composite[j] = true;
            }
        }
    }
    for (std::uint64_t i = lo < 2 ? 2 : lo; i <= hi; ++i) {
        if (!composite[i]) {
            out.push_back(i);
        }
    }
    return out;
}

} // namespace tbs
