#pragma once

// Range sweeps over (a, b[, c]) x exponent sets.
//
// Work is cut into (n, a) slices. Workers compute slices independently; a
// single merge loop emits them strictly in (n, a, b, c) order, so the record
// stream does not depend on the worker count.

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "tbs/fermat_quotient.hpp"
#include "tbs/records.hpp"
#include "tbs/trinomial.hpp"

namespace tbs {

struct IntRange {
    std::uint64_t lo = 1;
    std::uint64_t hi = 1;
};

enum class CaseFilter { case1, case2, case3, tcase1, tcase2 };

inline std::optional<CaseFilter> parse_case_filter(std::string_view text) {
    if (text == "1") return CaseFilter::case1;
    if (text == "2") return CaseFilter::case2;
    if (text == "3") return CaseFilter::case3;
    if (text == "t1") return CaseFilter::tcase1;
    if (text == "t2") return CaseFilter::tcase2;
    return std::nullopt;
}

struct ScanConfig {
    IntRange a_range;
    IntRange b_range;
    std::optional<IntRange> c_range;
    std::vector<unsigned> exponents;
    bool coprime_only = true;
    std::optional<CaseFilter> case_filter;
    unsigned valuation_cap = kDefaultValuationCap;
    unsigned workers = 1;
    // Skip every slice up to and including this one (resume support).
    std::optional<Progress> resume_after;
};

struct ScanSummary {
    std::uint64_t records = 0;
    std::uint64_t anomalies = 0;
    std::uint64_t exceptional = 0;
};

struct ScanCallbacks {
    std::function<void(const ScanRecord&)> on_record;
    // Called after the last record of an (n, a) slice; last_of_n marks the
    // final slice for that exponent.
    std::function<void(const Progress&, bool last_of_n)> on_slice_done;
};

/// Every exponent in [lo, hi].
inline std::vector<unsigned> exponent_range(unsigned lo, unsigned hi) {
    std::vector<unsigned> out;
    for (unsigned n = lo; n <= hi; ++n) {
        out.push_back(n);
    }
    return out;
}

inline std::vector<unsigned> primes_up_to(unsigned hi) {
    std::vector<unsigned> out;
    for (auto p : primes_in(2, hi)) {
        out.push_back(static_cast<unsigned>(p));
    }
    return out;
}

namespace detail {

inline void validate(const ScanConfig& cfg, bool triples) {
    const auto check = [](const IntRange& r, const char* name) {
        if (r.lo < 1 || r.lo > r.hi) {
            throw domain_error(std::string(name) + " must be a nonempty range of positive integers");
        }
    };
    check(cfg.a_range, "a range");
    check(cfg.b_range, "b range");
    if (triples) {
        if (!cfg.c_range) {
            throw domain_error("triple scan requires a c range");
        }
        check(*cfg.c_range, "c range");
    }
    if (cfg.exponents.empty()) {
        throw domain_error("no exponents to scan");
    }
    for (unsigned n : cfg.exponents) {
        require_exponent(n);
    }
    if (cfg.valuation_cap < 1) {
        throw domain_error("valuation cap must be >= 1");
    }
    if (cfg.case_filter) {
        const bool trinomial_filter = *cfg.case_filter == CaseFilter::tcase1 || *cfg.case_filter == CaseFilter::tcase2;
        if (trinomial_filter != triples) {
            throw domain_error(triples ? "triple scans take case filter t1 or t2" : "pair scans take case filter 1, 2 or 3");
        }
    }
}

inline bool passes(const std::optional<CaseFilter>& filter, Case c) {
    if (!filter) {
        return true;
    }
    switch (*filter) {
    case CaseFilter::case1: return c == Case::one_side_divisible;
    case CaseFilter::case2: return c == Case::sum_divisible;
    case CaseFilter::case3: return c == Case::none_divisible;
    default: return false;
    }
}

inline bool passes(const std::optional<CaseFilter>& filter, TrinomialCase c) {
    if (!filter) {
        return true;
    }
    switch (*filter) {
    case CaseFilter::tcase1: return c == TrinomialCase::t_case1;
    case CaseFilter::tcase2: return c == TrinomialCase::t_case2;
    default: return false;
    }
}

inline std::vector<ScanRecord> pair_slice(const ScanConfig& cfg, unsigned n, std::uint64_t a_value) {
    std::vector<ScanRecord> out;
    const Integer a = from_u64(a_value);
    VerifyOptions opts;
    opts.cap = cfg.valuation_cap;
    for (std::uint64_t bv = cfg.b_range.lo; bv <= cfg.b_range.hi; ++bv) {
        const Integer b = from_u64(bv);
        if (cfg.coprime_only && gcd(a, b) != 1) {
            continue;
        }
        // Cheap pre-filter on residues before any exponentiation.
        if (cfg.case_filter) {
            const Integer g = gcd(a, b);
            DivisibilityInstance inst{a / g, b / g, n, g};
            if (!passes(cfg.case_filter, classify(decompose(inst), n).kind)) {
                continue;
            }
        }
        const ValuationReport rep = verify(a, b, n, opts);
        ScanRecord r;
        r.a = a;
        r.b = b;
        r.n = n;
        r.case_label = std::string(to_string(rep.label.kind));
        r.valuation = rep.actual;
        r.predicted_bound = rep.prediction.guaranteed_lower_bound;
        r.basis = rep.prediction.basis;
        r.anomaly = rep.anomaly;
        r.exceptional = rep.exceptional;
        r.extracted_gcd = rep.instance.extracted_gcd;
        out.push_back(std::move(r));
    }
    return out;
}

inline std::vector<ScanRecord> triple_slice(const ScanConfig& cfg, unsigned n, std::uint64_t a_value) {
    std::vector<ScanRecord> out;
    const Integer a = from_u64(a_value);
    VerifyOptions opts;
    opts.cap = cfg.valuation_cap;
    for (std::uint64_t bv = cfg.b_range.lo; bv <= cfg.b_range.hi; ++bv) {
        const Integer b = from_u64(bv);
        const Integer gab = gcd(a, b);
        for (std::uint64_t cv = cfg.c_range->lo; cv <= cfg.c_range->hi; ++cv) {
            const Integer c = from_u64(cv);
            if (cfg.coprime_only && gcd(gab, c) != 1) {
                continue;
            }
            if (cfg.case_filter && !passes(cfg.case_filter, classify3(normalize3(a, b, c, n)))) {
                continue;
            }
            const TrinomialReport rep = verify3(a, b, c, n, opts);
            ScanRecord r;
            r.a = a;
            r.b = b;
            r.c = c;
            r.n = n;
            r.case_label = std::string(to_string(rep.label));
            r.valuation = rep.actual;
            r.predicted_bound = rep.prediction.guaranteed_lower_bound;
            r.basis = rep.prediction.basis;
            r.anomaly = rep.anomaly;
            r.extracted_gcd = rep.instance.extracted_gcd;
            out.push_back(std::move(r));
        }
    }
    return out;
}

struct Slice {
    unsigned n;
    std::uint64_t a;
    bool last_of_n;
};

inline std::vector<Slice> make_slices(const ScanConfig& cfg) {
    std::vector<unsigned> ns = cfg.exponents;
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    std::vector<Slice> slices;
    for (unsigned n : ns) {
        for (std::uint64_t a = cfg.a_range.lo; a <= cfg.a_range.hi; ++a) {
            if (cfg.resume_after) {
                const Integer av = from_u64(a);
                if (n < cfg.resume_after->n || (n == cfg.resume_after->n && av <= cfg.resume_after->a)) {
                    continue;
                }
            }
            slices.push_back({n, a, a == cfg.a_range.hi});
        }
    }
    return slices;
}

template <typename SliceFn>
ScanSummary run_slices(const ScanConfig& cfg, const ScanCallbacks& cb, SliceFn compute) {
    const std::vector<Slice> slices = make_slices(cfg);
    ScanSummary summary;
    const auto emit = [&](const Slice& s, const std::vector<ScanRecord>& records) {
        for (const auto& r : records) {
            ++summary.records;
            summary.anomalies += r.anomaly ? 1 : 0;
            summary.exceptional += r.exceptional ? 1 : 0;
            if (cb.on_record) {
                cb.on_record(r);
            }
        }
        if (cb.on_slice_done) {
            cb.on_slice_done(Progress{s.n, from_u64(s.a)}, s.last_of_n);
        }
    };

    const std::size_t workers = std::clamp<std::size_t>(cfg.workers, 1, std::max<std::size_t>(slices.size(), 1));
    if (workers == 1) {
        for (const auto& s : slices) {
            emit(s, compute(s.n, s.a));
        }
        return summary;
    }

    // Bounded look-ahead keeps memory proportional to the worker count.
    const std::size_t window = 4 * workers;
    std::vector<std::optional<std::vector<ScanRecord>>> done(slices.size());
    std::mutex mu;
    std::condition_variable cv;
    std::size_t emitted = 0;
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    bool stop = false;

    const auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= slices.size()) {
                return;
            }
            {
                std::unique_lock lock(mu);
                cv.wait(lock, [&] { return stop || i < emitted + window; });
                if (stop) {
                    return;
                }
            }
            std::vector<ScanRecord> part;
            try {
                part = compute(slices[i].n, slices[i].a);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) {
                    failure = std::current_exception();
                }
                stop = true;
                cv.notify_all();
                return;
            }
            std::lock_guard lock(mu);
            done[i] = std::move(part);
            cv.notify_all();
        }
    };

    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back(worker);
    }
    try {
        for (std::size_t i = 0; i < slices.size(); ++i) {
            std::vector<ScanRecord> part;
            {
                std::unique_lock lock(mu);
                cv.wait(lock, [&] { return stop || done[i].has_value(); });
                if (!done[i]) {
                    break;
                }
                part = std::move(*done[i]);
                done[i].reset();
            }
            emit(slices[i], part);
            {
                std::lock_guard lock(mu);
                emitted = i + 1;
            }
            cv.notify_all();
        }
    } catch (...) {
        {
            std::lock_guard lock(mu);
            stop = true;
        }
        cv.notify_all();
        throw;
    }
    pool.clear();
    if (failure) {
        std::rethrow_exception(failure);
    }
    return summary;
}

} // namespace detail

inline ScanSummary scan_pairs(const ScanConfig& cfg, const ScanCallbacks& cb) {
    detail::validate(cfg, false);
    return detail::run_slices(cfg, cb, [&cfg](unsigned n, std::uint64_t a) { return detail::pair_slice(cfg, n, a); });
}

inline ScanSummary scan_triples(const ScanConfig& cfg, const ScanCallbacks& cb) {
    detail::validate(cfg, true);
    return detail::run_slices(cfg, cb, [&cfg](unsigned n, std::uint64_t a) { return detail::triple_slice(cfg, n, a); });
}

/// Collecting convenience overloads.
inline std::pair<std::vector<ScanRecord>, ScanSummary> scan_pairs(const ScanConfig& cfg) {
    std::vector<ScanRecord> out;
    const auto summary = scan_pairs(cfg, {[&out](const ScanRecord& r) { out.push_back(r); }, {}});
    return {std::move(out), summary};
}

inline std::pair<std::vector<ScanRecord>, ScanSummary> scan_triples(const ScanConfig& cfg) {
    std::vector<ScanRecord> out;
    const auto summary = scan_triples(cfg, {[&out](const ScanRecord& r) { out.push_back(r); }, {}});
    return {std::move(out), summary};
}

struct ScanOutput {
    std::string path;
    RecordFormat format = RecordFormat::jsonl;
    // JSONL only: progress line after each completed exponent.
    bool checkpoint = false;
    // JSONL only: continue from the last progress line of an existing file.
    bool resume = false;
};

/// Runs a scan straight into a file; the merge loop is the only writer.
inline ScanSummary scan_to_file(ScanConfig cfg, const ScanOutput& out, bool triples) {
    bool append = false;
    if (out.resume && out.format == RecordFormat::jsonl && std::filesystem::exists(out.path)) {
        if (const auto cp = find_checkpoint(out.path)) {
            // Drop anything written after the last checkpoint.
            std::error_code ec;
            std::filesystem::resize_file(out.path, cp->offset, ec);
            if (ec) {
                throw io_error(out.path, 0, "cannot truncate for resume: " + ec.message());
            }
            cfg.resume_after = cp->progress;
            append = true;
        }
    }
    RecordWriter writer(out.path, out.format, append);
    ScanCallbacks cb;
    cb.on_record = [&writer](const ScanRecord& r) { writer.write(r); };
    if (out.checkpoint) {
        cb.on_slice_done = [&writer](const Progress& p, bool last_of_n) {
            if (last_of_n) {
                writer.checkpoint(p);
            }
        };
    }
    const ScanSummary summary = triples ? scan_triples(cfg, cb) : scan_pairs(cfg, cb);
    writer.close();
    return summary;
}

/// Exceptional-pair frequency for a prime exponent, as an exact ratio.
struct FrequencySummary {
    unsigned p = 2;
    std::uint64_t case3_pair_count = 0;
    std::uint64_t exceptional_count = 0;
    // exceptional_count / case3_pair_count in lowest terms; 0/1 when empty.
    std::uint64_t ratio_numerator = 0;
    std::uint64_t ratio_denominator = 1;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> exceptional_pairs;
};

inline FrequencySummary frequency_report(unsigned p, std::uint64_t bound) {
    detail::require_prime(p);
    if (bound < p) {
        throw domain_error("frequency_report: bound must be >= p");
    }
    FrequencySummary s;
    s.p = p;
    const Integer modulus = Integer(p) * p;
    const Integer e = p;
    for (std::uint64_t a = 1; a <= bound; ++a) {
        for (std::uint64_t b = 1; b <= bound; ++b) {
            if (std::gcd(a, b) != 1) {
                continue;
            }
            const std::uint64_t r_a = a % p;
            const std::uint64_t r_b = b % p;
            if (r_a == 0 || r_b == 0 || r_a + r_b == p) {
                continue;
            }
            ++s.case3_pair_count;
            const Integer A = detail::from_u64(a);
            const Integer B = detail::from_u64(b);
            Integer residue = pow_mod(A + B, e, modulus) - pow_mod(A, e, modulus) - pow_mod(B, e, modulus);
            if (mpz_divisible_p(residue.get_mpz_t(), modulus.get_mpz_t()) != 0) {
                ++s.exceptional_count;
                s.exceptional_pairs.emplace_back(a, b);
            }
        }
    }
    if (s.case3_pair_count != 0) {
        const std::uint64_t g = std::gcd(s.exceptional_count, s.case3_pair_count);
        s.ratio_numerator = s.exceptional_count / g;
        s.ratio_denominator = s.case3_pair_count / g;
    }
    return s;
}

} // namespace tbs
