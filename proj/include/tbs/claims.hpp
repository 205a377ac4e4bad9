#pragma once

// Desk-scale verification of every divisibility claim the library encodes.
// Each check is exhaustive over its stated ranges and carries a wall-clock
// budget; exceeding the budget fails the check.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tbs/scan.hpp"

namespace tbs {

struct ClaimResult {
    int id = 0;
    std::string title;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
    double budget_seconds = 0.0;
};

struct ClaimOptions {
    unsigned workers = 1;
    // Scratch space for the file-based checks; a fresh temp directory if empty.
    std::filesystem::path scratch_dir;
};

namespace detail {

struct Tally {
    std::uint64_t checked = 0;
    std::uint64_t failures = 0;
    std::string first_failure;

    void fail(const std::string& what) {
        if (failures++ == 0) {
            first_failure = what;
        }
    }
    bool ok() const { return checked > 0 && failures == 0; }
    std::string describe(const std::string& unit) const {
        std::string out = std::to_string(checked) + " " + unit + ", " + std::to_string(failures) + " failures";
        if (failures != 0) {
            out += " (first: " + first_failure + ")";
        }
        return out;
    }
};

inline std::string where(const ScanRecord& r) {
    std::string s = "(" + r.a.get_str() + "," + r.b.get_str();
    if (r.c) {
        s += "," + r.c->get_str();
    }
    return s + ") n=" + std::to_string(r.n) + " valuation " + r.valuation.to_string();
}

inline ScanConfig pair_sweep(std::uint64_t hi, std::vector<unsigned> ns, CaseFilter filter, unsigned workers) {
    ScanConfig cfg;
    cfg.a_range = {1, hi};
    cfg.b_range = {1, hi};
    cfg.exponents = std::move(ns);
    cfg.case_filter = filter;
    cfg.workers = workers;
    return cfg;
}

inline std::vector<unsigned> odd_in(unsigned lo, unsigned hi) {
    std::vector<unsigned> out;
    for (unsigned n = lo; n <= hi; ++n) {
        if (n % 2 == 1) {
            out.push_back(n);
        }
    }
    return out;
}

inline std::vector<unsigned> even_in(unsigned lo, unsigned hi) {
    std::vector<unsigned> out;
    for (unsigned n = lo; n <= hi; ++n) {
        if (n % 2 == 0) {
            out.push_back(n);
        }
    }
    return out;
}

// Exact valuation must be >= min_k (and == exact_k when given).
inline void tally_sweep(Tally& t, const ScanConfig& cfg, unsigned min_k, std::optional<unsigned> exact_k = {}) {
    scan_pairs(cfg, {[&](const ScanRecord& r) {
                         ++t.checked;
                         const bool low = !r.valuation.at_least && r.valuation.value < min_k;
                         const bool off = exact_k && (r.valuation.at_least || r.valuation.value != *exact_k);
                         if (low || off || r.anomaly) {
                             t.fail(where(r));
                         }
                     },
                     {}});
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace detail

inline ClaimResult claim_case1_bound(const ClaimOptions& opt) {
    detail::Tally t;
    detail::tally_sweep(t, detail::pair_sweep(150, exponent_range(2, 24), CaseFilter::case1, opt.workers), 2);
    return {1, "one-side-divisible pairs: n^2 | U", t.ok(), t.describe("records")};
}

inline ClaimResult claim_case2_odd_bound(const ClaimOptions& opt) {
    detail::Tally t;
    detail::tally_sweep(t, detail::pair_sweep(150, detail::odd_in(3, 23), CaseFilter::case2, opt.workers), 2);
    return {2, "sum-divisible pairs, odd n: n^2 | U", t.ok(), t.describe("records")};
}

inline ClaimResult claim_case2_even_exact(const ClaimOptions& opt) {
    detail::Tally t;
    detail::tally_sweep(t, detail::pair_sweep(150, detail::even_in(4, 24), CaseFilter::case2, opt.workers), 0, 0U);
    detail::Tally t2;
    detail::tally_sweep(t2, detail::pair_sweep(150, {2}, CaseFilter::case2, opt.workers), 1, 1U);
    return {3, "sum-divisible pairs, even n: valuation exactly 0 (n >= 4), exactly 1 (n = 2)", t.ok() && t2.ok(),
            "n>=4: " + t.describe("records") + "; n=2: " + t2.describe("records")};
}

inline ClaimResult claim_case3_prime(const ClaimOptions& opt) {
    detail::Tally identity;
    for (unsigned p : primes_up_to(97)) {
        for (unsigned a = 1; a <= 60; ++a) {
            for (unsigned b = 1; b <= 60; ++b) {
                ++identity.checked;
                try {
                    const QuotientTriple t = combination(a, b, p);
                    // Independent recomputation through the binomial sum.
                    const SeriesValue s = compute_U(DivisibilityInstance{a, b, p, 1});
                    if (s.U != p * t.combination_M) {
                        identity.fail("(" + std::to_string(a) + "," + std::to_string(b) + ") p=" + std::to_string(p));
                    }
                } catch (const invariant_violation& e) {
                    identity.fail(e.what());
                }
            }
        }
    }
    detail::Tally bound;
    detail::tally_sweep(bound, detail::pair_sweep(60, primes_up_to(97), CaseFilter::case3, opt.workers), 1);
    return {4, "prime n: U = p * (mu(a+b) - mu(a) - mu(b)) and p | U", identity.ok() && bound.ok(),
            "identity: " + identity.describe("pairs") + "; bound: " + bound.describe("case-3 records")};
}

inline ClaimResult claim_case3_composite(const ClaimOptions& opt) {
    std::vector<unsigned> composites;
    for (unsigned n = 4; n <= 24; ++n) {
        if (!is_prime(std::uint64_t{n})) {
            composites.push_back(n);
        }
    }
    std::map<unsigned, std::string> witness;
    scan_pairs(detail::pair_sweep(50, composites, CaseFilter::case3, opt.workers),
               {[&](const ScanRecord& r) {
                    if (!r.valuation.at_least && r.valuation.value == 0 && !witness.contains(r.n)) {
                        witness[r.n] = "(" + r.a.get_str() + "," + r.b.get_str() + ")";
                    }
                },
                {}});
    std::string detail;
    bool ok = true;
    for (unsigned n : composites) {
        if (!witness.contains(n)) {
            ok = false;
            detail += "no witness for n=" + std::to_string(n) + "; ";
        }
    }
    const auto u14 = compute_U(normalize(1, 1, 4));
    ok = ok && u14.U == 14 && valuation(u14.U, 4) == 0;
    detail += std::to_string(witness.size()) + "/" + std::to_string(composites.size()) +
              " composite n have a valuation-0 witness; U(1,1) at n=4 is " + u14.U.get_str();
    return {5, "none-divisible pairs, composite n: no guarantee (valuation-0 witnesses)", ok, detail};
}

inline ClaimResult claim_exceptional_spots(const ClaimOptions&) {
    VerifyOptions vo;
    vo.materialize_series = true;
    const auto rep = verify(1, 2, 7, vo);
    const auto freq = frequency_report(5, 50);
    const bool ok = rep.actual == Valuation::exact(3) && rep.exceptional && rep.series && rep.series->U == 2058 &&
                    freq.exceptional_count == 0 && freq.case3_pair_count > 0;
    return {6, "exceptional-pair spot checks", ok,
            "U(1,2) at n=7 = " + (rep.series ? rep.series->U.get_str() : std::string("?")) + ", valuation " +
                rep.actual.to_string() + ", exceptional " + (rep.exceptional ? "true" : "false") +
                "; p=5 bound 50: " + std::to_string(freq.exceptional_count) + "/" +
                std::to_string(freq.case3_pair_count) + " exceptional"};
}

inline ClaimResult claim_trinomial(const ClaimOptions& opt) {
    detail::Tally split;
    for (unsigned n = 2; n <= 12; ++n) {
        for (unsigned a = 1; a <= 25; ++a) {
            for (unsigned b = 1; b <= 25; ++b) {
                for (unsigned c = 1; c <= 25; ++c) {
                    ++split.checked;
                    try {
                        compute_U3(TrinomialInstance{a, b, c, n, 1});
                    } catch (const invariant_violation& e) {
                        split.fail(e.what());
                    }
                }
            }
        }
    }

    detail::Tally bounds;
    ScanConfig cfg;
    cfg.a_range = cfg.b_range = {1, 25};
    cfg.c_range = IntRange{1, 25};
    cfg.exponents = exponent_range(2, 12);
    cfg.workers = opt.workers;
    std::uint64_t covered = 0;
    scan_triples(cfg, {[&](const ScanRecord& r) {
                           if (r.basis == Basis::uncovered || r.basis == Basis::tcase1_composite) {
                               return;
                           }
                           ++covered;
                           ++bounds.checked;
                           const unsigned k = r.valuation.value;
                           bool bad = r.anomaly;
                           switch (r.basis) {
                           case Basis::tcase1_prime: bad = bad || (!r.valuation.at_least && k < 1); break;
                           case Basis::tcase2_odd: bad = bad || (!r.valuation.at_least && k < 2); break;
                           case Basis::tcase2_even: bad = bad || r.valuation != Valuation::exact(0); break;
                           case Basis::tcase2_n2_exception: bad = bad || r.valuation != Valuation::exact(1); break;
                           default: bad = true;
                           }
                           if (bad) {
                               bounds.fail(detail::where(r));
                           }
                       },
                       {}});

    const auto w1 = verify3(1, 1, 3, 3);
    const auto w2 = verify3(1, 2, 3, 3);
    const bool witnesses = w1.label == TrinomialCase::t_case1 && w1.actual == Valuation::exact(1) &&
                           w2.label == TrinomialCase::t_case2 && w2.actual == Valuation::exact(2);
    return {7, "trinomial split identity and bounds", split.ok() && bounds.ok() && witnesses,
            "split: " + split.describe("triples") + "; bounds: " + bounds.describe("covered records") +
                "; witnesses (1,1,3) -> " + w1.actual.to_string() + ", (1,2,3) -> " + w2.actual.to_string()};
}

inline ClaimResult claim_wieferich(const ClaimOptions& opt) {
    WieferichOptions wo;
    wo.workers = opt.workers;
    const auto base2 = wieferich_scan(2, 4000, 2, wo);
    const auto base3 = wieferich_scan(3, 100, 2, wo);
    const auto primes = [](const std::vector<WieferichHit>& hits) {
        std::vector<std::uint64_t> out;
        for (const auto& h : hits) {
            out.push_back(h.p);
        }
        return out;
    };
    const auto p2 = primes(base2);
    const auto p3 = primes(base3);
    const auto show = [](const std::vector<std::uint64_t>& v) {
        std::string s = "{";
        for (auto p : v) {
            s += (s.size() > 1 ? "," : "") + std::to_string(p);
        }
        return s + "}";
    };
    const bool ok = p2 == std::vector<std::uint64_t>{1093, 3511} && p3 == std::vector<std::uint64_t>{11};
    return {8, "Wieferich-type primes", ok, "base 2 to 4000: " + show(p2) + "; base 3 to 100: " + show(p3)};
}

namespace detail {

inline std::filesystem::path scratch(const ClaimOptions& opt) {
    if (!opt.scratch_dir.empty()) {
        std::filesystem::create_directories(opt.scratch_dir);
        return opt.scratch_dir;
    }
    std::random_device rd;
    auto dir = std::filesystem::temp_directory_path() / ("tbs-claims-" + std::to_string(rd()));
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace detail

inline ClaimResult claim_determinism(const ClaimOptions& opt) {
    const auto dir = detail::scratch(opt);
    const auto one = dir / "workers1.jsonl";
    const auto many = dir / "workers8.jsonl";
    auto cfg = detail::pair_sweep(150, exponent_range(2, 24), CaseFilter::case1, 1);
    scan_to_file(cfg, {one.string(), RecordFormat::jsonl, false, false}, false);
    cfg.workers = 8;
    scan_to_file(cfg, {many.string(), RecordFormat::jsonl, false, false}, false);
    const std::string a = detail::slurp(one);
    const std::string b = detail::slurp(many);
    std::filesystem::remove(one);
    std::filesystem::remove(many);
    const bool ok = !a.empty() && a == b;
    return {9, "scan output independent of worker count", ok,
            std::to_string(a.size()) + " bytes (1 worker) vs " + std::to_string(b.size()) + " bytes (8 workers), " +
                (a == b ? "identical" : "different")};
}

inline ClaimResult claim_round_trip(const ClaimOptions& opt) {
    auto cfg = detail::pair_sweep(20, exponent_range(2, 9), CaseFilter::case3, opt.workers);
    cfg.case_filter.reset();
    cfg.coprime_only = false;
    std::vector<ScanRecord> records = scan_pairs(cfg).first;

    // Values past 64 bits and a saturated valuation.
    ScanRecord big;
    big.a = Integer("123456789012345678901234567890123456789");
    big.b = Integer("98765432109876543210987654321");
    big.c = Integer("340282366920938463463374607431768211457");
    big.n = 24;
    big.case_label = "uncovered";
    big.valuation = Valuation::saturated(65);
    big.basis = Basis::uncovered;
    big.extracted_gcd = Integer("18446744073709551617");
    records.push_back(big);

    const auto path = detail::scratch(opt) / "roundtrip.jsonl";
    const auto written = write_records(records, RecordFormat::jsonl, path.string());
    const auto back = read_records(path.string(), RecordFormat::jsonl);
    std::filesystem::remove(path);
    const bool ok = written == records.size() && back.records == records;
    return {10, "JSONL write-then-read reproduces records", ok,
            std::to_string(written) + " written, " + std::to_string(back.records.size()) + " read back, " +
                (back.records == records ? "identical" : "different")};
}

struct ClaimSpec {
    int id;
    double budget_seconds;
    std::function<ClaimResult(const ClaimOptions&)> run;
};

inline std::vector<ClaimSpec> all_claims() {
    return {
        {1, 60, claim_case1_bound},
        {2, 60, claim_case2_odd_bound},
        {3, 30, claim_case2_even_exact},
        {4, 120, claim_case3_prime},
        {5, 30, claim_case3_composite},
        {6, 5, claim_exceptional_spots},
        {7, 120, claim_trinomial},
        {8, 5, claim_wieferich},
        {9, 120, claim_determinism},
        {10, 30, claim_round_trip},
    };
}

/// Runs one claim, timing it against its budget. Exceptions fail the claim.
inline ClaimResult run_claim(const ClaimSpec& spec, const ClaimOptions& opt) {
    const auto start = std::chrono::steady_clock::now();
    ClaimResult r;
    try {
        r = spec.run(opt);
    } catch (const std::exception& e) {
        r.id = spec.id;
        r.title = "claim " + std::to_string(spec.id);
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.budget_seconds = spec.budget_seconds;
    if (r.seconds > r.budget_seconds) {
        r.passed = false;
        r.detail += "; over time budget";
    }
    return r;
}

} // namespace tbs
