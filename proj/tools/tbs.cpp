// tbs: command-line front end for truncated binomial series analysis.
//
// Exit codes: 0 success, 1 domain error / bad arguments, 2 anomaly (or failed
// claim), 3 I/O error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "tbs/tbs.hpp"

namespace {

using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitAnomaly = 2;
constexpr int kExitIo = 3;

tbs::IntRange parse_range(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw tbs::domain_error("range '" + text + "' is not of the form lo:hi");
    }
    try {
        std::size_t used_lo = 0;
        std::size_t used_hi = 0;
        const std::string lo = text.substr(0, colon);
        const std::string hi = text.substr(colon + 1);
        tbs::IntRange r{std::stoull(lo, &used_lo), std::stoull(hi, &used_hi)};
        if (used_lo != lo.size() || used_hi != hi.size() || lo.front() == '-' || hi.front() == '-') {
            throw std::invalid_argument(text);
        }
        return r;
    } catch (const std::logic_error&) {
        throw tbs::domain_error("range '" + text + "' is not of the form lo:hi");
    }
}

tbs::Integer parse_natural(const std::string& text) {
    tbs::Integer x;
    if (text.empty() || text.front() == '-' || x.set_str(text, 10) != 0) {
        throw tbs::domain_error("'" + text + "' is not a nonnegative integer");
    }
    return x;
}

void print_json(const ordered_json& j) {
    std::cout << j.dump() << '\n';
}

// --- analyze --------------------------------------------------------------

struct AnalyzeArgs {
    std::vector<std::string> values;
    unsigned n = 0;
    unsigned cap = tbs::kDefaultValuationCap;
    bool json = false;
};

int run_analyze_pair(const AnalyzeArgs& args) {
    tbs::VerifyOptions opts;
    opts.cap = args.cap;
    opts.materialize_series = true;
    const auto rep = tbs::verify(parse_natural(args.values[0]), parse_natural(args.values[1]), args.n, opts);
    const char* side = rep.label.divisible_side == tbs::DivisibleSide::a   ? "a"
                       : rep.label.divisible_side == tbs::DivisibleSide::b ? "b"
                                                                          : "none";
    if (args.json) {
        ordered_json j;
        j["a"] = rep.instance.a.get_str();
        j["b"] = rep.instance.b.get_str();
        j["n"] = args.n;
        j["extracted_gcd"] = rep.instance.extracted_gcd.get_str();
        j["case"] = std::string(tbs::to_string(rep.label.kind));
        j["divisible_side"] = side;
        j["n_is_prime"] = rep.label.n_is_prime;
        j["n_is_even"] = rep.label.n_is_even;
        j["residues"] = {{"g_a", rep.decomposition.g_a.get_str()}, {"r_a", rep.decomposition.r_a},
                         {"g_b", rep.decomposition.g_b.get_str()}, {"r_b", rep.decomposition.r_b},
                         {"G", rep.decomposition.G.get_str()},     {"R", rep.decomposition.R},
                         {"g_a_divisible_by_n", rep.decomposition.g_a_divisible_by_n},
                         {"g_b_divisible_by_n", rep.decomposition.g_b_divisible_by_n}};
        j["q"] = rep.series->q.get_str();
        j["Q"] = rep.series->Q.get_str();
        j["U"] = rep.series->U.get_str();
        j["valuation"] = rep.actual.to_string();
        j["predicted_bound"] = rep.prediction.guaranteed_lower_bound;
        j["exactness"] = std::string(tbs::to_string(rep.prediction.exactness));
        j["basis"] = std::string(tbs::to_string(rep.prediction.basis));
        j["anomaly"] = rep.anomaly;
        j["exceptional"] = rep.exceptional;
        print_json(j);
    } else {
        fmt::print("instance    a={} b={} n={} (gcd {} extracted)\n", rep.instance.a.get_str(), rep.instance.b.get_str(),
                   args.n, rep.instance.extracted_gcd.get_str());
        fmt::print("residues    r_a={} r_b={} R={}\n", rep.decomposition.r_a, rep.decomposition.r_b, rep.decomposition.R);
        fmt::print("case        {}\n", tbs::to_string(rep.prediction.basis));
        fmt::print("U           {}\n", rep.series->U.get_str());
        fmt::print("valuation   {}\n", rep.actual.to_string());
        fmt::print("prediction  {} {}\n", rep.prediction.guaranteed_lower_bound, tbs::to_string(rep.prediction.exactness));
        fmt::print("exceptional {}\n", rep.exceptional);
        fmt::print("status      {}\n", rep.anomaly ? "ANOMALY" : "ok");
    }
    return rep.anomaly ? kExitAnomaly : kExitOk;
}

std::string optional_case(const std::optional<tbs::Case>& c) {
    return c ? std::string(tbs::to_string(*c)) : std::string("both-divisible");
}

int run_analyze_triple(const AnalyzeArgs& args) {
    tbs::VerifyOptions opts;
    opts.cap = args.cap;
    opts.materialize_series = true;
    const auto rep = tbs::verify3(parse_natural(args.values[0]), parse_natural(args.values[1]),
                                  parse_natural(args.values[2]), args.n, opts);
    if (args.json) {
        ordered_json j;
        j["a"] = rep.instance.a.get_str();
        j["b"] = rep.instance.b.get_str();
        j["c"] = rep.instance.c.get_str();
        j["n"] = args.n;
        j["extracted_gcd"] = rep.instance.extracted_gcd.get_str();
        j["case"] = std::string(tbs::to_string(rep.label));
        j["components"] = {{"ab", optional_case(rep.components.ab)}, {"ab_c", optional_case(rep.components.ab_c)}};
        j["U"] = rep.U->get_str();
        j["valuation"] = rep.actual.to_string();
        j["predicted_bound"] = rep.prediction.guaranteed_lower_bound;
        j["exactness"] = std::string(tbs::to_string(rep.prediction.exactness));
        j["basis"] = std::string(tbs::to_string(rep.prediction.basis));
        j["anomaly"] = rep.anomaly;
        print_json(j);
    } else {
        fmt::print("instance    a={} b={} c={} n={} (gcd {} extracted)\n", rep.instance.a.get_str(),
                   rep.instance.b.get_str(), rep.instance.c.get_str(), args.n, rep.instance.extracted_gcd.get_str());
        fmt::print("case        {}\n", tbs::to_string(rep.prediction.basis));
        fmt::print("components  U(a,b): {}, U(a+b,c): {}\n", optional_case(rep.components.ab),
                   optional_case(rep.components.ab_c));
        fmt::print("U           {}\n", rep.U->get_str());
        fmt::print("valuation   {}\n", rep.actual.to_string());
        fmt::print("prediction  {} {}\n", rep.prediction.guaranteed_lower_bound, tbs::to_string(rep.prediction.exactness));
        fmt::print("status      {}\n", rep.anomaly ? "ANOMALY" : "ok");
    }
    return rep.anomaly ? kExitAnomaly : kExitOk;
}

// --- scan / scan3 -----------------------------------------------------------

struct ScanArgs {
    std::optional<unsigned> n;
    std::string n_range;
    std::optional<unsigned> primes_to;
    std::string a_range;
    std::string b_range;
    std::string c_range;
    unsigned cap = tbs::kDefaultValuationCap;
    bool coprime = true;
    std::string case_filter;
    std::string format = "jsonl";
    std::string out;
    unsigned workers = 1;
    bool json = false;
    bool checkpoint = false;
    bool resume = false;
};

tbs::ScanConfig make_config(const ScanArgs& args, bool triples) {
    tbs::ScanConfig cfg;
    cfg.a_range = parse_range(args.a_range);
    cfg.b_range = parse_range(args.b_range);
    if (triples) {
        if (args.c_range.empty()) {
            throw tbs::domain_error("scan3 requires --c-range");
        }
        cfg.c_range = parse_range(args.c_range);
    }
    const int selectors = (args.n ? 1 : 0) + (args.n_range.empty() ? 0 : 1) + (args.primes_to ? 1 : 0);
    if (selectors != 1) {
        throw tbs::domain_error("give exactly one of --n, --n-range, --primes-to");
    }
    if (args.n) {
        cfg.exponents = {*args.n};
    } else if (!args.n_range.empty()) {
        const auto r = parse_range(args.n_range);
        if (r.hi > 100000) {
            throw tbs::domain_error("--n-range upper end too large");
        }
        cfg.exponents = tbs::exponent_range(static_cast<unsigned>(r.lo), static_cast<unsigned>(r.hi));
    } else {
        cfg.exponents = tbs::primes_up_to(*args.primes_to);
    }
    cfg.coprime_only = args.coprime;
    if (!args.case_filter.empty()) {
        cfg.case_filter = tbs::parse_case_filter(args.case_filter);
        if (!cfg.case_filter) {
            throw tbs::domain_error("--case must be one of 1, 2, 3, t1, t2");
        }
    }
    cfg.valuation_cap = args.cap;
    cfg.workers = args.workers;
    return cfg;
}

ordered_json summary_json(const tbs::ScanSummary& s, const std::string& out) {
    ordered_json j;
    j["records"] = s.records;
    j["anomalies"] = s.anomalies;
    j["exceptional"] = s.exceptional;
    if (!out.empty()) {
        j["output"] = out;
    }
    return j;
}

int run_scan(const ScanArgs& args, bool triples) {
    const tbs::ScanConfig cfg = make_config(args, triples);
    const auto format = tbs::parse_format(args.format);
    if (!format) {
        throw tbs::domain_error("--format must be jsonl or csv");
    }
    if ((args.checkpoint || args.resume) && (args.out.empty() || *format != tbs::RecordFormat::jsonl)) {
        throw tbs::domain_error("--checkpoint and --resume need --out with jsonl format");
    }

    tbs::ScanSummary summary;
    if (!args.out.empty()) {
        summary = tbs::scan_to_file(cfg, {args.out, *format, args.checkpoint, args.resume}, triples);
    } else if (args.json) {
        summary = triples ? tbs::scan_triples(cfg, {}) : tbs::scan_pairs(cfg, {});
    } else {
        if (*format == tbs::RecordFormat::csv) {
            std::cout << tbs::kCsvHeader << "\r\n";
        }
        tbs::ScanCallbacks cb;
        cb.on_record = [&format](const tbs::ScanRecord& r) {
            if (*format == tbs::RecordFormat::jsonl) {
                std::cout << tbs::to_json(r).dump() << '\n';
            } else {
                std::cout << tbs::to_csv_row(r) << "\r\n";
            }
        };
        summary = triples ? tbs::scan_triples(cfg, cb) : tbs::scan_pairs(cfg, cb);
    }

    if (args.json) {
        print_json(summary_json(summary, args.out));
    } else {
        auto& sink = args.out.empty() ? std::cerr : std::cout;
        sink << fmt::format("records {}  anomalies {}  exceptional {}\n", summary.records, summary.anomalies,
                            summary.exceptional);
    }
    return summary.anomalies != 0 ? kExitAnomaly : kExitOk;
}

// --- quotient ---------------------------------------------------------------

struct QuotientArgs {
    std::vector<std::string> values;
    unsigned p = 0;
    bool json = false;
};

int run_quotient(const QuotientArgs& args) {
    if (args.values.size() == 1) {
        const tbs::Integer x = parse_natural(args.values[0]);
        const tbs::Integer m = tbs::mu(x, args.p);
        const bool coprime = mpz_divisible_ui_p(x.get_mpz_t(), args.p) == 0;
        std::optional<tbs::Integer> q;
        if (coprime) {
            q = tbs::fermat_quotient(x, args.p);
        }
        if (args.json) {
            ordered_json j;
            j["x"] = x.get_str();
            j["p"] = args.p;
            j["mu"] = m.get_str();
            j["fermat_quotient"] = q ? ordered_json(q->get_str()) : ordered_json(nullptr);
            print_json(j);
        } else {
            fmt::print("mu({}) = {}\n", x.get_str(), m.get_str());
            fmt::print("fermat quotient = {}\n", q ? q->get_str() : std::string("undefined (p | x)"));
        }
        return kExitOk;
    }
    const tbs::Integer a = parse_natural(args.values[0]);
    const tbs::Integer b = parse_natural(args.values[1]);
    const auto t = tbs::combination(a, b, args.p);
    const auto crit = tbs::exceptional_criterion(a, b, args.p);
    if (args.json) {
        ordered_json j;
        j["a"] = a.get_str();
        j["b"] = b.get_str();
        j["p"] = args.p;
        j["mu_a"] = t.mu_a.get_str();
        j["mu_b"] = t.mu_b.get_str();
        j["mu_ab"] = t.mu_ab.get_str();
        j["M"] = t.combination_M.get_str();
        j["M_mod_p"] = crit.residue;
        j["exceptional"] = crit.exceptional;
        j["is_case3"] = crit.is_case3;
        print_json(j);
    } else {
        fmt::print("mu(a)   {}\nmu(b)   {}\nmu(a+b) {}\nM       {}\n", t.mu_a.get_str(), t.mu_b.get_str(),
                   t.mu_ab.get_str(), t.combination_M.get_str());
        fmt::print("M mod p {}  -> p^2 {} U{}\n", crit.residue, crit.exceptional ? "divides" : "does not divide",
                   crit.is_case3 ? "" : "  (pair is not in the none-divisible case)");
    }
    return kExitOk;
}

// --- wieferich --------------------------------------------------------------

struct WieferichArgs {
    std::uint64_t base = 2;
    std::uint64_t limit = 0;
    unsigned power = 2;
    unsigned workers = 1;
    bool include_two = false;
    bool json = false;
};

int run_wieferich(const WieferichArgs& args) {
    tbs::WieferichOptions opts;
    opts.workers = args.workers;
    opts.include_two = args.include_two;
    const auto hits = tbs::wieferich_scan(args.base, args.limit, args.power, opts);
    if (args.json) {
        ordered_json j;
        j["base"] = std::to_string(args.base);
        j["limit"] = std::to_string(args.limit);
        j["power"] = args.power;
        j["hits"] = ordered_json::array();
        for (const auto& h : hits) {
            j["hits"].push_back({{"p", std::to_string(h.p)}, {"max_power_r", h.max_power_r}});
        }
        print_json(j);
    } else {
        for (const auto& h : hits) {
            fmt::print("{}  (base^(p-1) = 1 mod p^{})\n", h.p, h.max_power_r);
        }
        if (hits.empty()) {
            fmt::print("no hits\n");
        }
    }
    return kExitOk;
}

// --- verify-claims ----------------------------------------------------------

int run_verify_claims(unsigned workers, bool json) {
    tbs::ClaimOptions opts;
    opts.workers = workers;
    bool all_passed = true;
    ordered_json results = ordered_json::array();
    for (const auto& spec : tbs::all_claims()) {
        const auto r = tbs::run_claim(spec, opts);
        all_passed = all_passed && r.passed;
        if (json) {
            results.push_back({{"id", r.id},
                               {"title", r.title},
                               {"passed", r.passed},
                               {"detail", r.detail},
                               {"seconds", fmt::format("{:.3f}", r.seconds)},
                               {"budget_seconds", fmt::format("{:.0f}", r.budget_seconds)}});
        } else {
            fmt::print("[{}] {:>2}. {} ({:.2f}s / {:.0f}s): {}\n", r.passed ? "PASS" : "FAIL", r.id, r.title,
                       r.seconds, r.budget_seconds, r.detail);
            std::cout.flush();
        }
    }
    if (json) {
        print_json({{"passed", all_passed}, {"claims", results}});
    }
    return all_passed ? kExitOk : kExitAnomaly;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Divisibility of truncated binomial and trinomial series by their exponent"};
    app.require_subcommand(1);

    AnalyzeArgs analyze;
    auto* analyze_cmd = app.add_subcommand("analyze", "Classify and measure U(a,b) or U(a,b,c) for one exponent");
    analyze_cmd->add_option("values", analyze.values, "a b [c]")->required()->expected(2, 3);
    analyze_cmd->add_option("--n", analyze.n, "Exponent n >= 2")->required();
    analyze_cmd->add_option("--cap", analyze.cap, "Valuation cap K")->capture_default_str();
    analyze_cmd->add_flag("--json", analyze.json, "Emit one JSON object");

    ScanArgs scan;
    ScanArgs scan3;
    const auto add_scan_flags = [](CLI::App* cmd, ScanArgs& s, bool triples) {
        cmd->add_option("--n", s.n, "Single exponent");
        cmd->add_option("--n-range", s.n_range, "Exponent range lo:hi");
        cmd->add_option("--primes-to", s.primes_to, "All prime exponents up to P");
        cmd->add_option("--a-range", s.a_range, "lo:hi")->required();
        cmd->add_option("--b-range", s.b_range, "lo:hi")->required();
        if (triples) {
            cmd->add_option("--c-range", s.c_range, "lo:hi")->required();
        }
        cmd->add_option("--cap", s.cap, "Valuation cap K")->capture_default_str();
        cmd->add_flag("--coprime,!--no-coprime", s.coprime, "Only gcd-1 inputs (default on)");
        cmd->add_option("--case", s.case_filter, triples ? "Case filter: t1 | t2" : "Case filter: 1 | 2 | 3");
        cmd->add_option("--format", s.format, "jsonl | csv")->capture_default_str();
        cmd->add_option("--out", s.out, "Output file (stdout if omitted)");
        cmd->add_option("--workers", s.workers, "Worker threads")->capture_default_str();
        cmd->add_flag("--json", s.json, "Print a JSON summary object");
        cmd->add_flag("--checkpoint", s.checkpoint, "Write a progress line after each exponent (jsonl)");
        cmd->add_flag("--resume", s.resume, "Continue from the last progress line of --out");
    };
    auto* scan_cmd = app.add_subcommand("scan", "Sweep pairs (a, b) over exponent sets");
    add_scan_flags(scan_cmd, scan, false);
    auto* scan3_cmd = app.add_subcommand("scan3", "Sweep triples (a, b, c) over exponent sets");
    add_scan_flags(scan3_cmd, scan3, true);

    QuotientArgs quotient;
    auto* quotient_cmd = app.add_subcommand("quotient", "Fermat quotients of x, or the quotient combination of (a, b)");
    quotient_cmd->add_option("values", quotient.values, "x | a b")->required()->expected(1, 2);
    quotient_cmd->add_option("--n", quotient.p, "Prime p")->required();
    quotient_cmd->add_flag("--json", quotient.json, "Emit one JSON object");

    WieferichArgs wieferich;
    auto* wieferich_cmd = app.add_subcommand("wieferich", "Primes p with base^(p-1) = 1 mod p^r");
    wieferich_cmd->add_option("--base", wieferich.base, "Base >= 2")->capture_default_str();
    wieferich_cmd->add_option("--limit", wieferich.limit, "Largest prime to test")->required();
    wieferich_cmd->add_option("--power", wieferich.power, "Power r >= 2")->capture_default_str();
    wieferich_cmd->add_option("--workers", wieferich.workers, "Worker threads")->capture_default_str();
    wieferich_cmd->add_flag("--include-two", wieferich.include_two, "Also test p = 2");
    wieferich_cmd->add_flag("--json", wieferich.json, "Emit one JSON object");

    unsigned claim_workers = 1;
    bool claim_json = false;
    auto* claims_cmd = app.add_subcommand("verify-claims", "Run the full desk-scale verification suite");
    claims_cmd->add_option("--workers", claim_workers, "Worker threads")->capture_default_str();
    claims_cmd->add_flag("--json", claim_json, "Emit one JSON object");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitDomain;
    }

    try {
        if (*analyze_cmd) {
            return analyze.values.size() == 2 ? run_analyze_pair(analyze) : run_analyze_triple(analyze);
        }
        if (*scan_cmd) {
            return run_scan(scan, false);
        }
        if (*scan3_cmd) {
            return run_scan(scan3, true);
        }
        if (*quotient_cmd) {
            return run_quotient(quotient);
        }
        if (*wieferich_cmd) {
            return run_wieferich(wieferich);
        }
        if (*claims_cmd) {
            return run_verify_claims(claim_workers, claim_json);
        }
    } catch (const tbs::io_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const tbs::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const tbs::invariant_violation& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitDomain;
    }
    return kExitDomain;
}
