#pragma once

// Scan records and their JSONL / CSV serialization.
//
// Arbitrary-precision fields (a, b, c, extracted_gcd) are always written as
// decimal strings. Valuations are decimal strings, or "ge:<k>" when capped.

#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "tbs/binomial.hpp"

namespace tbs {

class io_error : public std::runtime_error {
public:
    io_error(const std::string& path, std::uint64_t offset, const std::string& what)
        : std::runtime_error(path + ": " + what + " (after " + std::to_string(offset) + " records)"),
          path_(path), offset_(offset) {}

    const std::string& path() const noexcept { return path_; }
    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::string path_;
    std::uint64_t offset_;
};

struct ScanRecord {
    Integer a;
    Integer b;
    std::optional<Integer> c;
    unsigned n = 2;
    std::string case_label;
    Valuation valuation;
    unsigned predicted_bound = 0;
    Basis basis = Basis::uncovered;
    bool anomaly = false;
    bool exceptional = false;
    Integer extracted_gcd = 1;

    friend bool operator==(const ScanRecord&, const ScanRecord&) = default;
};

/// Last fully written (n, a) slice of a checkpointed scan.
struct Progress {
    unsigned n = 0;
    Integer a;

    friend bool operator==(const Progress&, const Progress&) = default;
};

enum class RecordFormat { jsonl, csv };

inline std::optional<RecordFormat> parse_format(std::string_view text) {
    if (text == "jsonl") {
        return RecordFormat::jsonl;
    }
    if (text == "csv") {
        return RecordFormat::csv;
    }
    return std::nullopt;
}

inline constexpr std::string_view kCsvHeader =
    "a,b,c,n,case,valuation,predicted_bound,basis,anomaly,exceptional,extracted_gcd";

namespace detail {

inline Integer parse_integer(const std::string& text) {
    Integer out;
    if (text.empty() || out.set_str(text, 10) != 0) {
        throw std::invalid_argument("not a decimal integer: '" + text + "'");
    }
    return out;
}

inline bool parse_bool(const std::string& text) {
    if (text == "true") {
        return true;
    }
    if (text == "false") {
        return false;
    }
    throw std::invalid_argument("not a boolean: '" + text + "'");
}

inline unsigned parse_small(const std::string& text) {
    const auto v = Valuation::parse(text);
    if (!v || v->at_least) {
        throw std::invalid_argument("not a small integer: '" + text + "'");
    }
    return v->value;
}

// RFC 4180: quote when the field holds a comma, quote, CR or LF.
inline std::string csv_field(const std::string& value) {
    if (value.find_first_of(",\"\r\n") == std::string::npos) {
        return value;
    }
    std::string out = "\"";
    for (char ch : value) {
        if (ch == '"') {
            out += '"';
        }
        out += ch;
    }
    out += '"';
    return out;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                fields.back() += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.emplace_back();
        } else {
            fields.back() += ch;
        }
    }
    if (quoted) {
        throw std::invalid_argument("unterminated quoted field");
    }
    return fields;
}

} // namespace detail

inline nlohmann::ordered_json to_json(const ScanRecord& r) {
    nlohmann::ordered_json j;
    j["a"] = r.a.get_str();
    j["b"] = r.b.get_str();
    if (r.c) {
        j["c"] = r.c->get_str();
    }
    j["n"] = r.n;
    j["case"] = r.case_label;
    j["valuation"] = r.valuation.to_string();
    j["predicted_bound"] = r.predicted_bound;
    j["basis"] = std::string(to_string(r.basis));
    j["anomaly"] = r.anomaly;
    j["exceptional"] = r.exceptional;
    j["extracted_gcd"] = r.extracted_gcd.get_str();
    return j;
}

inline ScanRecord record_from_json(const nlohmann::json& j) {
    ScanRecord r;
    r.a = detail::parse_integer(j.at("a").get<std::string>());
    r.b = detail::parse_integer(j.at("b").get<std::string>());
    if (j.contains("c")) {
        r.c = detail::parse_integer(j.at("c").get<std::string>());
    }
    r.n = j.at("n").get<unsigned>();
    r.case_label = j.at("case").get<std::string>();
    const auto v = Valuation::parse(j.at("valuation").get<std::string>());
    if (!v) {
        throw std::invalid_argument("bad valuation field");
    }
    r.valuation = *v;
    r.predicted_bound = j.at("predicted_bound").get<unsigned>();
    const auto basis = parse_basis(j.at("basis").get<std::string>());
    if (!basis) {
        throw std::invalid_argument("unknown basis tag");
    }
    r.basis = *basis;
    r.anomaly = j.at("anomaly").get<bool>();
    r.exceptional = j.at("exceptional").get<bool>();
    r.extracted_gcd = detail::parse_integer(j.at("extracted_gcd").get<std::string>());
    return r;
}

inline std::string to_csv_row(const ScanRecord& r) {
    const std::string fields[] = {
        r.a.get_str(),
        r.b.get_str(),
        r.c ? r.c->get_str() : std::string(),
        std::to_string(r.n),
        r.case_label,
        r.valuation.to_string(),
        std::to_string(r.predicted_bound),
        std::string(to_string(r.basis)),
        r.anomaly ? "true" : "false",
        r.exceptional ? "true" : "false",
        r.extracted_gcd.get_str(),
    };
    std::string out;
    for (const auto& f : fields) {
        if (&f != fields) {
            out += ',';
        }
        out += detail::csv_field(f);
    }
    return out;
}

inline ScanRecord record_from_csv(const std::string& line) {
    const auto f = detail::split_csv_line(line);
    if (f.size() != 11) {
        throw std::invalid_argument("expected 11 CSV fields, got " + std::to_string(f.size()));
    }
    ScanRecord r;
    r.a = detail::parse_integer(f[0]);
    r.b = detail::parse_integer(f[1]);
    if (!f[2].empty()) {
        r.c = detail::parse_integer(f[2]);
    }
    r.n = detail::parse_small(f[3]);
    r.case_label = f[4];
    const auto v = Valuation::parse(f[5]);
    if (!v) {
        throw std::invalid_argument("bad valuation field '" + f[5] + "'");
    }
    r.valuation = *v;
    r.predicted_bound = detail::parse_small(f[6]);
    const auto basis = parse_basis(f[7]);
    if (!basis) {
        throw std::invalid_argument("unknown basis tag '" + f[7] + "'");
    }
    r.basis = *basis;
    r.anomaly = detail::parse_bool(f[8]);
    r.exceptional = detail::parse_bool(f[9]);
    r.extracted_gcd = detail::parse_integer(f[10]);
    return r;
}

inline std::string progress_line(const Progress& p) {
    nlohmann::ordered_json j;
    j["progress"] = {{"n", p.n}, {"a", p.a.get_str()}};
    return j.dump();
}

/// Streaming writer. JSONL output uses LF endings; CSV gets a header row.
class RecordWriter {
public:
    RecordWriter(const std::string& path, RecordFormat format, bool append = false)
        : path_(path), format_(format),
          out_(path, std::ios::binary | (append ? std::ios::app : std::ios::trunc)) {
        if (!out_) {
            throw io_error(path_, 0, "cannot open for writing");
        }
        if (format_ == RecordFormat::csv && !append) {
            out_ << kCsvHeader << "\r\n";
        }
    }

    void write(const ScanRecord& r) {
        if (format_ == RecordFormat::jsonl) {
            out_ << to_json(r).dump() << '\n';
        } else {
            out_ << to_csv_row(r) << "\r\n";
        }
        check("write failed");
        ++count_;
    }

    /// JSONL only: marks (n, a) as fully written and flushes.
    void checkpoint(const Progress& p) {
        if (format_ != RecordFormat::jsonl) {
            return;
        }
        out_ << progress_line(p) << '\n';
        out_.flush();
        check("checkpoint failed");
    }

    void close() {
        out_.close();
        check("close failed");
    }

    std::uint64_t count() const noexcept { return count_; }

private:
    void check(const char* what) {
        if (!out_) {
            throw io_error(path_, count_, what);
        }
    }

    std::string path_;
    RecordFormat format_;
    std::ofstream out_;
    std::uint64_t count_ = 0;
};

inline std::uint64_t write_records(const std::vector<ScanRecord>& records, RecordFormat format, const std::string& path) {
    RecordWriter w(path, format);
    for (const auto& r : records) {
        w.write(r);
    }
    w.close();
    return w.count();
}

struct RecordFile {
    std::vector<ScanRecord> records;
    std::optional<Progress> progress;
    // Byte offset just past the last progress line, and the number of
    // records preceding it (both 0 if none).
    std::uint64_t checkpoint_offset = 0;
    std::size_t checkpointed_records = 0;
};

inline RecordFile read_records(const std::string& path, RecordFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw io_error(path, 0, "cannot open for reading");
    }
    RecordFile file;
    std::string line;
    std::uint64_t offset = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        offset += line.size() + 1;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        try {
            if (format == RecordFormat::csv) {
                if (!header_seen) {
                    header_seen = true;
                    if (line != kCsvHeader) {
                        throw std::invalid_argument("missing CSV header");
                    }
                    continue;
                }
                file.records.push_back(record_from_csv(line));
                continue;
            }
            const auto j = nlohmann::json::parse(line);
            if (j.contains("progress")) {
                const auto& p = j.at("progress");
                file.progress = Progress{p.at("n").get<unsigned>(), detail::parse_integer(p.at("a").get<std::string>())};
                file.checkpoint_offset = offset;
                file.checkpointed_records = file.records.size();
                continue;
            }
            file.records.push_back(record_from_json(j));
        } catch (const std::exception& e) {
            throw io_error(path, file.records.size(), std::string("malformed line: ") + e.what());
        }
    }
    return file;
}

struct Checkpoint {
    Progress progress;
    // Byte offset just past the progress line.
    std::uint64_t offset = 0;
};

/// Last progress line of a JSONL file. Only progress lines are parsed, so a
/// torn record after the last checkpoint is tolerated.
inline std::optional<Checkpoint> find_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw io_error(path, 0, "cannot open for reading");
    }
    std::optional<Checkpoint> last;
    std::string line;
    std::uint64_t offset = 0;
    while (std::getline(in, line)) {
        const bool complete = !in.eof();
        offset += line.size() + (complete ? 1 : 0);
        if (!complete || line.rfind(R"({"progress")", 0) != 0) {
            continue;
        }
        try {
            const auto p = nlohmann::json::parse(line).at("progress");
            last = Checkpoint{{p.at("n").get<unsigned>(), detail::parse_integer(p.at("a").get<std::string>())}, offset};
        } catch (const std::exception& e) {
            throw io_error(path, 0, std::string("malformed progress line: ") + e.what());
        }
    }
    return last;
}

} // namespace tbs
