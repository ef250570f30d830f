#ifndef CRPQ_CORPUS_HPP
#define CRPQ_CORPUS_HPP

#include <array>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "crpq/fragment.hpp"
#include "crpq/parser.hpp"

// Classification of path-expression strings as they appear in query logs,
// and frequency reports over whole log files.  A log line carries one
// expression, optionally followed by a tab and a multiplicity.

namespace crpq {

struct LogRecord {
    std::string raw;            // the expression text as logged
    long long multiplicity = 1; // occurrences in the log (>= 1)
    bool wildcard = false;      // uses '_' or a '!' negated label
    bool inverse = false;       // uses '^' inverted traversal
    bool unparseable = false;
};

struct ExpressionClass {
    FragmentClass cls;
    bool wildcard = false;
    bool inverse = false;
    bool unparseable = false;
};

// Parses `s` with the log-tolerant grammar and classifies it.  Inverse and
// negation syntax is recognized but keeps the expression out of every simple
// class, and a parse failure only sets the flag.
inline ExpressionClass classify_expression_string(const std::string& s) {
    ExpressionClass out;
    LogSyntaxFlags flags;
    RegexPtr r;
    try {
        r = parse_log_expression(s, flags);
    } catch (const ParseError&) {
        out.unparseable = true;
        out.cls.kinds.insert(AtomKind::GeneralRegex);
        return out;
    }
    out.inverse = flags.inverse;
    out.cls = classify_regex(r);
    out.wildcard = out.cls.wildcard_used || flags.negation;
    if (flags.inverse || flags.negation) {
        // Out of scope for the one-way fragments by definition.
        out.cls.kinds.insert(AtomKind::GeneralRegex);
    }
    return out;
}

// Frequency report over the four starred classes.  Membership is cumulative
// along the lattice: an expression of class (a,a*) also counts toward
// (a,A*), (A,a*), and (A,A*), and the two middle classes both count toward
// (A,A*).  "Valid" columns weight each record by its multiplicity;
// "unique" columns count each record once.
struct ClassReport {
    static constexpr int kNumClasses = 4;
    static const std::array<const char*, kNumClasses>& class_names() {
        static const std::array<const char*, kNumClasses> names = {
            "(a,a*)", "(a,A*)", "(A,a*)", "(A,A*)"};
        return names;
    }

    std::array<long long, kNumClasses> valid_count{};
    std::array<long long, kNumClasses> unique_count{};
    long long valid_total = 0;        // parseable expressions, with multiplicity
    long long unique_total = 0;       // parseable expressions, one per record
    long long unparseable_total = 0;  // records that failed to parse

    double valid_pct(int i) const {
        return valid_total == 0 ? 0.0 : 100.0 * valid_count[i] / valid_total;
    }
    double unique_pct(int i) const {
        return unique_total == 0 ? 0.0 : 100.0 * unique_count[i] / unique_total;
    }
};

namespace detail {

// Indices into ClassReport counters that `cls` belongs to, cumulatively.
inline std::vector<int> report_classes(const ExpressionClass& ec) {
    std::vector<int> out;
    if (ec.unparseable || ec.inverse || ec.wildcard) return out;
    if (in_fragment_a_astar(ec.cls)) out.push_back(0);
    if (in_fragment_a_Astar(ec.cls)) out.push_back(1);
    if (in_fragment_A_astar(ec.cls)) out.push_back(2);
    if (in_fragment_A_Astar(ec.cls)) out.push_back(3);
    return out;
}

}  // namespace detail

// Tallies one classified record into the report.
inline void report_add(ClassReport& rep, const LogRecord& rec,
                       const ExpressionClass& ec) {
    if (ec.unparseable) {
        rep.unparseable_total += rec.multiplicity;
        return;
    }
    rep.valid_total += rec.multiplicity;
    rep.unique_total += 1;
    for (int i : detail::report_classes(ec)) {
        rep.valid_count[i] += rec.multiplicity;
        rep.unique_count[i] += 1;
    }
}

// Parses a log line into a record.  Expected shape: expression text,
// optionally followed by a tab and a decimal count.  A bad count makes the
// whole line unparseable.
inline LogRecord parse_log_line(const std::string& line) {
    LogRecord rec;
    std::size_t tab = line.find('\t');
    rec.raw = line.substr(0, tab);
    if (tab != std::string::npos) {
        std::string count = line.substr(tab + 1);
        try {
            std::size_t used = 0;
            rec.multiplicity = std::stoll(count, &used);
            while (used < count.size() &&
                   std::isspace(static_cast<unsigned char>(count[used])))
                ++used;
            if (used != count.size() || rec.multiplicity < 1)
                rec.unparseable = true;
        } catch (const std::exception&) {
            rec.unparseable = true;
        }
    }
    return rec;
}

// Reads a log file (one expression per line, optional tab-separated count)
// and reports the class mix.  With `dedupe`, identical raw strings are
// collapsed into one record whose multiplicity is the sum of theirs.
// Blank lines are ignored; I/O failures throw.
inline ClassReport analyze_log(const std::string& path, bool dedupe) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open log file: " + path);

    std::vector<LogRecord> records;
    std::map<std::string, std::size_t> index;  // raw string -> records slot
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        LogRecord rec = parse_log_line(line);
        if (dedupe && !rec.unparseable) {
            auto [it, fresh] = index.insert({rec.raw, records.size()});
            if (!fresh) {
                records[it->second].multiplicity += rec.multiplicity;
                continue;
            }
        }
        records.push_back(rec);
    }
    if (in.bad()) throw std::runtime_error("error reading log file: " + path);

    ClassReport rep;
    for (const auto& rec : records) {
        if (rec.unparseable) {
            rep.unparseable_total += rec.multiplicity;
            continue;
        }
        report_add(rep, rec, classify_expression_string(rec.raw));
    }
    return rep;
}

inline nlohmann::json report_to_json(const ClassReport& rep) {
    nlohmann::json classes = nlohmann::json::array();
    for (int i = 0; i < ClassReport::kNumClasses; ++i) {
        classes.push_back({{"class", ClassReport::class_names()[i]},
                           {"valid_count", rep.valid_count[i]},
                           {"valid_pct", rep.valid_pct(i)},
                           {"unique_count", rep.unique_count[i]},
                           {"unique_pct", rep.unique_pct(i)}});
    }
    return {{"classes", classes},
            {"valid_total", rep.valid_total},
            {"unique_total", rep.unique_total},
            {"unparseable_total", rep.unparseable_total}};
}

// Aligned-column table, one row per class plus a totals footer.
inline std::string report_to_text(const ClassReport& rep) {
    std::ostringstream os;
    os << std::left << std::setw(8) << "class" << std::right << std::setw(12)
       << "valid" << std::setw(10) << "valid%" << std::setw(12) << "unique"
       << std::setw(10) << "unique%" << '\n';
    os << std::fixed << std::setprecision(2);
    for (int i = 0; i < ClassReport::kNumClasses; ++i) {
        os << std::left << std::setw(8) << ClassReport::class_names()[i]
           << std::right << std::setw(12) << rep.valid_count[i]
           << std::setw(10) << rep.valid_pct(i) << std::setw(12)
           << rep.unique_count[i] << std::setw(10) << rep.unique_pct(i)
           << '\n';
    }
    os << std::left << std::setw(8) << "total" << std::right << std::setw(12)
       << rep.valid_total << std::setw(10) << "" << std::setw(12)
       << rep.unique_total << std::setw(10) << "" << '\n';
    os << "unparseable: " << rep.unparseable_total << '\n';
    return os.str();
}

}  // namespace crpq

#endif  // CRPQ_CORPUS_HPP
