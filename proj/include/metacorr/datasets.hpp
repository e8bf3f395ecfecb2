#pragma once

// Bundled example datasets and CSV import/export. Each record carries a
// correlation, a sample size, and free-form string attributes used for
// subgroup filtering.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "metacorr/pooling.hpp"

namespace metacorr {

struct DatasetRecord {
    std::string study_id;
    std::string authors;
    int year = 0;  // 0 when absent
    int n = 0;
    double r = 0.0;
    std::map<std::string, std::string> attributes;
};

struct Dataset {
    std::string name;
    std::vector<DatasetRecord> records;
};

inline std::vector<StudySummary> study_summaries(const Dataset& ds) {
    std::vector<StudySummary> out;
    out.reserve(ds.records.size());
    for (const DatasetRecord& rec : ds.records) {
        out.push_back(StudySummary{rec.r, rec.n});
    }
    return out;
}

// ============================================================================
// Builtin tables
// ============================================================================

namespace detail {

inline DatasetRecord make_record(std::string id, std::string authors, int year, int n,
                                 double r,
                                 std::initializer_list<std::pair<const char*, const char*>>
                                     attrs = {}) {
    DatasetRecord rec;
    rec.study_id = std::move(id);
    rec.authors = std::move(authors);
    rec.year = year;
    rec.n = n;
    rec.r = r;
    for (const auto& [k, v] : attrs) {
        rec.attributes.emplace(k, v);
    }
    return rec;
}

}  // namespace detail

// Conscientiousness and medication adherence, 16 studies with subgroup
// attributes.
inline Dataset builtin_molloy2014() {
    using detail::make_record;
    Dataset ds;
    ds.name = "molloy2014";
    auto add = [&](std::string id, std::string authors, int year, int n, double r,
                   const char* controls, const char* design, const char* a_measure,
                   const char* c_measure, const char* mean_age, const char* quality) {
        ds.records.push_back(make_record(std::move(id), std::move(authors), year, n, r,
                                         {{"controls", controls},
                                          {"design", design},
                                          {"a_measure", a_measure},
                                          {"c_measure", c_measure},
                                          {"mean_age", mean_age},
                                          {"quality", quality}}));
    };
    add("1", "Axelsson et al.", 2009, 109, 0.19, "none", "cross-sectional",
        "self-report", "other", "22.00", "1");
    add("2", "Axelsson et al.", 2011, 749, 0.16, "none", "cross-sectional",
        "self-report", "NEO", "53.59", "1");
    add("3", "Bruce et al.", 2010, 55, 0.34, "none", "prospective", "other", "NEO",
        "43.36", "2");
    add("4", "Christensen et al.", 1999, 107, 0.32, "none", "cross-sectional",
        "self-report", "other", "41.70", "1");
    add("5", "Christensen & Smith", 1995, 72, 0.27, "none", "prospective", "other",
        "NEO", "46.39", "2");
    add("6", "Cohen et al.", 2004, 65, 0.00, "none", "prospective", "other", "NEO",
        "41.20", "2");
    add("7", "Dobbels et al.", 2005, 174, 0.17, "none", "cross-sectional",
        "self-report", "NEO", "52.30", "1");
    add("8", "Ediger et al.", 2007, 326, 0.05, "multiple", "prospective",
        "self-report", "NEO", "41.00", "3");
    add("9", "Insel et al.", 2006, 58, 0.26, "none", "prospective", "other", "other",
        "77.00", "2");
    add("10", "Jerant et al.", 2011, 771, 0.01, "multiple", "prospective", "other",
        "NEO", "78.60", "3");
    add("11", "Moran et al.", 1997, 56, -0.09, "multiple", "prospective", "other",
        "NEO", "57.20", "2");
    add("12", "O'Cleirigh et al.", 2007, 91, 0.37, "none", "prospective",
        "self-report", "NEO", "37.90", "2");
    add("13", "Penedo et al.", 2003, 116, 0.00, "none", "cross-sectional",
        "self-report", "NEO", "39.20", "1");
    add("14", "Quine et al.", 2012, 537, 0.15, "none", "prospective", "self-report",
        "other", "69.00", "2");
    add("15", "Stilley et al.", 2004, 158, 0.24, "none", "prospective", "other", "NEO",
        "46.20", "3");
    add("16", "Wiebe & Christensen", 1997, 65, 0.04, "none", "prospective", "other",
        "NEO", "56.00", "1");
    return ds;
}

// Flow-mediated dilation reliability, 12 studies. Study 12 reports a
// correlation of exactly one; the pooling path clamps before the z
// transform.
inline Dataset builtin_santos2016() {
    using detail::make_record;
    Dataset ds;
    ds.name = "santos2016";
    const double rs[] = {0.654, 0.072, 0.998, 0.892,  0.313, 0.069,
                         -0.971, 0.989, 0.989, 0.473, 0.594, 1.0};
    const int ns[] = {24, 16, 12, 14, 15, 15, 6, 12, 11, 32, 14, 12};
    for (int i = 0; i < 12; ++i) {
        ds.records.push_back(make_record(std::to_string(i + 1), "", 0, ns[i], rs[i]));
    }
    return ds;
}

// PET-CT texture feature reproducibility, 9 studies.
inline Dataset builtin_chalkidou2012() {
    using detail::make_record;
    Dataset ds;
    ds.name = "chalkidou2012";
    const double rs[] = {0.21, 0.79, 0.82, 0.80, 0.04, 0.92, 0.84, 0.77, 0.57};
    const int ns[] = {43, 12, 9, 10, 20, 20, 21, 6, 22};
    for (int i = 0; i < 9; ++i) {
        ds.records.push_back(make_record(std::to_string(i + 1), "", 0, ns[i], rs[i]));
    }
    return ds;
}

inline std::vector<std::string> builtin_names() {
    return {"molloy2014", "santos2016", "chalkidou2012"};
}

inline Dataset builtin_dataset(std::string_view name) {
    if (name == "molloy2014") return builtin_molloy2014();
    if (name == "santos2016") return builtin_santos2016();
    if (name == "chalkidou2012") return builtin_chalkidou2012();
    throw std::invalid_argument("builtin_dataset: unknown dataset '" + std::string(name) +
                                "' (available: molloy2014, santos2016, chalkidou2012)");
}

// ============================================================================
// CSV import/export
// ============================================================================

namespace detail {

// Splits one logical CSV record. Quoted fields may contain commas and
// doubled quotes.
inline std::vector<std::string> split_csv_line(const std::string& line, std::size_t lineno) {
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (in_quotes) {
        throw std::runtime_error("line " + std::to_string(lineno) + ": unterminated quote");
    }
    fields.push_back(cur);
    return fields;
}

inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", x);
    return buf;
}

}  // namespace detail

// Parses dataset CSV text. Columns r and n are required; study, authors and
// year are recognized when present; any remaining column becomes a string
// attribute. Errors name the offending line, counting the header as line 1.
inline Dataset parse_dataset_csv(const std::string& content, std::string name) {
    Dataset ds;
    ds.name = std::move(name);
    std::istringstream in(content);
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string> header;
    int col_study = -1, col_authors = -1, col_year = -1, col_n = -1, col_r = -1;
    std::vector<int> attr_cols;
    std::map<std::string, bool> seen_ids;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (detail::trim(line).empty()) continue;
        if (line[0] == '#') continue;
        std::vector<std::string> fields = detail::split_csv_line(line, lineno);
        if (header.empty()) {
            header = fields;
            for (int i = 0; i < static_cast<int>(header.size()); ++i) {
                const std::string h = detail::trim(header[i]);
                header[i] = h;
                if (h == "study") col_study = i;
                else if (h == "authors") col_authors = i;
                else if (h == "year") col_year = i;
                else if (h == "n") col_n = i;
                else if (h == "r") col_r = i;
                else if (h.empty()) {
                    throw std::runtime_error("line 1: empty column name");
                } else {
                    attr_cols.push_back(i);
                }
            }
            if (col_r < 0 || col_n < 0) {
                throw std::runtime_error("line 1: header must contain columns 'r' and 'n'");
            }
            continue;
        }
        if (fields.size() != header.size()) {
            throw std::runtime_error("line " + std::to_string(lineno) + ": expected " +
                                     std::to_string(header.size()) + " fields, got " +
                                     std::to_string(fields.size()));
        }
        DatasetRecord rec;
        const std::string err_prefix = "line " + std::to_string(lineno) + ": ";
        rec.study_id = col_study >= 0 ? detail::trim(fields[col_study])
                                      : std::to_string(ds.records.size() + 1);
        if (rec.study_id.empty()) {
            throw std::runtime_error(err_prefix + "empty study id");
        }
        if (seen_ids.count(rec.study_id)) {
            throw std::runtime_error(err_prefix + "duplicate study id '" + rec.study_id + "'");
        }
        seen_ids[rec.study_id] = true;
        if (col_authors >= 0) rec.authors = detail::trim(fields[col_authors]);
        if (col_year >= 0) {
            const std::string y = detail::trim(fields[col_year]);
            if (!y.empty()) {
                try {
                    std::size_t pos = 0;
                    rec.year = std::stoi(y, &pos);
                    if (pos != y.size()) throw std::invalid_argument("");
                } catch (const std::exception&) {
                    throw std::runtime_error(err_prefix + "invalid year '" + y + "'");
                }
            }
        }
        {
            const std::string nv = detail::trim(fields[col_n]);
            try {
                std::size_t pos = 0;
                rec.n = std::stoi(nv, &pos);
                if (pos != nv.size()) throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw std::runtime_error(err_prefix + "invalid n '" + nv + "'");
            }
            if (rec.n < 4) {
                throw std::runtime_error(err_prefix + "n must be at least 4, got " + nv);
            }
        }
        {
            const std::string rv = detail::trim(fields[col_r]);
            try {
                std::size_t pos = 0;
                rec.r = std::stod(rv, &pos);
                if (pos != rv.size()) throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw std::runtime_error(err_prefix + "invalid r '" + rv + "'");
            }
            if (!(rec.r >= -1.0 && rec.r <= 1.0)) {
                throw std::runtime_error(err_prefix + "r must lie in [-1, 1], got " + rv);
            }
        }
        for (int i : attr_cols) {
            rec.attributes[header[i]] = detail::trim(fields[i]);
        }
        ds.records.push_back(std::move(rec));
    }
    if (header.empty()) {
        throw std::runtime_error("empty input: no header row");
    }
    if (ds.records.empty()) {
        throw std::runtime_error("empty dataset: no data rows");
    }
    return ds;
}

inline Dataset load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string name = path;
    const std::size_t slash = name.find_last_of("/\\");
    if (slash != std::string::npos) name = name.substr(slash + 1);
    const std::size_t dot = name.find_last_of('.');
    if (dot != std::string::npos && dot > 0) name = name.substr(0, dot);
    return parse_dataset_csv(buf.str(), name);
}

// Serializes with the fixed columns first and attribute columns in sorted
// order; parse_dataset_csv(dataset_to_csv(ds)) reproduces the records.
inline std::string dataset_to_csv(const Dataset& ds) {
    std::vector<std::string> attr_keys;
    for (const DatasetRecord& rec : ds.records) {
        for (const auto& [k, v] : rec.attributes) {
            if (std::find(attr_keys.begin(), attr_keys.end(), k) == attr_keys.end()) {
                attr_keys.push_back(k);
            }
        }
    }
    std::sort(attr_keys.begin(), attr_keys.end());
    std::string out = "study,authors,year,n,r";
    for (const std::string& k : attr_keys) {
        out += "," + detail::csv_escape(k);
    }
    out += "\n";
    for (const DatasetRecord& rec : ds.records) {
        out += detail::csv_escape(rec.study_id);
        out += ",";
        out += detail::csv_escape(rec.authors);
        out += ",";
        if (rec.year != 0) out += std::to_string(rec.year);
        out += ",";
        out += std::to_string(rec.n);
        out += ",";
        out += detail::format_double(rec.r);
        for (const std::string& k : attr_keys) {
            out += ",";
            auto it = rec.attributes.find(k);
            if (it != rec.attributes.end()) out += detail::csv_escape(it->second);
        }
        out += "\n";
    }
    return out;
}

inline void save_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    out << dataset_to_csv(ds);
}

// ============================================================================
// Filtering and checksums
// ============================================================================

// Keeps records whose attribute equals the value, preserving order. The key
// must exist on every record; an empty result is an error rather than an
// empty analysis downstream.
inline Dataset filter_dataset(const Dataset& ds, const std::string& key,
                              const std::string& value) {
    for (const DatasetRecord& rec : ds.records) {
        if (!rec.attributes.count(key)) {
            throw std::invalid_argument("filter: record '" + rec.study_id +
                                        "' has no attribute '" + key + "'");
        }
    }
    Dataset out;
    out.name = ds.name + "[" + key + "=" + value + "]";
    for (const DatasetRecord& rec : ds.records) {
        if (rec.attributes.at(key) == value) {
            out.records.push_back(rec);
        }
    }
    if (out.records.empty()) {
        throw std::runtime_error("filter: no records with " + key + "=" + value);
    }
    return out;
}

// FNV-1a over the canonical CSV serialization plus the name; pins builtin
// content against accidental edits.
inline std::uint64_t dataset_checksum(const Dataset& ds) {
    const std::string payload = ds.name + "\n" + dataset_to_csv(ds);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : payload) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace metacorr
