#pragma once

// Result tables and their CSV/JSON emission, plus the SpectralMeasure JSON
// file format. CSV uses 17-significant-digit floats, RFC-style quoting and
// serializes non-finite values as the strings "inf"/"nan" with a metadata
// flag. JSON key order is schema-stable (insertion order).

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "heavytail/common.hpp"
#include "heavytail/spectral_measure.hpp"

namespace heavytail {

using ordered_json = nlohmann::ordered_json;

inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct ResultTable {
    std::string experiment;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::string config_hash;
    double runtime_seconds = 0.0;
    bool nonfinite_values = false;
    Verdict verdict = Verdict::pass;

    void add_row(const std::vector<std::string>& cells) {
        if (cells.size() != columns.size())
            throw std::invalid_argument("row width does not match column schema");
        rows.push_back(cells);
    }

    std::string num(double v) {
        if (!std::isfinite(v)) nonfinite_values = true;
        return format_double(v);
    }
};

inline std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

// Metadata lives in '#'-prefixed comment lines; the runtime line is the only
// part allowed to differ between reruns of the same (config, seed).
inline std::string to_csv(const ResultTable& t) {
    std::ostringstream os;
    os << "# experiment," << csv_quote(t.experiment) << "\n";
    os << "# config_hash," << t.config_hash << "\n";
    os << "# verdict," << to_string(t.verdict) << "\n";
    os << "# nonfinite_values," << (t.nonfinite_values ? "true" : "false") << "\n";
    os << "# runtime_seconds," << format_double(t.runtime_seconds) << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        os << (i ? "," : "") << csv_quote(t.columns[i]);
    os << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_quote(row[i]);
        os << "\n";
    }
    return os.str();
}

inline ordered_json to_json(const ResultTable& t) {
    ordered_json j;
    j["experiment"] = t.experiment;
    j["columns"] = t.columns;
    j["rows"] = t.rows;
    j["metadata"] = ordered_json{{"config_hash", t.config_hash},
                                 {"runtime_seconds", t.runtime_seconds},
                                 {"nonfinite_values", t.nonfinite_values}};
    j["verdict"] = to_string(t.verdict);
    return j;
}

inline ResultTable table_from_json(const ordered_json& j) {
    ResultTable t;
    t.experiment = j.at("experiment").get<std::string>();
    t.columns = j.at("columns").get<std::vector<std::string>>();
    t.rows = j.at("rows").get<std::vector<std::vector<std::string>>>();
    t.config_hash = j.at("metadata").at("config_hash").get<std::string>();
    t.runtime_seconds = j.at("metadata").at("runtime_seconds").get<double>();
    t.nonfinite_values = j.at("metadata").at("nonfinite_values").get<bool>();
    const std::string v = j.at("verdict").get<std::string>();
    t.verdict = v == "pass" ? Verdict::pass : v == "fail" ? Verdict::fail : Verdict::inconclusive;
    return t;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << content;
    if (!os) throw std::runtime_error("write failed: " + path);
}

// --- SpectralMeasure JSON file format ---------------------------------------

inline ordered_json measure_to_json(const SpectralMeasure& m) {
    ordered_json j;
    j["atoms"] = ordered_json::array();
    for (auto& [a, w] : m.atoms) j["atoms"].push_back(ordered_json::array({a, w}));
    j["grid"] = m.grid;
    j["density"] = m.density;
    if (m.tail)
        j["tail"] = ordered_json{
            {"cutoff", m.tail->cutoff}, {"index", m.tail->index}, {"scale", m.tail->scale}};
    else
        j["tail"] = nullptr;
    return j;
}

inline SpectralMeasure measure_from_json(const ordered_json& j) {
    SpectralMeasure m;
    for (const auto& a : j.at("atoms"))
        m.atoms.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
    m.grid = j.at("grid").get<std::vector<double>>();
    m.density = j.at("density").get<std::vector<double>>();
    if (!j.at("tail").is_null())
        m.tail = TailDescriptor{j.at("tail").at("cutoff").get<double>(),
                                j.at("tail").at("index").get<double>(),
                                j.at("tail").at("scale").get<double>()};
    return m;
}

}  // namespace heavytail
