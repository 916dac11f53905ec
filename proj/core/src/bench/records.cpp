#include "cfs/bench/records.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cfs/errors.hpp"

namespace cfs::bench {

std::string formatDouble(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

double parseDouble(const std::string& s) {
    if (s == "nan" || s.empty()) return std::numeric_limits<double>::quiet_NaN();
    double v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{}) throw DataError("record store: bad number '" + s + "'");
    return v;
}

int parseInt(const std::string& s) {
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{}) throw DataError("record store: bad integer '" + s + "'");
    return v;
}

std::vector<std::string> splitCsvLine(const std::string& line, std::size_t expected) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    if (fields.size() != expected)
        throw DataError("record store: expected " + std::to_string(expected) + " fields, got " +
                        std::to_string(fields.size()));
    return fields;
}

std::string sanitize(std::string s) {
    for (char& ch : s)
        if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
    return s;
}

} // namespace

std::string joinSelected(const std::vector<int>& selected) {
    std::string out;
    for (std::size_t i = 0; i < selected.size(); ++i) {
        if (i) out.push_back(';');
        out += std::to_string(selected[i]);
    }
    return out;
}

std::vector<int> splitSelected(const std::string& field) {
    std::vector<int> out;
    std::string cur;
    for (char ch : field) {
        if (ch == ';') {
            if (!cur.empty()) out.push_back(parseInt(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) out.push_back(parseInt(cur));
    return out;
}

std::string ExperimentRecord::key() const {
    std::ostringstream os;
    os << model << '|' << scenario << '|' << n << '|' << formatDouble(rho) << '|' << seed;
    return os.str();
}

namespace store {

std::string encodeRow(const ExperimentRecord& r) {
    std::ostringstream os;
    os << sanitize(r.model) << ',' << r.scenario << ',' << r.n << ',' << formatDouble(r.rho)
       << ',' << r.seed << ',' << r.p << ',' << joinSelected(r.selected) << ','
       << formatDouble(r.att) << ',' << formatDouble(r.bias) << ',' << formatDouble(r.seconds)
       << ',' << sanitize(r.error);
    return os.str();
}

ExperimentRecord decodeRow(const std::string& line) {
    const auto f = splitCsvLine(line, 11);
    ExperimentRecord r;
    r.model = f[0];
    r.scenario = parseInt(f[1]);
    r.n = parseInt(f[2]);
    r.rho = parseDouble(f[3]);
    r.seed = parseInt(f[4]);
    r.p = parseInt(f[5]);
    r.selected = splitSelected(f[6]);
    r.att = parseDouble(f[7]);
    r.bias = parseDouble(f[8]);
    r.seconds = parseDouble(f[9]);
    r.error = f[10];
    return r;
}

std::vector<ExperimentRecord> load(const std::filesystem::path& csvPath) {
    std::ifstream in(csvPath);
    if (!in) throw DataError("cannot open record store: " + csvPath.string());
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty record store: " + csvPath.string());
    if (line != kHeader) throw DataError("record store header mismatch: " + csvPath.string());
    std::vector<ExperimentRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        records.push_back(decodeRow(line));
    }
    return records;
}

void save(const std::vector<ExperimentRecord>& records, const std::filesystem::path& csvPath) {
    std::ofstream out(csvPath, std::ios::trunc);
    if (!out) throw DataError("cannot write record store: " + csvPath.string());
    out << kHeader << '\n';
    for (const auto& r : records) out << encodeRow(r) << '\n';
}

} // namespace store

} // namespace cfs::bench
