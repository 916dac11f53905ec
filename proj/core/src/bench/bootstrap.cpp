#include "cfs/bench/bootstrap.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "cfs/bench/records.hpp"
#include "cfs/causal/att.hpp"
#include "cfs/causal/matching.hpp"
#include "cfs/errors.hpp"
#include "cfs/frameworks/selector.hpp"
#include "cfs/numkit/random.hpp"

namespace cfs::bench {

namespace {

bool isMissing(const std::string& cell) {
    return cell.empty() || cell == "NA" || cell == "na" || cell == "NaN" || cell == "nan" ||
           cell == "?";
}

bool parseNumeric(const std::string& cell, double* value) {
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    double v = 0;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last) return false;
    *value = v;
    return true;
}

std::vector<std::string> splitLine(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

} // namespace

LoadedTable loadRealData(const std::filesystem::path& csvPath,
                         const std::string& treatmentColumn,
                         const std::string& outcomeColumn) {
    std::ifstream in(csvPath);
    if (!in) throw DataError("cannot open csv: " + csvPath.string());

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty csv: " + csvPath.string());
    const auto header = splitLine(line);
    const std::size_t ncol = header.size();

    int tCol = -1, yCol = -1;
    for (std::size_t c = 0; c < ncol; ++c) {
        if (header[c] == treatmentColumn) tCol = static_cast<int>(c);
        if (header[c] == outcomeColumn) yCol = static_cast<int>(c);
    }
    if (tCol < 0) throw DataError("treatment column not found: " + treatmentColumn);
    if (yCol < 0) throw DataError("outcome column not found: " + outcomeColumn);

    std::vector<std::vector<std::string>> rows;
    int dropped = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = splitLine(line);
        if (fields.size() != ncol)
            throw DataError("csv row with " + std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(ncol));
        const bool missing =
            std::any_of(fields.begin(), fields.end(), [](const std::string& f) { return isMissing(f); });
        if (missing) {
            ++dropped;
            continue;
        }
        rows.push_back(std::move(fields));
    }
    if (rows.size() < 2) throw DataError("csv has fewer than 2 usable rows");
    const auto nrow = rows.size();

    // Column typing: numeric when every cell parses as a number; otherwise
    // categorical, one-hot encoded with the lexicographically first level dropped.
    struct Encoded {
        std::vector<std::string> names;
        std::vector<std::vector<double>> columns;
    };

    auto encodeColumn = [&](std::size_t c) {
        Encoded enc;
        std::vector<double> numeric(nrow);
        bool isNumeric = true;
        for (std::size_t r = 0; r < nrow; ++r) {
            if (!parseNumeric(rows[r][c], &numeric[r])) {
                isNumeric = false;
                break;
            }
        }
        if (isNumeric) {
            enc.names.push_back(header[c]);
            enc.columns.push_back(std::move(numeric));
            return enc;
        }
        std::set<std::string> levels;
        for (std::size_t r = 0; r < nrow; ++r) levels.insert(rows[r][c]);
        bool first = true;
        for (const auto& level : levels) {
            if (first) {  // reference level dropped
                first = false;
                continue;
            }
            std::vector<double> col(nrow);
            for (std::size_t r = 0; r < nrow; ++r) col[r] = rows[r][c] == level ? 1.0 : 0.0;
            enc.names.push_back(header[c] + "=" + level);
            enc.columns.push_back(std::move(col));
        }
        return enc;
    };

    // Treatment column must be binary after encoding.
    LoadedTable table;
    table.rowsDropped = dropped;
    table.T.resize(static_cast<Eigen::Index>(nrow));
    {
        std::vector<double> numeric(nrow);
        bool isNumeric = true;
        for (std::size_t r = 0; r < nrow; ++r)
            if (!parseNumeric(rows[r][static_cast<std::size_t>(tCol)], &numeric[r])) {
                isNumeric = false;
                break;
            }
        if (isNumeric) {
            for (std::size_t r = 0; r < nrow; ++r) {
                if (numeric[r] != 0.0 && numeric[r] != 1.0)
                    throw DataError("treatment column is not binary");
                table.T[static_cast<Eigen::Index>(r)] = static_cast<int>(numeric[r]);
            }
        } else {
            std::set<std::string> levels;
            for (std::size_t r = 0; r < nrow; ++r)
                levels.insert(rows[r][static_cast<std::size_t>(tCol)]);
            if (levels.size() != 2) throw DataError("treatment column is not binary");
            const std::string& one = *std::next(levels.begin());
            for (std::size_t r = 0; r < nrow; ++r)
                table.T[static_cast<Eigen::Index>(r)] =
                    rows[r][static_cast<std::size_t>(tCol)] == one ? 1 : 0;
        }
    }

    table.Y.resize(static_cast<Eigen::Index>(nrow));
    for (std::size_t r = 0; r < nrow; ++r) {
        double v = 0;
        if (!parseNumeric(rows[r][static_cast<std::size_t>(yCol)], &v))
            throw DataError("outcome column must be numeric");
        table.Y[static_cast<Eigen::Index>(r)] = v;
    }

    std::vector<std::vector<double>> cols;
    for (std::size_t c = 0; c < ncol; ++c) {
        if (static_cast<int>(c) == tCol || static_cast<int>(c) == yCol) continue;
        auto enc = encodeColumn(c);
        for (std::size_t k = 0; k < enc.names.size(); ++k) {
            table.covariateNames.push_back(enc.names[k]);
            cols.push_back(std::move(enc.columns[k]));
        }
    }
    if (cols.empty()) throw DataError("csv has no covariate columns");

    table.X.resize(static_cast<Eigen::Index>(nrow), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c)
        for (std::size_t r = 0; r < nrow; ++r)
            table.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = cols[c][r];

    int treated = 0;
    for (Eigen::Index i = 0; i < table.T.size(); ++i) treated += table.T[i];
    if (treated == 0 || treated == table.T.size())
        throw DataError("treatment column has a single class");
    return table;
}

void exportDatasetCsv(const synthgen::Dataset& data, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write: " + path.string());
    out << "t,y";
    for (Eigen::Index j = 0; j < data.cols(); ++j) out << ",x" << (j + 1);
    out << '\n';
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        out << data.T[i] << ',' << formatDouble(data.Y[i]);
        for (Eigen::Index j = 0; j < data.cols(); ++j)
            out << ',' << formatDouble(data.X(i, j));
        out << '\n';
    }
}

std::vector<int> consensusSet(const Eigen::VectorXd& frequencies, double threshold) {
    std::vector<int> out;
    for (Eigen::Index j = 0; j < frequencies.size(); ++j)
        if (frequencies[j] >= threshold) out.push_back(static_cast<int>(j) + 1);
    return out;
}

BootstrapReport runBootstrapStudy(const RealDataJob& job) {
    if (job.bootstrapIterations < 1)
        throw std::invalid_argument("bootstrap: need at least 1 iteration");
    if (job.controlSampleSize < 1)
        throw std::invalid_argument("bootstrap: need a positive control sample size");
    if (!(job.frequencyThreshold > 0) || job.frequencyThreshold > 1)
        throw std::invalid_argument("bootstrap: threshold must be in (0, 1]");
    if (job.models.empty()) throw std::invalid_argument("bootstrap: no models configured");
    for (const auto& m : job.models) frameworks::SelectorConfig::named(m);

    const auto table = loadRealData(job.csvPath, job.treatmentColumn, job.outcomeColumn);
    const auto p = table.X.cols();

    for (int j : job.expertFeatureSet)
        if (j < 1 || j > p) throw DataError("expert feature index out of range");
    std::vector<int> expert0;  // 0-based
    for (int j : job.expertFeatureSet) expert0.push_back(j - 1);
    std::sort(expert0.begin(), expert0.end());

    std::vector<int> treatedRows, controlRows;
    for (Eigen::Index i = 0; i < table.T.size(); ++i)
        (table.T[i] == 1 ? treatedRows : controlRows).push_back(static_cast<int>(i));
    const int sampleSize =
        std::min<int>(job.controlSampleSize, static_cast<int>(controlRows.size()));

    struct ModelAccumulator {
        Eigen::VectorXd hits;
        double attSum = 0;
        int completed = 0;
        int failed = 0;
    };
    std::vector<ModelAccumulator> acc(job.models.size());
    for (auto& a : acc) a.hits = Eigen::VectorXd::Zero(p);
    double expertAttSum = 0;
    int expertCompleted = 0;

    for (int iter = 0; iter < job.bootstrapIterations; ++iter) {
        // all treated units + a fresh without-replacement control sample
        std::mt19937_64 engine(numkit::deriveSeed(job.rngSeed, static_cast<std::uint64_t>(iter)));
        std::vector<int> pool = controlRows;
        for (int k = 0; k < sampleSize; ++k) {
            std::uniform_int_distribution<std::size_t> pick(k, pool.size() - 1);
            std::swap(pool[static_cast<std::size_t>(k)], pool[pick(engine)]);
        }

        std::vector<int> rows(treatedRows);
        rows.insert(rows.end(), pool.begin(), pool.begin() + sampleSize);

        synthgen::Dataset data;
        data.X.resize(static_cast<Eigen::Index>(rows.size()), p);
        data.T.resize(static_cast<Eigen::Index>(rows.size()));
        data.Y.resize(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t r = 0; r < rows.size(); ++r) {
            data.X.row(static_cast<Eigen::Index>(r)) = table.X.row(rows[r]);
            data.T[static_cast<Eigen::Index>(r)] = table.T[rows[r]];
            data.Y[static_cast<Eigen::Index>(r)] = table.Y[rows[r]];
        }

        for (std::size_t m = 0; m < job.models.size(); ++m) {
            try {
                const auto cfg = frameworks::SelectorConfig::named(job.models[m]);
                const auto selection = frameworks::runSelector(data, cfg);
                const auto matched = causal::nearestNeighborMatch(data, selection.selected);
                const auto att = causal::estimateAtt(data, matched, selection.selected);
                for (int j : selection.selected) acc[m].hits[j] += 1.0;
                acc[m].attSum += att.att;
                ++acc[m].completed;
            } catch (const std::exception&) {
                ++acc[m].failed;
            }
        }
        if (!expert0.empty()) {
            const auto matched = causal::nearestNeighborMatch(data, expert0);
            const auto att = causal::estimateAtt(data, matched, expert0);
            expertAttSum += att.att;
            ++expertCompleted;
        }
    }

    BootstrapReport report;
    report.covariateNames = table.covariateNames;
    report.rowsDropped = table.rowsDropped;
    report.iterations = job.bootstrapIterations;
    report.expertMeanAtt = expertCompleted > 0
                               ? expertAttSum / expertCompleted
                               : std::numeric_limits<double>::quiet_NaN();
    for (std::size_t m = 0; m < job.models.size(); ++m) {
        BootstrapModelReport mr;
        mr.model = job.models[m];
        mr.failedIterations = acc[m].failed;
        if (acc[m].completed > 0) {
            mr.selectionFrequency = acc[m].hits / static_cast<double>(acc[m].completed);
            mr.meanAtt = acc[m].attSum / acc[m].completed;
        } else {
            mr.selectionFrequency = Eigen::VectorXd::Zero(p);
            mr.meanAtt = std::numeric_limits<double>::quiet_NaN();
        }
        mr.consensus = consensusSet(mr.selectionFrequency, job.frequencyThreshold);
        mr.biasVsExpert = expertCompleted > 0
                              ? mr.meanAtt - report.expertMeanAtt
                              : std::numeric_limits<double>::quiet_NaN();
        report.models.push_back(std::move(mr));
    }
    return report;
}

void writeBootstrapReport(const BootstrapReport& report, const std::filesystem::path& outDir) {
    std::filesystem::create_directories(outDir);
    {
        std::ofstream out(outDir / "bootstrap_frequency.csv", std::ios::trunc);
        if (!out) throw DataError("cannot write bootstrap_frequency.csv");
        out << "model,covariate,name,frequency\n";
        for (const auto& mr : report.models)
            for (Eigen::Index j = 0; j < mr.selectionFrequency.size(); ++j)
                out << mr.model << ',' << (j + 1) << ','
                    << report.covariateNames[static_cast<std::size_t>(j)] << ','
                    << formatDouble(mr.selectionFrequency[j]) << '\n';
    }
    {
        std::ofstream out(outDir / "bootstrap_summary.csv", std::ios::trunc);
        if (!out) throw DataError("cannot write bootstrap_summary.csv");
        out << "model,mean_att,bias_vs_expert,failed_iterations,consensus\n";
        for (const auto& mr : report.models)
            out << mr.model << ',' << formatDouble(mr.meanAtt) << ','
                << formatDouble(mr.biasVsExpert) << ',' << mr.failedIterations << ','
                << joinSelected(mr.consensus) << '\n';
    }
}

} // namespace cfs::bench
