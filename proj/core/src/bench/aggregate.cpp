#include "cfs/bench/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>
#include <tuple>

#include <boost/math/distributions/students_t.hpp>

#include "cfs/errors.hpp"

namespace cfs::bench {

namespace {

using CellKey = std::tuple<std::string, int, int, double>;  // model, scenario, n, rho

CellKey keyOf(const ExperimentRecord& r) { return {r.model, r.scenario, r.n, r.rho}; }

} // namespace

double tTestPValue(double mean, double sd, int n) {
    if (n < 2 || !(sd > 0)) return std::numeric_limits<double>::quiet_NaN();
    const double t = mean / (sd / std::sqrt(static_cast<double>(n)));
    boost::math::students_t dist(static_cast<double>(n - 1));
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

std::vector<SelectionFrequencyRow>
aggregateSelectionProbabilities(const std::vector<ExperimentRecord>& records) {
    if (records.empty()) throw std::invalid_argument("aggregate: no records");

    struct Cell {
        int p = 0;
        int seeds = 0;
        std::map<int, int> hits;  // covariate -> count
    };
    std::map<CellKey, Cell> cells;
    for (const auto& r : records) {
        if (r.failed()) continue;
        auto& cell = cells[keyOf(r)];
        cell.p = std::max(cell.p, r.p);
        ++cell.seeds;
        for (int j : r.selected) ++cell.hits[j];
    }
    if (cells.empty()) throw DataError("aggregate: every record is error-tagged");

    std::vector<SelectionFrequencyRow> rows;
    for (const auto& [key, cell] : cells) {
        for (int j = 1; j <= cell.p; ++j) {
            SelectionFrequencyRow row;
            row.model = std::get<0>(key);
            row.scenario = std::get<1>(key);
            row.n = std::get<2>(key);
            row.rho = std::get<3>(key);
            row.covariate = j;
            const auto it = cell.hits.find(j);
            row.frequency =
                it == cell.hits.end()
                    ? 0.0
                    : static_cast<double>(it->second) / static_cast<double>(cell.seeds);
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<BiasSummaryRow> biasSummary(const std::vector<ExperimentRecord>& records) {
    if (records.empty()) throw std::invalid_argument("biasSummary: no records");

    std::map<CellKey, std::vector<double>> cells;
    for (const auto& r : records) {
        if (r.failed()) continue;
        cells[keyOf(r)].push_back(r.bias);
    }
    if (cells.empty()) throw DataError("biasSummary: every record is error-tagged");

    std::vector<BiasSummaryRow> rows;
    for (const auto& [key, biases] : cells) {
        if (biases.size() < 2) throw DataError("biasSummary: cell with fewer than 2 records");
        BiasSummaryRow row;
        row.model = std::get<0>(key);
        row.scenario = std::get<1>(key);
        row.n = std::get<2>(key);
        row.rho = std::get<3>(key);
        row.seeds = static_cast<int>(biases.size());
        double mean = 0;
        for (double b : biases) mean += b;
        mean /= static_cast<double>(biases.size());
        double var = 0;
        for (double b : biases) var += (b - mean) * (b - mean);
        var /= static_cast<double>(biases.size() - 1);
        row.meanBias = mean;
        row.sdBias = std::sqrt(var);
        if (row.sdBias > 0) {
            row.tStatistic = mean / (row.sdBias / std::sqrt(static_cast<double>(row.seeds)));
            row.pValue = tTestPValue(mean, row.sdBias, row.seeds);
        } else {
            row.degenerate = true;
            row.tStatistic = std::numeric_limits<double>::quiet_NaN();
            row.pValue = std::numeric_limits<double>::quiet_NaN();
        }
        rows.push_back(row);
    }
    return rows;
}

PlotKind parsePlotKind(const std::string& name) {
    if (name == "bias") return PlotKind::bias;
    if (name == "selectionProbability") return PlotKind::selectionProbability;
    throw std::invalid_argument("unknown plot kind: " + name);
}

void emitPlotData(const std::vector<ExperimentRecord>& records, PlotKind kind,
                  const std::filesystem::path& outPath) {
    if (records.empty()) throw std::invalid_argument("emitPlotData: no records");
    std::ofstream out(outPath, std::ios::trunc);
    if (!out) throw DataError("cannot write: " + outPath.string());

    if (kind == PlotKind::bias) {
        out << "model,scenario,n,rho,seed,bias\n";
        std::vector<const ExperimentRecord*> ok;
        for (const auto& r : records)
            if (!r.failed()) ok.push_back(&r);
        std::sort(ok.begin(), ok.end(), [](const ExperimentRecord* a, const ExperimentRecord* b) {
            return std::tie(a->model, a->scenario, a->n, a->rho, a->seed) <
                   std::tie(b->model, b->scenario, b->n, b->rho, b->seed);
        });
        for (const auto* r : ok)
            out << r->model << ',' << r->scenario << ',' << r->n << ',' << formatDouble(r->rho)
                << ',' << r->seed << ',' << formatDouble(r->bias) << '\n';
    } else {
        out << "model,scenario,n,rho,covariate,frequency\n";
        for (const auto& row : aggregateSelectionProbabilities(records))
            out << row.model << ',' << row.scenario << ',' << row.n << ','
                << formatDouble(row.rho) << ',' << row.covariate << ','
                << formatDouble(row.frequency) << '\n';
    }
}

} // namespace cfs::bench
