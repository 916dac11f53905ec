#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cfs/bench/records.hpp"

namespace cfs::bench {

struct SelectionFrequencyRow {
    std::string model;
    int scenario = 0;
    int n = 0;
    double rho = 0;
    int covariate = 0;   // 1-based
    double frequency = 0;
};

// Per-(model, scenario, N, rho, covariate) selection frequency across seeds.
// Error-tagged records are excluded from both numerator and denominator.
std::vector<SelectionFrequencyRow>
aggregateSelectionProbabilities(const std::vector<ExperimentRecord>& records);

struct BiasSummaryRow {
    std::string model;
    int scenario = 0;
    int n = 0;
    double rho = 0;
    int seeds = 0;
    double meanBias = 0;
    double sdBias = 0;
    double tStatistic = 0;   // NaN when degenerate
    double pValue = 0;       // NaN when degenerate
    bool degenerate = false; // zero variance across seeds
};

// Per-cell mean bias, SD and the two-sided one-sample t-test of
// H0: mean bias = 0 across seeds. Cells need >= 2 non-error records.
std::vector<BiasSummaryRow> biasSummary(const std::vector<ExperimentRecord>& records);

enum class PlotKind { bias, selectionProbability };

// Throws std::invalid_argument for unknown names.
PlotKind parsePlotKind(const std::string& name);

// Tidy long-format CSV with a fixed header:
//   bias                 -> model,scenario,n,rho,seed,bias
//   selectionProbability -> model,scenario,n,rho,covariate,frequency
void emitPlotData(const std::vector<ExperimentRecord>& records, PlotKind kind,
                  const std::filesystem::path& outPath);

// Two-sided one-sample t-test p-value; NaN when sd == 0 or n < 2.
double tTestPValue(double mean, double sd, int n);

} // namespace cfs::bench
