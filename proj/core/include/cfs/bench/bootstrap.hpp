#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cfs/synthgen/synthgen.hpp"

namespace cfs::bench {

// Class-imbalance bootstrap on user-supplied data: every iteration keeps all
// treated rows plus `controlSampleSize` controls sampled without replacement,
// runs each configured selector and records the selected sets and ATT.
struct RealDataJob {
    std::filesystem::path csvPath;
    std::string treatmentColumn;
    std::string outcomeColumn;
    int bootstrapIterations = 500;
    int controlSampleSize = 5000;
    double frequencyThreshold = 0.70;
    std::vector<int> expertFeatureSet;  // 1-based covariate ids; empty = none
    std::uint64_t rngSeed = 0;
    std::vector<std::string> models{"Enh-ESVMS"};
};

struct BootstrapModelReport {
    std::string model;
    Eigen::VectorXd selectionFrequency;  // per covariate, over completed iterations
    std::vector<int> consensus;          // 1-based ids with frequency >= threshold
    double meanAtt = 0;
    double biasVsExpert = 0;             // NaN when no expert set given
    int failedIterations = 0;
};

struct BootstrapReport {
    std::vector<std::string> covariateNames;
    std::vector<BootstrapModelReport> models;
    double expertMeanAtt = 0;  // NaN when no expert set given
    int rowsDropped = 0;       // rows removed for missing values
    int iterations = 0;
};

BootstrapReport runBootstrapStudy(const RealDataJob& job);

void writeBootstrapReport(const BootstrapReport& report,
                          const std::filesystem::path& outDir);

// CSV ingestion with deterministic encoding: numeric columns pass through,
// categorical columns are one-hot encoded with the lexicographically first
// level dropped, rows with missing values are dropped (counted).
struct LoadedTable {
    std::vector<std::string> covariateNames;
    Eigen::MatrixXd X;
    Eigen::VectorXi T;
    Eigen::VectorXd Y;
    int rowsDropped = 0;
};

LoadedTable loadRealData(const std::filesystem::path& csvPath,
                         const std::string& treatmentColumn,
                         const std::string& outcomeColumn);

// Synthetic datasets in the bootstrap CSV schema: header t,y,x1..xp.
void exportDatasetCsv(const synthgen::Dataset& data, const std::filesystem::path& path);

// 1-based ids of covariates with frequency >= threshold.
std::vector<int> consensusSet(const Eigen::VectorXd& frequencies, double threshold);

} // namespace cfs::bench
