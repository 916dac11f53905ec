#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace cfs::bench {

// One (scenario, N, rho, seed, model) experiment cell.
struct ExperimentRecord {
    std::string model;
    int scenario = 0;
    int n = 0;
    double rho = 0;
    int seed = 0;
    int p = 0;
    std::vector<int> selected;  // 1-based covariate ids, ascending
    double att = 0;
    double bias = 0;            // att - true ATT
    double seconds = 0;         // selector wall clock
    std::string error;          // empty on success

    bool failed() const { return !error.empty(); }
    std::string key() const;
};

// Plain CSV record store, one row per cell. Appends are serialized by the
// caller (see runGrid); rows are self-describing and order-independent.
namespace store {

inline constexpr const char* kHeader =
    "model,scenario,n,rho,seed,p,selected,att,bias,seconds,error";

std::string encodeRow(const ExperimentRecord& r);
ExperimentRecord decodeRow(const std::string& line);

std::vector<ExperimentRecord> load(const std::filesystem::path& csvPath);
void save(const std::vector<ExperimentRecord>& records,
          const std::filesystem::path& csvPath);

} // namespace store

// Shortest decimal form that parses back to the same double.
std::string formatDouble(double v);

std::string joinSelected(const std::vector<int>& selected);  // "1;2;3"
std::vector<int> splitSelected(const std::string& field);

} // namespace cfs::bench
