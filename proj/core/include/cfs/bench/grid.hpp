#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "cfs/bench/records.hpp"

namespace cfs::bench {

// The (scenario x N x rho x seed x model) experiment grid. The defaults
// reproduce the 4 x 3 x 4 x 30 = 1,440 cells per model of the synthetic
// benchmark.
struct ExperimentGrid {
    std::vector<int> scenarios{1, 2, 3, 4};
    std::vector<int> ns{200, 500, 1000};
    std::vector<double> rhos{0.0, 0.25, 0.5, 0.75};
    std::vector<int> seeds;  // empty = 1..30
    std::vector<std::string> models;
    double trueEffect = 0.0;
    int p = 20;
    double outcomeNoiseSd = 1.0;

    std::vector<int> effectiveSeeds() const;
    long cellCount() const;
    std::string describe() const;
};

struct GridRunStats {
    long computed = 0;
    long skipped = 0;   // already present in the store
    long failed = 0;    // recorded with an error tag
};

// Executes every cell not already present in <outDir>/records.csv, streaming
// records as cells finish (appends serialized, fsync-free). Per-cell
// failures are recorded with an error tag and never abort the grid. Cells
// are independent; `workers` > 1 runs them on a thread pool.
GridRunStats runGrid(const ExperimentGrid& grid, const std::filesystem::path& outDir,
                     int workers = 1, std::ostream* progress = nullptr);

// Runs a single cell (no store involved); used by runGrid and tests.
ExperimentRecord runCell(const ExperimentGrid& grid, int scenario, int n, double rho,
                         int seed, const std::string& model);

} // namespace cfs::bench
