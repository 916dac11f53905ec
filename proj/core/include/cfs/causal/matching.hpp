#pragma once

#include <utility>
#include <vector>

#include "cfs/synthgen/synthgen.hpp"

namespace cfs::causal {

struct MatchedSample {
    std::vector<std::pair<int, int>> pairs;  // (treated row, control row)
    std::vector<double> distances;           // per pair
    bool matchedOnEmptySet = false;          // no covariates selected
    bool controlsExhausted = false;          // fewer controls than treated
};

// Greedy one-to-one nearest-neighbor matching without replacement.
// Treated rows are processed in ascending index order; each is paired with
// the nearest unmatched control by Euclidean distance on the standardized
// selected covariates, ties broken by lowest control index. With an empty
// selected set all distances are zero, so treated unit k gets the k-th
// lowest-index free control (flagged matchedOnEmptySet).
MatchedSample nearestNeighborMatch(const synthgen::Dataset& data,
                                   const std::vector<int>& selected);

} // namespace cfs::causal
