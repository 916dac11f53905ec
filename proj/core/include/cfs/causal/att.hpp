#pragma once

#include <vector>

#include "cfs/causal/matching.hpp"
#include "cfs/synthgen/synthgen.hpp"

namespace cfs::causal {

struct AttEstimate {
    enum class Model { regression, matchedMeanDifference };

    double att = 0;
    double standardError = 0;
    int nPairs = 0;
    Model modelUsed = Model::regression;
    bool droppedCollinear = false;
};

// OLS of Y on (intercept, T, standardized selected covariates) over the
// matched units; att is the coefficient of T with the usual OLS standard
// error. Collinear covariates are dropped (flagged). With an empty selected
// set this degenerates to the difference of matched means.
AttEstimate estimateAtt(const synthgen::Dataset& data, const MatchedSample& matched,
                        const std::vector<int>& selected);

// Reference estimator on the ground-truth set X_C union X_P; requires
// Dataset.truth.
AttEstimate targetModelAtt(const synthgen::Dataset& data);

// Signed difference att - reference; reporting layers take the absolute value.
double selectionBias(const AttEstimate& modelAtt, double reference);

} // namespace cfs::causal
