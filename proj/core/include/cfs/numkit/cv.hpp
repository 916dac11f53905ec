#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "cfs/numkit/design_matrix.hpp"
#include "cfs/numkit/fit.hpp"

namespace cfs::numkit {

// Reproducible fold assignment: a pure function of (n, folds, rngSeed).
struct CvPlan {
    int folds = 10;
    std::uint64_t rngSeed = 0;
    std::vector<int> foldAssignment;  // n entries in [0, folds)
};

CvPlan makeCvPlan(int n, int folds = 10, std::uint64_t rngSeed = 0);

struct CvPoint {
    double lambda2 = 0;
    double lambda1 = 0;
    double meanError = 0;  // mean of per-fold held-out MSE
    double stdError = 0;   // sd of fold MSEs / sqrt(folds)
};

struct CvPathResult {
    double bestLambda2 = 0;
    double bestLambda1 = 0;
    std::vector<CvPoint> table;
};

// Cross-validated (lambda2, lambda1) search for the weighted elastic net.
// For each lambda2 the lambda1 grid is swept from large to small with warm
// starts. The winner is the most regularized pair (largest lambda1, then
// largest lambda2) whose mean CV error is within one standard error of the
// minimum.
CvPathResult cvPath(const DesignMatrix& X, const Eigen::VectorXd& y,
                    const std::vector<double>& lambda2Grid,
                    const std::vector<double>& lambda1Grid,
                    const PenaltyWeights& w, const CvPlan& plan);

} // namespace cfs::numkit
