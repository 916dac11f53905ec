#pragma once

#include <Eigen/Dense>
#include <vector>

namespace cfs::numkit {

// Common result type for every solver in this module. Coefficients are on
// the scale of the design matrix that was passed in (standardized when the
// caller standardized).
struct FitResult {
    Eigen::VectorXd coefficients;        // p
    double intercept = 0.0;
    bool converged = true;
    int iterations = 0;
    bool ridged = false;                 // ridge fallback engaged (fitOls)
    std::vector<double> objectiveTrace;  // per-epoch solver objective, empty unless recorded
};

// Non-negative per-coefficient L1 penalty multipliers. +infinity is legal
// and means the coefficient is excluded (forced to exactly zero).
struct PenaltyWeights {
    Eigen::VectorXd w;

    Eigen::Index size() const { return w.size(); }
    double operator[](Eigen::Index j) const { return w[j]; }

    static PenaltyWeights uniform(Eigen::Index p) {
        return PenaltyWeights{Eigen::VectorXd::Ones(p)};
    }

    // Throws std::invalid_argument on negative or NaN entries.
    void validate() const;
};

} // namespace cfs::numkit
