#pragma once

#include <Eigen/Dense>
#include <optional>

#include "cfs/numkit/design_matrix.hpp"
#include "cfs/numkit/fit.hpp"

namespace cfs::numkit {

// Least squares of y on (intercept, X). When the system is near-singular
// (condition estimate > 1e10) or N <= p, a ridge of 1e-6 is added and the
// result is marked `ridged`; with ridgeFallback=false this becomes
// DataError("singular system").
FitResult fitOls(const DesignMatrix& X, const Eigen::VectorXd& y,
                 bool ridgeFallback = true);

struct LogisticOptions {
    int maxIterations = 100;
    double gradientTol = 1e-6;   // 2-norm of the full gradient
    double coefficientCap = 50;  // separation guard on |beta|_inf
};

// Ridge-stabilized logistic regression of binary labels on (intercept, X),
// solved by damped Newton iterations. The intercept is never penalized.
// Separation is detected via the coefficient cap; capped fits come back
// with converged=false.
FitResult fitLogistic(const DesignMatrix& X, const Eigen::VectorXi& labels,
                      double ridge = 1e-8, const LogisticOptions& opts = {});

struct PenalizedLogisticOptions {
    int maxIterations = 20000;
    double objectiveTol = 1e-6;  // absolute change between FISTA iterates
};

// Weighted elastic-net logistic regression:
//   min over (beta, b) of  sum_i [-t_i z_i + log(1 + e^{z_i})]
//                          + lambda2 ||beta||_2^2 + lambda1 sum_j w_j |beta_j|
// with z = X beta + b and an unpenalized intercept, solved by FISTA with
// backtracking. w_j = +inf pins beta_j to zero. With rescale=true the
// returned slopes are multiplied by (1 + lambda2/n).
FitResult fitPenalizedLogistic(const DesignMatrix& X, const Eigen::VectorXi& labels,
                               double lambda1, double lambda2, const PenaltyWeights& w,
                               bool rescale = false,
                               const PenalizedLogisticOptions& opts = {},
                               const FitResult* warmStart = nullptr);

struct SvmOptions {
    double relativeGapTol = 1e-6;  // duality gap / max(1, primal)
    long maxPairUpdates = 0;       // 0 = choose from n
};

// Soft-margin linear SVM with a free (unregularized) intercept:
//   min over (beta, b) of  0.5 ||beta||^2 + C sum_i max(0, 1 - y_i (x_i beta + b))
// solved in the dual by SMO with second-order working-set selection. The
// returned objectiveTrace records the dual objective at every convergence
// check (non-increasing). Stops when the duality gap certifies the primal
// objective within relativeGapTol of the optimum.
FitResult fitLinearSvm(const DesignMatrix& X, const Eigen::VectorXi& labels,
                       double C, const SvmOptions& opts = {});

// Primal SVM objective at (beta, b); used for gap certification and tests.
double svmPrimalObjective(const DesignMatrix& X, const Eigen::VectorXi& labels,
                          double C, const Eigen::VectorXd& beta, double intercept);

} // namespace cfs::numkit
