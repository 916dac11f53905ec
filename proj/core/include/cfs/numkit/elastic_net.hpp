#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cfs/numkit/design_matrix.hpp"
#include "cfs/numkit/fit.hpp"

namespace cfs::numkit {

struct ElasticNetOptions {
    double coefficientTol = 1e-6;  // sweep convergence on max |delta theta|
    double kktTol = 1e-7;          // final KKT residual accepted
    int maxSweeps = 100000;
};

// Weighted elastic net on column-centered data:
//   min over theta of  ||Yc - Xc theta||_2^2 + lambda2 ||theta||_2^2
//                      + lambda1 sum_j w_j |theta_j|
// solved by covariance-form coordinate descent until the KKT residual of
// this objective is below kktTol. w_j = +inf excludes coordinate j exactly.
// With rescale=true the returned slopes carry the (1 + lambda2/n) factor;
// the intercept always reproduces the training means.
FitResult fitWeightedElasticNet(const DesignMatrix& X, const Eigen::VectorXd& y,
                                double lambda1, double lambda2, const PenaltyWeights& w,
                                bool rescale = false, const ElasticNetOptions& opts = {});

// Coordinate-descent kernel on precomputed Gram = Xc'Xc and xty = Xc'Yc.
// theta is the warm start and receives the solution; returns sweep count
// (negative if the sweep cap was hit before the KKT tolerance).
int elasticNetCoordinateDescent(const Eigen::MatrixXd& gram, const Eigen::VectorXd& xty,
                                double lambda1, double lambda2, const Eigen::VectorXd& w,
                                Eigen::VectorXd& theta, const ElasticNetOptions& opts = {});

// Largest KKT violation of the elastic-net objective at theta.
double elasticNetKktResidual(const Eigen::MatrixXd& gram, const Eigen::VectorXd& xty,
                             double lambda1, double lambda2, const Eigen::VectorXd& w,
                             const Eigen::VectorXd& theta);

// Smallest lambda1 at which all weighted coefficients are zero.
double lambda1Max(const Eigen::VectorXd& xty, const Eigen::VectorXd& w);

// `count` log-spaced values from maxValue down to maxValue*minRatio.
std::vector<double> logSpacedGrid(double maxValue, double minRatio, int count);

} // namespace cfs::numkit
