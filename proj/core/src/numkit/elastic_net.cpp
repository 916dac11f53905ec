#include "cfs/numkit/elastic_net.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cfs::numkit {

namespace {

inline double softThreshold(double z, double threshold) {
    return std::copysign(std::max(std::abs(z) - threshold, 0.0), z);
}

} // namespace

double lambda1Max(const Eigen::VectorXd& xty, const Eigen::VectorXd& w) {
    // Smallest lambda1 at which every weighted (w_j > 0, finite) coordinate
    // sits at zero by the KKT condition |2 xty_j| <= lambda1 w_j.
    double best = 0;
    for (Eigen::Index j = 0; j < xty.size(); ++j) {
        if (std::isinf(w[j]) || w[j] <= 0) continue;
        best = std::max(best, 2.0 * std::abs(xty[j]) / w[j]);
    }
    return best;
}

std::vector<double> logSpacedGrid(double maxValue, double minRatio, int count) {
    if (count < 1) throw std::invalid_argument("logSpacedGrid: count must be >= 1");
    if (!(maxValue > 0) || !std::isfinite(maxValue)) return {0.0};
    if (count == 1) return {maxValue};
    std::vector<double> grid(static_cast<std::size_t>(count));
    const double logMax = std::log(maxValue);
    const double logMin = std::log(maxValue * minRatio);
    for (int k = 0; k < count; ++k)
        grid[static_cast<std::size_t>(k)] =
            std::exp(logMax + (logMin - logMax) * k / static_cast<double>(count - 1));
    return grid;
}

double elasticNetKktResidual(const Eigen::MatrixXd& gram, const Eigen::VectorXd& xty,
                             double lambda1, double lambda2, const Eigen::VectorXd& w,
                             const Eigen::VectorXd& theta) {
    const Eigen::VectorXd q = gram * theta;
    double worst = 0;
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
        if (std::isinf(w[j])) continue;  // excluded coordinate, pinned at zero
        const double r = xty[j] - q[j];  // x_j' residual
        double violation;
        if (theta[j] != 0) {
            violation = std::abs(-2.0 * r + 2.0 * lambda2 * theta[j] +
                                 lambda1 * w[j] * (theta[j] > 0 ? 1.0 : -1.0));
        } else {
            violation = std::max(0.0, 2.0 * std::abs(r) - lambda1 * w[j]);
        }
        worst = std::max(worst, violation);
    }
    return worst;
}

int elasticNetCoordinateDescent(const Eigen::MatrixXd& gram, const Eigen::VectorXd& xty,
                                double lambda1, double lambda2, const Eigen::VectorXd& w,
                                Eigen::VectorXd& theta, const ElasticNetOptions& opts) {
    const Eigen::Index p = gram.rows();
    if (lambda1 < 0 || lambda2 < 0)
        throw std::invalid_argument("elastic net: negative lambda");
    if (theta.size() != p) theta = Eigen::VectorXd::Zero(p);
    for (Eigen::Index j = 0; j < p; ++j)
        if (std::isinf(w[j])) theta[j] = 0;

    Eigen::VectorXd q = gram * theta;
    double tol = opts.coefficientTol;
    int sweeps = 0;

    while (sweeps < opts.maxSweeps) {
        ++sweeps;
        double maxChange = 0;
        for (Eigen::Index j = 0; j < p; ++j) {
            if (std::isinf(w[j])) continue;
            const double d = gram(j, j);
            if (d <= 0 && lambda2 <= 0) continue;  // constant column
            const double rho = xty[j] - q[j] + d * theta[j];
            const double next = softThreshold(rho, 0.5 * lambda1 * w[j]) / (d + lambda2);
            const double change = next - theta[j];
            if (change != 0) {
                q += change * gram.col(j);
                theta[j] = next;
                maxChange = std::max(maxChange, std::abs(change));
            }
        }
        if (maxChange < tol) {
            q = gram * theta;  // refresh accumulated drift before judging KKT
            const double residual =
                elasticNetKktResidual(gram, xty, lambda1, lambda2, w, theta);
            if (residual <= opts.kktTol) return sweeps;
            if (tol <= 1e-15) return sweeps;  // at numerical floor, accept
            tol = std::max(tol / 10.0, 1e-15);
        }
    }
    return -sweeps;  // sweep cap reached before the KKT tolerance
}

FitResult fitWeightedElasticNet(const DesignMatrix& X, const Eigen::VectorXd& y,
                                double lambda1, double lambda2, const PenaltyWeights& w,
                                bool rescale, const ElasticNetOptions& opts) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (y.size() != n) throw std::invalid_argument("fitWeightedElasticNet: size mismatch");
    if (w.size() != p)
        throw std::invalid_argument("fitWeightedElasticNet: weight size mismatch");
    if (lambda1 < 0 || lambda2 < 0)
        throw std::invalid_argument("fitWeightedElasticNet: negative lambda");
    w.validate();

    Eigen::VectorXd colMeans = X.values.colwise().mean();
    Eigen::MatrixXd Xc = X.values.rowwise() - colMeans.transpose();
    const double yMean = y.mean();
    Eigen::VectorXd yc = y.array() - yMean;

    const Eigen::MatrixXd gram = Xc.transpose() * Xc;
    const Eigen::VectorXd xty = Xc.transpose() * yc;

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
    const int sweeps = elasticNetCoordinateDescent(gram, xty, lambda1, lambda2, w.w, theta, opts);

    FitResult fit;
    fit.converged = sweeps > 0;
    fit.iterations = std::abs(sweeps);
    if (rescale) theta *= 1.0 + lambda2 / static_cast<double>(n);
    fit.coefficients = theta;
    fit.intercept = yMean - theta.dot(colMeans);
    return fit;
}

} // namespace cfs::numkit
