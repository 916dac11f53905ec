#include "cfs/numkit/cv.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "cfs/errors.hpp"
#include "cfs/numkit/elastic_net.hpp"

namespace cfs::numkit {

CvPlan makeCvPlan(int n, int folds, std::uint64_t rngSeed) {
    if (folds < 2) throw std::invalid_argument("makeCvPlan: need at least 2 folds");
    if (n < folds) throw std::invalid_argument("makeCvPlan: need n >= folds");
    CvPlan plan;
    plan.folds = folds;
    plan.rngSeed = rngSeed;
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 engine(rngSeed);
    std::shuffle(order.begin(), order.end(), engine);
    plan.foldAssignment.assign(static_cast<std::size_t>(n), 0);
    for (int k = 0; k < n; ++k)
        plan.foldAssignment[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] =
            k % folds;
    return plan;
}

CvPathResult cvPath(const DesignMatrix& X, const Eigen::VectorXd& y,
                    const std::vector<double>& lambda2Grid,
                    const std::vector<double>& lambda1Grid,
                    const PenaltyWeights& w, const CvPlan& plan) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (lambda2Grid.empty() || lambda1Grid.empty())
        throw std::invalid_argument("cvPath: empty grid");
    if (y.size() != n) throw std::invalid_argument("cvPath: size mismatch");
    if (static_cast<Eigen::Index>(plan.foldAssignment.size()) != n)
        throw std::invalid_argument("cvPath: plan does not match n");
    w.validate();

    const int K = plan.folds;
    std::vector<double> l1Sorted = lambda1Grid;
    std::sort(l1Sorted.begin(), l1Sorted.end(), std::greater<>());

    // Per-fold training-set covariance precomputation.
    std::vector<Eigen::MatrixXd> gram(static_cast<std::size_t>(K));
    std::vector<Eigen::VectorXd> xty(static_cast<std::size_t>(K));
    std::vector<Eigen::VectorXd> trainMeans(static_cast<std::size_t>(K));
    std::vector<double> trainYMean(static_cast<std::size_t>(K));
    std::vector<std::vector<int>> holdout(static_cast<std::size_t>(K));

    for (int k = 0; k < K; ++k) {
        std::vector<int> trainIdx;
        trainIdx.reserve(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) {
            if (plan.foldAssignment[static_cast<std::size_t>(i)] == k)
                holdout[static_cast<std::size_t>(k)].push_back(static_cast<int>(i));
            else
                trainIdx.push_back(static_cast<int>(i));
        }
        const auto m = static_cast<Eigen::Index>(trainIdx.size());
        if (m < 2 || holdout[static_cast<std::size_t>(k)].empty())
            throw std::invalid_argument("cvPath: empty fold");

        Eigen::MatrixXd Xt(m, p);
        Eigen::VectorXd yt(m);
        for (Eigen::Index r = 0; r < m; ++r) {
            Xt.row(r) = X.values.row(trainIdx[static_cast<std::size_t>(r)]);
            yt[r] = y[trainIdx[static_cast<std::size_t>(r)]];
        }
        const double ym = yt.mean();
        Eigen::VectorXd ytc = yt.array() - ym;
        if (ytc.squaredNorm() <= 0) throw DataError("cvPath: zero-variance fold");

        Eigen::VectorXd means = Xt.colwise().mean();
        Xt = Xt.rowwise() - means.transpose();
        gram[static_cast<std::size_t>(k)] = Xt.transpose() * Xt;
        xty[static_cast<std::size_t>(k)] = Xt.transpose() * ytc;
        trainMeans[static_cast<std::size_t>(k)] = means;
        trainYMean[static_cast<std::size_t>(k)] = ym;
    }

    CvPathResult result;
    result.table.reserve(lambda2Grid.size() * l1Sorted.size());
    const auto nl1 = l1Sorted.size();

    // fold x (lambda2, lambda1) held-out MSE, lambda1 swept with warm starts
    std::vector<std::vector<double>> foldMse(
        static_cast<std::size_t>(K),
        std::vector<double>(lambda2Grid.size() * nl1, 0.0));

    ElasticNetOptions cdOpts;
    for (int k = 0; k < K; ++k) {
        for (std::size_t a = 0; a < lambda2Grid.size(); ++a) {
            Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
            for (std::size_t b = 0; b < nl1; ++b) {
                elasticNetCoordinateDescent(gram[static_cast<std::size_t>(k)],
                                            xty[static_cast<std::size_t>(k)],
                                            l1Sorted[b], lambda2Grid[a], w.w, theta, cdOpts);
                double sse = 0;
                for (int idx : holdout[static_cast<std::size_t>(k)]) {
                    const double pred =
                        trainYMean[static_cast<std::size_t>(k)] +
                        (X.values.row(idx) -
                         trainMeans[static_cast<std::size_t>(k)].transpose())
                            .dot(theta);
                    const double e = y[idx] - pred;
                    sse += e * e;
                }
                foldMse[static_cast<std::size_t>(k)][a * nl1 + b] =
                    sse / static_cast<double>(holdout[static_cast<std::size_t>(k)].size());
            }
        }
    }

    double minMean = std::numeric_limits<double>::infinity();
    double seAtMin = 0;
    for (std::size_t a = 0; a < lambda2Grid.size(); ++a) {
        for (std::size_t b = 0; b < nl1; ++b) {
            double mean = 0;
            for (int k = 0; k < K; ++k) mean += foldMse[static_cast<std::size_t>(k)][a * nl1 + b];
            mean /= K;
            double var = 0;
            for (int k = 0; k < K; ++k) {
                const double d = foldMse[static_cast<std::size_t>(k)][a * nl1 + b] - mean;
                var += d * d;
            }
            var /= (K - 1);
            const double se = std::sqrt(var / K);
            result.table.push_back({lambda2Grid[a], l1Sorted[b], mean, se});
            if (mean < minMean) {
                minMean = mean;
                seAtMin = se;
            }
        }
    }

    // most regularized pair within one standard error of the minimum
    const double ceiling = minMean + seAtMin;
    double bestL1 = -1, bestL2 = 0;
    for (const CvPoint& pt : result.table) {
        if (pt.meanError > ceiling) continue;
        if (pt.lambda1 > bestL1 || (pt.lambda1 == bestL1 && pt.lambda2 > bestL2)) {
            bestL1 = pt.lambda1;
            bestL2 = pt.lambda2;
        }
    }
    result.bestLambda1 = bestL1;
    result.bestLambda2 = bestL2;
    return result;
}

} // namespace cfs::numkit
