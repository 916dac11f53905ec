#include "cfs/numkit/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "cfs/errors.hpp"

namespace cfs::numkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log1pexp(double z) {
    return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

void requireBinaryLabels(const Eigen::VectorXi& labels, int zeroValue, int oneValue) {
    bool sawZero = false, sawOne = false;
    for (Eigen::Index i = 0; i < labels.size(); ++i) {
        if (labels[i] == zeroValue) sawZero = true;
        else if (labels[i] == oneValue) sawOne = true;
        else throw std::invalid_argument("labels must be binary");
    }
    if (!sawZero || !sawOne) throw DataError("degenerate labels");
}

} // namespace

FitResult fitOls(const DesignMatrix& X, const Eigen::VectorXd& y, bool ridgeFallback) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (y.size() != n) throw std::invalid_argument("fitOls: size mismatch");
    if (n < 2) throw std::invalid_argument("fitOls: need at least 2 rows");

    Eigen::VectorXd colMeans = X.values.colwise().mean();
    Eigen::MatrixXd Xc = X.values.rowwise() - colMeans.transpose();
    const double yMean = y.mean();
    Eigen::VectorXd yc = y.array() - yMean;

    FitResult fit;
    fit.iterations = 1;

    bool direct = n > p;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
    if (direct) {
        qr.compute(Xc);
        if (qr.rank() < p) {
            direct = false;
        } else {
            const auto rDiag = qr.matrixR().diagonal().head(p).cwiseAbs();
            const double condEstimate = rDiag.maxCoeff() / rDiag.minCoeff();
            if (!(condEstimate <= 1e10)) direct = false;
        }
    }

    if (direct) {
        fit.coefficients = qr.solve(yc);
    } else {
        if (!ridgeFallback) throw DataError("singular system");
        Eigen::MatrixXd gram = Xc.transpose() * Xc;
        gram.diagonal().array() += 1e-6;
        fit.coefficients = gram.ldlt().solve(Xc.transpose() * yc);
        fit.ridged = true;
    }
    fit.intercept = yMean - fit.coefficients.dot(colMeans);
    return fit;
}

FitResult fitLogistic(const DesignMatrix& X, const Eigen::VectorXi& labels,
                      double ridge, const LogisticOptions& opts) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (labels.size() != n) throw std::invalid_argument("fitLogistic: size mismatch");
    if (ridge < 0) throw std::invalid_argument("fitLogistic: ridge must be >= 0");
    requireBinaryLabels(labels, 0, 1);

    const Eigen::VectorXd t = labels.cast<double>();
    const double tBar = t.mean();

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    double b = std::clamp(std::log(tBar / (1.0 - tBar)), -10.0, 10.0);

    auto objective = [&](const Eigen::VectorXd& coef, double intercept) {
        const Eigen::VectorXd z = (X.values * coef).array() + intercept;
        double nll = 0;
        for (Eigen::Index i = 0; i < n; ++i) nll += log1pexp(z[i]) - t[i] * z[i];
        return nll + ridge * coef.squaredNorm();
    };

    FitResult fit;
    double f = objective(beta, b);

    for (int iter = 1; iter <= opts.maxIterations; ++iter) {
        fit.iterations = iter;
        const Eigen::VectorXd z = (X.values * beta).array() + b;
        Eigen::VectorXd pr(n), wgt(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            pr[i] = sigmoid(z[i]);
            wgt[i] = std::max(pr[i] * (1.0 - pr[i]), 1e-10);
        }
        Eigen::VectorXd resid = pr - t;
        Eigen::VectorXd gradBeta = X.values.transpose() * resid + 2.0 * ridge * beta;
        const double gradB = resid.sum();
        const double gradNorm = std::sqrt(gradBeta.squaredNorm() + gradB * gradB);
        if (gradNorm <= opts.gradientTol) {
            fit.converged = true;
            break;
        }

        Eigen::MatrixXd H(p + 1, p + 1);
        Eigen::MatrixXd Xw = X.values.array().colwise() * wgt.array();
        H.topLeftCorner(p, p) = X.values.transpose() * Xw;
        H.topLeftCorner(p, p).diagonal().array() += 2.0 * ridge;
        H.block(0, p, p, 1) = Xw.colwise().sum().transpose();
        H.block(p, 0, 1, p) = H.block(0, p, p, 1).transpose();
        H(p, p) = wgt.sum();

        Eigen::VectorXd g(p + 1);
        g.head(p) = gradBeta;
        g[p] = gradB;
        Eigen::VectorXd step = H.ldlt().solve(-g);

        double stepScale = 1.0;
        Eigen::VectorXd betaNew;
        double bNew = 0, fNew = 0;
        bool accepted = false;
        for (int halving = 0; halving < 50; ++halving) {
            betaNew = beta + stepScale * step.head(p);
            bNew = b + stepScale * step[p];
            fNew = objective(betaNew, bNew);
            if (fNew <= f + 1e-12 * std::abs(f)) {
                accepted = true;
                break;
            }
            stepScale *= 0.5;
        }
        if (!accepted) {
            fit.converged = gradNorm <= opts.gradientTol;
            break;
        }
        beta = betaNew;
        b = bNew;
        f = fNew;

        if (beta.cwiseAbs().maxCoeff() > opts.coefficientCap) {
            // separation guard
            beta = beta.cwiseMax(-opts.coefficientCap).cwiseMin(opts.coefficientCap);
            fit.converged = false;
            fit.coefficients = beta;
            fit.intercept = b;
            return fit;
        }
        if (iter == opts.maxIterations) fit.converged = false;
    }

    fit.coefficients = beta;
    fit.intercept = b;
    return fit;
}

FitResult fitPenalizedLogistic(const DesignMatrix& X, const Eigen::VectorXi& labels,
                               double lambda1, double lambda2, const PenaltyWeights& w,
                               bool rescale, const PenalizedLogisticOptions& opts,
                               const FitResult* warmStart) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (labels.size() != n) throw std::invalid_argument("fitPenalizedLogistic: size mismatch");
    if (w.size() != p) throw std::invalid_argument("fitPenalizedLogistic: weight size mismatch");
    if (lambda1 < 0 || lambda2 < 0)
        throw std::invalid_argument("fitPenalizedLogistic: negative lambda");
    w.validate();
    requireBinaryLabels(labels, 0, 1);

    const Eigen::VectorXd t = labels.cast<double>();
    const double tBar = t.mean();

    std::vector<bool> pinned(static_cast<std::size_t>(p), false);
    for (Eigen::Index j = 0; j < p; ++j)
        if (std::isinf(w.w[j])) pinned[static_cast<std::size_t>(j)] = true;

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    double b = std::clamp(std::log(tBar / (1.0 - tBar)), -10.0, 10.0);
    if (warmStart && warmStart->coefficients.size() == p) {
        beta = warmStart->coefficients;
        b = warmStart->intercept;
        for (Eigen::Index j = 0; j < p; ++j)
            if (pinned[static_cast<std::size_t>(j)]) beta[j] = 0;
    }

    auto smooth = [&](const Eigen::VectorXd& coef, double intercept, Eigen::VectorXd& z) {
        z = (X.values * coef).array() + intercept;
        double nll = 0;
        for (Eigen::Index i = 0; i < n; ++i) nll += log1pexp(z[i]) - t[i] * z[i];
        return nll + lambda2 * coef.squaredNorm();
    };
    auto penalty = [&](const Eigen::VectorXd& coef) {
        double s = 0;
        for (Eigen::Index j = 0; j < p; ++j)
            if (!pinned[static_cast<std::size_t>(j)]) s += w.w[j] * std::abs(coef[j]);
        return lambda1 * s;
    };

    Eigen::VectorXd z(n);
    double gCur = smooth(beta, b, z);
    double fCur = gCur + penalty(beta);

    // FISTA with backtracking and objective restart.
    Eigen::VectorXd yBeta = beta;
    double yB = b;
    double tk = 1.0;
    double L = std::max(1.0, static_cast<double>(n) / 8.0);
    FitResult fit;
    fit.converged = false;

    for (int iter = 1; iter <= opts.maxIterations; ++iter) {
        fit.iterations = iter;
        Eigen::VectorXd zy;
        const double gy = smooth(yBeta, yB, zy);
        Eigen::VectorXd pr(n);
        for (Eigen::Index i = 0; i < n; ++i) pr[i] = sigmoid(zy[i]);
        Eigen::VectorXd gradBeta = X.values.transpose() * (pr - t) + 2.0 * lambda2 * yBeta;
        const double gradB = (pr - t).sum();

        Eigen::VectorXd betaNew(p);
        double bNew = 0, gNew = 0;
        while (true) {
            const double step = 1.0 / L;
            for (Eigen::Index j = 0; j < p; ++j) {
                if (pinned[static_cast<std::size_t>(j)]) {
                    betaNew[j] = 0;
                    continue;
                }
                const double v = yBeta[j] - step * gradBeta[j];
                const double thr = step * lambda1 * w.w[j];
                betaNew[j] = std::copysign(std::max(std::abs(v) - thr, 0.0), v);
            }
            bNew = yB - step * gradB;
            Eigen::VectorXd zn;
            gNew = smooth(betaNew, bNew, zn);
            const Eigen::VectorXd d = betaNew - yBeta;
            const double db = bNew - yB;
            const double upper = gy + gradBeta.dot(d) + gradB * db +
                                 0.5 * L * (d.squaredNorm() + db * db);
            if (gNew <= upper + 1e-10 * std::abs(upper)) break;
            L *= 2.0;
            if (L > 1e15) break;
        }

        const double fNew = gNew + penalty(betaNew);
        if (fNew > fCur) {
            // restart momentum from the best point
            yBeta = beta;
            yB = b;
            tk = 1.0;
            if (std::abs(fNew - fCur) < opts.objectiveTol) {
                fit.converged = true;
                break;
            }
            continue;
        }

        const double tNext = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
        const double momentum = (tk - 1.0) / tNext;
        yBeta = betaNew + momentum * (betaNew - beta);
        yB = bNew + momentum * (bNew - b);
        tk = tNext;

        const double change = fCur - fNew;
        beta = betaNew;
        b = bNew;
        fCur = fNew;
        L = std::max(L * 0.9, 1e-3);
        if (change < opts.objectiveTol) {
            fit.converged = true;
            break;
        }
    }

    if (rescale) beta *= 1.0 + lambda2 / static_cast<double>(n);
    fit.coefficients = beta;
    fit.intercept = b;
    return fit;
}

double svmPrimalObjective(const DesignMatrix& X, const Eigen::VectorXi& labels,
                          double C, const Eigen::VectorXd& beta, double intercept) {
    const Eigen::Index n = X.rows();
    const Eigen::VectorXd score = (X.values * beta).array() + intercept;
    double hinge = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        hinge += std::max(0.0, 1.0 - labels[i] * score[i]);
    return 0.5 * beta.squaredNorm() + C * hinge;
}

namespace {

// Exact minimizer over the intercept of sum_i hinge(y_i (s_i + b)); the
// plateau midpoint when the minimizer is an interval.
double optimalIntercept(const Eigen::VectorXd& score, const Eigen::VectorXi& y) {
    const Eigen::Index n = score.size();
    std::vector<double> breakpoints;
    breakpoints.reserve(static_cast<std::size_t>(n));
    long positives = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (y[i] > 0) {
            breakpoints.push_back(1.0 - score[i]);
            ++positives;
        } else {
            breakpoints.push_back(-1.0 - score[i]);
        }
    }
    std::sort(breakpoints.begin(), breakpoints.end());
    long slope = -positives;
    for (std::size_t k = 0; k < breakpoints.size(); ++k) {
        slope += 1;
        if (slope >= 0) {
            if (k + 1 < breakpoints.size())
                return 0.5 * (breakpoints[k] + breakpoints[k + 1]);
            return breakpoints[k];
        }
    }
    return breakpoints.empty() ? 0.0 : breakpoints.back();
}

} // namespace

FitResult fitLinearSvm(const DesignMatrix& X, const Eigen::VectorXi& labels,
                       double C, const SvmOptions& opts) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (labels.size() != n) throw std::invalid_argument("fitLinearSvm: size mismatch");
    if (!(C > 0)) throw std::invalid_argument("fitLinearSvm: C must be positive");
    requireBinaryLabels(labels, -1, 1);

    // Row-major copy: SMO touches rows constantly.
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> Xr = X.values;

    // Dual variables in the y*alpha parameterization: box [lower_i, upper_i],
    // sum preserved by pairwise updates.
    Eigen::VectorXd dual = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd lower(n), upper(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        lower[i] = labels[i] > 0 ? 0.0 : -C;
        upper[i] = labels[i] > 0 ? C : 0.0;
    }

    Eigen::VectorXd wVec = Eigen::VectorXd::Zero(p);
    const Eigen::VectorXd yD = labels.cast<double>();
    Eigen::VectorXd grad = -yD;  // x_i' w - y_i at w = 0
    Eigen::VectorXd diag(n);
    for (Eigen::Index i = 0; i < n; ++i) diag[i] = Xr.row(i).squaredNorm();

    const long maxUpdates =
        opts.maxPairUpdates > 0 ? opts.maxPairUpdates : 80 * static_cast<long>(n) + 20000;
    const long checkEvery = std::max<long>(64, std::min<long>(n, 512));

    FitResult fit;
    fit.converged = false;
    long updates = 0;
    double bestB = 0;

    auto gapCheck = [&]() {
        const Eigen::VectorXd score = Xr * wVec;
        bestB = optimalIntercept(score, labels);
        double hinge = 0;
        for (Eigen::Index i = 0; i < n; ++i)
            hinge += std::max(0.0, 1.0 - yD[i] * (score[i] + bestB));
        const double primal = 0.5 * wVec.squaredNorm() + C * hinge;
        const double dualValue = yD.dot(dual) - 0.5 * wVec.squaredNorm();
        fit.objectiveTrace.push_back(0.5 * wVec.squaredNorm() - yD.dot(dual));
        return (primal - dualValue) <= opts.relativeGapTol * std::max(1.0, std::abs(primal));
    };

    while (updates < maxUpdates) {
        // most violating ascent coordinate
        Eigen::Index i = -1;
        double m = -kInf;
        for (Eigen::Index t = 0; t < n; ++t) {
            if (dual[t] < upper[t] && -grad[t] > m) {
                m = -grad[t];
                i = t;
            }
        }
        if (i < 0) {
            gapCheck();
            fit.converged = true;  // every coordinate at its upper bound: dual optimum
            break;
        }

        // second-order partner selection
        Eigen::Index j = -1;
        double M = kInf;
        double bestScore = -kInf;
        for (Eigen::Index t = 0; t < n; ++t) {
            if (dual[t] <= lower[t]) continue;
            M = std::min(M, -grad[t]);
            const double diff = m + grad[t];  // m - (-grad_t)
            if (diff <= 0) continue;
            double a = diag[i] + diag[t] - 2.0 * Xr.row(i).dot(Xr.row(t));
            if (a < 1e-12) a = 1e-12;
            const double score = diff * diff / a;
            if (score > bestScore) {
                bestScore = score;
                j = t;
            }
        }
        if (j < 0 || m - M <= 1e-10) {
            gapCheck();
            fit.converged = true;  // pairwise KKT violation at machine tolerance
            break;
        }

        double a = diag[i] + diag[j] - 2.0 * Xr.row(i).dot(Xr.row(j));
        if (a < 1e-12) a = 1e-12;
        double delta = (grad[j] - grad[i]) / a;
        delta = std::min(delta, upper[i] - dual[i]);
        delta = std::min(delta, dual[j] - lower[j]);
        if (delta <= 0) {
            fit.converged = gapCheck();
            break;
        }
        dual[i] += delta;
        dual[j] -= delta;
        const Eigen::VectorXd dw = delta * (Xr.row(i) - Xr.row(j)).transpose();
        wVec += dw;
        grad += Xr * dw;
        ++updates;

        if (updates % checkEvery == 0 && gapCheck()) {
            fit.converged = true;
            break;
        }
        if (updates % (32 * n) == 0) grad = Xr * wVec - yD;  // drift control
    }

    if (fit.objectiveTrace.empty()) gapCheck();
    fit.coefficients = wVec;
    fit.intercept = bestB;
    fit.iterations = static_cast<int>(std::min<long>(updates, std::numeric_limits<int>::max()));
    return fit;
}

} // namespace cfs::numkit
