#include "cfs/frameworks/selector.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cfs/errors.hpp"
#include "cfs/numkit/elastic_net.hpp"
#include "cfs/numkit/solvers.hpp"

namespace cfs::frameworks {

namespace {

using Clock = std::chrono::steady_clock;

double elapsedSeconds(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<int> nonzeroIndices(const Eigen::VectorXd& coef) {
    std::vector<int> idx;
    for (int j = 0; j < coef.size(); ++j)
        if (std::abs(coef[j]) > kSelectionThreshold) idx.push_back(j);
    return idx;
}

Eigen::VectorXi plusMinusLabels(const Eigen::VectorXi& t) {
    Eigen::VectorXi y(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) y[i] = t[i] == 1 ? 1 : -1;
    return y;
}

void validateSelectorInput(const synthgen::Dataset& data) {
    if (data.rows() < 20) throw std::invalid_argument("selector: need n >= 20");
    int treated = 0;
    for (Eigen::Index i = 0; i < data.T.size(); ++i) {
        if (data.T[i] != 0 && data.T[i] != 1)
            throw std::invalid_argument("selector: treatment must be 0/1");
        treated += data.T[i];
    }
    if (treated == 0 || treated == data.T.size()) throw DataError("degenerate labels");
}

numkit::FitResult fitExposure(const numkit::DesignMatrix& X, const synthgen::Dataset& data,
                              const SelectorConfig& cfg) {
    if (cfg.exposureEstimator == ExposureEstimator::svm)
        return numkit::fitLinearSvm(X, plusMinusLabels(data.T), cfg.svmC);
    return numkit::fitLogistic(X, data.T, cfg.logisticRidge);
}

// 50-point (configurable) log-spaced lambda1 grid from the smallest
// all-zero lambda1 down by lambda1MinRatio.
std::vector<double> outcomeLambda1Grid(const numkit::DesignMatrix& X,
                                       const Eigen::VectorXd& y,
                                       const numkit::PenaltyWeights& w,
                                       const LambdaGrids& grids) {
    const Eigen::VectorXd colMeans = X.values.colwise().mean();
    const Eigen::MatrixXd Xc = X.values.rowwise() - colMeans.transpose();
    const Eigen::VectorXd yc = y.array() - y.mean();
    const double lmax = numkit::lambda1Max(Xc.transpose() * yc, w.w);
    return numkit::logSpacedGrid(lmax, grids.lambda1MinRatio, grids.lambda1Count);
}

// Weighted elastic-net outcome stage: CV-picked (lambda2, lambda1), then a
// full-data refit.
numkit::FitResult outcomeStage(const numkit::DesignMatrix& X, const Eigen::VectorXd& y,
                               const numkit::PenaltyWeights& w, const SelectorConfig& cfg,
                               const numkit::CvPlan& plan, bool rescale,
                               double* chosenL1, double* chosenL2) {
    const auto l1grid = outcomeLambda1Grid(X, y, w, cfg.lambdas);
    const auto cv = numkit::cvPath(X, y, cfg.lambdas.lambda2, l1grid, w, plan);
    *chosenL1 = cv.bestLambda1;
    *chosenL2 = cv.bestLambda2;
    return numkit::fitWeightedElasticNet(X, y, cv.bestLambda1, cv.bestLambda2, w, rescale);
}

bool allExcluded(const numkit::PenaltyWeights& w) {
    for (Eigen::Index j = 0; j < w.size(); ++j)
        if (!std::isinf(w.w[j])) return false;
    return true;
}

} // namespace

SelectorConfig SelectorConfig::named(const std::string& name) {
    SelectorConfig cfg;
    cfg.label = name;
    using K = smoothing::SmoothingKind;
    const auto spec = [](K kind, double gamma) { return smoothing::SmoothingSpec(kind, gamma); };

    if (name == "Enh-ELRT") {
        cfg.framework = FrameworkKind::threeStage;
        cfg.exposureEstimator = ExposureEstimator::logistic;
        cfg.smoothing = spec(K::tanh, 0.5);
    } else if (name == "Enh-ELRS") {
        cfg.framework = FrameworkKind::threeStage;
        cfg.exposureEstimator = ExposureEstimator::logistic;
        cfg.smoothing = spec(K::sigmoid, 1.0);
    } else if (name == "Enh-ESVMT") {
        cfg.framework = FrameworkKind::threeStage;
        cfg.exposureEstimator = ExposureEstimator::svm;
        cfg.smoothing = spec(K::tanh, 0.5);
    } else if (name == "Enh-ESVMS") {
        cfg.framework = FrameworkKind::threeStage;
        cfg.exposureEstimator = ExposureEstimator::svm;
        cfg.smoothing = spec(K::sigmoid, 1.0);
    } else if (name == "ELRS") {
        cfg.framework = FrameworkKind::twoStagePrelim;
        cfg.exposureEstimator = ExposureEstimator::logistic;
        cfg.smoothing = spec(K::sigmoid, 1.0);
    } else if (name == "ESVMS") {
        cfg.framework = FrameworkKind::twoStagePrelim;
        cfg.exposureEstimator = ExposureEstimator::svm;
        cfg.smoothing = spec(K::sigmoid, 1.0);
    } else if (name == "ELRT") {
        cfg.framework = FrameworkKind::twoStagePrelim;
        cfg.exposureEstimator = ExposureEstimator::logistic;
        cfg.smoothing = spec(K::tanh, 0.5);
    } else if (name == "ESVMT") {
        cfg.framework = FrameworkKind::twoStagePrelim;
        cfg.exposureEstimator = ExposureEstimator::svm;
        cfg.smoothing = spec(K::tanh, 0.5);
    } else if (name == "OAL") {
        cfg.framework = FrameworkKind::oal;
        cfg.exposureEstimator = ExposureEstimator::logistic;
        cfg.smoothing = spec(K::oalInverse, 1.0);
    } else if (name == "OAENet") {
        cfg.framework = FrameworkKind::oaenet;
        cfg.exposureEstimator = ExposureEstimator::logistic;
        cfg.smoothing = spec(K::oalInverse, 1.0);
    } else {
        throw std::invalid_argument("unknown model name: " + name);
    }
    return cfg;
}

std::vector<std::string> knownModelNames() {
    return {"Enh-ELRT", "Enh-ELRS", "Enh-ESVMT", "Enh-ESVMS",
            "ELRS", "ESVMS", "ELRT", "ESVMT", "OAL", "OAENet"};
}

SelectionResult runSelector(const synthgen::Dataset& data, const SelectorConfig& cfg) {
    switch (cfg.framework) {
        case FrameworkKind::threeStage: return runThreeStage(data, cfg);
        case FrameworkKind::twoStagePrelim: return runTwoStagePrelim(data, cfg);
        case FrameworkKind::oal: return runOal(data, cfg);
        case FrameworkKind::oaenet: return runOaenet(data, cfg);
    }
    throw std::invalid_argument("runSelector: unknown framework");
}

SelectionResult runThreeStage(const synthgen::Dataset& data, const SelectorConfig& cfg) {
    if (cfg.smoothing.kind != smoothing::SmoothingKind::sigmoid &&
        cfg.smoothing.kind != smoothing::SmoothingKind::tanh)
        throw std::invalid_argument("three-stage framework requires sigmoid or tanh smoothing");
    validateSelectorInput(data);
    const auto start = Clock::now();

    const auto X = numkit::standardize(data.X);
    const int n = static_cast<int>(X.rows());
    const auto p = X.cols();

    SelectionResult result;
    const auto exposure = fitExposure(X, data, cfg);
    result.stage1Coefficients = exposure.coefficients;

    const auto w = smoothing::applySmoothing(cfg.smoothing, exposure.coefficients);
    const auto plan = numkit::makeCvPlan(n, cfg.cvFolds, cfg.cvSeed);
    const auto stage2 = outcomeStage(X, data.Y, w, cfg, plan, /*rescale=*/false,
                                     &result.chosen.stage2Lambda1, &result.chosen.stage2Lambda2);
    result.stage2Coefficients = stage2.coefficients;

    const auto psi = smoothing::inversePowerWeights(stage2.coefficients, cfg.gamma2);
    if (allExcluded(psi)) {
        result.stage3Coefficients = Eigen::VectorXd::Zero(p);
    } else {
        const auto stage3 = outcomeStage(X, data.Y, psi, cfg, plan, /*rescale=*/true,
                                         &result.chosen.stage3Lambda1,
                                         &result.chosen.stage3Lambda2);
        result.stage3Coefficients = stage3.coefficients;
    }
    result.selected = nonzeroIndices(*result.stage3Coefficients);
    result.wallClockSeconds = elapsedSeconds(start);
    return result;
}

SelectionResult runTwoStagePrelim(const synthgen::Dataset& data, const SelectorConfig& cfg) {
    if (cfg.smoothing.kind != smoothing::SmoothingKind::sigmoid &&
        cfg.smoothing.kind != smoothing::SmoothingKind::tanh)
        throw std::invalid_argument("two-stage framework requires sigmoid or tanh smoothing");
    validateSelectorInput(data);
    const auto start = Clock::now();

    const auto X = numkit::standardize(data.X);
    const int n = static_cast<int>(X.rows());

    SelectionResult result;
    const auto exposure = fitExposure(X, data, cfg);
    result.stage1Coefficients = exposure.coefficients;

    const auto w = smoothing::applySmoothing(cfg.smoothing, exposure.coefficients);
    const auto plan = numkit::makeCvPlan(n, cfg.cvFolds, cfg.cvSeed);
    const auto outcome = outcomeStage(X, data.Y, w, cfg, plan, /*rescale=*/true,
                                      &result.chosen.stage2Lambda1, &result.chosen.stage2Lambda2);
    result.stage2Coefficients = outcome.coefficients;
    result.selected = nonzeroIndices(outcome.coefficients);
    result.wallClockSeconds = elapsedSeconds(start);
    return result;
}

namespace {

// Shared OAL / OAENet machinery: OLS outcome fit, then a wAMD-minimizing
// search over (gamma, lambda2, lambda1) for the penalized logistic exposure
// model. OAL is the lambda2 = {0} special case.
SelectionResult runOutcomeAdaptive(const synthgen::Dataset& data, const SelectorConfig& cfg,
                                   const std::vector<double>& lambda2Grid, bool rescale) {
    validateSelectorInput(data);
    const auto start = Clock::now();

    const auto X = numkit::standardize(data.X);
    SelectionResult result;

    const auto ols = numkit::fitOls(X, data.Y);
    result.stage1Coefficients = ols.coefficients;

    const Eigen::VectorXd t = data.T.cast<double>();
    const double tBar = t.mean();
    const Eigen::VectorXd gradAtZero = X.values.transpose() * (Eigen::VectorXd::Constant(X.rows(), tBar) - t);

    double bestWamd = std::numeric_limits<double>::infinity();
    bool haveBest = false;

    for (double gamma : cfg.oalGammaGrid) {
        const auto w = smoothing::inversePowerWeights(ols.coefficients, gamma);
        double lmax = 0;
        for (Eigen::Index j = 0; j < w.size(); ++j) {
            if (std::isinf(w.w[j]) || w.w[j] <= 0) continue;
            lmax = std::max(lmax, std::abs(gradAtZero[j]) / w.w[j]);
        }
        const auto lambdaGrid =
            numkit::logSpacedGrid(lmax, cfg.oalLambdaMinRatio, cfg.oalLambdaCount);

        for (double lambda2 : lambda2Grid) {
            numkit::FitResult warm;
            bool haveWarm = false;
            for (double lambda1 : lambdaGrid) {
                const auto fit = numkit::fitPenalizedLogistic(
                    X, data.T, lambda1, lambda2, w, rescale, {}, haveWarm ? &warm : nullptr);
                warm = fit;
                haveWarm = true;
                bool clipped = false;
                const double wamd = computeWamd(X, data.T, fit, ols.coefficients, &clipped);
                if (!haveBest || wamd < bestWamd) {
                    haveBest = true;
                    bestWamd = wamd;
                    result.stage2Coefficients = fit.coefficients;
                    result.chosen.oalGamma = gamma;
                    result.chosen.oalLambda1 = lambda1;
                    result.chosen.oalLambda2 = lambda2;
                    result.propensitiesClipped = clipped;
                }
            }
        }
    }

    result.selected = nonzeroIndices(result.stage2Coefficients);
    result.wallClockSeconds = elapsedSeconds(start);
    return result;
}

} // namespace

SelectionResult runOal(const synthgen::Dataset& data, const SelectorConfig& cfg) {
    return runOutcomeAdaptive(data, cfg, {0.0}, /*rescale=*/false);
}

SelectionResult runOaenet(const synthgen::Dataset& data, const SelectorConfig& cfg) {
    return runOutcomeAdaptive(data, cfg, cfg.lambdas.lambda2, /*rescale=*/true);
}

double computeWamd(const numkit::DesignMatrix& X, const Eigen::VectorXi& T,
                   const numkit::FitResult& exposureFit,
                   const Eigen::VectorXd& outcomeOlsCoefficients, bool* clipped) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (T.size() != n) throw std::invalid_argument("computeWamd: size mismatch");
    if (exposureFit.coefficients.size() != p || outcomeOlsCoefficients.size() != p)
        throw std::invalid_argument("computeWamd: coefficient size mismatch");

    const Eigen::VectorXd score =
        (X.values * exposureFit.coefficients).array() + exposureFit.intercept;
    bool anyClipped = false;
    Eigen::VectorXd unitWeight(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double pi = 1.0 / (1.0 + std::exp(-score[i]));
        if (pi < 0.01 || pi > 0.99) {
            pi = std::clamp(pi, 0.01, 0.99);
            anyClipped = true;
        }
        unitWeight[i] = T[i] == 1 ? 1.0 / pi : 1.0 / (1.0 - pi);
    }
    if (clipped) *clipped = anyClipped;

    double treatedWeight = 0, controlWeight = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        (T[i] == 1 ? treatedWeight : controlWeight) += unitWeight[i];
    if (treatedWeight <= 0 || controlWeight <= 0) throw DataError("degenerate labels");

    double wamd = 0;
    for (Eigen::Index j = 0; j < p; ++j) {
        if (outcomeOlsCoefficients[j] == 0) continue;
        double treatedMean = 0, controlMean = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double v = unitWeight[i] * X.values(i, j);
            (T[i] == 1 ? treatedMean : controlMean) += v;
        }
        treatedMean /= treatedWeight;
        controlMean /= controlWeight;
        wamd += std::abs(outcomeOlsCoefficients[j]) * std::abs(treatedMean - controlMean);
    }
    return wamd;
}

} // namespace cfs::frameworks
