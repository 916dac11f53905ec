#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "cfs/errors.hpp"
#include "cfs/frameworks/selector.hpp"
#include "cfs/numkit/random.hpp"
#include "cfs/numkit/solvers.hpp"
#include "cfs/synthgen/synthgen.hpp"

using namespace cfs;
using frameworks::SelectorConfig;

namespace {

bool contains(const std::vector<int>& v, int x) {
    return std::find(v.begin(), v.end(), x) != v.end();
}

double frequency(const std::vector<std::vector<int>>& runs, const std::vector<int>& covs) {
    double hits = 0;
    for (const auto& sel : runs)
        for (int j : covs)
            if (contains(sel, j)) hits += 1.0;
    return hits / (static_cast<double>(runs.size()) * covs.size());
}

} // namespace

TEST_CASE("the model registry covers every benchmark variant") {
    for (const auto& name : frameworks::knownModelNames()) {
        const auto cfg = SelectorConfig::named(name);
        CHECK(cfg.label == name);
    }
    CHECK_THROWS_AS(SelectorConfig::named("Enh-Bogus"), std::invalid_argument);
    CHECK(SelectorConfig::named("Enh-ELRT").smoothing.gamma == 0.5);
    CHECK(SelectorConfig::named("Enh-ELRS").smoothing.gamma == 1.0);
    CHECK(SelectorConfig::named("OAL").oalGammaGrid == std::vector<double>{1.05, 1.55, 2.05});
    // gamma grid respects gamma > 2*Gamma + 1 with Gamma in {0, 0.25, 0.5}
    const std::vector<double> Gammas{0.0, 0.25, 0.5};
    const auto grid = SelectorConfig::named("OAL").oalGammaGrid;
    for (std::size_t k = 0; k < grid.size(); ++k) CHECK(grid[k] > 2.0 * Gammas[k] + 1.0);
}

TEST_CASE("three-stage smoke run selects the confounders and outcome predictors") {
    const auto spec = synthgen::ScenarioSpec::scenario(1);
    for (int seed : {1, 2, 3}) {
        const auto data = synthgen::generate(spec, 1000, 0.0, static_cast<std::uint64_t>(seed));
        const auto res =
            frameworks::runThreeStage(data, SelectorConfig::named("Enh-ESVMS"));
        CHECK(res.selected == std::vector<int>{0, 1, 2, 3});
        CHECK(res.stage3Coefficients.has_value());
        CHECK(res.wallClockSeconds > 0);
    }
}

TEST_CASE("a stage-2 zero forces the stage-3 coefficient to exactly zero") {
    const auto spec = synthgen::ScenarioSpec::scenario(1);
    const auto cfg = SelectorConfig::named("Enh-ELRS");
    bool sawZero = false;
    for (int seed = 1; seed <= 3; ++seed) {
        const auto data = synthgen::generate(spec, 400, 0.0, static_cast<std::uint64_t>(seed));
        const auto res = frameworks::runThreeStage(data, cfg);
        for (int j = 0; j < 20; ++j) {
            if (res.stage2Coefficients[j] == 0.0) {
                sawZero = true;
                CHECK((*res.stage3Coefficients)[j] == 0.0);
                CHECK_FALSE(contains(res.selected, j));
            }
        }
    }
    CHECK(sawZero);
}

TEST_CASE("pure-noise outcomes produce empty selections in most seeds") {
    const auto spec = synthgen::ScenarioSpec::scenario(1, 10);
    const auto cfg = SelectorConfig::named("Enh-ELRS");
    int empty = 0;
    for (int seed = 1; seed <= 30; ++seed) {
        auto data = synthgen::generate(spec, 300, 0.0, static_cast<std::uint64_t>(seed));
        std::mt19937_64 engine(numkit::deriveSeed(static_cast<std::uint64_t>(seed), 99));
        std::normal_distribution<double> normal(0.0, 1.0);
        for (int i = 0; i < 300; ++i) data.Y[i] = normal(engine);
        const auto res = frameworks::runThreeStage(data, cfg);
        if (res.selected.empty()) ++empty;
    }
    CHECK(empty >= 24);  // >= 80% of 30
}

TEST_CASE("two-stage preliminary model is deterministic and tracks the three-stage") {
    const auto spec = synthgen::ScenarioSpec::scenario(1);
    const auto data = synthgen::generate(spec, 500, 0.0, 4);
    const auto cfg = SelectorConfig::named("ELRS");
    const auto a = frameworks::runTwoStagePrelim(data, cfg);
    const auto b = frameworks::runTwoStagePrelim(data, cfg);
    CHECK(a.selected == b.selected);
    CHECK((a.stage1Coefficients - b.stage1Coefficients).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.stage2Coefficients - b.stage2Coefficients).cwiseAbs().maxCoeff() == 0.0);
    CHECK_FALSE(a.stage3Coefficients.has_value());

    std::vector<std::vector<int>> prelim, enhanced;
    for (int seed = 1; seed <= 30; ++seed) {
        const auto d = synthgen::generate(spec, 1000, 0.0, static_cast<std::uint64_t>(seed));
        prelim.push_back(frameworks::runTwoStagePrelim(d, cfg).selected);
        enhanced.push_back(
            frameworks::runThreeStage(d, SelectorConfig::named("Enh-ELRS")).selected);
    }
    const double fPrelim = frequency(prelim, {0, 1, 2, 3});
    const double fEnhanced = frequency(enhanced, {0, 1, 2, 3});
    CHECK(std::abs(fPrelim - fEnhanced) <= 0.15);
}

TEST_CASE("tanh weights sit below sigmoid weights up to the numeric crossing point") {
    const auto spec = synthgen::ScenarioSpec::scenario(1);
    const auto data = synthgen::generate(spec, 500, 0.0, 5);
    const auto res = frameworks::runThreeStage(data, SelectorConfig::named("Enh-ELRS"));
    const Eigen::VectorXd beta = res.stage1Coefficients;

    // crossing of tanh(x)^0.5 and sigmoid(x)^1 located by bisection
    auto gap = [](double x) {
        return std::pow(std::tanh(x), 0.5) - 1.0 / (1.0 + std::exp(-x));
    };
    double lo = 1e-6, hi = 5.0;
    REQUIRE(gap(lo) < 0);
    REQUIRE(gap(hi) > 0);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (gap(mid) < 0 ? lo : hi) = mid;
    }
    const double crossing = 0.5 * (lo + hi);

    const auto wSig = smoothing::sigmoidWeights(beta, 1.0);
    const auto wTanh = smoothing::tanhWeights(beta, 0.5);
    int below = 0;
    for (int j = 0; j < beta.size(); ++j) {
        const double a = std::abs(beta[j]);
        if (a < crossing - 1e-9) {
            CHECK(wTanh.w[j] < wSig.w[j]);
            ++below;
        } else if (a > crossing + 1e-9) {
            CHECK(wTanh.w[j] > wSig.w[j]);
        }
    }
    CHECK(below > 0);  // the exposure fit leaves small coefficients to compare
}

TEST_CASE("OAL keeps the confounders in at least 80% of seeds") {
    const auto spec = synthgen::ScenarioSpec::scenario(1);
    const auto cfg = SelectorConfig::named("OAL");
    std::vector<std::vector<int>> runs;
    for (int seed = 1; seed <= 30; ++seed) {
        const auto data = synthgen::generate(spec, 1000, 0.0, static_cast<std::uint64_t>(seed));
        runs.push_back(frameworks::runOal(data, cfg).selected);
    }
    CHECK(frequency(runs, {0}) >= 0.8);
    CHECK(frequency(runs, {1}) >= 0.8);
}

TEST_CASE("computeWamd matches an independent direct implementation") {
    const auto spec = synthgen::ScenarioSpec::scenario(2);
    const auto data = synthgen::generate(spec, 300, 0.25, 6);
    const auto X = numkit::standardize(data.X);
    const auto ols = numkit::fitOls(X, data.Y);
    const auto exposure = numkit::fitLogistic(X, data.T, 1e-6);

    bool clipped = false;
    const double internal =
        frameworks::computeWamd(X, data.T, exposure, ols.coefficients, &clipped);

    // direct re-implementation
    double expected = 0;
    Eigen::VectorXd w(300);
    for (int i = 0; i < 300; ++i) {
        const double z = X.values.row(i).dot(exposure.coefficients) + exposure.intercept;
        double pi = 1.0 / (1.0 + std::exp(-z));
        pi = std::min(std::max(pi, 0.01), 0.99);
        w[i] = data.T[i] == 1 ? 1.0 / pi : 1.0 / (1.0 - pi);
    }
    for (int j = 0; j < 20; ++j) {
        double numT = 0, numC = 0, denT = 0, denC = 0;
        for (int i = 0; i < 300; ++i) {
            if (data.T[i] == 1) {
                numT += w[i] * X.values(i, j);
                denT += w[i];
            } else {
                numC += w[i] * X.values(i, j);
                denC += w[i];
            }
        }
        expected += std::abs(ols.coefficients[j]) * std::abs(numT / denT - numC / denC);
    }
    CHECK(internal == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("computeWamd hand-worked six-unit example") {
    Eigen::MatrixXd X(6, 2);
    X << 1, 0, 2, 1, 0, 2, -1, 1, 1, -1, 0, 0;
    Eigen::VectorXi T(6);
    T << 1, 1, 1, 0, 0, 0;
    numkit::FitResult exposure;
    exposure.coefficients = Eigen::Vector2d(0.5, -0.25);
    exposure.intercept = 0.1;
    Eigen::VectorXd theta(2);
    theta << 2.0, -1.0;
    bool clipped = true;
    const double wamd = frameworks::computeWamd(numkit::DesignMatrix::raw(X), T, exposure,
                                                theta, &clipped);
    CHECK(wamd == doctest::Approx(2.522246805974001).epsilon(1e-12));
    CHECK_FALSE(clipped);
}

TEST_CASE("computeWamd trivial zero cases") {
    // covariates identical across arms
    Eigen::MatrixXd X(4, 2);
    X << 1, 2, 3, 4, 1, 2, 3, 4;
    Eigen::VectorXi T(4);
    T << 1, 0, 1, 0;
    numkit::FitResult exposure;
    exposure.coefficients = Eigen::Vector2d::Zero();
    exposure.intercept = 0.0;
    Eigen::VectorXd theta = Eigen::Vector2d(1.0, 1.0);
    CHECK(frameworks::computeWamd(numkit::DesignMatrix::raw(X), T, exposure, theta) ==
          doctest::Approx(0.0));

    // zero outcome coefficients
    Eigen::MatrixXd X2 = Eigen::MatrixXd::Random(6, 2);
    Eigen::VectorXi T2(6);
    T2 << 1, 1, 1, 0, 0, 0;
    CHECK(frameworks::computeWamd(numkit::DesignMatrix::raw(X2), T2, exposure,
                                  Eigen::Vector2d::Zero()) == 0.0);
}

TEST_CASE("total shrinkage empties the OAL selection") {
    const auto spec = synthgen::ScenarioSpec::scenario(1, 10);
    const auto data = synthgen::generate(spec, 200, 0.0, 7);
    const auto X = numkit::standardize(data.X);
    const auto w = numkit::PenaltyWeights::uniform(10);
    const auto fit = numkit::fitPenalizedLogistic(X, data.T, 1e6, 0.0, w);
    CHECK(fit.coefficients.cwiseAbs().maxCoeff() == 0.0);

    auto cfg = SelectorConfig::named("OAL");
    cfg.oalLambdaCount = 1;  // grid collapses to lambda-max: everything shrunk away
    const auto res = frameworks::runOal(data, cfg);
    CHECK(res.selected.empty());
}

TEST_CASE("OAENet with a zero ridge grid reproduces OAL") {
    const auto spec = synthgen::ScenarioSpec::scenario(1);
    const auto data = synthgen::generate(spec, 400, 0.25, 8);
    auto cfg = SelectorConfig::named("OAENet");
    cfg.lambdas.lambda2 = {0.0};
    const auto oaenet = frameworks::runOaenet(data, cfg);
    const auto oal = frameworks::runOal(data, SelectorConfig::named("OAL"));
    CHECK(oaenet.chosen.oalGamma == oal.chosen.oalGamma);
    CHECK(oaenet.chosen.oalLambda1 == doctest::Approx(oal.chosen.oalLambda1).epsilon(1e-12));
    CHECK((oaenet.stage2Coefficients - oal.stage2Coefficients).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(oaenet.selected == oal.selected);
}

TEST_CASE("OAENet tolerates correlation at least as well as OAL") {
    const auto spec = synthgen::ScenarioSpec::scenario(1);
    std::vector<std::vector<int>> oalRuns, oaenetRuns;
    for (int seed = 1; seed <= 30; ++seed) {
        const auto data = synthgen::generate(spec, 1000, 0.75, static_cast<std::uint64_t>(seed));
        oalRuns.push_back(frameworks::runOal(data, SelectorConfig::named("OAL")).selected);
        oaenetRuns.push_back(
            frameworks::runOaenet(data, SelectorConfig::named("OAENet")).selected);
    }
    const double fOal = frequency(oalRuns, {0, 1, 2, 3});
    const double fOaenet = frequency(oaenetRuns, {0, 1, 2, 3});
    CHECK(fOaenet >= fOal - 0.1);
}

TEST_CASE("OAENet is deterministic under a fixed seed") {
    const auto spec = synthgen::ScenarioSpec::scenario(1);
    const auto data = synthgen::generate(spec, 300, 0.5, 9);
    const auto cfg = SelectorConfig::named("OAENet");
    const auto a = frameworks::runOaenet(data, cfg);
    const auto b = frameworks::runOaenet(data, cfg);
    CHECK(a.selected == b.selected);
    CHECK((a.stage2Coefficients - b.stage2Coefficients).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("selector input validation") {
    const auto spec = synthgen::ScenarioSpec::scenario(1, 8);
    auto data = synthgen::generate(spec, 60, 0.0, 10);
    auto cfg = SelectorConfig::named("Enh-ELRS");
    cfg.smoothing = smoothing::SmoothingSpec(smoothing::SmoothingKind::inversePower, 1.0);
    CHECK_THROWS_AS(frameworks::runThreeStage(data, cfg), std::invalid_argument);

    data.T.setOnes();
    CHECK_THROWS_AS(frameworks::runThreeStage(data, SelectorConfig::named("Enh-ELRS")),
                    DataError);
}
