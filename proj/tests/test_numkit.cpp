#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "cfs/errors.hpp"
#include "cfs/numkit/cv.hpp"
#include "cfs/numkit/design_matrix.hpp"
#include "cfs/numkit/elastic_net.hpp"
#include "cfs/numkit/random.hpp"
#include "cfs/numkit/solvers.hpp"
#include "support/oracles.hpp"

using namespace cfs;
using numkit::DesignMatrix;
using numkit::PenaltyWeights;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd randn(std::mt19937_64& engine, int n, double sd = 1.0) {
    std::normal_distribution<double> normal(0.0, sd);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = normal(engine);
    return v;
}

} // namespace

TEST_CASE("standardize maps [1,2,3] to the symmetric unit-variance column") {
    Eigen::MatrixXd raw(3, 1);
    raw << 1, 2, 3;
    const auto d = numkit::standardize(raw);
    CHECK(d.standardized);
    CHECK(d.columnMeans[0] == doctest::Approx(2.0));
    CHECK(d.columnStds[0] == doctest::Approx(1.0));
    CHECK(d.values(0, 0) == doctest::Approx(-1.0));
    CHECK(d.values(1, 0) == doctest::Approx(0.0));
    CHECK(d.values(2, 0) == doctest::Approx(1.0));
}

TEST_CASE("standardize leaves an already standardized column unchanged") {
    Eigen::MatrixXd raw(3, 1);
    raw << -1, 0, 1;  // mean 0, sample sd 1
    const auto d = numkit::standardize(raw);
    CHECK((d.values - raw).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("standardize flags constant columns and zeroes them") {
    Eigen::MatrixXd raw(3, 2);
    raw << 5, 1, 5, 2, 5, 3;
    const auto d = numkit::standardize(raw);
    CHECK(d.constantColumns[0]);
    CHECK_FALSE(d.constantColumns[1]);
    CHECK(d.columnStds[0] == 1.0);
    CHECK(d.values.col(0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("standardize rejects an all-constant matrix") {
    Eigen::MatrixXd raw = Eigen::MatrixXd::Constant(4, 2, 3.0);
    CHECK_THROWS_AS(numkit::standardize(raw), DataError);
}

TEST_CASE("standardize invariants on random data") {
    const auto raw = numkit::sampleEquicorrelatedGaussian(200, 8, 0.4, 5);
    const auto d = numkit::standardize(raw * 3.7);
    for (int j = 0; j < 8; ++j) {
        CHECK(std::abs(d.values.col(j).mean()) <= 1e-10);
        const double sd = std::sqrt(d.values.col(j).squaredNorm() / 199.0);
        CHECK(sd == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("fitOls recovers an exact linear relationship") {
    std::mt19937_64 engine(1);
    Eigen::MatrixXd X(30, 4);
    for (int j = 0; j < 4; ++j) X.col(j) = randn(engine, 30);
    const Eigen::VectorXd y = 2.0 * X.col(0);
    const auto fit = numkit::fitOls(DesignMatrix::raw(X), y);
    CHECK(fit.coefficients[0] == doctest::Approx(2.0).epsilon(1e-8));
    for (int j = 1; j < 4; ++j) CHECK(std::abs(fit.coefficients[j]) <= 1e-8);
    CHECK(std::abs(fit.intercept) <= 1e-8);
}

TEST_CASE("fitOls on outcome orthogonal to the design gives zero slopes") {
    std::mt19937_64 engine(2);
    Eigen::MatrixXd X(40, 3);
    for (int j = 0; j < 3; ++j) X.col(j) = randn(engine, 40);
    // project random noise onto the orthogonal complement of (1, X)
    Eigen::MatrixXd Z(40, 4);
    Z.col(0).setOnes();
    Z.rightCols(3) = X;
    const Eigen::VectorXd noise = randn(engine, 40);
    const Eigen::VectorXd y =
        noise - Z * (Z.transpose() * Z).ldlt().solve(Z.transpose() * noise);
    const auto fit = numkit::fitOls(DesignMatrix::raw(X), y);
    CHECK(fit.coefficients.cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("fitOls matches the normal-equation oracle on a random system") {
    std::mt19937_64 engine(3);
    Eigen::MatrixXd X(50, 3);
    for (int j = 0; j < 3; ++j) X.col(j) = randn(engine, 50);
    const Eigen::VectorXd y = X * Eigen::Vector3d(1.5, -0.7, 0.2) + randn(engine, 50);
    const auto fit = numkit::fitOls(DesignMatrix::raw(X), y);
    const Eigen::VectorXd expected = oracles::normalEquationOls(X, y);
    CHECK(fit.intercept == doctest::Approx(expected[0]).epsilon(1e-8));
    for (int j = 0; j < 3; ++j)
        CHECK(fit.coefficients[j] == doctest::Approx(expected[j + 1]).epsilon(1e-8));

    // residual orthogonality
    const Eigen::VectorXd resid =
        y - Eigen::VectorXd::Constant(50, fit.intercept) - X * fit.coefficients;
    for (int j = 0; j < 3; ++j) CHECK(std::abs(X.col(j).dot(resid)) <= 1e-8 * 50);
}

TEST_CASE("fitOls singular handling") {
    std::mt19937_64 engine(4);
    Eigen::MatrixXd X(30, 2);
    X.col(0) = randn(engine, 30);
    X.col(1) = 2.0 * X.col(0);  // exactly collinear
    const Eigen::VectorXd y = randn(engine, 30);
    CHECK_THROWS_AS(numkit::fitOls(DesignMatrix::raw(X), y, false), DataError);
    const auto fit = numkit::fitOls(DesignMatrix::raw(X), y, true);
    CHECK(fit.ridged);
    CHECK(fit.coefficients.allFinite());
}

TEST_CASE("fitLogistic: null labels give slopes within 3 standard errors of zero") {
    const auto X = numkit::standardize(numkit::sampleEquicorrelatedGaussian(300, 3, 0.0, 6));
    std::mt19937_64 engine(7);
    std::bernoulli_distribution coin(0.5);
    Eigen::VectorXi t(300);
    for (int i = 0; i < 300; ++i) t[i] = coin(engine) ? 1 : 0;
    const auto fit = numkit::fitLogistic(X, t, 1e-8);
    CHECK(fit.converged);

    // Wald standard errors from the Fisher information at the fit
    Eigen::MatrixXd Z(300, 4);
    Z.col(0).setOnes();
    Z.rightCols(3) = X.values;
    Eigen::VectorXd eta = (X.values * fit.coefficients).array() + fit.intercept;
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(4, 4);
    for (int i = 0; i < 300; ++i) {
        const double pr = 1.0 / (1.0 + std::exp(-eta[i]));
        info += pr * (1 - pr) * Z.row(i).transpose() * Z.row(i);
    }
    const Eigen::MatrixXd cov = info.ldlt().solve(Eigen::MatrixXd::Identity(4, 4));
    for (int j = 0; j < 3; ++j)
        CHECK(std::abs(fit.coefficients[j]) <= 3.0 * std::sqrt(cov(j + 1, j + 1)));
}

TEST_CASE("fitLogistic: ridge keeps separable data finite and converged") {
    Eigen::MatrixXd raw(20, 1);
    Eigen::VectorXi t(20);
    for (int i = 0; i < 20; ++i) {
        raw(i, 0) = i < 10 ? -2.0 - 0.1 * i : 2.0 + 0.1 * i;
        t[i] = i < 10 ? 0 : 1;
    }
    const auto fit = numkit::fitLogistic(DesignMatrix::raw(raw), t, 0.5);
    CHECK(fit.converged);
    CHECK(fit.coefficients.allFinite());
    CHECK(std::abs(fit.coefficients[0]) < 50.0);
}

TEST_CASE("fitLogistic matches nested golden-section search on one covariate") {
    std::mt19937_64 engine(8);
    Eigen::MatrixXd raw(80, 1);
    raw.col(0) = randn(engine, 80);
    Eigen::VectorXi t(80);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 80; ++i) {
        const double p = 1.0 / (1.0 + std::exp(-(0.8 * raw(i, 0) - 0.2)));
        t[i] = u(engine) < p ? 1 : 0;
    }
    const double ridge = 0.01;
    const auto fit = numkit::fitLogistic(DesignMatrix::raw(raw), t, ridge);
    const auto [slope, intercept] = oracles::logisticTwoParameterGolden(raw.col(0), t, ridge);
    CHECK(fit.coefficients[0] == doctest::Approx(slope).epsilon(1e-5));
    CHECK(fit.intercept == doctest::Approx(intercept).epsilon(1e-5));
}

TEST_CASE("fitLogistic rejects single-class labels") {
    const auto X = numkit::standardize(numkit::sampleEquicorrelatedGaussian(30, 2, 0.0, 9));
    Eigen::VectorXi t = Eigen::VectorXi::Ones(30);
    CHECK_THROWS_AS(numkit::fitLogistic(X, t, 0.0), DataError);
}

TEST_CASE("fitLinearSvm places the boundary at the midpoint of two points") {
    Eigen::MatrixXd raw(2, 1);
    raw << 3.0, 11.0;
    Eigen::VectorXi y(2);
    y << -1, 1;
    const auto fit = numkit::fitLinearSvm(DesignMatrix::raw(raw), y, 1.0);
    CHECK(fit.converged);
    const double boundary = -fit.intercept / fit.coefficients[0];
    CHECK(boundary == doctest::Approx(7.0).epsilon(1e-4));
}

TEST_CASE("fitLinearSvm objective matches a long subgradient run on 20x3") {
    std::mt19937_64 engine(10);
    Eigen::MatrixXd X(20, 3);
    for (int j = 0; j < 3; ++j) X.col(j) = randn(engine, 20);
    Eigen::VectorXi y(20);
    for (int i = 0; i < 20; ++i)
        y[i] = (X(i, 0) + 0.3 * X(i, 1) + 0.4 * randn(engine, 1)[0]) > 0 ? 1 : -1;
    if ((y.array() == 1).count() == 0) y[0] = 1;
    if ((y.array() == -1).count() == 0) y[0] = -1;

    const double C = 1.0;
    const auto fit = numkit::fitLinearSvm(DesignMatrix::raw(X), y, C);
    const double mine =
        numkit::svmPrimalObjective(DesignMatrix::raw(X), y, C, fit.coefficients, fit.intercept);
    const double oracle = oracles::svmSubgradientBestObjective(X, y, C, 300000);
    CHECK(std::abs(mine - oracle) / std::abs(oracle) <= 1e-4);
    CHECK(mine <= oracle + 1e-9);  // certified solution can only be better
}

TEST_CASE("fitLinearSvm predictions are invariant under consistent rescaling") {
    std::mt19937_64 engine(11);
    Eigen::MatrixXd X(40, 2);
    for (int j = 0; j < 2; ++j) X.col(j) = randn(engine, 40);
    Eigen::VectorXi y(40);
    for (int i = 0; i < 40; ++i) y[i] = (X(i, 0) - X(i, 1) + randn(engine, 1)[0]) > 0 ? 1 : -1;
    if ((y.array() == 1).count() == 0) y[0] = 1;
    if ((y.array() == -1).count() == 0) y[0] = -1;

    const auto base = numkit::fitLinearSvm(DesignMatrix::raw(X), y, 1.0);
    const auto scaled = numkit::fitLinearSvm(DesignMatrix::raw(10.0 * X), y, 1.0 / 100.0);
    for (int i = 0; i < 40; ++i) {
        const double a = X.row(i).dot(base.coefficients) + base.intercept;
        const double b = 10.0 * X.row(i).dot(scaled.coefficients) + scaled.intercept;
        CHECK((a > 0) == (b > 0));
    }
}

TEST_CASE("fitLinearSvm rejects bad inputs") {
    Eigen::MatrixXd raw = Eigen::MatrixXd::Random(10, 2);
    Eigen::VectorXi ones = Eigen::VectorXi::Ones(10);
    CHECK_THROWS_AS(numkit::fitLinearSvm(DesignMatrix::raw(raw), ones, 1.0), DataError);
    Eigen::VectorXi y = ones;
    y[0] = -1;
    CHECK_THROWS_AS(numkit::fitLinearSvm(DesignMatrix::raw(raw), y, 0.0), std::invalid_argument);
}

TEST_CASE("weighted elastic net reduces to OLS at zero regularization") {
    std::mt19937_64 engine(12);
    const auto X = numkit::standardize(numkit::sampleEquicorrelatedGaussian(60, 5, 0.3, 13));
    const Eigen::VectorXd y = X.values * randn(engine, 5) + randn(engine, 60);
    const auto ols = numkit::fitOls(X, y);
    const auto en =
        numkit::fitWeightedElasticNet(X, y, 0.0, 0.0, PenaltyWeights::uniform(5));
    CHECK((ols.coefficients - en.coefficients).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(ols.intercept == doctest::Approx(en.intercept).epsilon(1e-8));
}

TEST_CASE("weighted elastic net matches the univariate soft-threshold closed form") {
    std::mt19937_64 engine(14);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 30 + rep;
        Eigen::MatrixXd raw(n, 1);
        raw.col(0) = randn(engine, n);
        const Eigen::VectorXd y = 0.9 * raw.col(0) + randn(engine, n);
        const double l1 = 0.5 + 0.3 * rep;
        const double l2 = (rep % 3) * 0.4;
        const double wj = 0.5 + 0.1 * (rep % 5);
        Eigen::VectorXd w(1);
        w << wj;

        const auto fit =
            numkit::fitWeightedElasticNet(DesignMatrix::raw(raw), y, l1, l2, PenaltyWeights{w});

        const Eigen::VectorXd xc = raw.col(0).array() - raw.col(0).mean();
        const Eigen::VectorXd yc = y.array() - y.mean();
        const double rho = xc.dot(yc);
        const double thr = 0.5 * l1 * wj;
        const double expected =
            std::copysign(std::max(std::abs(rho) - thr, 0.0), rho) / (xc.squaredNorm() + l2);
        CHECK(fit.coefficients[0] == doctest::Approx(expected).epsilon(1e-8));
    }
}

TEST_CASE("weighted elastic net beats a refined p=2 grid search to 1e-6") {
    std::mt19937_64 engine(15);
    for (int rep = 0; rep < 20; ++rep) {
        Eigen::MatrixXd raw(30, 2);
        raw.col(0) = randn(engine, 30);
        raw.col(1) = 0.6 * raw.col(0) + 0.8 * randn(engine, 30);
        const Eigen::VectorXd y =
            1.2 * raw.col(0) - 0.4 * raw.col(1) + randn(engine, 30);
        Eigen::VectorXd w(2);
        w << 0.7 + 0.1 * (rep % 3), 1.3;
        const double l1 = 1.0 + rep;
        const double l2 = (rep % 2) ? 0.8 : 0.0;

        const auto fit =
            numkit::fitWeightedElasticNet(DesignMatrix::raw(raw), y, l1, l2, PenaltyWeights{w});

        Eigen::MatrixXd Xc = raw;
        for (int j = 0; j < 2; ++j) Xc.col(j).array() -= raw.col(j).mean();
        const Eigen::VectorXd yc = y.array() - y.mean();
        const double mine = oracles::elasticNetObjective(Xc, yc, l1, l2, w, fit.coefficients);
        const double gridBest = oracles::elasticNetGridSearch(Xc, yc, l1, l2, w);
        CHECK(mine <= gridBest + 1e-6);
        CHECK(std::abs(mine - gridBest) <= 1e-6 * std::max(1.0, std::abs(gridBest)));
    }
}

TEST_CASE("weighted elastic net honors infinite weights and rejects bad lambdas") {
    std::mt19937_64 engine(16);
    const auto X = numkit::standardize(numkit::sampleEquicorrelatedGaussian(50, 4, 0.2, 17));
    const Eigen::VectorXd y = X.values * Eigen::Vector4d(2, 2, 2, 2) + randn(engine, 50);
    Eigen::VectorXd w = Eigen::VectorXd::Ones(4);
    w[2] = kInf;
    const auto fit = numkit::fitWeightedElasticNet(X, y, 0.1, 0.0, PenaltyWeights{w});
    CHECK(fit.coefficients[2] == 0.0);
    CHECK(std::abs(fit.coefficients[0]) > 0.1);
    CHECK_THROWS_AS(
        numkit::fitWeightedElasticNet(X, y, -1.0, 0.0, PenaltyWeights::uniform(4)),
        std::invalid_argument);
    CHECK_THROWS_AS(
        numkit::fitWeightedElasticNet(X, y, 0.0, -0.5, PenaltyWeights::uniform(4)),
        std::invalid_argument);
}

TEST_CASE("weighted elastic net rescale applies the (1 + lambda2/n) factor") {
    std::mt19937_64 engine(18);
    const auto X = numkit::standardize(numkit::sampleEquicorrelatedGaussian(40, 3, 0.0, 19));
    const Eigen::VectorXd y = X.values * Eigen::Vector3d(1, -1, 0.5) + randn(engine, 40);
    const double l2 = 2.0;
    const auto rawFit =
        numkit::fitWeightedElasticNet(X, y, 0.3, l2, PenaltyWeights::uniform(3), false);
    const auto rescaled =
        numkit::fitWeightedElasticNet(X, y, 0.3, l2, PenaltyWeights::uniform(3), true);
    const double factor = 1.0 + l2 / 40.0;
    CHECK((rescaled.coefficients - factor * rawFit.coefficients).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("cvPath returns the single grid point when there is no choice") {
    std::mt19937_64 engine(20);
    const auto X = numkit::standardize(numkit::sampleEquicorrelatedGaussian(50, 3, 0.0, 21));
    const Eigen::VectorXd y = X.values * Eigen::Vector3d(1, 0, 0) + randn(engine, 50);
    const auto plan = numkit::makeCvPlan(50, 5, 1);
    const auto res = numkit::cvPath(X, y, {0.25}, {0.7}, PenaltyWeights::uniform(3), plan);
    CHECK(res.bestLambda2 == 0.25);
    CHECK(res.bestLambda1 == 0.7);
    CHECK(res.table.size() == 1);
}

TEST_CASE("cvPath picks the largest lambda1 under pure noise in most seeds") {
    int hits = 0;
    for (int seed = 1; seed <= 50; ++seed) {
        std::mt19937_64 engine(static_cast<std::uint64_t>(seed) * 977);
        const auto X = numkit::standardize(
            numkit::sampleEquicorrelatedGaussian(60, 5, 0.0, static_cast<std::uint64_t>(seed)));
        const Eigen::VectorXd y = randn(engine, 60);
        const auto plan = numkit::makeCvPlan(60, 10, static_cast<std::uint64_t>(seed));

        Eigen::VectorXd colMeans = X.values.colwise().mean();
        Eigen::MatrixXd Xc = X.values.rowwise() - colMeans.transpose();
        Eigen::VectorXd yc = y.array() - y.mean();
        const auto w = PenaltyWeights::uniform(5);
        const auto grid =
            numkit::logSpacedGrid(numkit::lambda1Max(Xc.transpose() * yc, w.w), 1e-3, 25);
        const auto res = numkit::cvPath(X, y, {0.0, 0.1}, grid, w, plan);
        if (res.bestLambda1 == grid.front()) ++hits;
    }
    CHECK(hits >= 45);  // >= 90% of 50 seeds
}

TEST_CASE("cvPath mean errors equal independently recomputed per-fold MSE") {
    std::mt19937_64 engine(22);
    const auto X = numkit::standardize(numkit::sampleEquicorrelatedGaussian(60, 4, 0.25, 23));
    const Eigen::VectorXd y = X.values * Eigen::Vector4d(1.5, -1, 0, 0) + randn(engine, 60);
    const auto w = PenaltyWeights::uniform(4);
    const auto plan = numkit::makeCvPlan(60, 6, 9);
    const std::vector<double> l2grid{0.0, 0.5};
    const std::vector<double> l1grid{4.0, 1.0, 0.1};
    const auto res = numkit::cvPath(X, y, l2grid, l1grid, w, plan);

    for (const auto& point : res.table) {
        double total = 0;
        for (int fold = 0; fold < plan.folds; ++fold) {
            std::vector<int> train, hold;
            for (int i = 0; i < 60; ++i)
                (plan.foldAssignment[static_cast<std::size_t>(i)] == fold ? hold : train)
                    .push_back(i);
            Eigen::MatrixXd Xt(train.size(), 4);
            Eigen::VectorXd yt(train.size());
            for (std::size_t r = 0; r < train.size(); ++r) {
                Xt.row(static_cast<Eigen::Index>(r)) = X.values.row(train[r]);
                yt[static_cast<Eigen::Index>(r)] = y[train[r]];
            }
            const auto fit = numkit::fitWeightedElasticNet(
                DesignMatrix::raw(Xt), yt, point.lambda1, point.lambda2, w);
            double sse = 0;
            for (int idx : hold) {
                const double pred = fit.intercept + X.values.row(idx).dot(fit.coefficients);
                sse += (y[idx] - pred) * (y[idx] - pred);
            }
            total += sse / static_cast<double>(hold.size());
        }
        CHECK(point.meanError ==
              doctest::Approx(total / plan.folds).epsilon(1e-8));
    }
}

TEST_CASE("cvPath rejects zero-variance outcomes") {
    const auto X = numkit::standardize(numkit::sampleEquicorrelatedGaussian(40, 3, 0.0, 25));
    const Eigen::VectorXd y = Eigen::VectorXd::Constant(40, 2.5);
    const auto plan = numkit::makeCvPlan(40, 5, 2);
    CHECK_THROWS_AS(numkit::cvPath(X, y, {0.0}, {0.1}, PenaltyWeights::uniform(3), plan),
                    DataError);
}

TEST_CASE("makeCvPlan is reproducible and balanced") {
    const auto a = numkit::makeCvPlan(103, 10, 77);
    const auto b = numkit::makeCvPlan(103, 10, 77);
    CHECK(a.foldAssignment == b.foldAssignment);
    std::vector<int> counts(10, 0);
    for (int f : a.foldAssignment) counts[static_cast<std::size_t>(f)]++;
    for (int c : counts) CHECK(c >= 10);
}

TEST_CASE("sampleEquicorrelatedGaussian: independence, target correlation, determinism") {
    const int n = 10000;
    const auto indep = numkit::sampleEquicorrelatedGaussian(n, 4, 0.0, 31);
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) {
            const Eigen::VectorXd xa = indep.col(a).array() - indep.col(a).mean();
            const Eigen::VectorXd xb = indep.col(b).array() - indep.col(b).mean();
            const double corr = xa.dot(xb) / std::sqrt(xa.squaredNorm() * xb.squaredNorm());
            CHECK(std::abs(corr) <= 3.0 / std::sqrt(static_cast<double>(n)));
        }

    const auto corr75 = numkit::sampleEquicorrelatedGaussian(n, 5, 0.75, 32);
    double sum = 0;
    int pairs = 0;
    for (int a = 0; a < 5; ++a)
        for (int b = a + 1; b < 5; ++b) {
            const Eigen::VectorXd xa = corr75.col(a).array() - corr75.col(a).mean();
            const Eigen::VectorXd xb = corr75.col(b).array() - corr75.col(b).mean();
            sum += xa.dot(xb) / std::sqrt(xa.squaredNorm() * xb.squaredNorm());
            ++pairs;
        }
    CHECK(sum / pairs == doctest::Approx(0.75).epsilon(0.03));

    const auto d1 = numkit::sampleEquicorrelatedGaussian(100, 3, 0.5, 33);
    const auto d2 = numkit::sampleEquicorrelatedGaussian(100, 3, 0.5, 33);
    CHECK((d1 - d2).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(numkit::sampleEquicorrelatedGaussian(10, 2, -0.1, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(numkit::sampleEquicorrelatedGaussian(10, 2, 1.0, 1),
                    std::invalid_argument);
}
