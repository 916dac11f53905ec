#include "cfs/bench/selftest.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <vector>

#include <unistd.h>

#include "cfs/bench/bootstrap.hpp"
#include "cfs/bench/grid.hpp"
#include "cfs/bench/records.hpp"
#include "cfs/causal/att.hpp"
#include "cfs/causal/matching.hpp"
#include "cfs/frameworks/selector.hpp"
#include "cfs/numkit/cv.hpp"
#include "cfs/numkit/elastic_net.hpp"
#include "cfs/numkit/random.hpp"
#include "cfs/numkit/solvers.hpp"
#include "cfs/smoothing/smoothing.hpp"
#include "cfs/synthgen/synthgen.hpp"

namespace cfs::bench {

namespace {

using numkit::DesignMatrix;
using numkit::PenaltyWeights;

struct CheckFailure {
    std::string message;
};

void require(bool ok, const std::string& message) {
    if (!ok) throw CheckFailure{message};
}

void parallelFor(int count, int workers, const std::function<void(int)>& body) {
    if (workers <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::string firstError;
    std::mutex errorMutex;
    auto run = [&]() {
        while (!failed.load()) {
            const int i = next.fetch_add(1);
            if (i >= count) break;
            try {
                body(i);
            } catch (const CheckFailure& f) {
                std::lock_guard<std::mutex> lock(errorMutex);
                if (!failed.exchange(true)) firstError = f.message;
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(errorMutex);
                if (!failed.exchange(true)) firstError = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < std::min(workers, count); ++w) pool.emplace_back(run);
    for (auto& th : pool) th.join();
    if (failed.load()) throw CheckFailure{firstError};
}

// Shared cache of Scenario-1 rho=0 selector runs used by the empirical
// framework invariants.
struct SelectionCache {
    // (model, n) -> per-seed selected sets (0-based)
    std::map<std::pair<std::string, int>, std::vector<std::vector<int>>> runs;

    const std::vector<std::vector<int>>& get(const std::string& model, int n, int seeds,
                                             int workers) {
        const auto key = std::make_pair(model, n);
        auto it = runs.find(key);
        if (it != runs.end()) return it->second;
        std::vector<std::vector<int>> out(static_cast<std::size_t>(seeds));
        const auto spec = synthgen::ScenarioSpec::scenario(1);
        const auto cfg = frameworks::SelectorConfig::named(model);
        parallelFor(seeds, workers, [&](int i) {
            const auto data = synthgen::generate(spec, n, 0.0,
                                                 static_cast<std::uint64_t>(i + 1));
            out[static_cast<std::size_t>(i)] = frameworks::runSelector(data, cfg).selected;
        });
        it = runs.emplace(key, std::move(out)).first;
        return it->second;
    }
};

double selectionFrequency(const std::vector<std::vector<int>>& runs,
                          const std::vector<int>& covariates) {
    double hits = 0;
    for (const auto& sel : runs)
        for (int j : covariates)
            if (std::find(sel.begin(), sel.end(), j) != sel.end()) hits += 1.0;
    return hits / (static_cast<double>(runs.size()) * covariates.size());
}

double exactRecoveryRate(const std::vector<std::vector<int>>& runs,
                         const std::vector<int>& target) {
    double hits = 0;
    for (const auto& sel : runs)
        if (sel == target) hits += 1.0;
    return hits / static_cast<double>(runs.size());
}

Eigen::VectorXd randomVector(std::mt19937_64& engine, int n, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = normal(engine);
    return v;
}

// ---------------------------------------------------------------- numkit ---

void checkElasticNetKkt() {
    std::mt19937_64 engine(7);
    for (int rep = 0; rep < 12; ++rep) {
        const int n = 40 + 10 * (rep % 3);
        const int p = 8;
        const auto X = numkit::standardize(
            numkit::sampleEquicorrelatedGaussian(n, p, 0.25 * (rep % 4), 100 + rep));
        Eigen::VectorXd y = X.values * randomVector(engine, p) + randomVector(engine, n);

        Eigen::VectorXd w = Eigen::VectorXd::Ones(p);
        for (int j = 0; j < p; ++j) w[j] = 0.25 + std::abs(randomVector(engine, 1)[0]);
        if (rep % 3 == 0) w[rep % p] = std::numeric_limits<double>::infinity();
        const double l1 = (rep % 2 == 0) ? 2.5 : 0.4;
        const double l2 = (rep % 4 == 0) ? 0.0 : 0.3;

        const auto fit = numkit::fitWeightedElasticNet(X, y, l1, l2, PenaltyWeights{w});
        Eigen::VectorXd colMeans = X.values.colwise().mean();
        Eigen::MatrixXd Xc = X.values.rowwise() - colMeans.transpose();
        Eigen::VectorXd yc = y.array() - y.mean();
        const double residual = numkit::elasticNetKktResidual(
            Xc.transpose() * Xc, Xc.transpose() * yc, l1, l2, w, fit.coefficients);
        require(residual <= 1e-6,
                "KKT residual " + formatDouble(residual) + " above 1e-6 (rep " +
                    std::to_string(rep) + ")");
        for (int j = 0; j < p; ++j)
            if (std::isinf(w[j]))
                require(fit.coefficients[j] == 0.0, "infinite-weight coefficient not zero");
    }
}

void checkPathMonotone() {
    const int n = 80, p = 10;
    const auto X = numkit::standardize(numkit::sampleEquicorrelatedGaussian(n, p, 0.3, 11));
    std::mt19937_64 engine(12);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    beta.head(4) << 2.0, -1.5, 1.0, 0.5;
    const Eigen::VectorXd y = X.values * beta + randomVector(engine, n);
    const auto w = PenaltyWeights::uniform(p);

    Eigen::VectorXd colMeans = X.values.colwise().mean();
    Eigen::MatrixXd Xc = X.values.rowwise() - colMeans.transpose();
    Eigen::VectorXd yc = y.array() - y.mean();
    const Eigen::MatrixXd gram = Xc.transpose() * Xc;
    const Eigen::VectorXd xty = Xc.transpose() * yc;

    const auto grid = numkit::logSpacedGrid(numkit::lambda1Max(xty, w.w), 1e-3, 40);
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
    int previous = 0;  // count at the largest lambda1
    for (double l1 : grid) {  // descending
        numkit::elasticNetCoordinateDescent(gram, xty, l1, 0.1, w.w, theta);
        int nonzeros = 0;
        for (int j = 0; j < p; ++j)
            if (theta[j] != 0) ++nonzeros;
        require(nonzeros >= previous,
                "support shrank while lambda1 decreased (" + std::to_string(previous) + " -> " +
                    std::to_string(nonzeros) + ")");
        previous = nonzeros;
    }
}

void checkOlsReduction() {
    std::mt19937_64 engine(21);
    const int n = 60, p = 6;
    const auto X = numkit::standardize(numkit::sampleEquicorrelatedGaussian(n, p, 0.2, 22));
    const Eigen::VectorXd y = X.values * randomVector(engine, p) + randomVector(engine, n);
    const auto ols = numkit::fitOls(X, y);
    const auto en = numkit::fitWeightedElasticNet(X, y, 0.0, 0.0, PenaltyWeights::uniform(p));
    require((ols.coefficients - en.coefficients).cwiseAbs().maxCoeff() <= 1e-8,
            "elastic net at lambda=0 differs from OLS");
    require(std::abs(ols.intercept - en.intercept) <= 1e-8, "intercepts differ");
}

void checkLogisticGradient() {
    const int n = 50, p = 4;
    const auto X = numkit::standardize(numkit::sampleEquicorrelatedGaussian(n, p, 0.0, 31));
    std::mt19937_64 engine(32);
    Eigen::VectorXi t(n);
    for (int i = 0; i < n; ++i) t[i] = (randomVector(engine, 1)[0] > 0) ? 1 : 0;
    t[0] = 1;
    t[1] = 0;
    const double ridge = 0.01;

    auto nll = [&](const Eigen::VectorXd& beta, double b) {
        double f = 0;
        for (int i = 0; i < n; ++i) {
            const double z = X.values.row(i).dot(beta) + b;
            f += std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))) - t[i] * z;
        }
        return f + ridge * beta.squaredNorm();
    };

    for (int point = 0; point < 10; ++point) {
        const Eigen::VectorXd beta = randomVector(engine, p);
        const double b = randomVector(engine, 1)[0];
        Eigen::VectorXd analytic(p + 1);
        for (int i = 0; i < n; ++i) {
            const double z = X.values.row(i).dot(beta) + b;
            const double pr = 1.0 / (1.0 + std::exp(-z));
            if (i == 0) analytic.setZero();
            analytic.head(p) += (pr - t[i]) * X.values.row(i).transpose();
            analytic[p] += pr - t[i];
        }
        analytic.head(p) += 2.0 * ridge * beta;

        const double h = 1e-5;
        for (int j = 0; j <= p; ++j) {
            Eigen::VectorXd bp = beta, bm = beta;
            double bbp = b, bbm = b;
            if (j < p) {
                bp[j] += h;
                bm[j] -= h;
            } else {
                bbp += h;
                bbm -= h;
            }
            const double numeric = (nll(bp, bbp) - nll(bm, bbm)) / (2 * h);
            const double rel = std::abs(numeric - analytic[j]) /
                               std::max(1.0, std::abs(analytic[j]));
            require(rel <= 1e-4, "gradient mismatch at coordinate " + std::to_string(j));
        }
    }
}

void checkSvmObjectiveMonotone() {
    const int n = 120, p = 5;
    const auto X = numkit::standardize(numkit::sampleEquicorrelatedGaussian(n, p, 0.1, 41));
    Eigen::VectorXi y(n);
    std::mt19937_64 engine(42);
    for (int i = 0; i < n; ++i) {
        const double s = X.values(i, 0) + 0.5 * X.values(i, 1) + randomVector(engine, 1)[0];
        y[i] = s > 0 ? 1 : -1;
    }
    const auto fit = numkit::fitLinearSvm(X, y, 1.0);
    require(fit.objectiveTrace.size() >= 1, "no objective trace recorded");
    for (std::size_t k = 1; k < fit.objectiveTrace.size(); ++k)
        require(fit.objectiveTrace[k] <= fit.objectiveTrace[k - 1] + 1e-9,
                "dual objective increased between epochs");
    require(fit.converged, "svm did not converge");
}

void checkSeedReproducibility() {
    const auto a = numkit::sampleEquicorrelatedGaussian(200, 6, 0.5, 99);
    const auto b = numkit::sampleEquicorrelatedGaussian(200, 6, 0.5, 99);
    require((a - b).cwiseAbs().maxCoeff() == 0.0, "gaussian sampler not seed-deterministic");
    const auto c = numkit::sampleEquicorrelatedGaussian(200, 6, 0.5, 100);
    require((a - c).cwiseAbs().maxCoeff() != 0.0, "different seeds produced identical draws");

    const auto spec = synthgen::ScenarioSpec::scenario(2);
    const auto d1 = synthgen::generate(spec, 100, 0.25, 7);
    const auto d2 = synthgen::generate(spec, 100, 0.25, 7);
    require((d1.X - d2.X).cwiseAbs().maxCoeff() == 0.0 && d1.T == d2.T &&
                (d1.Y - d2.Y).cwiseAbs().maxCoeff() == 0.0,
            "synthetic generation not seed-deterministic");
}

// ------------------------------------------------------------- smoothing ---

void checkSmoothingMonotonicity() {
    Eigen::VectorXd beta(7);
    beta << 0.0, 0.05, 0.2, 0.7, 1.3, 2.4, 5.0;
    for (double gamma : {0.5, 1.0, 2.0}) {
        const auto sig = smoothing::sigmoidWeights(beta, gamma);
        const auto th = smoothing::tanhWeights(beta, gamma);
        for (int j = 1; j < beta.size(); ++j) {
            require(sig.w[j] > sig.w[j - 1], "sigmoid weights not strictly increasing");
            require(th.w[j] > th.w[j - 1], "tanh weights not strictly increasing");
        }
        Eigen::VectorXd positive = beta.tail(6);
        const auto inv = smoothing::inversePowerWeights(positive, gamma);
        for (int j = 1; j < positive.size(); ++j)
            require(inv.w[j] < inv.w[j - 1], "inverse-power weights not strictly decreasing");
    }
}

void checkSmoothingRange() {
    std::mt19937_64 engine(55);
    for (double gamma : {0.5, 1.0, 3.0}) {
        const Eigen::VectorXd beta = randomVector(engine, 40, 2.0);
        const auto sig = smoothing::sigmoidWeights(beta, gamma);
        const auto th = smoothing::tanhWeights(beta, gamma);
        const double lo = std::pow(0.5, gamma);
        for (int j = 0; j < beta.size(); ++j) {
            require(sig.w[j] >= lo && sig.w[j] < 1.0, "sigmoid weight out of range");
            require(th.w[j] >= 0.0 && th.w[j] < 1.0, "tanh weight out of range");
        }
        const double p = static_cast<double>(beta.size());
        require(sig.w.squaredNorm() < p, "sigmoid weight norm bound violated");
        require(th.w.squaredNorm() < p, "tanh weight norm bound violated");
    }
}

void checkConvexityOrdering() {
    // tanh minus sigmoid is increasing up to ~1.663, so difference ordering
    // holds for pairs below that point; sampled on (0, 1.65].
    std::vector<double> grid;
    for (double x = 0.05; x <= 1.651; x += 0.05) grid.push_back(x);
    Eigen::VectorXd values = Eigen::Map<Eigen::VectorXd>(grid.data(),
                                                         static_cast<Eigen::Index>(grid.size()));
    const auto sig = smoothing::sigmoidWeights(values, 1.0);
    const auto th = smoothing::tanhWeights(values, 1.0);
    for (std::size_t a = 0; a < grid.size(); ++a)
        for (std::size_t b = a + 1; b < grid.size(); ++b) {
            const double tanhDiff = th.w[static_cast<Eigen::Index>(b)] -
                                    th.w[static_cast<Eigen::Index>(a)];
            const double sigDiff = sig.w[static_cast<Eigen::Index>(b)] -
                                   sig.w[static_cast<Eigen::Index>(a)];
            require(tanhDiff >= sigDiff - 1e-12,
                    "tanh separation weaker than sigmoid at (" + formatDouble(grid[a]) + ", " +
                        formatDouble(grid[b]) + ")");
        }
}

// ------------------------------------------------------------ frameworks ---

void checkPenaltyDirection() {
    const auto spec = synthgen::ScenarioSpec::scenario(1);
    const auto data = synthgen::generate(spec, 400, 0.0, 3);

    for (const char* name : {"Enh-ESVMS", "Enh-ELRT"}) {
        const auto cfg = frameworks::SelectorConfig::named(name);
        const auto res = frameworks::runThreeStage(data, cfg);
        const auto w = smoothing::applySmoothing(cfg.smoothing, res.stage1Coefficients);
        for (int i = 0; i < res.stage1Coefficients.size(); ++i)
            for (int j = 0; j < res.stage1Coefficients.size(); ++j)
                if (std::abs(res.stage1Coefficients[i]) <= std::abs(res.stage1Coefficients[j]))
                    require(w.w[i] <= w.w[j] + 1e-12,
                            "framework-A penalty not non-decreasing in |beta|");
    }

    const auto oalCfg = frameworks::SelectorConfig::named("OAL");
    const auto oal = frameworks::runOal(data, oalCfg);
    const auto w = smoothing::inversePowerWeights(oal.stage1Coefficients, oal.chosen.oalGamma);
    for (int i = 0; i < oal.stage1Coefficients.size(); ++i)
        for (int j = 0; j < oal.stage1Coefficients.size(); ++j)
            if (std::abs(oal.stage1Coefficients[i]) <= std::abs(oal.stage1Coefficients[j]))
                require(w.w[i] >= w.w[j] - 1e-12,
                        "framework-B penalty not non-increasing in |theta|");
}

void checkFinalStageExclusion() {
    const auto spec = synthgen::ScenarioSpec::scenario(1);
    const auto cfg = frameworks::SelectorConfig::named("Enh-ELRS");
    bool sawZero = false;
    for (int seed = 1; seed <= 3; ++seed) {
        const auto data = synthgen::generate(spec, 300, 0.0, static_cast<std::uint64_t>(seed));
        const auto res = frameworks::runThreeStage(data, cfg);
        for (int j = 0; j < res.stage2Coefficients.size(); ++j) {
            if (res.stage2Coefficients[j] == 0.0) {
                sawZero = true;
                require((*res.stage3Coefficients)[j] == 0.0,
                        "stage-3 coefficient nonzero despite stage-2 zero");
                require(std::find(res.selected.begin(), res.selected.end(), j) ==
                            res.selected.end(),
                        "excluded covariate appeared in the selected set");
            }
        }
    }
    require(sawZero, "no stage-2 zeros encountered; exclusion untested");
}

void checkOracleTrend(SelectionCache& cache, int workers) {
    const std::vector<int> target{0, 1, 2, 3};
    for (const char* model : {"Enh-ELRT", "Enh-ELRS", "Enh-ESVMT", "Enh-ESVMS"}) {
        double previous = -1;
        for (int n : {200, 500, 1000}) {
            const double rate = exactRecoveryRate(cache.get(model, n, 30, workers), target);
            require(rate >= previous - 1.0 / 30.0 - 1e-12,
                    std::string(model) + ": exact-recovery rate dropped from " +
                        formatDouble(previous) + " to " + formatDouble(rate) + " at n=" +
                        std::to_string(n));
            previous = rate;
        }
    }
}

void checkProp2Asymmetry(SelectionCache& cache, int workers) {
    const auto& elrt = cache.get("Enh-ELRT", 1000, 30, workers);
    const auto& esvms = cache.get("Enh-ESVMS", 1000, 30, workers);
    const double elrtXt = selectionFrequency(elrt, {4, 5});
    const double esvmsXt = selectionFrequency(esvms, {4, 5});
    const double elrtXc = selectionFrequency(elrt, {0, 1});
    const double esvmsXc = selectionFrequency(esvms, {0, 1});
    require(elrtXt <= esvmsXt + 0.1,
            "Enh-ELRT selected treatment predictors more often than Enh-ESVMS + 0.1 (" +
                formatDouble(elrtXt) + " vs " + formatDouble(esvmsXt) + ")");
    require(esvmsXc >= elrtXc - 0.1,
            "Enh-ESVMS selected confounders less often than Enh-ELRT - 0.1 (" +
                formatDouble(esvmsXc) + " vs " + formatDouble(elrtXc) + ")");
}

// -------------------------------------------------------------- synthgen ---

void checkClassLabels() {
    for (int id = 1; id <= 4; ++id) {
        const auto spec = synthgen::ScenarioSpec::scenario(id);
        const auto classes = synthgen::classesFromCoefficients(spec.theta, spec.beta);
        require(classes.confounders == std::vector<int>({0, 1}), "confounders not {1,2}");
        require(classes.pureOutcome == std::vector<int>({2, 3}), "pure outcome not {3,4}");
        require(classes.pureTreatment == std::vector<int>({4, 5}), "pure treatment not {5,6}");
        for (int j : classes.spurious) {
            require(spec.theta[j] == 0 && spec.beta[j] == 0, "spurious covariate has signal");
            require(j >= 6, "spurious index overlaps signal covariates");
        }
    }
}

void checkSynthgenDeterminism() {
    const auto spec = synthgen::ScenarioSpec::scenario(3, 20, 1.0, 2.0);
    const auto a = synthgen::generate(spec, 250, 0.5, 123);
    const auto b = synthgen::generate(spec, 250, 0.5, 123);
    require((a.X - b.X).cwiseAbs().maxCoeff() == 0.0, "X not deterministic");
    require(a.T == b.T, "T not deterministic");
    require((a.Y - b.Y).cwiseAbs().maxCoeff() == 0.0, "Y not deterministic");
}

void checkTreatedPrevalence() {
    const auto spec = synthgen::ScenarioSpec::scenario(1);
    for (int n : {500, 1000})
        for (int seed = 1; seed <= 10; ++seed) {
            const auto data = synthgen::generate(spec, n, 0.0,
                                                 static_cast<std::uint64_t>(seed));
            double treated = 0;
            for (Eigen::Index i = 0; i < data.T.size(); ++i) treated += data.T[i];
            const double fraction = treated / static_cast<double>(n);
            require(fraction >= 0.35 && fraction <= 0.65,
                    "treated fraction " + formatDouble(fraction) + " outside [0.35, 0.65]");
        }
}

// ---------------------------------------------------------------- causal ---

void checkWithoutReplacement() {
    const auto spec = synthgen::ScenarioSpec::scenario(1);
    const auto data = synthgen::generate(spec, 300, 0.25, 17);
    const auto matched = causal::nearestNeighborMatch(data, {0, 1, 2, 3});
    std::set<int> controls, treated;
    for (const auto& [t, c] : matched.pairs) {
        require(controls.insert(c).second, "control matched twice");
        require(treated.insert(t).second, "treated unit matched twice");
        require(data.T[t] == 1 && data.T[c] == 0, "pair arms wrong");
    }
}

void checkStepwiseOptimality() {
    const auto spec = synthgen::ScenarioSpec::scenario(4);
    const auto data = synthgen::generate(spec, 240, 0.5, 19);
    const std::vector<int> selected{0, 1, 4, 5};
    const auto matched = causal::nearestNeighborMatch(data, selected);

    const auto X = numkit::standardize(data.X);
    Eigen::MatrixXd Z(data.rows(), static_cast<Eigen::Index>(selected.size()));
    for (std::size_t c = 0; c < selected.size(); ++c)
        Z.col(static_cast<Eigen::Index>(c)) = X.values.col(selected[c]);

    std::set<int> used;
    std::vector<int> allControls;
    for (Eigen::Index i = 0; i < data.rows(); ++i)
        if (data.T[i] == 0) allControls.push_back(static_cast<int>(i));

    for (std::size_t k = 0; k < matched.pairs.size(); ++k) {
        const auto [t, c] = matched.pairs[k];
        const double chosen = (Z.row(t) - Z.row(c)).norm();
        for (int other : allControls) {
            if (used.count(other)) continue;
            require(chosen <= (Z.row(t) - Z.row(other)).norm() + 1e-12,
                    "greedy step not distance-optimal");
        }
        used.insert(c);
    }
}

void checkBalanceImprovement() {
    const auto spec = synthgen::ScenarioSpec::scenario(1);
    const std::vector<int> selected{0, 1, 2, 3};
    int satisfied = 0, total = 0;
    for (int seed = 1; seed <= 20; ++seed) {
        const auto data = synthgen::generate(spec, 500, 0.0, static_cast<std::uint64_t>(seed));
        const auto X = numkit::standardize(data.X);
        const auto matched = causal::nearestNeighborMatch(data, selected);

        for (int j : selected) {
            double preT = 0, preC = 0;
            int nT = 0, nC = 0;
            for (Eigen::Index i = 0; i < data.rows(); ++i) {
                if (data.T[i] == 1) {
                    preT += X.values(i, j);
                    ++nT;
                } else {
                    preC += X.values(i, j);
                    ++nC;
                }
            }
            const double pre = std::abs(preT / nT - preC / nC);
            double postT = 0, postC = 0;
            for (const auto& [t, c] : matched.pairs) {
                postT += X.values(t, j);
                postC += X.values(c, j);
            }
            const auto m = static_cast<double>(matched.pairs.size());
            const double post = std::abs(postT / m - postC / m);
            ++total;
            if (post <= pre + 1e-9) ++satisfied;
        }
    }
    require(satisfied >= static_cast<int>(0.9 * total),
            "balance improved in only " + std::to_string(satisfied) + "/" +
                std::to_string(total) + " covariate checks");
}

void checkTranslationEquivariance() {
    const auto spec = synthgen::ScenarioSpec::scenario(2);
    auto data = synthgen::generate(spec, 200, 0.25, 23);
    const std::vector<int> selected{0, 1, 2, 3};
    const auto matched = causal::nearestNeighborMatch(data, selected);
    const auto base = causal::estimateAtt(data, matched, selected);
    data.Y.array() += 17.5;
    const auto shifted = causal::estimateAtt(data, matched, selected);
    require(std::abs(base.att - shifted.att) <= 1e-10,
            "ATT changed under constant outcome shift");
}

// ----------------------------------------------------------------- bench ---

std::filesystem::path scratchDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    const auto dir = std::filesystem::temp_directory_path() /
                     ("cfs-selftest-" + tag + "-" + std::to_string(::getpid()) + "-" +
                      std::to_string(counter.fetch_add(1)));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

void checkGridCompleteness() {
    const auto dir = scratchDir("grid");
    ExperimentGrid grid;
    grid.scenarios = {1};
    grid.ns = {200};
    grid.rhos = {0.0};
    grid.seeds = {1, 2};
    grid.models = {"ELRS", "OAL"};

    const auto stats = runGrid(grid, dir, 1);
    const auto records = store::load(dir / "records.csv");
    long errorTagged = 0;
    for (const auto& r : records)
        if (r.failed()) ++errorTagged;
    require(static_cast<long>(records.size()) == grid.cellCount(),
            "record count does not match cell count");
    require(stats.computed == grid.cellCount() && stats.failed == errorTagged,
            "grid stats inconsistent");

    const auto again = runGrid(grid, dir, 1);
    require(again.computed == 0 && again.skipped == grid.cellCount(),
            "resume recomputed finished cells");
    std::filesystem::remove_all(dir);
}

void checkTimingSanity() {
    const auto dir = scratchDir("time");
    ExperimentGrid grid;
    grid.scenarios = {1};
    grid.ns = {200};
    grid.rhos = {0.0};
    grid.seeds = {1, 2, 3};
    grid.models = {"ELRS"};

    const auto t0 = std::chrono::steady_clock::now();
    runGrid(grid, dir, 1);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    double sum = 0;
    for (const auto& r : store::load(dir / "records.csv")) {
        require(r.seconds > 0, "non-positive recorded wall clock");
        sum += r.seconds;
    }
    require(sum <= wall * 1.1, "per-cell times exceed total harness time by more than 10%");
    std::filesystem::remove_all(dir);
}

void checkBootstrapReproducibility() {
    const auto dir = scratchDir("boot");
    const auto spec = synthgen::ScenarioSpec::scenario(1);
    const auto data = synthgen::generate(spec, 1200, 0.0, 31);
    const auto csv = dir / "synthetic.csv";
    exportDatasetCsv(data, csv);

    RealDataJob job;
    job.csvPath = csv;
    job.treatmentColumn = "t";
    job.outcomeColumn = "y";
    job.bootstrapIterations = 3;
    job.controlSampleSize = 300;
    job.frequencyThreshold = 0.7;
    job.rngSeed = 5;
    job.models = {"ELRS"};

    const auto a = runBootstrapStudy(job);
    const auto b = runBootstrapStudy(job);
    require(a.models.size() == b.models.size(), "model counts differ");
    for (std::size_t m = 0; m < a.models.size(); ++m) {
        require((a.models[m].selectionFrequency - b.models[m].selectionFrequency)
                        .cwiseAbs()
                        .maxCoeff() == 0.0,
                "bootstrap frequencies not reproducible");
        require(a.models[m].meanAtt == b.models[m].meanAtt, "bootstrap ATT not reproducible");
        require(a.models[m].consensus == b.models[m].consensus,
                "bootstrap consensus not reproducible");
    }
    std::filesystem::remove_all(dir);
}

struct Invariant {
    std::string name;
    std::function<void()> run;
};

} // namespace

int runSelftest(std::ostream& out, int workers, const std::string& only) {
    if (workers < 1) workers = 1;
    SelectionCache cache;

    const std::vector<Invariant> invariants = {
        {"numkit.elastic-net-kkt", checkElasticNetKkt},
        {"numkit.path-monotone", checkPathMonotone},
        {"numkit.ols-reduction", checkOlsReduction},
        {"numkit.logistic-gradient", checkLogisticGradient},
        {"numkit.svm-objective-monotone", checkSvmObjectiveMonotone},
        {"numkit.seed-reproducibility", checkSeedReproducibility},
        {"smoothing.monotonicity", checkSmoothingMonotonicity},
        {"smoothing.range-and-norm", checkSmoothingRange},
        {"smoothing.convexity-ordering", checkConvexityOrdering},
        {"frameworks.penalty-direction", checkPenaltyDirection},
        {"frameworks.final-stage-exclusion", checkFinalStageExclusion},
        {"frameworks.oracle-trend", [&] { checkOracleTrend(cache, workers); }},
        {"frameworks.prop2-asymmetry", [&] { checkProp2Asymmetry(cache, workers); }},
        {"synthgen.class-labels", checkClassLabels},
        {"synthgen.determinism", checkSynthgenDeterminism},
        {"synthgen.treated-prevalence", checkTreatedPrevalence},
        {"causal.without-replacement", checkWithoutReplacement},
        {"causal.stepwise-optimality", checkStepwiseOptimality},
        {"causal.balance-improvement", checkBalanceImprovement},
        {"causal.translation-equivariance", checkTranslationEquivariance},
        {"bench.grid-completeness", checkGridCompleteness},
        {"bench.bootstrap-reproducibility", checkBootstrapReproducibility},
        {"bench.timing-sanity", checkTimingSanity},
    };

    int failures = 0;
    for (const auto& inv : invariants) {
        if (!only.empty() && inv.name.rfind(only, 0) != 0) continue;
        try {
            inv.run();
            out << "[PASS] " << inv.name << '\n';
        } catch (const CheckFailure& f) {
            ++failures;
            out << "[FAIL] " << inv.name << ": " << f.message << '\n';
        } catch (const std::exception& e) {
            ++failures;
            out << "[FAIL] " << inv.name << ": unexpected error: " << e.what() << '\n';
        }
        out.flush();
    }
    return failures;
}

} // namespace cfs::bench
