#include "cfs/synthgen/synthgen.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "cfs/errors.hpp"
#include "cfs/numkit/random.hpp"

namespace cfs::synthgen {

namespace {

double expit(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

} // namespace

ScenarioSpec ScenarioSpec::scenario(int id, int p, double trueEffect, double outcomeNoiseSd) {
    if (id < 1 || id > 4) throw std::invalid_argument("ScenarioSpec: id must be in 1..4");
    if (p < 6) throw std::invalid_argument("ScenarioSpec: need p >= 6");
    ScenarioSpec spec;
    spec.id = id;
    spec.trueEffect = trueEffect;
    spec.outcomeNoiseSd = outcomeNoiseSd;
    spec.theta = Eigen::VectorXd::Zero(p);
    spec.beta = Eigen::VectorXd::Zero(p);

    // Confounders {1,2}, pure outcome predictors {3,4}, pure treatment
    // predictors {5,6}; everything else is noise.
    switch (id) {
        case 1:
            spec.theta.head(4) << 0.6, 0.6, 0.6, 0.6;
            spec.beta.head(6) << 1, 1, 0, 0, 1, 1;
            break;
        case 2:
            spec.theta.head(4) << 0.6, 0.6, 0.6, 0.6;
            spec.beta.head(6) << 0.4, 0.4, 0, 0, 1, 1;
            break;
        case 3:
            spec.theta.head(4) << 0.2, 0.2, 0.6, 0.6;
            spec.beta.head(6) << 1, 1, 0, 0, 1, 1;
            break;
        case 4:
            spec.theta.head(4) << 0.6, 0.6, 0.6, 0.6;
            spec.beta.head(6) << 1, 1, 0, 0, 1.8, 1.8;
            break;
    }
    return spec;
}

VariableClasses classesFromCoefficients(const Eigen::VectorXd& theta,
                                        const Eigen::VectorXd& beta) {
    if (theta.size() != beta.size())
        throw std::invalid_argument("classesFromCoefficients: size mismatch");
    VariableClasses c;
    for (int j = 0; j < theta.size(); ++j) {
        const bool inOutcome = theta[j] != 0;
        const bool inTreatment = beta[j] != 0;
        if (inOutcome && inTreatment) c.confounders.push_back(j);
        else if (inOutcome) c.pureOutcome.push_back(j);
        else if (inTreatment) c.pureTreatment.push_back(j);
        else c.spurious.push_back(j);
    }
    return c;
}

Dataset generate(const ScenarioSpec& spec, int n, double rho, std::uint64_t seed) {
    const auto p = spec.p();
    if (spec.beta.size() != p) throw std::invalid_argument("generate: theta/beta size mismatch");
    if (n < 20) throw std::invalid_argument("generate: need n >= 20");
    if (!(spec.outcomeNoiseSd >= 0)) throw std::invalid_argument("generate: negative noise sd");

    Dataset data;
    data.X = numkit::sampleEquicorrelatedGaussian(n, static_cast<int>(p), rho,
                                                  numkit::deriveSeed(seed, 1));
    const Eigen::VectorXd propensityScore = data.X * spec.beta;

    std::mt19937_64 treatmentEngine(numkit::deriveSeed(seed, 2));
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    data.T.resize(n);
    bool ok = false;
    for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
        int treated = 0;
        for (int i = 0; i < n; ++i) {
            data.T[i] = uniform(treatmentEngine) < expit(propensityScore[i]) ? 1 : 0;
            treated += data.T[i];
        }
        ok = treated > 0 && treated < n;
    }
    if (!ok) throw DataError("degenerate scenario");

    std::mt19937_64 noiseEngine(numkit::deriveSeed(seed, 3));
    std::normal_distribution<double> normal(0.0, 1.0);
    data.Y.resize(n);
    const Eigen::VectorXd signal = data.X * spec.theta;
    for (int i = 0; i < n; ++i)
        data.Y[i] = spec.trueEffect * data.T[i] + signal[i] +
                    spec.outcomeNoiseSd * normal(noiseEngine);

    data.truth = classesFromCoefficients(spec.theta, spec.beta);
    data.trueEffect = spec.trueEffect;
    return data;
}

double trueAtt(const ScenarioSpec& spec) { return spec.trueEffect; }

} // namespace cfs::synthgen
