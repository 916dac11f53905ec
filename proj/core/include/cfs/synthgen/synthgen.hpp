#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

namespace cfs::synthgen {

// Ground-truth variable classes, 0-based column indices.
struct VariableClasses {
    std::vector<int> confounders;     // nonzero in both outcome and treatment models
    std::vector<int> pureOutcome;     // nonzero only in the outcome model
    std::vector<int> pureTreatment;   // nonzero only in the treatment model
    std::vector<int> spurious;        // nonzero in neither
};

// One synthetic-benchmark configuration: outcome coefficients theta,
// treatment coefficients beta, treatment effect and noise level.
struct ScenarioSpec {
    int id = 0;                   // 1..4 for the built-in scenarios, 0 for custom
    Eigen::VectorXd theta;        // p
    Eigen::VectorXd beta;         // p
    double trueEffect = 0.0;      // additive effect of T on Y
    double outcomeNoiseSd = 1.0;

    Eigen::Index p() const { return theta.size(); }

    // Built-in scenarios (id 1..4), confounders {1,2}, pure outcome
    // predictors {3,4}, pure treatment predictors {5,6} in 1-based terms.
    static ScenarioSpec scenario(int id, int p = 20, double trueEffect = 0.0,
                                 double outcomeNoiseSd = 1.0);
};

struct Dataset {
    Eigen::MatrixXd X;    // n x p, raw scale
    Eigen::VectorXi T;    // 0/1
    Eigen::VectorXd Y;
    std::optional<VariableClasses> truth;
    double trueEffect = 0.0;

    Eigen::Index rows() const { return X.rows(); }
    Eigen::Index cols() const { return X.cols(); }
};

VariableClasses classesFromCoefficients(const Eigen::VectorXd& theta,
                                        const Eigen::VectorXd& beta);

// X ~ equicorrelated Gaussian, T_i ~ Bernoulli(expit(x_i' beta)),
// Y = trueEffect * T + X theta + N(0, outcomeNoiseSd^2). Deterministic in
// (spec, n, rho, seed). Single-class treatment draws are resampled up to
// 100 times before DataError("degenerate scenario").
Dataset generate(const ScenarioSpec& spec, int n, double rho, std::uint64_t seed);

// Under this linear data-generating process the ATT equals trueEffect.
double trueAtt(const ScenarioSpec& spec);

} // namespace cfs::synthgen
