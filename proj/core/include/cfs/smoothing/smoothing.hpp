#pragma once

#include <Eigen/Dense>

#include "cfs/numkit/fit.hpp"

namespace cfs::smoothing {

// How exposure-stage coefficient magnitudes become L1 penalty multipliers.
// sigmoid / tanh grow with |beta_j| (large exposure coefficient -> large
// penalty); inversePower / oalInverse shrink with |theta_j| (large outcome
// coefficient -> small penalty).
enum class SmoothingKind { sigmoid, tanh, inversePower, oalInverse };

struct SmoothingSpec {
    SmoothingSpec(SmoothingKind k, double g);

    SmoothingKind kind;
    double gamma;
};

enum class ZeroPolicy {
    mapToInfinity,  // |theta_j| = 0 -> weight +inf, coefficient excluded
    clamp,          // |theta_j| = 0 -> weight 1e8
};

inline constexpr double kClampedInverseWeight = 1e8;

// w_j = sigmoid(|beta_j|)^gamma1, values in [0.5^gamma1, 1).
numkit::PenaltyWeights sigmoidWeights(const Eigen::VectorXd& beta, double gamma1);

// w_j = tanh(|beta_j|)^gamma1, values in [0, 1).
numkit::PenaltyWeights tanhWeights(const Eigen::VectorXd& beta, double gamma1);

// w_j = |theta_j|^(-gamma); zeros handled per ZeroPolicy.
numkit::PenaltyWeights inversePowerWeights(const Eigen::VectorXd& theta, double gamma,
                                           ZeroPolicy zeroPolicy = ZeroPolicy::mapToInfinity);

numkit::PenaltyWeights applySmoothing(const SmoothingSpec& spec,
                                      const Eigen::VectorXd& coefficients);

const char* toString(SmoothingKind kind);

} // namespace cfs::smoothing
