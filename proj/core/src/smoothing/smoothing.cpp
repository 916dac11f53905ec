#include "cfs/smoothing/smoothing.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cfs::smoothing {

SmoothingSpec::SmoothingSpec(SmoothingKind k, double g) : kind(k), gamma(g) {
    if (!(g > 0) || !std::isfinite(g))
        throw std::invalid_argument("SmoothingSpec: gamma must be finite and positive");
}

numkit::PenaltyWeights sigmoidWeights(const Eigen::VectorXd& beta, double gamma1) {
    if (!(gamma1 > 0)) throw std::invalid_argument("sigmoidWeights: gamma must be positive");
    Eigen::VectorXd w(beta.size());
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        const double a = std::abs(beta[j]);
        w[j] = std::pow(1.0 / (1.0 + std::exp(-a)), gamma1);
    }
    return numkit::PenaltyWeights{std::move(w)};
}

numkit::PenaltyWeights tanhWeights(const Eigen::VectorXd& beta, double gamma1) {
    if (!(gamma1 > 0)) throw std::invalid_argument("tanhWeights: gamma must be positive");
    Eigen::VectorXd w(beta.size());
    for (Eigen::Index j = 0; j < beta.size(); ++j)
        w[j] = std::pow(std::tanh(std::abs(beta[j])), gamma1);
    return numkit::PenaltyWeights{std::move(w)};
}

numkit::PenaltyWeights inversePowerWeights(const Eigen::VectorXd& theta, double gamma,
                                           ZeroPolicy zeroPolicy) {
    if (!(gamma > 0)) throw std::invalid_argument("inversePowerWeights: gamma must be positive");
    Eigen::VectorXd w(theta.size());
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
        const double a = std::abs(theta[j]);
        if (a == 0) {
            w[j] = zeroPolicy == ZeroPolicy::mapToInfinity
                       ? std::numeric_limits<double>::infinity()
                       : kClampedInverseWeight;
        } else {
            w[j] = std::pow(a, -gamma);
        }
    }
    return numkit::PenaltyWeights{std::move(w)};
}

numkit::PenaltyWeights applySmoothing(const SmoothingSpec& spec,
                                      const Eigen::VectorXd& coefficients) {
    switch (spec.kind) {
        case SmoothingKind::sigmoid:
            return sigmoidWeights(coefficients, spec.gamma);
        case SmoothingKind::tanh:
            return tanhWeights(coefficients, spec.gamma);
        case SmoothingKind::inversePower:
        case SmoothingKind::oalInverse:
            return inversePowerWeights(coefficients, spec.gamma);
    }
    throw std::invalid_argument("applySmoothing: unknown kind");
}

const char* toString(SmoothingKind kind) {
    switch (kind) {
        case SmoothingKind::sigmoid: return "sigmoid";
        case SmoothingKind::tanh: return "tanh";
        case SmoothingKind::inversePower: return "inversePower";
        case SmoothingKind::oalInverse: return "oalInverse";
    }
    return "unknown";
}

} // namespace cfs::smoothing
