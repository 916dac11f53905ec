#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cfs/numkit/cv.hpp"
#include "cfs/numkit/design_matrix.hpp"
#include "cfs/numkit/fit.hpp"
#include "cfs/smoothing/smoothing.hpp"
#include "cfs/synthgen/synthgen.hpp"

namespace cfs::frameworks {

enum class FrameworkKind { threeStage, twoStagePrelim, oal, oaenet };
enum class ExposureEstimator { svm, logistic };

struct LambdaGrids {
    std::vector<double> lambda2{0.0, 0.01, 0.1, 1.0};
    int lambda1Count = 50;
    double lambda1MinRatio = 1e-3;
};

// Everything that determines a selector variant. The named registry covers
// the standard variants: Enh-ELRT / Enh-ELRS / Enh-ESVMT / Enh-ESVMS
// (three-stage), ELRS / ESVMS / ELRT / ESVMT (preliminary two-stage),
// OAL and OAENet.
struct SelectorConfig {
    std::string label = "custom";
    FrameworkKind framework = FrameworkKind::threeStage;
    ExposureEstimator exposureEstimator = ExposureEstimator::svm;
    smoothing::SmoothingSpec smoothing{smoothing::SmoothingKind::sigmoid, 1.0};
    double gamma2 = 1.0;                 // adaptive-stage inverse power
    LambdaGrids lambdas;
    int cvFolds = 10;
    std::uint64_t cvSeed = 1;
    std::vector<double> oalGammaGrid{1.05, 1.55, 2.05};  // gamma > 2*Gamma + 1, Gamma in {0, .25, .5}
    int oalLambdaCount = 25;
    double oalLambdaMinRatio = 1e-3;
    double svmC = 1.0;
    double logisticRidge = 1e-8;

    // Throws std::invalid_argument for unknown names.
    static SelectorConfig named(const std::string& name);
};

std::vector<std::string> knownModelNames();

struct ChosenHyperparameters {
    double stage2Lambda1 = 0, stage2Lambda2 = 0;
    double stage3Lambda1 = 0, stage3Lambda2 = 0;
    double oalGamma = 0, oalLambda1 = 0, oalLambda2 = 0;
};

struct SelectionResult {
    // Three-stage / preliminary: stage1 = exposure fit, stage2 = weighted
    // elastic net, stage3 = adaptive elastic net (three-stage only).
    // OAL / OAENet: stage1 = outcome OLS, stage2 = penalized exposure fit.
    Eigen::VectorXd stage1Coefficients;
    Eigen::VectorXd stage2Coefficients;
    std::optional<Eigen::VectorXd> stage3Coefficients;
    std::vector<int> selected;  // 0-based, ascending; |final coef| > 1e-8
    ChosenHyperparameters chosen;
    double wallClockSeconds = 0;
    bool propensitiesClipped = false;  // OAL/OAENet wAMD computation clipped

    const Eigen::VectorXd& finalCoefficients() const {
        return stage3Coefficients ? *stage3Coefficients : stage2Coefficients;
    }
};

inline constexpr double kSelectionThreshold = 1e-8;

SelectionResult runSelector(const synthgen::Dataset& data, const SelectorConfig& cfg);

SelectionResult runThreeStage(const synthgen::Dataset& data, const SelectorConfig& cfg);
SelectionResult runTwoStagePrelim(const synthgen::Dataset& data, const SelectorConfig& cfg);
SelectionResult runOal(const synthgen::Dataset& data, const SelectorConfig& cfg);
SelectionResult runOaenet(const synthgen::Dataset& data, const SelectorConfig& cfg);

// Weighted absolute mean difference of the IPTW-weighted covariate means:
//   sum_j |outcomeOls_j| * |wmean_j(treated) - wmean_j(control)|
// with unit weights T/pi + (1-T)/(1-pi) and propensities from the exposure
// fit, clipped to [0.01, 0.99]. `clipped` reports whether clipping hit.
double computeWamd(const numkit::DesignMatrix& X, const Eigen::VectorXi& T,
                   const numkit::FitResult& exposureFit,
                   const Eigen::VectorXd& outcomeOlsCoefficients,
                   bool* clipped = nullptr);

} // namespace cfs::frameworks
