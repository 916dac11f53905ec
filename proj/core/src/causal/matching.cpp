#include "cfs/causal/matching.hpp"

#include <limits>
#include <stdexcept>

#include "cfs/errors.hpp"
#include "cfs/numkit/design_matrix.hpp"

namespace cfs::causal {

MatchedSample nearestNeighborMatch(const synthgen::Dataset& data,
                                   const std::vector<int>& selected) {
    const Eigen::Index n = data.rows();
    if (data.T.size() != n || data.Y.size() != n)
        throw std::invalid_argument("nearestNeighborMatch: size mismatch");
    for (int j : selected)
        if (j < 0 || j >= data.cols())
            throw std::invalid_argument("nearestNeighborMatch: covariate index out of range");

    std::vector<int> treated, controls;
    for (Eigen::Index i = 0; i < n; ++i)
        (data.T[i] == 1 ? treated : controls).push_back(static_cast<int>(i));
    if (treated.empty() || controls.empty()) throw DataError("degenerate labels");

    const auto X = numkit::standardize(data.X);
    const auto k = static_cast<Eigen::Index>(selected.size());
    Eigen::MatrixXd Z(n, k);
    for (Eigen::Index c = 0; c < k; ++c)
        Z.col(c) = X.values.col(selected[static_cast<std::size_t>(c)]);

    MatchedSample matched;
    matched.matchedOnEmptySet = selected.empty();
    matched.controlsExhausted = controls.size() < treated.size();
    const std::size_t pairTarget = std::min(treated.size(), controls.size());
    matched.pairs.reserve(pairTarget);
    matched.distances.reserve(pairTarget);

    std::vector<bool> used(controls.size(), false);
    for (int t : treated) {
        if (matched.pairs.size() == pairTarget) break;
        int bestControl = -1;
        std::size_t bestSlot = 0;
        double bestDist = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < controls.size(); ++c) {
            if (used[c]) continue;
            const double d2 = (Z.row(t) - Z.row(controls[c])).squaredNorm();
            if (d2 < bestDist) {  // strict: ties keep the lowest control index
                bestDist = d2;
                bestControl = controls[c];
                bestSlot = c;
            }
        }
        used[bestSlot] = true;
        matched.pairs.emplace_back(t, bestControl);
        matched.distances.push_back(std::sqrt(bestDist));
    }
    return matched;
}

} // namespace cfs::causal
