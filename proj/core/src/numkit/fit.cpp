#include "cfs/numkit/fit.hpp"

#include <cmath>
#include <stdexcept>

namespace cfs::numkit {

void PenaltyWeights::validate() const {
    for (Eigen::Index j = 0; j < w.size(); ++j) {
        if (std::isnan(w[j]) || w[j] < 0)
            throw std::invalid_argument("penalty weights must be non-negative");
    }
}

} // namespace cfs::numkit
