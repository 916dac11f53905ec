#include "cfs/numkit/design_matrix.hpp"

#include <cmath>
#include <stdexcept>

#include "cfs/errors.hpp"

namespace cfs::numkit {

DesignMatrix DesignMatrix::raw(Eigen::MatrixXd m) {
    DesignMatrix d;
    d.columnMeans = Eigen::VectorXd::Zero(m.cols());
    d.columnStds = Eigen::VectorXd::Ones(m.cols());
    d.constantColumns.assign(static_cast<std::size_t>(m.cols()), false);
    d.values = std::move(m);
    d.standardized = false;
    return d;
}

DesignMatrix standardize(const Eigen::MatrixXd& rawValues) {
    const Eigen::Index n = rawValues.rows();
    const Eigen::Index p = rawValues.cols();
    if (n < 2) throw std::invalid_argument("standardize: need at least 2 rows");
    if (p < 1) throw std::invalid_argument("standardize: need at least 1 column");

    DesignMatrix d;
    d.values.resize(n, p);
    d.columnMeans.resize(p);
    d.columnStds.resize(p);
    d.constantColumns.assign(static_cast<std::size_t>(p), false);

    Eigen::Index constants = 0;
    for (Eigen::Index j = 0; j < p; ++j) {
        const double mean = rawValues.col(j).mean();
        Eigen::VectorXd centered = rawValues.col(j).array() - mean;
        const double var = centered.squaredNorm() / static_cast<double>(n - 1);
        const double sd = std::sqrt(var);
        d.columnMeans[j] = mean;
        if (sd <= 0 || !std::isfinite(sd)) {
            d.constantColumns[static_cast<std::size_t>(j)] = true;
            d.columnStds[j] = 1.0;
            d.values.col(j).setZero();
            ++constants;
        } else {
            d.columnStds[j] = sd;
            d.values.col(j) = centered / sd;
        }
    }
    if (constants == p) throw DataError("degenerate design");
    d.standardized = true;
    return d;
}

} // namespace cfs::numkit
