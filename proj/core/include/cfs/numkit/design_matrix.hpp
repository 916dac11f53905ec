#pragma once

#include <Eigen/Dense>
#include <vector>

namespace cfs::numkit {

// Covariate matrix together with the column statistics needed to move
// between the raw and standardized scales. Constant columns are kept (as
// all-zero columns with std 1) so covariate indices stay stable.
struct DesignMatrix {
    Eigen::MatrixXd values;              // N x p
    Eigen::VectorXd columnMeans;         // p
    Eigen::VectorXd columnStds;          // p, sample std; 1.0 for constant columns
    std::vector<bool> constantColumns;   // p
    bool standardized = false;

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }

    // Wraps a matrix as-is (no centering or scaling applied).
    static DesignMatrix raw(Eigen::MatrixXd m);
};

// Center and scale every column to mean 0 and unit sample standard
// deviation. Constant columns are flagged, zeroed and given std 1.
// Throws DataError("degenerate design") when every column is constant.
DesignMatrix standardize(const Eigen::MatrixXd& rawValues);

} // namespace cfs::numkit
