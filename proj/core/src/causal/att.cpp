#include "cfs/causal/att.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cfs/errors.hpp"
#include "cfs/numkit/design_matrix.hpp"

namespace cfs::causal {

AttEstimate estimateAtt(const synthgen::Dataset& data, const MatchedSample& matched,
                        const std::vector<int>& selected) {
    if (matched.pairs.empty()) throw std::invalid_argument("estimateAtt: empty matched sample");

    std::vector<int> rows;
    rows.reserve(matched.pairs.size() * 2);
    for (const auto& [t, c] : matched.pairs) {
        rows.push_back(t);
        rows.push_back(c);
    }

    const auto X = numkit::standardize(data.X);
    const auto m = static_cast<Eigen::Index>(rows.size());

    AttEstimate est;
    est.nPairs = static_cast<int>(matched.pairs.size());
    est.modelUsed = selected.empty() ? AttEstimate::Model::matchedMeanDifference
                                     : AttEstimate::Model::regression;

    // Design: intercept, T, then selected covariates added only while they
    // keep the system numerically full-rank (collinear ones are dropped).
    std::vector<Eigen::VectorXd> columns;
    columns.push_back(Eigen::VectorXd::Ones(m));
    Eigen::VectorXd tcol(m);
    for (Eigen::Index r = 0; r < m; ++r) tcol[r] = data.T[rows[static_cast<std::size_t>(r)]];
    columns.push_back(tcol);
    for (int j : selected) {
        Eigen::VectorXd col(m);
        for (Eigen::Index r = 0; r < m; ++r)
            col[r] = X.values(rows[static_cast<std::size_t>(r)], j);
        columns.push_back(col);
    }

    Eigen::MatrixXd Z(m, static_cast<Eigen::Index>(columns.size()));
    for (std::size_t c = 0; c < columns.size(); ++c)
        Z.col(static_cast<Eigen::Index>(c)) = columns[c];

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Z);
    if (qr.rank() < Z.cols()) {
        // rebuild greedily, keeping intercept and T
        est.droppedCollinear = true;
        Eigen::MatrixXd kept = Z.leftCols(2);
        for (Eigen::Index c = 2; c < Z.cols(); ++c) {
            Eigen::MatrixXd trial(m, kept.cols() + 1);
            trial << kept, Z.col(c);
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> trialQr(trial);
            if (trialQr.rank() == trial.cols()) kept = std::move(trial);
        }
        Z = std::move(kept);
        qr.compute(Z);
    }

    Eigen::VectorXd yv(m);
    for (Eigen::Index r = 0; r < m; ++r) yv[r] = data.Y[rows[static_cast<std::size_t>(r)]];

    const Eigen::VectorXd coef = qr.solve(yv);
    est.att = coef[1];

    const Eigen::VectorXd resid = yv - Z * coef;
    const auto dof = std::max<Eigen::Index>(m - Z.cols(), 1);
    const double sigma2 = resid.squaredNorm() / static_cast<double>(dof);
    const Eigen::MatrixXd ztzInv =
        (Z.transpose() * Z).ldlt().solve(Eigen::MatrixXd::Identity(Z.cols(), Z.cols()));
    est.standardError = std::sqrt(std::max(sigma2 * ztzInv(1, 1), 0.0));
    return est;
}

AttEstimate targetModelAtt(const synthgen::Dataset& data) {
    if (!data.truth) throw std::invalid_argument("targetModelAtt: ground-truth classes required");
    std::vector<int> selected = data.truth->confounders;
    selected.insert(selected.end(), data.truth->pureOutcome.begin(),
                    data.truth->pureOutcome.end());
    std::sort(selected.begin(), selected.end());
    const auto matched = nearestNeighborMatch(data, selected);
    return estimateAtt(data, matched, selected);
}

double selectionBias(const AttEstimate& modelAtt, double reference) {
    return modelAtt.att - reference;
}

} // namespace cfs::causal
