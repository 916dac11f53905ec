#include "cfs/numkit/random.hpp"

#include <random>
#include <stdexcept>

namespace cfs::numkit {

Eigen::MatrixXd sampleEquicorrelatedGaussian(int n, int p, double rho,
                                             std::uint64_t seed) {
    if (n < 1 || p < 1)
        throw std::invalid_argument("sampleEquicorrelatedGaussian: need n, p >= 1");
    if (rho < 0 || rho >= 1)
        throw std::invalid_argument("sampleEquicorrelatedGaussian: need 0 <= rho < 1");

    std::mt19937_64 engine(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd Z(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) Z(i, j) = normal(engine);
    if (rho == 0) return Z;

    Eigen::MatrixXd sigma = Eigen::MatrixXd::Constant(p, p, rho);
    sigma.diagonal().setOnes();
    const Eigen::MatrixXd L = sigma.llt().matrixL();
    return Z * L.transpose();
}

} // namespace cfs::numkit
