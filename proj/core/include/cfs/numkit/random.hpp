#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace cfs::numkit {

// splitmix64 step; used to derive independent sub-streams from one seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t deriveSeed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream + 1));
}

// n draws from a p-variate Gaussian with unit variances and every pairwise
// correlation equal to rho, via the Cholesky factor of the equicorrelation
// matrix. Deterministic in (n, p, rho, seed). Requires 0 <= rho < 1.
Eigen::MatrixXd sampleEquicorrelatedGaussian(int n, int p, double rho,
                                             std::uint64_t seed);

} // namespace cfs::numkit
