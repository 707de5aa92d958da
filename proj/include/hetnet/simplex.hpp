#ifndef HETNET_SIMPLEX_HPP
#define HETNET_SIMPLEX_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace hetnet {

/// Euclidean projection of v onto {x : x >= 0, sum x = 1}.
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

/// Uniform draw from the (n-1)-simplex, i.e. Dirichlet(1, ..., 1).
Eigen::VectorXd sample_simplex(Eigen::Index n, std::mt19937_64& rng);

/// Number of points of the simplex lattice {x : x_i in {0, 1/n, ..., 1}, sum x = 1}
/// in dimension k, saturating at UINT64_MAX.
std::uint64_t simplex_lattice_size(int k, int n);

} // namespace hetnet

#endif // HETNET_SIMPLEX_HPP
