#include "hetnet/simplex.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <vector>

namespace hetnet {

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v)
{
    const Eigen::Index n = v.size();
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<>());

    double cumulative = 0.0;
    double theta = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        cumulative += u[static_cast<std::size_t>(j)];
        const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
        if (u[static_cast<std::size_t>(j)] - t > 0.0)
            theta = t;
    }
    return (v.array() - theta).max(0.0).matrix();
}

Eigen::VectorXd sample_simplex(Eigen::Index n, std::mt19937_64& rng)
{
    std::exponential_distribution<double> exp1(1.0);
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i)
        x[i] = exp1(rng);
    return x / x.sum();
}

std::uint64_t simplex_lattice_size(int k, int n)
{
    // C(n + k - 1, k - 1), accumulated so every partial product is an integer.
    constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t c = 1;
    for (int i = 1; i < k; ++i) {
        const auto num = static_cast<std::uint64_t>(n + i);
        if (c > kMax / num)
            return kMax;
        c = c * num / static_cast<std::uint64_t>(i);
    }
    return c;
}

} // namespace hetnet
