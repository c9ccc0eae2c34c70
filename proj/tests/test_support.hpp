// test_support.hpp: seeded generators shared by the property tests

#pragma once

#include "thermolimit/numerics.hpp"

#include <cstdint>
#include <random>

namespace thermolimit::testing {

inline numerics::ComplexMatrix random_hermitian(std::size_t dim, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    const auto n = static_cast<Eigen::Index>(dim);
    numerics::ComplexMatrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = {normal(rng), normal(rng)};
    return 0.5 * (a + a.adjoint());
}

inline numerics::StateVector random_state(std::size_t dim, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    numerics::StateVector v(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = {normal(rng), normal(rng)};
    return v / v.norm();
}

} // namespace thermolimit::testing
