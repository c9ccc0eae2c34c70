#include <doctest.h>

#include "test_support.hpp"
#include "thermolimit/error.hpp"
#include "thermolimit/numerics.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace thermolimit;
using namespace thermolimit::numerics;

TEST_CASE("kron of identities and Paulis") {
    CHECK(max_abs_deviation(kron(identity(2), identity(2)), identity(4)) == 0.0);

    ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
    expected.diagonal() << 1.0, 1.0, -1.0, -1.0;
    CHECK(max_abs_deviation(kron(pauli_z(), identity(2)), expected) == 0.0);

    StateVector zero_zero = StateVector::Zero(4);
    zero_zero(0) = 1.0;
    const StateVector flipped = kron(pauli_x(), pauli_x()) * zero_zero;
    CHECK(std::abs(flipped(3) - Complex(1.0)) == 0.0);
    CHECK(flipped.head(3).norm() == 0.0);
}

TEST_CASE("kron refuses dimensions beyond the cap") {
    CHECK_THROWS_AS(kron(identity(8), identity(8), 32), Error);
    try {
        kron(identity(4), identity(4), 8);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DimensionTooLarge);
    }
}

TEST_CASE("matexp of zero and of a diagonal generator") {
    CHECK(max_abs_deviation(matexp_hermitian_prop(ComplexMatrix::Zero(3, 3), 1.7), identity(3)) < 1e-15);

    const ComplexMatrix u = matexp_hermitian_prop(pauli_z(), std::numbers::pi / 2.0);
    ComplexMatrix expected = ComplexMatrix::Zero(2, 2);
    expected(0, 0) = std::polar(1.0, -std::numbers::pi / 2.0);
    expected(1, 1) = std::polar(1.0, std::numbers::pi / 2.0);
    CHECK(max_abs_deviation(u, expected) < 1e-14);
}

TEST_CASE("matexp rejects non-Hermitian input") {
    ComplexMatrix h = pauli_x();
    h(0, 1) += 1e-9;
    try {
        matexp_hermitian_prop(h, 1.0);
        FAIL("expected NotHermitian");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotHermitian);
    }
    // Below tolerance is accepted.
    h = pauli_x();
    h(0, 1) += 1e-12;
    CHECK_NOTHROW(matexp_hermitian_prop(h, 1.0));
}

TEST_CASE("property: propagators are unitary, preserve norm and compose") {
    std::mt19937_64 rng(20240611);
    std::uniform_int_distribution<std::size_t> dim_dist(1, 16);
    std::uniform_real_distribution<double> time(-5.0, 5.0);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t dim = dim_dist(rng);
        const ComplexMatrix h = testing::random_hermitian(dim, rng);
        const HermitianPropagator prop(h);
        const double t1 = time(rng);
        const double t2 = time(rng);

        const ComplexMatrix u1 = prop.at(t1);
        CHECK(unitarity_defect(u1) <= 1e-9);

        const StateVector psi = testing::random_state(dim, rng);
        CHECK(std::abs(prop.apply(psi, t1).norm() - 1.0) <= 1e-9);
        CHECK((prop.apply(psi, t1) - u1 * psi).norm() <= 1e-10);

        CHECK(max_abs_deviation(matexp_hermitian_prop(h, t1 + t2), u1 * prop.at(t2)) <= 1e-8);
    }
}

TEST_CASE("partial trace of product and Bell states") {
    StateVector a(2), b(2);
    a << Complex(0.6, 0.0), Complex(0.0, 0.8);
    b << Complex(1.0, 1.0) / std::sqrt(3.0), Complex(1.0, 0.0) / std::sqrt(3.0);
    const std::vector<std::size_t> dims = {2, 2};
    const std::size_t first[] = {0};
    const std::size_t second[] = {1};
    CHECK(max_abs_deviation(partial_trace(kron(a, b), dims, first), a * a.adjoint()) < 1e-15);
    CHECK(max_abs_deviation(partial_trace(kron(a, b), dims, second), b * b.adjoint()) < 1e-15);

    StateVector bell = StateVector::Zero(4);
    bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
    const ComplexMatrix half = 0.5 * identity(2);
    CHECK(max_abs_deviation(partial_trace(bell, dims, first), half) < 1e-15);
    CHECK(max_abs_deviation(partial_trace(bell, dims, second), half) < 1e-15);
}

TEST_CASE("partial trace dimension mismatch") {
    const std::vector<std::size_t> dims = {2, 3};
    const std::size_t keep[] = {0};
    try {
        partial_trace(StateVector::Zero(4), dims, keep);
        FAIL("expected DimensionMismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DimensionMismatch);
    }
}

TEST_CASE("property: reduced densities are PSD with unit trace, complementary traces agree") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::size_t> factor(2, 4);
    for (int trial = 0; trial < 40; ++trial) {
        const std::vector<std::size_t> dims = {factor(rng), factor(rng), factor(rng)};
        const StateVector psi = testing::random_state(dims[0] * dims[1] * dims[2], rng);
        const std::size_t keep_a[] = {0, 2};
        const std::size_t keep_b[] = {1};
        const ComplexMatrix ra = partial_trace(psi, dims, keep_a);
        const ComplexMatrix rb = partial_trace(psi, dims, keep_b);
        CHECK(is_hermitian(ra));
        CHECK(std::abs(ra.trace() - rb.trace()) < 1e-12);
        CHECK(std::abs(ra.trace() - Complex(1.0)) < 1e-12);
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(ra);
        CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
    }
}

TEST_CASE("expectation values") {
    std::mt19937_64 rng(3);
    const StateVector psi = testing::random_state(5, rng);
    CHECK(std::abs(expectation(identity(5), psi) - Complex(1.0)) < 1e-14);

    StateVector up = StateVector::Zero(2);
    up(0) = 1.0;
    CHECK(std::abs(expectation(pauli_z(), up) - Complex(1.0)) == 0.0);

    const ComplexMatrix h = testing::random_hermitian(5, rng);
    CHECK(std::abs(expectation(h, psi).imag()) < 1e-10);
    CHECK_THROWS_AS(expectation(identity(3), psi), Error);
}

TEST_CASE("distances") {
    std::mt19937_64 rng(11);
    const StateVector psi = testing::random_state(3, rng);
    const ComplexMatrix rho = psi * psi.adjoint();
    CHECK(trace_distance(rho, rho) == 0.0);

    ComplexMatrix up = ComplexMatrix::Zero(2, 2), down = ComplexMatrix::Zero(2, 2);
    up(0, 0) = 1.0;
    down(1, 1) = 1.0;
    CHECK(trace_distance(up, down) == doctest::Approx(1.0).epsilon(1e-15));

    ComplexMatrix mixed = 0.5 * identity(2);
    // Eigenvalues of diag(1/2,1/2) - diag(0,1) are +1/2 and -1/2.
    CHECK(trace_distance(mixed, down) == doctest::Approx(0.5).epsilon(1e-15));

    CHECK(frobenius_distance(up, down) == doctest::Approx(std::sqrt(2.0)));
    CHECK(max_abs_deviation(dagger(pauli_y()), pauli_y()) == 0.0);
    CHECK_THROWS_AS(trace_distance(up, identity(3)), Error);
}

TEST_CASE("apply_local matches the Kronecker-embedded operator") {
    std::mt19937_64 rng(5);
    const std::vector<std::size_t> dims = {3, 2, 2};
    const StateVector psi = testing::random_state(12, rng);
    const ComplexMatrix op = testing::random_hermitian(2, rng);
    const ComplexMatrix full = kron(kron(identity(3), op), identity(2));
    CHECK((apply_local(psi, dims, 1, op) - full * psi).norm() < 1e-13);

    const ComplexMatrix op3 = testing::random_hermitian(3, rng);
    const ComplexMatrix full3 = kron(op3, identity(4));
    CHECK((apply_local(psi, dims, 0, op3) - full3 * psi).norm() < 1e-13);
}

TEST_CASE("non-finite entries are rejected") {
    ComplexMatrix h = identity(2);
    h(0, 0) = std::nan("");
    CHECK_THROWS_AS(HermitianPropagator{h}, Error);
}
