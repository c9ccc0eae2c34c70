// numerics.hpp: dense complex linear algebra and quantum-state utilities
//
// Every model module checks its closed forms against the routines here, so they
// stay dense and literal: Kronecker products, exact propagators from a Hermitian
// eigendecomposition, partial traces and the usual distance measures.
//
// Basis convention for two-level factors: index 0 is |up> (sigma_z = +1),
// index 1 is |down>. In a Kronecker product the first factor is the most
// significant index.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace thermolimit::numerics {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Qubit = Eigen::Vector2cd;

inline constexpr std::size_t kDefaultMaxDim = std::size_t{1} << 22;
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kNormTol = 1e-10;

ComplexMatrix identity(std::size_t dim);
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

// Throws NonFinite if any entry is NaN or infinite.
void require_finite(const ComplexMatrix& m, const char* what);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b,
                   std::size_t max_dim = kDefaultMaxDim);
StateVector kron(const StateVector& a, const StateVector& b,
                 std::size_t max_dim = kDefaultMaxDim);

// Sum over sites of `site_op` acting on one factor of an n-site register of
// two-level systems (e.g. sum_i sigma_x,i).
ComplexMatrix site_sum(const ComplexMatrix& site_op, std::size_t n_sites,
                       std::size_t max_dim = kDefaultMaxDim);

StateVector product_state(std::span<const Qubit> sites, std::size_t max_dim = kDefaultMaxDim);

ComplexMatrix dagger(const ComplexMatrix& a);
double max_abs_deviation(const ComplexMatrix& a, const ComplexMatrix& b);
double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b);
// Half the trace norm of a - b.
double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b);

bool is_hermitian(const ComplexMatrix& h, double tol = kHermitianTol);
double unitarity_defect(const ComplexMatrix& u); // max |U^dag U - I|

Complex expectation(const ComplexMatrix& op, const StateVector& state);

// Reduced density matrix over the factors listed in `keep` (any order; the
// result follows ascending factor order).
ComplexMatrix partial_trace(const StateVector& state, std::span<const std::size_t> factor_dims,
                            std::span<const std::size_t> keep);
// Tr_env |ket><bra|; used for cross terms between two joint states.
ComplexMatrix partial_trace(const StateVector& ket, const StateVector& bra,
                            std::span<const std::size_t> factor_dims,
                            std::span<const std::size_t> keep);

// Applies a local operator to one factor of a tensor-product state.
StateVector apply_local(const StateVector& state, std::span<const std::size_t> factor_dims,
                        std::size_t factor, const ComplexMatrix& op);

// exp(-i diag(energies) t) |state>, for Hamiltonians diagonal in the stored basis.
StateVector evolve_diagonal(const StateVector& state, const RealVector& energies, double t);

// exp(-i h t) via one Hermitian eigendecomposition; reusable across many t.
class HermitianPropagator {
public:
    explicit HermitianPropagator(const ComplexMatrix& h);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(energies_.size()); }
    const RealVector& energies() const noexcept { return energies_; }
    const ComplexMatrix& eigenvectors() const noexcept { return vectors_; }

    ComplexMatrix at(double t) const;
    StateVector apply(const StateVector& state, double t) const;

private:
    RealVector energies_;
    ComplexMatrix vectors_;
};

ComplexMatrix matexp_hermitian_prop(const ComplexMatrix& h, double t);

} // namespace thermolimit::numerics
