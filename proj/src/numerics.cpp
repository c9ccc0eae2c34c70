#include "thermolimit/numerics.hpp"

#include "thermolimit/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace thermolimit::numerics {

namespace {

std::size_t checked_product(std::size_t a, std::size_t b, std::size_t max_dim) {
    if (a != 0 && b > max_dim / a) {
        throw Error(ErrorKind::DimensionTooLarge,
                    std::to_string(a) + " x " + std::to_string(b) + " exceeds " +
                        std::to_string(max_dim));
    }
    const std::size_t p = a * b;
    if (p > max_dim) {
        throw Error(ErrorKind::DimensionTooLarge,
                    std::to_string(p) + " exceeds " + std::to_string(max_dim));
    }
    return p;
}

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw Error(ErrorKind::DimensionMismatch,
                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                        std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    }
}

struct FactorLayout {
    std::vector<std::size_t> strides;
    std::size_t total = 1;
};

FactorLayout layout_of(std::span<const std::size_t> factor_dims) {
    FactorLayout layout;
    layout.strides.assign(factor_dims.size(), 1);
    for (std::size_t j = factor_dims.size(); j-- > 0;) {
        layout.strides[j] = layout.total;
        layout.total *= factor_dims[j];
    }
    return layout;
}

} // namespace

ComplexMatrix identity(std::size_t dim) {
    const auto n = static_cast<Eigen::Index>(dim);
    return ComplexMatrix::Identity(n, n);
}

ComplexMatrix pauli_x() {
    ComplexMatrix m(2, 2);
    m << 0.0, 1.0,
         1.0, 0.0;
    return m;
}

ComplexMatrix pauli_y() {
    ComplexMatrix m(2, 2);
    m << 0.0, Complex(0.0, -1.0),
         Complex(0.0, 1.0), 0.0;
    return m;
}

ComplexMatrix pauli_z() {
    ComplexMatrix m(2, 2);
    m << 1.0, 0.0,
         0.0, -1.0;
    return m;
}

void require_finite(const ComplexMatrix& m, const char* what) {
    if (!m.allFinite()) {
        throw Error(ErrorKind::NonFinite, std::string(what) + " has NaN or Inf entries");
    }
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b, std::size_t max_dim) {
    const std::size_t rows = checked_product(static_cast<std::size_t>(a.rows()),
                                             static_cast<std::size_t>(b.rows()), max_dim);
    const std::size_t cols = checked_product(static_cast<std::size_t>(a.cols()),
                                             static_cast<std::size_t>(b.cols()), max_dim);
    ComplexMatrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

StateVector kron(const StateVector& a, const StateVector& b, std::size_t max_dim) {
    const std::size_t n = checked_product(static_cast<std::size_t>(a.size()),
                                          static_cast<std::size_t>(b.size()), max_dim);
    StateVector out(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        out.segment(i * b.size(), b.size()) = a(i) * b;
    }
    return out;
}

ComplexMatrix site_sum(const ComplexMatrix& site_op, std::size_t n_sites, std::size_t max_dim) {
    if (n_sites == 0) {
        throw Error(ErrorKind::InvalidArgument, "site_sum needs at least one site");
    }
    const auto d = static_cast<std::size_t>(site_op.rows());
    std::size_t total = 1;
    for (std::size_t i = 0; i < n_sites; ++i) total = checked_product(total, d, max_dim);

    ComplexMatrix sum = ComplexMatrix::Zero(static_cast<Eigen::Index>(total),
                                            static_cast<Eigen::Index>(total));
    for (std::size_t k = 0; k < n_sites; ++k) {
        ComplexMatrix term = (k == 0) ? site_op : identity(d);
        for (std::size_t j = 1; j < n_sites; ++j) {
            term = kron(term, j == k ? site_op : identity(d), max_dim);
        }
        sum += term;
    }
    return sum;
}

StateVector product_state(std::span<const Qubit> sites, std::size_t max_dim) {
    if (sites.empty()) {
        throw Error(ErrorKind::InvalidArgument, "product_state needs at least one site");
    }
    StateVector psi = sites.front();
    for (std::size_t k = 1; k < sites.size(); ++k) {
        psi = kron(psi, StateVector(sites[k]), max_dim);
    }
    return psi;
}

ComplexMatrix dagger(const ComplexMatrix& a) { return a.adjoint(); }

double max_abs_deviation(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_shape(a, b);
    if (a.size() == 0) return 0.0;
    return (a - b).cwiseAbs().maxCoeff();
}

double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_shape(a, b);
    return (a - b).norm();
}

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_shape(a, b);
    const ComplexMatrix diff = a - b;
    if (is_hermitian(diff)) {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(diff, Eigen::EigenvaluesOnly);
        return 0.5 * solver.eigenvalues().cwiseAbs().sum();
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(diff);
    return 0.5 * svd.singularValues().sum();
}

bool is_hermitian(const ComplexMatrix& h, double tol) {
    if (h.rows() != h.cols()) return false;
    if (h.size() == 0) return true;
    return (h - h.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double unitarity_defect(const ComplexMatrix& u) {
    const ComplexMatrix gram = u.adjoint() * u;
    return (gram - identity(static_cast<std::size_t>(u.cols()))).cwiseAbs().maxCoeff();
}

Complex expectation(const ComplexMatrix& op, const StateVector& state) {
    if (op.rows() != op.cols() || op.cols() != state.size()) {
        throw Error(ErrorKind::DimensionMismatch,
                    "operator " + std::to_string(op.rows()) + "x" + std::to_string(op.cols()) +
                        " vs state " + std::to_string(state.size()));
    }
    return state.dot(op * state); // Eigen's dot conjugates the left argument
}

ComplexMatrix partial_trace(const StateVector& state, std::span<const std::size_t> factor_dims,
                            std::span<const std::size_t> keep) {
    return partial_trace(state, state, factor_dims, keep);
}

ComplexMatrix partial_trace(const StateVector& ket, const StateVector& bra,
                            std::span<const std::size_t> factor_dims,
                            std::span<const std::size_t> keep) {
    const FactorLayout layout = layout_of(factor_dims);
    if (layout.total != static_cast<std::size_t>(ket.size()) ||
        layout.total != static_cast<std::size_t>(bra.size())) {
        throw Error(ErrorKind::DimensionMismatch,
                    "factor dims multiply to " + std::to_string(layout.total) +
                        " but state has " + std::to_string(ket.size()));
    }

    std::vector<bool> kept(factor_dims.size(), false);
    for (std::size_t k : keep) {
        if (k >= factor_dims.size() || kept[k]) {
            throw Error(ErrorKind::InvalidArgument, "bad keep index " + std::to_string(k));
        }
        kept[k] = true;
    }

    // Strides of each factor inside the kept and the traced-out blocks.
    std::vector<std::size_t> keep_stride(factor_dims.size(), 0);
    std::vector<std::size_t> env_stride(factor_dims.size(), 0);
    std::size_t keep_dim = 1;
    std::size_t env_dim = 1;
    for (std::size_t j = factor_dims.size(); j-- > 0;) {
        if (kept[j]) {
            keep_stride[j] = keep_dim;
            keep_dim *= factor_dims[j];
        } else {
            env_stride[j] = env_dim;
            env_dim *= factor_dims[j];
        }
    }

    ComplexMatrix ket_blocks(static_cast<Eigen::Index>(keep_dim), static_cast<Eigen::Index>(env_dim));
    ComplexMatrix bra_blocks(static_cast<Eigen::Index>(keep_dim), static_cast<Eigen::Index>(env_dim));
    for (std::size_t idx = 0; idx < layout.total; ++idx) {
        std::size_t a = 0;
        std::size_t e = 0;
        for (std::size_t j = 0; j < factor_dims.size(); ++j) {
            const std::size_t digit = (idx / layout.strides[j]) % factor_dims[j];
            if (kept[j]) a += digit * keep_stride[j];
            else e += digit * env_stride[j];
        }
        const auto ai = static_cast<Eigen::Index>(a);
        const auto ei = static_cast<Eigen::Index>(e);
        ket_blocks(ai, ei) = ket(static_cast<Eigen::Index>(idx));
        bra_blocks(ai, ei) = bra(static_cast<Eigen::Index>(idx));
    }
    return ket_blocks * bra_blocks.adjoint();
}

StateVector apply_local(const StateVector& state, std::span<const std::size_t> factor_dims,
                        std::size_t factor, const ComplexMatrix& op) {
    const FactorLayout layout = layout_of(factor_dims);
    if (layout.total != static_cast<std::size_t>(state.size())) {
        throw Error(ErrorKind::DimensionMismatch, "state does not match factor dims");
    }
    if (factor >= factor_dims.size()) {
        throw Error(ErrorKind::InvalidArgument, "factor index out of range");
    }
    const std::size_t d = factor_dims[factor];
    if (static_cast<std::size_t>(op.rows()) != d || static_cast<std::size_t>(op.cols()) != d) {
        throw Error(ErrorKind::DimensionMismatch, "local operator does not match factor dim");
    }

    const std::size_t stride = layout.strides[factor];
    StateVector out = StateVector::Zero(state.size());
    for (std::size_t idx = 0; idx < layout.total; ++idx) {
        const std::size_t digit = (idx / stride) % d;
        if (digit != 0) continue;
        // idx is the base of one fiber along `factor`.
        for (std::size_t r = 0; r < d; ++r) {
            Complex acc = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                acc += op(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) *
                       state(static_cast<Eigen::Index>(idx + c * stride));
            }
            out(static_cast<Eigen::Index>(idx + r * stride)) = acc;
        }
    }
    return out;
}

StateVector evolve_diagonal(const StateVector& state, const RealVector& energies, double t) {
    if (state.size() != energies.size()) {
        throw Error(ErrorKind::DimensionMismatch, "energies do not match state");
    }
    StateVector out(state.size());
    for (Eigen::Index i = 0; i < state.size(); ++i) {
        out(i) = std::polar(1.0, -energies(i) * t) * state(i);
    }
    return out;
}

HermitianPropagator::HermitianPropagator(const ComplexMatrix& h) {
    require_finite(h, "Hamiltonian");
    if (!is_hermitian(h)) {
        throw Error(ErrorKind::NotHermitian, "input deviates from its adjoint by more than 1e-10");
    }
    // Symmetrise away the sub-tolerance residue before factorising.
    const ComplexMatrix sym = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::NonFinite, "eigendecomposition failed");
    }
    energies_ = solver.eigenvalues();
    vectors_ = solver.eigenvectors();
}

ComplexMatrix HermitianPropagator::at(double t) const {
    Eigen::VectorXcd phases(energies_.size());
    for (Eigen::Index i = 0; i < energies_.size(); ++i) {
        phases(i) = std::polar(1.0, -energies_(i) * t);
    }
    return vectors_ * phases.asDiagonal() * vectors_.adjoint();
}

StateVector HermitianPropagator::apply(const StateVector& state, double t) const {
    if (state.size() != energies_.size()) {
        throw Error(ErrorKind::DimensionMismatch, "state does not match propagator");
    }
    StateVector coeffs = vectors_.adjoint() * state;
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
        coeffs(i) *= std::polar(1.0, -energies_(i) * t);
    }
    return vectors_ * coeffs;
}

ComplexMatrix matexp_hermitian_prop(const ComplexMatrix& h, double t) {
    return HermitianPropagator(h).at(t);
}

} // namespace thermolimit::numerics
