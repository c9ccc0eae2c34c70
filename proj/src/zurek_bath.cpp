#include "thermolimit/zurek_bath.hpp"

#include "thermolimit/error.hpp"
#include "thermolimit/regularization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace thermolimit::zurek {

namespace {

constexpr double kDensityTol = 1e-12;

Eigen::Matrix2cd density_from(double rho_uu, Complex rho_ud) {
    Eigen::Matrix2cd m;
    m << rho_uu, rho_ud,
         std::conj(rho_ud), 1.0 - rho_uu;
    return m;
}

// Regularised N -> inf values: cos(Nx) -> 0 and sin(Nx) -> 0.
QubitDensityMatrix limit_density() {
    const auto schedule = regularization::RegularizationSchedule::decades();
    const double cos_limit =
        regularization::regularized_trig_limit(regularization::TrigKind::Cos, schedule).value;
    const double sin_limit =
        regularization::regularized_trig_limit(regularization::TrigKind::Sin, schedule).value;
    return QubitDensityMatrix(density_from(0.5 * (1.0 - cos_limit), Complex(0.0, 0.5 * sin_limit)));
}

numerics::ComplexMatrix hadamard() {
    numerics::ComplexMatrix h(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    h << s, s,
         s, -s;
    return h;
}

} // namespace

void BathConfig::validate() const {
    if (n_spins < 1 && !thermodynamic_limit) {
        throw Error(ErrorKind::InvalidArgument, "N must be >= 1");
    }
    if (!std::isfinite(lambda) || lambda <= 0.0) {
        throw Error(ErrorKind::InvalidArgument, "lambda must be > 0");
    }
}

QubitDensityMatrix::QubitDensityMatrix(const Eigen::Matrix2cd& m) : m_(m) {
    if (!m_.allFinite()) throw Error(ErrorKind::NonFinite, "density matrix entries");
    if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > kDensityTol) {
        throw Error(ErrorKind::NotHermitian, "qubit density matrix");
    }
    const Complex tr = m_.trace();
    if (std::abs(tr - 1.0) > kDensityTol) {
        throw Error(ErrorKind::InvalidArgument, "trace " + std::to_string(tr.real()) + " != 1");
    }
    const double a = m_(0, 0).real();
    const double d = m_(1, 1).real();
    const double min_eig = 0.5 * (a + d) - std::sqrt(0.25 * (a - d) * (a - d) + std::norm(m_(0, 1)));
    if (min_eig < -kDensityTol) {
        throw Error(ErrorKind::InvalidArgument, "negative eigenvalue " + std::to_string(min_eig));
    }
}

double QubitDensityMatrix::purity() const { return (m_ * m_).trace().real(); }

SpinAmplitudes evolve_interacting_spin(const BathConfig& cfg, double t) {
    cfg.validate();
    if (cfg.thermodynamic_limit) {
        throw Error(ErrorKind::InvalidArgument,
                    "amplitudes have no N -> inf limit; use reduced_density");
    }
    const double theta = static_cast<double>(cfg.n_spins) * cfg.lambda * t;
    return {Complex(std::cos(theta), 0.0), Complex(0.0, std::sin(theta))};
}

QubitDensityMatrix reduced_density(const BathConfig& cfg, double t) {
    cfg.validate();
    if (cfg.thermodynamic_limit) {
        if (t == 0.0) return QubitDensityMatrix(density_from(0.0, 0.0));
        return limit_density();
    }
    const double x = rabi_frequency(cfg) * t;
    return QubitDensityMatrix(density_from(0.5 * (1.0 - std::cos(x)), Complex(0.0, 0.5 * std::sin(x))));
}

double rabi_frequency(const BathConfig& cfg) {
    cfg.validate();
    if (cfg.thermodynamic_limit) {
        throw Error(ErrorKind::InvalidArgument, "Omega = 2 N lambda diverges as N -> inf");
    }
    return 2.0 * static_cast<double>(cfg.n_spins) * cfg.lambda;
}

QubitDensityMatrix time_averaged_density(const BathConfig& cfg, double window) {
    cfg.validate();
    if (!(window > 0.0) || !std::isfinite(window)) {
        throw Error(ErrorKind::InvalidWindow, "window must be finite and > 0");
    }
    if (cfg.thermodynamic_limit) return limit_density();

    const double x = rabi_frequency(cfg) * window;
    const double mean_cos = std::sin(x) / x;
    const double mean_sin = (1.0 - std::cos(x)) / x;
    return QubitDensityMatrix(density_from(0.5 * (1.0 - mean_cos), Complex(0.0, 0.5 * mean_sin)));
}

double offdiag_bound(const BathConfig& cfg, double window) {
    cfg.validate();
    if (!(window > 0.0)) throw Error(ErrorKind::InvalidWindow, "window must be > 0");
    if (cfg.thermodynamic_limit) return 0.0;
    return 1.0 / (rabi_frequency(cfg) * window);
}

std::vector<TrajectoryRow> trajectory(const BathConfig& cfg, std::span<const double> t_grid) {
    std::vector<TrajectoryRow> rows;
    rows.reserve(t_grid.size());
    for (double t : t_grid) {
        const QubitDensityMatrix rho = reduced_density(cfg, t);
        rows.push_back({t, rho.uu().real(), rho.dd().real(), rho.ud().real(), rho.ud().imag()});
    }
    return rows;
}

LimitReport limit_report(const BathConfig& cfg, double window) {
    LimitReport report;
    if (!cfg.thermodynamic_limit) report.n = cfg.n_spins;
    report.window = window;
    report.offdiag_bound = offdiag_bound(cfg, window);
    report.offdiag_max = std::abs(time_averaged_density(cfg, window).ud());
    return report;
}

double dominant_angular_frequency(std::span<const double> samples, double dt) {
    const std::size_t n = samples.size();
    if (n < 4) throw Error(ErrorKind::InsufficientPoints, "need at least 4 samples");
    double mean = 0.0;
    for (double s : samples) mean += s;
    mean /= static_cast<double>(n);

    std::size_t best_bin = 1;
    double best_power = -1.0;
    for (std::size_t k = 1; k <= n / 2; ++k) {
        Complex acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(k * j) / static_cast<double>(n);
            acc += (samples[j] - mean) * std::polar(1.0, angle);
        }
        if (std::norm(acc) > best_power) {
            best_power = std::norm(acc);
            best_bin = k;
        }
    }
    return static_cast<double>(best_bin) * frequency_bin_width(n, dt);
}

double frequency_bin_width(std::size_t n_samples, double dt) {
    return 2.0 * std::numbers::pi / (static_cast<double>(n_samples) * dt);
}

numerics::StateVector joint_initial_state(std::size_t n_spins) {
    std::vector<numerics::Qubit> sites;
    sites.emplace_back(0.0, 1.0); // |down>
    const numerics::Qubit minus = numerics::Qubit(1.0, -1.0) / std::sqrt(2.0);
    for (std::size_t k = 0; k < n_spins; ++k) sites.push_back(minus);
    return numerics::product_state(sites);
}

numerics::StateVector evolve_joint(const numerics::StateVector& state, std::size_t n_spins,
                                   double lambda, double t) {
    const std::size_t n_qubits = n_spins + 1;
    const std::vector<std::size_t> dims(n_qubits, 2);
    const numerics::ComplexMatrix h = hadamard();

    numerics::StateVector psi = state;
    for (std::size_t q = 0; q < n_qubits; ++q) psi = numerics::apply_local(psi, dims, q, h);

    // In the Hadamard-rotated basis bit 0 is sigma_x = +1 and bit 1 is -1.
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n_qubits);
    numerics::RealVector energies(dim);
    for (Eigen::Index idx = 0; idx < dim; ++idx) {
        const auto bits = static_cast<std::size_t>(idx);
        auto x_of = [&](std::size_t q) { return ((bits >> (n_qubits - 1 - q)) & 1U) ? -1.0 : 1.0; };
        double bath_sum = 0.0;
        for (std::size_t q = 1; q < n_qubits; ++q) bath_sum += x_of(q);
        energies(idx) = lambda * x_of(0) * bath_sum;
    }
    psi = numerics::evolve_diagonal(psi, energies, t);

    for (std::size_t q = 0; q < n_qubits; ++q) psi = numerics::apply_local(psi, dims, q, h);
    return psi;
}

ZurekOracleReport dense_oracle_check(const BathConfig& cfg, double t) {
    cfg.validate();
    if (cfg.thermodynamic_limit) {
        throw Error(ErrorKind::InvalidArgument, "dense oracle needs a finite N");
    }
    if (cfg.n_spins > kMaxOracleSpins) {
        throw Error(ErrorKind::DimensionTooLarge,
                    "dense oracle supports N <= 12, got " + std::to_string(cfg.n_spins));
    }
    const numerics::StateVector psi =
        evolve_joint(joint_initial_state(cfg.n_spins), cfg.n_spins, cfg.lambda, t);
    const std::vector<std::size_t> dims(cfg.n_spins + 1, 2);
    const std::size_t keep[] = {0};
    const numerics::ComplexMatrix rho = numerics::partial_trace(psi, dims, keep);

    ZurekOracleReport report;
    report.max_deviation = numerics::max_abs_deviation(rho, reduced_density(cfg, t).matrix());
    report.norm_deviation = std::abs(psi.norm() - 1.0);
    return report;
}

} // namespace thermolimit::zurek
