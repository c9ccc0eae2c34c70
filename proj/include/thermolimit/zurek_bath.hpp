// zurek_bath.hpp: one spin coupled to a bath: H = lambda tau_x sum_i sigma_x,i
//
// Prepared as |down> x prod_i |-1>_x, the bath stays put and the spin sees
// exp(i N lambda t tau_x):
//
//   |psi(t)>_I = cos(N lambda t)|down> + i sin(N lambda t)|up>,
//
// a Rabi flop at Omega = 2 N lambda. The reduced density matrix is
//
//   rho_uu = (1 - cos Omega t)/2,  rho_dd = (1 + cos Omega t)/2,
//   rho_ud = (i/2) sin Omega t,    rho_du = conj(rho_ud),
//
// and stays pure at every finite t. Averaging over a window T, or taking
// N -> inf through the regularised limits, leaves diag(1/2, 1/2).

#pragma once

#include "thermolimit/numerics.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace thermolimit::zurek {

using numerics::Complex;

struct BathConfig {
    std::size_t n_spins = 1;
    double lambda = 1.0;
    // N -> inf, evaluated through the regularised limits rather than a large N.
    bool thermodynamic_limit = false;

    void validate() const;
};

// Indexed {up, down}: (0,0) = rho_uu, (0,1) = rho_ud, (1,0) = rho_du, (1,1) = rho_dd.
class QubitDensityMatrix {
public:
    explicit QubitDensityMatrix(const Eigen::Matrix2cd& m);

    const Eigen::Matrix2cd& matrix() const noexcept { return m_; }
    Complex uu() const { return m_(0, 0); }
    Complex ud() const { return m_(0, 1); }
    Complex du() const { return m_(1, 0); }
    Complex dd() const { return m_(1, 1); }
    double purity() const;

private:
    Eigen::Matrix2cd m_;
};

struct SpinAmplitudes {
    Complex down;
    Complex up;
};

SpinAmplitudes evolve_interacting_spin(const BathConfig& cfg, double t);
QubitDensityMatrix reduced_density(const BathConfig& cfg, double t);
double rabi_frequency(const BathConfig& cfg);

// (1/T) int_0^T rho(t) dt. Throws InvalidWindow for T <= 0.
QubitDensityMatrix time_averaged_density(const BathConfig& cfg, double window);
// 1 / (2 N lambda T); 0 in the thermodynamic limit.
double offdiag_bound(const BathConfig& cfg, double window);

struct TrajectoryRow {
    double t = 0.0;
    double rho_uu = 0.0;
    double rho_dd = 0.0;
    double re_rho_ud = 0.0;
    double im_rho_ud = 0.0;
};

std::vector<TrajectoryRow> trajectory(const BathConfig& cfg, std::span<const double> t_grid);

struct LimitReport {
    std::optional<std::size_t> n; // empty in the thermodynamic limit
    double window = 0.0;
    double offdiag_bound = 0.0;
    double offdiag_max = 0.0; // |rho_ud| of the time-averaged density
};

LimitReport limit_report(const BathConfig& cfg, double window);

// Angular frequency of the largest DFT bin (mean removed), and the bin width
// 2 pi / (n dt).
double dominant_angular_frequency(std::span<const double> samples, double dt);
double frequency_bin_width(std::size_t n_samples, double dt);

inline constexpr std::size_t kMaxOracleSpins = 12;

struct ZurekOracleReport {
    double max_deviation = 0.0;
    double norm_deviation = 0.0;
};

// Evolves the 2^{N+1} joint state exactly, traces out the bath and compares
// with reduced_density.
ZurekOracleReport dense_oracle_check(const BathConfig& cfg, double t);

// The joint initial state |down> x prod |-1>_x (spin is factor 0).
numerics::StateVector joint_initial_state(std::size_t n_spins);
// Exact exp(-iHt)|state> on the joint register; H is diagonal in the x basis.
numerics::StateVector evolve_joint(const numerics::StateVector& state, std::size_t n_spins,
                                   double lambda, double t);

} // namespace thermolimit::zurek
