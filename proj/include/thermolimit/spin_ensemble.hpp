// spin_ensemble.hpp: N independent two-level systems under H = lambda * sum_i sigma_z,i
//
// Product states make every moment a sum over sites, so the closed forms below
// are exact at any N and cost O(N). The dense_oracle_check builds the 2^N
// statevector for small N and recomputes the same numbers the long way.

#pragma once

#include "thermolimit/numerics.hpp"

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace thermolimit::ensemble {

using numerics::Complex;

// alpha multiplies |down>, beta multiplies |up>.
struct SiteAmplitudes {
    Complex alpha;
    Complex beta;
};

// Bloch components of one site: x = <sigma_x>, y = <sigma_y>, z = <sigma_z>.
struct SiteMoments {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

SiteMoments moments(const SiteAmplitudes& site);

class ProductSpinState {
public:
    explicit ProductSpinState(std::vector<SiteAmplitudes> sites);

    static ProductSpinState uniform(std::size_t n_sites, const SiteAmplitudes& site);

    std::size_t size() const noexcept { return sites_.size(); }
    std::span<const SiteAmplitudes> sites() const noexcept { return sites_; }
    const SiteAmplitudes& operator[](std::size_t i) const { return sites_[i]; }

    // Dense 2^N statevector in the z basis.
    numerics::StateVector to_statevector() const;

private:
    std::vector<SiteAmplitudes> sites_;
};

struct EnsembleConfig {
    std::size_t n_spins = 1;
    double lambda = 1.0;

    void validate() const;
};

double mean_energy(const ProductSpinState& state, const EnsembleConfig& cfg);
// sqrt(<H^2> - <H>^2) = |lambda| sqrt(sum_i (1 - m_i^2)).
double energy_spread(const ProductSpinState& state, const EnsembleConfig& cfg);
// Delta H / <H>; throws ZeroMeanEnergy when <H> vanishes.
double relative_fluctuation(const ProductSpinState& state, const EnsembleConfig& cfg);

// Draws disordered product states. Magnetizations m_i = |beta_i|^2 - |alpha_i|^2
// are either fixed or uniform on [m_lo, m_hi]; the relative phase is uniform.
struct SiteSampler {
    enum class Kind { Fixed, UniformMagnetization };

    Kind kind = Kind::UniformMagnetization;
    double magnetization_lo = 0.3;
    double magnetization_hi = 0.9;
    bool random_phase = true;

    static SiteSampler fixed(double beta_sq);
    static SiteSampler uniform(double m_lo, double m_hi);

    void validate() const;
    ProductSpinState sample(std::size_t n_sites, std::mt19937_64& rng) const;
};

struct ScalingRow {
    std::size_t n = 0;
    double mean_energy = 0.0;
    double delta_h = 0.0;
    double ratio = 0.0;
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

struct ScalingTable {
    std::vector<ScalingRow> rows;
    LineFit fit; // log|ratio| against log N
};

// Ordinary least squares; InsufficientPoints unless at least two distinct x.
LineFit fit_line(std::span<const double> xs, std::span<const double> ys);

inline constexpr int kMaxResamples = 16;

ScalingTable scaling_experiment(const SiteSampler& sampler, std::span<const std::size_t> n_list,
                                std::uint64_t seed, double lambda = 1.0);

struct CollectiveSample {
    double t = 0.0;
    double jx = 0.0;
    double jy = 0.0;
    double jz = 0.0;
    double delta_jx = 0.0;
};

// <J_a>(t) for J_a = sum_i sigma_a,i: the transverse components rotate at 2*lambda,
//   <Jx>(t) = <Jx>(0) cos 2lt - <Jy>(0) sin 2lt,
//   <Jy>(t) = <Jy>(0) cos 2lt + <Jx>(0) sin 2lt,
// and <Jz> is conserved.
std::vector<CollectiveSample> collective_spin_trajectory(const ProductSpinState& state,
                                                         const EnsembleConfig& cfg,
                                                         std::span<const double> t_grid);

inline constexpr std::size_t kMaxOracleSpins = 12;

struct EnsembleOracleReport {
    double mean_energy_dev = 0.0;
    double delta_h_dev = 0.0;
    double jx_dev = 0.0;
    double jy_dev = 0.0;
    double jz_dev = 0.0;
    double delta_jx_dev = 0.0;
    double norm_dev = 0.0;
    double max_deviation = 0.0;
};

// Evolves the 2^N statevector exactly and compares every closed form.
EnsembleOracleReport dense_oracle_check(const ProductSpinState& state, const EnsembleConfig& cfg,
                                        double t);

} // namespace thermolimit::ensemble
