#include "thermolimit/spin_ensemble.hpp"

#include "thermolimit/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace thermolimit::ensemble {

namespace {

constexpr double kSiteNormTol = 1e-12;

double magnetization_sum(const ProductSpinState& state) {
    double sum = 0.0;
    for (const auto& site : state.sites()) sum += moments(site).z;
    return sum;
}

void require_matching(const ProductSpinState& state, const EnsembleConfig& cfg) {
    cfg.validate();
    if (cfg.n_spins != state.size()) {
        throw Error(ErrorKind::DimensionMismatch,
                    "config has N=" + std::to_string(cfg.n_spins) + " but state has " +
                        std::to_string(state.size()) + " sites");
    }
}

bool is_zero_mean(double magnetization, std::size_t n) {
    return std::abs(magnetization) <= 1e-12 * static_cast<double>(n);
}

} // namespace

SiteMoments moments(const SiteAmplitudes& site) {
    const Complex coherence = std::conj(site.beta) * site.alpha;
    return {2.0 * coherence.real(), 2.0 * coherence.imag(),
            std::norm(site.beta) - std::norm(site.alpha)};
}

ProductSpinState::ProductSpinState(std::vector<SiteAmplitudes> sites) : sites_(std::move(sites)) {
    if (sites_.empty()) {
        throw Error(ErrorKind::InvalidArgument, "a product state needs N >= 1 sites");
    }
    for (std::size_t i = 0; i < sites_.size(); ++i) {
        const auto& s = sites_[i];
        if (!std::isfinite(std::abs(s.alpha)) || !std::isfinite(std::abs(s.beta))) {
            throw Error(ErrorKind::NonFinite, "site " + std::to_string(i));
        }
        const double norm = std::norm(s.alpha) + std::norm(s.beta);
        if (std::abs(norm - 1.0) > kSiteNormTol) {
            throw Error(ErrorKind::InvalidArgument,
                        "site " + std::to_string(i) + " has |alpha|^2+|beta|^2 = " +
                            std::to_string(norm));
        }
    }
}

ProductSpinState ProductSpinState::uniform(std::size_t n_sites, const SiteAmplitudes& site) {
    return ProductSpinState(std::vector<SiteAmplitudes>(n_sites, site));
}

numerics::StateVector ProductSpinState::to_statevector() const {
    std::vector<numerics::Qubit> qubits;
    qubits.reserve(sites_.size());
    for (const auto& s : sites_) qubits.emplace_back(s.beta, s.alpha); // index 0 = up
    return numerics::product_state(qubits);
}

void EnsembleConfig::validate() const {
    if (n_spins < 1) throw Error(ErrorKind::InvalidArgument, "N must be >= 1");
    if (!std::isfinite(lambda) || lambda == 0.0) {
        throw Error(ErrorKind::InvalidArgument, "lambda must be finite and nonzero");
    }
}

double mean_energy(const ProductSpinState& state, const EnsembleConfig& cfg) {
    require_matching(state, cfg);
    return cfg.lambda * magnetization_sum(state);
}

double energy_spread(const ProductSpinState& state, const EnsembleConfig& cfg) {
    require_matching(state, cfg);
    double variance = 0.0;
    for (const auto& site : state.sites()) {
        const double m = moments(site).z;
        variance += 1.0 - m * m;
    }
    return std::abs(cfg.lambda) * std::sqrt(std::max(variance, 0.0));
}

double relative_fluctuation(const ProductSpinState& state, const EnsembleConfig& cfg) {
    require_matching(state, cfg);
    const double m_sum = magnetization_sum(state);
    if (is_zero_mean(m_sum, state.size())) {
        throw Error(ErrorKind::ZeroMeanEnergy, "<H> = 0, the ratio is undefined");
    }
    return energy_spread(state, cfg) / (cfg.lambda * m_sum);
}

SiteSampler SiteSampler::fixed(double beta_sq) {
    SiteSampler s;
    s.kind = Kind::Fixed;
    s.magnetization_lo = s.magnetization_hi = 2.0 * beta_sq - 1.0;
    s.random_phase = false;
    return s;
}

SiteSampler SiteSampler::uniform(double m_lo, double m_hi) {
    SiteSampler s;
    s.kind = Kind::UniformMagnetization;
    s.magnetization_lo = m_lo;
    s.magnetization_hi = m_hi;
    return s;
}

void SiteSampler::validate() const {
    auto in_range = [](double m) { return std::isfinite(m) && m >= -1.0 && m <= 1.0; };
    if (!in_range(magnetization_lo) || !in_range(magnetization_hi) ||
        magnetization_lo > magnetization_hi) {
        throw Error(ErrorKind::InvalidArgument, "magnetization interval must lie in [-1, 1]");
    }
}

ProductSpinState SiteSampler::sample(std::size_t n_sites, std::mt19937_64& rng) const {
    validate();
    std::uniform_real_distribution<double> magnet(magnetization_lo, magnetization_hi);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::vector<SiteAmplitudes> sites;
    sites.reserve(n_sites);
    for (std::size_t i = 0; i < n_sites; ++i) {
        const double m = kind == Kind::Fixed ? magnetization_lo : magnet(rng);
        const double phi = random_phase ? phase(rng) : 0.0;
        const double p_up = 0.5 * (1.0 + m);
        sites.push_back({std::polar(std::sqrt(1.0 - p_up), phi), Complex(std::sqrt(p_up), 0.0)});
    }
    return ProductSpinState(std::move(sites));
}

LineFit fit_line(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) {
        throw Error(ErrorKind::DimensionMismatch, "fit_line needs equal-length inputs");
    }
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    if (xs.empty()) throw Error(ErrorKind::InsufficientPoints, "no points to fit");
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx <= 0.0) {
        throw Error(ErrorKind::InsufficientPoints, "need at least two distinct abscissae");
    }
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

ScalingTable scaling_experiment(const SiteSampler& sampler, std::span<const std::size_t> n_list,
                                std::uint64_t seed, double lambda) {
    sampler.validate();
    if (n_list.empty()) throw Error(ErrorKind::InsufficientPoints, "empty N list");
    for (std::size_t n : n_list) {
        if (n < 2) throw Error(ErrorKind::InvalidArgument, "scaling needs every N >= 2");
    }

    std::mt19937_64 rng(seed);
    ScalingTable table;
    std::vector<double> log_n, log_ratio;
    for (std::size_t n : n_list) {
        const EnsembleConfig cfg{n, lambda};
        int attempt = 0;
        for (;; ++attempt) {
            if (attempt == kMaxResamples) {
                throw Error(ErrorKind::ZeroMeanEnergy,
                            "sampler kept producing <H> = 0 at N=" + std::to_string(n));
            }
            const ProductSpinState state = sampler.sample(n, rng);
            if (is_zero_mean(magnetization_sum(state), n)) continue;
            ScalingRow row;
            row.n = n;
            row.mean_energy = mean_energy(state, cfg);
            row.delta_h = energy_spread(state, cfg);
            row.ratio = row.delta_h / row.mean_energy;
            table.rows.push_back(row);
            log_n.push_back(std::log(static_cast<double>(n)));
            log_ratio.push_back(std::log(std::abs(row.ratio)));
            break;
        }
    }
    table.fit = fit_line(log_n, log_ratio);
    return table;
}

std::vector<CollectiveSample> collective_spin_trajectory(const ProductSpinState& state,
                                                         const EnsembleConfig& cfg,
                                                         std::span<const double> t_grid) {
    require_matching(state, cfg);
    std::vector<SiteMoments> site_moments;
    site_moments.reserve(state.size());
    SiteMoments total;
    for (const auto& site : state.sites()) {
        const SiteMoments m = moments(site);
        site_moments.push_back(m);
        total.x += m.x;
        total.y += m.y;
        total.z += m.z;
    }

    std::vector<CollectiveSample> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) {
        if (!std::isfinite(t)) throw Error(ErrorKind::NonFinite, "time grid value");
        const double c = std::cos(2.0 * cfg.lambda * t);
        const double s = std::sin(2.0 * cfg.lambda * t);
        double var_x = 0.0;
        for (const auto& m : site_moments) {
            const double x_t = m.x * c - m.y * s;
            var_x += 1.0 - x_t * x_t;
        }
        out.push_back({t, total.x * c - total.y * s, total.y * c + total.x * s, total.z,
                       std::sqrt(std::max(var_x, 0.0))});
    }
    return out;
}

EnsembleOracleReport dense_oracle_check(const ProductSpinState& state, const EnsembleConfig& cfg,
                                        double t) {
    require_matching(state, cfg);
    const std::size_t n = state.size();
    if (n > kMaxOracleSpins) {
        throw Error(ErrorKind::DimensionTooLarge,
                    "dense oracle supports N <= 12, got " + std::to_string(n));
    }

    const std::vector<std::size_t> dims(n, 2);
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);

    // H is diagonal in the z basis: lambda * (#up - #down) for each bit string.
    numerics::RealVector energies(dim);
    for (Eigen::Index idx = 0; idx < dim; ++idx) {
        int sz = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const bool down = (static_cast<std::size_t>(idx) >> (n - 1 - k)) & 1U;
            sz += down ? -1 : 1;
        }
        energies(idx) = cfg.lambda * sz;
    }

    const numerics::StateVector psi =
        numerics::evolve_diagonal(state.to_statevector(), energies, t);

    auto collective = [&](const numerics::ComplexMatrix& pauli) {
        numerics::StateVector acc = numerics::StateVector::Zero(dim);
        for (std::size_t k = 0; k < n; ++k) acc += numerics::apply_local(psi, dims, k, pauli);
        return acc;
    };
    const numerics::StateVector jx_psi = collective(numerics::pauli_x());
    const numerics::StateVector jy_psi = collective(numerics::pauli_y());
    const numerics::StateVector jz_psi = collective(numerics::pauli_z());

    const double jx = psi.dot(jx_psi).real();
    const double jy = psi.dot(jy_psi).real();
    const double jz = psi.dot(jz_psi).real();
    const double h_mean = cfg.lambda * jz;
    // Spreads as ||(A - <A>) psi||, which stays accurate near eigenstates.
    const double h_spread = (cfg.lambda * jz_psi - h_mean * psi).norm();
    const double jx_spread = (jx_psi - jx * psi).norm();

    const double t_arr[] = {t};
    const CollectiveSample closed = collective_spin_trajectory(state, cfg, t_arr).front();

    EnsembleOracleReport r;
    r.mean_energy_dev = std::abs(h_mean - mean_energy(state, cfg));
    r.delta_h_dev = std::abs(h_spread - energy_spread(state, cfg));
    r.jx_dev = std::abs(jx - closed.jx);
    r.jy_dev = std::abs(jy - closed.jy);
    r.jz_dev = std::abs(jz - closed.jz);
    r.delta_jx_dev = std::abs(jx_spread - closed.delta_jx);
    r.norm_dev = std::abs(psi.norm() - 1.0);
    r.max_deviation = std::max({r.mean_energy_dev, r.delta_h_dev, r.jx_dev, r.jy_dev, r.jz_dev,
                                r.delta_jx_dev, r.norm_dev});
    return r;
}

} // namespace thermolimit::ensemble
