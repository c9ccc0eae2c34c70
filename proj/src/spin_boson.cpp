#include "thermolimit/spin_boson.hpp"

#include "thermolimit/error.hpp"
#include "thermolimit/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace thermolimit::spinboson {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_time(double t) {
    if (!std::isfinite(t) || t < 0.0) {
        throw Error(ErrorKind::InvalidArgument, "time must be finite and >= 0");
    }
}

int bit_sign(std::size_t spins, std::size_t n_spins, std::size_t k) {
    return ((spins >> (n_spins - 1 - k)) & 1U) ? -1 : 1; // bit 0 = up
}

// omega a^dag a + g S (a + a^dag) on the field alone.
ComplexMatrix sector_hamiltonian(const SpinBosonConfig& cfg, int sector) {
    const auto m = static_cast<Eigen::Index>(cfg.fock());
    ComplexMatrix h = ComplexMatrix::Zero(m, m);
    for (Eigen::Index n = 0; n < m; ++n) {
        h(n, n) = cfg.omega * static_cast<double>(n);
        if (n + 1 < m) {
            const double c = cfg.g * sector * std::sqrt(static_cast<double>(n + 1));
            h(n, n + 1) = c;
            h(n + 1, n) = c;
        }
    }
    return h;
}

void check_leakage(std::span<const double> populations, const char* what) {
    const double leak = fock_leakage(populations);
    if (leak > kLeakageTol) {
        throw Error(ErrorKind::TruncationLeakage,
                    std::string(what) + ": top Fock levels hold " + std::to_string(leak) +
                        " (> 1e-8); increase fock_dim");
    }
}

std::vector<double> populations_of(const StateVector& field) {
    std::vector<double> p(static_cast<std::size_t>(field.size()));
    for (Eigen::Index n = 0; n < field.size(); ++n) p[static_cast<std::size_t>(n)] = std::norm(field(n));
    return p;
}

double phi(double omega, double t) { return omega * t - std::sin(omega * t); }

Complex beta_of(const SpinBosonConfig& cfg, double t) {
    return (cfg.g / cfg.omega) * (std::polar(1.0, cfg.omega * t) - 1.0);
}

struct NodePlan {
    std::size_t panels = 1;
    quadrature::GaussLegendreRule rule;
};

NodePlan plan_nodes(const QuadratureSpec& quad, double omega, double t, double phase_rate) {
    if (quad.nodes_per_panel == 0 || quad.nodes_per_period < quad.min_nodes_per_period) {
        throw Error(ErrorKind::QuadratureUnderResolved,
                    "need at least " + std::to_string(quad.min_nodes_per_period) +
                        " nodes per omega-period, got " + std::to_string(quad.nodes_per_period));
    }
    const double periods = omega * t / kTwoPi;
    const auto nodes = static_cast<std::size_t>(
        std::ceil(periods * static_cast<double>(quad.nodes_per_period)));
    NodePlan plan;
    plan.panels = std::max<std::size_t>(1, (nodes + quad.nodes_per_panel - 1) / quad.nodes_per_panel);
    plan.rule = quadrature::gauss_legendre(quad.nodes_per_panel);

    const double spacing = t / static_cast<double>(plan.panels * quad.nodes_per_panel);
    if (phase_rate > 0.0 && t > 0.0) {
        const double per_phase_period = (kTwoPi / phase_rate) / spacing;
        if (per_phase_period < static_cast<double>(quad.min_nodes_per_phase_period)) {
            throw Error(ErrorKind::QuadratureUnderResolved,
                        "only " + std::to_string(per_phase_period) +
                            " nodes per period of the fastest phase");
        }
    }
    return plan;
}

// Largest instantaneous frequency of the first-order integrand.
double integrand_rate(const SpinBosonConfig& cfg, const IntegrandShape& shape) {
    const double r = cfg.g / cfg.omega;
    return 2.0 * shape.phase_coefficient * r * r * cfg.omega + cfg.omega;
}

} // namespace

std::size_t recommended_fock_dim(std::size_t n_spins, double g, double omega) {
    const double a = 2.0 * static_cast<double>(n_spins) * std::abs(g) / omega;
    return static_cast<std::size_t>(std::ceil(a * a + 8.0 * a + 20.0));
}

void SpinBosonConfig::validate() const {
    if (n_spins < 1) throw Error(ErrorKind::InvalidArgument, "n_spins must be >= 1");
    if (!std::isfinite(omega) || omega <= 0.0) {
        throw Error(ErrorKind::InvalidArgument, "omega must be > 0");
    }
    if (!std::isfinite(delta) || !std::isfinite(g)) {
        throw Error(ErrorKind::InvalidArgument, "delta and g must be finite");
    }
    if (fock_dim == 1) throw Error(ErrorKind::InvalidArgument, "fock_dim must be >= 2");
    if (n_spins >= 22) throw Error(ErrorKind::DimensionTooLarge, "2^N exceeds the dimension cap");
    const std::size_t spin_dim = std::size_t{1} << n_spins;
    if (fock() > numerics::kDefaultMaxDim / spin_dim) {
        throw Error(ErrorKind::DimensionTooLarge,
                    "2^N * fock_dim exceeds " + std::to_string(numerics::kDefaultMaxDim));
    }
}

std::size_t SpinBosonConfig::fock() const {
    return fock_dim != 0 ? fock_dim : recommended_fock_dim(n_spins, g, omega);
}

std::size_t SpinBosonConfig::total_dim() const { return fock() << n_spins; }

std::vector<std::size_t> SpinBosonConfig::factor_dims() const {
    std::vector<std::size_t> dims(n_spins + 1, 2);
    dims[0] = fock();
    return dims;
}

double fock_leakage(std::span<const double> populations) {
    const std::size_t m = populations.size();
    if (m == 0) return 0.0;
    const std::size_t top = std::max<std::size_t>(1, (m + 9) / 10);
    double leak = 0.0;
    for (std::size_t n = m - top; n < m; ++n) leak += populations[n];
    return leak;
}

std::vector<double> field_populations(const StateVector& joint, const SpinBosonConfig& cfg) {
    const std::size_t m = cfg.fock();
    const std::size_t spin_dim = std::size_t{1} << cfg.n_spins;
    if (static_cast<std::size_t>(joint.size()) != m * spin_dim) {
        throw Error(ErrorKind::DimensionMismatch, "joint state does not match config");
    }
    std::vector<double> p(m, 0.0);
    for (std::size_t n = 0; n < m; ++n) {
        p[n] = joint.segment(static_cast<Eigen::Index>(n * spin_dim),
                             static_cast<Eigen::Index>(spin_dim))
                   .squaredNorm();
    }
    return p;
}

ComplexMatrix build_hamiltonian(const SpinBosonConfig& cfg) {
    cfg.validate();
    const std::size_t n_spins = cfg.n_spins;
    const std::size_t spin_dim = std::size_t{1} << n_spins;
    const std::size_t m = cfg.fock();
    const auto dim = static_cast<Eigen::Index>(m * spin_dim);
    ComplexMatrix h = ComplexMatrix::Zero(dim, dim);

    for (std::size_t n = 0; n < m; ++n) {
        for (std::size_t s = 0; s < spin_dim; ++s) {
            const auto col = static_cast<Eigen::Index>(n * spin_dim + s);
            int sz = 0;
            for (std::size_t k = 0; k < n_spins; ++k) sz += bit_sign(s, n_spins, k);
            h(col, col) += cfg.delta * sz + cfg.omega * static_cast<double>(n);

            // g (a + a^dag) sigma_x,k: flip spin k and move one Fock level.
            for (std::size_t k = 0; k < n_spins; ++k) {
                const std::size_t flipped = s ^ (std::size_t{1} << (n_spins - 1 - k));
                if (n > 0) {
                    h(static_cast<Eigen::Index>((n - 1) * spin_dim + flipped), col) +=
                        cfg.g * std::sqrt(static_cast<double>(n));
                }
                if (n + 1 < m) {
                    h(static_cast<Eigen::Index>((n + 1) * spin_dim + flipped), col) +=
                        cfg.g * std::sqrt(static_cast<double>(n + 1));
                }
            }
        }
    }
    return h;
}

StateVector coherent_state(Complex alpha, std::size_t fock_dim) {
    StateVector c(static_cast<Eigen::Index>(fock_dim));
    if (fock_dim == 0) return c;
    c(0) = std::exp(-0.5 * std::norm(alpha));
    for (Eigen::Index n = 1; n < c.size(); ++n) {
        c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
    }
    return c;
}

StateVector bath_x_state(std::size_t n_spins, int sign) {
    if (sign != 1 && sign != -1) throw Error(ErrorKind::InvalidArgument, "sign must be +1 or -1");
    const numerics::Qubit site = numerics::Qubit(1.0, static_cast<double>(sign)) / std::sqrt(2.0);
    const std::vector<numerics::Qubit> sites(n_spins, site);
    return numerics::product_state(sites);
}

StateVector initial_state(const SpinBosonConfig& cfg) {
    cfg.validate();
    StateVector vacuum = StateVector::Zero(static_cast<Eigen::Index>(cfg.fock()));
    vacuum(0) = 1.0;
    return numerics::kron(vacuum, bath_x_state(cfg.n_spins, -1));
}

ExactEvolver::ExactEvolver(const SpinBosonConfig& cfg)
    : cfg_(cfg), propagator_(build_hamiltonian(cfg)) {}

StateVector ExactEvolver::evolve(const StateVector& initial, double t) const {
    require_time(t);
    if (static_cast<std::size_t>(initial.size()) != cfg_.total_dim()) {
        throw Error(ErrorKind::DimensionMismatch, "initial state does not match config");
    }
    if (std::abs(initial.norm() - 1.0) > numerics::kNormTol) {
        throw Error(ErrorKind::InvalidArgument, "initial state is not normalised");
    }
    StateVector psi = propagator_.apply(initial, t);
    check_leakage(field_populations(psi, cfg_), "exact_evolve");
    return psi;
}

ComplexMatrix ExactEvolver::field_density(const StateVector& initial, double t) const {
    const StateVector psi = evolve(initial, t);
    const std::vector<std::size_t> dims = cfg_.factor_dims();
    const std::size_t keep[] = {0};
    return numerics::partial_trace(psi, dims, keep);
}

StateVector exact_evolve(const SpinBosonConfig& cfg, const StateVector& initial, double t) {
    return ExactEvolver(cfg).evolve(initial, t);
}

LeadingOrderState uf_apply(const SpinBosonConfig& cfg, int bath_sector, double t) {
    cfg.validate();
    require_time(t);
    const int n = static_cast<int>(cfg.n_spins);
    if (std::abs(bath_sector) > n || (n - bath_sector) % 2 != 0) {
        throw Error(ErrorKind::InvalidSector,
                    "S=" + std::to_string(bath_sector) + " is not an eigenvalue for N=" +
                        std::to_string(n));
    }
    const double r = cfg.g / cfg.omega;
    const double s = static_cast<double>(bath_sector);
    LeadingOrderState out;
    out.bath_sector = bath_sector;
    out.phase = s * s * r * r * phi(cfg.omega, t);
    out.alpha.value = r * s * (std::polar(1.0, -cfg.omega * t) - 1.0);
    return out;
}

StateVector leading_order_state(const SpinBosonConfig& cfg, double t) {
    const LeadingOrderState lo = uf_apply(cfg, -static_cast<int>(cfg.n_spins), t);
    const StateVector field = std::polar(1.0, lo.phase) * coherent_state(lo.alpha.value, cfg.fock());
    return numerics::kron(field, bath_x_state(cfg.n_spins, -1));
}

FieldDiagnostics field_diagnostics(const ComplexMatrix& rho) {
    FieldDiagnostics d;
    double mean_sq = 0.0;
    for (Eigen::Index n = 0; n < rho.rows(); ++n) {
        const double dn = static_cast<double>(n);
        const double p = rho(n, n).real();
        d.mean_n += dn * p;
        mean_sq += dn * dn * p;
        if (n > 0) d.mean_a += std::sqrt(dn) * rho(n, n - 1);
    }
    d.variance_n = mean_sq - d.mean_n * d.mean_n;
    d.mandel_q = d.mean_n > 1e-12 ? (d.variance_n - d.mean_n) / d.mean_n : 0.0;
    return d;
}

FieldDensity leading_order_field_density(const SpinBosonConfig& cfg, double t) {
    const LeadingOrderState lo = uf_apply(cfg, -static_cast<int>(cfg.n_spins), t);
    const StateVector field = coherent_state(lo.alpha.value, cfg.fock());
    const std::vector<double> pops = populations_of(field);
    check_leakage(pops, "leading_order_field_density");

    FieldDensity out;
    out.rho = field * field.adjoint();
    out.alpha = lo.alpha;
    out.diagnostics = field_diagnostics(out.rho);
    out.leakage = fock_leakage(pops);
    return out;
}

StateVector chi_prime_state(std::size_t n) {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "chi'_0 needs n >= 1");
    if (n >= 23) throw Error(ErrorKind::DimensionTooLarge, "2^n exceeds the dimension cap");
    const numerics::Qubit minus = numerics::Qubit(1.0, -1.0) / std::sqrt(2.0);
    const numerics::Qubit plus = numerics::Qubit(1.0, 1.0) / std::sqrt(2.0);
    StateVector chi = StateVector::Zero(static_cast<Eigen::Index>(std::size_t{1} << n));
    std::vector<numerics::Qubit> sites(n, minus);
    for (std::size_t k = 0; k < n; ++k) {
        sites[k] = plus;
        chi += numerics::product_state(sites);
        sites[k] = minus;
    }
    return chi;
}

IntegrandShape integrand_shape(std::size_t n_spins, CorrectionForm form) {
    const double n = static_cast<double>(n_spins);
    if (form == CorrectionForm::Alternative) return {2.0 * n - 1.0, 1.0};
    // S = -N to S' = -N + 2: S^2 - S'^2 = 4(N - 1), displacement difference 2 beta.
    return {4.0 * (n - 1.0), 2.0};
}

QuadratureSpec QuadratureSpec::resolving(double phase_rate, double omega) {
    QuadratureSpec spec;
    const auto needed = static_cast<std::size_t>(std::ceil(32.0 * phase_rate / omega));
    const std::size_t per_period = std::max(spec.nodes_per_period, needed);
    spec.nodes_per_period =
        (per_period + spec.nodes_per_panel - 1) / spec.nodes_per_panel * spec.nodes_per_panel;
    return spec;
}

CorrectionState first_order_correction(const SpinBosonConfig& cfg, double t,
                                       const QuadratureSpec& quad, CorrectionForm form) {
    cfg.validate();
    require_time(t);
    const std::size_t m = cfg.fock();
    const std::size_t n = cfg.n_spins;

    CorrectionState out;
    out.amplitudes = StateVector::Zero(static_cast<Eigen::Index>(cfg.total_dim()));
    if (cfg.delta == 0.0 || t == 0.0) return out;

    const IntegrandShape shape = integrand_shape(n, form);
    const NodePlan plan = plan_nodes(quad, cfg.omega, t, integrand_rate(cfg, shape));
    const double r2 = (cfg.g / cfg.omega) * (cfg.g / cfg.omega);

    StateVector integral = StateVector::Zero(static_cast<Eigen::Index>(m));
    quadrature::for_each_node(0.0, t, plan.panels, plan.rule, [&](double tp, double w) {
        const Complex phase = std::polar(1.0, shape.phase_coefficient * r2 * phi(cfg.omega, tp));
        integral += (w * phase) * coherent_state(shape.displacement_scale * beta_of(cfg, tp), m);
    });

    // U_F(t) on the sector of chi'_0 (S' = -N + 2).
    const int sector = 2 - static_cast<int>(n);
    const numerics::HermitianPropagator field_prop(sector_hamiltonian(cfg, sector));
    StateVector field = Complex(0.0, -cfg.delta) * field_prop.apply(integral, t);

    const double field_norm2 = field.squaredNorm();
    if (field_norm2 > 0.0) {
        std::vector<double> pops = populations_of(field);
        for (double& p : pops) p /= field_norm2;
        check_leakage(pops, "first_order_correction");
    }

    out.amplitudes = numerics::kron(field, chi_prime_state(n));
    out.norm = out.amplitudes.norm();
    return out;
}

StateVector dense_first_order_correction(const SpinBosonConfig& cfg, const StateVector& bath,
                                         double t, const QuadratureSpec& quad) {
    cfg.validate();
    require_time(t);
    const std::size_t spin_dim = std::size_t{1} << cfg.n_spins;
    if (static_cast<std::size_t>(bath.size()) != spin_dim) {
        throw Error(ErrorKind::DimensionMismatch, "bath state does not match N");
    }
    StateVector vacuum = StateVector::Zero(static_cast<Eigen::Index>(cfg.fock()));
    vacuum(0) = 1.0;
    const StateVector psi0 = numerics::kron(vacuum, bath);
    if (cfg.delta == 0.0 || t == 0.0) return StateVector::Zero(psi0.size());

    SpinBosonConfig free_cfg = cfg;
    free_cfg.delta = 0.0;
    const numerics::HermitianPropagator uf(build_hamiltonian(free_cfg));
    const std::vector<std::size_t> dims = cfg.factor_dims();

    const IntegrandShape shape = integrand_shape(cfg.n_spins, CorrectionForm::Derived);
    const NodePlan plan = plan_nodes(quad, cfg.omega, t, integrand_rate(cfg, shape));

    StateVector acc = StateVector::Zero(psi0.size());
    quadrature::for_each_node(0.0, t, plan.panels, plan.rule, [&](double tp, double w) {
        const StateVector moved = uf.apply(psi0, tp);
        StateVector jz = StateVector::Zero(psi0.size());
        for (std::size_t k = 1; k <= cfg.n_spins; ++k) {
            jz += numerics::apply_local(moved, dims, k, numerics::pauli_z());
        }
        acc += w * uf.apply(jz, -tp);
    });
    return Complex(0.0, -cfg.delta) * uf.apply(acc, t);
}

double traced_correction_contribution(const SpinBosonConfig& cfg, double t,
                                      const std::optional<StateVector>& bath,
                                      const QuadratureSpec& quad) {
    cfg.validate();
    const std::vector<std::size_t> dims = cfg.factor_dims();
    const std::size_t keep[] = {0};

    StateVector psi0, psi1;
    if (!bath) {
        psi0 = leading_order_state(cfg, t);
        psi1 = first_order_correction(cfg, t, quad).amplitudes;
    } else {
        StateVector normalised = *bath / bath->norm();
        SpinBosonConfig free_cfg = cfg;
        free_cfg.delta = 0.0;
        StateVector vacuum = StateVector::Zero(static_cast<Eigen::Index>(cfg.fock()));
        vacuum(0) = 1.0;
        psi0 = ExactEvolver(free_cfg).evolve(numerics::kron(vacuum, normalised), t);
        psi1 = dense_first_order_correction(cfg, normalised, t, quad);
    }
    return numerics::partial_trace(psi1, psi0, dims, keep).norm();
}

DecayScan riemann_decay_scan(double delta, double omega, double g, double t,
                             std::span<const std::size_t> n_list,
                             std::optional<QuadratureSpec> quad, CorrectionForm form) {
    if (!std::isfinite(delta) || delta == 0.0) {
        throw Error(ErrorKind::InvalidArgument, "delta must be finite and nonzero");
    }
    if (!(g > 0.0) || !(omega > 0.0) || !(t > 0.0) || !std::isfinite(g) ||
        !std::isfinite(omega) || !std::isfinite(t)) {
        throw Error(ErrorKind::InvalidArgument, "riemann_decay_scan needs g, omega, t > 0");
    }
    if (n_list.size() < 2) throw Error(ErrorKind::InsufficientPoints, "need at least two N");
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (n_list[i] < 1 || (i > 0 && n_list[i] <= n_list[i - 1])) {
            throw Error(ErrorKind::InvalidArgument, "n_list must be increasing and >= 1");
        }
    }

    SpinBosonConfig probe{n_list.back(), delta, omega, g, 2};
    const double fastest = integrand_rate(probe, integrand_shape(n_list.back(), form));
    const QuadratureSpec spec = quad.value_or(QuadratureSpec::resolving(fastest, omega));
    const NodePlan plan = plan_nodes(spec, omega, t, fastest);
    const double r = g / omega;

    DecayScan scan;
    for (std::size_t n : n_list) {
        const IntegrandShape shape = integrand_shape(n, form);
        Complex sum = 0.0;
        quadrature::for_each_node(0.0, t, plan.panels, plan.rule, [&](double tp, double w) {
            const Complex b = shape.displacement_scale * r * (std::polar(1.0, omega * tp) - 1.0);
            sum += w * std::polar(std::exp(-0.5 * std::norm(b)),
                                  shape.phase_coefficient * r * r * phi(omega, tp));
        });
        scan.points.push_back({n, std::abs(delta) * std::abs(sum)});
    }

    const std::size_t half = scan.points.size() / 2;
    for (std::size_t i = 0; i < half; ++i) {
        scan.lower_half_max = std::max(scan.lower_half_max, scan.points[i].magnitude);
        scan.upper_half_max =
            std::max(scan.upper_half_max, scan.points[scan.points.size() - 1 - i].magnitude);
    }
    scan.decays = scan.upper_half_max < scan.lower_half_max;
    return scan;
}

CorrectionFormCheck check_correction_forms(const SpinBosonConfig& cfg, double t,
                                           const QuadratureSpec& quad) {
    cfg.validate();
    if (cfg.delta == 0.0) throw Error(ErrorKind::InvalidArgument, "needs delta != 0");
    const StateVector exact = ExactEvolver(cfg).evolve(initial_state(cfg), t);
    const StateVector diff = exact - leading_order_state(cfg, t);
    const StateVector derived = first_order_correction(cfg, t, quad, CorrectionForm::Derived).amplitudes;
    const StateVector alternative = first_order_correction(cfg, t, quad, CorrectionForm::Alternative).amplitudes;

    CorrectionFormCheck out;
    out.delta = cfg.delta;
    out.exact_minus_leading_norm = diff.norm();
    out.derived_norm = derived.norm();
    out.alternative_norm = alternative.norm();
    out.derived_rel_error = (diff - derived).norm() / out.derived_norm;
    out.alternative_rel_error = (diff - alternative).norm() / out.alternative_norm;
    return out;
}

} // namespace thermolimit::spinboson
