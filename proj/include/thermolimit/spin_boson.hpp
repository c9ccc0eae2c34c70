// spin_boson.hpp: N two-level systems coupled to one field mode, no rotating-wave cut
//
//   H = Delta * sum_i sigma_z,i + omega * a^dag a + g (a + a^dag) sum_i sigma_x,i
//
// At strong coupling the Delta term is the perturbation. With Delta = 0 the bath
// operator S = sum_i sigma_x,i is conserved and on the sector S the field
// evolves as
//
//   U_F(t) = e^{i xi(t)} e^{-i omega a^dag a t} D(a_S(t)),
//   xi(t)  = S^2 g^2 / omega^2 (omega t - sin omega t),
//   a_S(t) = (g S / omega)(1 - e^{i omega t}),
//
// so an initial vacuum becomes the coherent state |alpha(t)> with
// alpha(t) = (g S / omega)(e^{-i omega t} - 1). For S = -N this is
// (N g / omega)(1 - e^{-i omega t}).
//
// Joint-space layout: the field is factor 0 (dimension fock_dim), followed by
// the N spins in the z basis.

#pragma once

#include "thermolimit/numerics.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace thermolimit::spinboson {

using numerics::Complex;
using numerics::ComplexMatrix;
using numerics::StateVector;

inline constexpr double kLeakageTol = 1e-8;

// Smallest Fock dimension that holds a coherent state of amplitude up to 2 N g / omega:
// ceil(a^2 + 8a + 20).
std::size_t recommended_fock_dim(std::size_t n_spins, double g, double omega);

struct SpinBosonConfig {
    std::size_t n_spins = 1;
    double delta = 0.0;
    double omega = 1.0;
    double g = 0.5;
    std::size_t fock_dim = 0; // 0 picks recommended_fock_dim

    void validate() const;
    std::size_t fock() const;
    std::size_t total_dim() const;
    std::vector<std::size_t> factor_dims() const;
};

// Field population in the top 10% of Fock levels (at least one level).
double fock_leakage(std::span<const double> populations);
std::vector<double> field_populations(const StateVector& joint, const SpinBosonConfig& cfg);

// Direct assembly from basis-state matrix elements.
ComplexMatrix build_hamiltonian(const SpinBosonConfig& cfg);

// Truncated |alpha> = e^{-|alpha|^2/2} sum_n alpha^n / sqrt(n!) |n>, not renormalised.
StateVector coherent_state(Complex alpha, std::size_t fock_dim);

// prod_i |sign>_x with sign = +1 or -1 (eigenstates of sigma_x).
StateVector bath_x_state(std::size_t n_spins, int sign);
// |0> (field) x prod_i |-1>_x.
StateVector initial_state(const SpinBosonConfig& cfg);

// Exact evolution on the truncated space. The eigendecomposition is computed
// once and reused for every t.
class ExactEvolver {
public:
    explicit ExactEvolver(const SpinBosonConfig& cfg);

    const SpinBosonConfig& config() const noexcept { return cfg_; }
    // Throws TruncationLeakage when the evolved field reaches the top Fock levels.
    StateVector evolve(const StateVector& initial, double t) const;
    ComplexMatrix field_density(const StateVector& initial, double t) const;

private:
    SpinBosonConfig cfg_;
    numerics::HermitianPropagator propagator_;
};

StateVector exact_evolve(const SpinBosonConfig& cfg, const StateVector& initial, double t);

struct CoherentAmplitude {
    Complex value;
};

struct LeadingOrderState {
    double phase = 0.0;        // xi(t)
    CoherentAmplitude alpha;   // field displacement at time t
    int bath_sector = 0;       // eigenvalue S of sum_i sigma_x,i
};

// Throws InvalidSector unless S is in {-N, -N+2, ..., N}.
LeadingOrderState uf_apply(const SpinBosonConfig& cfg, int bath_sector, double t);

// e^{i xi} |alpha(t)> x prod |-1>_x as a joint-space vector.
StateVector leading_order_state(const SpinBosonConfig& cfg, double t);

struct FieldDiagnostics {
    Complex mean_a;
    double mean_n = 0.0;
    double variance_n = 0.0;
    double mandel_q = 0.0; // (var - mean) / mean; 0 for the vacuum
};

FieldDiagnostics field_diagnostics(const ComplexMatrix& rho);

struct FieldDensity {
    ComplexMatrix rho;
    CoherentAmplitude alpha;
    FieldDiagnostics diagnostics;
    double leakage = 0.0;
};

// |alpha(t)><alpha(t)| for the bath in prod |-1>_x.
FieldDensity leading_order_field_density(const SpinBosonConfig& cfg, double t);

// sum_k (site k flipped to |1>_x) of prod |-1>_x; norm sqrt(n), orthogonal to prod |-1>_x.
StateVector chi_prime_state(std::size_t n);

// Which integrand to use for the first-order term.
//   Derived:     e^{i 4(N-1) g^2/omega^2 (omega t - sin omega t)} D(2 beta(t))
//   Alternative: e^{i (2N-1) g^2/omega^2 (omega t - sin omega t)} D(beta(t))
// with beta(t) = (g/omega)(e^{i omega t} - 1). One flip moves S by 2, which is
// what the derived form accounts for; the dense oracle agrees with it.
enum class CorrectionForm { Derived, Alternative };

struct IntegrandShape {
    double phase_coefficient = 0.0; // multiplies g^2/omega^2 (omega t - sin omega t)
    double displacement_scale = 1.0; // multiplies beta(t)
};

IntegrandShape integrand_shape(std::size_t n_spins, CorrectionForm form);

struct QuadratureSpec {
    std::size_t nodes_per_period = 512; // per 2 pi / omega
    std::size_t nodes_per_panel = 16;
    std::size_t min_nodes_per_period = 64;
    std::size_t min_nodes_per_phase_period = 8;

    // Enough nodes for `phase_rate` (rad per unit time) at the given omega.
    static QuadratureSpec resolving(double phase_rate, double omega);
};

struct CorrectionState {
    StateVector amplitudes; // unnormalised
    double norm = 0.0;
};

// -i Delta U_F(t) int_0^t dt' e^{i K phi(t')} D(b(t'))|0> x |chi'_0>.
CorrectionState first_order_correction(const SpinBosonConfig& cfg, double t,
                                       const QuadratureSpec& quad = {},
                                       CorrectionForm form = CorrectionForm::Derived);

// Same first-order term from dense propagators of the Delta = 0 Hamiltonian,
// for an arbitrary bath state (field starts in the vacuum).
StateVector dense_first_order_correction(const SpinBosonConfig& cfg, const StateVector& bath,
                                         double t, const QuadratureSpec& quad = {});

// Frobenius norm of Tr_bath |psi1><psi0|, the leading-order x first-order cross
// term in the field density. Without `bath` the analytic states for prod |-1>_x
// are used; with it, both states come from dense propagation.
double traced_correction_contribution(const SpinBosonConfig& cfg, double t,
                                      const std::optional<StateVector>& bath = std::nullopt,
                                      const QuadratureSpec& quad = {});

struct DecayPoint {
    std::size_t n = 0;
    double magnitude = 0.0;
};

struct DecayScan {
    std::vector<DecayPoint> points;
    double lower_half_max = 0.0;
    double upper_half_max = 0.0;
    bool decays = false; // upper_half_max < lower_half_max
};

// |int_0^t e^{i K phi(t')} <0|D(b(t'))|0> dt'| for each N, with
// <0|D(b)|0> = e^{-|b|^2/2}. Without an explicit QuadratureSpec the quadrature is sized
// for the largest N.
DecayScan riemann_decay_scan(double delta, double omega, double g, double t,
                             std::span<const std::size_t> n_list,
                             std::optional<QuadratureSpec> quad = std::nullopt,
                             CorrectionForm form = CorrectionForm::Derived);

struct CorrectionFormCheck {
    double delta = 0.0;
    double exact_minus_leading_norm = 0.0;
    double derived_norm = 0.0;
    double alternative_norm = 0.0;
    double derived_rel_error = 0.0; // ||(exact - leading) - psi1|| / ||psi1||
    double alternative_rel_error = 0.0;
};

// Compares both integrand forms with exact - leading at small Delta.
CorrectionFormCheck check_correction_forms(const SpinBosonConfig& cfg, double t,
                                           const QuadratureSpec& quad = {});

} // namespace thermolimit::spinboson
