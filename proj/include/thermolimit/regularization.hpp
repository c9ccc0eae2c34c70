// regularization.hpp: meaning for lim_{N->inf} cos(Nx) and sin(Nx)
//
// The limits are rewritten as divergent integrals,
//   cos(Nx) = 1 - int_0^{Nx} sin y dy,   sin(Nx) = int_0^{Nx} cos y dy,
// and Abel-regularised with the limits taken in the order N -> inf first, then
// eps -> 0+:
//   int_0^inf e^{-eps y} cos y dy = eps / (1 + eps^2)  -> 0
//   int_0^inf e^{-eps y} sin y dy = 1 / (1 + eps^2)    -> 1
// so both limits are 0, the same value a long time average assigns.

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace thermolimit::regularization {

enum class TrigKind { Cos, Sin };

// Smallest Abel parameter a schedule may contain.
inline constexpr double kEpsilonFloor = 1e-8;

class RegularizationSchedule {
public:
    RegularizationSchedule(std::vector<double> epsilons, std::vector<double> windows);

    // eps = 1e-1 .. 1e-4 and T = 1e1 .. 1e4, one per decade.
    static RegularizationSchedule decades();

    std::span<const double> epsilons() const noexcept { return epsilons_; }
    std::span<const double> windows() const noexcept { return windows_; }

private:
    std::vector<double> epsilons_;
    std::vector<double> windows_;
};

// int_0^inf e^{-eps y} trig(y) dy in closed form. Throws InvalidEpsilon for eps <= 0.
double abel_integral(TrigKind kind, double epsilon);
// The same integral by adaptive Gauss-Kronrod, one panel per period out to
// e^{-eps y} = 1e-18.
double abel_integral_numeric(TrigKind kind, double epsilon);
// int_0^upper e^{-eps y} trig(y) dy; eps = 0 is allowed here.
double abel_partial_integral(TrigKind kind, double epsilon, double upper);

// Value of the rewritten cos(Nx) or sin(Nx) after N -> inf at fixed eps:
// cos -> 1 - 1/(1+eps^2), sin -> eps/(1+eps^2).
double regularized_trig_proxy(TrigKind kind, double epsilon);

struct RegularizedLimit {
    double value = 0.0;
    std::vector<double> proxies; // one per schedule epsilon
};

// eps -> 0+ of the proxy sequence; 0 for both kinds.
RegularizedLimit regularized_trig_limit(TrigKind kind, const RegularizationSchedule& schedule);

struct TrigTerm {
    double amplitude = 1.0;
    double omega = 1.0;
    TrigKind kind = TrigKind::Cos;
};

// constant + sum_k amplitude_k trig_k(omega_k t)
struct TrigSeries {
    double constant = 0.0;
    std::vector<TrigTerm> terms;
};

using Signal = std::variant<TrigSeries, std::function<double(double)>>;

// (1/T) int_0^T f dt for each window: closed form for trig series, adaptive
// quadrature otherwise (QuadratureError on failure).
std::vector<double> time_average(const Signal& f, std::span<const double> windows);

// |average - constant| <= 2 sum|amplitude| / (omega_min T) for a trig series.
double time_average_bound(const TrigSeries& f, double window);

enum class Probe { Cos, Sin, Constant };

struct ReportRow {
    std::string regularizer;
    double parameter = 0.0;
    double value = 0.0;
};

struct EquivalenceReport {
    Probe probe = Probe::Cos;
    double limit = 0.0;
    std::vector<ReportRow> rows;
    double abel_endpoint = 0.0;
    double time_average_endpoint = 0.0;
    double cesaro_endpoint = 0.0;
    double max_endpoint_gap = 0.0;
    bool converged = false;
};

// Abel mean eps int_0^inf e^{-eps y} f(y) dy at each eps, time average at each T
// and, beyond the two regularisers in the model, the Cesaro mean
// (1/K) sum_{k=1..K} f(k) with K = T. For Cos and Sin the Abel mean equals
// regularized_trig_proxy.
EquivalenceReport equivalence_report(Probe probe, const RegularizationSchedule& schedule,
                                     double constant = 1.0);

struct OrderOfLimitsReport {
    TrigKind kind = TrigKind::Cos;
    double x = 1.0;
    std::vector<ReportRow> eps_first; // eps -> 0+ at fixed N: trig(Nx), no limit in N
    std::vector<ReportRow> n_first;   // N -> inf at fixed eps: the proxy, -> 0
    double eps_first_spread = 0.0;    // max - min over N
    double n_first_endpoint = 0.0;
};

OrderOfLimitsReport order_of_limits(TrigKind kind, double x, std::span<const std::size_t> n_list,
                                    const RegularizationSchedule& schedule);

} // namespace thermolimit::regularization
