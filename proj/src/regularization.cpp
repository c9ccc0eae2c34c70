#include "thermolimit/regularization.hpp"

#include "thermolimit/error.hpp"
#include "thermolimit/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

namespace thermolimit::regularization {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double trig(TrigKind kind, double y) { return kind == TrigKind::Cos ? std::cos(y) : std::sin(y); }

void require_epsilon(double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw Error(ErrorKind::InvalidEpsilon, "epsilon must be > 0, got " + std::to_string(epsilon));
    }
}

void require_windows(std::span<const double> windows) {
    if (windows.empty()) throw Error(ErrorKind::InvalidWindow, "no windows");
    for (std::size_t i = 0; i < windows.size(); ++i) {
        if (!(windows[i] > 0.0) || !std::isfinite(windows[i])) {
            throw Error(ErrorKind::InvalidWindow, "windows must be finite and > 0");
        }
        if (i > 0 && windows[i] <= windows[i - 1]) {
            throw Error(ErrorKind::InvalidWindow, "windows must increase strictly");
        }
    }
}

// Neumaier-compensated running sum.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) carry += (sum - t) + x;
        else carry += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + carry; }
};

double probe_value(Probe probe, double y, double constant) {
    switch (probe) {
    case Probe::Cos: return std::cos(y);
    case Probe::Sin: return std::sin(y);
    case Probe::Constant: return constant;
    }
    return 0.0;
}

} // namespace

RegularizationSchedule::RegularizationSchedule(std::vector<double> epsilons,
                                               std::vector<double> windows)
    : epsilons_(std::move(epsilons)), windows_(std::move(windows)) {
    if (epsilons_.empty() || windows_.empty()) {
        throw Error(ErrorKind::InvalidSchedule, "schedule needs epsilons and windows");
    }
    for (std::size_t i = 0; i < epsilons_.size(); ++i) {
        const double e = epsilons_[i];
        if (!std::isfinite(e) || e < kEpsilonFloor) {
            throw Error(ErrorKind::InvalidSchedule, "epsilons must be >= 1e-8");
        }
        if (i > 0 && e >= epsilons_[i - 1]) {
            throw Error(ErrorKind::InvalidSchedule, "epsilons must decrease strictly");
        }
    }
    for (std::size_t i = 0; i < windows_.size(); ++i) {
        if (!std::isfinite(windows_[i]) || windows_[i] <= 0.0 ||
            (i > 0 && windows_[i] <= windows_[i - 1])) {
            throw Error(ErrorKind::InvalidSchedule, "windows must be positive and increase strictly");
        }
    }
}

RegularizationSchedule RegularizationSchedule::decades() {
    return RegularizationSchedule({1e-1, 1e-2, 1e-3, 1e-4}, {1e1, 1e2, 1e3, 1e4});
}

double abel_integral(TrigKind kind, double epsilon) {
    require_epsilon(epsilon);
    const double denom = 1.0 + epsilon * epsilon;
    return kind == TrigKind::Cos ? epsilon / denom : 1.0 / denom;
}

double abel_integral_numeric(TrigKind kind, double epsilon) {
    require_epsilon(epsilon);
    // Beyond e^{-eps y} < 1e-18 the remaining tail is below 1e-18 / eps.
    const double y_max = std::log(1e18) / epsilon;
    const auto periods = static_cast<std::size_t>(std::ceil(y_max / kTwoPi));
    // Period k is integrated in the local variable u = y - 2 pi k, which keeps
    // the trig argument small; e^{-eps 2 pi k} is carried as a weight.
    const auto integrand = [kind, epsilon](double u) { return std::exp(-epsilon * u) * trig(kind, u); };

    CompensatedSum total;
    for (std::size_t k = 0; k < periods; ++k) {
        const double weight = std::exp(-epsilon * kTwoPi * static_cast<double>(k));
        total.add(weight * quadrature::adaptive_integrate(integrand, 0.0, kTwoPi, 1e-14).value);
    }
    return total.value();
}

double abel_partial_integral(TrigKind kind, double epsilon, double upper) {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
        throw Error(ErrorKind::InvalidEpsilon, "epsilon must be >= 0");
    }
    const std::complex<double> rate(-epsilon, 1.0);
    const std::complex<double> value = (std::exp(rate * upper) - 1.0) / rate;
    return kind == TrigKind::Cos ? value.real() : value.imag();
}

double regularized_trig_proxy(TrigKind kind, double epsilon) {
    // cos(Nx) = 1 - int sin, sin(Nx) = int cos.
    return kind == TrigKind::Cos ? 1.0 - abel_integral(TrigKind::Sin, epsilon)
                                 : abel_integral(TrigKind::Cos, epsilon);
}

RegularizedLimit regularized_trig_limit(TrigKind kind, const RegularizationSchedule& schedule) {
    RegularizedLimit out;
    for (double eps : schedule.epsilons()) out.proxies.push_back(regularized_trig_proxy(kind, eps));
    // Both proxies are rational in eps and continuous at 0, where they vanish:
    // eps^2/(1+eps^2) and eps/(1+eps^2).
    out.value = 0.0;
    return out;
}

std::vector<double> time_average(const Signal& f, std::span<const double> windows) {
    require_windows(windows);
    std::vector<double> out;
    out.reserve(windows.size());

    if (const auto* series = std::get_if<TrigSeries>(&f)) {
        for (double T : windows) {
            double avg = series->constant;
            for (const auto& term : series->terms) {
                if (term.omega == 0.0) {
                    avg += term.kind == TrigKind::Cos ? term.amplitude : 0.0;
                    continue;
                }
                const double x = term.omega * T;
                avg += term.amplitude *
                       (term.kind == TrigKind::Cos ? std::sin(x) / x : (1.0 - std::cos(x)) / x);
            }
            out.push_back(avg);
        }
        return out;
    }

    const auto& fn = std::get<std::function<double(double)>>(f);
    double previous_end = 0.0;
    CompensatedSum integral;
    for (double T : windows) {
        // Unit-length panels keep each adaptive call on a well-resolved interval.
        const auto panels = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(T - previous_end)));
        const double h = (T - previous_end) / static_cast<double>(panels);
        for (std::size_t p = 0; p < panels; ++p) {
            const double a = previous_end + h * static_cast<double>(p);
            integral.add(quadrature::adaptive_integrate(fn, a, a + h, 1e-12).value);
        }
        previous_end = T;
        out.push_back(integral.value() / T);
    }
    return out;
}

double time_average_bound(const TrigSeries& f, double window) {
    double amplitude = 0.0;
    double omega_min = std::numeric_limits<double>::infinity();
    for (const auto& term : f.terms) {
        if (term.omega == 0.0) continue;
        amplitude += std::abs(term.amplitude);
        omega_min = std::min(omega_min, std::abs(term.omega));
    }
    if (amplitude == 0.0) return 0.0;
    return 2.0 * amplitude / (omega_min * window);
}

EquivalenceReport equivalence_report(Probe probe, const RegularizationSchedule& schedule,
                                     double constant) {
    EquivalenceReport report;
    report.probe = probe;
    report.limit = probe == Probe::Constant ? constant : 0.0;

    for (double eps : schedule.epsilons()) {
        double value = constant; // eps int e^{-eps y} c dy = c
        if (probe == Probe::Cos) value = regularized_trig_proxy(TrigKind::Cos, eps);
        if (probe == Probe::Sin) value = regularized_trig_proxy(TrigKind::Sin, eps);
        report.rows.push_back({"abel", eps, value});
        report.abel_endpoint = value;
    }

    TrigSeries series;
    if (probe == Probe::Constant) series.constant = constant;
    else series.terms.push_back({1.0, 1.0, probe == Probe::Cos ? TrigKind::Cos : TrigKind::Sin});
    const std::vector<double> averages = time_average(series, schedule.windows());
    for (std::size_t i = 0; i < averages.size(); ++i) {
        report.rows.push_back({"time_average", schedule.windows()[i], averages[i]});
    }
    report.time_average_endpoint = averages.back();

    // Cesaro: not part of the original argument, kept as a third opinion.
    for (double T : schedule.windows()) {
        const auto k_max = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(T)));
        CompensatedSum sum;
        for (std::size_t k = 1; k <= k_max; ++k) {
            sum.add(probe_value(probe, static_cast<double>(k), constant));
        }
        const double mean = sum.value() / static_cast<double>(k_max);
        report.rows.push_back({"cesaro", static_cast<double>(k_max), mean});
        report.cesaro_endpoint = mean;
    }

    report.max_endpoint_gap = std::max({std::abs(report.abel_endpoint - report.time_average_endpoint),
                                        std::abs(report.abel_endpoint - report.cesaro_endpoint),
                                        std::abs(report.time_average_endpoint - report.cesaro_endpoint)});

    const double eps_last = schedule.epsilons().back();
    const double t_last = schedule.windows().back();
    const double k_last = std::max(1.0, std::round(t_last));
    const double scale = std::max(1.0, std::abs(constant));
    report.converged = std::abs(report.abel_endpoint - report.limit) <= 2.0 * eps_last * scale &&
                       std::abs(report.time_average_endpoint - report.limit) <= 2.0 / t_last &&
                       std::abs(report.cesaro_endpoint - report.limit) <=
                           1.0 / (k_last * std::sin(0.5));
    return report;
}

OrderOfLimitsReport order_of_limits(TrigKind kind, double x, std::span<const std::size_t> n_list,
                                    const RegularizationSchedule& schedule) {
    if (n_list.empty()) throw Error(ErrorKind::InsufficientPoints, "empty N list");
    OrderOfLimitsReport report;
    report.kind = kind;
    report.x = x;

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t n : n_list) {
        const double upper = static_cast<double>(n) * x;
        // eps -> 0+ with N fixed: the damped integral is continuous at eps = 0.
        const double value = kind == TrigKind::Cos
                                 ? 1.0 - abel_partial_integral(TrigKind::Sin, 0.0, upper)
                                 : abel_partial_integral(TrigKind::Cos, 0.0, upper);
        report.eps_first.push_back({"eps_first", static_cast<double>(n), value});
        lo = std::min(lo, value);
        hi = std::max(hi, value);
    }
    report.eps_first_spread = hi - lo;

    for (double eps : schedule.epsilons()) {
        const double value = regularized_trig_proxy(kind, eps);
        report.n_first.push_back({"n_first", eps, value});
        report.n_first_endpoint = value;
    }
    return report;
}

} // namespace thermolimit::regularization
