#include "thermolimit/quadrature.hpp"

#include "thermolimit/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

namespace thermolimit::quadrature {

GaussLegendreRule gauss_legendre(std::size_t n) {
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "Gauss-Legendre rule needs n >= 1");
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double dn = static_cast<double>(n);
    // Newton on P_n from the Chebyshev-like initial guess; nodes are symmetric.
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (dn + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double dk = static_cast<double>(k);
                const double p2 = ((2.0 * dk - 1.0) * x * p1 - (dk - 1.0) * p0) / dk;
                p0 = p1;
                p1 = p2;
            }
            dp = dn * (x * p1 - p0) / (x * x - 1.0);
            const double step = p1 / dp;
            x -= step;
            if (std::abs(step) < 1e-16) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

namespace {

// One GK15 panel. Boost reports the error of the panel mapped onto [-1, 1].
AdaptiveResult gk15_panel(const std::function<double(double)>& f, double a, double b) {
    AdaptiveResult panel;
    panel.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, 0, 0.0, &panel.error_estimate);
    panel.error_estimate *= 0.5 * std::abs(b - a);
    return panel;
}

// Bisection on an absolute tolerance, halved at each split. Boost's own
// recursion sums unscaled leaf errors, so the splitting is done here.
AdaptiveResult bisect(const std::function<double(double)>& f, double a, double b,
                      const AdaptiveResult& whole, double tolerance, unsigned depth_left) {
    if (whole.error_estimate <= tolerance || depth_left == 0 || !std::isfinite(whole.value)) {
        return whole;
    }
    const double mid = 0.5 * (a + b);
    const AdaptiveResult left = bisect(f, a, mid, gk15_panel(f, a, mid), 0.5 * tolerance, depth_left - 1);
    const AdaptiveResult right = bisect(f, mid, b, gk15_panel(f, mid, b), 0.5 * tolerance, depth_left - 1);
    return {left.value + right.value, left.error_estimate + right.error_estimate};
}

} // namespace

AdaptiveResult adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                                  double tolerance, unsigned max_depth) {
    if (a == b) return {};
    const AdaptiveResult result = bisect(f, a, b, gk15_panel(f, a, b), tolerance, max_depth);
    if (!std::isfinite(result.value) || result.error_estimate > tolerance) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3g", result.error_estimate);
        throw Error(ErrorKind::QuadratureError,
                    std::string("adaptive Gauss-Kronrod error estimate ") + buf + " above tolerance");
    }
    return result;
}

} // namespace thermolimit::quadrature
