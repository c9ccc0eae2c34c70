// quadrature.hpp: composite Gauss-Legendre panels and an adaptive fallback

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace thermolimit::quadrature {

// Nodes and weights on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(std::size_t n);

// Calls visit(t, weight) for every node of `panels` equal panels on [a, b].
template <class Visit>
void for_each_node(double a, double b, std::size_t panels, const GaussLegendreRule& rule,
                   Visit&& visit) {
    const double h = (b - a) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double lo = a + h * static_cast<double>(p);
        const double mid = lo + 0.5 * h;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            visit(mid + 0.5 * h * rule.nodes[k], 0.5 * h * rule.weights[k]);
        }
    }
}

struct AdaptiveResult {
    double value = 0.0;
    double error_estimate = 0.0;
};

// Adaptive 15-point Gauss-Kronrod on a finite interval. Throws QuadratureError
// when the error estimate stays above `tolerance` (absolute).
AdaptiveResult adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                                  double tolerance = 1e-12, unsigned max_depth = 20);

} // namespace thermolimit::quadrature
