#include <doctest.h>

#include "thermolimit/error.hpp"
#include "thermolimit/quadrature.hpp"
#include "thermolimit/regularization.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace thermolimit;
using namespace thermolimit::regularization;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error thrown");
    return ErrorKind::InvalidArgument;
}

} // namespace

TEST_CASE("adaptive quadrature meets an absolute tolerance after subdividing") {
    // int_0^20 sin(7t) dt needs several levels of bisection.
    const auto r = quadrature::adaptive_integrate([](double t) { return std::sin(7.0 * t); }, 0.0, 20.0, 1e-12);
    CHECK(std::abs(r.value - (1.0 - std::cos(140.0)) / 7.0) < 1e-12);
    CHECK(r.error_estimate <= 1e-12);

    // Small, smooth panels away from the origin.
    for (double a : {0.1875, 1.0, 2.0}) {
        const auto p = quadrature::adaptive_integrate([](double t) { return 0.5 * std::sin(1.4 * t); }, a,
                                                      a + 0.0625, 1e-14);
        const double exact = 0.5 * (std::cos(1.4 * a) - std::cos(1.4 * (a + 0.0625))) / 1.4;
        CHECK(std::abs(p.value - exact) < 1e-15);
    }

    CHECK(quadrature::adaptive_integrate([](double) { return 1.0; }, 2.0, 2.0).value == 0.0);
    CHECK(kind_of([] {
              quadrature::adaptive_integrate([](double t) { return 1.0 / std::sqrt(t); }, 0.0, 1.0, 1e-14, 3);
          }) == ErrorKind::QuadratureError);
}

TEST_CASE("Abel integrals in closed form") {
    CHECK(abel_integral(TrigKind::Cos, 1.0) == doctest::Approx(0.5));
    CHECK(abel_integral(TrigKind::Sin, 1.0) == doctest::Approx(0.5));
    CHECK(abel_integral(TrigKind::Cos, 1e-6) == doctest::Approx(1e-6));
    CHECK(abel_integral(TrigKind::Sin, 1e-6) == doctest::Approx(1.0));
    CHECK(kind_of([] { abel_integral(TrigKind::Cos, 0.0); }) == ErrorKind::InvalidEpsilon);
    CHECK(kind_of([] { abel_integral(TrigKind::Sin, -1e-3); }) == ErrorKind::InvalidEpsilon);
    CHECK(kind_of([] { abel_integral(TrigKind::Sin, std::nan("")); }) == ErrorKind::InvalidEpsilon);
}

TEST_CASE("Abel integrals by quadrature agree with the closed form") {
    for (double eps : {1.0, 0.3, 1e-1, 1e-2, 1e-3, 1e-4}) {
        for (TrigKind kind : {TrigKind::Cos, TrigKind::Sin}) {
            CHECK(std::abs(abel_integral_numeric(kind, eps) - abel_integral(kind, eps)) <= 1e-10);
        }
    }
    CHECK(kind_of([] { abel_integral_numeric(TrigKind::Cos, 0.0); }) == ErrorKind::InvalidEpsilon);
}

TEST_CASE("partial Abel integrals") {
    CHECK(abel_partial_integral(TrigKind::Sin, 0.0, kPi) == doctest::Approx(2.0));
    CHECK(std::abs(abel_partial_integral(TrigKind::Cos, 0.0, kPi)) < 1e-15);
    // A long upper limit approaches the full integral.
    CHECK(abel_partial_integral(TrigKind::Cos, 0.5, 200.0) == doctest::Approx(abel_integral(TrigKind::Cos, 0.5)));
    CHECK(kind_of([] { abel_partial_integral(TrigKind::Cos, -1.0, 1.0); }) == ErrorKind::InvalidEpsilon);
}

TEST_CASE("property: the rewritten trig functions match cos and sin at eps = 0") {
    for (int k = 0; k < 50; ++k) {
        const double y = -7.0 + 0.41 * k;
        CHECK(1.0 - abel_partial_integral(TrigKind::Sin, 0.0, y) == doctest::Approx(std::cos(y)));
        CHECK(abel_partial_integral(TrigKind::Cos, 0.0, y) == doctest::Approx(std::sin(y)));
    }
}

TEST_CASE("regularised limits of cos(Nx) and sin(Nx) are zero") {
    const auto schedule = RegularizationSchedule::decades();
    for (TrigKind kind : {TrigKind::Cos, TrigKind::Sin}) {
        const RegularizedLimit limit = regularized_trig_limit(kind, schedule);
        CHECK(limit.value == 0.0);
        REQUIRE(limit.proxies.size() == 4);
        for (std::size_t i = 0; i < limit.proxies.size(); ++i) {
            CHECK(std::abs(limit.proxies[i] - limit.value) <= 2.0 * schedule.epsilons()[i]);
            if (i > 0) CHECK(std::abs(limit.proxies[i]) < std::abs(limit.proxies[i - 1]));
        }
    }
    CHECK(regularized_trig_proxy(TrigKind::Cos, 1e-4) == doctest::Approx(1e-8 / (1.0 + 1e-8)));
    CHECK(regularized_trig_proxy(TrigKind::Sin, 1e-4) == doctest::Approx(1e-4 / (1.0 + 1e-8)));
}

TEST_CASE("property: proxies equal the Abel mean of cos and sin") {
    // eps int e^{-eps y} cos y dy = eps^2/(1+eps^2), and likewise for sin.
    for (double eps : {0.5, 0.1, 0.02}) {
        CHECK(regularized_trig_proxy(TrigKind::Cos, eps) ==
              doctest::Approx(eps * abel_integral_numeric(TrigKind::Cos, eps)).epsilon(1e-9));
        CHECK(regularized_trig_proxy(TrigKind::Sin, eps) ==
              doctest::Approx(eps * abel_integral_numeric(TrigKind::Sin, eps)).epsilon(1e-9));
    }
}

TEST_CASE("time averages") {
    const std::vector<double> windows = {1.0, 10.0, 100.0};
    TrigSeries constant;
    constant.constant = 0.75;
    for (double v : time_average(constant, windows)) CHECK(v == 0.75);

    // Whole periods of cos and sin average to exactly zero.
    TrigSeries wave;
    wave.terms.push_back({1.0, 2.0 * kPi, TrigKind::Cos});
    wave.terms.push_back({0.5, 4.0 * kPi, TrigKind::Sin});
    for (double v : time_average(wave, windows)) CHECK(std::abs(v) < 1e-15);

    // sin(2 N lambda t) with N = 5, lambda = 1, T = 100.
    TrigSeries rabi;
    rabi.terms.push_back({1.0, 10.0, TrigKind::Sin});
    const double window[] = {100.0};
    CHECK(std::abs(time_average(rabi, window)[0]) <= 2e-3);
    CHECK(time_average_bound(rabi, 100.0) == doctest::Approx(2e-3));
    CHECK(time_average_bound(constant, 100.0) == 0.0);

    // A zero-frequency cos term is a constant.
    TrigSeries dc;
    dc.terms.push_back({0.3, 0.0, TrigKind::Cos});
    dc.terms.push_back({0.3, 0.0, TrigKind::Sin});
    CHECK(time_average(dc, window)[0] == doctest::Approx(0.3));
}

TEST_CASE("time averages of a function handle match the closed form") {
    TrigSeries series;
    series.constant = 0.2;
    series.terms.push_back({1.0, 1.7, TrigKind::Cos});
    series.terms.push_back({-0.4, 0.3, TrigKind::Sin});
    const Signal fn = std::function<double(double)>(
        [](double t) { return 0.2 + std::cos(1.7 * t) - 0.4 * std::sin(0.3 * t); });
    const std::vector<double> windows = {0.5, 3.0, 40.0, 250.0};
    const auto closed = time_average(series, windows);
    const auto numeric = time_average(fn, windows);
    for (std::size_t i = 0; i < windows.size(); ++i) CHECK(std::abs(closed[i] - numeric[i]) < 1e-12);
}

TEST_CASE("time average rejects bad windows") {
    TrigSeries s;
    const std::vector<double> empty;
    const std::vector<double> zero = {0.0};
    const std::vector<double> decreasing = {2.0, 1.0};
    CHECK(kind_of([&] { time_average(s, empty); }) == ErrorKind::InvalidWindow);
    CHECK(kind_of([&] { time_average(s, zero); }) == ErrorKind::InvalidWindow);
    CHECK(kind_of([&] { time_average(s, decreasing); }) == ErrorKind::InvalidWindow);
}

TEST_CASE("Abel, time-average and Cesaro means agree") {
    const auto schedule = RegularizationSchedule::decades();
    for (Probe probe : {Probe::Cos, Probe::Sin}) {
        const EquivalenceReport report = equivalence_report(probe, schedule);
        CHECK(report.limit == 0.0);
        CHECK(report.converged);
        CHECK(report.max_endpoint_gap <= 1e-3);
        CHECK(report.rows.size() == 12);
        CHECK(report.rows.front().regularizer == "abel");
        CHECK(report.rows.back().regularizer == "cesaro");
    }
    // Control: a constant is left alone by every regulariser.
    const EquivalenceReport constant = equivalence_report(Probe::Constant, schedule, 2.5);
    CHECK(constant.limit == 2.5);
    CHECK(constant.converged);
    for (const auto& row : constant.rows) CHECK(row.value == doctest::Approx(2.5));
}

TEST_CASE("order of limits matters") {
    const auto schedule = RegularizationSchedule::decades();
    const std::size_t ns[] = {1, 2, 3, 5, 8, 13, 21, 34};
    for (TrigKind kind : {TrigKind::Cos, TrigKind::Sin}) {
        const OrderOfLimitsReport report = order_of_limits(kind, 1.0, ns, schedule);
        // eps -> 0 first leaves trig(N x), which keeps oscillating in N.
        CHECK(report.eps_first_spread > 1.0);
        for (std::size_t i = 0; i < report.eps_first.size(); ++i) {
            const double n = static_cast<double>(ns[i]);
            CHECK(report.eps_first[i].value ==
                  doctest::Approx(kind == TrigKind::Cos ? std::cos(n) : std::sin(n)));
        }
        // N -> inf first gives a proxy that goes to zero with eps.
        CHECK(std::abs(report.n_first_endpoint) <= 2e-4);
    }
    const std::vector<std::size_t> none;
    CHECK(kind_of([&] { order_of_limits(TrigKind::Cos, 1.0, none, schedule); }) == ErrorKind::InsufficientPoints);
}

TEST_CASE("schedule validation") {
    CHECK_NOTHROW(RegularizationSchedule({0.1}, {1.0}));
    CHECK(kind_of([] { RegularizationSchedule({}, {1.0}); }) == ErrorKind::InvalidSchedule);
    CHECK(kind_of([] { RegularizationSchedule({0.1}, {}); }) == ErrorKind::InvalidSchedule);
    CHECK(kind_of([] { RegularizationSchedule({1e-9}, {1.0}); }) == ErrorKind::InvalidSchedule);
    CHECK(kind_of([] { RegularizationSchedule({0.1, 0.2}, {1.0}); }) == ErrorKind::InvalidSchedule);
    CHECK(kind_of([] { RegularizationSchedule({0.1}, {1.0, 1.0}); }) == ErrorKind::InvalidSchedule);
    CHECK(kind_of([] { RegularizationSchedule({0.1}, {-1.0}); }) == ErrorKind::InvalidSchedule);
}
