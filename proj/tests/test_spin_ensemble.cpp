#include <doctest.h>

#include "thermolimit/error.hpp"
#include "thermolimit/numerics.hpp"
#include "thermolimit/spin_ensemble.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace thermolimit;
using namespace thermolimit::ensemble;

namespace {

SiteAmplitudes site_with_beta_sq(double beta_sq, double phase = 0.0) {
    return {std::polar(std::sqrt(1.0 - beta_sq), phase), Complex(std::sqrt(beta_sq), 0.0)};
}

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error thrown");
    return ErrorKind::InvalidArgument;
}

// Dense <H> and Delta H from the Kronecker-built H = lambda sum sigma_z.
std::pair<double, double> dense_energy_moments(const ProductSpinState& state, double lambda) {
    const numerics::ComplexMatrix h = lambda * numerics::site_sum(numerics::pauli_z(), state.size());
    const numerics::StateVector psi = state.to_statevector();
    const double mean = numerics::expectation(h, psi).real();
    const double second = numerics::expectation(h * h, psi).real();
    return {mean, std::sqrt(std::max(second - mean * mean, 0.0))};
}

} // namespace

TEST_CASE("mean energy closed form") {
    const SiteAmplitudes up{0.0, 1.0};
    CHECK(mean_energy(ProductSpinState::uniform(7, up), {7, 2.0}) == doctest::Approx(14.0));

    const SiteAmplitudes sym{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
    CHECK(std::abs(mean_energy(ProductSpinState::uniform(5, sym), {5, 1.0})) < 1e-15);

    // Dense oracle at N = 8 pins the per-site formula, which then extends to N = 300.
    const auto state8 = ProductSpinState::uniform(8, site_with_beta_sq(0.75, 0.3));
    const auto [dense_mean, dense_spread] = dense_energy_moments(state8, 1.0);
    CHECK(dense_mean == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(mean_energy(state8, {8, 1.0}) == doctest::Approx(dense_mean).epsilon(1e-12));
    CHECK(energy_spread(state8, {8, 1.0}) == doctest::Approx(dense_spread).epsilon(1e-12));

    const auto state300 = ProductSpinState::uniform(300, site_with_beta_sq(0.75));
    CHECK(mean_energy(state300, {300, 1.0}) == doctest::Approx(150.0).epsilon(1e-12));
}

TEST_CASE("relative fluctuation") {
    const SiteAmplitudes up{0.0, 1.0};
    CHECK(relative_fluctuation(ProductSpinState::uniform(10, up), {10, 1.0}) == 0.0);

    const auto state300 = ProductSpinState::uniform(300, site_with_beta_sq(0.75));
    CHECK(relative_fluctuation(state300, {300, 1.0}) == doctest::Approx(0.1).epsilon(1e-12));

    // N -> 4N halves the ratio.
    const auto s50 = ProductSpinState::uniform(50, site_with_beta_sq(0.9, 1.1));
    const auto s200 = ProductSpinState::uniform(200, site_with_beta_sq(0.9, 1.1));
    CHECK(relative_fluctuation(s200, {200, 1.0}) ==
          doctest::Approx(0.5 * relative_fluctuation(s50, {50, 1.0})).epsilon(1e-12));

    const SiteAmplitudes sym{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
    CHECK(kind_of([&] { relative_fluctuation(ProductSpinState::uniform(4, sym), {4, 1.0}); }) ==
          ErrorKind::ZeroMeanEnergy);
}

TEST_CASE("property: identical sites scale as 1/sqrt(N) exactly") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> bsq(0.55, 1.0);
    std::uniform_int_distribution<std::size_t> size(1, 500);
    for (int trial = 0; trial < 50; ++trial) {
        const SiteAmplitudes site = site_with_beta_sq(bsq(rng), 0.7);
        const std::size_t n = size(rng);
        const double single = relative_fluctuation(ProductSpinState::uniform(1, site), {1, 1.0});
        const double many = relative_fluctuation(ProductSpinState::uniform(n, site), {n, 1.0});
        CHECK(many == doctest::Approx(single / std::sqrt(static_cast<double>(n))).epsilon(1e-12));
    }
}

TEST_CASE("invalid states and configs") {
    CHECK(kind_of([] { ProductSpinState(std::vector<SiteAmplitudes>{}); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { ProductSpinState::uniform(2, SiteAmplitudes{1.0, 1.0}); }) ==
          ErrorKind::InvalidArgument);
    const auto s = ProductSpinState::uniform(3, SiteAmplitudes{0.0, 1.0});
    CHECK(kind_of([&] { mean_energy(s, {3, 0.0}); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([&] { mean_energy(s, {4, 1.0}); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("scaling experiment with a deterministic sampler") {
    const std::size_t ns[] = {100, 400};
    const ScalingTable table = scaling_experiment(SiteSampler::fixed(0.75), ns, 1);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0].ratio == doctest::Approx(std::sqrt(3.0) / 10.0).epsilon(1e-12));
    CHECK(table.rows[1].ratio == doctest::Approx(std::sqrt(3.0) / 20.0).epsilon(1e-12));
    CHECK(table.fit.slope == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("scaling experiment with random magnetizations over six decades") {
    const std::size_t ns[] = {10, 100, 1000, 10000, 100000, 1000000};
    const ScalingTable table = scaling_experiment(SiteSampler::uniform(0.3, 0.9), ns, 42);
    CHECK(std::abs(table.fit.slope + 0.5) <= 0.05);

    // Same seed, same table.
    const ScalingTable again = scaling_experiment(SiteSampler::uniform(0.3, 0.9), ns, 42);
    for (std::size_t i = 0; i < table.rows.size(); ++i) CHECK(again.rows[i].ratio == table.rows[i].ratio);
}

TEST_CASE("scaling experiment errors") {
    const std::size_t repeated[] = {50, 50, 50};
    CHECK(kind_of([&] { scaling_experiment(SiteSampler::fixed(0.75), repeated, 1); }) ==
          ErrorKind::InsufficientPoints);
    const std::size_t too_small[] = {1, 10};
    CHECK(kind_of([&] { scaling_experiment(SiteSampler::fixed(0.75), too_small, 1); }) ==
          ErrorKind::InvalidArgument);
    const std::size_t ok[] = {10, 20};
    CHECK(kind_of([&] { scaling_experiment(SiteSampler::fixed(0.5), ok, 1); }) ==
          ErrorKind::ZeroMeanEnergy);
    CHECK(kind_of([] { fit_line(std::vector<double>{}, std::vector<double>{}); }) ==
          ErrorKind::InsufficientPoints);
}

TEST_CASE("fit_line recovers an exact line") {
    const std::vector<double> xs = {0.0, 1.0, 2.0, 5.0};
    std::vector<double> ys;
    for (double x : xs) ys.push_back(3.0 - 0.5 * x);
    const LineFit fit = fit_line(xs, ys);
    CHECK(fit.slope == doctest::Approx(-0.5));
    CHECK(fit.intercept == doctest::Approx(3.0));
}

TEST_CASE("collective spin: transverse magnitude and conserved Jz") {
    const SiteAmplitudes plus_x{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
    for (std::size_t n = 1; n <= 10; ++n) {
        const auto state = ProductSpinState::uniform(n, plus_x);
        std::vector<double> ts;
        for (int k = 0; k < 25; ++k) ts.push_back(0.37 * k);
        for (const auto& s : collective_spin_trajectory(state, {n, 1.0}, ts)) {
            const double nn = static_cast<double>(n);
            CHECK(s.jx * s.jx + s.jy * s.jy == doctest::Approx(nn * nn).epsilon(1e-12));
            CHECK(std::abs(s.jz) < 1e-12);
        }
        CHECK(dense_oracle_check(state, {n, 1.0}, 2.3).max_deviation <= 1e-10);
    }

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<SiteAmplitudes> sites;
    for (int i = 0; i < 6; ++i) sites.push_back(site_with_beta_sq(u(rng), 6.0 * u(rng)));
    const ProductSpinState state(sites);
    const double ts[] = {0.0, 0.5, 4.0, 17.0};
    const auto traj = collective_spin_trajectory(state, {6, 0.8}, ts);
    for (const auto& s : traj) CHECK(s.jz == doctest::Approx(traj.front().jz).epsilon(1e-14));
}

TEST_CASE("property: Ehrenfest consistency d<Jx>/dt = -2 lambda <Jy>") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<SiteAmplitudes> sites;
    for (int i = 0; i < 9; ++i) sites.push_back(site_with_beta_sq(u(rng), 6.0 * u(rng)));
    const ProductSpinState state(sites);
    const EnsembleConfig cfg{9, 1.3};
    const double t0 = 0.9;

    double previous_error = 0.0;
    for (double h : {1e-2, 5e-3, 2.5e-3}) {
        const double ts[] = {t0 - h, t0, t0 + h};
        const auto s = collective_spin_trajectory(state, cfg, ts);
        const double derivative = (s[2].jx - s[0].jx) / (2.0 * h);
        const double error = std::abs(derivative + 2.0 * cfg.lambda * s[1].jy);
        if (previous_error > 0.0) {
            // Central difference: halving h quarters the error.
            CHECK(error / previous_error == doctest::Approx(0.25).epsilon(0.05));
        }
        previous_error = error;
    }
    CHECK(previous_error < 1e-3);
}

TEST_CASE("Delta Jx / N shrinks like 1/sqrt(N) for identical sites") {
    const SiteAmplitudes site = site_with_beta_sq(0.8, 0.4);
    const double t0[] = {0.0};
    const double r16 = collective_spin_trajectory(ProductSpinState::uniform(16, site), {16, 1.0}, t0)[0].delta_jx / 16.0;
    const double r64 = collective_spin_trajectory(ProductSpinState::uniform(64, site), {64, 1.0}, t0)[0].delta_jx / 64.0;
    CHECK(r64 == doctest::Approx(0.5 * r16).epsilon(1e-12));
}

TEST_CASE("dense oracle agrees with closed forms") {
    const SiteAmplitudes tilted = site_with_beta_sq(0.3, 0.9);
    CHECK(dense_oracle_check(ProductSpinState::uniform(1, tilted), {1, 1.0}, 3.3).max_deviation <= 1e-10);

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<SiteAmplitudes> sites;
    for (int i = 0; i < 8; ++i) sites.push_back(site_with_beta_sq(u(rng), 6.0 * u(rng)));
    const ProductSpinState state(sites);
    for (double t : {0.1, 1.0, 10.0}) {
        CHECK(dense_oracle_check(state, {8, 0.6}, t).max_deviation <= 1e-9);
    }

    // Second, independent dense route: exp(-iHt) from the eigendecomposition of
    // the Kronecker-built Hamiltonian.
    const numerics::ComplexMatrix jx = numerics::site_sum(numerics::pauli_x(), 8);
    const numerics::ComplexMatrix h = 0.6 * numerics::site_sum(numerics::pauli_z(), 8);
    const numerics::StateVector psi = numerics::matexp_hermitian_prop(h, 1.0) * state.to_statevector();
    const double t1[] = {1.0};
    const double jx_closed = collective_spin_trajectory(state, {8, 0.6}, t1)[0].jx;
    CHECK(numerics::expectation(jx, psi).real() == doctest::Approx(jx_closed).epsilon(1e-10));

    CHECK(kind_of([] {
              dense_oracle_check(ProductSpinState::uniform(13, SiteAmplitudes{0.0, 1.0}), {13, 1.0}, 0.0);
          }) == ErrorKind::DimensionTooLarge);
}

TEST_CASE("property: closed forms match the dense statevector for N <= 12") {
    std::mt19937_64 rng(2718);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t n = 1; n <= 12; ++n) {
        std::vector<SiteAmplitudes> sites;
        for (std::size_t i = 0; i < n; ++i) sites.push_back(site_with_beta_sq(u(rng), 6.0 * u(rng)));
        const auto report = dense_oracle_check(ProductSpinState(sites), {n, 1.0 + u(rng)}, 5.0 * u(rng));
        CHECK(report.max_deviation <= 1e-9);
    }
}
