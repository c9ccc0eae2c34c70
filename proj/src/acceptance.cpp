#include "thermolimit/acceptance.hpp"

#include "thermolimit/error.hpp"
#include "thermolimit/numerics.hpp"
#include "thermolimit/regularization.hpp"
#include "thermolimit/spin_boson.hpp"
#include "thermolimit/spin_ensemble.hpp"
#include "thermolimit/zurek_bath.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>

#include <unistd.h>

namespace thermolimit::acceptance {

namespace {

constexpr double kPi = std::numbers::pi;
const Tolerances kTol{};

std::string fmt(const char* pattern, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

struct Outcome {
    bool passed = false;
    std::string detail;
};

CriterionResult timed(int id, std::string title, double budget, const std::function<Outcome()>& body) {
    CriterionResult r;
    r.id = id;
    r.title = std::move(title);
    r.budget_seconds = budget;
    const auto start = std::chrono::steady_clock::now();
    try {
        const Outcome o = body();
        r.passed = o.passed;
        r.detail = o.detail;
    } catch (const Error& e) {
        r.error = e.name();
        r.detail = e.what();
    } catch (const std::exception& e) {
        r.error = "Exception";
        r.detail = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (r.seconds >= budget) {
        r.passed = false;
        r.detail += fmt("; over runtime budget %.0f s", budget);
    }
    return r;
}

Outcome fluctuation_scaling() {
    const std::size_t ns[] = {10, 100, 1000, 10000, 100000, 1000000};
    const auto table = ensemble::scaling_experiment(ensemble::SiteSampler::uniform(0.3, 0.9), ns, 42);
    const double slope = table.fit.slope;
    return {std::abs(slope - kTol.slope_target) <= kTol.slope_tol,
            fmt("slope %.6f, target %.2f +- %.2f", slope, kTol.slope_target, kTol.slope_tol)};
}

Outcome ensemble_oracle() {
    std::mt19937_64 rng(20240517);
    const auto sampler = ensemble::SiteSampler::uniform(-1.0, 1.0);
    double worst = 0.0;
    for (std::size_t n = 1; n <= 10; ++n) {
        for (int s = 0; s < 20; ++s) {
            const ensemble::ProductSpinState state = sampler.sample(n, rng);
            for (double t : {0.0, 0.7, 3.1}) {
                worst = std::max(worst, ensemble::dense_oracle_check(state, {n, 1.0}, t).max_deviation);
            }
        }
    }
    return {worst <= kTol.ensemble_oracle, fmt("max deviation %.3e <= %.0e", worst, kTol.ensemble_oracle)};
}

Outcome leading_order_exactness(std::size_t fock_dim) {
    double worst_td = 0.0;
    double worst_q = 0.0;
    for (std::size_t n = 1; n <= 3; ++n) {
        for (double g : {0.5, 1.0}) {
            const spinboson::SpinBosonConfig cfg{n, 0.0, 1.0, g, fock_dim};
            const spinboson::ExactEvolver evolver(cfg);
            const numerics::StateVector psi0 = spinboson::initial_state(cfg);
            for (int k = 0; k < 16; ++k) {
                const double t = 4.0 * kPi * k / 15.0;
                const numerics::ComplexMatrix exact = evolver.field_density(psi0, t);
                const spinboson::FieldDensity leading = spinboson::leading_order_field_density(cfg, t);
                worst_td = std::max(worst_td, numerics::trace_distance(exact, leading.rho));
                worst_q = std::max(worst_q, std::abs(spinboson::field_diagnostics(exact).mandel_q));
            }
        }
    }
    return {worst_td <= kTol.leading_trace_distance && worst_q <= kTol.leading_mandel_q,
            fmt("trace distance %.3e <= %.0e; |Q| %.3e <= %.0e", worst_td, kTol.leading_trace_distance, worst_q,
                kTol.leading_mandel_q)};
}

Outcome first_order_consistency(std::size_t fock_dim) {
    const double t = 2.0 * kPi;
    double ratios[2] = {0.0, 0.0};
    double worst_cross = 0.0;
    int i = 0;
    for (double delta : {1e-2, 1e-3}) {
        const spinboson::SpinBosonConfig cfg{2, delta, 1.0, 1.0, fock_dim};
        const numerics::StateVector exact = spinboson::exact_evolve(cfg, spinboson::initial_state(cfg), t);
        const double residual = (exact - spinboson::leading_order_state(cfg, t)).norm();
        ratios[i++] = residual / spinboson::first_order_correction(cfg, t).norm;
        worst_cross = std::max({worst_cross, spinboson::traced_correction_contribution(cfg, t),
                                spinboson::traced_correction_contribution(cfg, t, spinboson::bath_x_state(2, -1))});
    }
    const bool ratio_ok = ratios[1] >= kTol.ratio_lo && ratios[1] <= kTol.ratio_hi;
    return {ratio_ok && worst_cross <= kTol.cross_term,
            fmt("ratio %.6f at 1e-3 (%.6f at 1e-2) in [%.1f; %.1f]; cross term %.3e <= %.0e", ratios[1], ratios[0],
                kTol.ratio_lo, kTol.ratio_hi, worst_cross, kTol.cross_term)};
}

Outcome riemann_decay() {
    const std::size_t ns[] = {1, 2, 4, 8, 16, 32, 64};
    const spinboson::DecayScan scan = spinboson::riemann_decay_scan(1.0, 1.0, 1.0, 2.0 * kPi, ns);
    double low = 0.0;
    double high = 0.0;
    for (const auto& p : scan.points) {
        if (p.n <= 2) low = std::max(low, p.magnitude);
        if (p.n >= 32) high = std::max(high, p.magnitude);
    }
    return {high < low, fmt("max over N in {32; 64} %.6f < max over N in {1; 2} %.6f", high, low)};
}

Outcome zurek_oracle() {
    constexpr std::size_t kSamples = 50;
    const double dt = 2.0 * kPi / kSamples;
    double worst = 0.0;
    double worst_peak_offset = 0.0;
    for (std::size_t n = 1; n <= 12; ++n) {
        const zurek::BathConfig cfg{n, 1.0, false};
        std::vector<double> samples;
        for (std::size_t j = 0; j < kSamples; ++j) {
            const double t = dt * static_cast<double>(j);
            worst = std::max(worst, zurek::dense_oracle_check(cfg, t).max_deviation);
            samples.push_back(zurek::reduced_density(cfg, t).uu().real());
        }
        const double offset = std::abs(zurek::dominant_angular_frequency(samples, dt) - zurek::rabi_frequency(cfg)) /
                              zurek::frequency_bin_width(kSamples, dt);
        worst_peak_offset = std::max(worst_peak_offset, offset);
    }
    return {worst <= kTol.zurek_oracle && worst_peak_offset <= 1.0,
            fmt("max deviation %.3e <= %.0e; peak offset %.3f bins <= 1", worst, kTol.zurek_oracle,
                worst_peak_offset)};
}

Outcome decoherence_by_regularization() {
    int violations = 0;
    double worst_margin = 0.0; // largest offdiag / bound
    for (std::size_t n : {1U, 10U, 100U, 1000U, 10000U}) {
        for (double window : {1.0, 10.0, 100.0, 1000.0, 10000.0}) {
            const zurek::BathConfig cfg{n, 1.0, false};
            const double offdiag = std::abs(zurek::time_averaged_density(cfg, window).ud());
            const double bound = zurek::offdiag_bound(cfg, window);
            worst_margin = std::max(worst_margin, offdiag / bound);
            if (offdiag > bound) ++violations;
        }
    }
    const zurek::QubitDensityMatrix limit = zurek::reduced_density({1, 1.0, true}, 1.0);
    const bool exact = limit.uu() == numerics::Complex(0.5) && limit.dd() == numerics::Complex(0.5) &&
                       limit.ud() == numerics::Complex(0.0) && limit.du() == numerics::Complex(0.0);
    return {violations == 0 && exact,
            fmt("%d of 25 grid points above bound (max ratio %.4f); limit diag(1/2; 1/2) exact: %s", violations,
                worst_margin, exact ? "yes" : "no")};
}

Outcome abel_limits() {
    using regularization::TrigKind;
    double worst_limit_excess = -1.0; // max of |value - limit| - 2 eps
    double worst_quad = 0.0;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        const double cos_gap = std::abs(regularization::abel_integral(TrigKind::Cos, eps) - 0.0);
        const double sin_gap = std::abs(regularization::abel_integral(TrigKind::Sin, eps) - 1.0);
        worst_limit_excess = std::max({worst_limit_excess, cos_gap - 2.0 * eps, sin_gap - 2.0 * eps});
        for (TrigKind kind : {TrigKind::Cos, TrigKind::Sin}) {
            worst_quad = std::max(worst_quad, std::abs(regularization::abel_integral_numeric(kind, eps) -
                                                       regularization::abel_integral(kind, eps)));
        }
    }
    const auto schedule = regularization::RegularizationSchedule::decades();
    const double cos_limit = regularization::regularized_trig_limit(TrigKind::Cos, schedule).value;
    const double sin_limit = regularization::regularized_trig_limit(TrigKind::Sin, schedule).value;
    return {worst_limit_excess <= 0.0 && cos_limit == 0.0 && sin_limit == 0.0 && worst_quad <= kTol.abel_quadrature,
            fmt("max |value - limit| - 2 eps = %.3e <= 0; limits %g %g; quadrature gap %.3e <= %.0e",
                worst_limit_excess, cos_limit, sin_limit, worst_quad, kTol.abel_quadrature)};
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
    namespace fs = std::filesystem;
    using harness::Experiment;
    const fs::path root = fs::temp_directory_path() / fmt("thermolimit_determinism_%d", static_cast<int>(::getpid()));
    fs::remove_all(root);

    int compared = 0;
    int mismatched = 0;
    auto compare = [&](const std::vector<harness::Artifact>& a, const std::vector<harness::Artifact>& b,
                       const std::string& tag) {
        const fs::path da = root / (tag + "_a");
        const fs::path db = root / (tag + "_b");
        harness::write_artifacts(da, a, {});
        harness::write_artifacts(db, b, {});
        for (const auto& art : a) {
            ++compared;
            if (read_file(da / art.filename) != read_file(db / art.filename)) ++mismatched;
        }
        if (a.size() != b.size()) ++mismatched;
    };

    for (Experiment e : {Experiment::Scaling, Experiment::SpinBoson, Experiment::Zurek, Experiment::Regularize}) {
        nlohmann::json doc = {{"experiment", harness::to_string(e)}, {"seed", 42}};
        if (e == Experiment::Scaling) doc["parameters"] = {{"n_list", {10, 100, 1000, 10000}}};
        const harness::ExperimentConfig cfg = harness::parse_config(doc);
        compare(harness::run(cfg).artifacts, harness::run(cfg).artifacts, harness::to_string(e));
    }

    // The sweep must not depend on the number of threads.
    const nlohmann::json sweep_doc = {{"experiment", "zurek"},
                                      {"sweep", {{"ranges", {{"n", {3, 1, 2}}, {"t", {{"start", 0}, {"stop", 3}, {"count", 7}}}}}}}};
    const harness::SweepConfig sweep_cfg = harness::parse_sweep_config(sweep_doc);
    compare(harness::sweep(sweep_cfg, 1).artifacts, harness::sweep(sweep_cfg, 4).artifacts, "sweep");

    fs::remove_all(root);
    return {mismatched == 0, fmt("%d data files compared across two executions; %d differ", compared, mismatched)};
}

} // namespace

std::vector<CriterionResult> run_suite(const Options& options) {
    std::vector<CriterionResult> out;
    out.push_back(timed(1, "fluctuation scaling", 5.0, fluctuation_scaling));
    out.push_back(timed(2, "spin-ensemble oracle", 30.0, ensemble_oracle));
    out.push_back(timed(3, "leading order exact at Delta = 0", 120.0,
                        [&] { return leading_order_exactness(options.fock_dim); }));
    out.push_back(timed(4, "first-order consistency", 120.0,
                        [&] { return first_order_consistency(options.fock_dim); }));
    out.push_back(timed(5, "Riemann-lemma decay", 30.0, riemann_decay));
    out.push_back(timed(6, "Zurek reduced density", 60.0, zurek_oracle));
    out.push_back(timed(7, "decoherence by regularization", 5.0, decoherence_by_regularization));
    out.push_back(timed(8, "Abel limits", 5.0, abel_limits));
    out.push_back(timed(9, "determinism", 60.0, determinism));
    return out;
}

std::string format_line(const CriterionResult& r) {
    return fmt("[%s] %d %s: %s (%.2f s / %.0f s)", r.passed ? "PASS" : "FAIL", r.id, r.title.c_str(),
               r.detail.c_str(), r.seconds, r.budget_seconds);
}

harness::Table results_table(const std::vector<CriterionResult>& results) {
    harness::Table table;
    table.columns = {"criterion", "title", "passed", "error", "detail"};
    for (const auto& r : results) {
        // Runtime-budget notes depend on the machine, so the table keeps only
        // the measured detail.
        std::string detail = r.detail;
        if (const auto pos = detail.find("; over runtime budget"); pos != std::string::npos) detail.erase(pos);
        table.rows.push_back({static_cast<std::int64_t>(r.id), r.title, r.passed ? "true" : "false",
                              r.error.value_or(""), detail});
    }
    return table;
}

} // namespace thermolimit::acceptance
