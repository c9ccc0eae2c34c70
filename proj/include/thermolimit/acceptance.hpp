// acceptance.hpp: the nine acceptance criteria as one callable suite
//
// Each criterion measures one quantity, compares it against a tolerance
// pinned below, and records its own wall time against a runtime budget.
// A numerical failure inside a criterion fails that criterion and records the
// error name; the remaining criteria still run.

#pragma once

#include "thermolimit/harness.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace thermolimit::acceptance {

struct Tolerances {
    double slope_target = -0.5;
    double slope_tol = 0.05;
    double ensemble_oracle = 1e-9;
    double leading_trace_distance = 1e-7;
    double leading_mandel_q = 1e-6;
    double ratio_lo = 0.9;
    double ratio_hi = 1.1;
    double cross_term = 1e-10;
    double zurek_oracle = 1e-10;
    double abel_quadrature = 1e-10;
};

struct Options {
    // Forces the Fock dimension of the spin-boson criteria (0 keeps the
    // leakage-sized default). A too-small value must surface TruncationLeakage.
    std::size_t fock_dim = 0;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    std::string detail;             // measured values against their limits
    std::optional<std::string> error; // originating error name, if one was thrown
    double seconds = 0.0;
    double budget_seconds = 0.0;
};

std::vector<CriterionResult> run_suite(const Options& options = {});

// One line per criterion: "[PASS] 1 <title>: <detail> (<s> s / <budget> s)".
std::string format_line(const CriterionResult& r);

// Time-free summary table, stable across runs.
harness::Table results_table(const std::vector<CriterionResult>& results);

} // namespace thermolimit::acceptance
