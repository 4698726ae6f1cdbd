#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "cgame/dynamics.hpp"
#include "cgame/objective.hpp"

namespace cgame::verify {

struct Sizes {
    std::size_t kkt_instances = 1000;
    std::size_t kkt_max_n = 8;
    std::size_t topk_vectors = 500;
    std::size_t topk_max_n = 12;
    std::size_t trigger_instances = 1000;
    std::size_t frobenius_instances = 1000;
    std::size_t gradient_draws = 100;
    std::size_t dynamics_instances = 300;
    std::size_t duality_instances = 12;
};

/// Solvers under test. Defaults are the library routines; tests swap in
/// broken ones to exercise the failure path.
struct Solvers {
    std::function<ConjugateSolution(const Vector&, double, double, double)> analog = conjugate_analog_kkt;
    std::function<ConjugateSolution(const Vector&, double, double)> topk = conjugate_topk;
    std::function<Matrix(const Matrix&, const HyperParams&)> gradient = penalty_gradient;
    std::function<ActivityRecord(const Vector&, const Matrix&, double, const DynamicsConfig&, SolveTrace*)> rectified =
        solve_rectified_drive;
};

struct SuiteResult {
    std::string name;
    std::size_t instances = 0;
    std::size_t failures = 0;
    std::string metric;     // what `worst` measures
    double worst = 0.0;
    double limit = 0.0;
    std::string first_failure;

    bool passed() const { return failures == 0; }
};

struct DualityStats {
    std::vector<double> gaps;  // best dual minus best primal, per instance
    double min_gap = 0.0;
    double median_gap = 0.0;
    double max_gap = 0.0;
};

SuiteResult kkt_suite(std::uint64_t seed, const Sizes& sizes, const Solvers& solvers);
SuiteResult topk_suite(std::uint64_t seed, const Sizes& sizes, const Solvers& solvers);
SuiteResult trigger_suite(std::uint64_t seed, const Sizes& sizes, const Solvers& solvers);
SuiteResult frobenius_suite(std::uint64_t seed, const Sizes& sizes, const Solvers& solvers);
SuiteResult gradient_suite(std::uint64_t seed, const Sizes& sizes, const Solvers& solvers);
SuiteResult dynamics_suite(std::uint64_t seed, const Sizes& sizes, const Solvers& solvers);
SuiteResult duality_suite(std::uint64_t seed, const Sizes& sizes, const Solvers& solvers,
                          DualityStats* stats = nullptr);

struct DualityInstance {
    Matrix u;  // n_in x T
    HyperParams params;
};

struct DualitySearch {
    double best_primal = 0.0;
    double best_dual = 0.0;
    Matrix primal_x;
    Matrix dual_l;
};

/// Small-instance search for the analog variant: random-restart hill climbing
/// over feasible X for the primal, projected subgradient descent over L >= 0
/// for the dual. Each dual value is the best Lagrangian found by alternating
/// maximization over W and X from several starts, one of which is the primal
/// incumbent.
DualitySearch duality_search(const DualityInstance& inst, std::size_t n_outputs, std::uint64_t seed,
                             const Solvers& solvers = {});

struct Report {
    std::vector<SuiteResult> suites;
    DualityStats duality;

    bool passed() const;
    /// 0 when every suite passed, 1 otherwise.
    int exit_code() const { return passed() ? 0 : 1; }
};

Report run_all(std::uint64_t seed, const Sizes& sizes = {}, const Solvers& solvers = {});

void print_report(std::ostream& os, const Report& report);

}  // namespace cgame::verify
