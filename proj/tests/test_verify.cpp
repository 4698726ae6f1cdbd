#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "cgame/verify.hpp"

using namespace cgame;

namespace {

verify::Sizes small() {
    verify::Sizes s;
    s.kkt_instances = 60;
    s.topk_vectors = 40;
    s.trigger_instances = 60;
    s.frobenius_instances = 60;
    s.gradient_draws = 10;
    s.dynamics_instances = 40;
    s.duality_instances = 2;
    return s;
}

}  // namespace

TEST_CASE("library solvers pass every suite") {
    const auto report = verify::run_all(3, small());
    std::ostringstream os;
    verify::print_report(os, report);
    CAPTURE(os.str());
    CHECK(report.passed());
    CHECK(report.exit_code() == 0);
    CHECK(report.suites.size() == 7);
    CHECK(os.str().find("duality gap") != std::string::npos);
    CHECK(report.duality.min_gap >= -1e-9);
}

TEST_CASE("a perturbed analog solver is caught") {
    verify::Solvers broken;
    broken.analog = [](const Vector& c, double g, double k, double r) {
        auto sol = conjugate_analog_kkt(c, g, k, r);
        sol.w *= 1.0 + 1e-5;
        return sol;
    };
    const auto r = verify::kkt_suite(1, small(), broken);
    CHECK_FALSE(r.passed());
    const auto rep = verify::run_all(1, small(), broken);
    CHECK(rep.exit_code() == 1);
}

TEST_CASE("a top-k solver with the wrong tie rule is caught") {
    verify::Solvers broken;
    broken.topk = [](const Vector& c, double rho, double omega) {
        // Reverse the index order so ties resolve to the highest index.
        const Vector rev = c.reverse();
        auto sol = conjugate_topk(rev, rho, omega);
        sol.w = sol.w.reverse().eval();
        return sol;
    };
    CHECK_FALSE(verify::topk_suite(2, small(), broken).passed());
}

TEST_CASE("a wrong gradient is caught") {
    verify::Solvers broken;
    broken.gradient = [](const Matrix& w, const HyperParams& p) {
        Matrix g = penalty_gradient(w, p);
        g(0, 0) *= 1.001;
        return g;
    };
    CHECK_FALSE(verify::gradient_suite(4, small(), broken).passed());
}

TEST_CASE("a dynamics solver that reports false convergence is caught") {
    verify::Solvers broken;
    broken.rectified = [](const Vector& d, const Matrix& l, double eps, const DynamicsConfig& cfg, SolveTrace* tr) {
        DynamicsConfig one = cfg;
        one.max_sweeps = 1;
        auto rec = solve_rectified_drive(d, l, eps, one, tr);
        rec.converged = true;
        return rec;
    };
    CHECK_FALSE(verify::dynamics_suite(5, small(), broken).passed());
}

TEST_CASE("a solver that throws counts as a failure, not a crash") {
    verify::Solvers broken;
    broken.analog = [](const Vector&, double, double, double) -> ConjugateSolution {
        throw Error(ErrorCode::Internal, "boom");
    };
    const auto r = verify::frobenius_suite(6, small(), broken);
    CHECK(r.failures == r.instances);
    CHECK(r.first_failure.find("boom") != std::string::npos);
}

TEST_CASE("duality search on a fixed instance") {
    verify::DualityInstance inst;
    inst.u.resize(2, 3);
    inst.u << 0.2, 0.9, 0.4, 0.7, 0.1, 0.5;
    inst.params.variant = Variant::RectifiedAnalog;
    inst.params.gamma = 0.5;
    inst.params.kappa = 1.0;
    inst.params.p = 0.2;
    inst.params.q = 0.5;
    const auto res = verify::duality_search(inst, 2, 42);
    CHECK(res.best_dual >= res.best_primal - 1e-9);
    const Matrix m = res.primal_x * res.primal_x.transpose() / 3.0;
    const Matrix d = build_constraint_matrix(inst.params, 2);
    CHECK(((m - d).array() <= 1e-12).all());
}
