#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cgame/plasticity.hpp"

using namespace cgame;

namespace {

HyperParams bounded_params() {
    HyperParams p;
    p.kappa = 1.0;
    p.rho = 1.0;
    p.omega = 0.1;
    p.eta_w = 0.001;
    return p;
}

}  // namespace

TEST_CASE("bounded feedforward rule") {
    HyperParams p = bounded_params();

    SUBCASE("silent outputs at the row-sum target leave W unchanged") {
        NetworkState s(2, 10);
        s.w.setConstant(0.1);
        const Matrix before = s.w;
        update_w_bounded(s, Vector::Zero(2), Vector::Ones(10), p);
        CHECK((s.w - before).cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("Hebbian term alone") {
        NetworkState s(1, 20);
        s.w.setConstant(0.05);
        update_w_bounded(s, Vector::Ones(1), Vector::Ones(20), p);
        CHECK(s.w(0, 0) == doctest::Approx(0.051).epsilon(1e-12));
    }
    SUBCASE("clamp at the upper bound") {
        NetworkState s(1, 10);
        s.w.setConstant(0.1);
        s.w(0, 0) = 0.105 - 0.001;  // the Hebbian step lands at 0.105
        Vector x = Vector::Ones(1);
        Vector u = Vector::Zero(10);
        u(0) = 1.0;
        p.kappa = 0.0;
        const auto rep = update_w_bounded(s, x, u, p);
        CHECK(s.w(0, 0) == 0.1);
        CHECK(rep.n_clamped_high >= 1);
    }
    SUBCASE("rectification at zero") {
        NetworkState s(1, 3);
        s.w << 0.0, 0.5, 0.9;  // row sum 1.4 > rho
        p.omega = 1.0;
        p.eta_w = 1.0;
        const auto rep = update_w_bounded(s, Vector::Zero(1), Vector::Zero(3), p);
        CHECK(s.w(0, 0) == 0.0);
        CHECK(s.w(0, 1) == doctest::Approx(0.1));
        CHECK(rep.n_clamped_low == 1);
    }
}

TEST_CASE("analog feedforward rule") {
    HyperParams p = bounded_params();
    p.variant = Variant::RectifiedAnalog;
    p.gamma = 1.0;

    SUBCASE("from zero with silent outputs") {
        NetworkState s(2, 3);
        update_w_analog(s, Vector::Zero(2), Vector::Zero(3), p);
        for (double v : s.w.reshaped()) CHECK(v == doctest::Approx(p.eta_w).epsilon(1e-14));
    }
    SUBCASE("scalar steady state") {
        // c = gamma w + kappa (w - rho) with c = gamma = kappa = rho = 1 gives w = 1.
        NetworkState s(1, 1);
        p.eta_w = 0.1;
        for (int i = 0; i < 2000; ++i) update_w_analog(s, Vector::Ones(1), Vector::Ones(1), p);
        CHECK(s.w(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("no upper clamp") {
        NetworkState s(1, 1);
        s.w(0, 0) = 0.5;
        p.eta_w = 1.0;
        p.gamma = 0.0;
        p.kappa = 0.0;
        update_w_analog(s, Vector::Constant(1, 2.0), Vector::Ones(1), p);
        CHECK(s.w(0, 0) == 2.5);
    }
}

TEST_CASE("lateral rules") {
    HyperParams p;
    p.eta_l = 0.1;
    p.p = 0.03;
    p.q = 0.09;

    SUBCASE("balance point") {
        NetworkState s(3, 1);
        s.l.setConstant(0.2);
        s.l.diagonal().setOnes();
        const Matrix before = s.l;
        update_l_offdiag(s, Vector::Constant(3, 0.03), p);
        CHECK((s.l - before).cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("rectified at zero") {
        NetworkState s(2, 1);
        const auto rep = update_l_offdiag(s, Vector::Zero(2), p);
        CHECK(s.l(0, 1) == 0.0);
        CHECK(s.l(1, 0) == 0.0);
        CHECK(rep.n_l_rectified == 1);
    }
    SUBCASE("arithmetic") {
        NetworkState s(2, 1);
        s.l(0, 1) = s.l(1, 0) = 0.5;
        update_l_offdiag(s, Vector::Constant(2, 0.3), p);
        CHECK(s.l(0, 1) - 0.5 == doctest::Approx(0.00891).epsilon(1e-10));
    }
    SUBCASE("diagonal set point, floor and arithmetic") {
        NetworkState s(3, 1);
        s.l(1, 1) = p.eps_l;
        Vector x(3);
        x << 0.09, 0.0, 0.3;
        update_l_diag(s, x, p);
        CHECK(s.l(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(s.l(1, 1) == p.eps_l);
        CHECK(s.l(2, 2) - 1.0 == doctest::Approx(0.00819).epsilon(1e-10));
    }
    SUBCASE("random activity keeps L exactly symmetric and nonnegative") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> unit(0.0, 0.2);
        NetworkState s(16, 1);
        for (int step = 0; step < 500; ++step) {
            Vector x(16);
            for (auto& v : x) v = unit(rng);
            update_l_offdiag(s, x, p);
            update_l_diag(s, x, p);
            REQUIRE(is_exactly_symmetric(s.l));
            REQUIRE(s.l.minCoeff() >= 0.0);
            REQUIRE(s.l.diagonal().minCoeff() >= p.eps_l);
        }
    }
}

TEST_CASE("threshold rule") {
    HyperParams p;
    p.variant = Variant::Sigmoid;
    NetworkState s(2, 1);
    p.p = 0.5;
    update_theta(s, Vector::Constant(2, 0.5), p);
    CHECK(s.theta.isZero(0.0));

    p.p = 0.0;
    p.eta_theta = 0.1;
    update_theta(s, Vector::Ones(2), p);
    CHECK(s.theta(0) == doctest::Approx(0.1).epsilon(1e-15));

    p.variant = Variant::RectifiedBounded;
    try {
        update_theta(s, Vector::Ones(2), p);
        FAIL("expected VariantMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::VariantMismatch);
    }
}

TEST_CASE("sigmoid thresholds settle at the mean-activity target") {
    // One neuron with fixed drive: x = logistic(d - theta) must average p.
    HyperParams p;
    p.variant = Variant::Sigmoid;
    p.p = 0.2;
    p.q = 0.3;
    p.eta_theta = 0.05;
    NetworkState s(1, 1);
    for (int i = 0; i < 5000; ++i) {
        const double x = 1.0 / (1.0 + std::exp(-(0.7 - s.theta(0))));
        update_theta(s, Vector::Constant(1, x), p);
    }
    CHECK(1.0 / (1.0 + std::exp(-(0.7 - s.theta(0)))) == doctest::Approx(0.2).epsilon(1e-9));
}

TEST_CASE("apply_plasticity ordering and step counter") {
    HyperParams p = bounded_params();
    NetworkState s(2, 3);
    s.w.setConstant(0.05);
    Vector x(2), u(3);
    x << 0.2, 0.1;
    u << 1.0, 0.5, 0.0;

    NetworkState manual = s;
    update_w_bounded(manual, x, u, p);
    update_l_offdiag(manual, x, p);
    update_l_diag(manual, x, p);

    apply_plasticity(s, x, u, p);
    CHECK(s.step == 1);
    CHECK(s.w == manual.w);
    CHECK(s.l == manual.l);

    p.variant = Variant::Sigmoid;
    NetworkState sig(2, 3);
    apply_plasticity(sig, x, u, p);
    CHECK(sig.l(0, 0) == 1.0);
    CHECK(sig.theta(0) != 0.0);
}

TEST_CASE("shape errors") {
    HyperParams p;
    NetworkState s(2, 3);
    CHECK_THROWS_AS(update_w_bounded(s, Vector::Zero(3), Vector::Zero(3), p), Error);
    CHECK_THROWS_AS(update_w_bounded(s, Vector::Zero(2), Vector::Zero(2), p), Error);
    CHECK_THROWS_AS(update_l_offdiag(s, Vector::Zero(5), p), Error);
}
