#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cgame/core.hpp"

using namespace cgame;

TEST_CASE("constraint matrix") {
    HyperParams p;
    p.p = 0.0;
    p.q = 1.0;
    CHECK(build_constraint_matrix(p, 2) == Matrix::Identity(2, 2));

    p.p = p.q = 0.09;
    const Matrix d = build_constraint_matrix(p, 3);
    for (double v : d.reshaped()) CHECK(v == doctest::Approx(0.0081).epsilon(1e-14));

    p.p = 0.03;
    const Matrix d2 = build_constraint_matrix(p, 2);
    CHECK(d2(0, 0) == doctest::Approx(0.0081).epsilon(1e-14));
    CHECK(d2(1, 1) == doctest::Approx(0.0081).epsilon(1e-14));
    CHECK(d2(0, 1) == doctest::Approx(0.0009).epsilon(1e-14));
    CHECK(d2(1, 0) == d2(0, 1));

    CHECK_THROWS_AS(build_constraint_matrix(p, 0), Error);
}

TEST_CASE("correlation matrices") {
    SUBCASE("single unit column") {
        Matrix x(1, 1);
        x << 1.0;
        const auto c = correlations(x, Dataset(x));
        CHECK(c.output_input(0, 0) == 1.0);
        CHECK(c.output_output(0, 0) == 1.0);
    }
    SUBCASE("zero activity") {
        Matrix u = Matrix::Ones(3, 4);
        const auto c = correlations(Matrix::Zero(2, 4), Dataset(u));
        CHECK(c.output_input.isZero(0.0));
        CHECK(c.output_output.isZero(0.0));
    }
    SUBCASE("two steps") {
        Matrix x(2, 2), u(1, 2);
        x << 1, 0, 0, 1;
        u << 1, 1;
        const auto c = correlations(x, Dataset(u));
        Matrix expect_xu(2, 1), expect_xx(2, 2);
        expect_xu << 0.5, 0.5;
        expect_xx << 0.5, 0, 0, 0.5;
        CHECK(c.output_input == expect_xu);
        CHECK(c.output_output == expect_xx);
    }
    SUBCASE("output-output product is exactly symmetric") {
        Matrix x = Matrix::Random(5, 37).cwiseAbs();
        Matrix u = Matrix::Random(3, 37).cwiseAbs();
        CHECK(is_exactly_symmetric(correlations(x, Dataset(u)).output_output));
    }
    CHECK_THROWS_AS(correlations(Matrix::Zero(2, 3), Dataset(Matrix::Ones(2, 4))), Error);
}

TEST_CASE("dataset validation") {
    Matrix m = Matrix::Ones(2, 2);
    m(1, 0) = -0.5;
    CHECK_THROWS_AS(Dataset{m}, Error);
    m(1, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(Dataset{m}, Error);
    CHECK_NOTHROW(Dataset{Matrix::Zero(2, 2)});
}

TEST_CASE("hyperparameter validation") {
    HyperParams p;
    CHECK_NOTHROW(p.validate());
    p.p = 0.2;
    CHECK_THROWS_AS(p.validate(), Error);
    p = HyperParams{};
    p.eps_l = 0.0;
    CHECK_THROWS_AS(p.validate(), Error);
    p = HyperParams{};
    CHECK(p.threshold_rate() == p.eta_l);
    p.eta_theta = 0.5;
    CHECK(p.threshold_rate() == 0.5);
}

TEST_CASE("network state invariants") {
    HyperParams params;
    NetworkState s(3, 4);
    CHECK(s.l == Matrix::Identity(3, 3));
    CHECK_NOTHROW(s.validate(params));

    SUBCASE("asymmetric L") {
        s.l(0, 1) = 0.2;
        try {
            s.validate(params);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::InvariantViolation);
        }
    }
    SUBCASE("W above omega only matters for bounded variants") {
        s.w(2, 3) = 0.5;
        CHECK_THROWS_AS(s.validate(params), Error);
        params.variant = Variant::RectifiedAnalog;
        CHECK_NOTHROW(s.validate(params));
    }
    SUBCASE("diagonal floor") {
        s.l(1, 1) = 1e-4;
        CHECK_THROWS_AS(s.validate(params), Error);
        params.variant = Variant::Sigmoid;
        CHECK_NOTHROW(s.validate(params));
    }
    SUBCASE("negative lateral weight") {
        s.l(0, 2) = s.l(2, 0) = -0.1;
        CHECK_THROWS_AS(s.validate(params), Error);
    }
}

TEST_CASE("variant names round trip") {
    for (Variant v : {Variant::RectifiedBounded, Variant::RectifiedAnalog, Variant::Sigmoid})
        CHECK(parse_variant(to_string(v)) == v);
    CHECK(parse_variant("analog") == Variant::RectifiedAnalog);
    CHECK_THROWS_AS(parse_variant("tanh"), Error);
}
