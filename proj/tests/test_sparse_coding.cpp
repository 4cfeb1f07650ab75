#include <doctest.h>

#include <stdexcept>

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <vector>

#include "sfl/coherence.hpp"
#include "sfl/dictionary.hpp"
#include "sfl/rng.hpp"
#include "sfl/sparse_coding.hpp"

TEST_CASE("threshold schedule follows the closed-form recursion") {
    const auto sc = sfl::make_schedule(0.5, 1, 3.0, 0.0, 0.7, 10);
    CHECK(sc.rho == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(sc.contractive);
    REQUIRE(sc.Bk.size() == 11);
    REQUIRE(sc.theta.size() == 11);
    for (int k = 0; k <= 10; ++k) {
        const double expect = 3.0 * std::pow(2.0, -k);
        CHECK(sc.Bk[static_cast<std::size_t>(k)] == doctest::Approx(expect).epsilon(1e-14));
        CHECK(sc.theta[static_cast<std::size_t>(k)] ==
              doctest::Approx(0.5 * expect).epsilon(1e-14));
    }
}

TEST_CASE("schedule with noise injects the residual budget each step") {
    const auto sc = sfl::make_schedule(0.25, 2, 1.0, 0.1, 2.0, 3);
    CHECK(sc.rho == doctest::Approx(0.75).epsilon(1e-15));
    // B_{k+1} = 0.75 B_k + 2*s*C_A*delta with B_0 = s*B = 2
    CHECK(sc.Bk[0] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(sc.Bk[1] == doctest::Approx(2.3).epsilon(1e-14));
    CHECK(sc.Bk[2] == doctest::Approx(2.525).epsilon(1e-14));
    CHECK(sc.Bk[3] == doctest::Approx(2.69375).epsilon(1e-14));
    for (int k = 0; k <= 3; ++k)
        CHECK(sc.theta[static_cast<std::size_t>(k)] ==
              doctest::Approx(0.25 * sc.Bk[static_cast<std::size_t>(k)] + 0.2).epsilon(1e-14));
    CHECK_THROWS_AS((void)sfl::make_schedule(-0.1, 1, 1, 0, 1, 2), std::invalid_argument);
    CHECK_THROWS_AS((void)sfl::make_schedule(0.1, 0, 1, 0, 1, 2), std::invalid_argument);
}

TEST_CASE("a hot schedule reports itself as non-contractive") {
    const auto sc = sfl::make_schedule(0.4, 2, 1.0, 0.0, 1.0, 2);
    CHECK(sc.rho == doctest::Approx(1.2).epsilon(1e-14));
    CHECK_FALSE(sc.contractive);
}

TEST_CASE("certified l1 error equals the schedule endpoint") {
    CHECK(sfl::encoder_error_bound(0.5, 1, 3.0, 0.0, 10) ==
          doctest::Approx(3.0 * std::pow(2.0, -10)).epsilon(1e-14));
    // closed-form geometric sum cross-check
    double geom = 0.0;
    for (int i = 0; i <= 6; ++i) geom += std::pow(0.75, i);
    const double bound = sfl::encoder_error_bound(0.25, 2, 1.0, 0.1, 6);
    CHECK(bound == doctest::Approx(2.0 * std::pow(0.75, 6) + 2.0 * 2.0 * 0.1 * geom)
                       .epsilon(1e-13));
    // the closed form dominates the recursion endpoint at unit C_A (one extra
    // geometric term), and matches it exactly in the noiseless case above
    const auto sc = sfl::make_schedule(0.25, 2, 1.0, 0.1, 1.0, 6);
    CHECK(bound >= sc.Bk[6] - 1e-14);
    CHECK(bound - sc.Bk[6] == doctest::Approx(0.4 * std::pow(0.75, 6)).epsilon(1e-12));
}

TEST_CASE("soft thresholding shrinks toward zero") {
    Eigen::VectorXd v(3);
    v << 2.0, -0.5, 0.3;
    const Eigen::VectorXd out = sfl::soft_threshold(v, 0.4);
    CHECK(out[0] == doctest::Approx(1.6).epsilon(1e-15));
    CHECK(out[1] == doctest::Approx(-0.1).epsilon(1e-15));
    CHECK(out[2] == 0.0);
    const Eigen::VectorXd same = sfl::soft_threshold(v, 0.0);
    CHECK((same - v).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK_THROWS_AS((void)sfl::soft_threshold(v, -0.1), std::invalid_argument);
}

TEST_CASE("orthogonal design recovers exactly in one iteration") {
    const auto design = sfl::design_from_matrix(Eigen::MatrixXd::Identity(5, 5));
    Eigen::VectorXd xstar = Eigen::VectorXd::Zero(5);
    xstar[1] = 0.8;
    xstar[4] = -0.6;
    const Eigen::VectorXd y = design.A * xstar;
    const auto res = sfl::encode(design, y, 2, 1.0, 0.0, 3, false, &xstar);
    CHECK((res.x - xstar).lpNorm<Eigen::Infinity>() < 1e-14);
    REQUIRE(res.trace.l1_error.size() == 4);
    CHECK(res.trace.l1_error[0] == doctest::Approx(1.4).epsilon(1e-14));
    CHECK(res.trace.l1_error[1] < 1e-14);
    CHECK(res.code.support == std::vector<int>{1, 4});
    CHECK(res.code.w[1] == doctest::Approx(0.8).epsilon(1e-14));
    for (int off : res.trace.outside_ref) CHECK(off == 0);
}

TEST_CASE("iterates stay inside the certified radii on random designs") {
    sfl::rng::Engine master(515);
    for (int rep = 0; rep < 20; ++rep) {
        Eigen::MatrixXd D(30, 50);
        for (int i = 0; i < D.rows(); ++i)
            for (int j = 0; j < D.cols(); ++j) D(i, j) = master.normal();
        const auto design = sfl::design_from_matrix(D);
        const double ceiling = sfl::sparsity_ceiling(design.mu);
        const int s = 1;
        REQUIRE(s < ceiling);

        Eigen::VectorXd xstar = Eigen::VectorXd::Zero(50);
        for (int idx : master.subset(50, s))
            xstar[idx] = master.sign() * master.uniform(0.5, 1.0);
        const Eigen::VectorXd y = design.A * xstar;
        const auto res = sfl::encode(design, y, s, 1.0, 0.0, 25, false, &xstar);

        REQUIRE(res.trace.l1_error.size() == 26);
        for (std::size_t k = 0; k < res.trace.l1_error.size(); ++k) {
            CHECK(res.trace.l1_error[k] <= res.schedule.Bk[k] + 1e-12);
            CHECK(res.trace.outside_ref[k] == 0);
        }
        CHECK(res.trace.l1_error.back() <=
              sfl::encoder_error_bound(design.mu, s, 1.0, 0.0, 25) + 1e-12);
    }
}

TEST_CASE("underthresholded iteration spills off the reference support") {
    sfl::rng::Engine e(99);
    Eigen::MatrixXd D(10, 20);
    for (int i = 0; i < D.rows(); ++i)
        for (int j = 0; j < D.cols(); ++j) D(i, j) = e.normal();
    const auto design = sfl::design_from_matrix(D);
    Eigen::VectorXd xstar = Eigen::VectorXd::Zero(20);
    xstar[3] = 1.0;
    const Eigen::VectorXd y = design.A * xstar;
    auto sc = sfl::make_schedule(design.mu, 1, 1.0, 0.0, design.C_A, 2);
    for (auto& th : sc.theta) th = 0.0;  // destroy the certificate
    const auto res = sfl::encode_normalized(design.A, y, sc, 2, &xstar);
    CHECK(res.trace.outside_ref[1] > 0);
}

TEST_CASE("encoder refuses inadmissible sparsity") {
    Eigen::MatrixXd M(2, 2);
    M << 1.0, 1.0 / std::sqrt(2.0), 0.0, 1.0 / std::sqrt(2.0);
    const auto design = sfl::design_from_matrix(M);
    const Eigen::VectorXd y = Eigen::VectorXd::Ones(2);
    CHECK_THROWS_AS((void)sfl::encode(design, y, 2, 1.0, 0.0, 5), std::invalid_argument);
    CHECK_NOTHROW((void)sfl::encode(design, y, 1, 1.0, 0.0, 5));
}

TEST_CASE("schedule length must cover the requested iterations") {
    const auto design = sfl::design_from_matrix(Eigen::MatrixXd::Identity(3, 3));
    const auto sc = sfl::make_schedule(0.0, 1, 1.0, 0.0, 1.0, 2);
    const Eigen::VectorXd y = Eigen::VectorXd::Ones(3);
    CHECK_THROWS_AS((void)sfl::encode_normalized(design.A, y, sc, 5), std::invalid_argument);
}

TEST_CASE("reconstruction and in-span distances") {
    const auto dict = sfl::make_trig_dictionary(sfl::DomainKind::Cube, 1, 1);
    Eigen::VectorXd c1(3), c2(3);
    c1 << 1.0, 0.0, 0.0;
    c2 << 0.0, 0.0, 0.0;
    CHECK(sfl::in_span_l2_distance(dict, c1, c2) ==
          doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));

    sfl::SparseCode code;
    code.w = Eigen::VectorXd::Zero(3);
    code.w[1] = 2.0;
    code.support = {1};
    const std::array<double, 1> t{0.2};
    CHECK(sfl::reconstruct_eval(dict, code, t) ==
          doctest::Approx(2.0 * dict.eval(1, t)).epsilon(1e-14));
}
