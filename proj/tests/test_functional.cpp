#include <doctest.h>

#include <stdexcept>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "sfl/coherence.hpp"
#include "sfl/dictionary.hpp"
#include "sfl/functional.hpp"
#include "sfl/rng.hpp"
#include "sfl/sampling.hpp"

using sfl::Dictionary;
using sfl::DomainKind;
using sfl::make_trig_dictionary;

TEST_CASE("l2 functional evaluates through the coefficient norm") {
    const Dictionary dict = make_trig_dictionary(DomainKind::Cube, 1, 1);
    const auto F = sfl::make_l2norm();
    Eigen::VectorXd w(3);
    w << 3.0, 0.0, -4.0;
    CHECK(F.eval_coeffs(dict, w) == doctest::Approx(std::sqrt(0.5) * 5.0).epsilon(1e-14));
    CHECK(F.beta == 1.0);
    CHECK(F.value_at_zero == 0.0);
}

TEST_CASE("pairing functional rescales an oversized pairing element") {
    const Dictionary dict = make_trig_dictionary(DomainKind::Cube, 1, 1);
    Eigen::VectorXd g(3);
    g << 2.0, 0.0, 0.0;  // L2 norm sqrt(0.5)*2 = sqrt2 > 1
    const auto F = sfl::make_inner_product(dict, g);
    const double gnorm = std::sqrt(dict.gamma) * F.g_coeffs.norm();
    CHECK(gnorm == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(F.g_coeffs[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));

    Eigen::VectorXd small(3);
    small << 0.5, 0.0, 0.0;  // L2 norm 0.354, kept as is
    const auto G = sfl::make_inner_product(dict, small);
    CHECK(G.g_coeffs[0] == doctest::Approx(0.5).epsilon(1e-15));

    Eigen::VectorXd w(3);
    w << 1.0, 2.0, 0.0;
    CHECK(G.eval_coeffs(dict, w) == doctest::Approx(dict.gamma * 0.5).epsilon(1e-14));
}

TEST_CASE("composed scalar functional applies its outer map") {
    const Dictionary dict = make_trig_dictionary(DomainKind::Cube, 1, 1);
    Eigen::VectorXd g(3);
    g << 1.0, 0.0, 0.0;
    const auto F = sfl::make_scalar_compose(dict, g, [](double t) { return std::cos(t); }, 1.0);
    Eigen::VectorXd w(3);
    w << 2.0, 0.0, 0.0;
    const double inner = dict.gamma * (F.g_coeffs.dot(w));
    CHECK(F.eval_coeffs(dict, w) == doctest::Approx(std::cos(inner)).epsilon(1e-14));
    CHECK(F.value_at_zero == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("coefficient route and quadrature route agree") {
    const Dictionary dict = make_trig_dictionary(DomainKind::Cube, 1, 2);
    const auto F = sfl::make_l2norm();
    Eigen::VectorXd w(5);
    w << 0.2, -1.0, 0.4, 0.0, 0.7;
    const double direct = F.eval_coeffs(dict, w);
    const double quad = sfl::eval_functional_by_quadrature(F, dict, w, 2 * dict.max_freq + 2);
    CHECK(quad == doctest::Approx(direct).epsilon(1e-10));

    for (int kind = 0; kind < 3; ++kind) {
        sfl::Functional P;
        if (kind == 0) P = sfl::make_l2norm();
        if (kind == 1) {
            Eigen::VectorXd g = Eigen::VectorXd::Zero(dict.N);
            g[1] = 0.8;
            P = sfl::make_inner_product(dict, g);
        }
        if (kind == 2) {
            Eigen::VectorXd g = Eigen::VectorXd::Zero(dict.N);
            g[2] = 1.0;
            P = sfl::make_scalar_compose(dict, g, [](double t) { return std::cos(t); }, 1.0);
        }
        const auto rep = sfl::functional_consistency_check(P, dict, 10, 99);
        CHECK(rep.pass);
        CHECK(rep.max_gap <= 1e-9);
    }
}

TEST_CASE("modulus transfer constants on the identity design") {
    const auto design = sfl::design_from_matrix(Eigen::MatrixXd::Identity(3, 3));
    const auto mc = sfl::modulus_constants(design, 1, 2.0, 0.25, 2.25);
    // upper: 2 * 3^(-1/2), lower: 1 / (sqrt3 * 1.5)
    CHECK(mc.upper == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-14));
    CHECK(mc.lower == doctest::Approx(1.0 / (std::sqrt(3.0) * 1.5)).epsilon(1e-14));

    Eigen::MatrixXd M(2, 2);
    M << 1.0, 1.0 / std::sqrt(2.0), 0.0, 1.0 / std::sqrt(2.0);
    const auto coh = sfl::design_from_matrix(M);
    CHECK_THROWS_AS((void)sfl::modulus_constants(coh, 2, 2.0, 0.25, 2.25), std::domain_error);
}

TEST_CASE("closed-form constants on the identity design") {
    const auto design = sfl::design_from_matrix(Eigen::MatrixXd::Identity(3, 3));
    const auto tc = sfl::theoretical_constants(2.0, 3, 1.0, 1, 3, design, 5, 0.25, 1.0, 0.0);
    CHECK(tc.mu == 0.0);
    CHECK(tc.c0 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(tc.rho == 0.0);
    CHECK(std::isinf(tc.decay_rate));
    CHECK(tc.code_l1_gain == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(tc.code_sup_scale == doctest::Approx(31.17691453623979).epsilon(1e-12));
    CHECK(tc.code_delta_scale == doctest::Approx(14.696938456699069).epsilon(1e-12));
    CHECK(tc.recon_decay_coeff == doctest::Approx(41.569219381653056).epsilon(1e-12));
    CHECK(tc.recon_sigma_coeff == doctest::Approx(45.64065171514118).epsilon(1e-12));
    CHECK(tc.estimator_constant == doctest::Approx(26.044733772875755).epsilon(1e-12));
    CHECK(tc.norm_equiv == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(tc.code_box == doctest::Approx(63.87385299293886).epsilon(1e-12));
    CHECK(tc.modulus_upper == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-13));
    CHECK(tc.functional_sup == doctest::Approx(3.0 * 63.87385299293886).epsilon(1e-11));
    CHECK(tc.decoder_constant ==
          doctest::Approx((tc.modulus_upper + tc.functional_sup) * (1.0 + 2.0 * tc.code_box))
              .epsilon(1e-12));
    CHECK(tc.provenance.at("mu").rfind("measured", 0) == 0);
    CHECK(tc.provenance.count("default") == 1);
}

namespace {

sfl::SyntheticFunction sparse_custom(const Dictionary& dict, const std::vector<int>& support,
                                     const std::vector<double>& values) {
    sfl::SyntheticFunction f;
    f.tag = sfl::SyntheticFunction::Tag::Custom;
    f.coeffs = Eigen::VectorXd::Zero(dict.N);
    for (std::size_t i = 0; i < support.size(); ++i)
        f.coeffs[support[i]] = values[i];
    f.B = f.coeffs.lpNorm<1>();
    return f;
}

}  // namespace

TEST_CASE("pipeline on a dense sample set: hypotheses hold and bounds stack") {
    const Dictionary dict = make_trig_dictionary(DomainKind::Cube, 1, 3);
    const int m = 4 * sfl::min_samples_for_coherence(dict.gamma, dict.N, 0.1);
    const auto samples = sfl::draw_samples(dict.domain, m, 314);
    const auto f = sfl::sample_a1_alpha(dict, 2.0, 7);

    sfl::PipelineOptions opt;
    opt.s = 2;
    opt.J = 25;
    const auto rep = sfl::evaluate_pipeline(sfl::make_l2norm(), dict, samples, f, opt);

    CHECK(rep.valid);
    CHECK(rep.admissible);
    CHECK(rep.contractive);
    CHECK(rep.b_ok);
    CHECK(rep.delta_ok);
    CHECK(rep.ud_ok);
    CHECK(rep.tracking_ok);
    CHECK(rep.holder_gap <= rep.holder_rhs + 1e-12);
    CHECK(rep.measured_l2_error <= rep.certified_bound + 1e-12);
    // in the class-bound/tail-budget configuration the two certified routes
    // are algebraically the same number
    CHECK(rep.certified_bound == doctest::Approx(rep.composite_rhs).epsilon(1e-9));
    CHECK(rep.trace_l1_error.size() == static_cast<std::size_t>(opt.J) + 1);
    CHECK(rep.schedule_Bk.size() == static_cast<std::size_t>(opt.J) + 1);
    CHECK(rep.trace_theta.size() == static_cast<std::size_t>(opt.J));

    // a second evaluation of the same inputs is bit-identical
    const auto rep2 = sfl::evaluate_pipeline(sfl::make_l2norm(), dict, samples, f, opt);
    CHECK(rep.P_hat == rep2.P_hat);
    CHECK(rep.measured_l2_error == rep2.measured_l2_error);
    CHECK(rep.mu == rep2.mu);
}

TEST_CASE("pipeline recovers an exactly sparse truth with a zero residual budget") {
    const Dictionary dict = make_trig_dictionary(DomainKind::Cube, 1, 3);
    const int m = 4 * sfl::min_samples_for_coherence(dict.gamma, dict.N, 0.1);
    const auto samples = sfl::draw_samples(dict.domain, m, 6021);
    const auto f = sparse_custom(dict, {1, 4}, {0.6, -0.3});

    sfl::PipelineOptions opt;
    opt.s = 2;
    opt.J = 40;
    opt.b_mode = sfl::PipelineOptions::BMode::Oracle;
    opt.delta_mode = sfl::PipelineOptions::DeltaMode::Zero;
    const auto rep = sfl::evaluate_pipeline(sfl::make_l2norm(), dict, samples, f, opt);

    CHECK(rep.valid);
    CHECK(rep.delta_used == 0.0);
    CHECK(rep.sigma_l1 <= 1e-14);
    CHECK(rep.measured_l2_error < 1e-8);
    CHECK(rep.holder_gap < 1e-8);
    CHECK(rep.support == std::vector<int>{1, 4});
}

TEST_CASE("pipeline's taylor decoder branch stays inside its certificate") {
    const Dictionary dict = make_trig_dictionary(DomainKind::Cube, 1, 2);
    const int m = 4 * sfl::min_samples_for_coherence(dict.gamma, dict.N, 0.1);
    const auto samples = sfl::draw_samples(dict.domain, m, 99);
    const auto f = sfl::sample_a1_alpha(dict, 2.0, 3);

    sfl::PipelineOptions opt;
    opt.s = 1;
    opt.J = 20;
    opt.taylor_cells = 8;
    const auto rep = sfl::evaluate_pipeline(sfl::make_l2norm(), dict, samples, f, opt);
    CHECK(rep.code_in_box);
    CHECK(std::isfinite(rep.taylor_value));
    CHECK(rep.taylor_gap <= rep.taylor_bound);

    sfl::PipelineOptions odd = opt;
    odd.taylor_cells = 7;
    CHECK_THROWS_AS((void)sfl::evaluate_pipeline(sfl::make_l2norm(), dict, samples, f, odd),
                    std::invalid_argument);
}

TEST_CASE("sigma rate sweep produces a negative slope with certified bounds") {
    const Dictionary dict = make_trig_dictionary(DomainKind::Cube, 1, 8);
    const auto table = sfl::rate_sweep_sigma(dict, 1.0, {1, 2, 3}, 5, 2718);
    REQUIRE(table.points.size() == 3);
    CHECK(table.axis == "s");
    CHECK(table.slope < 0.0);
    CHECK(table.slope_reference == doctest::Approx(-1.5).epsilon(1e-15));
    for (const auto& pt : table.points) {
        CHECK(pt.mean_value >= 0.0);
        CHECK(pt.mean_value <= pt.bound + 1e-12);
    }
}

TEST_CASE("iteration rate sweep tracks the geometric reference") {
    sfl::rng::Engine e(5150);
    Eigen::MatrixXd D(40, 60);
    for (int i = 0; i < D.rows(); ++i)
        for (int j = 0; j < D.cols(); ++j) D(i, j) = e.normal();
    const auto design = sfl::design_from_matrix(D);
    const auto table = sfl::rate_sweep_iterations(design, 1, {0, 4, 8, 12}, 5, 161);
    REQUIRE(table.points.size() == 4);
    CHECK(table.axis == "J");
    CHECK(table.slope_reference == doctest::Approx(std::log(design.mu)).epsilon(1e-12));
    CHECK(table.points.front().mean_value > table.points.back().mean_value);
    for (const auto& pt : table.points) CHECK(pt.mean_value <= pt.bound + 1e-12);
}

TEST_CASE("sample-count sweep compares coherence to its closed-form level") {
    const Dictionary dict = make_trig_dictionary(DomainKind::Cube, 1, 4);
    const auto table = sfl::rate_sweep_samples(dict, 0.1, {64, 128}, 3, 909);
    REQUIRE(table.points.size() == 2);
    CHECK(table.axis == "m");
    CHECK(table.points[0].bound > table.points[1].bound);
    for (const auto& pt : table.points) {
        CHECK(pt.mean_value > 0.0);
        CHECK(pt.mean_value <= pt.bound);
    }
}
