#include <doctest.h>

#include <stdexcept>

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "sfl/taylor.hpp"

TEST_CASE("bump profile: plateau, ramp, support edge") {
    const int N = 10;
    const double c = -0.5 + 5.0 / N;  // center of the middle cell, x = 0
    CHECK(sfl::bump(c, 5, N) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(sfl::bump(c + 1.0 / (3.0 * N), 5, N) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sfl::bump(c + 1.0 / (2.0 * N), 5, N) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sfl::bump(c + 2.0 / (3.0 * N), 5, N) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(sfl::bump(c + 1.0 / N, 5, N) == 0.0);
    CHECK(sfl::bump(c - 1.0 / (2.0 * N), 5, N) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS((void)sfl::bump(0.0, 11, 10), std::invalid_argument);
}

TEST_CASE("bumps form a partition of unity") {
    for (int N : {4, 9, 16}) {
        const auto rep = sfl::partition_check(N, 1, 257);
        CHECK(rep.pass);
        CHECK(rep.max_deviation <= 1e-12);
    }
    const auto rep2 = sfl::partition_check(4, 2, 33);
    CHECK(rep2.pass);
}

TEST_CASE("active cell enumeration on hand-checkable cases") {
    // d = 1, s = 1: every point is 1-sparse, all N+1 cells active
    const auto all1 = sfl::active_cells(1, 4, 1);
    REQUIRE(all1.size() == 5);
    for (int m = 0; m <= 4; ++m) CHECK(all1[static_cast<std::size_t>(m)] == sfl::MultiIndex{m});

    // d = 1, s = 0: only the origin; even cell count puts it on one center
    const auto even0 = sfl::active_cells(1, 10, 0);
    CHECK(even0 == std::vector<sfl::MultiIndex>{{5}});
    // odd cell count straddles the origin with two cells
    const auto odd0 = sfl::active_cells(1, 9, 0);
    CHECK(odd0 == std::vector<sfl::MultiIndex>{{4}, {5}});

    // d = 2, s = 1: the two coordinate axes, 5 + 5 - 1 distinct cells at N = 4
    const auto cross = sfl::active_cells(2, 4, 1);
    CHECK(cross.size() == 9);
    for (const auto& c : cross) CHECK((c[0] == 2 || c[1] == 2));

    // s = d: everything
    CHECK(sfl::active_cells(2, 2, 2).size() == 9);

    CHECK_THROWS_AS((void)sfl::active_cells(2, 1000, 2, 10), std::invalid_argument);
}

TEST_CASE("counting bound dominates the enumerated set") {
    for (int d : {1, 2, 3}) {
        for (int N : {4, 8}) {
            for (int s = 0; s <= std::min(d, 2); ++s) {
                const auto cells = sfl::active_cells(d, N, s);
                CHECK(static_cast<double>(cells.size()) <= sfl::active_cells_bound(d, N, s));
            }
        }
    }
    CHECK(sfl::active_cells_bound(2, 4, 1) == doctest::Approx(40.0).epsilon(1e-15));
}

TEST_CASE("approximation error scale at reference parameters") {
    CHECK(sfl::taylor_error_bound(1, 0, 1.0, 10) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(sfl::taylor_error_bound(2, 0, 1.0, 8) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(sfl::taylor_error_bound(1, 1, 1.0, 4) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK_THROWS_AS((void)sfl::taylor_error_bound(1, 0, 1.5, 4), std::invalid_argument);
}

TEST_CASE("value-route approximant reproduces constants exactly") {
    sfl::ScalarField f;
    f.value = [](std::span<const double>) { return 3.7; };
    const sfl::TaylorApproximant approx(f, 0, 1.0, 8, 2, 2);
    for (double x : {-0.5, -0.21, 0.0, 0.17, 0.5}) {
        for (double y : {-0.4, 0.0, 0.33}) {
            const std::array<double, 2> p{x, y};
            CHECK(approx.eval(p) == doctest::Approx(3.7).epsilon(1e-13));
        }
    }
}

TEST_CASE("first-order approximant is exact on affine fields") {
    sfl::ScalarField f;
    f.value = [](std::span<const double> x) { return 2.0 * x[0] - x[1] + 0.5; };
    f.deriv = [](const sfl::MultiIndex& n, std::span<const double>) -> double {
        if (n == sfl::MultiIndex{1, 0}) return 2.0;
        if (n == sfl::MultiIndex{0, 1}) return -1.0;
        return 0.0;
    };
    const sfl::TaylorApproximant approx(f, 1, 1.0, 6, 2, 2);
    for (double x : {-0.49, -0.1, 0.0, 0.26, 0.49}) {
        for (double y : {-0.37, 0.0, 0.44}) {
            const std::array<double, 2> p{x, y};
            CHECK(approx.eval(p) == doctest::Approx(f.value(p)).epsilon(1e-12));
        }
    }
}

TEST_CASE("value-route error stays under the certified level for a unit Lipschitz field") {
    sfl::ScalarField f;
    f.value = [](std::span<const double> x) { return std::cos(3.0 * x[0]) / 3.0; };
    const int N = 12;
    const sfl::TaylorApproximant approx(f, 0, 1.0, N, 1, 1);
    const double bound = sfl::taylor_error_bound(1, 0, 1.0, N);
    double worst = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const std::array<double, 1> p{-0.5 + i / 400.0};
        worst = std::max(worst, std::abs(approx.eval(p) - f.value(p)));
    }
    CHECK(worst <= bound);
    CHECK(approx.error_bound() == doctest::Approx(bound).epsilon(1e-15));
}

TEST_CASE("lazy localized evaluation matches the assembled approximant on sparse points") {
    auto g = [](std::span<const double> x) {
        double acc = 0.3;
        for (double v : x) acc += std::sin(2.0 * v) / 4.0;
        return acc;
    };
    sfl::ScalarField f;
    f.value = g;
    const int N = 4;
    const sfl::TaylorApproximant approx(f, 0, 1.0, N, 2, 1);
    for (double t : {-0.45, -0.2, 0.0, 0.11, 0.48}) {
        const std::array<double, 2> axis_x{t, 0.0};
        const std::array<double, 2> axis_y{0.0, t};
        CHECK(sfl::localized_value_r0(g, N, axis_x) ==
              doctest::Approx(approx.eval(axis_x)).epsilon(1e-13));
        CHECK(sfl::localized_value_r0(g, N, axis_y) ==
              doctest::Approx(approx.eval(axis_y)).epsilon(1e-13));
    }
    // a zero coordinate with an even cell count touches only the central plateau,
    // so a dense point in d dimensions activates at most 2^(nonzero count) cells
    const std::array<double, 2> dense{0.13, -0.13};
    CHECK_THROWS_AS((void)sfl::localized_value_r0(g, N, dense, 2), std::invalid_argument);
}

TEST_CASE("rescaling to the unit cube records the Hoelder inflation") {
    sfl::ScalarField f;
    f.value = [](std::span<const double> x) { return x[0]; };
    const auto scaled = sfl::rescale_to_unit_cube(f, 2.0, 1.0);
    const std::array<double, 1> z{0.1};
    CHECK(scaled.g.value(z) == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(scaled.inflation == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(scaled.B == doctest::Approx(2.0).epsilon(1e-15));
    CHECK_THROWS_AS((void)sfl::rescale_to_unit_cube(f, 0.0, 1.0), std::invalid_argument);
}
