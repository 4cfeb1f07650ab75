#include <doctest.h>

#include <atomic>
#include <stdexcept>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "sfl/rng.hpp"
#include "sfl/util.hpp"

TEST_CASE("engine streams are reproducible from the seed alone") {
    sfl::rng::Engine a(1234);
    sfl::rng::Engine b(1234);
    for (int i = 0; i < 200; ++i) {
        CHECK(a.raw() == b.raw());
        CHECK(a.uniform01() == b.uniform01());
        CHECK(a.normal() == b.normal());
    }
    sfl::rng::Engine c(1235);
    int diff = 0;
    sfl::rng::Engine a2(1234);
    for (int i = 0; i < 64; ++i)
        if (a2.raw() != c.raw()) ++diff;
    CHECK(diff > 32);
}

TEST_CASE("uniform01 lands in [0,1) and uniform respects its interval") {
    sfl::rng::Engine e(7);
    for (int i = 0; i < 1000; ++i) {
        const double u = e.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const double v = e.uniform(-2.0, 3.5);
        CHECK(v >= -2.0);
        CHECK(v < 3.5);
    }
}

TEST_CASE("normal draws are finite with plausible first moments") {
    sfl::rng::Engine e(42);
    double sum = 0.0, sumsq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double x = e.normal();
        CHECK(std::isfinite(x));
        sum += x;
        sumsq += x * x;
    }
    CHECK(std::abs(sum / n) < 0.05);
    CHECK(sumsq / n == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("uniform_int stays inclusive and covers the range") {
    sfl::rng::Engine e(99);
    std::set<std::int64_t> seen;
    for (int i = 0; i < 500; ++i) {
        const auto v = e.uniform_int(3, 7);
        CHECK(v >= 3);
        CHECK(v <= 7);
        seen.insert(v);
    }
    CHECK(seen.size() == 5);
    CHECK(e.uniform_int(5, 5) == 5);
    CHECK_THROWS_AS((void)e.uniform_int(2, 1), std::invalid_argument);
}

TEST_CASE("sign emits both values") {
    sfl::rng::Engine e(5);
    int pos = 0, neg = 0;
    for (int i = 0; i < 200; ++i) (e.sign() > 0 ? pos : neg)++;
    CHECK(pos > 0);
    CHECK(neg > 0);
    CHECK(pos + neg == 200);
}

TEST_CASE("subset returns a sorted k-subset of the requested range") {
    sfl::rng::Engine e(11);
    for (int rep = 0; rep < 50; ++rep) {
        auto s = e.subset(20, 6);
        REQUIRE(s.size() == 6);
        std::set<int> uniq(s.begin(), s.end());
        CHECK(uniq.size() == 6);
        for (std::size_t i = 0; i < s.size(); ++i) {
            CHECK(s[i] >= 0);
            CHECK(s[i] < 20);
            if (i > 0) CHECK(s[i] > s[i - 1]);
        }
    }
    CHECK(e.subset(4, 4) == std::vector<int>{0, 1, 2, 3});
    CHECK(e.subset(4, 0).empty());
    CHECK_THROWS_AS((void)e.subset(3, 4), std::invalid_argument);
}

TEST_CASE("derive_seed separates streams and is stable") {
    const auto s0 = sfl::rng::derive_seed(1000, 0);
    const auto s1 = sfl::rng::derive_seed(1000, 1);
    const auto t0 = sfl::rng::derive_seed(1001, 0);
    CHECK(s0 != s1);
    CHECK(s0 != t0);
    CHECK(s0 == sfl::rng::derive_seed(1000, 0));
}

TEST_CASE("fit_line recovers an exact affine relation") {
    std::vector<double> xs{0, 1, 2, 3, 4};
    std::vector<double> ys;
    for (double x : xs) ys.push_back(-1.5 * x + 0.75);
    auto [slope, intercept] = sfl::fit_line(xs, ys);
    CHECK(slope == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(intercept == doctest::Approx(0.75).epsilon(1e-12));
    CHECK_THROWS_AS((void)sfl::fit_line({1.0}, {2.0}), std::invalid_argument);
    CHECK_THROWS_AS((void)sfl::fit_line({1.0, 1.0}, {2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("parallel_trials covers every index exactly once for any worker count") {
    for (int workers : {1, 2, 4, 9}) {
        std::vector<std::atomic<int>> hits(37);
        sfl::parallel_trials(37, workers, [&](int t) { hits[static_cast<std::size_t>(t)]++; });
        for (auto& h : hits) CHECK(h.load() == 1);
    }
    sfl::parallel_trials(0, 4, [&](int) { CHECK(false); });
}

TEST_CASE("trial-indexed outputs do not depend on the worker count") {
    auto run = [](int workers) {
        std::vector<double> out(64);
        sfl::parallel_trials(64, workers, [&](int t) {
            sfl::rng::Engine e(sfl::rng::derive_seed(321, static_cast<std::uint64_t>(t)));
            double acc = 0.0;
            for (int i = 0; i < 50; ++i) acc += e.normal();
            out[static_cast<std::size_t>(t)] = acc;
        });
        return out;
    };
    const auto serial = run(1);
    CHECK(run(3) == serial);
    CHECK(run(8) == serial);
}

TEST_CASE("binomial small table") {
    CHECK(sfl::binomial(0, 0) == 1);
    CHECK(sfl::binomial(5, 2) == 10);
    CHECK(sfl::binomial(10, 5) == 252);
    CHECK(sfl::binomial(33, 2) == 528);
    CHECK(sfl::binomial(4, 7) == 0);
    CHECK(sfl::binomial(6, -1) == 0);
}
