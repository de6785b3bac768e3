#include <doctest.h>

#include <cmath>

#include "subdiff/errors.hpp"
#include "subdiff/schedule.hpp"

using namespace subdiff;

TEST_CASE("parse and label round trip") {
    for (const char* text : {"exact", "fixed:2", "log:3,6", "log:1,0", "theory-smooth:0.1", "theory-nonsmooth:0.05"}) {
        CAPTURE(text);
        CHECK(parse_schedule(text).label() == text);
    }
    CHECK(parse_schedule("exact").is_exact());
    CHECK(parse_schedule("theory-nonsmooth:0.1").needs_contraction());
    CHECK(!parse_schedule("fixed:3").needs_contraction());

    for (const char* bad : {"", "fixed", "fixed:0", "fixed:-2", "fixed:x", "log:3", "log:-1,2", "log:3,-1",
                            "theory-smooth:0", "theory-nonsmooth:-1", "newton", "fixed:2junk"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(parse_schedule(bad), ConfigError);
    }
}

TEST_CASE("fixed and logarithmic counts") {
    const IterationSchedule fixed{IterationSchedule::Fixed{4}};
    CHECK(schedule_iters(fixed, 3, 0.3, 0.1, 0.5).iterations == 4);

    const IterationSchedule lg{IterationSchedule::LogSchedule{3, 6}};
    CHECK(schedule_iters(lg, 5, 0.25, 0.05, 0.5).iterations == 3 + 12);
    CHECK(schedule_iters(lg, 20, 1.0, 0.05, 0.5).iterations == 3);
    CHECK(schedule_iters(lg, 40, 2.0, 0.05, 0.5).iterations == 3);
    // ceil(6 log2(1/0.3)) = ceil(10.42) = 11
    CHECK(schedule_iters(lg, 3, 0.3, 0.1, 0.5).iterations == 14);

    const IterationSchedule zero_a{IterationSchedule::LogSchedule{0, 0}};
    CHECK(schedule_iters(zero_a, 3, 0.5, 0.1, 0.5).iterations == 1);

    const IterationSchedule big{IterationSchedule::LogSchedule{3, 100}};
    const auto c = schedule_iters(big, 3, 1e-3, 1e-3 / 3.0, 0.5);
    CHECK(c.iterations == kMaxInnerIterations);
    CHECK(c.clamped);
}

TEST_CASE("theory schedules pick the smallest sufficient count") {
    const ContractionParams p{2.0, 0.5};
    const double tau = 1.0 / 320.0, alpha = 0.5, delta = 0.1;
    const IterationSchedule smooth{IterationSchedule::TheorySmoothData{delta, p}};
    const IterationSchedule nonsmooth{IterationSchedule::TheoryNonsmoothData{delta, p}};
    int prev = kMaxInnerIterations + 1;
    for (std::size_t n = 3; n <= 320; ++n) {
        const double t = static_cast<double>(n) * tau;
        const double l = log_factor(t, tau);
        CHECK(l == doctest::Approx(std::log(1.0 + static_cast<double>(n))));
        for (const auto* s : {&smooth, &nonsmooth}) {
            const double target = delta * (s == &smooth ? std::min(std::pow(t, alpha / 2), 1.0) : std::min(t, 1.0)) / l;
            const int m = schedule_iters(*s, n, t, tau, alpha).iterations;
            CHECK(p.c0 * std::pow(p.kappa, m) <= target);
            if (m > 1) CHECK(p.c0 * std::pow(p.kappa, m - 1) > target);
        }
        const int m = schedule_iters(nonsmooth, n, t, tau, alpha).iterations;
        CHECK(m <= prev);
        prev = m;
    }
}

TEST_CASE("schedule_iters rejects invalid requests") {
    const IterationSchedule exact{};
    CHECK_THROWS_AS(schedule_iters(exact, 5, 0.5, 0.1, 0.5), ConfigError);
    const IterationSchedule fixed{IterationSchedule::Fixed{2}};
    CHECK_THROWS_AS(schedule_iters(fixed, 2, 0.2, 0.1, 0.5), ConfigError);
    const IterationSchedule unmeasured = parse_schedule("theory-smooth:0.1");
    CHECK_THROWS_AS(schedule_iters(unmeasured, 5, 0.5, 0.1, 0.5), ConfigError);
    const IterationSchedule diverging{IterationSchedule::TheorySmoothData{0.1, {1.0, 1.0}}};
    CHECK_THROWS_AS(schedule_iters(diverging, 5, 0.5, 0.1, 0.5), ConfigError);
}
