#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "iwave/continuation.hpp"

using namespace iwave;

namespace {

PhysParams make(double k, double H, double w0) {
    PhysParams p;
    p.k = k;
    p.H = H;
    p.omega0 = w0;
    return p;
}

ContinuationPolicy quick_policy() {
    ContinuationPolicy pol;
    pol.N0 = 32;
    pol.initial_step = 0.01;
    pol.max_points = 30;
    pol.stagnation_evidence = false;  // keep the unit tests fast
    return pol;
}

}  // namespace

TEST_CASE("start_branch produces one converged point at the target amplitude") {
    const PhysParams p = make(2, 0.5, 0.3);
    const Branch b = start_branch(p, 0.01, 32);
    REQUIRE(b.points.size() == 1);
    CHECK(b.points[0].residual < 1e-10);
    CHECK(b.points[0].amplitude == doctest::Approx(0.01).epsilon(1e-10));
    CHECK(b.points[0].diag.min_speed > 0.05);
}

TEST_CASE("start_branch rejects out-of-range starting amplitudes") {
    CHECK_THROWS_AS(start_branch(make(2, 0.5, 0.3), 0.2, 32), std::invalid_argument);
    CHECK_THROWS_AS(start_branch(make(2, 0.5, 0.3), 0.0, 32), std::invalid_argument);
}

TEST_CASE("extend_branch steps the amplitude to the requested target") {
    const PhysParams p = make(2, 0.5, 0.3);
    Branch b = start_branch(p, 0.01, 32);
    ContinuationPolicy pol = quick_policy();
    pol.target_amplitude = 0.05;
    extend_branch(b, pol);
    CHECK(b.stop_reason == "target amplitude reached");
    CHECK(b.points.back().amplitude == doctest::Approx(0.05).epsilon(1e-10));
    // amplitudes increase monotonically and every point converged
    for (size_t i = 0; i < b.points.size(); ++i) {
        CHECK(b.points[i].residual < 1e-10);
        if (i) CHECK(b.points[i].amplitude > b.points[i - 1].amplitude);
    }
}

TEST_CASE("classification needs at least three points") {
    const PhysParams p = make(2, 0.5, 0.3);
    const Branch b = start_branch(p, 0.01, 32);
    CHECK_THROWS_AS(classify_termination(b, quick_policy()), InsufficientEvidence);
}

TEST_CASE("a healthy mid-branch segment classifies Undetermined") {
    const PhysParams p = make(2, 0.5, 0.3);
    Branch b = start_branch(p, 0.01, 32);
    ContinuationPolicy pol = quick_policy();
    pol.target_amplitude = 0.06;
    extend_branch(b, pol);
    REQUIRE(b.points.size() >= 3);
    const TerminationReport rep = classify_termination(b, pol);
    CHECK(rep.verdict == Verdict::Undetermined);
    CHECK(rep.min_speed.size() == rep.wall_clearance.size());
    CHECK(rep.min_speed.size() >= 3);
}

TEST_CASE("evidence series are populated from the stored diagnostics") {
    const PhysParams p = make(2, 0.5, 0.3);
    Branch b = start_branch(p, 0.01, 32);
    ContinuationPolicy pol = quick_policy();
    pol.target_amplitude = 0.04;
    extend_branch(b, pol);
    const TerminationReport rep = classify_termination(b, pol);
    CHECK(rep.amplitude.back() == doctest::Approx(b.points.back().amplitude));
    CHECK(rep.min_speed.back() == doctest::Approx(b.points.back().diag.min_speed));
}

TEST_CASE("sweep returns one classified cell per grid tuple") {
    ContinuationPolicy pol = quick_policy();
    pol.target_amplitude = 0.03;
    pol.A0 = 0.01;
    const auto cells = sweep(2.0, {0.45, 0.5}, {0.3}, pol);
    REQUIRE(cells.size() == 2);
    for (const auto& c : cells) {
        CHECK(c.max_amplitude == doctest::Approx(0.03).epsilon(1e-8));
        CHECK(c.verdict == Verdict::Undetermined);  // stopped early on purpose
    }
}
