#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "iwave/state.hpp"

using namespace iwave;

namespace {

SolutionVector random_solution(int N, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g(0.0, 0.1);
    SolutionVector s = SolutionVector::zeros(N);
    for (int n = 0; n < N; ++n) {
        s.u_hat(n) = g(rng);
        s.Y_hat(n) = g(rng);
    }
    for (int n = 0; n < N - 1; ++n) {
        s.v_hat(n) = g(rng);
        s.X_hat(n) = g(rng);
    }
    s.Y_hat(0) = 0.5;
    s.L = M_PI + g(rng);
    return s;
}

}  // namespace

TEST_CASE("flatten/unflatten round trip") {
    const SolutionVector s = random_solution(12, 7);
    const Eigen::VectorXd phi = s.flatten();
    CHECK(phi.size() == s.dim());
    const SolutionVector r = SolutionVector::unflatten(phi, 12);
    CHECK((r.flatten() - phi).norm() == 0.0);
    CHECK(r.L == s.L);
    CHECK(r.u_hat == s.u_hat);
    CHECK(r.Y_hat == s.Y_hat);
}

TEST_CASE("evaluate matches a direct trigonometric sum") {
    const SolutionVector s = random_solution(9, 3);
    const double k = 1.7, t = 0.83;
    const TraceSample a = evaluate(s, k, t);

    double X = t / k, Y = 0, Xp = 1.0 / k, Yp = 0, u = 0, v = 0;
    for (int n = 0; n < s.N; ++n) {
        u += s.u_hat(n) * std::cos(n * t);
        Y += s.Y_hat(n) * std::cos(n * t);
        Yp -= n * s.Y_hat(n) * std::sin(n * t);
        if (n >= 1) {
            v += s.v_hat(n - 1) * std::sin(n * t);
            X += s.X_hat(n - 1) * std::sin(n * t);
            Xp += n * s.X_hat(n - 1) * std::cos(n * t);
        }
    }
    CHECK(a.X == doctest::Approx(X).epsilon(1e-14));
    CHECK(a.Y == doctest::Approx(Y).epsilon(1e-14));
    CHECK(a.Xp == doctest::Approx(Xp).epsilon(1e-14));
    CHECK(a.Yp == doctest::Approx(Yp).epsilon(1e-14));
    CHECK(a.u == doctest::Approx(u).epsilon(1e-14));
    CHECK(a.v == doctest::Approx(v).epsilon(1e-14));
}

TEST_CASE("periodicity: X gains one wavelength per period, Y repeats") {
    const SolutionVector s = random_solution(8, 11);
    const double k = 2.3, t = 1.1;
    const TraceSample a = evaluate(s, k, t);
    const TraceSample b = evaluate(s, k, t + 2 * M_PI);
    CHECK(b.X - a.X == doctest::Approx(2 * M_PI / k).epsilon(1e-13));
    CHECK(b.Y == doctest::Approx(a.Y).epsilon(1e-13));
}

TEST_CASE("evenness: Y and u even, X-t/k and v odd") {
    const SolutionVector s = random_solution(8, 5);
    const double k = 1.0, t = 0.6;
    const TraceSample a = evaluate(s, k, t);
    const TraceSample b = evaluate(s, k, -t);
    CHECK(a.Y == doctest::Approx(b.Y).epsilon(1e-14));
    CHECK(a.u == doctest::Approx(b.u).epsilon(1e-14));
    CHECK(a.X - t / k == doctest::Approx(-(b.X + t / k)).epsilon(1e-13));
    CHECK(a.v == doctest::Approx(-b.v).epsilon(1e-14));
}

TEST_CASE("amplitude equals crest minus trough height") {
    const SolutionVector s = random_solution(10, 19);
    const double A = amplitude(s);
    const double direct = evaluate(s, 1.0, 0.0).Y - evaluate(s, 1.0, M_PI).Y;
    CHECK(A == doctest::Approx(direct).epsilon(1e-13));
}

TEST_CASE("resample preserves the trace; truncation drops the tail") {
    const SolutionVector s = random_solution(10, 23);
    const SolutionVector up = resample(s, 24);
    CHECK(up.N == 24);
    for (double t : {0.0, 0.4, 2.2}) {
        CHECK(evaluate(up, 1.3, t).Y == doctest::Approx(evaluate(s, 1.3, t).Y).epsilon(1e-14));
        CHECK(evaluate(up, 1.3, t).u == doctest::Approx(evaluate(s, 1.3, t).u).epsilon(1e-14));
    }
    const SolutionVector down = resample(up, 10);
    CHECK((down.flatten() - s.flatten()).norm() == 0.0);
}

TEST_CASE("reflect is an involution and maps traces as y -> 1-y") {
    const SolutionVector s = random_solution(10, 31);
    PhysParams p;
    p.k = 1.5;
    p.H = 0.4;
    p.omega0 = 0.2;
    const auto [r, q] = reflect(s, p);
    CHECK(q.H == doctest::Approx(1.0 - p.H));
    CHECK(q.omega0 == doctest::Approx(1.0 - p.omega0));
    CHECK(amplitude(r) == doctest::Approx(-amplitude(s)).epsilon(1e-13));

    for (double t : {0.3, 1.9}) {
        const TraceSample a = evaluate(s, p.k, t);
        const TraceSample b = evaluate(r, p.k, t);
        CHECK(b.Y == doctest::Approx(1.0 - a.Y).epsilon(1e-13));
        CHECK(b.X == doctest::Approx(a.X).epsilon(1e-13));
        // physical velocity is preserved up to the sign of V:
        // U' = u' + w0'(Y'-H') must equal U = u + w0(Y-H)
        const double U = a.u + p.omega0 * (a.Y - p.H);
        const double Ur = b.u + q.omega0 * (b.Y - q.H);
        CHECK(Ur == doctest::Approx(U).epsilon(1e-12));
        CHECK(b.v == doctest::Approx(-a.v).epsilon(1e-13));
    }

    const auto [rr, qq] = reflect(r, q);
    CHECK((rr.flatten() - s.flatten()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(qq.H == doctest::Approx(p.H));
}

TEST_CASE("decay metric: padded solutions decay, full-tail ones do not") {
    SolutionVector s = random_solution(8, 41);
    const SolutionVector padded = resample(s, 32);
    CHECK(decay_metric(padded) < 1e-14);
    CHECK(decay_metric(s) > 1e-3);
}
