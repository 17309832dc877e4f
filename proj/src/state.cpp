#include "iwave/state.hpp"

#include <cmath>
#include <stdexcept>

namespace iwave {

SolutionVector SolutionVector::zeros(int N) {
    if (N < 2) throw std::invalid_argument("SolutionVector: N must be >= 2");
    SolutionVector s;
    s.N = N;
    s.u_hat = Eigen::VectorXd::Zero(N);
    s.v_hat = Eigen::VectorXd::Zero(N - 1);
    s.X_hat = Eigen::VectorXd::Zero(N - 1);
    s.Y_hat = Eigen::VectorXd::Zero(N);
    s.L = 0.0;
    return s;
}

Eigen::VectorXd SolutionVector::flatten() const {
    Eigen::VectorXd phi(dim());
    phi.segment(0, N) = u_hat;
    phi.segment(N, N - 1) = v_hat;
    phi.segment(2 * N - 1, N - 1) = X_hat;
    phi.segment(3 * N - 2, N) = Y_hat;
    phi(4 * N - 2) = L;
    return phi;
}

SolutionVector SolutionVector::unflatten(const Eigen::VectorXd& phi, int N) {
    if (phi.size() != 4 * N - 1) throw std::invalid_argument("unflatten: size mismatch");
    SolutionVector s = zeros(N);
    s.u_hat = phi.segment(0, N);
    s.v_hat = phi.segment(N, N - 1);
    s.X_hat = phi.segment(2 * N - 1, N - 1);
    s.Y_hat = phi.segment(3 * N - 2, N);
    s.L = phi(4 * N - 2);
    return s;
}

CollocationGrid::CollocationGrid(int N_) : N(N_) {
    if (N < 2) throw std::invalid_argument("CollocationGrid: N must be >= 2");
    mesh.resize(N + 1);
    mid.resize(N);
    const double h = M_PI / N;
    for (int I = 0; I <= N; ++I) mesh(I) = I * h;
    for (int J = 0; J < N; ++J) mid(J) = (2 * J + 1) * M_PI / (2 * N);

    cos_mesh.resize(N + 1, N + 1);
    sin_mesh.resize(N + 1, N + 1);
    cos_mid.resize(N, N + 1);
    sin_mid.resize(N, N + 1);
    for (int n = 0; n <= N; ++n) {
        for (int I = 0; I <= N; ++I) {
            cos_mesh(I, n) = std::cos(n * mesh(I));
            sin_mesh(I, n) = std::sin(n * mesh(I));
        }
        for (int J = 0; J < N; ++J) {
            cos_mid(J, n) = std::cos(n * mid(J));
            sin_mid(J, n) = std::sin(n * mid(J));
        }
    }
}

TraceSample evaluate(const SolutionVector& sol, double k, double t) {
    TraceSample s;
    s.t = t;
    double X = t / k, Y = 0, Xp = 1.0 / k, Yp = 0, u = 0, v = 0;
    for (int n = 0; n < sol.N; ++n) {
        const double cn = std::cos(n * t), sn = std::sin(n * t);
        u += sol.u_hat(n) * cn;
        Y += sol.Y_hat(n) * cn;
        Yp -= n * sol.Y_hat(n) * sn;
        if (n >= 1) {
            v += sol.v_hat(n - 1) * sn;
            X += sol.X_hat(n - 1) * sn;
            Xp += n * sol.X_hat(n - 1) * cn;
        }
    }
    s.X = X;
    s.Y = Y;
    s.Xp = Xp;
    s.Yp = Yp;
    s.u = u;
    s.v = v;
    s.F = {u, v};
    s.Z = {X, Y};
    return s;
}

double amplitude(const SolutionVector& sol) {
    double a = 0;
    for (int n = 1; n < sol.N; n += 2) a += 2.0 * sol.Y_hat(n);
    return a;
}

std::pair<SolutionVector, PhysParams> reflect(const SolutionVector& sol, const PhysParams& params) {
    // Psi'(x,y) = -Psi(x,1-y). Traces: the new lower layer is the old upper
    // one, so u' = u + (Y - H) via the interface continuity f1 = f0 + (Y - H),
    // v' = -v, Y' = 1 - Y, X and L unchanged.
    SolutionVector r = sol;
    r.v_hat = -sol.v_hat;
    r.Y_hat(0) = 1.0 - sol.Y_hat(0);
    r.u_hat(0) = sol.u_hat(0) + sol.Y_hat(0) - params.H;
    for (int n = 1; n < sol.N; ++n) {
        r.Y_hat(n) = -sol.Y_hat(n);
        r.u_hat(n) = sol.u_hat(n) + sol.Y_hat(n);
    }
    PhysParams p = params;
    p.H = 1.0 - params.H;
    p.omega0 = 1.0 - params.omega0;
    return {r, p};
}

SolutionVector resample(const SolutionVector& sol, int N_new) {
    if (N_new < 4) throw std::invalid_argument("resample: N_new must be >= 4");
    if (N_new == sol.N) return sol;
    SolutionVector r = SolutionVector::zeros(N_new);
    const int nc = std::min(sol.N, N_new);
    r.u_hat.head(nc) = sol.u_hat.head(nc);
    r.Y_hat.head(nc) = sol.Y_hat.head(nc);
    r.v_hat.head(nc - 1) = sol.v_hat.head(nc - 1);
    r.X_hat.head(nc - 1) = sol.X_hat.head(nc - 1);
    r.L = sol.L;
    return r;
}

namespace {
double tail_ratio(const Eigen::VectorXd& c) {
    const int n = static_cast<int>(c.size());
    const int tail = n - (3 * n) / 4;
    double all = std::max(c.cwiseAbs().maxCoeff(), 1e-300);
    double top = c.tail(tail).cwiseAbs().maxCoeff();
    return top / all;
}
}  // namespace

double decay_metric(const SolutionVector& sol) {
    if (sol.N < 8) throw std::invalid_argument("decay_metric: N must be >= 8");
    double m = tail_ratio(sol.u_hat);
    m = std::max(m, tail_ratio(sol.v_hat));
    m = std::max(m, tail_ratio(sol.X_hat));
    m = std::max(m, tail_ratio(sol.Y_hat));
    return m;
}

}  // namespace iwave
