#include "iwave/residual.hpp"

#include <algorithm>
#include <cmath>

namespace iwave {

using cd = std::complex<double>;

const char* to_string(AdmissReason r) {
    switch (r) {
        case AdmissReason::None: return "none";
        case AdmissReason::Wall: return "wall contact";
        case AdmissReason::Degenerate: return "degenerate parametrization";
        case AdmissReason::SelfIntersect: return "self-intersection";
        case AdmissReason::Stagnation: return "interface stagnation";
    }
    return "?";
}

ClosureSpec ClosureSpec::amplitude_target(double A) {
    ClosureSpec c;
    c.kind = ClosureKind::Amplitude;
    c.A = A;
    return c;
}

ClosureSpec ClosureSpec::distance_from(Eigen::VectorXd anchor, double d) {
    if (d <= 0) throw std::invalid_argument("ClosureSpec: distance target must be > 0");
    ClosureSpec c;
    c.kind = ClosureKind::Distance;
    c.anchor = std::move(anchor);
    c.d = d;
    return c;
}

namespace {

constexpr double kPoleTol = 1e-13;

// g assembled from precomputed exponentials: en = e^{-ikz}, ep = e^{ikz},
// wp = e^{ikw}, wn = e^{-ikw}.
inline cd g_from_exps(cd en, cd ep, cd wp, cd wn) {
    const double guard = kPoleTol * (1.0 + std::norm(ep));
    const cd a1 = en - wp, a2 = en - wn, b1 = ep - wp, b2 = ep - wn;
    if (std::abs(a1) < guard || std::abs(a2) < guard || std::abs(b1) < guard ||
        std::abs(b2) < guard)
        throw PoleProximity("kernel_g: collocation point too close to a kernel pole");
    return 1.0 / (a1 * a2) - 1.0 / (b1 * b2);
}

}  // namespace

cd kernel_g(cd z, cd w, double k) {
    const cd I(0.0, 1.0);
    return g_from_exps(std::exp(-I * k * z), std::exp(I * k * z), std::exp(I * k * w),
                       std::exp(-I * k * w));
}

std::vector<TraceSample> trace_samples(const SolutionVector& sol, double k,
                                       const std::vector<double>& ts) {
    std::vector<TraceSample> out(ts.size());
    const int N = sol.N;
    for (size_t i = 0; i < ts.size(); ++i) {
        const double t = ts[i];
        const double c1 = std::cos(t), s1 = std::sin(t);
        double cp = 1.0, sp = 0.0;  // cos(n t), sin(n t), starting at n = 0
        double X = t / k, Y = 0, Xp = 1.0 / k, Yp = 0, u = 0, v = 0;
        for (int n = 0; n < N; ++n) {
            u += sol.u_hat(n) * cp;
            Y += sol.Y_hat(n) * cp;
            Yp -= n * sol.Y_hat(n) * sp;
            if (n >= 1) {
                v += sol.v_hat(n - 1) * sp;
                X += sol.X_hat(n - 1) * sp;
                Xp += n * sol.X_hat(n - 1) * cp;
            }
            const double cn = cp * c1 - sp * s1;
            sp = sp * c1 + cp * s1;
            cp = cn;
        }
        out[i] = TraceSample{t, X, Y, Xp, Yp, u, v, cd(u, v), cd(X, Y)};
    }
    return out;
}

TraceTable build_trace_table(const SolutionVector& sol, const PhysParams& params,
                             const CollocationGrid& grid) {
    if (grid.N != sol.N) throw std::invalid_argument("build_trace_table: grid/solution N mismatch");
    const int N = sol.N;
    TraceTable tab;
    tab.N = N;

    const auto Cm = grid.cos_mesh.leftCols(N);
    const auto Sm = grid.sin_mesh.leftCols(N);
    const auto Cs = grid.cos_mid.leftCols(N);
    const auto Ss = grid.sin_mid.leftCols(N);

    Eigen::VectorXd nY(N), nX(N - 1);
    for (int n = 0; n < N; ++n) nY(n) = n * sol.Y_hat(n);
    for (int n = 1; n < N; ++n) nX(n - 1) = n * sol.X_hat(n - 1);

    const double invk = 1.0 / params.k;
    tab.um = Cm * sol.u_hat;
    tab.Ym = Cm * sol.Y_hat;
    tab.Ypm = -(Sm * nY);
    tab.vm = Sm.rightCols(N - 1) * sol.v_hat;
    tab.Xm = grid.mesh * invk + Sm.rightCols(N - 1) * sol.X_hat;
    tab.Xpm = Eigen::VectorXd::Constant(N + 1, invk) + Cm.rightCols(N - 1) * nX;

    tab.us = Cs * sol.u_hat;
    tab.Ys = Cs * sol.Y_hat;
    tab.Yps = -(Ss * nY);
    tab.vs = Ss.rightCols(N - 1) * sol.v_hat;
    tab.Xs = grid.mid * invk + Ss.rightCols(N - 1) * sol.X_hat;
    tab.Xps = Eigen::VectorXd::Constant(N, invk) + Cs.rightCols(N - 1) * nX;

    const cd I(0.0, 1.0);
    tab.Ep_m.resize(N + 1);
    tab.En_m.resize(N + 1);
    for (int i = 0; i <= N; ++i) {
        const cd e = std::exp(I * params.k * cd(tab.Xm(i), tab.Ym(i)));
        tab.Ep_m(i) = e;
        tab.En_m(i) = 1.0 / e;
    }
    tab.Ep_s.resize(N);
    tab.En_s.resize(N);
    for (int j = 0; j < N; ++j) {
        const cd e = std::exp(I * params.k * cd(tab.Xs(j), tab.Ys(j)));
        tab.Ep_s(j) = e;
        tab.En_s(j) = 1.0 / e;
    }
    return tab;
}

double lower_identity_residual(const TraceTable& tab, const PhysParams& params,
                               const CollocationGrid& grid, int J) {
    const int N = tab.N;
    if (J < 1 || J > N) throw std::invalid_argument("lower_identity_residual: J out of range");
    const int j = J - 1;
    const cd wp = tab.Ep_s(j), wn = tab.En_s(j);
    const double h = M_PI / N;
    cd Q(0.0, 0.0);
    for (int i = 0; i <= N; ++i) {
        const double w = (i == 0 || i == N) ? 0.5 * h : h;
        const cd F(tab.um(i), tab.vm(i));
        const cd Zp(tab.Xpm(i), tab.Ypm(i));
        const cd g1 = g_from_exps(tab.En_m(i), tab.Ep_m(i), wp, wn);
        // z -> -conj(Z): e^{-ikz} = conj(e^{-ikZ})... careful, conj swaps roles:
        // e^{-ik(-conj Z)} = e^{ik conj Z} = conj(e^{-ikZ}); e^{ik(-conj Z)} = conj(e^{ikZ}).
        const cd g2 = g_from_exps(std::conj(tab.En_m(i)), std::conj(tab.Ep_m(i)), wp, wn);
        Q += w * (F * g1 * Zp + std::conj(F) * g2 * std::conj(Zp));
    }
    const cd Fs(tab.us(j), tab.vs(j));
    return (Fs + (params.k / M_PI) * Q).real();
}

double upper_identity_residual(const TraceTable& tab, const PhysParams& params,
                               const CollocationGrid& grid, int J) {
    const int N = tab.N;
    if (J < 1 || J > N) throw std::invalid_argument("upper_identity_residual: J out of range");
    const int j = J - 1;
    const double ek = std::exp(params.k), emk = std::exp(-params.k);
    // w = Z(tau) - i: e^{ikw} = e^k e^{ikZ}, e^{-ikw} = e^{-k} e^{-ikZ}.
    const cd wp = ek * tab.Ep_s(j), wn = emk * tab.En_s(j);
    const double h = M_PI / N;
    const double H = params.H;
    cd Q(0.0, 0.0);
    for (int i = 0; i <= N; ++i) {
        const double w = (i == 0 || i == N) ? 0.5 * h : h;
        const cd F(tab.um(i), tab.vm(i));
        const cd Zp(tab.Xpm(i), tab.Ypm(i));
        const double dY = tab.Ym(i) - H;
        // z = i - Z: e^{-ikz} = e^k e^{ikZ}, e^{ikz} = e^{-k} e^{-ikZ}.
        const cd g1 = g_from_exps(ek * tab.Ep_m(i), emk * tab.En_m(i), wp, wn);
        // z = i + conj(Z): e^{-ikz} = e^k conj(e^{ikZ}), e^{ikz} = e^{-k} conj(e^{-ikZ}).
        const cd g2 =
            g_from_exps(ek * std::conj(tab.Ep_m(i)), emk * std::conj(tab.En_m(i)), wp, wn);
        Q += w * ((F + dY) * g1 * Zp + (std::conj(F) + dY) * g2 * std::conj(Zp));
    }
    const cd Fs(tab.us(j), tab.vs(j));
    return (Fs + (tab.Ys(j) - H) + (params.k / M_PI) * Q).real();
}

double kinematic_residual(const TraceTable& tab, const PhysParams& params, int J,
                          KinematicGauge gauge) {
    const int j = J - 1;
    const double shift = (gauge == KinematicGauge::CenteredDepth) ? params.H : 0.0;
    return tab.Xps(j) * tab.vs(j) +
           tab.Yps(j) * (tab.us(j) + params.omega0 * (tab.Ys(j) - shift));
}

double speed_residual(const TraceTable& tab, const SolutionVector& sol, int J) {
    const int j = J - 1;
    const double lp = sol.L / M_PI;
    return tab.Xps(j) * tab.Xps(j) + tab.Yps(j) * tab.Yps(j) - lp * lp;
}

double depth_residual(const TraceTable& tab, const PhysParams& params,
                      const CollocationGrid& grid) {
    const int N = tab.N;
    const double h = M_PI / N;
    double acc = 0.0;
    for (int i = 0; i <= N; ++i) {
        const double w = (i == 0 || i == N) ? 0.5 * h : h;
        acc += w * tab.Ym(i) * tab.Xpm(i);
    }
    return acc - M_PI * params.H / params.k;
}

double closure_residual(const SolutionVector& sol, const ClosureSpec& closure) {
    if (closure.kind == ClosureKind::Amplitude) return amplitude(sol) - closure.A;
    const Eigen::VectorXd diff = sol.flatten() - closure.anchor;
    return diff.squaredNorm() - closure.d * closure.d;
}

double lower_identity_residual(const SolutionVector& sol, const PhysParams& params,
                               const CollocationGrid& grid, int J) {
    return lower_identity_residual(build_trace_table(sol, params, grid), params, grid, J);
}
double upper_identity_residual(const SolutionVector& sol, const PhysParams& params,
                               const CollocationGrid& grid, int J) {
    return upper_identity_residual(build_trace_table(sol, params, grid), params, grid, J);
}
double kinematic_residual(const SolutionVector& sol, const PhysParams& params,
                          const CollocationGrid& grid, int J, KinematicGauge gauge) {
    return kinematic_residual(build_trace_table(sol, params, grid), params, J, gauge);
}
double speed_residual(const SolutionVector& sol, double k, int J) {
    CollocationGrid grid(sol.N);
    PhysParams p;
    p.k = k;  // the speed row is geometric, but the secular slope of X is t/k
    return speed_residual(build_trace_table(sol, p, grid), sol, J);
}

ResidualReport assemble_residual(const SolutionVector& sol, const PhysParams& params,
                                 const CollocationGrid& grid, const ClosureSpec& closure,
                                 const AssembleOptions& opts) {
    if (opts.guard_admissibility) {
        const Admissibility adm = admissibility(sol, params);
        if (!adm.ok)
            throw InadmissibleError(adm.reason, std::string("assemble_residual: ") +
                                                    to_string(adm.reason));
    }
    const int N = sol.N;
    const TraceTable tab = build_trace_table(sol, params, grid);

    ResidualReport rep;
    rep.vector.resize(4 * N - 1);
    int r = 0;
    for (int J = 2; J <= N; ++J)
        rep.vector(r++) = lower_identity_residual(tab, params, grid, J);
    for (int J = 2; J <= N; ++J)
        rep.vector(r++) = upper_identity_residual(tab, params, grid, J);
    for (int J = 2; J <= N; ++J)
        rep.vector(r++) = kinematic_residual(tab, params, J, opts.gauge);
    for (int J = 1; J <= N; ++J) rep.vector(r++) = speed_residual(tab, sol, J);
    rep.vector(r++) = depth_residual(tab, params, grid);
    rep.vector(r++) = closure_residual(sol, closure);

    rep.unused_point_residual = {lower_identity_residual(tab, params, grid, 1),
                                 upper_identity_residual(tab, params, grid, 1),
                                 kinematic_residual(tab, params, 1, opts.gauge)};
    rep.max_abs = rep.vector.cwiseAbs().maxCoeff();
    return rep;
}

namespace {
std::vector<double> uniform_samples(int M, double a, double b) {
    std::vector<double> ts(M);
    for (int i = 0; i < M; ++i) ts[i] = a + (b - a) * i / M;
    return ts;
}
std::vector<double> uniform_closed(int M, double a, double b) {
    std::vector<double> ts(M + 1);
    for (int i = 0; i <= M; ++i) ts[i] = a + (b - a) * i / M;
    return ts;
}
}  // namespace

Admissibility admissibility(const SolutionVector& sol, const PhysParams& params) {
    const int M = std::max(256, 8 * sol.N);
    const auto samples = trace_samples(sol, params.k, uniform_samples(M, 0.0, 2.0 * M_PI));

    Admissibility adm;
    for (const auto& s : samples) {
        if (s.Y <= 0.0 || s.Y >= 1.0)
            return {false, AdmissReason::Wall, std::min(s.Y, 1.0 - s.Y)};
        const double sp2 = s.Xp * s.Xp + s.Yp * s.Yp;
        if (sp2 <= 1e-14) return {false, AdmissReason::Degenerate, sp2};
        const double U = s.u + params.omega0 * (s.Y - params.H);
        const double stag = U * U + s.v * s.v;
        if (stag <= 1e-14) return {false, AdmissReason::Stagnation, stag};
    }

    // Divided-difference self-intersection test over one period, coarser grid.
    const int Ms = 256;
    const auto pts = trace_samples(sol, params.k, uniform_samples(Ms, 0.0, 2.0 * M_PI));
    const double dt = 2.0 * M_PI / Ms;
    for (int a = 0; a < Ms; ++a) {
        for (int b = a + 1; b < Ms; ++b) {
            const double dx = pts[a].X - pts[b].X, dy = pts[a].Y - pts[b].Y;
            const double dd = std::hypot(dx, dy) / ((b - a) * dt);
            if (dd <= 1e-9) return {false, AdmissReason::SelfIntersect, dd};
        }
    }
    return adm;
}

InterfaceDiagnostics interface_diagnostics(const SolutionVector& sol, const PhysParams& params) {
    const int M = std::max(512, 8 * sol.N);
    const auto samples = trace_samples(sol, params.k, uniform_closed(M, 0.0, M_PI));
    InterfaceDiagnostics d{1e300, 0.0, 1e300, 1e300};
    for (const auto& s : samples) {
        const double U = s.u + params.omega0 * (s.Y - params.H);
        const double sp = std::hypot(U, s.v);
        if (sp < d.min_speed) {
            d.min_speed = sp;
            d.t_min_speed = s.t;
        }
        d.clear_bottom = std::min(d.clear_bottom, s.Y);
        d.clear_top = std::min(d.clear_top, 1.0 - s.Y);
    }
    return d;
}

}  // namespace iwave
