#include "iwave/model.hpp"

#include <cmath>
#include <stdexcept>

namespace iwave {

namespace {
double coth(double x) { return 1.0 / std::tanh(x); }
}  // namespace

double dispersion(const PhysParams& params, int n) {
    params.require_valid();
    if (n < 1) throw std::invalid_argument("dispersion: n must be >= 1");
    const double nk = n * params.k;
    return 1.0 / (nk * (coth(nk * (1.0 - params.H)) + coth(nk * params.H))) -
           0.5 * params.omega0 * params.H;
}

EigenComponents eigen_components(const PhysParams& params, int n) {
    params.require_valid();
    if (n < 1) throw std::invalid_argument("eigen_components: n must be >= 1");
    const double k = params.k, H = params.H;
    const double a = n * H * k, b = n * (1.0 - H) * k;
    const double cs = coth(a) + coth(b);
    EigenComponents e;
    e.n = n;
    e.c1 = -1.0 / cs;
    e.c2 = std::sinh(a) / std::sinh(b);
    e.c3 = k * std::sinh(a) * cs / std::sinh(static_cast<double>(n));
    e.c4 = -std::sinh(a) / (std::sinh(b) * cs);
    e.q_n = dispersion(params, n);
    return e;
}

SolutionVector shear_solution(const PhysParams& params, double c, int N) {
    params.require_valid();
    SolutionVector s = SolutionVector::zeros(N);
    s.u_hat(0) = c;
    s.Y_hat(0) = params.H;
    s.L = M_PI / params.k;
    return s;
}

double bifurcation_speed(const PhysParams& params) {
    return dispersion(params, 1) + 0.5 * params.omega0 * params.H;
}

SolutionVector crude_guess(const PhysParams& params, double A, int N) {
    SolutionVector s = shear_solution(params, bifurcation_speed(params), N);
    s.Y_hat(1) = 0.5 * A;
    return s;
}

SolutionVector linear_guess(const PhysParams& params, double A, int N) {
    if (N < 8) throw std::invalid_argument("linear_guess: N must be >= 8");
    const double c = bifurcation_speed(params);
    SolutionVector s = shear_solution(params, c, N);
    if (A == 0.0) return s;

    // First-order eigenvector in the constant-speed parametrization: the
    // interface is Y = H + (A/2) cos t, the sine mode of X vanishes (any
    // nonzero X_1 breaks |Z'| = const at first order), and the lower-layer
    // perturbation a0*cos(kz) is fixed by the kinematic condition,
    // a0 = -A k c / (2 sinh kH). Matching the upper layer reproduces the
    // dispersion relation c k (coth kH + coth k(1-H)) = 1, so both layers are
    // consistent automatically.
    const double b = 0.5 * A;
    s.Y_hat(1) = b;
    s.u_hat(1) = -b * params.k * c * coth(params.k * params.H);
    s.v_hat(0) = b * params.k * c;
    return s;
}

double conjugate_height(double h, double omega0) {
    return -h + (2.0 / 3.0) * (2.0 - omega0);
}

double conjugate_speed(double h, double omega0) {
    const double th = 3.0 * h + omega0 - 2.0;
    return th * th / 9.0 + h * (1.0 - h);
}

double min_bore_amplitude(const PhysParams& params) {
    return 2.0 * std::abs(params.H - (2.0 - params.omega0) / 3.0);
}

double shear_stream(const ShearFlow& sf, double omega0, double y) {
    const double w = (y <= sf.h) ? omega0 : omega0 - 1.0;
    const double d = y - sf.h;
    return 0.5 * w * d * d + sf.c * d;
}

double shear_stream_deriv(const ShearFlow& sf, double omega0, double y) {
    const double w = (y <= sf.h) ? omega0 : omega0 - 1.0;
    return w * (y - sf.h) + sf.c;
}

}  // namespace iwave
