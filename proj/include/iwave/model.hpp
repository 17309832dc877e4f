#pragma once

#include "iwave/params.hpp"
#include "iwave/state.hpp"

namespace iwave {

// A flat-interface shear state: interface height h and interface-trace speed c.
struct ShearFlow {
    double h;
    double c;
};

// Kernel data of the linearised operator at the shear state for mode n.
struct EigenComponents {
    int n;
    double c1, c2, c3, c4;
    double q_n;
};

// Dispersion relation d(nk) = 1/(nk(coth(nk(1-H)) + coth(nkH))) - omega0*H/2.
// The linearisation has a kernel exactly at q = d(nk).
double dispersion(const PhysParams& params, int n);

EigenComponents eigen_components(const PhysParams& params, int n);

// Flat interface Y = H, u = c, v = 0, L = pi/k.
SolutionVector shear_solution(const PhysParams& params, double c, int N);

// Shear at the mode-1 bifurcation speed plus a first-harmonic perturbation
// from the interface traces of the kernel eigenvector, scaled so that the
// amplitude equals A.
SolutionVector linear_guess(const PhysParams& params, double A, int N);

// Fallback guess: only Y_1 = A/2 perturbed.
SolutionVector crude_guess(const PhysParams& params, double A, int N);

// Interface-trace speed of the mode-1 bifurcating shear, d(k) + omega0*H/2.
double bifurcation_speed(const PhysParams& params);

// Conjugate-flow algebra for periodic bores.
double conjugate_height(double h, double omega0);
double conjugate_speed(double h, double omega0);

// Periodic bores must exceed this amplitude: 2|H - (2-omega0)/3|.
double min_bore_amplitude(const PhysParams& params);

// Shear stream function Psi*_{h,c}(y), zero on the interface y = h. Piecewise
// quadratic, (omega_j/2)(y-h)^2 + c(y-h) per layer.
double shear_stream(const ShearFlow& sf, double omega0, double y);
double shear_stream_deriv(const ShearFlow& sf, double omega0, double y);

}  // namespace iwave
