#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>

#include "iwave/params.hpp"

namespace iwave {

// Truncated Fourier representation of the unknown: interface curve (periodic
// part of X, all of Y), interface trace of the modified velocity (u, v), and
// the half-wavelength arclength L. Parity is structural: u and Y are cosine
// series, v and the periodic part of X are sine series. The secular slope t/k
// of X is not stored; evaluation sites supply k.
struct SolutionVector {
    int N = 0;
    Eigen::VectorXd u_hat;  // N entries, modes 0..N-1
    Eigen::VectorXd v_hat;  // N-1 entries, modes 1..N-1
    Eigen::VectorXd X_hat;  // N-1 entries, modes 1..N-1
    Eigen::VectorXd Y_hat;  // N entries, modes 0..N-1
    double L = 0.0;

    static SolutionVector zeros(int N);

    int dim() const { return 4 * N - 1; }

    // Flatten order: u_hat, v_hat, X_hat, Y_hat, L.
    Eigen::VectorXd flatten() const;
    static SolutionVector unflatten(const Eigen::VectorXd& phi, int N);
};

struct TraceSample {
    double t;
    double X, Y;    // curve position (X includes the secular slope t/k)
    double Xp, Yp;  // parameter derivatives
    double u, v;    // modified-velocity trace, F = u + i v
    std::complex<double> F;
    std::complex<double> Z;  // X + iY
};

// Mesh points t_I = (I-1)pi/N (I = 1..N+1) and interleaved midpoints
// tau_J = (2J-1)pi/(2N) (J = 1..N), with trig tables for modes 0..N.
struct CollocationGrid {
    int N;
    Eigen::VectorXd mesh;  // N+1
    Eigen::VectorXd mid;   // N
    Eigen::MatrixXd cos_mesh, sin_mesh;  // (N+1) x (N+1), column n = mode n
    Eigen::MatrixXd cos_mid, sin_mid;    // N x (N+1)

    explicit CollocationGrid(int N);
};

TraceSample evaluate(const SolutionVector& sol, double k, double t);

// Crest-to-trough height difference Y(0) - Y(pi) = 2 * sum of odd Y modes.
double amplitude(const SolutionVector& sol);

// The channel reflection y -> 1-y, Psi -> -Psi, which maps a solution at
// (k, H, omega0) to one at (k, 1-H, 1-omega0) with amplitude negated.
std::pair<SolutionVector, PhysParams> reflect(const SolutionVector& sol, const PhysParams& params);

// Zero-pad or truncate to resolution N_new; L unchanged.
SolutionVector resample(const SolutionVector& sol, int N_new);

// Ratio of the largest coefficient magnitude in the top quarter of indices to
// the largest overall, maximised over the four coefficient families. Small for
// well-resolved solutions, approaches O(1) near the resolution limit.
double decay_metric(const SolutionVector& sol);

}  // namespace iwave
