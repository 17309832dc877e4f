#pragma once

#include <Eigen/Dense>
#include <vector>

#include "iwave/residual.hpp"

namespace iwave {

struct NewtonOptions {
    double tol_residual = 1e-10;
    double jacobian_reuse_threshold = 1e-4;  // freeze J below this residual norm
    int max_iterations = 40;
    double fd_step = 1e-7;  // relative forward-difference step
    double damping = 0.5;
    int max_backtracks = 8;
    KinematicGauge gauge = KinematicGauge::CenteredDepth;
};

enum class NewtonStatus { Converged, NonConvergence, SingularJacobian, Inadmissible };

struct NewtonResult {
    NewtonStatus status = NewtonStatus::NonConvergence;
    SolutionVector solution;
    int iterations = 0;
    double final_residual = 0.0;
    int jacobian_builds = 0;
    std::vector<double> history;  // residual inf-norm per iteration
    std::string message;

    bool ok() const { return status == NewtonStatus::Converged; }
};

// Forward-difference Jacobian of the assembled residual, column j perturbed by
// fd_step * max(1, |phi_j|). Inadmissible or pole-colliding perturbations are
// retried with a 10x smaller step.
Eigen::MatrixXd fd_jacobian(const SolutionVector& sol, const PhysParams& params,
                            const CollocationGrid& grid, const ClosureSpec& closure,
                            const NewtonOptions& opts);

NewtonResult newton_solve(const SolutionVector& initial, const PhysParams& params,
                          const ClosureSpec& closure, const NewtonOptions& opts = {});

}  // namespace iwave
