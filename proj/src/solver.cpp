#include "iwave/solver.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace iwave {

namespace {

// Runs fn(i) for i in [0, n). Spreads across hardware threads when available;
// iteration-to-result mapping is fixed, so output is deterministic either way.
template <typename Fn>
void parallel_for(int n, Fn&& fn) {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (hw == 1 || n < 4) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const unsigned workers = std::min<unsigned>(hw, n);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

Eigen::MatrixXd fd_jacobian(const SolutionVector& sol, const PhysParams& params,
                            const CollocationGrid& grid, const ClosureSpec& closure,
                            const NewtonOptions& opts) {
    const int n = sol.dim();
    const Eigen::VectorXd phi = sol.flatten();
    AssembleOptions aopts;
    aopts.gauge = opts.gauge;
    aopts.guard_admissibility = false;  // base point is checked by the caller
    const Eigen::VectorXd G0 = assemble_residual(sol, params, grid, closure, aopts).vector;

    Eigen::MatrixXd J(n, n);
    std::exception_ptr err;
    std::atomic<bool> failed{false};
    parallel_for(n, [&](int j) {
        if (failed.load()) return;
        double h = opts.fd_step * std::max(1.0, std::abs(phi(j)));
        for (int attempt = 0;; ++attempt) {
            try {
                Eigen::VectorXd p = phi;
                p(j) += h;
                const SolutionVector pert = SolutionVector::unflatten(p, sol.N);
                const Eigen::VectorXd G =
                    assemble_residual(pert, params, grid, closure, aopts).vector;
                J.col(j) = (G - G0) / h;
                return;
            } catch (const PoleProximity&) {
                if (attempt >= 1) {
                    failed = true;
                    err = std::current_exception();
                    return;
                }
                h *= 0.1;
            }
        }
    });
    if (failed) std::rethrow_exception(err);
    return J;
}

NewtonResult newton_solve(const SolutionVector& initial, const PhysParams& params,
                          const ClosureSpec& closure, const NewtonOptions& opts) {
    NewtonResult res;
    res.solution = initial;

    {
        const Admissibility adm = admissibility(initial, params);
        if (!adm.ok) {
            res.status = NewtonStatus::Inadmissible;
            res.message = std::string("initial iterate: ") + to_string(adm.reason);
            return res;
        }
    }

    CollocationGrid grid(initial.N);
    AssembleOptions aopts;
    aopts.gauge = opts.gauge;
    aopts.guard_admissibility = false;

    SolutionVector cur = initial;
    Eigen::VectorXd G;
    try {
        G = assemble_residual(cur, params, grid, closure, aopts).vector;
    } catch (const PoleProximity& e) {
        res.status = NewtonStatus::Inadmissible;
        res.message = e.what();
        return res;
    }
    double norm = G.cwiseAbs().maxCoeff();
    res.history.push_back(norm);

    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    bool have_lu = false;
    bool frozen = false;
    int stagnant = 0;
    bool rebuilt_after_stagnation = false;

    for (int it = 0; it < opts.max_iterations; ++it) {
        if (norm <= opts.tol_residual) {
            res.status = NewtonStatus::Converged;
            res.solution = cur;
            res.final_residual = norm;
            res.iterations = it;
            return res;
        }

        const bool want_fresh = !have_lu || !frozen;
        if (want_fresh) {
            Eigen::MatrixXd J;
            try {
                J = fd_jacobian(cur, params, grid, closure, opts);
            } catch (const PoleProximity& e) {
                res.status = NewtonStatus::Inadmissible;
                res.message = e.what();
                break;
            }
            lu.compute(J);
            ++res.jacobian_builds;
            have_lu = true;
            if (lu.rcond() < 1e-14) {
                res.status = NewtonStatus::SingularJacobian;
                res.message = "Jacobian condition estimate exceeds 1e14";
                break;
            }
        }

        const Eigen::VectorXd step = lu.solve(G);
        const Eigen::VectorXd phi = cur.flatten();

        double lambda = 1.0;
        bool accepted = false;
        for (int bt = 0; bt <= opts.max_backtracks; ++bt, lambda *= opts.damping) {
            const SolutionVector cand = SolutionVector::unflatten(phi - lambda * step, cur.N);
            if (!admissibility(cand, params).ok) continue;
            Eigen::VectorXd Gc;
            try {
                Gc = assemble_residual(cand, params, grid, closure, aopts).vector;
            } catch (const PoleProximity&) {
                continue;
            }
            const double nc = Gc.cwiseAbs().maxCoeff();
            if (nc < norm) {
                // Freeze the Jacobian once the residual is small; rebuild once
                // if two frozen steps in a row reduce the norm by < 10%.
                if (frozen) {
                    if (nc > 0.9 * norm) {
                        if (++stagnant >= 2 && !rebuilt_after_stagnation) {
                            frozen = false;
                            rebuilt_after_stagnation = true;
                            stagnant = 0;
                        }
                    } else {
                        stagnant = 0;
                    }
                }
                cur = cand;
                G = Gc;
                norm = nc;
                accepted = true;
                break;
            }
        }
        res.history.push_back(norm);

        if (!accepted) {
            if (frozen || !want_fresh) {
                frozen = false;  // retry this residual with a fresh Jacobian
                have_lu = false;
                continue;
            }
            res.status = NewtonStatus::NonConvergence;
            res.message = "no damped step reduced the residual";
            break;
        }
        if (!frozen && norm < opts.jacobian_reuse_threshold) frozen = true;
    }

    if (norm <= opts.tol_residual) {
        res.status = NewtonStatus::Converged;
        res.solution = cur;
    } else if (res.status == NewtonStatus::NonConvergence) {
        res.solution = cur;
        if (res.message.empty()) res.message = "iteration limit reached";
    }
    res.final_residual = norm;
    res.iterations = static_cast<int>(res.history.size()) - 1;
    return res;
}

}  // namespace iwave
