#include "iwave/continuation.hpp"

#include <algorithm>
#include <cmath>

namespace iwave {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::TypeI_crest: return "TypeI_crest";
        case Verdict::TypeI_trough: return "TypeI_trough";
        case Verdict::TypeII_upper: return "TypeII_upper";
        case Verdict::TypeII_lower: return "TypeII_lower";
        case Verdict::Undetermined: return "Undetermined";
        case Verdict::ResolutionLimit: return "ResolutionLimit";
    }
    return "?";
}

namespace {

BranchPoint make_point(const NewtonResult& res, const PhysParams& params, ClosureKind kind,
                       double step) {
    BranchPoint bp;
    bp.sol = res.solution;
    bp.N = res.solution.N;
    bp.amplitude = amplitude(res.solution);
    bp.residual = res.final_residual;
    bp.iterations = res.iterations;
    bp.closure = kind;
    bp.step = step;
    const InterfaceDiagnostics d = interface_diagnostics(res.solution, params);
    bp.diag.min_speed = d.min_speed;
    bp.diag.t_min_speed = d.t_min_speed;
    bp.diag.clear_bottom = d.clear_bottom;
    bp.diag.clear_top = d.clear_top;
    bp.diag.decay = decay_metric(res.solution);
    return bp;
}

// Linear extrapolation of the last two points, scaled to the new target.
SolutionVector predict(const Branch& branch, double scale) {
    const BranchPoint& last = branch.points.back();
    if (branch.points.size() < 2) return last.sol;
    const BranchPoint& prev = branch.points[branch.points.size() - 2];
    const SolutionVector prevs =
        prev.N == last.N ? prev.sol : resample(prev.sol, last.N);
    const Eigen::VectorXd phi =
        last.sol.flatten() + scale * (last.sol.flatten() - prevs.flatten());
    return SolutionVector::unflatten(phi, last.N);
}

double ls_slope(const std::vector<double>& v) {
    const int n = static_cast<int>(v.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sx += i;
        sy += v[i];
        sxx += double(i) * i;
        sxy += i * v[i];
    }
    const double den = n * sxx - sx * sx;
    return den == 0 ? 0.0 : (n * sxy - sx * sy) / den;
}

double dist_to_polyline(const std::vector<std::array<double, 2>>& poly, double x, double y) {
    double best = 1e300;
    for (const auto& p : poly) best = std::min(best, std::hypot(p[0] - x, p[1] - y));
    return best;
}

}  // namespace

Branch start_branch(const PhysParams& params, double A0, int N0, const NewtonOptions& newton) {
    params.require_valid();
    if (!(A0 > 0.0 && A0 <= 0.05))
        throw std::invalid_argument("start_branch: A0 must lie in (0, 0.05]");
    const SolutionVector guess = linear_guess(params, A0, N0);
    const NewtonResult res =
        newton_solve(guess, params, ClosureSpec::amplitude_target(A0), newton);
    if (!res.ok())
        throw std::runtime_error(std::string("start_branch: Newton failed: ") + res.message);
    Branch b;
    b.params = params;
    b.points.push_back(make_point(res, params, ClosureKind::Amplitude, A0));
    return b;
}

void extend_branch(Branch& branch, const ContinuationPolicy& policy) {
    if (branch.points.empty()) {
        branch.stop_reason = "empty branch";
        return;
    }
    branch.stop_reason.clear();
    const PhysParams& params = branch.params;
    const double target = policy.target_amplitude;

    double step = branch.next_step > 0 ? branch.next_step : policy.initial_step;
    int easy = branch.easy_successes;
    int amp_failures = 0;

    while (static_cast<int>(branch.points.size()) < policy.max_points) {
        const BranchPoint& last = branch.points.back();
        if (target > 0 && last.amplitude >= target - 1e-12) {
            branch.stop_reason = "target amplitude reached";
            break;
        }

        double A_next = last.amplitude + step;
        if (target > 0 && A_next > target) A_next = target;

        double scale = 1.0;
        if (branch.points.size() >= 2) {
            const double dA_old =
                last.amplitude - branch.points[branch.points.size() - 2].amplitude;
            if (std::abs(dA_old) > 1e-14) scale = (A_next - last.amplitude) / dA_old;
        }
        const SolutionVector guess = predict(branch, scale);
        const ClosureSpec closure = ClosureSpec::amplitude_target(A_next);
        const NewtonResult res = newton_solve(guess, params, closure, policy.newton);

        if (res.ok()) {
            amp_failures = 0;
            BranchPoint bp =
                make_point(res, params, ClosureKind::Amplitude, A_next - last.amplitude);
            // Raise N when the coefficient tail stops decaying.
            if (bp.diag.decay > policy.decay_trigger) {
                const int N2 = 2 * bp.N;
                if (N2 > policy.N_cap) {
                    branch.points.push_back(std::move(bp));
                    branch.resolution_limit = true;
                    branch.stop_reason = "resolution cap";
                    break;
                }
                const NewtonResult r2 =
                    newton_solve(resample(res.solution, N2), params, closure, policy.newton);
                if (r2.ok()) {
                    bp = make_point(r2, params, ClosureKind::Amplitude, bp.step);
                } else {
                    branch.points.push_back(std::move(bp));
                    branch.resolution_limit = true;
                    branch.stop_reason = "refinement failed";
                    break;
                }
            }
            branch.points.push_back(std::move(bp));
            if (res.iterations <= 4) {
                if (++easy >= 3) {
                    step = std::min(2.0 * step, policy.max_step);
                    easy = 0;
                }
            } else {
                easy = 0;
            }
            continue;
        }

        easy = 0;
        ++amp_failures;

        // After two amplitude failures, try one distance-closure step from the
        // last point; it cannot stall on a fold in the amplitude direction.
        if (amp_failures >= 2 && branch.points.size() >= 2) {
            const BranchPoint& prev = branch.points[branch.points.size() - 2];
            const SolutionVector prevs =
                prev.N == last.N ? prev.sol : resample(prev.sol, last.N);
            const double gap = (last.sol.flatten() - prevs.flatten()).norm();
            if (gap > 0) {
                const double d = 0.5 * gap;
                const ClosureSpec dc = ClosureSpec::distance_from(last.sol.flatten(), d);
                const NewtonResult rd =
                    newton_solve(predict(branch, d / gap), params, dc, policy.newton);
                if (rd.ok()) {
                    branch.points.push_back(make_point(rd, params, ClosureKind::Distance, d));
                    amp_failures = 0;
                    continue;
                }
            }
        }

        step *= 0.5;
        if (step < policy.min_step) {
            branch.stop_reason = res.status == NewtonStatus::Inadmissible
                                     ? "admissibility floor"
                                     : "step underflow";
            break;
        }
    }

    if (branch.stop_reason.empty()) branch.stop_reason = "max points";
    branch.next_step = step;
    branch.easy_successes = easy;
}

TerminationReport classify_termination(const Branch& branch, const ContinuationPolicy& policy) {
    const int n = static_cast<int>(branch.points.size());
    if (n < 3) throw InsufficientEvidence("classify_termination: fewer than 3 branch points");

    const int tail = std::min(5, n);
    TerminationReport rep;
    for (int i = n - tail; i < n; ++i) {
        const BranchPoint& p = branch.points[i];
        rep.amplitude.push_back(p.amplitude);
        rep.min_speed.push_back(p.diag.min_speed);
        rep.wall_clearance.push_back(std::min(p.diag.clear_bottom, p.diag.clear_top));
        rep.decay.push_back(p.diag.decay);
        double sd = p.diag.stag_dist;
        if (sd < 0 && policy.stagnation_evidence && i >= n - 3) {
            try {
                const FieldGrid fg = stream_function_grid(p.sol, branch.params,
                                                          policy.evidence_grid,
                                                          policy.evidence_grid);
                sd = 1e300;
                for (const auto& s : stagnation_points(fg))
                    sd = std::min(sd, dist_to_polyline(fg.interface_polyline, s.x, s.y));
                if (sd == 1e300) sd = -1.0;
            } catch (const std::exception&) {
                sd = -1.0;
            }
        }
        rep.stag_dist.push_back(sd);
    }

    // Shrink factor over a longer trailing window, robust to step changes.
    const auto shrink = [&](auto field) {
        const int m = std::min(20, n);
        double mx = 0;
        for (int i = n - m; i < n; ++i) mx = std::max(mx, field(branch.points[i]));
        const double lastv = field(branch.points[n - 1]);
        return lastv > 0 ? mx / lastv : 1e300;
    };
    const double speed_last = rep.min_speed.back();
    const double clear_last = rep.wall_clearance.back();
    const bool speed_collapse = speed_last < policy.speed_floor &&
                                ls_slope(rep.min_speed) < 0 &&
                                shrink([](const BranchPoint& p) { return p.diag.min_speed; }) >=
                                    3.0;
    const bool wall_collapse =
        clear_last < policy.wall_floor && ls_slope(rep.wall_clearance) < 0 &&
        shrink([](const BranchPoint& p) {
            return std::min(p.diag.clear_bottom, p.diag.clear_top);
        }) >= 3.0;

    if (speed_collapse && !wall_collapse) {
        const double t = branch.points[n - 1].diag.t_min_speed;
        rep.verdict = t < M_PI / 2 ? Verdict::TypeI_crest : Verdict::TypeI_trough;
    } else if (wall_collapse && !speed_collapse) {
        const PointDiagnostics& d = branch.points[n - 1].diag;
        rep.verdict =
            d.clear_top < d.clear_bottom ? Verdict::TypeII_upper : Verdict::TypeII_lower;
    } else if (branch.resolution_limit) {
        rep.verdict = Verdict::ResolutionLimit;
    } else {
        rep.verdict = Verdict::Undetermined;
    }
    return rep;
}

std::vector<SweepCell> sweep(double k, const std::vector<double>& H_grid,
                             const std::vector<double>& omega0_grid,
                             const ContinuationPolicy& policy) {
    if (H_grid.empty() || omega0_grid.empty())
        throw std::invalid_argument("sweep: empty parameter grid");
    std::vector<SweepCell> cells;
    for (double H : H_grid) {
        for (double w0 : omega0_grid) {
            SweepCell cell;
            cell.H = H;
            cell.omega0 = w0;
            try {
                PhysParams p;
                p.k = k;
                p.H = H;
                p.omega0 = w0;
                Branch b = start_branch(p, policy.A0, policy.N0, policy.newton);
                extend_branch(b, policy);
                cell.max_amplitude = b.points.back().amplitude;
                cell.verdict = classify_termination(b, policy).verdict;
                cell.note = b.stop_reason;
            } catch (const std::exception& e) {
                cell.verdict = Verdict::Undetermined;
                cell.note = e.what();
            }
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

}  // namespace iwave
