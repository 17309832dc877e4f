#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "iwave/fields.hpp"
#include "iwave/model.hpp"
#include "iwave/solver.hpp"

namespace iwave {

enum class Verdict {
    TypeI_crest,   // interface speed collapses at the crest (corner forming)
    TypeI_trough,  // same, at the trough
    TypeII_upper,  // interface approaches the upper wall
    TypeII_lower,  // interface approaches the bottom wall
    Undetermined,
    ResolutionLimit,
};
const char* to_string(Verdict v);

struct PointDiagnostics {
    double min_speed = 0;    // min over the interface of physical |(U,V)|
    double t_min_speed = 0;  // argmin in [0, pi]; ~0 crest, ~pi trough
    double clear_bottom = 0;
    double clear_top = 0;
    double decay = 0;  // spectral tail ratio of the coefficient families
    // Distance from the nearest interior stagnation point to the interface;
    // negative when not computed.
    double stag_dist = -1.0;
};

struct BranchPoint {
    SolutionVector sol;
    double amplitude = 0;
    int N = 0;
    double residual = 0;
    int iterations = 0;
    ClosureKind closure = ClosureKind::Amplitude;
    double step = 0;  // amplitude step (or distance target) used to reach it
    PointDiagnostics diag;
};

struct Branch {
    PhysParams params;
    std::vector<BranchPoint> points;
    // Stepper state, persisted so a resumed branch continues identically.
    double next_step = 0;  // 0: policy.initial_step
    int easy_successes = 0;
    bool resolution_limit = false;
    std::string stop_reason;
};

struct ContinuationPolicy {
    double A0 = 0.01;  // starting amplitude (sweep and convenience paths)
    int N0 = 64;
    double initial_step = 0.01;
    double max_step = 0.05;
    double min_step = 1e-6;
    int max_points = 200;
    int N_cap = 1024;
    double decay_trigger = 1e-9;  // raise N when decay exceeds this
    double target_amplitude = 0;  // 0: continue until a limit stops the branch
    double speed_floor = 0.05;
    double wall_floor = 0.02;
    // Classification evidence: stagnation distances are computed on a coarse
    // field grid for the trailing points when enabled.
    bool stagnation_evidence = true;
    int evidence_grid = 49;
    NewtonOptions newton;
};

struct TerminationReport {
    Verdict verdict = Verdict::Undetermined;
    // Trailing evidence series, equal lengths >= 3.
    std::vector<double> amplitude, min_speed, wall_clearance, decay, stag_dist;
};

struct InsufficientEvidence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One converged point at amplitude A0, solved from the linear guess.
// Newton failures propagate as std::runtime_error.
Branch start_branch(const PhysParams& params, double A0, int N0,
                    const NewtonOptions& newton = {});

// Predictor-corrector stepping in amplitude with distance-closure fallback,
// step adaptation, and N-doubling on loss of spectral decay. Never throws;
// the stop cause lands in branch.stop_reason.
void extend_branch(Branch& branch, const ContinuationPolicy& policy);

TerminationReport classify_termination(const Branch& branch,
                                       const ContinuationPolicy& policy = {});

struct SweepCell {
    double H = 0, omega0 = 0;
    Verdict verdict = Verdict::Undetermined;
    double max_amplitude = 0;
    std::string note;
};

// Independent branch per (H, omega0) cell; failures are recorded per cell.
std::vector<SweepCell> sweep(double k, const std::vector<double>& H_grid,
                             const std::vector<double>& omega0_grid,
                             const ContinuationPolicy& policy);

}  // namespace iwave
