#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "iwave/params.hpp"
#include "iwave/state.hpp"

namespace iwave {

// A Cauchy-kernel denominator came too close to zero: the collocation point
// collided with the (possibly reflected) quadrature mesh.
struct PoleProximity : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class AdmissReason { None, Wall, Degenerate, SelfIntersect, Stagnation };

struct Admissibility {
    bool ok = true;
    AdmissReason reason = AdmissReason::None;
    double margin = 0.0;  // value of the violated (or tightest) guard
};

const char* to_string(AdmissReason r);

struct InadmissibleError : std::runtime_error {
    AdmissReason reason;
    InadmissibleError(AdmissReason r, const std::string& what)
        : std::runtime_error(what), reason(r) {}
};

// The differentiated kinematic condition reads X'v + Y'(u + omega0*(Y-H)) = 0.
// PrintedY drops the -H shift; it is inconsistent with the upper-layer
// identity and exists only for the gauge-disambiguation check.
enum class KinematicGauge { CenteredDepth, PrintedY };

enum class ClosureKind { Amplitude, Distance };

struct ClosureSpec {
    ClosureKind kind = ClosureKind::Amplitude;
    double A = 0.0;          // target amplitude (Amplitude)
    Eigen::VectorXd anchor;  // flattened reference vector (Distance)
    double d = 0.0;          // target distance (Distance)

    static ClosureSpec amplitude_target(double A);
    static ClosureSpec distance_from(Eigen::VectorXd anchor, double d);
};

struct ResidualReport {
    Eigen::VectorXd vector;  // 4N-1 rows
    double max_abs = 0.0;
    // Lower/upper/kinematic residuals at the excluded first midpoint.
    std::array<double, 3> unused_point_residual{};
};

struct AssembleOptions {
    KinematicGauge gauge = KinematicGauge::CenteredDepth;
    bool guard_admissibility = true;
};

// g(z,w) = 1/((e^{-ikz}-e^{ikw})(e^{-ikz}-e^{-ikw}))
//        - 1/((e^{ikz}-e^{ikw})(e^{ikz}-e^{-ikw})).
std::complex<double> kernel_g(std::complex<double> z, std::complex<double> w, double k);

// Curve, trace and exponential values cached at mesh points and midpoints.
struct TraceTable {
    int N;
    Eigen::VectorXd Xm, Ym, Xpm, Ypm, um, vm;  // mesh, N+1 entries
    Eigen::VectorXd Xs, Ys, Xps, Yps, us, vs;  // midpoints, N entries
    Eigen::VectorXcd Ep_m, En_m;               // e^{ikZ}, e^{-ikZ} at mesh
    Eigen::VectorXcd Ep_s, En_s;               // at midpoints
};

TraceTable build_trace_table(const SolutionVector& sol, const PhysParams& params,
                             const CollocationGrid& grid);

// Trace samples at arbitrary parameter values, evaluated with cosine
// recurrences (no per-mode trig calls).
std::vector<TraceSample> trace_samples(const SolutionVector& sol, double k,
                                       const std::vector<double>& ts);

// Individual residual rows; J is the 1-based midpoint index. The identity and
// kinematic rows are enforced for J in 2..N, the speed rows for J in 1..N.
double lower_identity_residual(const TraceTable& tab, const PhysParams& params,
                               const CollocationGrid& grid, int J);
double upper_identity_residual(const TraceTable& tab, const PhysParams& params,
                               const CollocationGrid& grid, int J);
double kinematic_residual(const TraceTable& tab, const PhysParams& params, int J,
                          KinematicGauge gauge = KinematicGauge::CenteredDepth);
double speed_residual(const TraceTable& tab, const SolutionVector& sol, int J);
double depth_residual(const TraceTable& tab, const PhysParams& params,
                      const CollocationGrid& grid);
double closure_residual(const SolutionVector& sol, const ClosureSpec& closure);

// Convenience overloads building the table internally.
double lower_identity_residual(const SolutionVector& sol, const PhysParams& params,
                               const CollocationGrid& grid, int J);
double upper_identity_residual(const SolutionVector& sol, const PhysParams& params,
                               const CollocationGrid& grid, int J);
double kinematic_residual(const SolutionVector& sol, const PhysParams& params,
                          const CollocationGrid& grid, int J,
                          KinematicGauge gauge = KinematicGauge::CenteredDepth);
double speed_residual(const SolutionVector& sol, double k, int J);

// Stacks lower (J=2..N), upper (J=2..N), kinematic (J=2..N), speed (J=1..N),
// depth, closure: 4N-1 rows.
ResidualReport assemble_residual(const SolutionVector& sol, const PhysParams& params,
                                 const CollocationGrid& grid, const ClosureSpec& closure,
                                 const AssembleOptions& opts = {});

// Geometric and kinematic guards: wall clearance, non-degenerate
// parametrization, no self-intersection, no stagnation on the interface.
Admissibility admissibility(const SolutionVector& sol, const PhysParams& params);

// Interface quantities used by continuation diagnostics.
struct InterfaceDiagnostics {
    double min_speed;     // min over t of physical |(U,V)| on the interface
    double t_min_speed;   // argmin in [0, pi]
    double clear_bottom;  // min Y
    double clear_top;     // min 1-Y
};
InterfaceDiagnostics interface_diagnostics(const SolutionVector& sol, const PhysParams& params);

}  // namespace iwave
