#pragma once

#include <Eigen/Dense>
#include <array>
#include <stdexcept>
#include <vector>

#include "iwave/params.hpp"
#include "iwave/residual.hpp"
#include "iwave/state.hpp"

namespace iwave {

struct OnInterface : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct OutOfDomain : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum LayerTag : int { LayerLower = 0, LayerUpper = 1, LayerBand = 2 };

struct FieldGrid {
    int Nx = 0, Ny = 0;
    std::vector<double> x;  // Nx values over one period [0, 2pi/k]
    std::vector<double> y;  // Ny values over [0, 1], walls included
    Eigen::MatrixXd U, V, Psi;  // Ny rows, Nx cols
    Eigen::MatrixXi layer;
    double dx = 0, dy = 0;
    // Interface polyline over one period, for plotting and band tests.
    std::vector<std::array<double, 2>> interface_polyline;
};

struct StagnationPoint {
    double x, y;
    enum class Kind { Saddle, Centre, Degenerate } kind;
    Eigen::Matrix2d velocity_gradient;
};

struct InvariantReport {
    std::vector<double> x_stations;
    std::vector<double> m_lower, m_upper, flow_force;
    double spread_lower = 0, spread_upper = 0, spread_force = 0;
};

// Evaluates the physical flow off the interface by the interior residue
// formulas. Quadrature runs on a zero-padded mesh of quad_N points (defaults
// to max(N, 256)) so accuracy holds closer to the interface.
class FieldReconstructor {
public:
    FieldReconstructor(const SolutionVector& sol, const PhysParams& params, int quad_N = 0);

    const PhysParams& params() const { return params_; }

    // Physical (U, V); layer chosen by a crossing-parity test. Throws
    // OnInterface within 1e-6 of the curve and OutOfDomain outside [0,1].
    std::array<double, 2> velocity(double x, double y) const;

    // Physical (U, V) with the layer forced and no interface guard. Values
    // within safe_distance() of the curve degrade (near-singular quadrature).
    std::array<double, 2> velocity_in_layer(double x, double y, int layer) const;

    int layer_of(double x, double y) const;  // LayerLower or LayerUpper
    // Interface crossings of the vertical line at x, sorted ascending.
    std::vector<double> interface_crossings(double x) const;
    // Same crossings as refined curve samples, sorted by height.
    std::vector<TraceSample> interface_sections(double x) const;
    double distance_to_interface(double x, double y) const;

    // Distance from the curve beyond which the trapezium quadrature of the
    // kernel is trusted to full accuracy.
    double safe_distance() const;

    // Psi(x, y) anchored to zero on the interface, by composite Simpson of U
    // along the vertical segment from the interface.
    double psi(double x, double y, int panels_per_unit = 256) const;

    std::vector<std::array<double, 2>> interface_polyline(int samples = 512) const;

private:
    std::array<double, 2> modified_velocity(double x, double y, int layer) const;

    PhysParams params_;
    SolutionVector sol_;  // zero-padded to quad_N
    TraceTable tab_;
    std::vector<TraceSample> poly_;  // dense curve samples, t in [-2pi, 2pi]
    double period_;
};

std::array<double, 2> velocity_at(const SolutionVector& sol, const PhysParams& params,
                                  double x, double y);

// Velocity along one vertical line. Within safe_distance() of a crossing the
// value is a one-sided cubic through samples a safe distance away plus the
// exact trace limit at the crossing itself (the physical velocity is
// continuous across the interface), which removes the near-curve quadrature
// blow-up. Crossing heights are cached so repeated calls on one column are
// cheap.
class ColumnEvaluator {
public:
    ColumnEvaluator(const FieldReconstructor& rec, double x);

    std::array<double, 2> velocity(double y) const;
    int layer_at(double y) const;  // LayerLower or LayerUpper, by parity
    const std::vector<TraceSample>& crossings() const { return cross_; }

private:
    struct Patch {
        std::array<double, 4> s, U, V;
        int count = 0;
    };
    const Patch& patch(int crossing, int side) const;  // side 0 below, 1 above

    const FieldReconstructor* rec_;
    double x_;
    double dsafe_;
    std::vector<TraceSample> cross_;
    mutable std::vector<std::array<Patch, 2>> patches_;
    mutable std::vector<std::array<bool, 2>> have_patch_;
};

FieldGrid stream_function_grid(const FieldReconstructor& rec, int Nx, int Ny);
FieldGrid stream_function_grid(const SolutionVector& sol, const PhysParams& params, int Nx,
                               int Ny);

// Zero cells of (U, V) refined by 2D Newton on the bilinear interpolant and
// classified by the sign of det(grad v): negative -> saddle, positive ->
// centre. Gradient-degenerate candidates (|det| < 1e-10) are tagged
// Degenerate and excluded from saddle/centre bookkeeping by callers.
std::vector<StagnationPoint> stagnation_points(const FieldGrid& field);

InvariantReport invariants(const SolutionVector& sol, const PhysParams& params,
                           const std::vector<double>& stations, int panels = 512);

// (max |U_x + V_y|, max |lap(Psi) - omega|) by central differences on interior
// nodes, interface band excluded. The vorticity equation is checked through
// Psi (see the implementation note) so that a kinematic inconsistency in the
// solve shows up as a non-converging defect.
// exclude_distance > 0 additionally drops nodes closer than that to the
// interface polyline, so refinement studies can compare maxima over a fixed
// region instead of one that grows with resolution.
std::pair<double, double> pde_residual(const FieldGrid& field, const PhysParams& params,
                                       double exclude_distance = 0.0);

using Polyline = std::vector<std::array<double, 2>>;

// Marching-squares contours of Psi at the given levels.
std::vector<Polyline> streamlines(const FieldGrid& field, const std::vector<double>& levels);

}  // namespace iwave
