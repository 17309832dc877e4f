#pragma once

#include <string>
#include <vector>

#include "iwave/continuation.hpp"
#include "iwave/fields.hpp"
#include "iwave/state.hpp"

namespace iwave {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolutionRecord {
    PhysParams params;
    SolutionVector sol;
    double residual = -1.0;  // negative: unknown
};

// One JSON object per file: {k, H, omega0, N, u_hat, v_hat, X_hat, Y_hat, L,
// amplitude, diagnostics}. Numbers round-trip at full precision.
void save_solution(const std::string& path, const SolutionRecord& rec);
SolutionRecord load_solution(const std::string& path);

// JSON-lines: a header object, then one object per branch point. The file is
// rewritten whole on save; points hold full solution records so a load can
// resume stepping deterministically.
void save_branch(const std::string& path, const Branch& branch);
Branch load_branch(const std::string& path);

void write_grid_csv(const std::string& path, const FieldGrid& grid);
void write_sweep_csv(const std::string& path, double k, const std::vector<SweepCell>& cells);

// Streamlines (grey), interface (black), stagnation points (filled dots).
void write_fields_svg(const std::string& path, const FieldGrid& grid,
                      const std::vector<Polyline>& lines,
                      const std::vector<StagnationPoint>& stag);

// Glyph-coded classification map: triangles for corner-type endings (up =
// crest, down = trough), squares for wall-type, circles otherwise.
void write_sweep_svg(const std::string& path, const std::vector<SweepCell>& cells);

}  // namespace iwave
