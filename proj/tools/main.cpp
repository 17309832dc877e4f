// Command-line front end: solve / branch / sweep / fields / verify.
//
// Exit codes: 0 ok, 1 verification failure, 2 Newton failure, 3 inadmissible
// input, 4 configuration or I/O error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "iwave/continuation.hpp"
#include "iwave/fields.hpp"
#include "iwave/io.hpp"
#include "iwave/model.hpp"
#include "iwave/solver.hpp"

using nlohmann::json;
using namespace iwave;

namespace {

constexpr int kExitVerify = 1;
constexpr int kExitNewton = 2;
constexpr int kExitInadmissible = 3;
constexpr int kExitIo = 4;

struct Config {
    PhysParams params;
    int N = 64;
    double amplitude = 0.0;
    KinematicGauge gauge = KinematicGauge::CenteredDepth;
    NewtonOptions newton;
    ContinuationPolicy policy;
    std::vector<double> H_grid, omega0_grid;
};

Config parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw IoError(path + ": " + e.what());
    }
    Config c;
    if (j.contains("sweep")) {
        const json& s = j["sweep"];
        for (const auto& v : s.value("H_grid", json::array())) c.H_grid.push_back(v);
        for (const auto& v : s.value("omega0_grid", json::array()))
            c.omega0_grid.push_back(v);
    }
    c.params.k = j.at("k").get<double>();
    // sweep configs may omit the scalar H / omega0 and give only the grids
    c.params.H = (!j.contains("H") && !c.H_grid.empty()) ? c.H_grid.front()
                                                         : j.at("H").get<double>();
    c.params.omega0 = (!j.contains("omega0") && !c.omega0_grid.empty())
                          ? c.omega0_grid.front()
                          : j.at("omega0").get<double>();
    c.params.require_valid();
    c.N = j.value("N", 64);
    c.amplitude = j.value("amplitude", 0.0);
    const std::string gauge = j.value("gauge", "centered");
    if (gauge == "printed")
        c.gauge = KinematicGauge::PrintedY;
    else if (gauge != "centered")
        throw IoError(path + ": gauge must be \"centered\" or \"printed\"");
    if (j.contains("newton")) {
        const json& n = j["newton"];
        c.newton.tol_residual = n.value("tol", c.newton.tol_residual);
        c.newton.max_iterations = n.value("max_iterations", c.newton.max_iterations);
        c.newton.fd_step = n.value("fd_step", c.newton.fd_step);
    }
    c.newton.gauge = c.gauge;
    if (j.contains("policy")) {
        const json& p = j["policy"];
        c.policy.A0 = p.value("A0", c.policy.A0);
        c.policy.N0 = p.value("N0", c.N);
        c.policy.initial_step = p.value("initial_step", c.policy.initial_step);
        c.policy.max_step = p.value("max_step", c.policy.max_step);
        c.policy.min_step = p.value("min_step", c.policy.min_step);
        c.policy.max_points = p.value("max_points", c.policy.max_points);
        c.policy.N_cap = p.value("N_cap", c.policy.N_cap);
        c.policy.decay_trigger = p.value("decay_trigger", c.policy.decay_trigger);
        c.policy.target_amplitude = p.value("target_amplitude", c.policy.target_amplitude);
        c.policy.speed_floor = p.value("speed_floor", c.policy.speed_floor);
        c.policy.wall_floor = p.value("wall_floor", c.policy.wall_floor);
        c.policy.stagnation_evidence =
            p.value("stagnation_evidence", c.policy.stagnation_evidence);
        c.policy.evidence_grid = p.value("evidence_grid", c.policy.evidence_grid);
    } else {
        c.policy.N0 = c.N;
    }
    c.policy.newton = c.newton;
    return c;
}

std::string num_token(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    std::string s(buf);
    for (char& ch : s) {
        if (ch == '.') ch = 'p';
        if (ch == '-') ch = 'm';
    }
    return s;
}

std::string base_name(const Config& c) {
    return "k" + num_token(c.params.k) + "_H" + num_token(c.params.H) + "_w" +
           num_token(c.params.omega0);
}

int cmd_solve(const Config& cfg, const std::string& out_dir) {
    SolutionRecord rec;
    rec.params = cfg.params;
    if (cfg.amplitude == 0.0) {
        rec.sol = shear_solution(cfg.params, bifurcation_speed(cfg.params), cfg.N);
    } else if (std::abs(cfg.amplitude) <= 0.05) {
        const NewtonResult res =
            newton_solve(linear_guess(cfg.params, cfg.amplitude, cfg.N), cfg.params,
                         ClosureSpec::amplitude_target(cfg.amplitude), cfg.newton);
        if (!res.ok()) {
            std::cerr << "solve: Newton failed: " << res.message << "\n";
            return res.status == NewtonStatus::Inadmissible ? kExitInadmissible : kExitNewton;
        }
        rec.sol = res.solution;
    } else {
        try {
            Branch b = start_branch(cfg.params, cfg.policy.A0, cfg.N, cfg.newton);
            ContinuationPolicy pol = cfg.policy;
            pol.target_amplitude = cfg.amplitude;
            extend_branch(b, pol);
            if (std::abs(b.points.back().amplitude - cfg.amplitude) > 1e-10) {
                std::cerr << "solve: branch stopped at A=" << b.points.back().amplitude
                          << " (" << b.stop_reason << ")\n";
                return kExitNewton;
            }
            rec.sol = b.points.back().sol;
        } catch (const std::exception& e) {
            std::cerr << "solve: " << e.what() << "\n";
            return kExitNewton;
        }
    }

    CollocationGrid grid(rec.sol.N);
    AssembleOptions aopts;
    aopts.gauge = cfg.gauge;
    aopts.guard_admissibility = false;
    const ResidualReport rr = assemble_residual(
        rec.sol, cfg.params, grid, ClosureSpec::amplitude_target(amplitude(rec.sol)), aopts);
    rec.residual = rr.max_abs;

    const std::string path = out_dir + "/solution_" + base_name(cfg) + "_A" +
                             num_token(cfg.amplitude) + ".json";
    save_solution(path, rec);
    std::cout << "wrote " << path << "\n"
              << "max residual " << rr.max_abs << ", unused-midpoint residuals "
              << rr.unused_point_residual[0] << " " << rr.unused_point_residual[1] << " "
              << rr.unused_point_residual[2] << "\n";
    return 0;
}

int cmd_branch(const Config& cfg, const std::string& out_dir, const std::string& resume) {
    Branch b;
    try {
        if (!resume.empty()) {
            b = load_branch(resume);
            for (const auto& p : b.points)
                if (p.residual > cfg.newton.tol_residual)
                    throw IoError("branch point fails the residual bound on load");
        } else {
            b = start_branch(cfg.params, cfg.policy.A0, cfg.policy.N0, cfg.newton);
        }
    } catch (const std::exception& e) {
        std::cerr << "branch: " << e.what() << "\n";
        return resume.empty() ? kExitNewton : kExitIo;
    }
    extend_branch(b, cfg.policy);

    std::cout << "#  A          N    iters  residual    min_speed  clearance\n";
    for (size_t i = 0; i < b.points.size(); ++i) {
        const auto& p = b.points[i];
        std::printf("%-3zu %-10.6f %-4d %-6d %-11.3e %-10.6f %-10.6f\n", i, p.amplitude, p.N,
                    p.iterations, p.residual,
                    p.diag.min_speed, std::min(p.diag.clear_bottom, p.diag.clear_top));
    }
    std::string verdict = "Undetermined";
    try {
        verdict = to_string(classify_termination(b, cfg.policy).verdict);
    } catch (const InsufficientEvidence&) {
    }
    std::cout << "stop: " << b.stop_reason << "; verdict: " << verdict
              << "; max amplitude " << b.points.back().amplitude << "\n";

    const std::string path = out_dir + "/branch_" + base_name(cfg) + ".jsonl";
    save_branch(path, b);
    std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_sweep(const Config& cfg, const std::string& out_dir) {
    if (cfg.H_grid.empty() || cfg.omega0_grid.empty()) {
        std::cerr << "sweep: config must provide sweep.H_grid and sweep.omega0_grid\n";
        return kExitIo;
    }
    const auto cells = sweep(cfg.params.k, cfg.H_grid, cfg.omega0_grid, cfg.policy);
    const std::string stem = out_dir + "/sweep_k" + num_token(cfg.params.k);
    write_sweep_csv(stem + ".csv", cfg.params.k, cells);
    write_sweep_svg(stem + ".svg", cells);
    for (const auto& c : cells)
        std::cout << "H=" << c.H << " omega0=" << c.omega0 << " -> " << to_string(c.verdict)
                  << " (A_max=" << c.max_amplitude << ")\n";
    std::cout << "wrote " << stem << ".csv and " << stem << ".svg\n";
    return 0;
}

int cmd_fields(const std::string& solution_path, const std::string& out_dir, int Nx, int Ny) {
    SolutionRecord rec = load_solution(solution_path);
    const Admissibility adm = admissibility(rec.sol, rec.params);
    if (!adm.ok) {
        std::cerr << "fields: record inadmissible: " << to_string(adm.reason) << "\n";
        return kExitInadmissible;
    }
    const FieldGrid fg = stream_function_grid(rec.sol, rec.params, Nx, Ny);
    const auto stag = stagnation_points(fg);

    const double lo = fg.Psi.minCoeff(), hi = fg.Psi.maxCoeff();
    std::vector<double> levels;
    for (int i = 1; i <= 15; ++i) levels.push_back(lo + (hi - lo) * i / 16.0);
    const auto lines = streamlines(fg, levels);

    const std::string stem =
        out_dir + "/fields_" + std::filesystem::path(solution_path).stem().string();
    write_grid_csv(stem + ".csv", fg);
    write_fields_svg(stem + ".svg", fg, lines, stag);
    std::cout << "stagnation points (" << stag.size() << "):\n";
    for (const auto& s : stag) {
        const char* kind = s.kind == StagnationPoint::Kind::Saddle    ? "saddle"
                           : s.kind == StagnationPoint::Kind::Centre ? "centre"
                                                                     : "degenerate";
        std::cout << "  " << kind << " at (" << s.x << ", " << s.y << ")\n";
    }
    std::cout << "wrote " << stem << ".csv and " << stem << ".svg\n";
    return 0;
}

int cmd_verify(const std::string& solution_path) {
    const SolutionRecord rec = load_solution(solution_path);
    const PhysParams& params = rec.params;
    bool all_ok = true;
    const auto report = [&](const char* name, bool ok, double value) {
        std::cout << (ok ? "PASS" : "FAIL") << "  " << name << "  (" << value << ")\n";
        if (!ok) all_ok = false;
    };

    const Admissibility adm = admissibility(rec.sol, params);
    report("admissibility", adm.ok, adm.margin);
    if (!adm.ok) return kExitVerify;

    CollocationGrid grid(rec.sol.N);
    AssembleOptions aopts;
    aopts.guard_admissibility = false;
    const ResidualReport rr = assemble_residual(
        rec.sol, params, grid, ClosureSpec::amplitude_target(amplitude(rec.sol)), aopts);
    report("residual <= 1e-9", rr.max_abs <= 1e-9, rr.max_abs);

    const double unused = std::max({std::abs(rr.unused_point_residual[0]),
                                    std::abs(rr.unused_point_residual[1]),
                                    std::abs(rr.unused_point_residual[2])});
    const double bound = std::max(10.0 * rr.max_abs, 1e-9);
    report("unused midpoint rows within bound", unused <= bound, unused);

    std::vector<double> stations;
    const double period = 2.0 * M_PI / params.k;
    for (int i = 0; i < 8; ++i) stations.push_back(period * (i + 0.5) / 8.0);
    const InvariantReport inv = invariants(rec.sol, params, stations);
    const double spread =
        std::max({inv.spread_lower, inv.spread_upper, inv.spread_force});
    report("invariant spread <= 1e-6", spread <= 1e-6, spread);

    const auto [d1, v1] = pde_residual(stream_function_grid(rec.sol, params, 33, 33), params);
    const auto [d2, v2] = pde_residual(stream_function_grid(rec.sol, params, 65, 65), params);
    const double m1 = std::max(d1, v1), m2 = std::max(d2, v2);
    const bool conv = m1 < 1e-10 || (m2 > 0 && m1 / m2 >= 2.0 && m1 / m2 <= 8.0);
    report("pde residual second-order convergence", conv, m2 > 0 ? m1 / m2 : 0.0);

    return all_ok ? 0 : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"steady two-layer interfacial wave solver"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", resume_path, solution_path, grid_spec = "64,64";

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        if (needs_config)
            sub->add_option("--config", config_path, "configuration file")->required();
        sub->add_option("--out", out_dir, "output directory");
    };
    auto* solve = app.add_subcommand("solve", "solve one wave and write its record");
    add_common(solve, true);
    auto* branch = app.add_subcommand("branch", "trace a bifurcation branch");
    add_common(branch, true);
    branch->add_option("--resume", resume_path, "existing branch file to extend");
    auto* sweepc = app.add_subcommand("sweep", "classify branches over a parameter grid");
    add_common(sweepc, true);
    auto* fields = app.add_subcommand("fields", "reconstruct the interior flow of a record");
    add_common(fields, false);
    fields->add_option("--solution", solution_path, "solution record")->required();
    fields->add_option("--grid", grid_spec, "NX,NY reconstruction grid");
    auto* verify = app.add_subcommand("verify", "re-check a solution record");
    verify->add_option("--solution", solution_path, "solution record")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        std::filesystem::create_directories(out_dir);
        if (solve->parsed()) return cmd_solve(parse_config(config_path), out_dir);
        if (branch->parsed())
            return cmd_branch(parse_config(config_path), out_dir, resume_path);
        if (sweepc->parsed()) return cmd_sweep(parse_config(config_path), out_dir);
        if (fields->parsed()) {
            int Nx = 64, Ny = 64;
            if (std::sscanf(grid_spec.c_str(), "%d,%d", &Nx, &Ny) != 2) {
                std::cerr << "fields: --grid expects NX,NY\n";
                return kExitIo;
            }
            return cmd_fields(solution_path, out_dir, Nx, Ny);
        }
        if (verify->parsed()) return cmd_verify(solution_path);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const InadmissibleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInadmissible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return 0;
}
