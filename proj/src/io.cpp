#include "iwave/io.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace iwave {

using nlohmann::json;

namespace {

json vec_to_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Eigen::VectorXd vec_from_json(const json& a) {
    Eigen::VectorXd v(a.size());
    for (size_t i = 0; i < a.size(); ++i) v(static_cast<int>(i)) = a[i].get<double>();
    return v;
}

json sol_to_json(const PhysParams& p, const SolutionVector& s, double residual) {
    json j;
    j["k"] = p.k;
    j["H"] = p.H;
    j["omega0"] = p.omega0;
    j["N"] = s.N;
    j["u_hat"] = vec_to_json(s.u_hat);
    j["v_hat"] = vec_to_json(s.v_hat);
    j["X_hat"] = vec_to_json(s.X_hat);
    j["Y_hat"] = vec_to_json(s.Y_hat);
    j["L"] = s.L;
    j["amplitude"] = amplitude(s);
    json d;
    d["residual"] = residual;
    d["decay_metric"] = decay_metric(s);
    j["diagnostics"] = d;
    return j;
}

SolutionRecord sol_from_json(const json& j) {
    SolutionRecord rec;
    rec.params.k = j.at("k").get<double>();
    rec.params.H = j.at("H").get<double>();
    rec.params.omega0 = j.at("omega0").get<double>();
    const int N = j.at("N").get<int>();
    rec.sol = SolutionVector::zeros(N);
    rec.sol.u_hat = vec_from_json(j.at("u_hat"));
    rec.sol.v_hat = vec_from_json(j.at("v_hat"));
    rec.sol.X_hat = vec_from_json(j.at("X_hat"));
    rec.sol.Y_hat = vec_from_json(j.at("Y_hat"));
    rec.sol.L = j.at("L").get<double>();
    if (rec.sol.u_hat.size() != N || rec.sol.Y_hat.size() != N ||
        rec.sol.v_hat.size() != N - 1 || rec.sol.X_hat.size() != N - 1)
        throw IoError("solution record: coefficient array lengths inconsistent with N");
    if (j.contains("diagnostics") && j["diagnostics"].contains("residual"))
        rec.residual = j["diagnostics"]["residual"].get<double>();
    return rec;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out) throw IoError("write failed for " + path);
}

json parse(const std::string& text, const std::string& path) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw IoError(path + ": " + e.what());
    }
}

}  // namespace

void save_solution(const std::string& path, const SolutionRecord& rec) {
    write_file(path, sol_to_json(rec.params, rec.sol, rec.residual).dump(2) + "\n");
}

SolutionRecord load_solution(const std::string& path) {
    return sol_from_json(parse(read_file(path), path));
}

void save_branch(const std::string& path, const Branch& branch) {
    std::ostringstream out;
    json head;
    head["format"] = "branch";
    head["k"] = branch.params.k;
    head["H"] = branch.params.H;
    head["omega0"] = branch.params.omega0;
    head["next_step"] = branch.next_step;
    head["easy_successes"] = branch.easy_successes;
    head["resolution_limit"] = branch.resolution_limit;
    head["stop_reason"] = branch.stop_reason;
    out << head.dump() << "\n";
    for (const auto& p : branch.points) {
        json j = sol_to_json(branch.params, p.sol, p.residual);
        j["iterations"] = p.iterations;
        j["closure"] = p.closure == ClosureKind::Amplitude ? "amplitude" : "distance";
        j["step"] = p.step;
        json d = j["diagnostics"];
        d["min_speed"] = p.diag.min_speed;
        d["t_min_speed"] = p.diag.t_min_speed;
        d["clear_bottom"] = p.diag.clear_bottom;
        d["clear_top"] = p.diag.clear_top;
        d["decay_metric"] = p.diag.decay;
        d["stag_dist"] = p.diag.stag_dist;
        j["diagnostics"] = d;
        out << j.dump() << "\n";
    }
    write_file(path, out.str());
}

Branch load_branch(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError(path + ": empty branch file");
    const json head = parse(line, path);
    if (head.value("format", "") != "branch") throw IoError(path + ": not a branch file");

    Branch b;
    b.params.k = head.at("k").get<double>();
    b.params.H = head.at("H").get<double>();
    b.params.omega0 = head.at("omega0").get<double>();
    b.next_step = head.value("next_step", 0.0);
    b.easy_successes = head.value("easy_successes", 0);
    b.resolution_limit = head.value("resolution_limit", false);
    b.stop_reason = head.value("stop_reason", "");

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = parse(line, path);
        const SolutionRecord rec = sol_from_json(j);
        BranchPoint p;
        p.sol = rec.sol;
        p.N = rec.sol.N;
        p.amplitude = amplitude(rec.sol);
        p.residual = rec.residual;
        p.iterations = j.value("iterations", 0);
        p.closure = j.value("closure", "amplitude") == "distance" ? ClosureKind::Distance
                                                                  : ClosureKind::Amplitude;
        p.step = j.value("step", 0.0);
        const json d = j.value("diagnostics", json::object());
        p.diag.min_speed = d.value("min_speed", 0.0);
        p.diag.t_min_speed = d.value("t_min_speed", 0.0);
        p.diag.clear_bottom = d.value("clear_bottom", 0.0);
        p.diag.clear_top = d.value("clear_top", 0.0);
        p.diag.decay = d.value("decay_metric", 0.0);
        p.diag.stag_dist = d.value("stag_dist", -1.0);
        b.points.push_back(std::move(p));
    }
    return b;
}

void write_grid_csv(const std::string& path, const FieldGrid& g) {
    std::ostringstream out;
    out.precision(17);
    out << "x,y,U,V,Psi,layer\n";
    for (int j = 0; j < g.Ny; ++j)
        for (int i = 0; i < g.Nx; ++i)
            out << g.x[i] << ',' << g.y[j] << ',' << g.U(j, i) << ',' << g.V(j, i) << ','
                << g.Psi(j, i) << ',' << g.layer(j, i) << '\n';
    write_file(path, out.str());
}

void write_sweep_csv(const std::string& path, double k, const std::vector<SweepCell>& cells) {
    std::ostringstream out;
    out.precision(17);
    out << "k,H,omega0,verdict,max_amplitude,note\n";
    for (const auto& c : cells)
        out << k << ',' << c.H << ',' << c.omega0 << ',' << to_string(c.verdict) << ','
            << c.max_amplitude << ",\"" << c.note << "\"\n";
    write_file(path, out.str());
}

namespace {

// Maps physical (x, y) into an SVG pixel frame with y up.
struct Frame {
    double x0, x1, w, h, pad;
    double px(double x) const { return pad + (x - x0) / (x1 - x0) * w; }
    double py(double y) const { return pad + (1.0 - y) * h; }
};

void emit_polyline(std::ostream& out, const Frame& fr, const Polyline& line,
                   const char* stroke, double width) {
    out << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << width
        << "\" points=\"";
    for (const auto& p : line) out << fr.px(p[0]) << ',' << fr.py(p[1]) << ' ';
    out << "\"/>\n";
}

}  // namespace

void write_fields_svg(const std::string& path, const FieldGrid& g,
                      const std::vector<Polyline>& lines,
                      const std::vector<StagnationPoint>& stag) {
    const double x0 = g.x.front(), x1 = g.x.back();
    const double aspect = (x1 - x0);
    const Frame fr{x0, x1, 600.0, 600.0 / std::max(aspect, 1e-12), 20.0};
    std::ostringstream out;
    out.precision(8);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fr.w + 2 * fr.pad
        << "\" height=\"" << fr.h + 2 * fr.pad << "\">\n";
    out << "<rect x=\"" << fr.pad << "\" y=\"" << fr.pad << "\" width=\"" << fr.w
        << "\" height=\"" << fr.h << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (const auto& line : lines) emit_polyline(out, fr, line, "#999999", 1.0);
    emit_polyline(out, fr, g.interface_polyline, "black", 2.0);
    for (const auto& s : stag) {
        out << "<circle cx=\"" << fr.px(s.x) << "\" cy=\"" << fr.py(s.y)
            << "\" r=\"3\" fill=\"black\"/>\n";
    }
    out << "</svg>\n";
    write_file(path, out.str());
}

void write_sweep_svg(const std::string& path, const std::vector<SweepCell>& cells) {
    double H0 = 1e300, H1 = -1e300, w0 = 1e300, w1 = -1e300;
    for (const auto& c : cells) {
        H0 = std::min(H0, c.H);
        H1 = std::max(H1, c.H);
        w0 = std::min(w0, c.omega0);
        w1 = std::max(w1, c.omega0);
    }
    const double W = 500, Hgt = 500, pad = 40;
    const auto px = [&](double H) {
        return pad + (H1 > H0 ? (H - H0) / (H1 - H0) : 0.5) * W;
    };
    const auto py = [&](double w) {
        return pad + (w1 > w0 ? (w1 - w) / (w1 - w0) : 0.5) * Hgt;
    };
    std::ostringstream out;
    out.precision(8);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W + 2 * pad
        << "\" height=\"" << Hgt + 2 * pad << "\">\n";
    for (const auto& c : cells) {
        const double x = px(c.H), y = py(c.omega0), r = 6;
        switch (c.verdict) {
            case Verdict::TypeI_crest:  // triangle up
                out << "<polygon points=\"" << x << ',' << y - r << ' ' << x - r << ','
                    << y + r << ' ' << x + r << ',' << y + r << "\" fill=\"black\"/>\n";
                break;
            case Verdict::TypeI_trough:  // triangle down
                out << "<polygon points=\"" << x << ',' << y + r << ' ' << x - r << ','
                    << y - r << ' ' << x + r << ',' << y - r << "\" fill=\"black\"/>\n";
                break;
            case Verdict::TypeII_upper:
            case Verdict::TypeII_lower:
                out << "<rect x=\"" << x - r << "\" y=\"" << y - r << "\" width=\"" << 2 * r
                    << "\" height=\"" << 2 * r << "\" fill=\""
                    << (c.verdict == Verdict::TypeII_upper ? "#444444" : "#888888")
                    << "\"/>\n";
                break;
            default:
                out << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"" << r
                    << "\" fill=\"none\" stroke=\"black\"/>\n";
                break;
        }
    }
    out << "</svg>\n";
    write_file(path, out.str());
}

}  // namespace iwave
