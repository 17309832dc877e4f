#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "iwave/continuation.hpp"
#include "iwave/io.hpp"
#include "iwave/model.hpp"

using namespace iwave;

namespace {

std::string tmp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

PhysParams make(double k, double H, double w0) {
    PhysParams p;
    p.k = k;
    p.H = H;
    p.omega0 = w0;
    return p;
}

// Minimal XML well-formedness scan: tags balance and nest properly.
bool xml_well_formed(const std::string& path) {
    std::ifstream in(path);
    if (!in) return false;
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::vector<std::string> stack;
    size_t i = 0;
    while ((i = text.find('<', i)) != std::string::npos) {
        const size_t end = text.find('>', i);
        if (end == std::string::npos) return false;
        std::string tag = text.substr(i + 1, end - i - 1);
        i = end + 1;
        if (tag.empty()) return false;
        if (tag[0] == '?' || tag[0] == '!') continue;
        if (tag.back() == '/') continue;  // self-closing
        if (tag[0] == '/') {
            const std::string name = tag.substr(1);
            if (stack.empty() || stack.back() != name) return false;
            stack.pop_back();
        } else {
            stack.push_back(tag.substr(0, tag.find_first_of(" \t\n")));
        }
    }
    return stack.empty();
}

}  // namespace

TEST_CASE("solution record round trip is exact") {
    const PhysParams p = make(2, 0.5, 0.3);
    SolutionRecord rec;
    rec.params = p;
    rec.sol = linear_guess(p, 0.0123456789012345, 16);
    rec.residual = 3.14e-11;
    const std::string path = tmp_path("iwave_sol_test.json");
    save_solution(path, rec);
    const SolutionRecord back = load_solution(path);
    CHECK(back.params.k == rec.params.k);
    CHECK(back.params.H == rec.params.H);
    CHECK(back.params.omega0 == rec.params.omega0);
    CHECK(back.residual == rec.residual);
    CHECK((back.sol.flatten() - rec.sol.flatten()).cwiseAbs().maxCoeff() == 0.0);
    std::remove(path.c_str());
}

TEST_CASE("branch file round trip preserves points and stepper state") {
    const PhysParams p = make(2, 0.5, 0.3);
    Branch b = start_branch(p, 0.01, 32);
    ContinuationPolicy pol;
    pol.N0 = 32;
    pol.target_amplitude = 0.03;
    pol.stagnation_evidence = false;
    extend_branch(b, pol);
    const std::string path = tmp_path("iwave_branch_test.jsonl");
    save_branch(path, b);
    const Branch back = load_branch(path);
    REQUIRE(back.points.size() == b.points.size());
    CHECK(back.next_step == b.next_step);
    CHECK(back.easy_successes == b.easy_successes);
    CHECK(back.stop_reason == b.stop_reason);
    for (size_t i = 0; i < b.points.size(); ++i) {
        CHECK((back.points[i].sol.flatten() - b.points[i].sol.flatten())
                  .cwiseAbs()
                  .maxCoeff() == 0.0);
        CHECK(back.points[i].diag.min_speed == b.points[i].diag.min_speed);
    }
    std::remove(path.c_str());
}

TEST_CASE("resumed branch reproduces the uninterrupted continuation") {
    const PhysParams p = make(2, 0.5, 0.3);
    Branch live = start_branch(p, 0.01, 32);
    ContinuationPolicy pol;
    pol.N0 = 32;
    pol.stagnation_evidence = false;

    // run to 0.03, persist, then continue both the in-memory branch and the
    // reloaded one; persistence must carry every bit of stepper state
    pol.target_amplitude = 0.03;
    extend_branch(live, pol);
    const std::string path = tmp_path("iwave_branch_resume.jsonl");
    save_branch(path, live);
    Branch resumed = load_branch(path);

    pol.target_amplitude = 0.05;
    extend_branch(live, pol);
    extend_branch(resumed, pol);

    CHECK(resumed.stop_reason == live.stop_reason);
    REQUIRE(resumed.points.size() == live.points.size());
    for (size_t i = 0; i < resumed.points.size(); ++i)
        CHECK((resumed.points[i].sol.flatten() - live.points[i].sol.flatten())
                  .cwiseAbs()
                  .maxCoeff() == 0.0);
    std::remove(path.c_str());
}

TEST_CASE("malformed JSON raises IoError with a located diagnostic") {
    const std::string path = tmp_path("iwave_broken.json");
    std::ofstream(path) << "{ \"k\": 2, \n \"H\": , }";
    CHECK_THROWS_AS(load_solution(path), IoError);
    try {
        load_solution(path);
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("parse") != std::string::npos);
    }
    std::remove(path.c_str());
}

TEST_CASE("CSV and SVG emitters produce parseable artifacts") {
    const PhysParams p = make(2, 0.5, 0.3);
    const SolutionVector s = shear_solution(p, 0.4, 16);
    const FieldGrid fg = stream_function_grid(s, p, 16, 16);
    const auto lines = streamlines(fg, {0.01, -0.01});
    const auto stag = stagnation_points(fg);

    const std::string csv = tmp_path("iwave_grid.csv");
    write_grid_csv(csv, fg);
    {
        std::ifstream in(csv);
        std::string header;
        std::getline(in, header);
        CHECK(header == "x,y,U,V,Psi,layer");
        int rows = 0;
        std::string line;
        while (std::getline(in, line)) ++rows;
        CHECK(rows == 16 * 16);
    }

    const std::string svg = tmp_path("iwave_fields.svg");
    write_fields_svg(svg, fg, lines, stag);
    CHECK(xml_well_formed(svg));

    std::vector<SweepCell> cells(2);
    cells[0] = {0.45, 0.0, Verdict::TypeI_crest, 0.3, ""};
    cells[1] = {0.55, 0.45, Verdict::TypeII_upper, 0.9, ""};
    const std::string sweep_svg = tmp_path("iwave_sweep.svg");
    write_sweep_svg(sweep_svg, cells);
    CHECK(xml_well_formed(sweep_svg));
    const std::string sweep_csv = tmp_path("iwave_sweep.csv");
    write_sweep_csv(sweep_csv, 3.14159, cells);
    {
        std::ifstream in(sweep_csv);
        std::string header;
        std::getline(in, header);
        CHECK(header == "k,H,omega0,verdict,max_amplitude,note");
    }

    std::remove(csv.c_str());
    std::remove(svg.c_str());
    std::remove(sweep_svg.c_str());
    std::remove(sweep_csv.c_str());
}
