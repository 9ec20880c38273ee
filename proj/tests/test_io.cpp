#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "rumkit/io.hpp"
#include "rumkit/presets.hpp"

using namespace rumkit;

namespace {

std::string tmp_path(const std::string& name) {
    return std::string("/tmp/rumkit_test_") + name;
}

int count_occurrences(const std::string& text, const std::string& needle) {
    int n = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size())) {
        ++n;
    }
    return n;
}

} // namespace

TEST_CASE("crystal file round trip") {
    CrystalFramework kag = presets::kagome();
    std::string path = tmp_path("kagome.json");
    save_crystal(path, kag);
    std::string first = read_text_file(path);
    CrystalFramework loaded = load_crystal(path);
    save_crystal(path, loaded);
    CHECK(read_text_file(path) == first);
    CHECK(loaded.joint_classes() == 3);
    CHECK(loaded.motif_edges().size() == 6);
    CHECK(distance(loaded.basis().a2(), kag.basis().a2()) == 0.0);
    CHECK(probe_document(path) == DocumentKind::Crystal);
}

TEST_CASE("crystal file invariants re-checked on load") {
    std::string dup = R"({"basis":[[1,0],[0,1]],"motif_edges":[
        {"from":0,"offset":[1,0],"to":0},{"from":0,"offset":[-1,0],"to":0}],
        "motif_joints":[[0,0]],"version":"1"})";
    CHECK_THROWS_WITH_AS(crystal_from_json(dup), "duplicate motif edge", ValidationError);

    std::string bad_version = R"({"basis":[[1,0],[0,1]],"motif_edges":[],
        "motif_joints":[[0,0]],"version":"2"})";
    CHECK_THROWS_AS(crystal_from_json(bad_version), ValidationError);
    try {
        crystal_from_json(bad_version);
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("/version") != std::string::npos);
    }

    std::string bad_offset = R"({"basis":[[1,0],[0,1]],"motif_edges":[
        {"from":0,"offset":[1],"to":0}],"motif_joints":[[0,0]],"version":"1"})";
    try {
        crystal_from_json(bad_offset);
        CHECK(false);
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("/motif_edges/0/offset") != std::string::npos);
    }
}

TEST_CASE("tiling file round trip and validation") {
    Tiling t = dualize(presets::square_2grid(4.0));
    std::string path = tmp_path("square_tiling.json");
    save_tiling(path, t);
    std::string first = read_text_file(path);
    Tiling loaded = load_tiling(path);
    save_tiling(path, loaded);
    CHECK(read_text_file(path) == first);
    CHECK(loaded.tiles().size() == t.tiles().size());
    CHECK(probe_document(path) == DocumentKind::Tiling);

    // perturb one vertex: the named tile fails the parallelogram check
    nlohmann::json j = nlohmann::json::parse(first);
    int vert = j["tiles"][7]["verts"][1].get<int>();
    j["vertices"][vert]["pos"][0] = j["vertices"][vert]["pos"][0].get<double>() + 0.01;
    try {
        tiling_from_json(j.dump());
        CHECK(false);
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("tile") != std::string::npos);
    }
}

TEST_CASE("figure and field files") {
    LineFigure f;
    f.insert(ProjLine(Vec2{2.0, 1.0}));
    f.insert(ProjLine(Vec2{0.0, 1.0}));
    std::string path = tmp_path("figure.json");
    save_figure(path, f, "slippage");
    std::string kind;
    LineFigure back = load_figure(path, &kind);
    CHECK(kind == "slippage");
    CHECK(back.set_equal(f, 1e-12));

    CrystalFramework sq = presets::square_grid();
    RealizedWindow w = realize_window(sq, {-2, 2, -2, 2});
    VelocityField u = rotation_field(w.framework(), {0.3, 0.4});
    std::string fpath = tmp_path("field.json");
    save_field(fpath, u, "crystal:square");
    std::string ref;
    VelocityField uback = load_field(fpath, &ref);
    CHECK(ref == "crystal:square");
    REQUIRE(uback.size() == u.size());
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(cnorm(uback[i] - u[i]) == 0.0);
    std::string again = tmp_path("field2.json");
    save_field(again, uback, ref);
    CHECK(read_text_file(again) == read_text_file(fpath));
}

TEST_CASE("scan and figure csv") {
    CrystalFramework sq = presets::square_grid();
    SpectrumScan scan = scan_spectrum(sq, 10, 1e-8);
    std::string csv = scan_to_csv(scan);
    CHECK(count_occurrences(csv, "\n") == 101); // header + 100 rows
    CHECK(csv.rfind("gamma1,gamma2,sigma_min\n", 0) == 0);

    LineFigure empty;
    CHECK(figure_to_csv(empty, "reciprocal") == "angle_rad,dir_x,dir_y,kind\n");

    // determinism: identical bytes on a re-run
    std::string path1 = tmp_path("scan1.csv"), path2 = tmp_path("scan2.csv");
    emit_scan_csv(path1, scan);
    emit_scan_csv(path2, scan_spectrum(sq, 10, 1e-8));
    CHECK(read_text_file(path1) == read_text_file(path2));
}

TEST_CASE("svg emitters") {
    LineFigure one;
    one.insert(ProjLine(Vec2{1.0, 2.0}));
    std::string svg = figure_to_svg(one, 1.0);
    CHECK(count_occurrences(svg, "<line") == 1);

    // reduced figure: one svg line per segment
    Tiling pen = dualize(presets::penrose_pentagrid(10.0));
    SpectrumFigure fig = slippage_spectrum(pen, Basis2::standard());
    ReducedFigure red = reduce_figure(fig.figure, 6.0);
    std::string rsvg = reduced_figure_to_svg(red);
    CHECK(count_occurrences(rsvg, "<line") == static_cast<int>(red.segment_count()));

    // rhombille edges come in three family colors
    Tiling rh = dualize(presets::rhombille_3grid(5.0));
    std::string tsvg = tiling_to_svg(rh);
    int palette_hits = 0;
    for (const char* color : {"#1f77b4", "#d62728", "#2ca02c"}) {
        if (tsvg.find(color) != std::string::npos) ++palette_hits;
    }
    CHECK(palette_hits == 3);
}

TEST_CASE("cli determinism and exit codes") {
    std::string cli = RUMKIT_CLI_PATH;
    std::string out1 = tmp_path("cli_scan1.csv");
    std::string out2 = tmp_path("cli_scan2.csv");
    std::string cmd1 = cli + " crystal scan --preset kagome --resolution 16 --out " +
                       out1 + " > /dev/null 2>&1";
    std::string cmd2 = cli + " crystal scan --preset kagome --resolution 16 --out " +
                       out2 + " > /dev/null 2>&1";
    REQUIRE(std::system(cmd1.c_str()) == 0);
    REQUIRE(std::system(cmd2.c_str()) == 0);
    CHECK(read_text_file(out1) == read_text_file(out2));

    // exit code 2 for validation problems
    int rc = std::system((cli + " crystal scan --preset nope > /dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(rc) == 2);

    // exit code 3 for "not in spectrum" class results
    rc = std::system((cli + " crystal localise --preset braced-grid --gamma1 0.25"
                            " --out /tmp/rumkit_never.json > /dev/null 2>&1")
                         .c_str());
    CHECK(WEXITSTATUS(rc) == 3);

    // exit code 4 for i/o failures
    rc = std::system((cli + " crystal scan --in /nonexistent.json > /dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(rc) == 4);

    // limit spectrum refuses non-multigrid input
    std::string kag = tmp_path("kagome_for_limit.json");
    save_crystal(kag, presets::kagome());
    rc = std::system((cli + " spectra limit --in " + kag + " > /dev/null 2>&1").c_str());
    CHECK(WEXITSTATUS(rc) == 2);
}

TEST_CASE("atomic writes leave no temp files") {
    std::string path = tmp_path("atomic.json");
    save_figure(path, LineFigure{}, "reciprocal");
    std::ifstream tmp(path + ".tmp");
    CHECK(!tmp.good());
}
