#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "rumkit/multigrid.hpp"
#include "rumkit/presets.hpp"

using namespace rumkit;

namespace {

double tile_angle_deg(const Tiling& t, const TileRecord& tile) {
    Vec2 va = t.spec().families[static_cast<std::size_t>(tile.fam_a)].edge;
    Vec2 vb = t.spec().families[static_cast<std::size_t>(tile.fam_b)].edge;
    double c = std::abs(dot(va, vb)) / (norm(va) * norm(vb));
    return std::acos(std::clamp(c, 0.0, 1.0)) * 180.0 / M_PI;
}

} // namespace

TEST_CASE("regularity check") {
    CHECK(check_regularity(presets::penrose_pentagrid(15.0)).regular);
    CHECK(check_regularity(presets::square_2grid(10.0)).regular);

    MultigridSpec singular = presets::penrose_pentagrid(10.0);
    for (auto& f : singular.families) f.offset = 0.0; // all lines through the origin
    CHECK(!check_regularity(singular).regular);
    CHECK_THROWS_AS(dualize(singular), ValidationError);

    MultigridSpec parallel;
    parallel.window = 5.0;
    parallel.families.push_back({{1.0, 0.0}, 0.1, {1.0, 0.0}});
    parallel.families.push_back({{-1.0, 0.0}, 0.2, {1.0, 0.0}});
    CHECK_THROWS_AS(check_regularity(parallel), ValidationError);
}

TEST_CASE("dualize the square 2-grid") {
    MultigridSpec spec = presets::square_2grid(6.0);
    RegularityReport rep = check_regularity(spec);
    Tiling t = dualize(spec);
    CHECK(t.tiles().size() == rep.intersections);
    for (const auto& tile : t.tiles()) {
        CHECK(tile_angle_deg(t, tile) == doctest::Approx(90.0).epsilon(1e-9));
    }
    t.validate();

    TilingFramework tf = framework_of(t);
    for (const auto& bar : tf.fw.bars()) {
        CHECK(distance(tf.fw.joint(bar.i), tf.fw.joint(bar.j)) ==
              doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("dualize the rhombille 3-grid") {
    Tiling t = dualize(presets::rhombille_3grid(8.0));
    for (const auto& tile : t.tiles()) {
        double ang = tile_angle_deg(t, tile);
        CHECK(std::min(std::abs(ang - 60.0), std::abs(ang - 120.0)) <= 1e-9);
    }
    // three distinct bar directions
    TilingFramework tf = framework_of(t);
    LineFigure directions;
    for (const auto& bar : tf.fw.bars()) {
        directions.insert(ProjLine(tf.fw.joint(bar.j) - tf.fw.joint(bar.i)), 1e-9);
    }
    CHECK(directions.size() == 3);
}

TEST_CASE("dualize the pentagrid") {
    Tiling t = dualize(presets::penrose_pentagrid(12.0));
    std::set<int> angle_classes;
    for (const auto& tile : t.tiles()) {
        double ang = tile_angle_deg(t, tile);
        bool matched = false;
        for (int want : {36, 72}) { // acute angles of the thin and thick rhombs
            if (std::abs(ang - want) <= 1e-9) {
                matched = true;
                angle_classes.insert(want);
            }
        }
        CHECK(matched);
    }
    CHECK(angle_classes.size() == 2);

    // unit rhombs everywhere
    TilingFramework tf = framework_of(t);
    for (const auto& bar : tf.fw.bars()) {
        CHECK(distance(tf.fw.joint(bar.i), tf.fw.joint(bar.j)) ==
              doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("tiling invariants on the rhombille fixture") {
    Tiling t = dualize(presets::rhombille_3grid(8.0));

    // interior edges are shared by exactly two tiles
    std::map<std::pair<int, int>, int> edge_tiles;
    for (const auto& tile : t.tiles()) {
        for (int e = 0; e < 4; ++e) {
            int a = tile.verts[e], b = tile.verts[(e + 1) % 4];
            auto key = std::minmax(a, b);
            ++edge_tiles[{key.first, key.second}];
        }
    }
    double maxedge = 1.0;
    double interior = 1.5 * (8.0 - 2.0 * maxedge); // tiling positions scale by 3/2
    std::size_t checked = 0;
    for (const auto& [edge, count] : edge_tiles) {
        Vec2 mid = 0.5 * (t.vertex_pos()[static_cast<std::size_t>(edge.first)] +
                          t.vertex_pos()[static_cast<std::size_t>(edge.second)]);
        if (norm(mid) > interior) continue;
        CHECK(count == 2);
        ++checked;
    }
    CHECK(checked > 100);

    // sampled covering / interior-disjointness: central points lie in exactly
    // one tile
    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> coord(-6.0, 6.0);
    auto inside = [&](const TileRecord& tile, Vec2 p) {
        Vec2 v0 = t.vertex_pos()[static_cast<std::size_t>(tile.verts[0])];
        Vec2 va = t.spec().families[static_cast<std::size_t>(tile.fam_a)].edge;
        Vec2 vb = t.spec().families[static_cast<std::size_t>(tile.fam_b)].edge;
        Basis2 b(va, vb);
        Vec2 s = b.coefficients(p - v0);
        const double eps = 1e-9;
        return s.x > eps && s.x < 1 - eps && s.y > eps && s.y < 1 - eps;
    };
    int covered_once = 0;
    for (int rep = 0; rep < 200; ++rep) {
        Vec2 p{coord(rng), coord(rng)};
        int hits = 0;
        for (const auto& tile : t.tiles()) {
            if (inside(tile, p)) ++hits;
        }
        CHECK(hits <= 1);
        if (hits == 1) ++covered_once;
    }
    CHECK(covered_once >= 196); // boundary-of-tile misses only
}

TEST_CASE("ribbons") {
    Tiling sq = dualize(presets::square_2grid(8.0));
    // family 1 has horizontal grid lines; its ribbons are rows of squares
    Ribbon row = extract_ribbon(sq, 1, 0);
    CHECK(line_angle_distance(row.fitted, ProjLine(Vec2{1.0, 0.0})) <= 1e-9);

    Tiling pen = dualize(presets::penrose_pentagrid(14.0));
    Ribbon rib = extract_ribbon(pen, 2, 0);
    CHECK(rib.tiles.size() >= 20);
    // Penrose ribbons run perpendicular to their tile-joining edge vector
    Vec2 vj = pen.spec().families[2].edge;
    CHECK(line_angle_distance(rib.fitted, ProjLine(rot90(vj))) <= 0.5 * M_PI / 180.0);

    // consecutive tiles share an edge with edge vector v_j
    for (std::size_t i = 0; i + 1 < rib.tiles.size(); ++i) {
        const auto& ta = pen.tiles()[static_cast<std::size_t>(rib.tiles[i])];
        const auto& tb = pen.tiles()[static_cast<std::size_t>(rib.tiles[i + 1])];
        std::set<int> va(ta.verts.begin(), ta.verts.end());
        std::vector<int> shared;
        for (int v : tb.verts) {
            if (va.count(v)) shared.push_back(v);
        }
        REQUIRE(shared.size() == 2);
        Vec2 d = pen.vertex_pos()[static_cast<std::size_t>(shared[1])] -
                 pen.vertex_pos()[static_cast<std::size_t>(shared[0])];
        CHECK(line_angle_distance(ProjLine(d), ProjLine(vj)) <= 1e-9);
    }

    // ribbons of the same family never share a tile
    Ribbon other = extract_ribbon(pen, 2, 1);
    std::set<int> mine(rib.tiles.begin(), rib.tiles.end());
    for (int id : other.tiles) CHECK(mine.count(id) == 0);

    CHECK_THROWS_WITH_AS(extract_ribbon(pen, 2, 1000), "window too small",
                         ValidationError);
}

TEST_CASE("ribbon figures") {
    RibbonFigure sq = ribbon_figure(dualize(presets::square_2grid(8.0)));
    LineFigure axes;
    axes.insert(ProjLine(Vec2{1.0, 0.0}));
    axes.insert(ProjLine(Vec2{0.0, 1.0}));
    CHECK(sq.figure.set_equal(axes, 1e-9));

    RibbonFigure pen = ribbon_figure(dualize(presets::penrose_pentagrid(16.0)));
    REQUIRE(pen.figure.size() == 5);
    CHECK(pen.warnings.empty()); // fits agree with the analytic candidates
    // pairwise angles are multiples of 36 degrees
    const auto& lines = pen.figure.lines();
    for (std::size_t i = 0; i < lines.size(); ++i) {
        for (std::size_t j = i + 1; j < lines.size(); ++j) {
            double d = line_angle_distance(lines[i], lines[j]);
            double k = std::round(d / (M_PI / 5.0));
            CHECK(std::abs(d - k * M_PI / 5.0) <= 1e-6);
        }
    }
    // 36-degree rotation invariance
    LineFigure rotated;
    for (const auto& l : lines) rotated.insert(ProjLine::from_angle(l.angle() + M_PI / 5.0));
    CHECK(rotated.set_equal(pen.figure, 1e-6));

    RibbonFigure ab = ribbon_figure(dualize(presets::ammann_beenker_tetragrid(12.0)));
    REQUIRE(ab.figure.size() == 4);
    const auto& abl = ab.figure.lines();
    for (std::size_t i = 0; i + 1 < abl.size(); ++i) {
        CHECK(std::abs(abl[i + 1].angle() - abl[i].angle() - M_PI / 4.0) <= 1e-6);
    }
}

TEST_CASE("ribbon relative density") {
    Tiling pen = dualize(presets::penrose_pentagrid(14.0));
    const int family = 0;
    std::vector<double> centers;
    for (long long k = -13; k <= 13; ++k) {
        try {
            centers.push_back(extract_ribbon(pen, family, k).transverse_center);
        } catch (const ValidationError&) {
        }
    }
    REQUIRE(centers.size() >= 10);
    std::sort(centers.begin(), centers.end());
    double max_gap = 0.0;
    for (std::size_t i = 0; i + 1 < centers.size(); ++i) {
        max_gap = std::max(max_gap, centers[i + 1] - centers[i]);
    }
    double c = 1.1 * max_gap;
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> anchor(centers.front(), centers.back() - c);
    for (int rep = 0; rep < 50; ++rep) {
        double lo = anchor(rng);
        bool hit = false;
        for (double t : centers) {
            if (t >= lo && t <= lo + c) {
                hit = true;
                break;
            }
        }
        CHECK(hit);
    }
}

TEST_CASE("shear and pair slippage flexes") {
    Tiling sqt = dualize(presets::square_2grid(8.0));
    TilingFramework sq = framework_of(sqt);
    // family 1: horizontal lines; perpendicular velocity is horizontal
    VelocityField shear = shear_flex(sq, 1, 0, {1.0, 0.0});
    CHECK(flex_residual_max(sq.fw, shear) == 0.0);
    for (std::size_t i = 0; i < sq.fw.joint_count(); ++i) {
        bool upper = sq.joint_k[i][1] >= 1;
        CHECK(cnorm(shear[i]) == (upper ? doctest::Approx(1.0) : doctest::Approx(0.0)));
    }

    VelocityField band = pair_slippage_flex(sq, 1, -2, 1, {1.0, 0.0});
    CHECK(flex_residual_max(sq.fw, band) == 0.0);

    Tiling pent = dualize(presets::penrose_pentagrid(14.0));
    TilingFramework pen = framework_of(pent);
    double margin = 2.0; // all edges are unit
    for (int fam = 0; fam < 5; ++fam) {
        Vec2 b = rot90(pen.spec.families[static_cast<std::size_t>(fam)].edge);
        VelocityField u = shear_flex(pen, fam, 0, b);
        CHECK(flex_residual_max(pen.fw, u, margin) <= 1e-10);
        VelocityField p = pair_slippage_flex(pen, fam, 0, 1, b);
        CHECK(flex_residual_max(pen.fw, p, margin) <= 1e-10);
        // support is localised along the ribbon direction
        ProjLine h = analytic_ribbon_direction(pen.spec, fam);
        double bound = 0.0;
        for (std::size_t s : p.support()) {
            bound = std::max(bound, std::abs(cross(h.direction(), pen.fw.joint(s))));
        }
        CHECK(verify_localisation(pen.fw, p, h, bound + 1e-9));
        CHECK(bound <= 0.3 * pen.fw.window().width()); // genuinely banded
    }

    // indicator algebra: shear(k1) - shear(k2) = pair(k1, k2)
    Vec2 b0 = rot90(pen.spec.families[0].edge);
    VelocityField s1 = shear_flex(pen, 0, -1, b0);
    VelocityField s2 = shear_flex(pen, 0, 2, b0);
    VelocityField pr = pair_slippage_flex(pen, 0, -1, 2, b0);
    for (std::size_t i = 0; i < pr.size(); ++i) CHECK(cnorm(s1[i] - s2[i] - pr[i]) == 0.0);

    CHECK_THROWS_AS(shear_flex(pen, 0, 0, pen.spec.families[0].edge), ValidationError);
    CHECK_THROWS_AS(pair_slippage_flex(pen, 0, 3, 3, b0), ValidationError);
}

TEST_CASE("modulated ribbon flexes") {
    Tiling sqt = dualize(presets::square_2grid(10.0));
    TilingFramework sq = framework_of(sqt);

    ModulatedRibbonFlex plain = modulated_ribbon_flex(sq, 1, 4, {1.0, 0.0}, {1.0, 0.0});
    for (std::size_t i = 0; i < plain.field.size(); ++i) {
        CHECK(cnorm(plain.field[i] - CVec2{{1.0, 0.0}, {0.0, 0.0}}) <= 1e-12);
    }

    ModulatedRibbonFlex alt = modulated_ribbon_flex(sq, 1, 2, {-1.0, 0.0}, {1.0, 0.0});
    CHECK(flex_residual_max(sq.fw, alt.field) <= 1e-12);
    CHECK(alt.deviation_fraction == 0.0); // grid rows match the bands exactly
    for (std::size_t i = 0; i < alt.field.size(); ++i) {
        long long kj = sq.joint_k[i][1];
        long long block = kj >= 0 ? kj / 2 : -((-kj + 1) / 2);
        double want = (block % 2 == 0) ? 1.0 : -1.0;
        CHECK(alt.field[i].x.real() == doctest::Approx(want));
    }

    Tiling pent = dualize(presets::penrose_pentagrid(14.0));
    TilingFramework pen = framework_of(pent);
    Vec2 b = rot90(pen.spec.families[1].edge);
    ModulatedRibbonFlex mod = modulated_ribbon_flex(pen, 1, 8, {0.0, 1.0}, b);
    CHECK(flex_residual_max(pen.fw, mod.field, 2.0) <= 1e-10);
    CHECK(mod.deviation_fraction <= 2.0 / 8.0);

    CHECK_THROWS_AS(modulated_ribbon_flex(pen, 1, 1, {0.0, 1.0}, b), ValidationError);
}

TEST_CASE("rational approximants") {
    MultigridSpec sq = presets::square_2grid(6.0);
    ApproximantReport same = rational_approximant(sq, 3);
    for (std::size_t j = 0; j < sq.families.size(); ++j) {
        CHECK(distance(same.spec.families[j].normal, sq.families[j].normal) <= 1e-12);
    }
    CHECK(same.max_deviation <= 1e-12);

    MultigridSpec pen = presets::penrose_pentagrid(6.0);
    ApproximantReport q1 = rational_approximant(pen, 1);
    for (const auto& fam : q1.spec.families) {
        auto rat = rational_direction(ProjLine(fam.normal), 8, 1e-9);
        CHECK(rat.has_value());
    }
    ApproximantReport q5 = rational_approximant(pen, 5);
    ApproximantReport q13 = rational_approximant(pen, 13);
    CHECK(q5.max_deviation <= std::atan(1.0 / 5.0));
    CHECK(q13.max_deviation <= std::atan(1.0 / 13.0));
    CHECK(q13.max_deviation < q5.max_deviation);
}

TEST_CASE("tiling validate flags corrupted data") {
    Tiling t = dualize(presets::square_2grid(4.0));
    auto ks = t.vertex_k();
    auto pos = t.vertex_pos();
    auto tiles = t.tiles();
    pos[tiles[5].verts[2]] = pos[tiles[5].verts[2]] + Vec2{0.01, 0.0};
    Tiling broken(t.spec(), ks, pos, tiles);
    CHECK_THROWS_AS(broken.validate(), ValidationError);
}
