#include <doctest.h>

#include <random>
#include <set>

#include "rumkit/framework.hpp"
#include "rumkit/presets.hpp"

using namespace rumkit;

namespace {

// independent bar counter for a realized window: enumerate translated motif
// edges directly
std::size_t oracle_bar_count(const CrystalFramework& c, const KRange& r) {
    std::size_t count = 0;
    for (int i = r.i0; i <= r.i1; ++i) {
        for (int j = r.j0; j <= r.j1; ++j) {
            for (const auto& e : c.motif_edges()) {
                int ti = i + e.offset[0], tj = j + e.offset[1];
                if (ti >= r.i0 && ti <= r.i1 && tj >= r.j0 && tj <= r.j1) ++count;
            }
        }
    }
    return count;
}

} // namespace

TEST_CASE("realize window counts") {
    CrystalFramework sq = presets::square_grid();
    RealizedWindow w = realize_window(sq, {0, 2, 0, 2});
    CHECK(w.framework().joint_count() == 9);
    CHECK(w.framework().bars().size() == 12); // 3x3 grid graph

    CrystalFramework kag = presets::kagome();
    RealizedWindow wk = realize_window(kag, {0, 1, 0, 1});
    CHECK(wk.framework().joint_count() == 12);
    CHECK(wk.framework().bars().size() == oracle_bar_count(kag, {0, 1, 0, 1}));
    CHECK(wk.framework().bars().size() == 17);

    // monotone under enlargement
    RealizedWindow big = realize_window(kag, {-1, 2, -1, 2});
    CHECK(big.framework().joint_count() > wk.framework().joint_count());
    CHECK(big.framework().bars().size() > wk.framework().bars().size());
    std::set<std::pair<long long, long long>> big_joints;
    auto key = [](Vec2 p) {
        return std::make_pair(static_cast<long long>(std::llround(p.x * 1e6)),
                              static_cast<long long>(std::llround(p.y * 1e6)));
    };
    for (const auto& p : big.framework().joints()) big_joints.insert(key(p));
    for (const auto& p : wk.framework().joints()) CHECK(big_joints.count(key(p)) == 1);
}

TEST_CASE("flex residual") {
    CrystalFramework sq = presets::square_grid();
    RealizedWindow w = realize_window(sq, {0, 2, 0, 2});
    const FiniteFramework& fw = w.framework();

    CHECK(flex_residual_max(fw, translation_field(fw, {3.0, -2.0})) == 0.0);
    CHECK(flex_residual_max(fw, rotation_field(fw, fw.joint(0))) <= 1e-12);
    CHECK(flex_residual_max(fw, rotation_field(fw, {0.37, 0.12})) <= 1e-12);
    CHECK(flex_residual_max(fw, translation_field(fw, {0.0, 0.0})) == 0.0);

    // unit velocity on one joint with a horizontal unit neighbour
    VelocityField u(fw.joint_count());
    int idx = w.joint_index(0, 1, 1);
    REQUIRE(idx >= 0);
    u[static_cast<std::size_t>(idx)] = {1.0, 0.0};
    CHECK(flex_residual_max(fw, u) == doctest::Approx(1.0).epsilon(1e-12));

    VelocityField tiny(3);
    CHECK_THROWS_AS(flex_residual_max(fw, tiny), ValidationError);
}

TEST_CASE("flex space properties") {
    CrystalFramework kag = presets::kagome();
    RealizedWindow w = realize_window(kag, {-1, 1, -1, 1});
    const FiniteFramework& fw = w.framework();
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);

    // homogeneity on random fields
    for (int rep = 0; rep < 5; ++rep) {
        VelocityField u(fw.joint_count());
        for (std::size_t i = 0; i < u.size(); ++i) {
            u[i] = {{coef(rng), coef(rng)}, {coef(rng), coef(rng)}};
        }
        double base = flex_residual_max(fw, u);
        double lambda = std::abs(coef(rng)) + 0.1;
        VelocityField v(fw.joint_count());
        for (std::size_t i = 0; i < u.size(); ++i) v[i] = std::complex<double>(lambda) * u[i];
        CHECK(flex_residual_max(fw, v) == doctest::Approx(lambda * base).epsilon(1e-10));
    }

    // linear combinations of flexes stay flexes
    VelocityField t1 = translation_field(fw, {1.0, 0.0});
    VelocityField t2 = rotation_field(fw, {0.0, 0.0});
    for (int rep = 0; rep < 5; ++rep) {
        std::complex<double> a{coef(rng), coef(rng)}, b{coef(rng), coef(rng)};
        VelocityField combo(fw.joint_count());
        for (std::size_t i = 0; i < combo.size(); ++i) combo[i] = a * t1[i] + b * t2[i];
        CHECK(flex_residual_max(fw, combo) <= 1e-10);
    }
}

TEST_CASE("translate field") {
    CrystalFramework sq = presets::square_grid();
    RealizedWindow w = realize_window(sq, {-3, 3, -3, 3});
    const FiniteFramework& fw = w.framework();

    VelocityField u(fw.joint_count());
    int center = w.joint_index(0, 0, 0);
    u[static_cast<std::size_t>(center)] = {1.0, 2.0};

    VelocityField same = translate_field(w, u, 0, 0);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(cnorm(same[i] - u[i]) == 0.0);

    VelocityField moved = translate_field(w, u, 2, 1);
    CHECK(cnorm(moved[static_cast<std::size_t>(w.joint_index(0, 2, 1))] -
                u[static_cast<std::size_t>(center)]) == 0.0);
    CHECK(moved.support().size() == 1);

    // residual invariance for interior-supported fields
    VelocityField flexy = rotation_field(fw, {0.0, 0.0});
    // restrict to a small patch so translates stay inside
    VelocityField patch(fw.joint_count());
    for (int i = -1; i <= 1; ++i) {
        for (int j = -1; j <= 1; ++j) {
            int idx = w.joint_index(0, i, j);
            patch[static_cast<std::size_t>(idx)] = flexy[static_cast<std::size_t>(idx)];
        }
    }
    // the two residuals agree because the translated field sees translated bars
    double before = flex_residual_max(fw, patch);
    double after = flex_residual_max(fw, translate_field(w, patch, 1, 1));
    CHECK(after == doctest::Approx(before).epsilon(1e-12));

    CHECK_THROWS_WITH_AS(translate_field(w, u, 4, 0), "window exceeded", ValidationError);
}

TEST_CASE("delone parameters") {
    CrystalFramework sq = presets::square_grid();
    RealizedWindow w = realize_window(sq, {0, 4, 0, 4});
    DeloneParameters d = delone_parameters(w.framework());
    CHECK(d.separation == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.max_bar_length == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.covering_radius_estimate <= 0.95); // interior points are near joints

    CrystalFramework kag = presets::kagome();
    DeloneParameters dk = delone_parameters(realize_window(kag, {-2, 2, -2, 2}).framework());
    CHECK(dk.separation == doctest::Approx(1.0).epsilon(1e-9));

    FiniteFramework lone({{0.0, 0.0}}, {});
    CHECK_THROWS_AS(delone_parameters(lone), ValidationError);
}

TEST_CASE("crystal validation") {
    CHECK_THROWS_WITH_AS(
        CrystalFramework(Basis2::standard(), {{0, 0}}, {{0, 0, {0, 0}}}),
        "motif edge with zero offset and equal ends", ValidationError);
    CHECK_THROWS_WITH_AS(
        CrystalFramework(Basis2::standard(), {{0, 0}},
                         {{0, 0, {1, 0}}, {0, 0, {-1, 0}}}),
        "duplicate motif edge", ValidationError);
    CHECK_THROWS_AS(CrystalFramework(Basis2::standard(), {{0, 0}, {0, 0}}, {}),
                    ValidationError);
}

TEST_CASE("supercell and rebase") {
    CrystalFramework kag = presets::kagome();
    CrystalFramework big = kag.supercell(2, 3);
    CHECK(big.joint_classes() == 3 * 2 * 3);
    CHECK(big.motif_edges().size() == 6 * 2 * 3);
    CHECK(big.max_bar_length() == doctest::Approx(kag.max_bar_length()));

    IntMat2 z = IntMat2::of_ints(1, 1, 0, 1);
    CrystalFramework sheared = presets::square_grid().rebase(z);
    CHECK(distance(sheared.basis().a1(), Vec2{1.0, 1.0}) <= 1e-12);
    // rebasing back restores the original offsets
    CrystalFramework back = sheared.rebase(z.inverse());
    CHECK(distance(back.basis().a1(), Vec2{1.0, 0.0}) <= 1e-12);
    for (std::size_t i = 0; i < back.motif_edges().size(); ++i) {
        CHECK(back.motif_edges()[i].offset ==
              presets::square_grid().motif_edges()[i].offset);
    }
    CHECK_THROWS_AS(presets::square_grid().rebase(IntMat2::of_ints(2, 0, 0, 1)),
                    ValidationError);
}

TEST_CASE("crystalize recovers a crystal from a periodic window") {
    CrystalFramework kag = presets::kagome();
    RealizedWindow w = realize_window(kag, {-3, 3, -3, 3});
    CrystalFramework rec = crystalize(w.framework(), kag.basis());
    CHECK(rec.joint_classes() == 3);
    CHECK(rec.motif_edges().size() == 6);
    std::multiset<long long> lens_a, lens_b;
    for (const auto& e : kag.motif_edges()) {
        lens_a.insert(std::llround(norm(kag.bar_vector(e)) * 1e9));
    }
    for (const auto& e : rec.motif_edges()) {
        lens_b.insert(std::llround(norm(rec.bar_vector(e)) * 1e9));
    }
    CHECK(lens_a == lens_b);
}

TEST_CASE("localisation predicate") {
    CrystalFramework sq = presets::square_grid();
    RealizedWindow w = realize_window(sq, {-4, 4, -4, 4});
    const FiniteFramework& fw = w.framework();
    ProjLine xaxis(Vec2{1.0, 0.0});

    VelocityField zero(fw.joint_count());
    CHECK(verify_localisation(fw, zero, xaxis, 0.1));

    VelocityField shear(fw.joint_count());
    for (int i = -4; i <= 4; ++i) {
        shear[static_cast<std::size_t>(w.joint_index(0, i, 0))] = {1.0, 0.0};
    }
    CHECK(verify_localisation(fw, shear, xaxis, 1.5));

    VelocityField trans = translation_field(fw, {1.0, 0.0});
    CHECK(!verify_localisation(fw, trans, xaxis, 3.9));
}
