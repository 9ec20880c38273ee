#include <doctest.h>

#include "rumkit/presets.hpp"
#include "rumkit/rum_engine.hpp"
#include "rumkit/spectra.hpp"

using namespace rumkit;
using cplx = std::complex<double>;

TEST_CASE("phase field evaluation") {
    BandedPhaseField ones({1.0, 0.0}, {0.0, 1.0}, {1.0, 0.0});
    CHECK(ones.value({3.7, -2.2}) == cplx{1.0, 0.0});

    BandedPhaseField alt({1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0});
    CHECK(alt.band_index({0.4, 3.5}) == 3);
    CHECK(std::abs(alt.value({0.4, 3.5}) - cplx{-1.0, 0.0}) <= 1e-12); // (-1)^3
    CHECK(std::abs(alt.value({10.0, -0.5}) - cplx{-1.0, 0.0}) <= 1e-12); // band -1

    ScalarPhaseField phi({1.0, 0.0}, {-1.0, 0.0}, Basis2::standard());
    CHECK(phi.value({0.2, 0.8}) == cplx{1.0, 0.0});
    CHECK(std::abs(phi.value({0.2, 1.2}) - cplx{-1.0, 0.0}) <= 1e-12);

    std::vector<CVec2> cell{CVec2{{2.0, 0.0}, {1.0, 0.0}}};
    MatricialPhaseField mat({1.0, 0.0}, {1.0, 0.0}, Basis2::standard(), 1, 1, cell);
    CVec2 v = mat.value({17.3, -4.2});
    CHECK(cnorm(v - cell[0]) <= 1e-12);

    CHECK_THROWS_AS(BandedPhaseField({1.0, 0.0}, {0.0, 1.0}, {2.0, 0.0}), ValidationError);
}

TEST_CASE("modulation") {
    CrystalFramework sq = presets::square_grid();
    RealizedWindow w = realize_window(sq, {-3, 3, -3, 3});
    const FiniteFramework& fw = w.framework();
    VelocityField tau = translation_field(fw, {1.0, 0.0});

    BandedPhaseField unit({1.0, 0.0}, {0.0, 1.0}, {1.0, 0.0});
    VelocityField same = modulate(unit, fw, tau);
    for (std::size_t i = 0; i < same.size(); ++i) CHECK(cnorm(same[i] - tau[i]) == 0.0);

    // modulate then demodulate
    cplx l = std::polar(1.0, 2.0 * M_PI * 0.23);
    BandedPhaseField phi({1.0, 0.0}, {0.0, 1.0}, l);
    BandedPhaseField phibar({1.0, 0.0}, {0.0, 1.0}, std::conj(l));
    VelocityField round = modulate(phibar, fw, modulate(phi, fw, tau));
    for (std::size_t i = 0; i < round.size(); ++i) CHECK(cnorm(round[i] - tau[i]) <= 1e-14);

    // rows alternating by a banded field match the IFM at gamma = (0, 1/2)
    // (bands shifted half a cell so joints sit mid-band)
    BandedPhaseField rows({1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -0.5});
    VelocityField alt = modulate(rows, fw, tau);
    CHECK(flex_residual_max(fw, alt) <= 1e-12);
    VelocityField ref = extract_ifm(w, 0.0, 0.5, 1e-8);
    std::size_t pivot = alt.support().front();
    cplx scale = ref[pivot].x / alt[pivot].x;
    for (std::size_t i = 0; i < alt.size(); ++i) {
        CHECK(cnorm(CVec2{scale * alt[i].x, scale * alt[i].y} - ref[i]) <= 1e-9);
    }
}

TEST_CASE("mostly epsilon close") {
    CrystalFramework sq = presets::square_grid();
    RealizedWindow w = realize_window(sq, {-8, 8, -8, 8});
    const FiniteFramework& fw = w.framework();
    VelocityField u = translation_field(fw, {1.0, 0.0});

    MostlyCloseStats same = mostly_epsilon_close(fw, u, u, 0.01, 3.0);
    CHECK(same.close);
    CHECK(same.worst_fraction == 0.0);

    VelocityField v = u;
    v[0] = {5.0, 5.0};
    CHECK(mostly_epsilon_close(fw, u, v, 0.1, 5.0).close);

    CHECK_THROWS_AS(mostly_epsilon_close(fw, u, v, 0.1, 20.0), ValidationError);
}

TEST_CASE("modulated flex versus banded modulation on Penrose") {
    Tiling pent = dualize(presets::penrose_pentagrid(16.0));
    TilingFramework pen = framework_of(pent);
    Vec2 b = rot90(pen.spec.families[0].edge);

    ModulatedRibbonFlex m8 = modulated_ribbon_flex(pen, 0, 8, {0.0, 1.0}, b);
    VelocityField banded = modulate(m8.band, pen.fw, translation_field(pen.fw, b));
    MostlyCloseStats ok = mostly_epsilon_close(pen.fw, m8.field, banded, 0.3, 10.0);
    CHECK(ok.close);

    ModulatedRibbonFlex m2 = modulated_ribbon_flex(pen, 0, 2, {0.0, 1.0}, b);
    VelocityField banded2 = modulate(m2.band, pen.fw, translation_field(pen.fw, b));
    MostlyCloseStats bad = mostly_epsilon_close(pen.fw, m2.field, banded2, 0.01, 10.0);
    CHECK(!bad.close);
}

TEST_CASE("slippage spectrum figures") {
    // square grid, standard basis: the two reciprocal axes, finite reduction
    Tiling sq = dualize(presets::square_2grid(8.0));
    SpectrumFigure fig = slippage_spectrum(sq, Basis2::standard());
    LineFigure axes;
    axes.insert(ProjLine(Vec2{1.0, 0.0}));
    axes.insert(ProjLine(Vec2{0.0, 1.0}));
    CHECK(fig.figure.set_equal(axes, 1e-9));
    ReducedFigure red = reduce_figure(fig.figure, 10.0);
    CHECK(!red.dense);
    CHECK(red.segment_count() == 2);
    CHECK(red.segment_count() == reduce_figure(fig.figure, 20.0).segment_count());

    // skew basis with an irrational entry: dense reduced spectrum
    const double golden = 0.5 * (1.0 + std::sqrt(5.0));
    Basis2 skew({1.0, 0.0}, {golden, 1.0});
    SpectrumFigure skew_fig = slippage_spectrum(sq, skew);
    CHECK(reduce_figure(skew_fig.figure, 10.0).dense);

    // Penrose, standard basis: 5 lines, at least one irrational, dense
    Tiling pen = dualize(presets::penrose_pentagrid(14.0));
    SpectrumFigure pfig = slippage_spectrum(pen, Basis2::standard());
    CHECK(pfig.figure.size() == 5);
    ReducedFigure pred = reduce_figure(pfig.figure, 10.0);
    CHECK(pred.dense);
    int irrational = 0;
    for (const auto& l : pred.lines) {
        if (!l.rational) ++irrational;
    }
    CHECK(irrational >= 1);
}

TEST_CASE("slippage spectrum commutes with change of basis") {
    Tiling pen = dualize(presets::penrose_pentagrid(12.0));
    LineFigure ambient = ribbon_figure(pen).figure;

    Basis2 a = Basis2::standard();
    IntMat2 zp{Rational(1), Rational(1, 2), Rational(0), Rational(1)};
    // rows of zp are the coefficients of the new basis vectors
    Basis2 ap(a.a1() + 0.5 * a.a2(), a.a2());

    SpectrumFigure base = slippage_spectrum(ambient, a);
    SpectrumFigure moved = slippage_spectrum(ambient, ap);
    LineFigure transformed = transform_figure(zp, base.figure);
    CHECK(moved.figure.set_equal(transformed, 1e-9));
}

TEST_CASE("limit spectrum for multigrid tilings") {
    Tiling pen = dualize(presets::penrose_pentagrid(12.0));
    SpectrumFigure slip = slippage_spectrum(pen, Basis2::standard());
    SpectrumFigure lim = limit_spectrum_multigrid(pen, Basis2::standard());
    CHECK(lim.kind == SpectrumKind::Limit);
    CHECK(lim.figure.set_equal(slip.figure, 1e-12));

    // periodic case: the limit figure matches the RUM line figure (square grid)
    Tiling sq = dualize(presets::square_2grid(8.0));
    SpectrumFigure sl = limit_spectrum_multigrid(sq, Basis2::standard());
    CrystalFramework c = presets::square_grid();
    LineFigure rum = detect_spectral_lines(c, scan_spectrum(c, 40, 1e-8)).figure;
    CHECK(sl.figure.set_equal(rum, 1e-9));
}

TEST_CASE("periodic slippage witnesses") {
    Tiling sqt = dualize(presets::square_2grid(12.0));
    TilingFramework sq = framework_of(sqt);
    SlippageWitness w = verify_periodic_slippage(sq, 1, 0.05);
    CHECK(w.stats.close);
    CHECK(w.deviation_fraction == 0.0);
    CHECK(w.gap_layers == 0);
    CHECK(flex_residual_max(sq.fw, w.field) <= 1e-12);

    Tiling pent = dualize(presets::penrose_pentagrid(25.0));
    TilingFramework pen = framework_of(pent);
    SlippageWitness wp = verify_periodic_slippage(pen, 1, 0.2);
    CHECK(wp.stats.close);
    CHECK(wp.deviation_fraction * wp.band_width <= 2.0 * wp.gap_layers + 0.5);
    CHECK(flex_residual_max(pen.fw, wp.field, 2.0) <= 1e-10);

    // Defn of a slippage line, part (i): banded modulations stay flexes
    for (int s = 0; s < 8; ++s) {
        cplx lambda = std::polar(1.0, 2.0 * M_PI * (s + 0.3) / 8.0);
        VelocityField mod = modulate(wp.band.with_lambda(lambda), pen.fw, wp.field);
        CHECK(flex_residual_max(pen.fw, mod, 2.0) <= 1e-10);
    }

    // a tight eps forces bands wider than the window can hold
    CHECK_THROWS_AS(verify_periodic_slippage(pen, 1, 1e-4), ValidationError);
}

TEST_CASE("generic slippage search") {
    // square grid rows are translational band flexes
    Tiling sqt = dualize(presets::square_2grid(10.0));
    TilingFramework sq = framework_of(sqt);
    GenericSlippageResult found =
        find_band_slippage_flex(sq.fw, ProjLine(Vec2{1.0, 0.0}), 1.5);
    CHECK(found.found);
    REQUIRE(found.field.has_value());
    CHECK(flex_residual_max(sq.fw, *found.field, 2.0) <= 1e-10);

    // kagome admits no translational band flexes along its edge directions
    CrystalFramework kag = presets::kagome();
    RealizedWindow kw = realize_window(kag, {-6, 6, -6, 6});
    const FiniteFramework& kfw = kw.framework();
    for (const auto& h : presets::kagome_edge_lines().lines()) {
        GenericSlippageResult res = find_band_slippage_flex(kfw, h, 4.0);
        CHECK(!res.found);
        CHECK(res.reason == "no translational-type band flexes");
    }
}

TEST_CASE("figure distance") {
    LineFigure f1;
    f1.insert(ProjLine(Vec2{1.0, 0.0}));
    CHECK(figure_distance_clipped(f1, f1, 2.0) == 0.0);

    LineFigure f2;
    f2.insert(ProjLine::from_angle(0.1));
    double want = 2.0 * std::sin(0.1);
    CHECK(figure_distance_clipped(f1, f2, 2.0) == doctest::Approx(want).epsilon(0.02));

    LineFigure empty;
    CHECK_THROWS_AS(figure_distance_clipped(f1, empty, 1.0), ValidationError);
}
