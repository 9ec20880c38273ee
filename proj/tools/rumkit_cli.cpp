// rumkit command line: zero-mode spectra of periodic frameworks and
// multigrid quasicrystal tilings.
//
// Exit codes: 0 success, 2 validation error, 3 spectral search failure
// ("not in spectrum", "m_max exhausted", full-spectrum refusal), 4 I/O.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rumkit/io.hpp"
#include "rumkit/localise.hpp"
#include "rumkit/presets.hpp"

namespace {

using namespace rumkit;

std::vector<double> parse_numbers(const std::string& text, std::size_t count,
                                  const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    if (out.size() != count) {
        throw ValidationError(what + ": expected " + std::to_string(count) +
                              " comma-separated numbers");
    }
    return out;
}

CrystalFramework crystal_input(const std::string& in, const std::string& preset) {
    if (!preset.empty()) {
        if (preset == "square-grid") return presets::square_grid();
        if (preset == "braced-grid") return presets::braced_grid();
        if (preset == "kagome") return presets::kagome();
        if (preset == "disjoint-bars") return presets::disjoint_bars();
        if (preset == "pinned-ring") return presets::pinned_ring();
        if (preset == "augmented-rows") return presets::augmented_grid_rows();
        throw ValidationError("unknown crystal preset: " + preset);
    }
    if (in.empty()) throw ValidationError("need --in or --preset");
    return load_crystal(in);
}

MultigridSpec multigrid_input(const std::string& in, const std::string& preset,
                              double window) {
    if (!preset.empty()) {
        if (preset == "square") return presets::square_2grid(window);
        if (preset == "rhombille") return presets::rhombille_3grid(window);
        if (preset == "penrose") return presets::penrose_pentagrid(window);
        if (preset == "ammann-beenker") return presets::ammann_beenker_tetragrid(window);
        throw ValidationError("unknown multigrid preset: " + preset);
    }
    if (in.empty()) throw ValidationError("need --in or --preset");
    MultigridSpec spec = load_multigrid_spec(in);
    if (window > 0.0) spec.window = window;
    return spec;
}

std::string out_format(const std::string& path, const std::string& requested) {
    if (!requested.empty()) return requested;
    auto dotpos = path.rfind('.');
    if (dotpos != std::string::npos) {
        std::string ext = path.substr(dotpos + 1);
        if (ext == "csv" || ext == "svg" || ext == "json") return ext;
    }
    return "json";
}

void write_figure(const std::string& path, const std::string& format,
                  const LineFigure& figure, const std::string& kind) {
    if (format == "csv") {
        emit_figure_csv(path, figure, kind);
    } else if (format == "svg") {
        emit_svg(path, figure_to_svg(figure, 1.2));
    } else {
        save_figure(path, figure, kind);
    }
}

double resolve_tol(const CrystalFramework& c, double tol_flag) {
    return tol_flag > 0.0 ? tol_flag : default_symbol_tol(c);
}

int run(int argc, char** argv) {
    CLI::App app{"zero-mode spectra for periodic and multigrid quasicrystal frameworks"};
    app.require_subcommand(1);

    std::string in, out, preset, format, basis_text, b_text, lambda_text;
    double tol = -1.0, window = -1.0, truncation = 10.0, gamma1 = 0.0, eps = 0.1;
    std::string gamma_text;
    int resolution = 100, dbound = 12, m_max = 16, threads = 0;
    int family = 0;
    long long line_index = 0, pair_to = 0;
    int modulated = 0;
    bool reduced = false, check = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--in", in, "input file");
        cmd->add_option("--out", out, "output file");
        cmd->add_option("--format", format, "csv|svg|json")
            ->check(CLI::IsMember({"csv", "svg", "json"}));
        cmd->add_option("--tol", tol, "rank-drop tolerance");
        cmd->add_option("--window", window, "window size");
    };

    auto* crystal = app.add_subcommand("crystal", "periodic framework spectra");
    auto* cscan = crystal->add_subcommand("scan", "sample sigma_min over the torus");
    add_common(cscan);
    cscan->add_option("--preset", preset, "fixture name");
    cscan->add_option("--resolution", resolution, "grid resolution R");
    cscan->add_option("--threads", threads, "scan thread cap");

    auto* clines = crystal->add_subcommand("lines", "detect spectral lines");
    add_common(clines);
    clines->add_option("--preset", preset, "fixture name");
    clines->add_option("--resolution", resolution, "grid resolution R");
    clines->add_option("--denominator-bound", dbound, "rational direction bound");
    clines->add_option("--threads", threads, "scan thread cap");

    auto* cloc = crystal->add_subcommand("localise", "extract a band-localised flex");
    add_common(cloc);
    cloc->add_option("--preset", preset, "fixture name");
    cloc->add_option("--gamma1", gamma1, "phase of the vertical spectral line")
        ->required();
    cloc->add_option("--m-max", m_max, "band width search limit");

    auto* cifm = crystal->add_subcommand("ifm", "extract a phase-periodic flex");
    add_common(cifm);
    cifm->add_option("--preset", preset, "fixture name");
    cifm->add_option("--gamma", gamma_text, "wave vector g1,g2")->required();

    auto* mg = app.add_subcommand("multigrid", "multigrid tilings and flexes");
    auto* mgen = mg->add_subcommand("generate", "dualize a regular multigrid");
    add_common(mgen);
    mgen->add_option("--preset", preset, "square|rhombille|penrose|ammann-beenker");
    mgen->add_flag("--check", check, "run the regularity check first");

    auto* mrib = mg->add_subcommand("ribbons", "ribbon figure of a tiling");
    add_common(mrib);

    auto* mflex = mg->add_subcommand("flex", "shear / pair / modulated ribbon flexes");
    add_common(mflex);
    mflex->add_option("--family", family, "grid family")->required();
    mflex->add_option("--line", line_index, "grid line index");
    auto* pair_opt =
        mflex->add_option("--pair-to", pair_to, "second line index (pair slippage)");
    mflex->add_option("--modulated", modulated, "band width N for the modulated flex");
    mflex->add_option("--lambda", lambda_text, "unimodular phase re,im");
    mflex->add_option("--b", b_text, "velocity bx,by (default: rotated edge)");

    auto* sp = app.add_subcommand("spectra", "slippage and limit spectra");
    auto* sslip = sp->add_subcommand("slippage", "slippage spectrum figure");
    add_common(sslip);
    sslip->add_option("--basis", basis_text, "reference basis a1x,a1y,a2x,a2y");

    auto* slim = sp->add_subcommand("limit", "limit spectrum figure");
    add_common(slim);
    slim->add_option("--basis", basis_text, "reference basis a1x,a1y,a2x,a2y");

    auto* scomp = sp->add_subcommand("compare", "clipped Hausdorff figure distance");
    scomp->add_option("--a", in, "first figure")->required();
    scomp->add_option("--b", b_text, "second figure")->required();
    scomp->add_option("--clip", truncation, "clip half-size N");

    auto* sw = sp->add_subcommand("witness", "periodic slippage witness for a family");
    add_common(sw);
    sw->add_option("--family", family, "grid family")->required();
    sw->add_option("--eps", eps, "closeness epsilon");

    auto* render = app.add_subcommand("render", "render tilings and figures to SVG");
    add_common(render);
    render->add_option("--truncation", truncation, "segment truncation T");
    render->add_flag("--reduced", reduced, "render the reduced figure in [-1/2,1/2)^2");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    auto require_out = [&]() {
        if (out.empty()) throw ValidationError("need --out");
    };

    if (cscan->parsed()) {
        CrystalFramework c = crystal_input(in, preset);
        double t = resolve_tol(c, tol);
        if (resolution >= 150) std::cerr << "scanning " << resolution << "x" << resolution
                                         << " grid...\n";
        SpectrumScan scan = scan_spectrum(c, resolution, t, threads);
        std::cout << "below-tol samples: " << scan.below_tol_count() << " / "
                  << resolution * resolution << " (tol " << t << ")\n";
        std::cout << "full-spectrum flag: " << (scan.full_spectrum() ? "true" : "false")
                  << "\n";
        if (!out.empty()) emit_scan_csv(out, scan);
    } else if (clines->parsed()) {
        CrystalFramework c = crystal_input(in, preset);
        double t = resolve_tol(c, tol);
        SpectrumScan scan = scan_spectrum(c, resolution, t, threads);
        SpectralLineSet lines = detect_spectral_lines(c, scan, dbound);
        std::cout << "lines: " << lines.lines.size() << ", rum dimension "
                  << lines.rum_dimension << ", clusters " << lines.cluster_count << "\n";
        for (const auto& l : lines.lines) {
            std::cout << "  direction (" << l.dir_x << "," << l.dir_y << ") offset "
                      << l.offset << " support " << l.grid_support << "\n";
        }
        if (!out.empty()) write_figure(out, out_format(out, format), lines.figure, "reciprocal");
    } else if (cloc->parsed()) {
        CrystalFramework c = crystal_input(in, preset);
        double t = resolve_tol(c, tol);
        BandFlex flex = extract_band_flex(c, gamma1, m_max, t);
        double res = flex_residual_max(flex.window.framework(), flex.field);
        std::cout << "band flex found: m = " << flex.m_used << ", residual " << res
                  << ", overlap set size " << flex.overlap.size() << "\n";
        require_out();
        const auto& r = flex.window.range();
        save_field(out, flex.field,
                   "crystal-band:gamma1=" + std::to_string(gamma1) + ";range=" +
                       std::to_string(r.i0) + "," + std::to_string(r.i1) + "," +
                       std::to_string(r.j0) + "," + std::to_string(r.j1));
    } else if (cifm->parsed()) {
        CrystalFramework c = crystal_input(in, preset);
        double t = resolve_tol(c, tol);
        auto g = parse_numbers(gamma_text, 2, "--gamma");
        int h = window > 0.0 ? static_cast<int>(window) : 4;
        RealizedWindow w = realize_window(c, {-h, h, -h, h});
        VelocityField u = extract_ifm(w, g[0], g[1], t);
        std::cout << "ifm residual: " << flex_residual_max(w.framework(), u) << "\n";
        require_out();
        save_field(out, u, "crystal-ifm:gamma=" + gamma_text + ";halfwidth=" +
                               std::to_string(h));
    } else if (mgen->parsed()) {
        MultigridSpec spec = multigrid_input(in, preset, window > 0 ? window : 10.0);
        if (check) {
            RegularityReport rep = check_regularity(spec);
            std::cout << "regularity: " << (rep.regular ? "regular" : "SINGULAR") << ", "
                      << rep.intersections << " intersections, min gap " << rep.min_gap
                      << "\n";
            if (!rep.regular) throw ValidationError("singular multigrid spec");
        }
        Tiling t = dualize(spec);
        std::cout << "tiles: " << t.tiles().size() << ", vertices: "
                  << t.vertex_pos().size() << "\n";
        require_out();
        if (out_format(out, format) == "svg") {
            emit_svg(out, tiling_to_svg(t));
        } else {
            save_tiling(out, t);
        }
    } else if (mrib->parsed()) {
        if (in.empty()) throw ValidationError("need --in");
        Tiling t = load_tiling(in);
        RibbonFigure rf = ribbon_figure(t);
        for (const auto& fit : rf.fits) {
            std::cout << "family " << fit.family << ": angle " << fit.analytic_angle
                      << " rad (median fit " << fit.median_fitted_angle << ", "
                      << fit.ribbons_used << " ribbons)\n";
        }
        for (const auto& w : rf.warnings) std::cerr << "warning: " << w << "\n";
        if (!out.empty()) write_figure(out, out_format(out, format), rf.figure, "ambient");
    } else if (mflex->parsed()) {
        if (in.empty()) throw ValidationError("need --in");
        Tiling t = load_tiling(in);
        TilingFramework tf = framework_of(t);
        Vec2 edge = tf.spec.families.at(static_cast<std::size_t>(family)).edge;
        Vec2 b = b_text.empty()
                     ? rot90(normalized(edge))
                     : Vec2{parse_numbers(b_text, 2, "--b")[0],
                            parse_numbers(b_text, 2, "--b")[1]};
        double maxedge = 0.0;
        for (const auto& f : tf.spec.families) maxedge = std::max(maxedge, norm(f.edge));
        VelocityField u;
        if (modulated > 0) {
            std::complex<double> lambda{1.0, 0.0};
            if (!lambda_text.empty()) {
                auto lv = parse_numbers(lambda_text, 2, "--lambda");
                lambda = {lv[0], lv[1]};
            }
            ModulatedRibbonFlex mf = modulated_ribbon_flex(tf, family, modulated, lambda, b);
            std::cout << "deviation fraction vs banded modulation: "
                      << mf.deviation_fraction << " (C = " << mf.deviation_constant
                      << ")\n";
            u = std::move(mf.field);
        } else if (pair_opt->count() > 0) {
            u = pair_slippage_flex(tf, family, line_index, pair_to, b);
        } else {
            u = shear_flex(tf, family, line_index, b);
        }
        std::cout << "interior residual: "
                  << flex_residual_max(tf.fw, u, 2.0 * maxedge) << "\n";
        require_out();
        save_field(out, u, "tiling:" + in);
    } else if (sslip->parsed() || slim->parsed()) {
        if (in.empty()) throw ValidationError("need --in");
        Basis2 basis = Basis2::standard();
        if (!basis_text.empty()) {
            auto v = parse_numbers(basis_text, 4, "--basis");
            basis = Basis2({v[0], v[1]}, {v[2], v[3]});
        }
        DocumentKind kind = probe_document(in);
        SpectrumFigure fig = [&] {
            if (kind == DocumentKind::Tiling) {
                Tiling t = load_tiling(in);
                return slim->parsed() ? limit_spectrum_multigrid(t, basis)
                                      : slippage_spectrum(t, basis);
            }
            if (slim->parsed()) {
                throw ValidationError(
                    "limit spectrum only computed for multigrid frameworks");
            }
            if (kind == DocumentKind::Figure) {
                return slippage_spectrum(load_figure(in), basis);
            }
            throw ValidationError("slippage input must be a tiling or an ambient figure");
        }();
        ReducedFigure red = reduce_figure(fig.figure, 4.0);
        std::cout << (slim->parsed() ? "limit" : "slippage") << " spectrum: "
                  << fig.figure.size() << " reciprocal lines; reduced form "
                  << (red.dense ? "dense" : "finite") << "\n";
        if (!out.empty()) {
            write_figure(out, out_format(out, format), fig.figure,
                         slim->parsed() ? "limit" : "slippage");
        }
    } else if (scomp->parsed()) {
        LineFigure f1 = load_figure(in);
        LineFigure f2 = load_figure(b_text);
        std::printf("%.12g\n", figure_distance_clipped(f1, f2, truncation));
    } else if (sw->parsed()) {
        if (in.empty()) throw ValidationError("need --in");
        Tiling t = load_tiling(in);
        TilingFramework tf = framework_of(t);
        SlippageWitness wit = verify_periodic_slippage(tf, family, eps);
        std::cout << "witness: N = " << wit.band_width << ", gap layers "
                  << wit.gap_layers << ", deviation fraction " << wit.deviation_fraction
                  << ", mostly-close " << (wit.stats.close ? "true" : "false")
                  << " (worst window fraction " << wit.stats.worst_fraction << ")\n";
        if (!wit.stats.close) throw SpectrumError("slippage witness failed closeness");
        if (!out.empty()) save_field(out, wit.field, "tiling:" + in);
    } else if (render->parsed()) {
        if (in.empty()) throw ValidationError("need --in");
        require_out();
        DocumentKind kind = probe_document(in);
        if (kind == DocumentKind::Tiling) {
            emit_svg(out, tiling_to_svg(load_tiling(in)));
        } else if (kind == DocumentKind::Figure) {
            LineFigure f = load_figure(in);
            if (reduced) {
                emit_svg(out, reduced_figure_to_svg(reduce_figure(f, truncation)));
            } else {
                emit_svg(out, figure_to_svg(f, 1.2));
            }
        } else {
            throw ValidationError("render input must be a tiling or a figure");
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const rumkit::SpectrumError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const rumkit::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const rumkit::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
