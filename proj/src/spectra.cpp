#include "rumkit/spectra.hpp"

#include <algorithm>
#include <map>

namespace rumkit {

SpectrumFigure slippage_spectrum(const LineFigure& ambient, const Basis2& a) {
    SpectrumFigure out;
    out.kind = SpectrumKind::Slippage;
    out.ambient_source = ambient;
    out.basis = a;
    for (const auto& h : ambient.lines()) out.figure.insert(reciprocal_line(h, a));
    return out;
}

SpectrumFigure slippage_spectrum(const Tiling& t, const Basis2& a) {
    // For multigrid frameworks the periodic slippage figure equals the ribbon figure.
    return slippage_spectrum(ribbon_figure(t).figure, a);
}

SpectrumFigure limit_spectrum_multigrid(const Tiling& t, const Basis2& a) {
    SpectrumFigure out = slippage_spectrum(t, a);
    out.kind = SpectrumKind::Limit;
    return out;
}

std::size_t ReducedFigure::segment_count() const {
    std::size_t n = 0;
    for (const auto& l : lines) n += l.segments.size();
    return n;
}

ReducedFigure reduce_figure(const LineFigure& figure, double truncation,
                            long long max_denominator) {
    ReducedFigure out;
    out.truncation = truncation;
    for (const auto& line : figure.lines()) {
        ReducedFigure::LineReduction red{line, false, {}};
        red.rational = rational_direction(line, max_denominator).has_value();
        red.segments = reduce_line_segments(line, truncation);
        if (!red.rational) out.dense = true;
        out.lines.push_back(std::move(red));
    }
    return out;
}

namespace {

long long fdiv_ll(long long a, long long m) {
    long long q = a / m, r = a % m;
    return (r != 0 && ((r < 0) != (m < 0))) ? q - 1 : q;
}

// Smallest number of vertex layers that must be trimmed from each side of a
// K_j block so that the trimmed block stays inside the geometric band of the
// matched field. Measured on the actual vertex set with a probe block width.
int measure_gap_layers(const TilingFramework& tf, int family) {
    const int n_probe = 16;
    BandedPhaseField wide = matched_band_field(tf, family, n_probe, {1.0, 0.0});
    long long worst = 0;
    for (std::size_t i = 0; i < tf.fw.joint_count(); ++i) {
        long long kj = tf.joint_k[i][static_cast<std::size_t>(family)];
        long long block = fdiv_ll(kj, n_probe);
        long long band = wide.band_index(tf.fw.joint(i));
        if (band != block) {
            long long r = kj - block * n_probe;
            worst = std::max(worst, std::min(r + 1, static_cast<long long>(n_probe) - r));
        }
    }
    return static_cast<int>(worst);
}

} // namespace

SlippageWitness verify_periodic_slippage(const TilingFramework& tf, int family,
                                         double eps) {
    if (!(eps > 0.0)) throw ValidationError("eps must be positive");
    if (family < 0 || family >= tf.spec.family_count()) {
        throw ValidationError("family index out of range");
    }
    const Vec2 v = tf.spec.families[static_cast<std::size_t>(family)].edge;
    const Vec2 b = rot90(normalized(v));

    const int g = measure_gap_layers(tf, family);
    // band width in ribbon-index units, with headroom so the per-window
    // deviating fraction 2g/N clears eps
    const int N = std::max(2, static_cast<int>(std::ceil(2.0 * g / (0.7 * eps))) + 1);

    long long kmin = std::numeric_limits<long long>::max();
    long long kmax = std::numeric_limits<long long>::min();
    for (std::size_t i = 0; i < tf.fw.joint_count(); ++i) {
        long long kj = tf.joint_k[i][static_cast<std::size_t>(family)];
        kmin = std::min(kmin, kj);
        kmax = std::max(kmax, kj);
    }
    if (static_cast<double>(kmax - kmin + 1) < 2.2 * N) {
        throw ValidationError("window too small for the requested closeness");
    }

    SlippageWitness out{VelocityField(tf.fw.joint_count()),
                        b,
                        N,
                        g,
                        0.0,
                        {},
                        matched_band_field(tf, family, N, {1.0, 0.0})};
    // union of pair-slippage flexes over the blocks [kN+1+g, (k+1)N-g]
    std::size_t covered = 0;
    for (std::size_t i = 0; i < tf.fw.joint_count(); ++i) {
        long long kj = tf.joint_k[i][static_cast<std::size_t>(family)];
        long long r = ((kj % N) + N) % N;
        bool inside = (r == 0) ? (g == 0) : (r >= 1 + g && r <= N - g);
        if (inside) {
            out.field[i] = {b.x, b.y};
            ++covered;
        }
    }
    out.deviation_fraction =
        1.0 - static_cast<double>(covered) / static_cast<double>(tf.fw.joint_count());

    // one geometric band spans |t2| ambient units
    double n_box = norm(out.band.basis().a2());
    double max_box = 0.45 * std::min(tf.fw.window().width(), tf.fw.window().height());
    if (n_box > max_box) {
        throw ValidationError("window too small for the requested closeness");
    }
    out.stats = mostly_epsilon_close(tf.fw, out.field, translation_field(tf.fw, b), eps,
                                     n_box);
    return out;
}

GenericSlippageResult find_band_slippage_flex(const FiniteFramework& fw,
                                              const ProjLine& h, double max_width) {
    // cluster bar directions into line classes
    std::vector<ProjLine> classes;
    std::vector<int> bar_class(fw.bars().size(), -1);
    for (std::size_t e = 0; e < fw.bars().size(); ++e) {
        const auto& bar = fw.bars()[e];
        ProjLine dir(fw.joint(bar.j) - fw.joint(bar.i));
        int found = -1;
        for (std::size_t c = 0; c < classes.size(); ++c) {
            if (line_angle_distance(classes[c], dir) <= 1e-9) {
                found = static_cast<int>(c);
                break;
            }
        }
        if (found < 0) {
            classes.push_back(dir);
            found = static_cast<int>(classes.size()) - 1;
        }
        bar_class[e] = found;
    }

    const Vec2 nh = rot90(h.direction());
    const double boundary_margin = 1.5 * fw.max_bar_length();
    GenericSlippageResult fail;
    fail.reason = "no translational-type band flexes";

    for (std::size_t c = 0; c < classes.size(); ++c) {
        std::vector<int> parent(fw.joint_count());
        for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
        std::vector<int> rank(fw.joint_count(), 0);
        auto find = [&](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        auto unite = [&](int a, int bb) {
            a = find(a);
            bb = find(bb);
            if (a == bb) return;
            if (rank[a] < rank[bb]) std::swap(a, bb);
            parent[bb] = a;
            if (rank[a] == rank[bb]) ++rank[a];
        };
        for (std::size_t e = 0; e < fw.bars().size(); ++e) {
            if (bar_class[e] == static_cast<int>(c)) continue;
            unite(fw.bars()[e].i, fw.bars()[e].j);
        }

        struct Extent {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -std::numeric_limits<double>::infinity();
            bool clipped = false;
            std::size_t size = 0;
        };
        std::map<int, Extent> comps;
        for (std::size_t i = 0; i < fw.joint_count(); ++i) {
            Extent& ex = comps[find(static_cast<int>(i))];
            double tau = dot(nh, fw.joint(i));
            ex.lo = std::min(ex.lo, tau);
            ex.hi = std::max(ex.hi, tau);
            ++ex.size;
            // components reaching the transverse window edges may continue outside
            Vec2 p = fw.joint(i);
            double top = fw.window().ymax, bot = fw.window().ymin;
            double left = fw.window().xmin, right = fw.window().xmax;
            double edge_dist = std::min(std::min(p.x - left, right - p.x),
                                        std::min(p.y - bot, top - p.y));
            if (edge_dist < boundary_margin) ex.clipped = true;
        }
        for (const auto& [root, ex] : comps) {
            if (ex.size < 2 || ex.clipped) continue;
            if (ex.hi - ex.lo > max_width) continue;
            Vec2 b = rot90(classes[c].direction());
            VelocityField u(fw.joint_count());
            for (std::size_t i = 0; i < fw.joint_count(); ++i) {
                if (find(static_cast<int>(i)) == root) u[i] = {b.x, b.y};
            }
            GenericSlippageResult ok;
            ok.found = true;
            ok.field = std::move(u);
            ok.transverse_extent = ex.hi - ex.lo;
            return ok;
        }
    }
    return fail;
}

namespace {

// distance from a point to the clipped segment of a line through the origin
double distance_to_clipped_line(Vec2 p, const ProjLine& line, double n_clip) {
    Vec2 d = line.direction();
    double tmax = n_clip / std::max(std::abs(d.x), std::abs(d.y));
    double t = std::clamp(dot(p, d), -tmax, tmax);
    return distance(p, t * d);
}

double one_sided(const LineFigure& from, const LineFigure& to, double n_clip) {
    double worst = 0.0;
    for (const auto& line : from.lines()) {
        Vec2 d = line.direction();
        double tmax = n_clip / std::max(std::abs(d.x), std::abs(d.y));
        const int steps = 2000; // stride N/1000 over [-tmax, tmax]
        for (int s = 0; s <= steps; ++s) {
            Vec2 p = (-tmax + 2.0 * tmax * s / steps) * d;
            double best = std::numeric_limits<double>::infinity();
            for (const auto& other : to.lines()) {
                best = std::min(best, distance_to_clipped_line(p, other, n_clip));
            }
            worst = std::max(worst, best);
        }
    }
    return worst;
}

} // namespace

double figure_distance_clipped(const LineFigure& f1, const LineFigure& f2, double n_clip) {
    if (f1.empty() || f2.empty()) throw ValidationError("figure distance needs nonempty figures");
    if (!(n_clip > 0.0)) throw ValidationError("clip size must be positive");
    return std::max(one_sided(f1, f2, n_clip), one_sided(f2, f1, n_clip));
}

} // namespace rumkit
