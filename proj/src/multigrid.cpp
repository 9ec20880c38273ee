#include "rumkit/multigrid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace rumkit {

namespace {

std::complex<double> int_pow(std::complex<double> w, long long k) {
    return std::polar(1.0, std::arg(w) * static_cast<double>(k));
}

long long fdiv(long long a, long long b) {
    long long q = a / b, r = a % b;
    return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

Vec2 line_pair_intersection(const GridFamily& fa, long long k, const GridFamily& fb,
                            long long m) {
    double ca = static_cast<double>(k) + fa.offset;
    double cb = static_cast<double>(m) + fb.offset;
    double det = cross(fa.normal, fb.normal);
    return {(ca * fb.normal.y - cb * fa.normal.y) / det,
            (cb * fa.normal.x - ca * fb.normal.x) / det};
}

// 2x2 matrix M = sum_l v_l n_l^T mapping mesh space to tiling space.
struct Mat2 {
    double a = 0, b = 0, c = 0, d = 0;
    Vec2 apply(Vec2 x) const { return {a * x.x + b * x.y, c * x.x + d * x.y}; }
    Vec2 solve_transposed(Vec2 rhs) const {
        // solve M^T y = rhs
        double det = a * d - b * c;
        if (std::abs(det) < 1e-12) throw ValidationError("degenerate multigrid geometry");
        return {(d * rhs.x - c * rhs.y) / det, (-b * rhs.x + a * rhs.y) / det};
    }
};

Mat2 mesh_matrix(const MultigridSpec& spec) {
    Mat2 m;
    for (const auto& f : spec.families) {
        m.a += f.edge.x * f.normal.x;
        m.b += f.edge.x * f.normal.y;
        m.c += f.edge.y * f.normal.x;
        m.d += f.edge.y * f.normal.y;
    }
    return m;
}

} // namespace

void MultigridSpec::validate() const {
    if (families.size() < 2) throw ValidationError("multigrid needs at least 2 families");
    if (!(window > 0.0)) throw ValidationError("window radius must be positive");
    for (std::size_t j = 0; j < families.size(); ++j) {
        const auto& f = families[j];
        if (std::abs(norm(f.normal) - 1.0) > 1e-9) {
            throw ValidationError("grid normal must be a unit vector");
        }
        if (norm(f.edge) <= 0.0) throw ValidationError("tile edge vector must be nonzero");
        for (std::size_t l = j + 1; l < families.size(); ++l) {
            if (std::abs(cross(f.normal, families[l].normal)) <= 1e-9) {
                throw ValidationError("parallel grid families");
            }
        }
    }
}

RegularityReport check_regularity(const MultigridSpec& spec) {
    spec.validate();
    const double W = spec.window;
    std::vector<Vec2> points;
    const int r = spec.family_count();
    for (int j = 0; j < r; ++j) {
        for (int l = j + 1; l < r; ++l) {
            long long ka = static_cast<long long>(std::floor(-W - spec.families[j].offset));
            long long kb = static_cast<long long>(std::ceil(W - spec.families[j].offset));
            long long ma = static_cast<long long>(std::floor(-W - spec.families[l].offset));
            long long mb = static_cast<long long>(std::ceil(W - spec.families[l].offset));
            for (long long k = ka; k <= kb; ++k) {
                for (long long m = ma; m <= mb; ++m) {
                    Vec2 x = line_pair_intersection(spec.families[j], k, spec.families[l], m);
                    if (norm(x) <= W) points.push_back(x);
                }
            }
        }
    }
    RegularityReport report;
    report.intersections = points.size();
    report.min_gap = std::numeric_limits<double>::infinity();

    // bucket at a scale comfortably above the flag threshold
    const double cell = 1e-2;
    std::map<std::pair<long long, long long>, std::vector<std::size_t>> buckets;
    auto cell_of = [&](Vec2 p) {
        return std::make_pair(static_cast<long long>(std::floor(p.x / cell)),
                              static_cast<long long>(std::floor(p.y / cell)));
    };
    for (std::size_t i = 0; i < points.size(); ++i) buckets[cell_of(points[i])].push_back(i);
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto [cx, cy] = cell_of(points[i]);
        for (long long dx = -1; dx <= 1; ++dx) {
            for (long long dy = -1; dy <= 1; ++dy) {
                auto it = buckets.find({cx + dx, cy + dy});
                if (it == buckets.end()) continue;
                for (std::size_t q : it->second) {
                    if (q <= i) continue;
                    double d = distance(points[i], points[q]);
                    report.min_gap = std::min(report.min_gap, d);
                    if (d < 1e-7) report.flagged.push_back(points[i]);
                }
            }
        }
    }
    report.regular = report.flagged.empty();
    return report;
}

Tiling::Tiling(MultigridSpec spec, std::vector<std::vector<int>> vertex_k,
               std::vector<Vec2> vertex_pos, std::vector<TileRecord> tiles)
    : spec_(std::move(spec)), vertex_k_(std::move(vertex_k)),
      vertex_pos_(std::move(vertex_pos)), tiles_(std::move(tiles)) {
    if (vertex_k_.size() != vertex_pos_.size()) {
        throw ValidationError("vertex tables size mismatch");
    }
}

Vec2 Tiling::tile_center(const TileRecord& t) const {
    Vec2 c{0, 0};
    for (int v : t.verts) c = c + vertex_pos_[static_cast<std::size_t>(v)];
    return 0.25 * c;
}

void Tiling::validate(double tol) const {
    spec_.validate();
    const int r = spec_.family_count();
    for (std::size_t i = 0; i < vertex_k_.size(); ++i) {
        if (static_cast<int>(vertex_k_[i].size()) != r) {
            throw ValidationError("vertex " + std::to_string(i) + " has wrong K length");
        }
    }
    for (std::size_t t = 0; t < tiles_.size(); ++t) {
        const auto& tile = tiles_[t];
        if (tile.fam_a < 0 || tile.fam_b < 0 || tile.fam_a >= r || tile.fam_b >= r ||
            tile.fam_a >= tile.fam_b) {
            throw ValidationError("tile " + std::to_string(t) + " has bad families");
        }
        for (int v : tile.verts) {
            if (v < 0 || v >= static_cast<int>(vertex_pos_.size())) {
                throw ValidationError("tile " + std::to_string(t) + " vertex out of range");
            }
        }
        Vec2 va = spec_.families[tile.fam_a].edge;
        Vec2 vb = spec_.families[tile.fam_b].edge;
        const auto& p0 = vertex_pos_[tile.verts[0]];
        const auto& p1 = vertex_pos_[tile.verts[1]];
        const auto& p2 = vertex_pos_[tile.verts[2]];
        const auto& p3 = vertex_pos_[tile.verts[3]];
        if (distance(p1 - p0, va) > tol || distance(p2 - p1, vb) > tol ||
            distance(p2 - p3, va) > tol || distance(p3 - p0, vb) > tol) {
            throw ValidationError("tile " + std::to_string(t) + " is not a parallelogram");
        }
    }
    for (std::size_t i = 0; i < vertex_k_.size(); ++i) {
        Vec2 p{0, 0};
        for (int j = 0; j < r; ++j) {
            p = p + static_cast<double>(vertex_k_[i][j]) * spec_.families[j].edge;
        }
        if (distance(p, vertex_pos_[i]) > tol) {
            throw ValidationError("vertex " + std::to_string(i) +
                                  " position does not match its K coordinates");
        }
    }
}

Tiling dualize(const MultigridSpec& spec) {
    spec.validate();
    const double W = spec.window;
    const int r = spec.family_count();

    std::map<std::vector<int>, int> vertex_ids;
    std::vector<std::vector<int>> vertex_k;
    std::vector<Vec2> vertex_pos;
    std::vector<TileRecord> tiles;

    auto vertex_of = [&](const std::vector<int>& k) {
        auto it = vertex_ids.find(k);
        if (it != vertex_ids.end()) return it->second;
        int id = static_cast<int>(vertex_k.size());
        vertex_ids.emplace(k, id);
        vertex_k.push_back(k);
        Vec2 p{0, 0};
        for (int j = 0; j < r; ++j) {
            p = p + static_cast<double>(k[j]) * spec.families[j].edge;
        }
        vertex_pos.push_back(p);
        return id;
    };

    for (int j = 0; j < r; ++j) {
        for (int l = j + 1; l < r; ++l) {
            long long ka = static_cast<long long>(std::floor(-W - spec.families[j].offset));
            long long kb = static_cast<long long>(std::ceil(W - spec.families[j].offset));
            long long ma = static_cast<long long>(std::floor(-W - spec.families[l].offset));
            long long mb = static_cast<long long>(std::ceil(W - spec.families[l].offset));
            for (long long k = ka; k <= kb; ++k) {
                for (long long m = ma; m <= mb; ++m) {
                    Vec2 x = line_pair_intersection(spec.families[j], k, spec.families[l], m);
                    if (norm(x) > W) continue;
                    std::vector<int> base(static_cast<std::size_t>(r), 0);
                    bool singular = false;
                    for (int i = 0; i < r && !singular; ++i) {
                        if (i == j || i == l) continue;
                        double s = dot(x, spec.families[i].normal) - spec.families[i].offset;
                        if (std::abs(s - std::round(s)) < 1e-9) {
                            singular = true;
                            break;
                        }
                        base[i] = static_cast<int>(std::ceil(s));
                    }
                    if (singular) {
                        throw ValidationError(
                            "singular multigrid: an intersection meets a third line");
                    }
                    base[j] = static_cast<int>(k);
                    base[l] = static_cast<int>(m);
                    TileRecord tile;
                    tile.fam_a = j;
                    tile.fam_b = l;
                    tile.idx_a = k;
                    tile.idx_b = m;
                    tile.intersection = x;
                    std::vector<int> kv = base;
                    tile.verts[0] = vertex_of(kv);
                    kv[j] = base[j] + 1;
                    tile.verts[1] = vertex_of(kv);
                    kv[l] = base[l] + 1;
                    tile.verts[2] = vertex_of(kv);
                    kv[j] = base[j];
                    tile.verts[3] = vertex_of(kv);
                    tiles.push_back(tile);
                }
            }
        }
    }
    return Tiling(spec, std::move(vertex_k), std::move(vertex_pos), std::move(tiles));
}

Vec2 grid_intersection(const MultigridSpec& spec, int fam_a, long long idx_a,
                       int fam_b, long long idx_b) {
    if (fam_a < 0 || fam_b < 0 || fam_a >= spec.family_count() ||
        fam_b >= spec.family_count() || fam_a == fam_b) {
        throw ValidationError("bad family pair");
    }
    return line_pair_intersection(spec.families[static_cast<std::size_t>(fam_a)], idx_a,
                                  spec.families[static_cast<std::size_t>(fam_b)], idx_b);
}

TilingFramework framework_of(const Tiling& t) {
    std::vector<Vec2> joints = t.vertex_pos();
    std::set<std::pair<int, int>> edge_set;
    for (const auto& tile : t.tiles()) {
        for (int e = 0; e < 4; ++e) {
            int a = tile.verts[e], b = tile.verts[(e + 1) % 4];
            edge_set.insert({std::min(a, b), std::max(a, b)});
        }
    }
    std::vector<Bar> bars;
    std::vector<int> bar_family;
    bars.reserve(edge_set.size());
    for (const auto& [a, b] : edge_set) {
        bars.push_back({a, b});
        const auto& ka = t.vertex_k()[static_cast<std::size_t>(a)];
        const auto& kb = t.vertex_k()[static_cast<std::size_t>(b)];
        int fam = -1;
        for (std::size_t j = 0; j < ka.size(); ++j) {
            if (ka[j] != kb[j]) {
                fam = static_cast<int>(j);
                break;
            }
        }
        bar_family.push_back(fam);
    }
    return TilingFramework{FiniteFramework(std::move(joints), std::move(bars)),
                           t.vertex_k(), std::move(bar_family), t.spec()};
}

namespace {

ProjLine tls_line(const std::vector<Vec2>& pts) {
    Vec2 mean{0, 0};
    for (const auto& p : pts) mean = mean + p;
    mean = (1.0 / static_cast<double>(pts.size())) * mean;
    double sxx = 0, sxy = 0, syy = 0;
    for (const auto& p : pts) {
        Vec2 d = p - mean;
        sxx += d.x * d.x;
        sxy += d.x * d.y;
        syy += d.y * d.y;
    }
    double theta = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
    return ProjLine::from_angle(theta);
}

std::map<std::pair<int, long long>, std::vector<int>> tiles_by_line(const Tiling& t) {
    std::map<std::pair<int, long long>, std::vector<int>> out;
    for (std::size_t i = 0; i < t.tiles().size(); ++i) {
        const auto& tile = t.tiles()[i];
        out[{tile.fam_a, tile.idx_a}].push_back(static_cast<int>(i));
        out[{tile.fam_b, tile.idx_b}].push_back(static_cast<int>(i));
    }
    return out;
}

Ribbon build_ribbon(const Tiling& t, int family, long long line_index,
                    const std::vector<int>& tile_ids) {
    const Vec2 d = rot90(t.spec().families[static_cast<std::size_t>(family)].normal);
    std::vector<std::pair<double, int>> order;
    order.reserve(tile_ids.size());
    for (int id : tile_ids) {
        order.emplace_back(dot(t.tiles()[static_cast<std::size_t>(id)].intersection, d), id);
    }
    std::sort(order.begin(), order.end());
    Ribbon rib;
    rib.family = family;
    rib.line_index = line_index;
    std::vector<Vec2> centers;
    centers.reserve(order.size());
    for (const auto& [param, id] : order) {
        rib.tiles.push_back(id);
        centers.push_back(t.tile_center(t.tiles()[static_cast<std::size_t>(id)]));
    }
    rib.fitted = tls_line(centers);
    Vec2 n = rot90(rib.fitted.direction());
    double acc = 0;
    for (const auto& c : centers) acc += dot(c, n);
    rib.transverse_center = acc / static_cast<double>(centers.size());
    return rib;
}

} // namespace

Ribbon extract_ribbon(const Tiling& t, int family, long long line_index) {
    if (family < 0 || family >= t.spec().family_count()) {
        throw ValidationError("family index out of range");
    }
    std::vector<int> ids;
    for (std::size_t i = 0; i < t.tiles().size(); ++i) {
        const auto& tile = t.tiles()[i];
        if ((tile.fam_a == family && tile.idx_a == line_index) ||
            (tile.fam_b == family && tile.idx_b == line_index)) {
            ids.push_back(static_cast<int>(i));
        }
    }
    if (ids.size() < 3) throw ValidationError("window too small");
    return build_ribbon(t, family, line_index, ids);
}

ProjLine analytic_ribbon_direction(const MultigridSpec& spec, int family) {
    const Vec2 d = rot90(spec.families[static_cast<std::size_t>(family)].normal);
    Vec2 dir{0, 0};
    for (int l = 0; l < spec.family_count(); ++l) {
        if (l == family) continue;
        dir = dir + dot(d, spec.families[static_cast<std::size_t>(l)].normal) *
                        spec.families[static_cast<std::size_t>(l)].edge;
    }
    return ProjLine(dir);
}

RibbonFigure ribbon_figure(const Tiling& t) {
    const int r = t.spec().family_count();
    auto by_line = tiles_by_line(t);
    RibbonFigure out;
    for (int j = 0; j < r; ++j) {
        std::vector<std::pair<std::size_t, long long>> sizes; // (tile count, index)
        for (const auto& [key, ids] : by_line) {
            if (key.first == j && ids.size() >= 3) sizes.emplace_back(ids.size(), key.second);
        }
        if (sizes.size() < 3) throw ValidationError("insufficient ribbons in window");
        // fit over long ribbons only; fall back to the longest three
        std::vector<long long> chosen;
        for (const auto& [count, idx] : sizes) {
            if (count >= 20) chosen.push_back(idx);
        }
        if (chosen.size() < 3) {
            std::sort(sizes.rbegin(), sizes.rend());
            chosen.clear();
            for (std::size_t i = 0; i < 3; ++i) chosen.push_back(sizes[i].second);
        }

        ProjLine analytic = analytic_ribbon_direction(t.spec(), j);
        std::vector<double> devs;
        devs.reserve(chosen.size());
        for (long long idx : chosen) {
            Ribbon rib = build_ribbon(t, j, idx, by_line[{j, idx}]);
            double dv = rib.fitted.angle() - analytic.angle();
            while (dv > M_PI / 2) dv -= M_PI;
            while (dv <= -M_PI / 2) dv += M_PI;
            devs.push_back(dv);
        }
        std::sort(devs.begin(), devs.end());
        double median = devs.size() % 2 == 1
                            ? devs[devs.size() / 2]
                            : 0.5 * (devs[devs.size() / 2 - 1] + devs[devs.size() / 2]);
        double mad = 0;
        for (double d : devs) mad = std::max(mad, std::abs(d));

        RibbonFigure::FamilyFit fit;
        fit.family = j;
        fit.analytic_angle = analytic.angle();
        fit.median_fitted_angle = analytic.angle() + median;
        fit.median_abs_deviation = std::abs(median);
        fit.ribbons_used = static_cast<int>(chosen.size());
        out.fits.push_back(fit);
        if (std::abs(median) > 0.5 * M_PI / 180.0) {
            out.warnings.push_back("family " + std::to_string(j) +
                                   ": fitted ribbon direction deviates from the analytic "
                                   "candidate by more than 0.5 degrees");
        }
        out.figure.insert(analytic);
    }
    return out;
}

namespace {

void require_shear_velocity(const MultigridSpec& spec, int family, Vec2 b) {
    if (family < 0 || family >= spec.family_count()) {
        throw ValidationError("family index out of range");
    }
    Vec2 v = spec.families[static_cast<std::size_t>(family)].edge;
    if (std::abs(dot(b, v)) > 1e-12 * std::max(1.0, norm(b) * norm(v))) {
        throw ValidationError("not a first-order shear: velocity not perpendicular "
                              "to the ribbon edge vector");
    }
}

} // namespace

VelocityField shear_flex(const TilingFramework& tf, int family, long long line_index,
                         Vec2 b) {
    require_shear_velocity(tf.spec, family, b);
    VelocityField u(tf.fw.joint_count());
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (tf.joint_k[i][static_cast<std::size_t>(family)] >= line_index + 1) {
            u[i] = {b.x, b.y};
        }
    }
    return u;
}

VelocityField pair_slippage_flex(const TilingFramework& tf, int family, long long k1,
                                 long long k2, Vec2 b) {
    if (k1 >= k2) throw ValidationError("pair slippage needs k1 < k2");
    require_shear_velocity(tf.spec, family, b);
    VelocityField u(tf.fw.joint_count());
    for (std::size_t i = 0; i < u.size(); ++i) {
        long long kj = tf.joint_k[i][static_cast<std::size_t>(family)];
        if (kj >= k1 + 1 && kj <= k2) u[i] = {b.x, b.y};
    }
    return u;
}

BandedPhaseField matched_band_field(const TilingFramework& tf, int family,
                                    int band_width, std::complex<double> lambda) {
    if (band_width < 1) throw ValidationError("band width must be >= 1");
    Mat2 m = mesh_matrix(tf.spec);
    Vec2 w = m.solve_transposed(tf.spec.families[static_cast<std::size_t>(family)].normal);
    const double gamma = tf.spec.families[static_cast<std::size_t>(family)].offset;

    // align the band partition with the K_j blocks
    double emin = std::numeric_limits<double>::infinity(), emax = -emin;
    for (std::size_t i = 0; i < tf.fw.joint_count(); ++i) {
        double dev = dot(tf.fw.joint(i), w) - gamma -
                     static_cast<double>(tf.joint_k[i][static_cast<std::size_t>(family)]);
        emin = std::min(emin, dev);
        emax = std::max(emax, dev);
    }
    // when the transverse wiggle fits strictly inside one layer the blocks can
    // be matched exactly; otherwise centre the wiggle across the boundary
    double sigma0 = (emax - emin < 0.995) ? emin - 0.002 : 0.5 * (emin + emax);
    double w2 = dot(w, w);
    Vec2 t1 = normalized(rot90(w));
    Vec2 t2 = (static_cast<double>(band_width) / w2) * w;
    Vec2 anchor = ((gamma + sigma0) / w2) * w;
    return BandedPhaseField(t1, t2, lambda, anchor);
}

ModulatedRibbonFlex modulated_ribbon_flex(const TilingFramework& tf, int family,
                                          int band_width, std::complex<double> lambda,
                                          Vec2 b) {
    if (band_width < 2) throw ValidationError("modulated flex needs N >= 2");
    require_shear_velocity(tf.spec, family, b);
    if (std::abs(std::abs(lambda) - 1.0) > 1e-12) {
        throw ValidationError("lambda must be unimodular");
    }

    ModulatedRibbonFlex out{VelocityField(tf.fw.joint_count()),
                            matched_band_field(tf, family, band_width, lambda), 0.0, 0.0};
    for (std::size_t i = 0; i < tf.fw.joint_count(); ++i) {
        long long kj = tf.joint_k[i][static_cast<std::size_t>(family)];
        std::complex<double> ph = int_pow(lambda, fdiv(kj, band_width));
        out.field[i] = {ph * b.x, ph * b.y};
    }

    double maxedge = 0.0;
    for (const auto& f : tf.spec.families) maxedge = std::max(maxedge, norm(f.edge));
    const double margin = 2.0 * maxedge;
    std::size_t total = 0, deviating = 0;
    const double tol = 1e-9 * std::max(1.0, norm(b));
    for (std::size_t i = 0; i < tf.fw.joint_count(); ++i) {
        if (!tf.fw.window().contains(tf.fw.joint(i), margin)) continue;
        ++total;
        std::complex<double> phi = out.band.value(tf.fw.joint(i));
        CVec2 expected{phi * b.x, phi * b.y};
        if (cnorm(out.field[i] - expected) > tol) ++deviating;
    }
    if (total > 0) {
        out.deviation_fraction = static_cast<double>(deviating) / static_cast<double>(total);
    }
    out.deviation_constant = out.deviation_fraction * band_width;
    return out;
}

ApproximantReport rational_approximant(const MultigridSpec& spec, int q) {
    if (q < 1) throw ValidationError("approximant order must be >= 1");
    spec.validate();
    ApproximantReport report;
    report.spec = spec;
    const long long bound = 4LL * q;
    for (auto& fam : report.spec.families) {
        double best = -2.0;
        Vec2 best_dir = fam.normal;
        for (long long p1 = -bound; p1 <= bound; ++p1) {
            for (long long p2 = -bound; p2 <= bound; ++p2) {
                if (p1 == 0 && p2 == 0) continue;
                Vec2 v{static_cast<double>(p1), static_cast<double>(p2)};
                double c = dot(fam.normal, v) / norm(v);
                if (c > best) {
                    best = c;
                    best_dir = normalized(v);
                }
            }
        }
        double dev = std::acos(std::clamp(best, -1.0, 1.0));
        report.deviations.push_back(dev);
        report.max_deviation = std::max(report.max_deviation, dev);
        fam.normal = best_dir;
    }
    return report;
}

} // namespace rumkit
