#include "rumkit/framework.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace rumkit {

namespace {

// Uniform bucket grid for neighbor queries over a fixed point set.
class BucketGrid {
public:
    BucketGrid(const std::vector<Vec2>& pts, double cell) : pts_(pts), cell_(cell) {
        for (std::size_t i = 0; i < pts.size(); ++i) {
            buckets_[key(pts[i])].push_back(i);
        }
    }

    template <typename F>
    void for_neighbors(Vec2 p, int ring, F&& f) const {
        auto [cx, cy] = cell_of(p);
        for (long long dx = -ring; dx <= ring; ++dx) {
            for (long long dy = -ring; dy <= ring; ++dy) {
                auto it = buckets_.find(pack(cx + dx, cy + dy));
                if (it == buckets_.end()) continue;
                for (std::size_t idx : it->second) f(idx);
            }
        }
    }

    double nearest_distance(Vec2 p) const {
        for (int ring = 1;; ring *= 2) {
            double best = std::numeric_limits<double>::infinity();
            for_neighbors(p, ring, [&](std::size_t i) {
                best = std::min(best, distance(p, pts_[i]));
            });
            // only trust hits that cannot be beaten by a point just outside the ring
            if (best <= cell_ * (ring - 1)) return best;
            if (ring > 1 << 20) return best;
        }
    }

private:
    std::pair<long long, long long> cell_of(Vec2 p) const {
        return {static_cast<long long>(std::floor(p.x / cell_)),
                static_cast<long long>(std::floor(p.y / cell_))};
    }
    std::uint64_t key(Vec2 p) const {
        auto [cx, cy] = cell_of(p);
        return pack(cx, cy);
    }
    static std::uint64_t pack(long long x, long long y) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) |
               static_cast<std::uint64_t>(static_cast<std::uint32_t>(y));
    }

    const std::vector<Vec2>& pts_;
    double cell_;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
};

double min_pairwise_distance(const std::vector<Vec2>& pts) {
    double xmin = pts[0].x, xmax = pts[0].x, ymin = pts[0].y, ymax = pts[0].y;
    for (const auto& p : pts) {
        xmin = std::min(xmin, p.x); xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y); ymax = std::max(ymax, p.y);
    }
    double diag = std::hypot(xmax - xmin, ymax - ymin);
    if (diag == 0.0) return 0.0;
    double h = std::max(diag / std::sqrt(static_cast<double>(pts.size())), diag * 1e-9);
    for (;; h *= 2.0) {
        BucketGrid grid(pts, h);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < pts.size(); ++i) {
            grid.for_neighbors(pts[i], 1, [&](std::size_t j) {
                if (j != i) best = std::min(best, distance(pts[i], pts[j]));
            });
        }
        if (best <= h) return best;
        if (h > diag) return best;
    }
}

} // namespace

FiniteFramework::FiniteFramework(std::vector<Vec2> joints, std::vector<Bar> bars)
    : joints_(std::move(joints)), bars_(std::move(bars)) {
    if (joints_.empty()) throw ValidationError("framework needs at least one joint");
    const int n = static_cast<int>(joints_.size());
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(bars_.size() * 2);
    for (auto& b : bars_) {
        if (b.i == b.j) throw ValidationError("bar with identical endpoints");
        if (b.i < 0 || b.j < 0 || b.i >= n || b.j >= n) {
            throw ValidationError("bar endpoint out of range");
        }
        std::uint64_t k = (static_cast<std::uint64_t>(std::min(b.i, b.j)) << 32) |
                          static_cast<std::uint64_t>(std::max(b.i, b.j));
        if (!seen.insert(k).second) throw ValidationError("duplicate bar");
        max_bar_length_ = std::max(max_bar_length_, distance(joints_[b.i], joints_[b.j]));
    }
    window_.xmin = window_.xmax = joints_[0].x;
    window_.ymin = window_.ymax = joints_[0].y;
    for (const auto& p : joints_) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw ValidationError("non-finite joint position");
        }
        window_.xmin = std::min(window_.xmin, p.x);
        window_.xmax = std::max(window_.xmax, p.x);
        window_.ymin = std::min(window_.ymin, p.y);
        window_.ymax = std::max(window_.ymax, p.y);
    }
    if (joints_.size() >= 2 && min_pairwise_distance(joints_) <= 0.0) {
        throw ValidationError("coincident joints");
    }
}

DeloneParameters delone_parameters(const FiniteFramework& fw) {
    if (fw.joint_count() < 2) throw ValidationError("need at least 2 joints");
    DeloneParameters out;
    out.separation = min_pairwise_distance(fw.joints());
    out.max_bar_length = fw.max_bar_length();

    const Window& w = fw.window();
    double margin = std::min(fw.max_bar_length(),
                             0.25 * std::min(w.width(), w.height()));
    double cell = std::max({w.width(), w.height(), 1e-9}) /
                  std::sqrt(static_cast<double>(fw.joint_count()));
    BucketGrid grid(fw.joints(), cell);
    const int samples = 48;
    double worst = 0.0;
    for (int si = 0; si <= samples; ++si) {
        for (int sj = 0; sj <= samples; ++sj) {
            Vec2 p{w.xmin + margin + (w.width() - 2 * margin) * si / samples,
                   w.ymin + margin + (w.height() - 2 * margin) * sj / samples};
            worst = std::max(worst, grid.nearest_distance(p));
        }
    }
    out.covering_radius_estimate = worst;
    return out;
}

double VelocityField::max_norm() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, cnorm(v));
    return m;
}

std::vector<std::size_t> VelocityField::support(double tol) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (cnorm(values_[i]) > tol) out.push_back(i);
    }
    return out;
}

double flex_residual_max(const FiniteFramework& fw, const VelocityField& u,
                         double interior_margin) {
    if (u.size() != fw.joint_count()) {
        throw ValidationError("velocity field does not cover all joints");
    }
    double worst = 0.0;
    for (const auto& b : fw.bars()) {
        Vec2 pi = fw.joint(b.i), pj = fw.joint(b.j);
        if (interior_margin > 0.0 &&
            (!fw.window().contains(pi, interior_margin) ||
             !fw.window().contains(pj, interior_margin))) {
            continue;
        }
        CVec2 du = u[b.i] - u[b.j];
        Vec2 e = pi - pj;
        std::complex<double> r = du.x * e.x + du.y * e.y;
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

VelocityField translation_field(const FiniteFramework& fw, Vec2 b) {
    VelocityField u(fw.joint_count());
    for (std::size_t i = 0; i < fw.joint_count(); ++i) u[i] = {b.x, b.y};
    return u;
}

VelocityField rotation_field(const FiniteFramework& fw, Vec2 center) {
    VelocityField u(fw.joint_count());
    for (std::size_t i = 0; i < fw.joint_count(); ++i) {
        Vec2 r = rot90(fw.joint(i) - center);
        u[i] = {r.x, r.y};
    }
    return u;
}

bool verify_localisation(const FiniteFramework& fw, const VelocityField& u,
                         const ProjLine& h, double bound) {
    if (u.size() != fw.joint_count()) {
        throw ValidationError("velocity field does not cover all joints");
    }
    for (std::size_t i : u.support()) {
        if (std::abs(cross(h.direction(), fw.joint(i))) > bound) return false;
    }
    return true;
}

CrystalFramework::CrystalFramework(Basis2 basis, std::vector<Vec2> motif_joints,
                                   std::vector<MotifEdge> motif_edges)
    : basis_(basis), motif_joints_(std::move(motif_joints)),
      motif_edges_(std::move(motif_edges)) {
    if (motif_joints_.empty()) throw ValidationError("empty motif");
    const int n = joint_classes();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (distance(motif_joints_[i], motif_joints_[j]) <= 0.0) {
                throw ValidationError("motif joints must be pairwise distinct");
            }
        }
    }
    std::set<std::array<long long, 4>> seen;
    for (const auto& e : motif_edges_) {
        if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n) {
            throw ValidationError("motif edge joint out of range");
        }
        if (e.from == e.to && e.offset[0] == 0 && e.offset[1] == 0) {
            throw ValidationError("motif edge with zero offset and equal ends");
        }
        if (norm(bar_vector(e)) <= 1e-12) {
            throw ValidationError("motif edge with zero geometric length");
        }
        std::array<long long, 4> key{e.from, e.to, e.offset[0], e.offset[1]};
        std::array<long long, 4> rkey{e.to, e.from, -e.offset[0], -e.offset[1]};
        if (rkey < key) key = rkey;
        if (!seen.insert(key).second) throw ValidationError("duplicate motif edge");
    }
}

double CrystalFramework::max_bar_length() const {
    double m = 0.0;
    for (const auto& e : motif_edges_) m = std::max(m, norm(bar_vector(e)));
    return m;
}

CrystalFramework CrystalFramework::supercell(int k1, int k2) const {
    if (k1 < 1 || k2 < 1) throw ValidationError("supercell factors must be >= 1");
    Basis2 big(static_cast<double>(k1) * basis_.a1(),
               static_cast<double>(k2) * basis_.a2());
    const int n = joint_classes();
    auto idx = [&](int kappa, int i, int j) { return (kappa * k1 + i) * k2 + j; };
    std::vector<Vec2> joints(static_cast<std::size_t>(n) * k1 * k2);
    for (int kappa = 0; kappa < n; ++kappa) {
        for (int i = 0; i < k1; ++i) {
            for (int j = 0; j < k2; ++j) joints[idx(kappa, i, j)] = position(kappa, i, j);
        }
    }
    std::vector<MotifEdge> edges;
    edges.reserve(motif_edges_.size() * static_cast<std::size_t>(k1) * k2);
    auto fdiv = [](int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); };
    for (const auto& e : motif_edges_) {
        for (int i = 0; i < k1; ++i) {
            for (int j = 0; j < k2; ++j) {
                int ti = i + e.offset[0], tj = j + e.offset[1];
                int ci = fdiv(ti, k1), cj = fdiv(tj, k2);
                edges.push_back({idx(e.from, i, j),
                                 idx(e.to, ti - ci * k1, tj - cj * k2),
                                 {ci, cj}});
            }
        }
    }
    return CrystalFramework(big, std::move(joints), std::move(edges));
}

CrystalFramework CrystalFramework::rebase(const IntMat2& z) const {
    if (!z.is_unimodular()) throw ValidationError("rebase needs a unimodular integral matrix");
    // rows of z are the coefficients of the new basis vectors
    Vec2 a1s = boost::rational_cast<double>(z.a) * basis_.a1() +
               boost::rational_cast<double>(z.b) * basis_.a2();
    Vec2 a2s = boost::rational_cast<double>(z.c) * basis_.a1() +
               boost::rational_cast<double>(z.d) * basis_.a2();
    Basis2 bs(a1s, a2s);
    // offsets transform by the inverse transpose, which is integral here
    IntMat2 zit = z.inverse();
    IntMat2 zt{zit.a, zit.c, zit.b, zit.d};
    std::vector<MotifEdge> edges = motif_edges_;
    for (auto& e : edges) {
        Rational d1 = zt.a * e.offset[0] + zt.b * e.offset[1];
        Rational d2 = zt.c * e.offset[0] + zt.d * e.offset[1];
        e.offset = {static_cast<int>(boost::rational_cast<long long>(d1)),
                    static_cast<int>(boost::rational_cast<long long>(d2))};
    }
    return CrystalFramework(bs, motif_joints_, std::move(edges));
}

namespace {

std::pair<std::vector<Vec2>, std::vector<Bar>> realize_impl(
    const CrystalFramework& c, const KRange& r) {
    const int n = c.joint_classes();
    const int ni = r.ni(), nj = r.nj();
    if (ni <= 0 || nj <= 0) throw ValidationError("empty lattice range");
    std::vector<Vec2> joints(static_cast<std::size_t>(n) * ni * nj);
    for (int kappa = 0; kappa < n; ++kappa) {
        for (int i = r.i0; i <= r.i1; ++i) {
            for (int j = r.j0; j <= r.j1; ++j) {
                std::size_t idx = (static_cast<std::size_t>(kappa) * ni + (i - r.i0)) * nj +
                                  (j - r.j0);
                joints[idx] = c.position(kappa, i, j);
            }
        }
    }
    auto index = [&](int kappa, int i, int j) {
        return (static_cast<std::size_t>(kappa) * ni + (i - r.i0)) * nj + (j - r.j0);
    };
    std::vector<Bar> bars;
    for (int i = r.i0; i <= r.i1; ++i) {
        for (int j = r.j0; j <= r.j1; ++j) {
            for (const auto& e : c.motif_edges()) {
                int ti = i + e.offset[0], tj = j + e.offset[1];
                if (!r.contains(ti, tj)) continue;
                bars.push_back({static_cast<int>(index(e.from, i, j)),
                                static_cast<int>(index(e.to, ti, tj))});
            }
        }
    }
    return {std::move(joints), std::move(bars)};
}

} // namespace

RealizedWindow::RealizedWindow(const CrystalFramework& c, const KRange& range)
    : crystal_(c), range_(range),
      fw_([&] {
          auto [joints, bars] = realize_impl(c, range);
          return FiniteFramework(std::move(joints), std::move(bars));
      }()) {}

int RealizedWindow::joint_index(int kappa, int i, int j) const {
    if (kappa < 0 || kappa >= crystal_.joint_classes() || !range_.contains(i, j)) return -1;
    return static_cast<int>((static_cast<std::size_t>(kappa) * range_.ni() + (i - range_.i0)) *
                                range_.nj() +
                            (j - range_.j0));
}

RealizedWindow::JointId RealizedWindow::decode(int index) const {
    int nj = range_.nj(), ni = range_.ni();
    int j = index % nj;
    int rest = index / nj;
    int i = rest % ni;
    int kappa = rest / ni;
    return {kappa, i + range_.i0, j + range_.j0};
}

RealizedWindow realize_window(const CrystalFramework& c, const KRange& range) {
    return RealizedWindow(c, range);
}

VelocityField translate_field(const RealizedWindow& w, const VelocityField& u,
                              int k1, int k2) {
    if (u.size() != w.framework().joint_count()) {
        throw ValidationError("velocity field does not cover all joints");
    }
    for (std::size_t s : u.support()) {
        auto id = w.decode(static_cast<int>(s));
        if (!w.range().contains(id.i + k1, id.j + k2)) {
            throw ValidationError("window exceeded");
        }
    }
    VelocityField v(u.size());
    for (std::size_t idx = 0; idx < u.size(); ++idx) {
        auto id = w.decode(static_cast<int>(idx));
        int src = w.joint_index(id.kappa, id.i - k1, id.j - k2);
        if (src >= 0) v[idx] = u[static_cast<std::size_t>(src)];
    }
    return v;
}

CrystalFramework crystalize(const FiniteFramework& fw, const Basis2& a, double tol) {
    struct ClassRep {
        Vec2 reduced;
    };
    std::vector<ClassRep> reps;
    std::vector<int> joint_class(fw.joint_count(), -1);
    std::vector<std::array<int, 2>> joint_cell(fw.joint_count());

    auto wrap01 = [](double s) {
        double r = s - std::floor(s);
        if (r >= 1.0) r -= 1.0;
        return r;
    };
    for (std::size_t idx = 0; idx < fw.joint_count(); ++idx) {
        Vec2 s = a.coefficients(fw.joint(idx));
        Vec2 red{wrap01(s.x), wrap01(s.y)};
        int found = -1;
        for (std::size_t k = 0; k < reps.size(); ++k) {
            // compare reduced coordinates modulo 1
            double dx = std::abs(red.x - reps[k].reduced.x);
            double dy = std::abs(red.y - reps[k].reduced.y);
            dx = std::min(dx, 1.0 - dx);
            dy = std::min(dy, 1.0 - dy);
            if (norm(a.point_of(Vec2{dx, dy})) <= tol) {
                found = static_cast<int>(k);
                break;
            }
        }
        if (found < 0) {
            reps.push_back({red});
            found = static_cast<int>(reps.size()) - 1;
        }
        joint_class[idx] = found;
        joint_cell[idx] = {static_cast<int>(std::lround(s.x - reps[found].reduced.x)),
                           static_cast<int>(std::lround(s.y - reps[found].reduced.y))};
    }

    std::vector<Vec2> motif;
    motif.reserve(reps.size());
    for (const auto& r : reps) motif.push_back(a.point_of(r.reduced));

    std::set<std::array<int, 4>> edge_set;
    for (const auto& b : fw.bars()) {
        int k1 = joint_class[b.i], k2 = joint_class[b.j];
        std::array<int, 2> d{joint_cell[b.j][0] - joint_cell[b.i][0],
                             joint_cell[b.j][1] - joint_cell[b.i][1]};
        std::array<int, 4> key{k1, k2, d[0], d[1]};
        std::array<int, 4> rkey{k2, k1, -d[0], -d[1]};
        edge_set.insert(std::min(key, rkey));
    }
    std::vector<MotifEdge> edges;
    for (const auto& k : edge_set) edges.push_back({k[0], k[1], {k[2], k[3]}});
    return CrystalFramework(a, std::move(motif), std::move(edges));
}

} // namespace rumkit
