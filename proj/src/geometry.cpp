#include "rumkit/geometry.hpp"

#include <algorithm>
#include <numeric>

namespace rumkit {

Basis2::Basis2(Vec2 a1, Vec2 a2) : a1_(a1), a2_(a2), det_(cross(a1, a2)) {
    if (!std::isfinite(a1.x) || !std::isfinite(a1.y) || !std::isfinite(a2.x) ||
        !std::isfinite(a2.y) || std::abs(det_) <= kBasisDetTol) {
        throw ValidationError("degenerate basis");
    }
}

Vec2 Basis2::coefficients(Vec2 v) const {
    // Cramer on [a1 a2] s = v.
    return {cross(v, a2_) / det_, cross(a1_, v) / det_};
}

ProjLine::ProjLine(Vec2 direction) {
    double n = norm(direction);
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw ValidationError("projective line needs a nonzero direction");
    }
    double theta = std::atan2(direction.y, direction.x);
    if (theta < 0.0) theta += M_PI;
    if (theta >= M_PI) theta -= M_PI;
    angle_ = theta;
    dir_ = {std::cos(theta), std::sin(theta)};
}

ProjLine ProjLine::from_angle(double theta) {
    return ProjLine(Vec2{std::cos(theta), std::sin(theta)});
}

double line_angle_distance(const ProjLine& a, const ProjLine& b) {
    double d = std::abs(a.angle() - b.angle());
    return std::min(d, M_PI - d);
}

LineFigure::LineFigure(const std::vector<ProjLine>& lines) {
    for (const auto& l : lines) insert(l);
}

void LineFigure::insert(const ProjLine& line, double tol) {
    if (contains(line, tol)) return;
    auto pos = std::upper_bound(lines_.begin(), lines_.end(), line,
                                [](const ProjLine& x, const ProjLine& y) {
                                    return x.angle() < y.angle();
                                });
    lines_.insert(pos, line);
}

bool LineFigure::contains(const ProjLine& line, double tol) const {
    for (const auto& l : lines_) {
        if (line_angle_distance(l, line) <= tol) return true;
    }
    return false;
}

bool LineFigure::set_equal(const LineFigure& other, double tol) const {
    if (lines_.size() != other.lines_.size()) return false;
    for (const auto& l : lines_) {
        if (!other.contains(l, tol)) return false;
    }
    return true;
}

IntMat2 IntMat2::times(const IntMat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d,
            c * o.a + d * o.c, c * o.b + d * o.d};
}

IntMat2 IntMat2::inverse() const {
    Rational dt = det();
    if (dt == Rational(0)) throw ValidationError("singular change-of-basis matrix");
    return {d / dt, -b / dt, -c / dt, a / dt};
}

Vec2 IntMat2::apply(Vec2 v) const {
    auto f = [](const Rational& r) { return boost::rational_cast<double>(r); };
    return {f(a) * v.x + f(b) * v.y, f(c) * v.x + f(d) * v.y};
}

bool IntMat2::is_integral() const {
    return a.denominator() == 1 && b.denominator() == 1 && c.denominator() == 1 &&
           d.denominator() == 1;
}

bool IntMat2::is_unimodular() const {
    Rational dt = det();
    return is_integral() && (dt == Rational(1) || dt == Rational(-1));
}

Vec2 coefficients_in_basis(Vec2 v, const Basis2& a) {
    return a.coefficients(v);
}

ProjLine reciprocal_line(const ProjLine& h, const Basis2& a) {
    Vec2 coeff = a.coefficients(h.direction());
    return ProjLine(Vec2{coeff.y, -coeff.x});
}

LineFigure transform_figure(const IntMat2& z, const LineFigure& f) {
    if (z.det() == Rational(0)) throw ValidationError("singular change-of-basis matrix");
    LineFigure out;
    for (const auto& l : f.lines()) out.insert(ProjLine(z.apply(l.direction())));
    return out;
}

namespace {

// Wrap to [-1/2, 1/2).
double recenter(double s) { return s - std::floor(s + 0.5); }

struct WrapPiece {
    double tau;      // transverse offset: cross(dir, point)
    double lo, hi;   // longitudinal interval along dir
};

} // namespace

std::vector<Segment> reduce_line_segments(const ProjLine& line, double truncation) {
    if (!(truncation > 0.0)) throw ValidationError("truncation must be positive");
    const Vec2 d = line.direction();
    const double T = truncation;

    // Parameter values where t*d crosses a half-integer coordinate line.
    std::vector<double> cuts{-T, T};
    for (double dc : {d.x, d.y}) {
        if (std::abs(dc) < 1e-15) continue;
        long long mlo = static_cast<long long>(std::floor(-std::abs(dc) * T - 0.5)) - 1;
        long long mhi = static_cast<long long>(std::ceil(std::abs(dc) * T - 0.5)) + 1;
        for (long long m = mlo; m <= mhi; ++m) {
            double t = (static_cast<double>(m) + 0.5) / dc;
            if (t > -T && t < T) cuts.push_back(t);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    const double teps = 1e-12 * std::max(1.0, T);

    std::vector<WrapPiece> pieces;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double ta = cuts[i], tb = cuts[i + 1];
        if (tb - ta <= teps) continue;
        double tm = 0.5 * (ta + tb);
        Vec2 pm{recenter(tm * d.x), recenter(tm * d.y)};
        Vec2 pa = pm + (ta - tm) * d;
        Vec2 pb = pm + (tb - tm) * d;
        double la = dot(d, pa), lb = dot(d, pb);
        pieces.push_back({cross(d, pm), std::min(la, lb), std::max(la, lb)});
    }

    // Merge pieces that lie on the same wrapped line (equal transverse offset)
    // and have overlapping or abutting longitudinal intervals.
    std::sort(pieces.begin(), pieces.end(),
              [](const WrapPiece& p, const WrapPiece& q) {
                  return p.tau < q.tau || (p.tau == q.tau && p.lo < q.lo);
              });
    const double tau_tol = 1e-9;
    const double join_tol = 1e-9;
    std::vector<Segment> out;
    std::size_t i = 0;
    while (i < pieces.size()) {
        std::size_t j = i;
        while (j + 1 < pieces.size() && pieces[j + 1].tau - pieces[i].tau <= tau_tol) ++j;
        std::vector<WrapPiece> group(pieces.begin() + i, pieces.begin() + j + 1);
        std::sort(group.begin(), group.end(),
                  [](const WrapPiece& p, const WrapPiece& q) { return p.lo < q.lo; });
        double tau = 0.0;
        for (const auto& g : group) tau += g.tau;
        tau /= static_cast<double>(group.size());
        const Vec2 n = rot90(d);
        double lo = group.front().lo, hi = group.front().hi;
        for (std::size_t k = 1; k < group.size(); ++k) {
            if (group[k].lo <= hi + join_tol) {
                hi = std::max(hi, group[k].hi);
            } else {
                out.push_back({lo * d + tau * n, hi * d + tau * n});
                lo = group[k].lo;
                hi = group[k].hi;
            }
        }
        out.push_back({lo * d + tau * n, hi * d + tau * n});
        i = j + 1;
    }
    return out;
}

std::optional<std::pair<long long, long long>> rational_direction(
    const ProjLine& line, long long max_den, double tol) {
    const Vec2 d = line.direction();
    auto try_vec = [&](long long p, long long q)
        -> std::optional<std::pair<long long, long long>> {
        if (p == 0 && q == 0) return std::nullopt;
        if (std::llabs(p) > max_den || std::llabs(q) > max_den) return std::nullopt;
        Vec2 v{static_cast<double>(p), static_cast<double>(q)};
        if (std::abs(cross(d, v)) / norm(v) <= tol) {
            long long g = std::gcd(std::llabs(p), std::llabs(q));
            p /= g;
            q /= g;
            if (p < 0 || (p == 0 && q < 0)) { p = -p; q = -q; }
            return std::make_pair(p, q);
        }
        return std::nullopt;
    };

    // Continued-fraction convergents of the slope, taken along the major axis.
    const bool xmajor = std::abs(d.x) >= std::abs(d.y);
    const double num = xmajor ? d.y : d.x;
    const double den = xmajor ? d.x : d.y;
    if (auto r = try_vec(xmajor ? 1 : 0, xmajor ? 0 : 1)) return r;
    double t = num / den;
    long long h0 = 0, k0 = 1, h1 = 1, k1 = 0;
    double frac = t;
    for (int iter = 0; iter < 64; ++iter) {
        double fl = std::floor(frac);
        if (std::abs(fl) > 4.0 * static_cast<double>(max_den)) break;
        long long ai = static_cast<long long>(fl);
        long long h2 = ai * h1 + h0, k2 = ai * k1 + k0;
        if (std::llabs(k2) > max_den || std::llabs(h2) > max_den) break;
        if (auto r = xmajor ? try_vec(k2, h2) : try_vec(h2, k2)) return r;
        h0 = h1; k0 = k1; h1 = h2; k1 = k2;
        double rem = frac - fl;
        if (std::abs(rem) < 1e-15) break;
        frac = 1.0 / rem;
    }
    return std::nullopt;
}

IntMat2 extend_to_unimodular(long long p, long long q) {
    if (std::gcd(std::llabs(p), std::llabs(q)) != 1) {
        throw ValidationError("direction vector must be primitive");
    }
    // Extended Euclid: u*p + v*q = 1; second row (-v, u) gives det +1.
    long long old_r = p, r = q, old_u = 1, u = 0, old_v = 0, v = 1;
    while (r != 0) {
        long long qt = old_r / r;
        std::tie(old_r, r) = std::make_pair(r, old_r - qt * r);
        std::tie(old_u, u) = std::make_pair(u, old_u - qt * u);
        std::tie(old_v, v) = std::make_pair(v, old_v - qt * v);
    }
    if (old_r < 0) { old_u = -old_u; old_v = -old_v; }
    return IntMat2::of_ints(p, q, -old_v, old_u);
}

} // namespace rumkit
