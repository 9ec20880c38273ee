#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

#include "rumkit/errors.hpp"

namespace rumkit {

/// Angular tolerance for identifying two lines through the origin.
inline constexpr double kAngleTol = 1e-9;
/// A 2x2 basis counts as invertible when |det| exceeds this.
inline constexpr double kBasisDetTol = 1e-12;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline Vec2 operator*(Vec2 a, double s) { return s * a; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 rot90(Vec2 a) { return {-a.y, a.x}; }
inline Vec2 normalized(Vec2 a) {
    double n = norm(a);
    if (n == 0.0) throw ValidationError("cannot normalize the zero vector");
    return {a.x / n, a.y / n};
}

/// An ordered planar basis {a1, a2} with nonzero determinant.
class Basis2 {
public:
    Basis2(Vec2 a1, Vec2 a2);
    static Basis2 standard() { return Basis2({1.0, 0.0}, {0.0, 1.0}); }

    Vec2 a1() const { return a1_; }
    Vec2 a2() const { return a2_; }
    double det() const { return det_; }

    /// Coefficients (s1, s2) with s1*a1 + s2*a2 = v.
    Vec2 coefficients(Vec2 v) const;
    /// Inverse of coefficients: s1*a1 + s2*a2.
    Vec2 point_of(Vec2 coeffs) const { return coeffs.x * a1_ + coeffs.y * a2_; }

private:
    Vec2 a1_, a2_;
    double det_;
};

/// A line through the origin, stored as a unit direction with angle in [0, pi).
class ProjLine {
public:
    explicit ProjLine(Vec2 direction);
    static ProjLine from_angle(double theta);

    double angle() const { return angle_; }
    Vec2 direction() const { return dir_; }

private:
    double angle_;
    Vec2 dir_;
};

/// Angular distance between two lines, in [0, pi/2].
double line_angle_distance(const ProjLine& a, const ProjLine& b);

inline bool same_line(const ProjLine& a, const ProjLine& b, double tol = kAngleTol) {
    return line_angle_distance(a, b) <= tol;
}

/// A finite set of lines through the origin, kept deduplicated and sorted by angle.
class LineFigure {
public:
    LineFigure() = default;
    explicit LineFigure(const std::vector<ProjLine>& lines);

    void insert(const ProjLine& line, double tol = kAngleTol);
    const std::vector<ProjLine>& lines() const { return lines_; }
    std::size_t size() const { return lines_.size(); }
    bool empty() const { return lines_.empty(); }
    bool contains(const ProjLine& line, double tol = kAngleTol) const;
    bool set_equal(const LineFigure& other, double tol = kAngleTol) const;

private:
    std::vector<ProjLine> lines_;
};

using Rational = boost::rational<long long>;

/// A 2x2 change-of-basis matrix [[a, b], [c, d]] with rational entries;
/// integral and unimodular in the common cases.
struct IntMat2 {
    Rational a, b, c, d;

    static IntMat2 identity() { return {1, 0, 0, 1}; }
    static IntMat2 of_ints(long long a_, long long b_, long long c_, long long d_) {
        return {Rational(a_), Rational(b_), Rational(c_), Rational(d_)};
    }

    Rational det() const { return a * d - b * c; }
    IntMat2 times(const IntMat2& o) const;
    IntMat2 inverse() const;
    Vec2 apply(Vec2 v) const;
    bool is_integral() const;
    bool is_unimodular() const;
};

// --- operations -----------------------------------------------------------

/// Coefficients of v in basis a; throws ValidationError("degenerate basis")
/// if the basis fails the determinant test.
Vec2 coefficients_in_basis(Vec2 v, const Basis2& a);

/// The reciprocal (spectral) line of an ambient line H = R(alpha*a1 + beta*a2):
/// the line R(beta, -alpha) in reciprocal coordinates.
ProjLine reciprocal_line(const ProjLine& h, const Basis2& a);

/// Image of a line figure under w -> Z*w, deduplicated.
LineFigure transform_figure(const IntMat2& z, const LineFigure& f);

struct Segment {
    Vec2 a, b;
};

/// The set { t*dir mod Z^2, |t| <= truncation } recentred to [-1/2,1/2)^2,
/// returned as maximal segments (overlapping collinear pieces merged).
std::vector<Segment> reduce_line_segments(const ProjLine& line, double truncation);

/// Continued-fraction rationality test: the primitive integer direction
/// (p, q) with |p|,|q| <= max_den matching the line within tol (as the sine of
/// the angular deviation), if one exists.
std::optional<std::pair<long long, long long>> rational_direction(
    const ProjLine& line, long long max_den = 64, double tol = 1e-9);

/// Extend a primitive integer vector (p, q) to a unimodular integral matrix
/// whose first row is (p, q).
IntMat2 extend_to_unimodular(long long p, long long q);

} // namespace rumkit
