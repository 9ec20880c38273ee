#pragma once

#include <array>
#include <complex>
#include <map>
#include <vector>

#include "rumkit/geometry.hpp"

namespace rumkit {

struct Window {
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    bool contains(Vec2 p, double margin = 0.0) const {
        return p.x >= xmin + margin && p.x <= xmax - margin &&
               p.y >= ymin + margin && p.y <= ymax - margin;
    }
    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
};

struct Bar {
    int i = 0, j = 0;
};

/// A finite bar-joint framework in the plane.
class FiniteFramework {
public:
    FiniteFramework(std::vector<Vec2> joints, std::vector<Bar> bars);

    const std::vector<Vec2>& joints() const { return joints_; }
    const std::vector<Bar>& bars() const { return bars_; }
    Vec2 joint(std::size_t i) const { return joints_[i]; }
    std::size_t joint_count() const { return joints_.size(); }
    const Window& window() const { return window_; }
    double max_bar_length() const { return max_bar_length_; }

private:
    std::vector<Vec2> joints_;
    std::vector<Bar> bars_;
    Window window_;
    double max_bar_length_ = 0.0;
};

struct DeloneParameters {
    double separation = 0.0;
    double covering_radius_estimate = 0.0;
    double max_bar_length = 0.0;
};

/// Minimum joint separation, a grid-sampled covering radius estimate
/// (window interior only) and the exact maximum bar length.
DeloneParameters delone_parameters(const FiniteFramework& fw);

struct CVec2 {
    std::complex<double> x{0.0, 0.0};
    std::complex<double> y{0.0, 0.0};
};

inline CVec2 operator+(const CVec2& a, const CVec2& b) { return {a.x + b.x, a.y + b.y}; }
inline CVec2 operator-(const CVec2& a, const CVec2& b) { return {a.x - b.x, a.y - b.y}; }
inline CVec2 operator*(std::complex<double> s, const CVec2& a) { return {s * a.x, s * a.y}; }
inline double cnorm(const CVec2& a) { return std::sqrt(std::norm(a.x) + std::norm(a.y)); }

/// A complex velocity field over the joints of a fixed framework.
class VelocityField {
public:
    VelocityField() = default;
    explicit VelocityField(std::size_t joints) : values_(joints) {}

    std::size_t size() const { return values_.size(); }
    CVec2& operator[](std::size_t i) { return values_[i]; }
    const CVec2& operator[](std::size_t i) const { return values_[i]; }

    double max_norm() const;
    std::vector<std::size_t> support(double tol = 1e-12) const;

private:
    std::vector<CVec2> values_;
};

/// Max over bars of |<u_i - u_j, p_i - p_j>| with the complex-bilinear pairing.
/// Bars with an endpoint closer than interior_margin to the window boundary
/// are skipped.
double flex_residual_max(const FiniteFramework& fw, const VelocityField& u,
                         double interior_margin = 0.0);

VelocityField translation_field(const FiniteFramework& fw, Vec2 b);
VelocityField rotation_field(const FiniteFramework& fw, Vec2 center);

/// True iff every support joint of u lies within `bound` of the line h.
bool verify_localisation(const FiniteFramework& fw, const VelocityField& u,
                         const ProjLine& h, double bound);

struct MotifEdge {
    int from = 0, to = 0;
    std::array<int, 2> offset{0, 0};
};

/// Periodic bar-joint framework data: a motif of joints and edges repeated
/// over the lattice of a periodicity basis. Joint (kappa, (i, j)) sits at
/// motif_joints[kappa] + i*a1 + j*a2.
class CrystalFramework {
public:
    CrystalFramework(Basis2 basis, std::vector<Vec2> motif_joints,
                     std::vector<MotifEdge> motif_edges);

    const Basis2& basis() const { return basis_; }
    const std::vector<Vec2>& motif_joints() const { return motif_joints_; }
    const std::vector<MotifEdge>& motif_edges() const { return motif_edges_; }
    int joint_classes() const { return static_cast<int>(motif_joints_.size()); }

    Vec2 position(int kappa, int i, int j) const {
        return motif_joints_[kappa] + static_cast<double>(i) * basis_.a1() +
               static_cast<double>(j) * basis_.a2();
    }
    Vec2 bar_vector(const MotifEdge& e) const {
        return position(e.to, e.offset[0], e.offset[1]) - motif_joints_[e.from];
    }
    double max_bar_length() const;

    /// The same framework with periodicity basis {k1*a1, k2*a2}; the motif is
    /// replicated k1*k2 times.
    CrystalFramework supercell(int k1, int k2) const;

    /// The same framework re-indexed for the basis a* with a1* = z.a*a1 + z.b*a2,
    /// a2* = z.c*a1 + z.d*a2; z must be integral and unimodular.
    CrystalFramework rebase(const IntMat2& z) const;

private:
    Basis2 basis_;
    std::vector<Vec2> motif_joints_;
    std::vector<MotifEdge> motif_edges_;
};

/// Inclusive integer box of lattice coordinates.
struct KRange {
    int i0 = 0, i1 = 0, j0 = 0, j1 = 0;
    int ni() const { return i1 - i0 + 1; }
    int nj() const { return j1 - j0 + 1; }
    bool contains(int i, int j) const { return i >= i0 && i <= i1 && j >= j0 && j <= j1; }
};

/// A finite realization of a crystal framework over a lattice box, with the
/// (kappa, i, j) <-> joint index bookkeeping needed by field constructions.
class RealizedWindow {
public:
    RealizedWindow(const CrystalFramework& c, const KRange& range);

    const FiniteFramework& framework() const { return fw_; }
    const CrystalFramework& crystal() const { return crystal_; }
    const KRange& range() const { return range_; }

    /// Joint index of (kappa, i, j), or -1 when outside the window.
    int joint_index(int kappa, int i, int j) const;
    struct JointId {
        int kappa, i, j;
    };
    JointId decode(int index) const;

private:
    CrystalFramework crystal_;
    KRange range_;
    FiniteFramework fw_;

    friend RealizedWindow realize_window(const CrystalFramework&, const KRange&);
};

RealizedWindow realize_window(const CrystalFramework& c, const KRange& range);

/// (T_k u)(p_{kappa,m}) = u(p_{kappa,m-k}); throws when the shifted support
/// leaves the window.
VelocityField translate_field(const RealizedWindow& w, const VelocityField& u,
                              int k1, int k2);

/// Recover a CrystalFramework from a finite periodic framework and a claimed
/// periodicity basis. Joints are classified by their lattice-reduced position.
CrystalFramework crystalize(const FiniteFramework& fw, const Basis2& a,
                            double tol = 1e-6);

} // namespace rumkit
