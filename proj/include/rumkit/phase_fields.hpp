#pragma once

#include <complex>
#include <vector>

#include "rumkit/framework.hpp"
#include "rumkit/geometry.hpp"

namespace rumkit {

/// Scalar phase field phi_{omega,a}: omega1^{k1} omega2^{k2} on cell k of the
/// semiopen cell partition of a basis, anchored at a reference point.
class ScalarPhaseField {
public:
    ScalarPhaseField(std::complex<double> omega1, std::complex<double> omega2,
                     Basis2 basis, Vec2 anchor = {0.0, 0.0});

    std::complex<double> value(Vec2 p) const;
    std::complex<double> omega1() const { return omega1_; }
    std::complex<double> omega2() const { return omega2_; }

private:
    std::complex<double> omega1_, omega2_;
    Basis2 basis_;
    Vec2 anchor_;
};

/// Banded phase field: lambda^k on band k of the {t1, t2} cell partition
/// collapsed along t1. The anchor translates the partition.
class BandedPhaseField {
public:
    BandedPhaseField(Vec2 t1, Vec2 t2, std::complex<double> lambda,
                     Vec2 anchor = {0.0, 0.0});

    std::complex<double> value(Vec2 p) const;
    long long band_index(Vec2 p) const;
    std::complex<double> lambda() const { return lambda_; }
    const Basis2& basis() const { return basis_; }
    Vec2 anchor() const { return anchor_; }
    /// Same band partition, different phase.
    BandedPhaseField with_lambda(std::complex<double> lambda) const {
        return BandedPhaseField(basis_.a1(), basis_.a2(), lambda, anchor_);
    }

private:
    Basis2 basis_;
    std::complex<double> lambda_;
    Vec2 anchor_;
};

/// Matricial phase-periodic velocity field phi_{omega,a} (x) B for an L x M
/// unit cell velocity vector matrix B.
class MatricialPhaseField {
public:
    MatricialPhaseField(std::complex<double> omega1, std::complex<double> omega2,
                        Basis2 basis, int l, int m, std::vector<CVec2> cell_vectors,
                        Vec2 anchor = {0.0, 0.0});

    CVec2 value(Vec2 p) const;
    int l() const { return l_; }
    int m() const { return m_; }

private:
    std::complex<double> omega1_, omega2_;
    Basis2 basis_;
    int l_, m_;
    std::vector<CVec2> cell_; ///< row-major (l, m)
    Vec2 anchor_;
};

/// Pointwise product (phi . u)(p) = phi(p) u(p) over the joints of fw.
VelocityField modulate(const ScalarPhaseField& phi, const FiniteFramework& fw,
                       const VelocityField& u);
VelocityField modulate(const BandedPhaseField& phi, const FiniteFramework& fw,
                       const VelocityField& u);

struct MostlyCloseStats {
    bool close = true;
    double worst_fraction = 0.0;
    Vec2 worst_anchor;
    std::size_t windows_tested = 0;
};

/// Uniform (eps, N)-closeness: slides the 2N-square over anchors at stride N/4
/// inside the realized window; true iff the fraction of joints with
/// ||u(p) - z(p)|| > eps stays below eps in every tested translate.
MostlyCloseStats mostly_epsilon_close(const FiniteFramework& fw, const VelocityField& u,
                                      const VelocityField& z, double eps, double n_box,
                                      double stride_divisor = 4.0);

} // namespace rumkit
