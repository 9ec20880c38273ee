#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "rumkit/framework.hpp"
#include "rumkit/rum_engine.hpp"

namespace rumkit {

/// Band geometry for the constructive converse: the parallelogram R_m of
/// points t1*a1 + t2*a2 with 0 <= t1 < 1, 0 <= t2 < m, phase lambda1 along a1.
struct BandSpec {
    Basis2 basis;
    int m = 1;
    int axis = 0; ///< which basis vector spans the band direction (0 = a1)
    std::complex<double> lambda1{1.0, 0.0};
};

/// Quotient classes (kappa, row) of joints incident to bars that cross the
/// band boundary; the returned flex vanishes on all of them.
struct OverlapSet {
    std::vector<std::pair<int, int>> classes;
    std::size_t size() const { return classes.size(); }
};

OverlapSet overlap_set(const CrystalFramework& c, int m);

/// A band-localised phase-periodic flex together with its quotient data:
/// field(kappa, (i, j)) = lambda1^i * row_data[kappa*m + j] for 0 <= j < m,
/// zero on all other rows.
struct BandFlex {
    RealizedWindow window;
    VelocityField field;
    int m_used = 0;
    double gamma1 = 0.0;
    std::complex<double> lambda1{1.0, 0.0};
    std::vector<CVec2> row_data;
    OverlapSet overlap;
};

/// Constructive extraction of an H-localised phase-periodic flex from the
/// spectral line {(gamma1, t)}; m is doubled up to m_max until the pinned
/// band system has a kernel. Throws SpectrumError("line not in spectrum") or
/// SpectrumError("m_max exhausted").
BandFlex extract_band_flex(const CrystalFramework& c, double gamma1, int m_max,
                           double tol);

struct LocalFlex {
    RealizedWindow window;
    VelocityField field;
    int m_used = 0;
};

/// Finitely supported flex extraction for the full-spectrum case: solve on the
/// m x m torus for periodic fields vanishing on boundary-overlapping bars.
LocalFlex extract_local_flex(const CrystalFramework& c, int m_max, double tol);

/// u = sum_k lambda2^k T_(0,k) z evaluated on the target window; the result is
/// an IFM for the multiphase (lambda1, lambda2). The target window must share
/// the i-range of z's window; z's support must stay clear of the transverse
/// window edges.
VelocityField synthesize_ifm(const BandFlex& z, std::complex<double> lambda2,
                             const RealizedWindow& out_window);

/// Generic variant operating on a raw field over a realized window.
VelocityField synthesize_ifm(const RealizedWindow& z_window, const VelocityField& z,
                             std::complex<double> lambda2,
                             const RealizedWindow& out_window);

} // namespace rumkit
