#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "rumkit/framework.hpp"
#include "rumkit/geometry.hpp"

namespace rumkit {

/// Symbol matrix of a crystal framework at a unimodular pair omega.
/// One row per motif edge (kappa, kappa', delta) with bar vector b_e:
/// +b_e^T on the kappa columns, -omega^delta * b_e^T on the kappa' columns.
/// Kernel vectors are exactly the unit-cell data of omega-periodic flexes.
struct SymbolEvaluation {
    std::complex<double> omega1, omega2;
    Eigen::MatrixXcd matrix;
    /// Smallest singular value counted against the full column dimension 2n;
    /// zero by convention when there are fewer rows than columns.
    double sigma_min = 0.0;
};

SymbolEvaluation symbol_matrix(const CrystalFramework& c, std::complex<double> omega1,
                               std::complex<double> omega2);

/// sigma_min of the symbol at omega = (e^{2 pi i g1}, e^{2 pi i g2}).
double sigma_min(const CrystalFramework& c, double gamma1, double gamma2);

/// Default rank-drop tolerance: 1e-8 * (max bar length)^2.
double default_symbol_tol(const CrystalFramework& c);

/// sigma_min sampled on the R x R grid gamma = (i/R, j/R).
class SpectrumScan {
public:
    SpectrumScan(int resolution, double tol, Eigen::MatrixXd samples);

    int resolution() const { return resolution_; }
    double tol() const { return tol_; }
    const Eigen::MatrixXd& samples() const { return samples_; }
    double at(int i, int j) const { return samples_(i, j); }

    std::size_t below_tol_count() const;
    double below_tol_fraction() const;
    /// True when more than 99% of samples are below tol (Omega = T^2 regime).
    bool full_spectrum() const { return below_tol_fraction() > 0.99; }
    std::vector<std::pair<int, int>> below_tol_points() const;

private:
    int resolution_;
    double tol_;
    Eigen::MatrixXd samples_;
};

/// Scan the torus; threads = 0 uses the RUMKIT_THREADS cap or the hardware
/// count. Rows are distributed statically, so results are deterministic.
SpectrumScan scan_spectrum(const CrystalFramework& c, int resolution, double tol,
                           int threads = 0);

/// A verified spectral line on the torus: a rational direction plus the
/// transverse offset c = <(-dy, dx), x> mod 1 shared by its points.
struct SpectralLine {
    long long dir_x = 0, dir_y = 0;
    double offset = 0.0;
    int grid_support = 0;
    ProjLine line() const { return ProjLine(Vec2{static_cast<double>(dir_x),
                                                 static_cast<double>(dir_y)}); }
};

struct SpectralLineSet {
    std::vector<SpectralLine> lines;
    LineFigure figure;     ///< origin-parallels of the detected lines
    int rum_dimension = 0; ///< 0 clusters only, 1 lines, 2 full torus
    int cluster_count = 0; ///< connected clusters of below-tol grid points
};

/// Candidate-driven line detection: rational directions with entries bounded
/// by denominator_bound, offsets on the scan grid, each candidate re-verified
/// with >= 50 refined sigma_min samples along the line.
SpectralLineSet detect_spectral_lines(const CrystalFramework& c, const SpectrumScan& scan,
                                      int denominator_bound = 12);

/// Kernel vector of the symbol at gamma, lifted to the window by
/// u_{kappa,k} = omega^k u_{kappa,0}. Throws SpectrumError when gamma is not
/// in the spectrum at tol.
VelocityField extract_ifm(const RealizedWindow& w, double gamma1, double gamma2,
                          double tol);

struct ScaledSpectrumPoint {
    Vec2 gamma;            ///< (k1*g1 mod 1, k2*g2 mod 1)
    double supercell_sigma;///< sigma_min of the (k1, k2) supercell at gamma
};

/// The surjection K(C, a) -> K(C, k a); every image point is verified on the
/// supercell crystal.
std::vector<ScaledSpectrumPoint> scale_spectrum_map(const CrystalFramework& c,
                                                    const std::vector<Vec2>& points,
                                                    int k1, int k2);

} // namespace rumkit
