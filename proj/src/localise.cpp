#include "rumkit/localise.hpp"

#include <algorithm>
#include <set>

#include <Eigen/SVD>

namespace rumkit {

namespace {

std::complex<double> unit_phase(double gamma) {
    return std::polar(1.0, 2.0 * M_PI * gamma);
}

std::complex<double> int_pow(std::complex<double> w, int k) {
    std::complex<double> base = k >= 0 ? w : 1.0 / w;
    std::complex<double> out{1.0, 0.0};
    for (int i = 0; i < std::abs(k); ++i) out *= base;
    return out;
}

// Kernel vector of A restricted to non-pinned coordinates, or empty when the
// restricted system has no numerical kernel. One extra re-solve pass pins the
// near-zero coordinates of the first solution to sharpen its support.
Eigen::VectorXcd pinned_kernel_vector(const Eigen::MatrixXcd& a,
                                      const std::vector<bool>& pinned,
                                      double kernel_tol) {
    const Eigen::Index ncols = a.cols();
    std::vector<Eigen::Index> free_cols;
    for (Eigen::Index c = 0; c < ncols; ++c) {
        if (!pinned[static_cast<std::size_t>(c)]) free_cols.push_back(c);
    }
    if (free_cols.empty()) return {};

    auto solve = [&](const std::vector<Eigen::Index>& cols) -> Eigen::VectorXcd {
        Eigen::MatrixXcd sub(a.rows(), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t k = 0; k < cols.size(); ++k) sub.col(k) = a.col(cols[k]);
        if (sub.rows() < sub.cols()) {
            // pad with zero rows so the SVD sees the full column dimension
            Eigen::MatrixXcd padded = Eigen::MatrixXcd::Zero(sub.cols(), sub.cols());
            padded.topRows(sub.rows()) = sub;
            sub = padded;
        }
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(sub, Eigen::ComputeFullV);
        if (svd.singularValues()(sub.cols() - 1) > kernel_tol) return {};
        Eigen::VectorXcd v = svd.matrixV().col(sub.cols() - 1);
        Eigen::VectorXcd full = Eigen::VectorXcd::Zero(ncols);
        for (std::size_t k = 0; k < cols.size(); ++k) full(cols[k]) = v(k);
        return full;
    };

    Eigen::VectorXcd v = solve(free_cols);
    if (v.size() == 0) return v;

    double vmax = v.cwiseAbs().maxCoeff();
    std::vector<Eigen::Index> tight;
    for (Eigen::Index c : free_cols) {
        if (std::abs(v(c)) > 0.05 * vmax) tight.push_back(c);
    }
    if (!tight.empty() && tight.size() < free_cols.size()) {
        Eigen::VectorXcd sparser = solve(tight);
        if (sparser.size() != 0) return sparser;
    }
    return v;
}

} // namespace

OverlapSet overlap_set(const CrystalFramework& c, int m) {
    if (m < 1) throw ValidationError("band width must be >= 1");
    std::set<std::pair<int, int>> classes;
    for (const auto& e : c.motif_edges()) {
        int d2 = e.offset[1];
        if (d2 == 0) continue;
        // rows j with exactly one of j, j+d2 inside [0, m)
        int lo = d2 > 0 ? std::max(0, m - d2) : 0;
        int hi = d2 > 0 ? m : std::min(m, -d2);
        for (int j = lo; j < hi; ++j) {
            classes.insert({e.from, j});
            classes.insert({e.to, ((j + d2) % m + m) % m});
        }
    }
    OverlapSet out;
    out.classes.assign(classes.begin(), classes.end());
    return out;
}

BandFlex extract_band_flex(const CrystalFramework& c, double gamma1, int m_max,
                           double tol) {
    if (m_max < 2) throw ValidationError("m_max must be >= 2");
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int s = 0; s < 10; ++s) {
        double t = std::fmod(golden * (s + 1), 1.0);
        if (sigma_min(c, gamma1, t) > tol) throw SpectrumError("line not in spectrum");
    }

    const int n = c.joint_classes();
    const std::complex<double> lambda1 = unit_phase(gamma1);
    const double scale = std::max(1.0, c.max_bar_length() * c.max_bar_length());
    const double kernel_tol = 1e-9 * scale;

    for (int m = 2; m <= m_max; m *= 2) {
        // unknowns: w[kappa][j], flattened to 2*(kappa*m + j) + component
        const int cols = 2 * n * m;
        Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(
            static_cast<Eigen::Index>(c.motif_edges().size()) * m, cols);
        Eigen::Index r = 0;
        for (const auto& e : c.motif_edges()) {
            Vec2 b = c.bar_vector(e);
            std::complex<double> ph = int_pow(lambda1, e.offset[0]);
            for (int j = 0; j < m; ++j) {
                int tj = j + e.offset[1];
                if (tj < 0 || tj >= m) continue; // crossing bar: handled by pinning
                a(r, 2 * (e.from * m + j)) += b.x;
                a(r, 2 * (e.from * m + j) + 1) += b.y;
                a(r, 2 * (e.to * m + tj)) -= ph * b.x;
                a(r, 2 * (e.to * m + tj) + 1) -= ph * b.y;
                ++r;
            }
        }
        a.conservativeResize(r, cols);

        OverlapSet overlap = overlap_set(c, m);
        std::vector<bool> pinned(cols, false);
        for (const auto& [kappa, j] : overlap.classes) {
            pinned[2 * (kappa * m + j)] = true;
            pinned[2 * (kappa * m + j) + 1] = true;
        }

        Eigen::VectorXcd v = pinned_kernel_vector(a, pinned, kernel_tol);
        if (v.size() == 0) continue;

        // realize on a window 5 periods wide with 2 margin rows on each side
        KRange range{-2, 2, -2, m + 1};
        RealizedWindow w = realize_window(c, range);
        VelocityField field(w.framework().joint_count());
        std::vector<CVec2> rows(static_cast<std::size_t>(n) * m);
        for (int kappa = 0; kappa < n; ++kappa) {
            for (int j = 0; j < m; ++j) {
                rows[kappa * m + j] = {v(2 * (kappa * m + j)), v(2 * (kappa * m + j) + 1)};
            }
        }
        for (std::size_t idx = 0; idx < field.size(); ++idx) {
            auto id = w.decode(static_cast<int>(idx));
            if (id.j < 0 || id.j >= m) continue;
            std::complex<double> ph = int_pow(lambda1, id.i);
            field[idx] = ph * rows[id.kappa * m + id.j];
        }

        BandFlex out{std::move(w), std::move(field), m, gamma1, lambda1,
                     std::move(rows), std::move(overlap)};
        double residual = flex_residual_max(out.window.framework(), out.field);
        double unit = std::max(1e-30, out.field.max_norm() * c.max_bar_length());
        if (residual > 1e-9 * std::max(1.0, unit)) continue;
        return out;
    }
    throw SpectrumError("m_max exhausted");
}

LocalFlex extract_local_flex(const CrystalFramework& c, int m_max, double tol) {
    if (m_max < 2) throw ValidationError("m_max must be >= 2");
    SpectrumScan probe = scan_spectrum(c, 16, tol);
    if (!probe.full_spectrum()) {
        throw SpectrumError("spectrum is not all of the torus; no local flex sought");
    }

    const int n = c.joint_classes();
    const double scale = std::max(1.0, c.max_bar_length() * c.max_bar_length());
    const double kernel_tol = 1e-9 * scale;

    for (int m = 2; m <= m_max; m *= 2) {
        const int cols = 2 * n * m * m;
        auto cell = [&](int kappa, int i, int j) { return (kappa * m + i) * m + j; };
        Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(
            static_cast<Eigen::Index>(c.motif_edges().size()) * m * m, cols);
        std::vector<bool> pinned(cols, false);
        auto pin = [&](int kappa, int i, int j) {
            int q = cell(kappa, (i % m + m) % m, (j % m + m) % m);
            pinned[2 * q] = true;
            pinned[2 * q + 1] = true;
        };
        Eigen::Index r = 0;
        for (const auto& e : c.motif_edges()) {
            Vec2 b = c.bar_vector(e);
            for (int i = 0; i < m; ++i) {
                for (int j = 0; j < m; ++j) {
                    int ti = i + e.offset[0], tj = j + e.offset[1];
                    if (ti < 0 || ti >= m || tj < 0 || tj >= m) {
                        pin(e.from, i, j);
                        pin(e.to, ti, tj);
                        continue;
                    }
                    a(r, 2 * cell(e.from, i, j)) += b.x;
                    a(r, 2 * cell(e.from, i, j) + 1) += b.y;
                    a(r, 2 * cell(e.to, ti, tj)) -= b.x;
                    a(r, 2 * cell(e.to, ti, tj) + 1) -= b.y;
                    ++r;
                }
            }
        }
        a.conservativeResize(r, cols);

        Eigen::VectorXcd v = pinned_kernel_vector(a, pinned, kernel_tol);
        if (v.size() == 0) continue;

        KRange range{-2, m + 1, -2, m + 1};
        RealizedWindow w = realize_window(c, range);
        VelocityField field(w.framework().joint_count());
        for (std::size_t idx = 0; idx < field.size(); ++idx) {
            auto id = w.decode(static_cast<int>(idx));
            if (id.i < 0 || id.i >= m || id.j < 0 || id.j >= m) continue;
            field[idx] = {v(2 * cell(id.kappa, id.i, id.j)),
                          v(2 * cell(id.kappa, id.i, id.j) + 1)};
        }
        LocalFlex out{std::move(w), std::move(field), m};
        double residual = flex_residual_max(out.window.framework(), out.field);
        double unit = std::max(1e-30, out.field.max_norm() * c.max_bar_length());
        if (residual > 1e-9 * std::max(1.0, unit)) continue;
        return out;
    }
    throw SpectrumError("m_max exhausted");
}

VelocityField synthesize_ifm(const RealizedWindow& z_window, const VelocityField& z,
                             std::complex<double> lambda2,
                             const RealizedWindow& out_window) {
    if (std::abs(std::abs(lambda2) - 1.0) > 1e-12) {
        throw ValidationError("lambda2 must be unimodular");
    }
    const KRange& zr = z_window.range();
    const KRange& orng = out_window.range();
    if (orng.i0 < zr.i0 || orng.i1 > zr.i1) {
        throw ValidationError("output window exceeds the flex window along the band");
    }
    // support must stay clear of both transverse window edges, otherwise the
    // zero-extension outside the window is not certified
    int jmin = zr.j1 + 1, jmax = zr.j0 - 1;
    for (std::size_t s : z.support()) {
        auto id = z_window.decode(static_cast<int>(s));
        jmin = std::min(jmin, id.j);
        jmax = std::max(jmax, id.j);
    }
    if (jmin > jmax) throw ValidationError("cannot synthesize from the zero field");
    if (jmin <= zr.j0 && jmax >= zr.j1) {
        throw ValidationError("flex is not band localised within its window");
    }

    VelocityField u(out_window.framework().joint_count());
    for (std::size_t idx = 0; idx < u.size(); ++idx) {
        auto id = out_window.decode(static_cast<int>(idx));
        CVec2 acc;
        for (int jp = jmin; jp <= jmax; ++jp) {
            int src = z_window.joint_index(id.kappa, id.i, jp);
            if (src < 0) continue;
            acc = acc + int_pow(lambda2, id.j - jp) * z[static_cast<std::size_t>(src)];
        }
        u[idx] = acc;
    }
    return u;
}

VelocityField synthesize_ifm(const BandFlex& z, std::complex<double> lambda2,
                             const RealizedWindow& out_window) {
    return synthesize_ifm(z.window, z.field, lambda2, out_window);
}

} // namespace rumkit
