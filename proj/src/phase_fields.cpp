#include "rumkit/phase_fields.hpp"

#include <algorithm>

namespace rumkit {

namespace {

void require_unimodular(std::complex<double> w, const char* name) {
    if (std::abs(std::abs(w) - 1.0) > 1e-12) {
        throw ValidationError(std::string(name) + " must be unimodular");
    }
}

std::complex<double> int_pow(std::complex<double> w, long long k) {
    // |w| = 1, so the polar form is exact enough for large exponents
    double arg = std::arg(w);
    return std::polar(1.0, arg * static_cast<double>(k));
}

long long floor_ll(double x) { return static_cast<long long>(std::floor(x)); }

} // namespace

ScalarPhaseField::ScalarPhaseField(std::complex<double> omega1,
                                   std::complex<double> omega2, Basis2 basis,
                                   Vec2 anchor)
    : omega1_(omega1), omega2_(omega2), basis_(basis), anchor_(anchor) {
    require_unimodular(omega1, "omega1");
    require_unimodular(omega2, "omega2");
}

std::complex<double> ScalarPhaseField::value(Vec2 p) const {
    Vec2 s = basis_.coefficients(p - anchor_);
    return int_pow(omega1_, floor_ll(s.x)) * int_pow(omega2_, floor_ll(s.y));
}

BandedPhaseField::BandedPhaseField(Vec2 t1, Vec2 t2, std::complex<double> lambda,
                                   Vec2 anchor)
    : basis_(t1, t2), lambda_(lambda), anchor_(anchor) {
    require_unimodular(lambda, "lambda");
}

long long BandedPhaseField::band_index(Vec2 p) const {
    return floor_ll(basis_.coefficients(p - anchor_).y);
}

std::complex<double> BandedPhaseField::value(Vec2 p) const {
    return int_pow(lambda_, band_index(p));
}

MatricialPhaseField::MatricialPhaseField(std::complex<double> omega1,
                                         std::complex<double> omega2, Basis2 basis,
                                         int l, int m, std::vector<CVec2> cell_vectors,
                                         Vec2 anchor)
    : omega1_(omega1), omega2_(omega2), basis_(basis), l_(l), m_(m),
      cell_(std::move(cell_vectors)), anchor_(anchor) {
    require_unimodular(omega1, "omega1");
    require_unimodular(omega2, "omega2");
    if (l_ < 1 || m_ < 1) throw ValidationError("cell matrix dimensions must be >= 1");
    if (cell_.size() != static_cast<std::size_t>(l_) * m_) {
        throw ValidationError("cell matrix size mismatch");
    }
}

CVec2 MatricialPhaseField::value(Vec2 p) const {
    Vec2 s = basis_.coefficients(p - anchor_);
    long long k1 = floor_ll(s.x), k2 = floor_ll(s.y);
    double f1 = s.x - static_cast<double>(k1);
    double f2 = s.y - static_cast<double>(k2);
    int sub_l = std::min(l_ - 1, static_cast<int>(std::floor(f1 * l_)));
    int sub_m = std::min(m_ - 1, static_cast<int>(std::floor(f2 * m_)));
    std::complex<double> phase = int_pow(omega1_, k1) * int_pow(omega2_, k2);
    return phase * cell_[static_cast<std::size_t>(sub_l) * m_ + sub_m];
}

namespace {

template <typename Field>
VelocityField modulate_impl(const Field& phi, const FiniteFramework& fw,
                            const VelocityField& u) {
    if (u.size() != fw.joint_count()) {
        throw ValidationError("velocity field does not cover all joints");
    }
    VelocityField out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        out[i] = phi.value(fw.joint(i)) * u[i];
    }
    return out;
}

} // namespace

VelocityField modulate(const ScalarPhaseField& phi, const FiniteFramework& fw,
                       const VelocityField& u) {
    return modulate_impl(phi, fw, u);
}

VelocityField modulate(const BandedPhaseField& phi, const FiniteFramework& fw,
                       const VelocityField& u) {
    return modulate_impl(phi, fw, u);
}

MostlyCloseStats mostly_epsilon_close(const FiniteFramework& fw, const VelocityField& u,
                                      const VelocityField& z, double eps, double n_box,
                                      double stride_divisor) {
    if (u.size() != fw.joint_count() || z.size() != fw.joint_count()) {
        throw ValidationError("velocity field does not cover all joints");
    }
    if (!(eps > 0.0) || !(n_box > 0.0)) throw ValidationError("eps and N must be positive");
    const Window& w = fw.window();
    if (w.width() < 2.0 * n_box || w.height() < 2.0 * n_box) {
        throw ValidationError("window smaller than the 2N test square");
    }

    std::vector<bool> deviating(fw.joint_count());
    for (std::size_t i = 0; i < fw.joint_count(); ++i) {
        deviating[i] = cnorm(u[i] - z[i]) > eps;
    }

    const double stride = n_box / stride_divisor;
    MostlyCloseStats stats;
    for (double ax = w.xmin + n_box; ax <= w.xmax - n_box + 1e-12; ax += stride) {
        for (double ay = w.ymin + n_box; ay <= w.ymax - n_box + 1e-12; ay += stride) {
            std::size_t total = 0, bad = 0;
            for (std::size_t i = 0; i < fw.joint_count(); ++i) {
                Vec2 p = fw.joint(i);
                if (std::abs(p.x - ax) <= n_box && std::abs(p.y - ay) <= n_box) {
                    ++total;
                    if (deviating[i]) ++bad;
                }
            }
            ++stats.windows_tested;
            if (total == 0) continue;
            double frac = static_cast<double>(bad) / static_cast<double>(total);
            if (frac > stats.worst_fraction) {
                stats.worst_fraction = frac;
                stats.worst_anchor = {ax, ay};
            }
            if (!(frac < eps)) stats.close = false;
        }
    }
    if (stats.windows_tested == 0) throw ValidationError("window smaller than the 2N test square");
    return stats;
}

} // namespace rumkit
