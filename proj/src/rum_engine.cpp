#include "rumkit/rum_engine.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>
#include <thread>

#include <Eigen/SVD>

namespace rumkit {

namespace {

std::complex<double> unit_phase(double gamma) {
    return std::polar(1.0, 2.0 * M_PI * gamma);
}

std::complex<double> int_pow(std::complex<double> w, int k) {
    if (k == 0) return {1.0, 0.0};
    std::complex<double> base = k > 0 ? w : 1.0 / w;
    std::complex<double> out{1.0, 0.0};
    for (int i = 0; i < std::abs(k); ++i) out *= base;
    return out;
}

double smallest_singular_value(const Eigen::MatrixXcd& m) {
    if (m.rows() < m.cols()) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues()(m.cols() - 1);
}

int thread_budget(int requested) {
    if (requested > 0) return requested;
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (const char* env = std::getenv("RUMKIT_THREADS")) {
        int cap = std::atoi(env);
        if (cap > 0) hw = std::min(hw, cap);
    }
    return hw;
}

} // namespace

SymbolEvaluation symbol_matrix(const CrystalFramework& c, std::complex<double> omega1,
                               std::complex<double> omega2) {
    if (std::abs(std::abs(omega1) - 1.0) > 1e-12 ||
        std::abs(std::abs(omega2) - 1.0) > 1e-12) {
        throw ValidationError("multiphase components must be unimodular");
    }
    const int n = c.joint_classes();
    const auto& edges = c.motif_edges();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(edges.size()), 2 * n);
    for (std::size_t r = 0; r < edges.size(); ++r) {
        const auto& e = edges[r];
        Vec2 b = c.bar_vector(e);
        std::complex<double> phase =
            int_pow(omega1, e.offset[0]) * int_pow(omega2, e.offset[1]);
        m(r, 2 * e.from) += b.x;
        m(r, 2 * e.from + 1) += b.y;
        m(r, 2 * e.to) -= phase * b.x;
        m(r, 2 * e.to + 1) -= phase * b.y;
    }
    SymbolEvaluation out;
    out.omega1 = omega1;
    out.omega2 = omega2;
    out.matrix = std::move(m);
    out.sigma_min = smallest_singular_value(out.matrix);
    return out;
}

double sigma_min(const CrystalFramework& c, double gamma1, double gamma2) {
    return symbol_matrix(c, unit_phase(gamma1), unit_phase(gamma2)).sigma_min;
}

double default_symbol_tol(const CrystalFramework& c) {
    double l = c.max_bar_length();
    return 1e-8 * l * l;
}

SpectrumScan::SpectrumScan(int resolution, double tol, Eigen::MatrixXd samples)
    : resolution_(resolution), tol_(tol), samples_(std::move(samples)) {
    if (samples_.rows() != resolution_ || samples_.cols() != resolution_) {
        throw ValidationError("scan sample grid does not match resolution");
    }
    if (samples_.minCoeff() < 0.0) throw ValidationError("negative sigma_min sample");
    if (samples_(0, 0) > tol_) {
        throw ValidationError("sample at (0,0) above tol; translations missing");
    }
}

std::size_t SpectrumScan::below_tol_count() const {
    std::size_t count = 0;
    for (int i = 0; i < resolution_; ++i) {
        for (int j = 0; j < resolution_; ++j) {
            if (samples_(i, j) <= tol_) ++count;
        }
    }
    return count;
}

double SpectrumScan::below_tol_fraction() const {
    return static_cast<double>(below_tol_count()) /
           (static_cast<double>(resolution_) * resolution_);
}

std::vector<std::pair<int, int>> SpectrumScan::below_tol_points() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < resolution_; ++i) {
        for (int j = 0; j < resolution_; ++j) {
            if (samples_(i, j) <= tol_) out.emplace_back(i, j);
        }
    }
    return out;
}

SpectrumScan scan_spectrum(const CrystalFramework& c, int resolution, double tol,
                           int threads) {
    if (resolution < 8) throw ValidationError("scan resolution must be at least 8");
    Eigen::MatrixXd samples(resolution, resolution);
    int nthreads = std::min(thread_budget(threads), resolution);
    auto run_rows = [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            for (int j = 0; j < resolution; ++j) {
                samples(i, j) = sigma_min(c, static_cast<double>(i) / resolution,
                                          static_cast<double>(j) / resolution);
            }
        }
    };
    if (nthreads <= 1) {
        run_rows(0, resolution);
    } else {
        std::vector<std::thread> pool;
        int chunk = (resolution + nthreads - 1) / nthreads;
        for (int t = 0; t < nthreads; ++t) {
            int begin = t * chunk, end = std::min(resolution, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(run_rows, begin, end);
        }
        for (auto& th : pool) th.join();
    }
    return SpectrumScan(resolution, tol, std::move(samples));
}

namespace {

int count_clusters(const std::vector<std::pair<int, int>>& pts, int resolution) {
    if (pts.empty()) return 0;
    std::map<std::pair<int, int>, int> id;
    for (std::size_t k = 0; k < pts.size(); ++k) id[pts[k]] = static_cast<int>(k);
    std::vector<int> parent(pts.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t k = 0; k < pts.size(); ++k) {
        for (int di = -1; di <= 1; ++di) {
            for (int dj = -1; dj <= 1; ++dj) {
                // 8-neighborhood on the torus grid
                int ni = (pts[k].first + di + resolution) % resolution;
                int nj = (pts[k].second + dj + resolution) % resolution;
                auto it = id.find({ni, nj});
                if (it != id.end()) parent[find(static_cast<int>(k))] = find(it->second);
            }
        }
    }
    int clusters = 0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        if (find(static_cast<int>(k)) == static_cast<int>(k)) ++clusters;
    }
    return clusters;
}

} // namespace

SpectralLineSet detect_spectral_lines(const CrystalFramework& c, const SpectrumScan& scan,
                                      int denominator_bound) {
    if (scan.full_spectrum()) throw SpectrumError("spectrum is all of the torus");
    const int R = scan.resolution();
    const double tol = scan.tol();
    auto below = scan.below_tol_points();

    SpectralLineSet out;
    out.cluster_count = count_clusters(below, R);

    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    // primitive directions (dx, dy) with entries bounded by D, angle in [0, pi)
    for (long long dx = -denominator_bound; dx <= denominator_bound; ++dx) {
        for (long long dy = 0; dy <= denominator_bound; ++dy) {
            if (dy == 0 && dx <= 0) continue;
            if (std::gcd(std::llabs(dx), dy) != 1) continue;
            // transverse coordinate of grid point (i/R, j/R) is (-dy*i + dx*j)/R;
            // exact residue arithmetic groups collinear candidates
            std::map<long long, int> support;
            for (const auto& [i, j] : below) {
                long long resid = ((-dy * i + dx * j) % R + R) % R;
                ++support[resid];
            }
            for (const auto& [resid, count] : support) {
                if (count < std::max(8, R / 2)) continue;
                // anchor the candidate at one of its grid points
                std::pair<int, int> anchor{-1, -1};
                for (const auto& [i, j] : below) {
                    if (((-dy * i + dx * j) % R + R) % R == resid) {
                        anchor = {i, j};
                        break;
                    }
                }
                Vec2 base{static_cast<double>(anchor.first) / R,
                          static_cast<double>(anchor.second) / R};
                Vec2 dir{static_cast<double>(dx), static_cast<double>(dy)};
                double len = norm(dir);
                Vec2 unit = normalized(dir);
                bool ok = true;
                for (int s = 0; s < 50 && ok; ++s) {
                    double t = len * std::fmod(golden * (s + 1), 1.0);
                    Vec2 g = base + t * unit;
                    if (sigma_min(c, g.x, g.y) > tol) ok = false;
                }
                if (!ok) continue;
                SpectralLine line;
                line.dir_x = dx;
                line.dir_y = dy;
                line.offset = static_cast<double>(resid) / R;
                line.grid_support = count;
                out.lines.push_back(line);
                out.figure.insert(line.line());
            }
        }
    }
    out.rum_dimension = out.lines.empty() ? 0 : 1;
    return out;
}

VelocityField extract_ifm(const RealizedWindow& w, double gamma1, double gamma2,
                          double tol) {
    const CrystalFramework& c = w.crystal();
    auto eval = symbol_matrix(c, unit_phase(gamma1), unit_phase(gamma2));
    if (eval.sigma_min > tol) throw SpectrumError("not in spectrum");

    const int n = c.joint_classes();
    Eigen::VectorXcd kernel;
    if (eval.matrix.rows() == 0) {
        kernel = Eigen::VectorXcd::Zero(2 * n);
        kernel(0) = 1.0;
    } else {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(eval.matrix, Eigen::ComputeFullV);
        kernel = svd.matrixV().col(2 * n - 1);
    }

    VelocityField u(w.framework().joint_count());
    for (std::size_t idx = 0; idx < u.size(); ++idx) {
        auto id = w.decode(static_cast<int>(idx));
        std::complex<double> phase =
            int_pow(eval.omega1, id.i) * int_pow(eval.omega2, id.j);
        u[idx] = {phase * kernel(2 * id.kappa), phase * kernel(2 * id.kappa + 1)};
    }
    return u;
}

std::vector<ScaledSpectrumPoint> scale_spectrum_map(const CrystalFramework& c,
                                                    const std::vector<Vec2>& points,
                                                    int k1, int k2) {
    if (k1 < 1 || k2 < 1) throw ValidationError("scale factors must be >= 1");
    CrystalFramework big = c.supercell(k1, k2);
    auto wrap = [](double x) {
        double r = x - std::floor(x);
        return r >= 1.0 ? r - 1.0 : r;
    };
    std::vector<ScaledSpectrumPoint> out;
    out.reserve(points.size());
    for (const auto& g : points) {
        Vec2 gp{wrap(k1 * g.x), wrap(k2 * g.y)};
        out.push_back({gp, sigma_min(big, gp.x, gp.y)});
    }
    return out;
}

} // namespace rumkit
