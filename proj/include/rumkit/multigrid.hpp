#pragma once

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rumkit/framework.hpp"
#include "rumkit/geometry.hpp"
#include "rumkit/phase_fields.hpp"

namespace rumkit {

/// One family of equally spaced parallel grid lines
/// { x : <x, normal> = k + offset, k integer }, with the dual tile edge vector.
struct GridFamily {
    Vec2 normal;   ///< unit
    double offset = 0.0;
    Vec2 edge;     ///< v_j, the tile edge dual to this family
};

struct MultigridSpec {
    std::vector<GridFamily> families;
    double window = 10.0; ///< disk radius in grid-line index space

    int family_count() const { return static_cast<int>(families.size()); }
    void validate() const;
};

struct RegularityReport {
    bool regular = true;
    std::size_t intersections = 0;
    double min_gap = 0.0;              ///< smallest gap between intersection points
    std::vector<Vec2> flagged;         ///< near-triple points (gap < 1e-7)
};

/// Enumerate all pairwise in-window grid-line intersections and flag
/// near-triple points.
RegularityReport check_regularity(const MultigridSpec& spec);

struct TileRecord {
    int fam_a = 0, fam_b = 0;      ///< fam_a < fam_b
    long long idx_a = 0, idx_b = 0;///< grid line indices
    std::array<int, 4> verts{};    ///< vertex ids in cyclic order
    Vec2 intersection;             ///< the dual grid point
};

/// A parallelogram tiling produced by de Bruijn dualization of a regular
/// multigrid: vertex K -> sum_j K_j v_j, one tile per grid intersection.
class Tiling {
public:
    Tiling(MultigridSpec spec, std::vector<std::vector<int>> vertex_k,
           std::vector<Vec2> vertex_pos, std::vector<TileRecord> tiles);

    const MultigridSpec& spec() const { return spec_; }
    const std::vector<std::vector<int>>& vertex_k() const { return vertex_k_; }
    const std::vector<Vec2>& vertex_pos() const { return vertex_pos_; }
    const std::vector<TileRecord>& tiles() const { return tiles_; }

    Vec2 tile_center(const TileRecord& t) const;

    /// Geometric re-validation used after deserialization. Throws with the
    /// offending tile index in the message.
    void validate(double tol = 1e-9) const;

private:
    MultigridSpec spec_;
    std::vector<std::vector<int>> vertex_k_;
    std::vector<Vec2> vertex_pos_;
    std::vector<TileRecord> tiles_;
};

/// Dualize a regular multigrid. Throws ValidationError on singular input.
Tiling dualize(const MultigridSpec& spec);

/// Intersection point of grid lines (fam_a, idx_a) and (fam_b, idx_b).
Vec2 grid_intersection(const MultigridSpec& spec, int fam_a, long long idx_a,
                       int fam_b, long long idx_b);

/// The Delone bar-joint framework of a tiling, with the integer K-coordinate
/// table per joint and the grid family of each bar.
struct TilingFramework {
    FiniteFramework fw;
    std::vector<std::vector<int>> joint_k;
    std::vector<int> bar_family;
    MultigridSpec spec;
};

TilingFramework framework_of(const Tiling& t);

struct Ribbon {
    int family = 0;
    long long line_index = 0;
    std::vector<int> tiles;    ///< tile ids ordered along the grid line
    ProjLine fitted = ProjLine(Vec2{1.0, 0.0}); ///< TLS line through tile centers
    double transverse_center = 0.0; ///< mean <center, normal(fitted)>
};

/// Tiles dual to the intersections along grid line (family, index), ordered
/// along the line; throws when fewer than 3 tiles are in the window.
Ribbon extract_ribbon(const Tiling& t, int family, long long line_index);

/// Asymptotic ribbon direction (sum over l != j of <d_j, n_l> v_l, d_j the
/// grid line direction); used as a cross-check against the empirical fit.
ProjLine analytic_ribbon_direction(const MultigridSpec& spec, int family);

struct RibbonFigure {
    LineFigure figure; ///< one direction per family, deduplicated
    struct FamilyFit {
        int family = 0;
        double analytic_angle = 0.0;
        double median_fitted_angle = 0.0;
        double median_abs_deviation = 0.0;
        int ribbons_used = 0;
    };
    std::vector<FamilyFit> fits;
    std::vector<std::string> warnings;
};

/// The ribbon figure RF(P): per-family ribbon directions. Directions enter the
/// figure as the analytic candidates, each cross-validated against the median
/// of total-least-squares fits over that family's ribbons (>= 20 tiles each
/// when available); disagreement beyond 0.5 degrees is reported as a warning.
RibbonFigure ribbon_figure(const Tiling& t);

/// Zero on one side of the ribbon, the fixed velocity b on the other
/// (side taken combinatorially: K_j >= line_index + 1). b must be
/// perpendicular to the family edge vector.
VelocityField shear_flex(const TilingFramework& tf, int family, long long line_index,
                         Vec2 b);

/// b on the slab of vertices with k1 + 1 <= K_j <= k2, zero elsewhere.
VelocityField pair_slippage_flex(const TilingFramework& tf, int family, long long k1,
                                 long long k2, Vec2 b);

struct ModulatedRibbonFlex {
    VelocityField field;             ///< u(K) = lambda^floor(K_j / N) * b
    BandedPhaseField band;           ///< the matched banded phase field
    double deviation_fraction = 0.0; ///< joints where u != band modulation of tau_b
    double deviation_constant = 0.0; ///< deviation_fraction * N
};

ModulatedRibbonFlex modulated_ribbon_flex(const TilingFramework& tf, int family,
                                          int band_width, std::complex<double> lambda,
                                          Vec2 b);

/// Banded phase field whose bands track blocks of band_width consecutive
/// family-j ribbons; shared by the modulated flex and the slippage witness.
BandedPhaseField matched_band_field(const TilingFramework& tf, int family,
                                    int band_width, std::complex<double> lambda);

struct ApproximantReport {
    MultigridSpec spec;
    std::vector<double> deviations;
    double max_deviation = 0.0;
};

/// Replace every normal with the unit vector along the best rational direction
/// (p1, p2), |pi| <= 4q; the angular deviation per family is at most atan(1/q).
ApproximantReport rational_approximant(const MultigridSpec& spec, int q);

} // namespace rumkit
