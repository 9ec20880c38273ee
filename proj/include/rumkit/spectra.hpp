#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rumkit/geometry.hpp"
#include "rumkit/multigrid.hpp"
#include "rumkit/phase_fields.hpp"

namespace rumkit {

enum class SpectrumKind { Slippage, Limit };

/// A linear zero mode spectrum: lines through the origin of the reciprocal
/// space of a reference basis, together with the ambient source figure.
struct SpectrumFigure {
    SpectrumKind kind = SpectrumKind::Slippage;
    LineFigure figure;         ///< reciprocal lines
    LineFigure ambient_source; ///< the ambient figure it was mapped from
    Basis2 basis = Basis2::standard();
};

/// theta_a image of an ambient line figure (for tilings: of the ribbon figure).
SpectrumFigure slippage_spectrum(const LineFigure& ambient, const Basis2& a);
SpectrumFigure slippage_spectrum(const Tiling& t, const Basis2& a);

/// For regular multigrid frameworks the limit spectrum equals the slippage
/// spectrum; this refuses anything without multigrid provenance.
SpectrumFigure limit_spectrum_multigrid(const Tiling& t, const Basis2& a);

/// Reduced (mod Z^2) view of a spectrum figure with the density dichotomy:
/// a line whose direction fails the bounded-denominator rational test marks
/// the reduced figure as dense.
struct ReducedFigure {
    struct LineReduction {
        ProjLine line;
        bool rational = false;
        std::vector<Segment> segments;
    };
    std::vector<LineReduction> lines;
    bool dense = false;
    double truncation = 0.0;
    std::size_t segment_count() const;
};

ReducedFigure reduce_figure(const LineFigure& figure, double truncation,
                            long long max_denominator = 64);

struct SlippageWitness {
    VelocityField field;      ///< sum of per-band pair-slippage flexes
    Vec2 b;                   ///< common translation velocity
    int band_width = 0;       ///< N, in ribbon-index units
    int gap_layers = 0;       ///< vertex layers skipped at each band edge
    double deviation_fraction = 0.0;
    MostlyCloseStats stats;   ///< against the restriction of tau_b
    BandedPhaseField band;    ///< geometric bands containing the supports
};

/// Certify the family-j ribbon direction as a periodic slippage line: build
/// pair-slippage flexes with disjoint band supports, sum them and test
/// mostly-eps-closeness against tau_b.
SlippageWitness verify_periodic_slippage(const TilingFramework& tf, int family,
                                         double eps);

struct GenericSlippageResult {
    bool found = false;
    std::string reason;
    std::optional<VelocityField> field;
    double transverse_extent = 0.0;
};

/// Slippage search on a plain framework: remove the bars parallel to each bar
/// direction class in turn and look for a connected component that stays
/// within `max_width` of a line parallel to h. Reports failure (no
/// translational-type band flexes) when no class yields one.
GenericSlippageResult find_band_slippage_flex(const FiniteFramework& fw,
                                              const ProjLine& h, double max_width);

/// Hausdorff distance between the unions of the two figures' lines clipped to
/// [-N, N]^2, by dense sampling at stride N/1000.
double figure_distance_clipped(const LineFigure& f1, const LineFigure& f2, double n_clip);

} // namespace rumkit
