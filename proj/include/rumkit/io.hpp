#pragma once

#include <string>

#include "rumkit/framework.hpp"
#include "rumkit/multigrid.hpp"
#include "rumkit/rum_engine.hpp"
#include "rumkit/spectra.hpp"

namespace rumkit {

/// Kind of document found in a JSON file, for CLI dispatch.
enum class DocumentKind { Crystal, Tiling, Field, Figure, MultigridSpec, Unknown };
DocumentKind probe_document(const std::string& path);

// Canonical serialization: keys in sorted order, floats at 17 significant
// digits. save-then-load-then-save is byte identical.
std::string crystal_to_json(const CrystalFramework& c);
std::string tiling_to_json(const Tiling& t);
std::string multigrid_spec_to_json(const MultigridSpec& s);
std::string figure_to_json(const LineFigure& f, const std::string& kind);
std::string field_to_json(const VelocityField& u, const std::string& framework_ref);

CrystalFramework crystal_from_json(const std::string& text);
Tiling tiling_from_json(const std::string& text);
MultigridSpec multigrid_spec_from_json(const std::string& text);
LineFigure figure_from_json(const std::string& text, std::string* kind = nullptr);
VelocityField field_from_json(const std::string& text, std::string* framework_ref = nullptr);

// File forms; writes are atomic (temp file + rename).
void save_crystal(const std::string& path, const CrystalFramework& c);
CrystalFramework load_crystal(const std::string& path);
void save_tiling(const std::string& path, const Tiling& t);
Tiling load_tiling(const std::string& path);
void save_multigrid_spec(const std::string& path, const MultigridSpec& s);
MultigridSpec load_multigrid_spec(const std::string& path);
void save_figure(const std::string& path, const LineFigure& f, const std::string& kind);
LineFigure load_figure(const std::string& path, std::string* kind = nullptr);
void save_field(const std::string& path, const VelocityField& u,
                const std::string& framework_ref);
VelocityField load_field(const std::string& path, std::string* framework_ref = nullptr);

std::string read_text_file(const std::string& path);
void write_text_atomic(const std::string& path, const std::string& content);

// CSV emitters (deterministic row order, 17 significant digits)
std::string scan_to_csv(const SpectrumScan& scan);
void emit_scan_csv(const std::string& path, const SpectrumScan& scan);
std::string figure_to_csv(const LineFigure& f, const std::string& kind);
void emit_figure_csv(const std::string& path, const LineFigure& f, const std::string& kind);

// SVG renderers
std::string figure_to_svg(const LineFigure& f, double extent);
std::string reduced_figure_to_svg(const ReducedFigure& f);
std::string tiling_to_svg(const Tiling& t);
void emit_svg(const std::string& path, const std::string& svg);

} // namespace rumkit
