#pragma once

#include "rumkit/framework.hpp"
#include "rumkit/multigrid.hpp"

namespace rumkit {
namespace presets {

/// Unit square grid: one joint, bars along both axes.
CrystalFramework square_grid();

/// Square grid braced with one diagonal per cell (infinitesimally rigid).
CrystalFramework braced_grid();

/// Kagome lattice with unit edges; basis {(2,0), (1, sqrt 3)}, 3 joints,
/// 6 edges per cell.
CrystalFramework kagome();

/// The three edge-direction lines of the kagome tiling.
LineFigure kagome_edge_lines();

/// Two disconnected joints joined by a single bar per cell (free bars).
CrystalFramework disjoint_bars();

/// Braced grid carrying a pinned four-bar ring per cell; the ring spins about
/// its pin, so a cell-local mechanism exists.
CrystalFramework pinned_ring();

/// Braced grid with each row augmented by a chain of pinned triangles linked
/// joint-to-joint. Its spectrum is trivial while a row-localised flex with
/// geometrically growing velocities exists. The ratio of that geometric
/// recurrence is returned through `growth` when non-null.
CrystalFramework augmented_grid_rows(double* growth = nullptr);

/// Square 2-grid (axes normals, axis edge vectors).
MultigridSpec square_2grid(double window);

/// Symmetric 3-grid at 120 degrees with matching edge vectors; dualizes to
/// the rhombille tiling.
MultigridSpec rhombille_3grid(double window);

/// Periodicity basis of the rhombille dualization of rhombille_3grid.
Basis2 rhombille_basis();

/// Symmetric pentagrid with edge vectors equal to the normals and the
/// recorded offset vector (0.2, 0.1, 0.05, -0.15, -0.2); dualizes to a
/// Penrose rhomb tiling.
MultigridSpec penrose_pentagrid(double window);

/// Ammann-Beenker tetragrid: normals at 45 degree spacing, edges = normals.
MultigridSpec ammann_beenker_tetragrid(double window);

} // namespace presets
} // namespace rumkit
