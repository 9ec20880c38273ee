#include "rumkit/presets.hpp"

namespace rumkit {
namespace presets {

CrystalFramework square_grid() {
    return CrystalFramework(Basis2::standard(), {{0.0, 0.0}},
                            {{0, 0, {1, 0}}, {0, 0, {0, 1}}});
}

CrystalFramework braced_grid() {
    return CrystalFramework(Basis2::standard(), {{0.0, 0.0}},
                            {{0, 0, {1, 0}}, {0, 0, {0, 1}}, {0, 0, {1, 1}}});
}

CrystalFramework kagome() {
    const double s = std::sqrt(3.0);
    Basis2 basis({2.0, 0.0}, {1.0, s});
    std::vector<Vec2> joints{{0.0, 0.0}, {1.0, 0.0}, {0.5, 0.5 * s}};
    std::vector<MotifEdge> edges{
        {0, 1, {0, 0}},  // horizontal
        {1, 2, {0, 0}},  // 120-degree
        {2, 0, {0, 0}},  // 60-degree
        {1, 0, {1, 0}},  // horizontal, next cell
        {2, 0, {0, 1}},  // 60-degree, next cell
        {2, 1, {-1, 1}}, // 120-degree, next cell
    };
    return CrystalFramework(basis, std::move(joints), std::move(edges));
}

LineFigure kagome_edge_lines() {
    const double s = std::sqrt(3.0);
    LineFigure f;
    f.insert(ProjLine(Vec2{1.0, 0.0}));
    f.insert(ProjLine(Vec2{1.0, s}));
    f.insert(ProjLine(Vec2{-1.0, s}));
    return f;
}

CrystalFramework disjoint_bars() {
    return CrystalFramework(Basis2::standard(), {{0.1, 0.1}, {0.5, 0.4}},
                            {{0, 1, {0, 0}}});
}

CrystalFramework pinned_ring() {
    // rigid braced-grid backbone plus a diamond of four bars hung off one pin
    std::vector<Vec2> joints{
        {0.0, 0.0},   // backbone
        {0.45, 0.30}, // ring
        {0.60, 0.45},
        {0.45, 0.60},
        {0.30, 0.45},
    };
    std::vector<MotifEdge> edges{
        {0, 0, {1, 0}}, {0, 0, {0, 1}}, {0, 0, {1, 1}}, // braced grid
        {1, 2, {0, 0}}, {2, 3, {0, 0}}, {3, 4, {0, 0}}, {4, 1, {0, 0}}, // ring
        {0, 1, {0, 0}},                                                 // pin
    };
    return CrystalFramework(Basis2::standard(), std::move(joints), std::move(edges));
}

CrystalFramework augmented_grid_rows(double* growth) {
    // backbone joint G at the origin; triangle joints P, Q pinned to G; the
    // link Q -> P of the next cell chains the triangles along each row
    const Vec2 g{0.0, 0.0};
    const Vec2 p{0.32, 0.44};
    const Vec2 q{0.61, 0.37};
    std::vector<Vec2> joints{g, p, q};
    std::vector<MotifEdge> edges{
        {0, 0, {1, 0}}, {0, 0, {0, 1}}, {0, 0, {1, 1}}, // rigid substrate
        {0, 1, {0, 0}}, {0, 2, {0, 0}}, {1, 2, {0, 0}}, // pinned triangle
        {2, 1, {1, 0}},                                 // link to the next triangle
    };
    if (growth) {
        // spin triangle i about G_i with rate s_i; the link bar forces
        // s_{i+1} = rho * s_i
        Vec2 link = (p + Vec2{1.0, 0.0}) - q;
        double num = dot(rot90(q - g), link);
        double den = dot(rot90(p - g), link);
        *growth = num / den;
    }
    return CrystalFramework(Basis2::standard(), std::move(joints), std::move(edges));
}

MultigridSpec square_2grid(double window) {
    MultigridSpec spec;
    spec.window = window;
    spec.families.push_back({{1.0, 0.0}, 0.25, {1.0, 0.0}});
    spec.families.push_back({{0.0, 1.0}, 0.10, {0.0, 1.0}});
    return spec;
}

MultigridSpec rhombille_3grid(double window) {
    MultigridSpec spec;
    spec.window = window;
    const double offsets[3] = {0.13, 0.07, -0.04};
    for (int j = 0; j < 3; ++j) {
        double ang = 2.0 * M_PI * j / 3.0;
        Vec2 n{std::cos(ang), std::sin(ang)};
        spec.families.push_back({n, offsets[j], n});
    }
    return spec;
}

Basis2 rhombille_basis() {
    // grid periods (2,0), (1, sqrt 3) map to tiling translations through
    // M = sum n_j n_j^T = (3/2) I
    const double s = std::sqrt(3.0);
    return Basis2({3.0, 0.0}, {1.5, 1.5 * s});
}

MultigridSpec penrose_pentagrid(double window) {
    MultigridSpec spec;
    spec.window = window;
    const double offsets[5] = {0.2, 0.1, 0.05, -0.15, -0.2};
    for (int j = 0; j < 5; ++j) {
        double ang = 2.0 * M_PI * j / 5.0;
        Vec2 n{std::cos(ang), std::sin(ang)};
        spec.families.push_back({n, offsets[j], n});
    }
    return spec;
}

MultigridSpec ammann_beenker_tetragrid(double window) {
    MultigridSpec spec;
    spec.window = window;
    const double offsets[4] = {0.11, 0.23, -0.08, 0.17};
    for (int j = 0; j < 4; ++j) {
        double ang = M_PI * j / 4.0;
        Vec2 n{std::cos(ang), std::sin(ang)};
        spec.families.push_back({n, offsets[j], n});
    }
    return spec;
}

} // namespace presets
} // namespace rumkit
