#include "rumkit/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rumkit {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_pair(Vec2 v) { return "[" + fmt(v.x) + "," + fmt(v.y) + "]"; }

[[noreturn]] void schema_error(const std::string& pointer, const std::string& what) {
    throw ValidationError("schema violation at " + pointer + ": " + what);
}

const json& member(const json& j, const char* key, const std::string& pointer) {
    if (!j.is_object()) schema_error(pointer, "expected object");
    auto it = j.find(key);
    if (it == j.end()) schema_error(pointer + "/" + key, "missing");
    return *it;
}

double number_at(const json& j, const std::string& pointer) {
    if (!j.is_number()) schema_error(pointer, "expected number");
    return j.get<double>();
}

int int_at(const json& j, const std::string& pointer) {
    if (!j.is_number_integer()) schema_error(pointer, "expected integer");
    return j.get<int>();
}

Vec2 vec2_at(const json& j, const std::string& pointer) {
    if (!j.is_array() || j.size() != 2) schema_error(pointer, "expected [x, y]");
    return {number_at(j[0], pointer + "/0"), number_at(j[1], pointer + "/1")};
}

void check_version(const json& j, const std::string& pointer) {
    const json& v = member(j, "version", pointer);
    if (!v.is_string() || v.get<std::string>() != "1") {
        schema_error(pointer + "/version", "expected \"1\"");
    }
}

json parse(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ValidationError("schema violation at /: not valid JSON");
    return j;
}

} // namespace

std::string crystal_to_json(const CrystalFramework& c) {
    std::ostringstream os;
    os << "{\"basis\":[" << fmt_pair(c.basis().a1()) << "," << fmt_pair(c.basis().a2())
       << "],\"motif_edges\":[";
    for (std::size_t i = 0; i < c.motif_edges().size(); ++i) {
        const auto& e = c.motif_edges()[i];
        if (i) os << ",";
        os << "{\"from\":" << e.from << ",\"offset\":[" << e.offset[0] << ","
           << e.offset[1] << "],\"to\":" << e.to << "}";
    }
    os << "],\"motif_joints\":[";
    for (std::size_t i = 0; i < c.motif_joints().size(); ++i) {
        if (i) os << ",";
        os << fmt_pair(c.motif_joints()[i]);
    }
    os << "],\"version\":\"1\"}";
    return os.str();
}

CrystalFramework crystal_from_json(const std::string& text) {
    json j = parse(text);
    check_version(j, "");
    const json& jb = member(j, "basis", "");
    if (!jb.is_array() || jb.size() != 2) schema_error("/basis", "expected two vectors");
    Basis2 basis(vec2_at(jb[0], "/basis/0"), vec2_at(jb[1], "/basis/1"));

    const json& jj = member(j, "motif_joints", "");
    if (!jj.is_array() || jj.empty()) schema_error("/motif_joints", "expected nonempty array");
    std::vector<Vec2> joints;
    for (std::size_t i = 0; i < jj.size(); ++i) {
        joints.push_back(vec2_at(jj[i], "/motif_joints/" + std::to_string(i)));
    }

    const json& je = member(j, "motif_edges", "");
    if (!je.is_array()) schema_error("/motif_edges", "expected array");
    std::vector<MotifEdge> edges;
    for (std::size_t i = 0; i < je.size(); ++i) {
        std::string p = "/motif_edges/" + std::to_string(i);
        const json& e = je[i];
        MotifEdge edge;
        edge.from = int_at(member(e, "from", p), p + "/from");
        edge.to = int_at(member(e, "to", p), p + "/to");
        const json& off = member(e, "offset", p);
        if (!off.is_array() || off.size() != 2) schema_error(p + "/offset", "expected [i, j]");
        edge.offset = {int_at(off[0], p + "/offset/0"), int_at(off[1], p + "/offset/1")};
        edges.push_back(edge);
    }
    return CrystalFramework(basis, std::move(joints), std::move(edges));
}

namespace {

std::string spec_json_object(const MultigridSpec& s, bool with_version) {
    std::ostringstream os;
    os << "{\"families\":[";
    for (std::size_t i = 0; i < s.families.size(); ++i) {
        const auto& f = s.families[i];
        if (i) os << ",";
        os << "{\"edge\":" << fmt_pair(f.edge) << ",\"normal\":" << fmt_pair(f.normal)
           << ",\"offset\":" << fmt(f.offset) << "}";
    }
    os << "],";
    if (with_version) os << "\"version\":\"1\",";
    os << "\"window\":" << fmt(s.window) << "}";
    return os.str();
}

} // namespace

std::string multigrid_spec_to_json(const MultigridSpec& s) {
    return spec_json_object(s, true);
}

namespace {

MultigridSpec multigrid_spec_from_value(const nlohmann::json& j, const std::string& base) {
    MultigridSpec spec;
    const json& jf = member(j, "families", base);
    if (!jf.is_array() || jf.size() < 2) {
        schema_error(base + "/families", "expected at least two families");
    }
    for (std::size_t i = 0; i < jf.size(); ++i) {
        std::string p = base + "/families/" + std::to_string(i);
        GridFamily fam;
        fam.normal = vec2_at(member(jf[i], "normal", p), p + "/normal");
        fam.edge = vec2_at(member(jf[i], "edge", p), p + "/edge");
        fam.offset = number_at(member(jf[i], "offset", p), p + "/offset");
        spec.families.push_back(fam);
    }
    spec.window = number_at(member(j, "window", base), base + "/window");
    spec.validate();
    return spec;
}

} // namespace

MultigridSpec multigrid_spec_from_json(const std::string& text) {
    json j = parse(text);
    check_version(j, "");
    return multigrid_spec_from_value(j, "");
}

std::string tiling_to_json(const Tiling& t) {
    std::ostringstream os;
    os << "{\"spec\":" << spec_json_object(t.spec(), false) << ",\"tiles\":[";
    for (std::size_t i = 0; i < t.tiles().size(); ++i) {
        const auto& tile = t.tiles()[i];
        if (i) os << ",";
        os << "{\"families\":[" << tile.fam_a << "," << tile.fam_b << "],\"indices\":["
           << tile.idx_a << "," << tile.idx_b << "],\"verts\":[" << tile.verts[0] << ","
           << tile.verts[1] << "," << tile.verts[2] << "," << tile.verts[3] << "]}";
    }
    os << "],\"version\":\"1\",\"vertices\":[";
    for (std::size_t i = 0; i < t.vertex_k().size(); ++i) {
        if (i) os << ",";
        os << "{\"K\":[";
        for (std::size_t j = 0; j < t.vertex_k()[i].size(); ++j) {
            if (j) os << ",";
            os << t.vertex_k()[i][j];
        }
        os << "],\"pos\":" << fmt_pair(t.vertex_pos()[i]) << "}";
    }
    os << "]}";
    return os.str();
}

Tiling tiling_from_json(const std::string& text) {
    json j = parse(text);
    check_version(j, "");
    MultigridSpec spec = multigrid_spec_from_value(member(j, "spec", ""), "/spec");

    const json& jv = member(j, "vertices", "");
    if (!jv.is_array()) schema_error("/vertices", "expected array");
    std::vector<std::vector<int>> ks;
    std::vector<Vec2> pos;
    for (std::size_t i = 0; i < jv.size(); ++i) {
        std::string p = "/vertices/" + std::to_string(i);
        const json& kk = member(jv[i], "K", p);
        if (!kk.is_array() || kk.size() != spec.families.size()) {
            schema_error(p + "/K", "expected one index per family");
        }
        std::vector<int> k;
        for (std::size_t q = 0; q < kk.size(); ++q) {
            k.push_back(int_at(kk[q], p + "/K/" + std::to_string(q)));
        }
        ks.push_back(std::move(k));
        pos.push_back(vec2_at(member(jv[i], "pos", p), p + "/pos"));
    }

    const json& jt = member(j, "tiles", "");
    if (!jt.is_array()) schema_error("/tiles", "expected array");
    std::vector<TileRecord> tiles;
    for (std::size_t i = 0; i < jt.size(); ++i) {
        std::string p = "/tiles/" + std::to_string(i);
        TileRecord tile;
        const json& fams = member(jt[i], "families", p);
        if (!fams.is_array() || fams.size() != 2) schema_error(p + "/families", "expected [j, l]");
        tile.fam_a = int_at(fams[0], p + "/families/0");
        tile.fam_b = int_at(fams[1], p + "/families/1");
        const json& idx = member(jt[i], "indices", p);
        if (!idx.is_array() || idx.size() != 2) schema_error(p + "/indices", "expected [k, m]");
        tile.idx_a = int_at(idx[0], p + "/indices/0");
        tile.idx_b = int_at(idx[1], p + "/indices/1");
        const json& verts = member(jt[i], "verts", p);
        if (!verts.is_array() || verts.size() != 4) schema_error(p + "/verts", "expected 4 ids");
        for (int q = 0; q < 4; ++q) {
            tile.verts[q] = int_at(verts[q], p + "/verts/" + std::to_string(q));
        }
        if (tile.fam_a >= 0 && tile.fam_b >= 0 && tile.fam_a != tile.fam_b &&
            tile.fam_a < spec.family_count() && tile.fam_b < spec.family_count()) {
            tile.intersection = grid_intersection(spec, tile.fam_a, tile.idx_a,
                                                  tile.fam_b, tile.idx_b);
        }
        tiles.push_back(tile);
    }
    Tiling t(std::move(spec), std::move(ks), std::move(pos), std::move(tiles));
    t.validate();
    return t;
}

std::string figure_to_json(const LineFigure& f, const std::string& kind) {
    std::ostringstream os;
    os << "{\"kind\":\"" << kind << "\",\"lines\":[";
    for (std::size_t i = 0; i < f.lines().size(); ++i) {
        if (i) os << ",";
        os << fmt_pair(f.lines()[i].direction());
    }
    os << "],\"version\":\"1\"}";
    return os.str();
}

LineFigure figure_from_json(const std::string& text, std::string* kind) {
    json j = parse(text);
    check_version(j, "");
    const json& jk = member(j, "kind", "");
    if (!jk.is_string()) schema_error("/kind", "expected string");
    if (kind) *kind = jk.get<std::string>();
    const json& jl = member(j, "lines", "");
    if (!jl.is_array()) schema_error("/lines", "expected array");
    LineFigure f;
    for (std::size_t i = 0; i < jl.size(); ++i) {
        f.insert(ProjLine(vec2_at(jl[i], "/lines/" + std::to_string(i))));
    }
    return f;
}

std::string field_to_json(const VelocityField& u, const std::string& framework_ref) {
    std::ostringstream os;
    os << "{\"framework_ref\":\"" << framework_ref << "\",\"values\":[";
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (i) os << ",";
        os << "{\"im\":[" << fmt(u[i].x.imag()) << "," << fmt(u[i].y.imag())
           << "],\"joint\":" << i << ",\"re\":[" << fmt(u[i].x.real()) << ","
           << fmt(u[i].y.real()) << "]}";
    }
    os << "],\"version\":\"1\"}";
    return os.str();
}

VelocityField field_from_json(const std::string& text, std::string* framework_ref) {
    json j = parse(text);
    check_version(j, "");
    const json& jr = member(j, "framework_ref", "");
    if (!jr.is_string()) schema_error("/framework_ref", "expected string");
    if (framework_ref) *framework_ref = jr.get<std::string>();
    const json& jv = member(j, "values", "");
    if (!jv.is_array()) schema_error("/values", "expected array");
    VelocityField u(jv.size());
    for (std::size_t i = 0; i < jv.size(); ++i) {
        std::string p = "/values/" + std::to_string(i);
        int joint = int_at(member(jv[i], "joint", p), p + "/joint");
        if (joint < 0 || static_cast<std::size_t>(joint) >= jv.size()) {
            schema_error(p + "/joint", "joint index out of range");
        }
        Vec2 re = vec2_at(member(jv[i], "re", p), p + "/re");
        Vec2 im = vec2_at(member(jv[i], "im", p), p + "/im");
        u[static_cast<std::size_t>(joint)] = {{re.x, im.x}, {re.y, im.y}};
    }
    return u;
}

DocumentKind probe_document(const std::string& path) {
    json j = parse(read_text_file(path));
    if (!j.is_object()) return DocumentKind::Unknown;
    if (j.contains("motif_joints")) return DocumentKind::Crystal;
    if (j.contains("tiles")) return DocumentKind::Tiling;
    if (j.contains("values")) return DocumentKind::Field;
    if (j.contains("lines")) return DocumentKind::Figure;
    if (j.contains("families")) return DocumentKind::MultigridSpec;
    return DocumentKind::Unknown;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp);
        out << content;
        if (!out) throw IoError("write failed for " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw IoError("cannot move " + tmp + " into place");
    }
}

void save_crystal(const std::string& path, const CrystalFramework& c) {
    write_text_atomic(path, crystal_to_json(c) + "\n");
}
CrystalFramework load_crystal(const std::string& path) {
    return crystal_from_json(read_text_file(path));
}
void save_tiling(const std::string& path, const Tiling& t) {
    write_text_atomic(path, tiling_to_json(t) + "\n");
}
Tiling load_tiling(const std::string& path) {
    return tiling_from_json(read_text_file(path));
}
void save_multigrid_spec(const std::string& path, const MultigridSpec& s) {
    write_text_atomic(path, multigrid_spec_to_json(s) + "\n");
}
MultigridSpec load_multigrid_spec(const std::string& path) {
    return multigrid_spec_from_json(read_text_file(path));
}
void save_figure(const std::string& path, const LineFigure& f, const std::string& kind) {
    write_text_atomic(path, figure_to_json(f, kind) + "\n");
}
LineFigure load_figure(const std::string& path, std::string* kind) {
    return figure_from_json(read_text_file(path), kind);
}
void save_field(const std::string& path, const VelocityField& u,
                const std::string& framework_ref) {
    write_text_atomic(path, field_to_json(u, framework_ref) + "\n");
}
VelocityField load_field(const std::string& path, std::string* framework_ref) {
    return field_from_json(read_text_file(path), framework_ref);
}

} // namespace rumkit
