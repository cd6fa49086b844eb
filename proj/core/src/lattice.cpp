#include "perclab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace perclab {

using nlohmann::json;

namespace {

constexpr double kSqrt3 = 1.7320508075688772935274463415059;

Bond make_bond(int id, int a, int b, Cell off, std::string cls) {
    Bond e;
    e.id = id;
    e.a = a;
    e.b = b;
    e.offset = off;
    e.cls = std::move(cls);
    return e;
}

Site make_site(int id, Vec2 pos, std::string cls = "s") {
    Site s;
    s.id = id;
    s.pos = pos;
    s.cls = std::move(cls);
    return s;
}

PlaneLattice square_lattice() {
    PlaneLattice L;
    L.name = "square";
    L.basis = {{1, 0}, {0, 1}};
    L.sites = {make_site(0, {0, 0})};
    L.bonds = {make_bond(0, 0, 0, {1, 0}, "h"), make_bond(1, 0, 0, {0, 1}, "v")};
    return L;
}

PlaneLattice triangular_lattice() {
    PlaneLattice L;
    L.name = "triangular";
    L.basis = {{1, 0}, {0.5, kSqrt3 / 2}};
    L.sites = {make_site(0, {0, 0})};
    // Three orientation classes (anisotropic weights attach per class).
    L.bonds = {make_bond(0, 0, 0, {1, 0}, "t0"), make_bond(1, 0, 0, {0, 1}, "t1"),
               make_bond(2, 0, 0, {-1, 1}, "t2")};
    return L;
}

PlaneLattice hexagonal_lattice() {
    PlaneLattice L;
    L.name = "hexagonal";
    L.basis = {{1, 0}, {0.5, kSqrt3 / 2}};
    // Sites at the two triangle centers; hexagon centers land on the origin's
    // translates, so the origin is a 6-fold center.
    L.sites = {make_site(0, {1.0 / 3, 1.0 / 3}), make_site(1, {2.0 / 3, 2.0 / 3})};
    L.bonds = {make_bond(0, 0, 1, {0, 0}, "h0"), make_bond(1, 1, 0, {1, 0}, "h1"),
               make_bond(2, 1, 0, {0, 1}, "h2")};
    return L;
}

PlaneLattice kagome_lattice() {
    PlaneLattice L;
    L.name = "kagome";
    L.basis = {{1, 0}, {0.5, kSqrt3 / 2}};
    L.sites = {make_site(0, {0.5, 0}), make_site(1, {0, 0.5}),
               make_site(2, {0.5, 0.5})};
    // Up triangle in the base cell, down triangle across cells; classes pair
    // the two bonds of each orientation.
    L.bonds = {make_bond(0, 0, 1, {0, 0}, "k120"), make_bond(1, 0, 2, {0, 0}, "k60"),
               make_bond(2, 1, 2, {0, 0}, "k0"),   make_bond(3, 2, 1, {1, 0}, "k0"),
               make_bond(4, 2, 0, {0, 1}, "k60"),  make_bond(5, 1, 0, {-1, 1}, "k120")};
    return L;
}

// Hexagonal lattice plus the long chord of every hexagon (through its
// center). 2-fold about the origin, not 3-fold: the chord direction is not
// preserved by 120-degree rotation.
PlaneLattice fig1_left_lattice() {
    PlaneLattice L = hexagonal_lattice();
    L.name = "fig1-left";
    L.bonds.push_back(make_bond(3, 0, 1, {-1, -1}, "diag"));
    return L;
}

// Hexagonal lattice plus a short chord cutting one corner of every hexagon.
// Mirror-symmetric but without rotational symmetry of any order.
PlaneLattice fig1_right_lattice() {
    PlaneLattice L = hexagonal_lattice();
    L.name = "fig1-right";
    L.bonds.push_back(make_bond(3, 0, 0, {1, 0}, "chord"));
    return L;
}

double lattice_scale(const PlaneLattice& L) {
    return std::max(L.basis.w1.norm(), L.basis.w2.norm());
}

}  // namespace

std::vector<std::string> PlaneLattice::bond_classes() const {
    std::set<std::string> cs;
    for (const auto& b : bonds) cs.insert(b.cls);
    return {cs.begin(), cs.end()};
}

std::vector<std::string> PlaneLattice::site_classes() const {
    std::set<std::string> cs;
    for (const auto& s : sites) cs.insert(s.cls);
    return {cs.begin(), cs.end()};
}

int PlaneLattice::degree(int site) const {
    int d = 0;
    for (const auto& b : bonds) {
        if (b.a == site) ++d;
        if (b.b == site) ++d;
    }
    return d;
}

bool is_builtin_lattice(const std::string& name) {
    for (const auto& n : builtin_lattice_names()) {
        if (n == name) return true;
    }
    return false;
}

std::vector<std::string> builtin_lattice_names() {
    return {"square", "triangular", "hexagonal", "kagome", "fig1-left",
            "fig1-right"};
}

PlaneLattice build_lattice(const std::string& spec) {
    PlaneLattice L;
    if (spec == "square") L = square_lattice();
    else if (spec == "triangular") L = triangular_lattice();
    else if (spec == "hexagonal") L = hexagonal_lattice();
    else if (spec == "kagome") L = kagome_lattice();
    else if (spec == "fig1-left") L = fig1_left_lattice();
    else if (spec == "fig1-right") L = fig1_right_lattice();
    else throw Error(ErrorKind::InvalidSpec, "unknown lattice spec: " + spec);
    validate_lattice(L);
    return L;
}

std::vector<PatchVertex> enumerate_patch(const PlaneLattice& L, Vec2 center,
                                         double radius) {
    // Cell range: |i*w1 + j*w2 - center| <= radius + cell diameter implies
    // bounds on |i|, |j| via the inverse basis.
    const double diam = (L.basis.w1 + L.basis.w2).norm() +
                        (L.basis.w1 - L.basis.w2).norm();
    const double reach = radius + diam;
    const Vec2 c0 = L.basis.coords(center);
    const double inv_scale =
        std::abs(L.basis.det()) / std::max(L.basis.w1.norm(), L.basis.w2.norm());
    const int span = int(std::ceil(reach / inv_scale)) + 2;

    std::vector<PatchVertex> out;
    for (int i = int(std::floor(c0.x)) - span; i <= int(std::ceil(c0.x)) + span;
         ++i) {
        for (int j = int(std::floor(c0.y)) - span;
             j <= int(std::ceil(c0.y)) + span; ++j) {
            for (const auto& s : L.sites) {
                const Vec2 p = L.site_point(s.id, {i, j});
                if ((p - center).norm() <= radius) {
                    out.push_back({s.id, {i, j}, p});
                }
            }
        }
    }
    return out;
}

void validate_lattice(const PlaneLattice& L, bool check_drawing) {
    const double scale = lattice_scale(L);
    if (std::abs(L.basis.det()) <= 1e-12 * scale * scale) {
        throw Error(ErrorKind::InvalidSpec, "basis vectors are dependent");
    }
    if (L.sites.empty() || L.bonds.empty()) {
        throw Error(ErrorKind::InvalidSpec, "lattice needs sites and bonds");
    }
    for (std::size_t i = 0; i < L.sites.size(); ++i) {
        if (L.sites[i].id != int(i)) {
            throw Error(ErrorKind::InvalidSpec, "site ids must be 0..n-1 in order");
        }
        const Vec2 uv = L.sites[i].pos;
        if (uv.x < -1e-12 || uv.x >= 1.0 - 1e-12 || uv.y < -1e-12 ||
            uv.y >= 1.0 - 1e-12) {
            throw Error(ErrorKind::InvalidSpec,
                        "site position outside the half-open fundamental domain");
        }
    }
    for (std::size_t i = 0; i < L.sites.size(); ++i) {
        for (std::size_t j = i + 1; j < L.sites.size(); ++j) {
            if (near(L.site_point(int(i)), L.site_point(int(j)), kGeomTol * scale)) {
                throw Error(ErrorKind::InvalidSpec, "coincident sites");
            }
        }
    }
    const int n = int(L.sites.size());
    for (const auto& b : L.bonds) {
        if (b.a < 0 || b.a >= n || b.b < 0 || b.b >= n) {
            throw Error(ErrorKind::InvalidSpec, "bond endpoint out of range");
        }
        if (b.a == b.b && b.offset == Cell{0, 0}) {
            throw Error(ErrorKind::InvalidSpec, "zero-length bond");
        }
    }

    // Connectivity: BFS over a block of copies must reach every site of the
    // central cells; a disconnected periodic graph leaves whole translates
    // unreached (bounded check, like the symmetry detector).
    {
        const int B = 7;  // block [-B,B]^2 of cells
        auto vid = [&](int s, int i, int j) {
            return (s * (2 * B + 1) + (i + B)) * (2 * B + 1) + (j + B);
        };
        const int nv = n * (2 * B + 1) * (2 * B + 1);
        std::vector<std::vector<int>> adj(nv);
        for (int i = -B; i <= B; ++i) {
            for (int j = -B; j <= B; ++j) {
                for (const auto& b : L.bonds) {
                    const int i2 = i + b.offset.i, j2 = j + b.offset.j;
                    if (i2 < -B || i2 > B || j2 < -B || j2 > B) continue;
                    adj[vid(b.a, i, j)].push_back(vid(b.b, i2, j2));
                    adj[vid(b.b, i2, j2)].push_back(vid(b.a, i, j));
                }
            }
        }
        std::vector<char> seen(nv, 0);
        std::vector<int> stack = {vid(0, 0, 0)};
        seen[stack[0]] = 1;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int w : adj[v]) {
                if (!seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
            }
        }
        for (int s = 0; s < n; ++s) {
            for (int i = -1; i <= 1; ++i) {
                for (int j = -1; j <= 1; ++j) {
                    if (!seen[vid(s, i, j)]) {
                        throw Error(ErrorKind::InvalidSpec, "lattice is disconnected");
                    }
                }
            }
        }
    }

    if (!L.planar || !check_drawing || !L.drawing_validated) return;

    // Straight-segment drawing on a 3x3 block of copies: no two bond
    // segments cross or overlap except at shared endpoints, and no site lies
    // in the interior of a bond.
    struct Seg {
        Vec2 a, b;
    };
    std::vector<Seg> segs;
    for (int i = -1; i <= 1; ++i) {
        for (int j = -1; j <= 1; ++j) {
            for (const auto& b : L.bonds) {
                segs.push_back({L.site_point(b.a, {i, j}),
                                L.site_point(b.b, b.offset + Cell{i, j})});
            }
        }
    }
    for (std::size_t i = 0; i < segs.size(); ++i) {
        for (std::size_t j = i + 1; j < segs.size(); ++j) {
            if (segments_cross(segs[i].a, segs[i].b, segs[j].a, segs[j].b) ||
                segments_overlap(segs[i].a, segs[i].b, segs[j].a, segs[j].b,
                                 kGeomTol * scale)) {
                throw Error(ErrorKind::InvalidSpec,
                            "bond segments cross in the plane drawing");
            }
        }
    }
    for (const auto& seg : segs) {
        for (int i = -1; i <= 1; ++i) {
            for (int j = -1; j <= 1; ++j) {
                for (const auto& s : L.sites) {
                    const Vec2 p = L.site_point(s.id, {i, j});
                    if (near(p, seg.a, kGeomTol * scale) ||
                        near(p, seg.b, kGeomTol * scale)) {
                        continue;
                    }
                    if (segment_point_distance(seg.a, seg.b, p) <= kGeomTol * scale) {
                        throw Error(ErrorKind::InvalidSpec,
                                    "site lies in the interior of a bond segment");
                    }
                }
            }
        }
    }
}

SymmetryOrder detect_rotational_symmetry(const PlaneLattice& L, Vec2 center,
                                         double patch_radius) {
    const double min_radius = 3.0 * lattice_scale(L);
    if (patch_radius < min_radius) {
        throw Error(ErrorKind::Config, "patch_radius below 3*max(|w1|,|w2|)");
    }

    // Membership set over a larger patch; candidates drawn from a smaller one
    // so rotated images stay inside the membership region.
    const auto big = enumerate_patch(L, center, patch_radius * 2.0);
    PointIndex index;
    for (std::size_t v = 0; v < big.size(); ++v) {
        index.insert(big[v].pos, int(v));
    }

    std::vector<Vec2> test_points;
    std::vector<std::pair<Vec2, Vec2>> test_edges;
    const auto small = enumerate_patch(L, center, patch_radius);
    PointIndex small_index;
    for (std::size_t v = 0; v < small.size(); ++v) {
        small_index.insert(small[v].pos, int(v));
        test_points.push_back(small[v].pos);
    }
    for (const auto& pv : small) {
        for (const auto& b : L.bonds) {
            if (b.a == pv.site) {
                const Vec2 q = L.site_point(b.b, b.offset + pv.cell);
                if ((q - center).norm() <= patch_radius) {
                    test_edges.push_back({pv.pos, q});
                }
            }
        }
    }

    // An edge between matched vertices must itself exist; keyed by unordered
    // endpoint pair (midpoint hashing would collide for crossing chords).
    auto has_edge = [&](Vec2 a, Vec2 b) {
        const int ia = index.find(a);
        if (ia < 0) return false;
        const auto& pv = big[std::size_t(ia)];
        for (const auto& bond : L.bonds) {
            if (bond.a == pv.site &&
                near(L.site_point(bond.b, bond.offset + pv.cell), b)) {
                return true;
            }
            if (bond.b == pv.site &&
                near(L.site_point(bond.a, pv.cell - bond.offset), b)) {
                return true;
            }
        }
        return false;
    };

    for (int k : {6, 4, 3, 2}) {
        const double theta = two_pi() / k;
        bool ok = true;
        for (const Vec2& p : test_points) {
            if (index.find(center + rotate(p - center, theta)) < 0) {
                ok = false;
                break;
            }
        }
        if (ok) {
            for (const auto& [a, b] : test_edges) {
                if (!has_edge(center + rotate(a - center, theta),
                              center + rotate(b - center, theta))) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) return {k, center};
    }
    return {1, center};
}

// ---- JSON I/O -------------------------------------------------------------

PlaneLattice lattice_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::InvalidSpec, std::string("bad lattice JSON: ") + e.what());
    }
    PlaneLattice L;
    try {
        L.name = j.value("name", "custom");
        const auto& basis = j.at("basis");
        L.basis.w1 = {basis.at(0).at(0).get<double>(), basis.at(0).at(1).get<double>()};
        L.basis.w2 = {basis.at(1).at(0).get<double>(), basis.at(1).at(1).get<double>()};
        for (const auto& s : j.at("sites")) {
            Site site;
            site.id = s.at("id").get<int>();
            site.pos = {s.at("pos").at(0).get<double>(), s.at("pos").at(1).get<double>()};
            site.cls = s.value("class", "s");
            L.sites.push_back(site);
        }
        for (const auto& b : j.at("bonds")) {
            Bond bond;
            bond.id = b.at("id").get<int>();
            bond.a = b.at("a").get<int>();
            bond.b = b.at("b").get<int>();
            bond.offset = {b.at("offset").at(0).get<int>(), b.at("offset").at(1).get<int>()};
            bond.cls = b.value("class", "e");
            L.bonds.push_back(bond);
        }
        if (j.contains("site_classes")) {
            for (auto& s : L.sites) {
                const std::string key = std::to_string(s.id);
                if (j["site_classes"].contains(key)) {
                    s.cls = j["site_classes"][key].get<std::string>();
                }
            }
        }
        L.planar = j.value("planar", true);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::InvalidSpec, std::string("bad lattice JSON: ") + e.what());
    }
    std::sort(L.sites.begin(), L.sites.end(),
              [](const Site& a, const Site& b) { return a.id < b.id; });
    std::sort(L.bonds.begin(), L.bonds.end(),
              [](const Bond& a, const Bond& b) { return a.id < b.id; });
    validate_lattice(L);
    return L;
}

std::string lattice_to_json(const PlaneLattice& L) {
    json j;
    j["name"] = L.name;
    j["basis"] = {{L.basis.w1.x, L.basis.w1.y}, {L.basis.w2.x, L.basis.w2.y}};
    j["sites"] = json::array();
    for (const auto& s : L.sites) {
        j["sites"].push_back({{"id", s.id}, {"pos", {s.pos.x, s.pos.y}}, {"class", s.cls}});
    }
    j["bonds"] = json::array();
    for (const auto& b : L.bonds) {
        j["bonds"].push_back({{"id", b.id},
                              {"a", b.a},
                              {"b", b.b},
                              {"offset", {b.offset.i, b.offset.j}},
                              {"class", b.cls}});
    }
    j["site_classes"] = json::object();
    for (const auto& s : L.sites) j["site_classes"][std::to_string(s.id)] = s.cls;
    j["planar"] = L.planar;
    return j.dump(2) + "\n";
}

PlaneLattice load_lattice_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Config, "cannot open lattice file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return lattice_from_json(ss.str());
}

void save_lattice_file(const PlaneLattice& L, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Config, "cannot write lattice file: " + path);
    out << lattice_to_json(L);
}

PlaneLattice resolve_lattice(const std::string& name_or_path) {
    if (is_builtin_lattice(name_or_path)) return build_lattice(name_or_path);
    return load_lattice_file(name_or_path);
}

// ---- isomorphism ----------------------------------------------------------

namespace {

Vec2 frac_coords(Vec2 uv) {
    const double fu = uv.x - std::floor(uv.x);
    const double fv = uv.y - std::floor(uv.y);
    return {fu, fv};
}

struct CanonicalBond {
    int a, b;
    Cell off;
    bool operator<(const CanonicalBond& o) const {
        if (a != o.a) return a < o.a;
        if (b != o.b) return b < o.b;
        if (off.i != o.off.i) return off.i < o.off.i;
        return off.j < o.off.j;
    }
    bool operator==(const CanonicalBond&) const = default;
};

CanonicalBond canonical_bond(int a, int b, Cell off) {
    if (a > b || (a == b && (off.i < 0 || (off.i == 0 && off.j < 0)))) {
        return {b, a, -off};
    }
    return {a, b, off};
}

std::multiset<CanonicalBond> bond_multiset(const PlaneLattice& L,
                                           const std::vector<int>& site_map,
                                           const std::vector<Cell>& shift) {
    std::multiset<CanonicalBond> out;
    for (const auto& b : L.bonds) {
        const Cell off = b.offset + shift[std::size_t(b.b)] - shift[std::size_t(b.a)];
        out.insert(canonical_bond(site_map[std::size_t(b.a)],
                                  site_map[std::size_t(b.b)], off));
    }
    return out;
}

}  // namespace

bool isomorphic_up_to_translation(const PlaneLattice& A, const PlaneLattice& B) {
    if (A.sites.size() != B.sites.size() || A.bonds.size() != B.bonds.size()) {
        return false;
    }
    if (!near(A.basis.w1, B.basis.w1) || !near(A.basis.w2, B.basis.w2)) {
        return false;
    }
    const double scale = std::max(A.basis.w1.norm(), A.basis.w2.norm());
    const std::size_t n = A.sites.size();

    for (std::size_t j0 = 0; j0 < n; ++j0) {
        // Candidate translation maps A site 0 onto B site j0.
        const Vec2 t = B.sites[j0].pos - A.sites[0].pos;
        std::vector<int> site_map(n, -1);
        std::vector<Cell> shift(n);
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            const Vec2 uv = A.sites[i].pos + t;
            const Vec2 f = frac_coords(uv);
            ok = false;
            for (std::size_t j = 0; j < n; ++j) {
                Vec2 d = f - B.sites[j].pos;
                // positions compare modulo 1 in each basis coordinate
                d.x -= std::round(d.x);
                d.y -= std::round(d.y);
                if (B.basis.embed(d).norm() <= kGeomTol * scale) {
                    site_map[i] = int(j);
                    const Vec2 cellv = uv - B.sites[j].pos;
                    shift[i] = {int(std::lround(cellv.x)), int(std::lround(cellv.y))};
                    ok = true;
                    break;
                }
            }
        }
        if (!ok) continue;
        std::vector<int> ident(n);
        std::vector<Cell> zero(n);
        for (std::size_t i = 0; i < n; ++i) ident[i] = int(i);
        if (bond_multiset(A, site_map, shift) == bond_multiset(B, ident, zero)) {
            return true;
        }
    }
    return false;
}

bool isomorphic_combinatorial(const PlaneLattice& A, const PlaneLattice& B) {
    const std::size_t n = A.sites.size();
    if (n != B.sites.size() || A.bonds.size() != B.bonds.size()) return false;

    // Backtrack over site permutations with per-site cell shifts anchored by
    // bond offsets. Quotients are tiny (a handful of sites), so brute force
    // over permutations is fine; shifts are pinned by a spanning set of bonds.
    std::vector<int> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = int(i);
    std::vector<int> degA(n, 0), degB(n, 0);
    for (const auto& b : A.bonds) {
        ++degA[std::size_t(b.a)];
        ++degA[std::size_t(b.b)];
    }
    for (const auto& b : B.bonds) {
        ++degB[std::size_t(b.a)];
        ++degB[std::size_t(b.b)];
    }

    std::sort(perm.begin(), perm.end());
    do {
        bool deg_ok = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (degA[i] != degB[std::size_t(perm[i])]) {
                deg_ok = false;
                break;
            }
        }
        if (!deg_ok) continue;

        // Solve for shifts: bond (a,b,off) must map to some B bond between
        // perm[a], perm[b]; shift differences are constrained by offsets.
        // Try shift of site 0 = 0 and propagate along a BFS tree of A.
        std::vector<Cell> shift(n);
        std::vector<char> have(n, 0);
        have[0] = 1;
        bool progress = true;
        bool feasible = true;
        while (progress && feasible) {
            progress = false;
            for (const auto& b : A.bonds) {
                const auto sa = std::size_t(b.a), sb = std::size_t(b.b);
                if (have[sa] == have[sb]) continue;
                // Pick any B bond between the mapped endpoints to pin the shift.
                Cell pin;
                bool found = false;
                for (const auto& c : B.bonds) {
                    if (c.a == perm[sa] && c.b == perm[sb]) {
                        pin = c.offset;
                        found = true;
                        break;
                    }
                    if (c.b == perm[sa] && c.a == perm[sb]) {
                        pin = -c.offset;
                        found = true;
                        break;
                    }
                }
                if (!found) {
                    feasible = false;
                    break;
                }
                if (have[sa]) {
                    shift[sb] = shift[sa] + b.offset - pin;
                    have[sb] = 1;
                } else {
                    shift[sa] = shift[sb] - b.offset + pin;
                    have[sa] = 1;
                }
                progress = true;
            }
        }
        if (!feasible) continue;
        if (std::any_of(have.begin(), have.end(), [](char c) { return !c; })) {
            continue;  // disconnected quotient; validation rejects these anyway
        }
        std::vector<int> ident(n);
        std::vector<Cell> zero(n);
        for (std::size_t i = 0; i < n; ++i) ident[i] = int(i);
        if (bond_multiset(A, perm, shift) == bond_multiset(B, ident, zero)) {
            return true;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

}  // namespace perclab
