#include "perclab/dual.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

namespace perclab {

namespace {

struct DartRef {
    Dart d;
    double angle;
};

int tail_site(const PlaneLattice& L, Dart d) {
    return d.forward ? L.bonds[std::size_t(d.bond)].a : L.bonds[std::size_t(d.bond)].b;
}

int head_site(const PlaneLattice& L, Dart d) {
    return d.forward ? L.bonds[std::size_t(d.bond)].b : L.bonds[std::size_t(d.bond)].a;
}

Cell dart_offset(const PlaneLattice& L, Dart d) {
    const Cell off = L.bonds[std::size_t(d.bond)].offset;
    return d.forward ? off : -off;
}

Vec2 dart_direction(const PlaneLattice& L, Dart d) {
    const Vec2 tail = L.site_point(tail_site(L, d));
    const Vec2 head = L.site_point(head_site(L, d), dart_offset(L, d));
    return head - tail;
}

}  // namespace

Embedding trace_faces(const PlaneLattice& L) {
    if (!L.planar) {
        throw Error(ErrorKind::InvalidSpec, "face tracing needs a planar lattice");
    }
    const int n_darts = int(L.bonds.size()) * 2;

    // Rotation system: darts leaving each site, counterclockwise by angle.
    std::vector<std::vector<DartRef>> rot(L.sites.size());
    for (int b = 0; b < int(L.bonds.size()); ++b) {
        for (bool fwd : {true, false}) {
            const Dart d{b, fwd};
            rot[std::size_t(tail_site(L, d))].push_back(
                {d, dart_direction(L, d).angle()});
        }
    }
    for (auto& list : rot) {
        std::sort(list.begin(), list.end(),
                  [](const DartRef& x, const DartRef& y) { return x.angle < y.angle; });
    }
    auto next_dart = [&](Dart d) {
        // Reverse the dart, then step clockwise in the rotation system at its
        // tail; iterating this traversal keeps the face on the left.
        const Dart r{d.bond, !d.forward};
        const auto& list = rot[std::size_t(tail_site(L, r))];
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (list[i].d == r) {
                return list[(i + list.size() - 1) % list.size()].d;
            }
        }
        throw Error(ErrorKind::Internal, "dart missing from rotation system");
    };

    Embedding emb;
    emb.dart_face.assign(std::size_t(n_darts), -1);
    emb.dart_cell.assign(std::size_t(n_darts), Cell{});

    for (int b = 0; b < int(L.bonds.size()); ++b) {
        for (bool fwd : {true, false}) {
            const Dart start{b, fwd};
            if (emb.dart_face[std::size_t(Embedding::dart_index(start))] >= 0) continue;
            Face face;
            Dart d = start;
            Cell cell{0, 0};
            const int guard = 4 * n_darts + 8;
            for (int step = 0; step < guard; ++step) {
                const int idx = Embedding::dart_index(d);
                if (emb.dart_face[std::size_t(idx)] >= 0) {
                    throw Error(ErrorKind::InvalidSpec,
                                "face trace revisited a dart; embedding is not planar");
                }
                emb.dart_face[std::size_t(idx)] = int(emb.faces.size());
                emb.dart_cell[std::size_t(idx)] = cell;
                face.darts.push_back(d);
                face.cells.push_back(cell);
                cell = cell + dart_offset(L, d);
                d = next_dart(d);
                if (d == start) break;
            }
            if (!(d == start) || !(cell == Cell{0, 0})) {
                throw Error(ErrorKind::InvalidSpec,
                            "face did not close; drawing is not a plane lattice");
            }
            Vec2 sum{0, 0};
            for (std::size_t i = 0; i < face.darts.size(); ++i) {
                sum += L.site_point(tail_site(L, face.darts[i]), face.cells[i]);
            }
            face.centroid = sum * (1.0 / double(face.darts.size()));
            const Vec2 uv = L.basis.coords(face.centroid);
            face.anchor_cell = {int(std::floor(uv.x)), int(std::floor(uv.y))};
            emb.faces.push_back(std::move(face));
        }
    }

    // Euler characteristic on the torus quotient.
    const int euler = int(L.sites.size()) - int(L.bonds.size()) + int(emb.faces.size());
    if (euler != 0) {
        throw Error(ErrorKind::InvalidSpec,
                    "V - E + F != 0 on the torus quotient (" + std::to_string(euler) + ")");
    }
    return emb;
}

DualPair dual(const PlaneLattice& L) {
    const Embedding emb = trace_faces(L);

    DualPair D;
    D.primal = L;
    D.dual.name = L.name + "*";
    D.dual.basis = L.basis;
    D.dual.planar = true;

    for (int f = 0; f < int(emb.faces.size()); ++f) {
        const Face& face = emb.faces[f];
        Site s;
        s.id = f;
        const Vec2 uv = L.basis.coords(face.centroid);
        s.pos = {uv.x - std::floor(uv.x), uv.y - std::floor(uv.y)};
        s.cls = "f" + std::to_string(face.degree());
        D.dual.sites.push_back(s);
    }

    bool multi = false;
    std::set<std::pair<int, int>> seen_pairs;
    D.dual_cell_shift.resize(L.bonds.size());
    for (int b = 0; b < int(L.bonds.size()); ++b) {
        const int fwd_idx = Embedding::dart_index({b, true});
        const int bwd_idx = Embedding::dart_index({b, false});
        const int f_left = emb.dart_face[std::size_t(fwd_idx)];
        const int f_right = emb.dart_face[std::size_t(bwd_idx)];
        // The face instance left of dart (b,+) in cell 0 is the canonical
        // trace of f_left translated by -dart_cell; anchor it to the
        // fundamental domain through the face's anchor cell.
        const Cell a_cell = emb.faces[std::size_t(f_left)].anchor_cell -
                            emb.dart_cell[std::size_t(fwd_idx)];
        const Cell b_cell = emb.faces[std::size_t(f_right)].anchor_cell -
                            emb.dart_cell[std::size_t(bwd_idx)];
        Bond e;
        e.id = b;
        e.a = f_left;
        e.b = f_right;
        e.offset = b_cell - a_cell;
        e.cls = L.bonds[std::size_t(b)].cls;
        D.dual.bonds.push_back(e);
        D.dual_cell_shift[std::size_t(b)] = a_cell;
        if (f_left == f_right) multi = true;  // loop edge (bridge in primal)
        if (!seen_pairs.insert({std::min(f_left, f_right), std::max(f_left, f_right)}).second) {
            multi = true;
        }
    }
    // Parallel dual bonds are drawn on coincident segments; skip the
    // straight-line drawing checks for them.
    D.dual.drawing_validated = !multi;
    validate_lattice(D.dual, /*check_drawing=*/!multi);
    return D;
}

PlaneLattice matching_graph(const PlaneLattice& L) {
    if (!L.planar) {
        throw Error(ErrorKind::InvalidSpec, "matching graph needs a planar lattice");
    }
    const Embedding emb = trace_faces(L);

    // Adjacency lookup for "non-adjacent pair in a common face".
    std::set<std::tuple<int, int, int, int>> adjacent;
    for (const auto& b : L.bonds) {
        adjacent.insert({b.a, b.b, b.offset.i, b.offset.j});
        adjacent.insert({b.b, b.a, -b.offset.i, -b.offset.j});
    }
    auto is_adjacent = [&](int s1, Cell c1, int s2, Cell c2) {
        const Cell off = c2 - c1;
        return adjacent.count({s1, s2, off.i, off.j}) > 0;
    };

    std::set<std::tuple<int, int, int, int>> chords;
    for (const Face& face : emb.faces) {
        const std::size_t f = face.darts.size();
        for (std::size_t i = 0; i < f; ++i) {
            for (std::size_t j = i + 1; j < f; ++j) {
                int s1 = 0, s2 = 0;
                Cell c1 = face.cells[i], c2 = face.cells[j];
                s1 = face.darts[i].forward ? L.bonds[std::size_t(face.darts[i].bond)].a
                                           : L.bonds[std::size_t(face.darts[i].bond)].b;
                s2 = face.darts[j].forward ? L.bonds[std::size_t(face.darts[j].bond)].a
                                           : L.bonds[std::size_t(face.darts[j].bond)].b;
                if (s1 == s2 && c1 == c2) continue;  // same vertex instance
                if (is_adjacent(s1, c1, s2, c2)) continue;
                // Canonical translation class of the chord.
                Cell off = c2 - c1;
                int a = s1, b = s2;
                if (a > b || (a == b && (off.i < 0 || (off.i == 0 && off.j < 0)))) {
                    std::swap(a, b);
                    off = -off;
                }
                chords.insert({a, b, off.i, off.j});
            }
        }
    }

    PlaneLattice M = L;
    M.name = L.name + "+";
    int next_id = int(M.bonds.size());
    for (const auto& [a, b, oi, oj] : chords) {
        Bond e;
        e.id = next_id++;
        e.a = a;
        e.b = b;
        e.offset = {oi, oj};
        e.cls = "chord";
        M.bonds.push_back(e);
    }
    if (!chords.empty()) {
        M.planar = false;
        M.drawing_validated = false;
    }
    validate_lattice(M, /*check_drawing=*/false);
    return M;
}

bool DualityReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const DualityCheck& c) { return c.pass; });
}

std::string DualityReport::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& c : checks) {
        j[c.name] = {{"result", c.pass ? "pass" : "fail"}, {"detail", c.detail}};
    }
    return j.dump(2);
}

DualityReport verify_duality(const DualPair& D, int instance_size) {
    DualityReport rep;
    auto add = [&](const std::string& name, bool pass, const std::string& detail) {
        rep.checks.push_back({name, pass, detail});
    };

    // Bijection totality: one dual bond per primal bond, endpoints valid.
    {
        bool ok = D.dual.bonds.size() == D.primal.bonds.size() &&
                  D.dual_cell_shift.size() == D.primal.bonds.size();
        for (const auto& b : D.dual.bonds) {
            if (b.a < 0 || b.a >= int(D.dual.sites.size()) || b.b < 0 ||
                b.b >= int(D.dual.sites.size())) {
                ok = false;
            }
        }
        add("bijection_total", ok,
            std::to_string(D.primal.bonds.size()) + " primal vs " +
                std::to_string(D.dual.bonds.size()) + " dual bonds");
    }

    // Edge counts per torus instance.
    {
        const long long cells = 1ll * instance_size * instance_size;
        const long long e1 = cells * (long long)(D.primal.bonds.size());
        const long long e2 = cells * (long long)(D.dual.bonds.size());
        add("edge_count_equal", e1 == e2,
            "|E|=" + std::to_string(e1) + " |E*|=" + std::to_string(e2));
    }

    // Face/vertex exchange: V(G*) = F(G), E(G*) = E(G).
    {
        bool ok = true;
        std::string detail;
        try {
            const Embedding emb = trace_faces(D.primal);
            ok = int(D.dual.sites.size()) == int(emb.faces.size());
            detail = "F(G)=" + std::to_string(emb.faces.size()) +
                     " V(G*)=" + std::to_string(D.dual.sites.size());
        } catch (const Error& e) {
            ok = false;
            detail = e.what();
        }
        add("dual_vertices_are_faces", ok, detail);
    }

    // Double dual.
    {
        bool positional = false, combinatorial = false;
        std::string detail;
        try {
            const DualPair DD = dual(D.dual);
            positional = isomorphic_up_to_translation(DD.dual, D.primal);
            combinatorial = isomorphic_combinatorial(DD.dual, D.primal);
        } catch (const Error& e) {
            detail = e.what();
        }
        add("double_dual_combinatorial", combinatorial, detail);
        add("double_dual_positional", positional,
            positional ? "" : "centroid drawing shifts low-symmetry sites");
    }

    // Each primal bond segment crosses its dual partner exactly once
    // (skipped for multigraph duals whose drawings coincide).
    if (D.dual.drawing_validated) {
        bool ok = true;
        std::string detail;
        for (std::size_t b = 0; b < D.primal.bonds.size(); ++b) {
            const auto& pb = D.primal.bonds[b];
            const auto& db = D.dual.bonds[b];
            const Vec2 a1 = D.primal.site_point(pb.a);
            const Vec2 a2 = D.primal.site_point(pb.b, pb.offset);
            const Cell shift = D.dual_cell_shift[b];
            const Vec2 b1 = D.dual.site_point(db.a, shift);
            const Vec2 b2 = D.dual.site_point(db.b, shift + db.offset);
            if (!segments_cross(a1, a2, b1, b2)) {
                ok = false;
                detail = "bond " + std::to_string(b) + " does not cross its dual";
                break;
            }
        }
        add("edge_dual_crossing", ok, detail);
    } else {
        add("edge_dual_crossing", true, "skipped: dual has parallel bonds");
    }

    return rep;
}

}  // namespace perclab
