#include "perclab/instance.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace perclab {

namespace {

constexpr double kDiscRotation = 0.1;  // rad; breaks axis-parallel edges
constexpr long long kMaxInstanceElements = 1 << 26;

int floor_div(int a, int b) {
    int q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

int mod_pos(int a, int b) {
    int r = a % b;
    if (r < 0) r += b;
    return r;
}

std::vector<int> class_ids(const std::vector<std::string>& names,
                           const std::vector<std::string>& labels) {
    std::vector<int> ids;
    ids.reserve(labels.size());
    for (const auto& l : labels) {
        const auto it = std::find(names.begin(), names.end(), l);
        ids.push_back(int(it - names.begin()));
    }
    return ids;
}

}  // namespace

void FiniteInstance::build_adjacency() {
    adj_start.assign(vertices.size() + 1, 0);
    for (const auto& e : edges) {
        ++adj_start[std::size_t(e.u) + 1];
        ++adj_start[std::size_t(e.v) + 1];
    }
    for (std::size_t i = 1; i < adj_start.size(); ++i) {
        adj_start[i] += adj_start[i - 1];
    }
    adjacency.assign(std::size_t(adj_start.back()), {});
    std::vector<int> fill(adj_start.begin(), adj_start.end() - 1);
    for (int ei = 0; ei < int(edges.size()); ++ei) {
        const auto& e = edges[std::size_t(ei)];
        adjacency[std::size_t(fill[std::size_t(e.u)]++)] = {e.v, ei};
        adjacency[std::size_t(fill[std::size_t(e.v)]++)] = {e.u, ei};
    }
}

FiniteInstance instantiate_torus(const PlaneLattice& L, int m, int n,
                                 bool with_dual) {
    if (m < 2 || n < 2) {
        throw Error(ErrorKind::Config, "torus needs m, n >= 2");
    }
    const int S = int(L.sites.size());
    const int B = int(L.bonds.size());
    if (1ll * m * n * std::max(S, B) > kMaxInstanceElements) {
        throw Error(ErrorKind::Config, "torus instance exceeds capacity");
    }

    FiniteInstance I;
    I.topology = Topology::Torus;
    I.m = m;
    I.n = n;
    I.lattice = L;
    I.site_class_names = L.site_classes();
    I.bond_class_names = L.bond_classes();

    std::vector<std::string> site_labels, bond_labels;
    site_labels.reserve(std::size_t(S));
    for (const auto& s : L.sites) site_labels.push_back(s.cls);
    bond_labels.reserve(std::size_t(B));
    for (const auto& b : L.bonds) bond_labels.push_back(b.cls);
    const auto site_cls = class_ids(I.site_class_names, site_labels);
    const auto bond_cls = class_ids(I.bond_class_names, bond_labels);

    auto vid = [&](int i, int j, int s) { return (i * n + j) * S + s; };

    I.vertices.reserve(std::size_t(m) * std::size_t(n) * std::size_t(S));
    I.vertex_class.reserve(I.vertices.capacity());
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int s = 0; s < S; ++s) {
                I.vertices.push_back({s, {i, j}, L.site_point(s, {i, j})});
                I.vertex_class.push_back(site_cls[std::size_t(s)]);
            }
        }
    }
    I.edges.reserve(std::size_t(m) * std::size_t(n) * std::size_t(B));
    I.edge_class.reserve(I.edges.capacity());
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int b = 0; b < B; ++b) {
                const auto& bond = L.bonds[std::size_t(b)];
                const int ti = i + bond.offset.i, tj = j + bond.offset.j;
                InstanceEdge e;
                e.u = vid(i, j, bond.a);
                e.v = vid(mod_pos(ti, m), mod_pos(tj, n), bond.b);
                e.bond = b;
                e.winding = {floor_div(ti, m), floor_div(tj, n)};
                I.edges.push_back(e);
                I.edge_class.push_back(bond_cls[std::size_t(b)]);
            }
        }
    }
    I.build_adjacency();

    if (with_dual) {
        const DualPair D = dual(L);
        auto dual_inst = std::make_shared<FiniteInstance>(
            instantiate_torus(D.dual, m, n, false));
        I.dual_edge_of.resize(I.edges.size());
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n; ++j) {
                for (int b = 0; b < B; ++b) {
                    const Cell s = D.dual_cell_shift[std::size_t(b)];
                    const int di = mod_pos(i + s.i, m), dj = mod_pos(j + s.j, n);
                    I.dual_edge_of[std::size_t((i * n + j) * B + b)] =
                        (di * n + dj) * B + b;
                }
            }
        }
        I.dual = std::move(dual_inst);
    }
    return I;
}

FiniteInstance instantiate_box(const PlaneLattice& L, int m, int n) {
    FiniteInstance I = instantiate_torus(L, m, n, false);
    I.topology = Topology::Box;
    std::vector<InstanceEdge> kept;
    std::vector<int> kept_cls;
    std::set<int> boundary;
    for (std::size_t ei = 0; ei < I.edges.size(); ++ei) {
        const auto& e = I.edges[ei];
        if (e.winding == Cell{0, 0}) {
            kept.push_back(e);
            kept_cls.push_back(I.edge_class[ei]);
        } else {
            boundary.insert(e.u);
            boundary.insert(e.v);
        }
    }
    I.edges = std::move(kept);
    I.edge_class = std::move(kept_cls);
    I.boundary_vertices.assign(boundary.begin(), boundary.end());
    I.build_adjacency();
    return I;
}

namespace {

struct DiscBuild {
    std::vector<InstanceVertex> vertices;
    std::vector<InstanceEdge> edges;          // winding zero
    std::vector<int> edge_bond;               // lattice bond per edge
    std::vector<Cell> edge_cell;              // base cell of each edge
};

// All edges of `L` (drawn with `basis`) whose segment meets the disc of
// radius `margin`, together with the incident vertices.
DiscBuild collect_disc_edges(const PlaneLattice& L, const Basis& basis,
                             double margin) {
    double max_span = 0.0;
    for (const auto& b : L.bonds) {
        const Vec2 d = basis.embed(L.sites[std::size_t(b.b)].pos + Vec2(double(b.offset.i), double(b.offset.j)) -
                                   L.sites[std::size_t(b.a)].pos);
        max_span = std::max(max_span, d.norm());
    }
    const double vertex_reach = margin + max_span + 1.0;

    PlaneLattice Ld = L;
    Ld.basis = basis;

    DiscBuild out;
    PointIndex vindex(1e-5);
    auto vertex_id = [&](int site, Cell cell) {
        const Vec2 p = Ld.site_point(site, cell);
        int id = vindex.find(p);
        if (id < 0) {
            id = int(out.vertices.size());
            out.vertices.push_back({site, cell, p});
            vindex.insert(p, id);
        }
        return id;
    };

    const auto patch = enumerate_patch(Ld, {0, 0}, vertex_reach);
    for (const auto& pv : patch) {
        for (const auto& b : L.bonds) {
            if (b.a != pv.site) continue;
            const Cell tc = pv.cell + b.offset;
            const Vec2 q = Ld.site_point(b.b, tc);
            if (segment_point_distance(pv.pos, q, {0, 0}) > margin) continue;
            InstanceEdge e;
            e.u = vertex_id(b.a, pv.cell);
            e.v = vertex_id(b.b, tc);
            e.bond = b.id;
            out.edges.push_back(e);
            out.edge_bond.push_back(b.id);
            out.edge_cell.push_back(pv.cell);
        }
    }
    return out;
}

struct CircleScan {
    std::vector<BoundaryCrossing> crossings;
    bool clean = true;
};

CircleScan scan_circle(const std::vector<InstanceVertex>& vertices,
                       const std::vector<InstanceEdge>& edges, double radius) {
    CircleScan out;
    for (const auto& v : vertices) {
        if (std::abs(v.pos.norm() - radius) <= kGeomTol) {
            out.clean = false;
            return out;
        }
    }
    for (int ei = 0; ei < int(edges.size()); ++ei) {
        const auto& e = edges[std::size_t(ei)];
        const Vec2 a = vertices[std::size_t(e.u)].pos;
        const Vec2 b = vertices[std::size_t(e.v)].pos;
        const auto res = segment_circle_crossings(a, b, radius);
        if (res.tangent) {
            out.clean = false;
            return out;
        }
        if (res.crossings.empty()) continue;
        if (res.crossings.size() == 1) {
            const bool a_out = a.norm() > radius;
            out.crossings.push_back(
                {ei, res.crossings[0].angle, res.crossings[0].point,
                 a_out ? e.u : e.v});
        } else {
            // Straight segment: out-in-out, one crossing adjacent to each end.
            out.crossings.push_back(
                {ei, res.crossings[0].angle, res.crossings[0].point, e.u});
            out.crossings.push_back(
                {ei, res.crossings[1].angle, res.crossings[1].point, e.v});
        }
    }
    std::sort(out.crossings.begin(), out.crossings.end(),
              [](const BoundaryCrossing& x, const BoundaryCrossing& y) {
                  return x.angle < y.angle;
              });
    return out;
}

bool angles_generic(const std::vector<double>& all_angles) {
    for (std::size_t i = 0; i + 1 < all_angles.size(); ++i) {
        if (all_angles[i + 1] - all_angles[i] <= 1e-12) return false;
    }
    if (!all_angles.empty()) {
        // Q_0 sits at angle 0; keep every crossing clear of it.
        if (all_angles.front() <= kGeomTol ||
            two_pi() - all_angles.back() <= kGeomTol) {
            return false;
        }
    }
    return true;
}

void mark_disc_flags(FiniteInstance& I) {
    auto& d = *I.disc;
    d.vertex_far.assign(I.vertices.size(), 0);
    for (std::size_t v = 0; v < I.vertices.size(); ++v) {
        d.vertex_far[v] = I.vertices[v].pos.norm() >= d.margin ? 1 : 0;
    }
    d.edge_outside.assign(I.edges.size(), 0);
    for (std::size_t e = 0; e < I.edges.size(); ++e) {
        const Vec2 a = I.vertices[std::size_t(I.edges[e].u)].pos;
        const Vec2 b = I.vertices[std::size_t(I.edges[e].v)].pos;
        d.edge_outside[e] =
            segment_point_distance(a, b, {0, 0}) > d.radius ? 1 : 0;
    }
}

}  // namespace

FiniteInstance instantiate_disc(const PlaneLattice& L, double radius,
                                double margin, bool with_dual) {
    if (!(radius > 0) || margin < 2 * radius) {
        throw Error(ErrorKind::Config, "disc needs R > 0 and M >= 2R");
    }
    if (with_dual && !L.planar) {
        throw Error(ErrorKind::Config, "dual pairing needs a planar lattice");
    }

    Basis rotated{rotate(L.basis.w1, kDiscRotation),
                  rotate(L.basis.w2, kDiscRotation)};

    FiniteInstance I;
    I.topology = Topology::Disc;
    I.lattice = L;
    I.lattice.basis = rotated;
    I.site_class_names = L.site_classes();
    I.bond_class_names = L.bond_classes();

    DiscBuild primal = collect_disc_edges(L, rotated, margin);
    I.vertices = std::move(primal.vertices);
    I.edges = primal.edges;
    {
        std::vector<std::string> site_labels, bond_labels;
        for (const auto& v : I.vertices) {
            site_labels.push_back(L.sites[std::size_t(v.site)].cls);
        }
        for (const auto& e : I.edges) {
            bond_labels.push_back(L.bonds[std::size_t(e.bond)].cls);
        }
        I.vertex_class = class_ids(I.site_class_names, site_labels);
        I.edge_class = class_ids(I.bond_class_names, bond_labels);
    }

    // Paired dual drawing: one dual edge per primal edge, dual vertices are
    // the faces touching kept edges.
    std::shared_ptr<FiniteInstance> dual_inst;
    if (with_dual) {
        const DualPair D = dual(L);
        if (!D.dual.drawing_validated) {
            throw Error(ErrorKind::Config,
                        "dual drawing has coincident parallel bonds; disc "
                        "instantiation is not defined for it");
        }
        dual_inst = std::make_shared<FiniteInstance>();
        dual_inst->topology = Topology::Disc;
        dual_inst->lattice = D.dual;
        dual_inst->lattice.basis = rotated;
        dual_inst->site_class_names = D.dual.site_classes();
        dual_inst->bond_class_names = D.dual.bond_classes();

        PlaneLattice dual_drawn = D.dual;
        dual_drawn.basis = rotated;
        PointIndex vindex(1e-5);
        auto dual_vertex_id = [&](int site, Cell cell) {
            const Vec2 p = dual_drawn.site_point(site, cell);
            int id = vindex.find(p);
            if (id < 0) {
                id = int(dual_inst->vertices.size());
                dual_inst->vertices.push_back({site, cell, p});
                vindex.insert(p, id);
            }
            return id;
        };
        I.dual_edge_of.resize(I.edges.size());
        for (std::size_t e = 0; e < I.edges.size(); ++e) {
            const int b = primal.edge_bond[e];
            const Cell cell = primal.edge_cell[e] + D.dual_cell_shift[std::size_t(b)];
            const auto& db = D.dual.bonds[std::size_t(b)];
            InstanceEdge de;
            de.u = dual_vertex_id(db.a, cell);
            de.v = dual_vertex_id(db.b, cell + db.offset);
            de.bond = b;
            dual_inst->edges.push_back(de);
            I.dual_edge_of[e] = int(e);
        }
        {
            std::vector<std::string> site_labels, bond_labels;
            for (const auto& v : dual_inst->vertices) {
                site_labels.push_back(D.dual.sites[std::size_t(v.site)].cls);
            }
            for (const auto& e : dual_inst->edges) {
                bond_labels.push_back(D.dual.bonds[std::size_t(e.bond)].cls);
            }
            dual_inst->vertex_class =
                class_ids(dual_inst->site_class_names, site_labels);
            dual_inst->edge_class =
                class_ids(dual_inst->bond_class_names, bond_labels);
        }
        dual_inst->build_adjacency();
    }

    // Nudge R until the circle is in generic position w.r.t. both drawings.
    const double nudge = 1e-6 * L.basis.w1.norm();
    double R = radius;
    CircleScan pscan, dscan;
    bool ok = false;
    for (int attempt = 0; attempt < 1000; ++attempt) {
        pscan = scan_circle(I.vertices, I.edges, R);
        if (!pscan.clean) {
            R += nudge;
            continue;
        }
        std::vector<double> angles;
        for (const auto& c : pscan.crossings) angles.push_back(c.angle);
        if (dual_inst) {
            dscan = scan_circle(dual_inst->vertices, dual_inst->edges, R);
            if (!dscan.clean) {
                R += nudge;
                continue;
            }
            for (const auto& c : dscan.crossings) angles.push_back(c.angle);
        }
        std::sort(angles.begin(), angles.end());
        if (!angles_generic(angles)) {
            R += nudge;
            continue;
        }
        ok = true;
        break;
    }
    if (!ok) {
        throw Error(ErrorKind::Internal, "could not find a generic disc radius");
    }

    I.disc = DiscData{};
    I.disc->requested_radius = radius;
    I.disc->radius = R;
    I.disc->margin = margin;
    I.disc->crossings = std::move(pscan.crossings);
    mark_disc_flags(I);
    I.build_adjacency();

    if (dual_inst) {
        dual_inst->disc = DiscData{};
        dual_inst->disc->requested_radius = radius;
        dual_inst->disc->radius = R;
        dual_inst->disc->margin = margin;
        dual_inst->disc->crossings = std::move(dscan.crossings);
        mark_disc_flags(*dual_inst);
        I.dual = std::move(dual_inst);
    }
    return I;
}

std::vector<InstanceFace> trace_instance_faces(const FiniteInstance& I) {
    if (I.topology != Topology::Torus) {
        throw Error(ErrorKind::Config, "instance face tracing expects a torus");
    }
    const Vec2 span1 = I.lattice.basis.w1 * double(I.m);
    const Vec2 span2 = I.lattice.basis.w2 * double(I.n);

    // Darts: (edge, forward). Direction from drawn geometry with winding.
    auto dart_dir = [&](int e, bool fwd) {
        const auto& ed = I.edges[std::size_t(e)];
        const Vec2 head = I.vertices[std::size_t(ed.v)].pos +
                          span1 * double(ed.winding.i) + span2 * double(ed.winding.j);
        const Vec2 tail = I.vertices[std::size_t(ed.u)].pos;
        return fwd ? head - tail : tail - head;
    };
    auto dart_tail = [&](int e, bool fwd) {
        const auto& ed = I.edges[std::size_t(e)];
        return fwd ? ed.u : ed.v;
    };

    std::vector<std::vector<std::pair<double, std::pair<int, bool>>>> rot(
        I.vertices.size());
    for (int e = 0; e < I.edge_count(); ++e) {
        for (bool fwd : {true, false}) {
            rot[std::size_t(dart_tail(e, fwd))].push_back(
                {dart_dir(e, fwd).angle(), {e, fwd}});
        }
    }
    for (auto& list : rot) std::sort(list.begin(), list.end());

    auto next_dart = [&](std::pair<int, bool> d) {
        const std::pair<int, bool> r{d.first, !d.second};
        const auto& list = rot[std::size_t(dart_tail(r.first, r.second))];
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (list[i].second == r) {
                return list[(i + list.size() - 1) % list.size()].second;
            }
        }
        throw Error(ErrorKind::Internal, "instance dart missing");
    };

    std::vector<char> used(I.edges.size() * 2, 0);
    auto idx = [](std::pair<int, bool> d) {
        return std::size_t(d.first) * 2 + (d.second ? 0 : 1);
    };
    std::vector<InstanceFace> faces;
    for (int e = 0; e < I.edge_count(); ++e) {
        for (bool fwd : {true, false}) {
            std::pair<int, bool> start{e, fwd};
            if (used[idx(start)]) continue;
            InstanceFace face;
            std::pair<int, bool> d = start;
            do {
                used[idx(d)] = 1;
                face.darts.push_back(d);
                d = next_dart(d);
            } while (!(d == start) && face.darts.size() <= I.edges.size() * 2);
            faces.push_back(std::move(face));
        }
    }
    return faces;
}

std::size_t instance_matching_chord_count(const FiniteInstance& I) {
    const auto faces = trace_instance_faces(I);
    std::set<std::pair<int, int>> adj;
    for (const auto& e : I.edges) {
        adj.insert({std::min(e.u, e.v), std::max(e.u, e.v)});
    }
    std::set<std::pair<int, int>> chords;
    for (const auto& f : faces) {
        std::vector<int> verts;
        for (const auto& [e, fwd] : f.darts) {
            verts.push_back(fwd ? I.edges[std::size_t(e)].u : I.edges[std::size_t(e)].v);
        }
        for (std::size_t i = 0; i < verts.size(); ++i) {
            for (std::size_t j = i + 1; j < verts.size(); ++j) {
                if (verts[i] == verts[j]) continue;
                const auto key = std::make_pair(std::min(verts[i], verts[j]),
                                                std::max(verts[i], verts[j]));
                if (!adj.count(key)) chords.insert(key);
            }
        }
    }
    return chords.size();
}

}  // namespace perclab
