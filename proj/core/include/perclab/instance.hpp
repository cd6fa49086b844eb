#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "perclab/dual.hpp"
#include "perclab/lattice.hpp"

namespace perclab {

enum class Topology { Torus, Disc, Box };

struct InstanceVertex {
    int site = 0;
    Cell cell;
    Vec2 pos;
};

// Edge between instance vertices u, v realizing lattice bond `bond`.
// `winding` counts how many times the edge wraps each torus direction
// (always zero on discs and boxes).
struct InstanceEdge {
    int u = 0;
    int v = 0;
    int bond = 0;
    Cell winding;
};

// An edge-circle crossing point on the boundary of D_R. `outside_vertex` is
// the endpoint reached from the crossing without re-entering the disc.
struct BoundaryCrossing {
    int edge = 0;
    double angle = 0.0;
    Vec2 point;
    int outside_vertex = 0;
};

struct DiscData {
    double requested_radius = 0.0;
    double radius = 0.0;  // adjusted so the circle avoids vertices/tangencies
    double margin = 0.0;  // M: the "escapes to infinity" proxy distance
    std::vector<BoundaryCrossing> crossings;
    std::vector<char> vertex_far;    // |pos| >= M
    std::vector<char> edge_outside;  // segment strictly outside D_R
};

struct FiniteInstance {
    Topology topology = Topology::Torus;
    int m = 0, n = 0;  // torus/box cell counts
    PlaneLattice lattice;
    std::vector<InstanceVertex> vertices;
    std::vector<InstanceEdge> edges;
    std::vector<int> vertex_class = {};  // index into site_class_names
    std::vector<int> edge_class = {};    // index into bond_class_names
    std::vector<std::string> site_class_names;
    std::vector<std::string> bond_class_names;

    std::optional<DiscData> disc;
    std::vector<int> boundary_vertices;  // box topology only

    // Paired dual instance: dual->edges[dual_edge_of[e]] is e*.
    std::shared_ptr<const FiniteInstance> dual;
    std::vector<int> dual_edge_of;

    // CSR adjacency: for vertex v, adjacency[adj_start[v]..adj_start[v+1])
    // holds (neighbor, edge index).
    std::vector<int> adj_start;
    std::vector<std::pair<int, int>> adjacency;

    int vertex_count() const { return int(vertices.size()); }
    int edge_count() const { return int(edges.size()); }
    void build_adjacency();
};

// m*n copies of the fundamental domain with bonds wrapped modulo (m, n).
// `with_dual` pairs a torus instance of the dual lattice edge-for-edge.
FiniteInstance instantiate_torus(const PlaneLattice& L, int m, int n,
                                 bool with_dual = false);

// Every vertex and edge meeting the disc of radius `margin`, with the
// boundary crossings of the circle of radius R enumerated. The whole
// embedding is first rotated by 0.1 rad so no edge runs parallel to the
// x-axis; R is nudged by +1e-6*|w1| until the circle avoids all vertices,
// crosses edges transversally, has pairwise-distinct crossing angles
// (1e-12) and keeps (R,0) off every edge. With `with_dual`, the dual
// drawing participates in all of those constraints.
FiniteInstance instantiate_disc(const PlaneLattice& L, double radius,
                                double margin, bool with_dual = true);

// m*n box: the torus instance with wrapping edges removed. Boundary
// vertices are the endpoints of removed edges.
FiniteInstance instantiate_box(const PlaneLattice& L, int m, int n);

// Face tracing on an instance (torus quotient) from the drawn geometry.
// Used for Euler checks and triangulation tests on randomly decorated
// instances that exist only as instances.
struct InstanceFace {
    std::vector<std::pair<int, bool>> darts;  // (edge, forward)
};
std::vector<InstanceFace> trace_instance_faces(const FiniteInstance& I);

// Instance-level matching chord count: pairs of distinct face-boundary
// vertices not adjacent in the instance. Zero exactly for triangulations.
std::size_t instance_matching_chord_count(const FiniteInstance& I);

}  // namespace perclab
