#pragma once

#include <string>
#include <vector>

#include "perclab/lattice.hpp"

namespace perclab {

// Directed bond-end: bond `bond` traversed forward (a -> b) or backward.
struct Dart {
    int bond = -1;
    bool forward = true;
    bool operator==(const Dart&) const = default;
};

// One face orbit of the quotient rotation system. `darts[i]` is visited at
// cell `cells[i]` when the face is traced in the universal cover starting
// from darts[0] at cell (0,0); a valid plane lattice face closes with zero
// net offset.
struct Face {
    std::vector<Dart> darts;
    std::vector<Cell> cells;
    Vec2 centroid;     // mean of tail-vertex positions along the traced cycle
    Cell anchor_cell;  // fundamental-domain cell containing the centroid
    int degree() const { return int(darts.size()); }
};

// Rotation system plus traced faces of a planar PlaneLattice, on the torus
// quotient. dart_face/dart_cell give for each quotient dart the face orbit
// it lies on and the cell at which the canonical trace of that face visits
// it.
struct Embedding {
    std::vector<Face> faces;
    std::vector<int> dart_face;   // indexed by dart_index()
    std::vector<Cell> dart_cell;

    static int dart_index(Dart d) { return d.bond * 2 + (d.forward ? 0 : 1); }
};

Embedding trace_faces(const PlaneLattice& L);

struct DualPair {
    PlaneLattice primal;
    PlaneLattice dual;
    // Bond bijection: primal bond b corresponds to dual bond b (same index).
    // The dual bond instance paired with primal bond b in cell c is the dual
    // bond at cell c + dual_cell_shift[b].
    std::vector<Cell> dual_cell_shift;
};

// Planar dual with dual vertices at face centroids and the same basis.
DualPair dual(const PlaneLattice& L);

// Matching graph: L plus a "chord" bond for every pair of vertices that
// share a face without being adjacent. Triangulations come back unchanged;
// any added chord marks the result non-planar.
PlaneLattice matching_graph(const PlaneLattice& L);

struct DualityCheck {
    std::string name;
    bool pass =  false;
    std::string detail;
};

struct DualityReport {
    std::vector<DualityCheck> checks;
    bool all_pass() const;
    std::string to_json() const;
};

// Structural validation of a dual pair: bijection totality, |E| = |E*| on an
// m x m torus, double dual isomorphic to the primal (positional and
// combinatorial forms), and one proper crossing per (e, e*) drawing.
// Violations are reported, not thrown.
DualityReport verify_duality(const DualPair& D, int instance_size);

}  // namespace perclab
