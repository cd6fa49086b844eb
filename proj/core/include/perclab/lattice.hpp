#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "perclab/geometry.hpp"

namespace perclab {

enum class ErrorKind { InvalidSpec, Config, NonConvergence, Internal };

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

  private:
    ErrorKind kind_;
};

struct Site {
    int id = 0;
    Vec2 pos;  // basis coordinates, in [0,1)^2
    std::string cls = "s";
};

// Bond from site a in the base cell to site b in the cell translated by
// `offset`. (a, b, offset) and (b, a, -offset) denote the same bond.
struct Bond {
    int id = 0;
    int a = 0;
    int b = 0;
    Cell offset;
    std::string cls = "e";
};

// Infinite periodic plane (multi-)graph: a fundamental domain of sites and
// bonds repeated over integer combinations of two independent basis vectors.
struct PlaneLattice {
    std::string name;
    Basis basis;
    std::vector<Site> sites;
    std::vector<Bond> bonds;
    bool planar = true;
    // Duals of decorated lattices may carry parallel bonds; their
    // centroid-drawn segments coincide, so the straight-line drawing checks
    // are skipped for them (the combinatorial structure stays valid).
    bool drawing_validated = true;

    Vec2 site_point(int site) const { return basis.embed(sites[site].pos); }
    Vec2 site_point(int site, Cell c) const {
        return site_point(site) + basis.embed(c);
    }
    Vec2 bond_midpoint(const Bond& b) const {
        return (site_point(b.a) + site_point(b.b, b.offset)) * 0.5;
    }
    std::vector<std::string> bond_classes() const;
    std::vector<std::string> site_classes() const;
    int degree(int site) const;
};

struct SymmetryOrder {
    int k = 1;
    Vec2 center;
};

// Built-ins: square, triangular, hexagonal, kagome, fig1-left, fig1-right.
// fig1-left/right are hexagonal decorations: one long (resp. short) chord
// per hexagon, giving exactly 2-fold (resp. no) rotational symmetry.
PlaneLattice build_lattice(const std::string& spec);
bool is_builtin_lattice(const std::string& name);
std::vector<std::string> builtin_lattice_names();

// Structural validation: independent basis, in-domain distinct sites,
// connectivity, and (for validated drawings) non-crossing straight edges on
// a 3x3 block of copies. Throws Error{InvalidSpec}.
void validate_lattice(const PlaneLattice& L, bool check_drawing = true);

// Largest k in {1,2,3,4,6} whose rotation by 2*pi/k about `center` maps a
// bounded patch of the embedded lattice into the lattice. Requires
// patch_radius >= 3 * max(|w1|, |w2|).
SymmetryOrder detect_rotational_symmetry(const PlaneLattice& L, Vec2 center,
                                         double patch_radius);

// Lattice JSON schema (External Interfaces):
// {"basis": [[x,y],[x,y]], "sites": [{"id", "pos":[u,v], "class"?}],
//  "bonds": [{"id","a","b","offset":[i,j],"class"}], "planar"?}
PlaneLattice lattice_from_json(const std::string& json_text);
std::string lattice_to_json(const PlaneLattice& L);
PlaneLattice load_lattice_file(const std::string& path);
void save_lattice_file(const PlaneLattice& L, const std::string& path);

// Resolve a CLI lattice argument: built-in name or path to a JSON file.
PlaneLattice resolve_lattice(const std::string& name_or_path);

// Periodic-graph isomorphism up to translation, positions compared at
// kGeomTol after reduction to the (shared) basis.
bool isomorphic_up_to_translation(const PlaneLattice& A, const PlaneLattice& B);

// Combinatorial isomorphism of the quotient multigraphs (positions ignored;
// backtracking over the site permutation plus a cell shift per site).
bool isomorphic_combinatorial(const PlaneLattice& A, const PlaneLattice& B);

// Vertices of the patch of L within `radius` of `center`, as (site, cell)
// instances with embedded positions. Shared by symmetry detection and the
// instance builders.
struct PatchVertex {
    int site;
    Cell cell;
    Vec2 pos;
};
std::vector<PatchVertex> enumerate_patch(const PlaneLattice& L, Vec2 center,
                                         double radius);

}  // namespace perclab
