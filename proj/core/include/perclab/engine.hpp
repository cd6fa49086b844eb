#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "perclab/instance.hpp"
#include "perclab/rng.hpp"
#include "perclab/stats.hpp"

namespace perclab {

enum class Mode { Bond, Site };

Mode mode_from_string(const std::string& s);
std::string to_string(Mode m);

// Per-class open probabilities; "*" is the any-class fallback, so the
// uniform single-p case is {{"*", p}}.
struct PercolationParams {
    Mode mode = Mode::Bond;
    std::map<std::string, double> probabilities;

    static PercolationParams uniform(Mode m, double p) {
        return {m, {{"*", p}}};
    }
    double probability_for(const std::string& cls) const;
};

// Open/closed states over the elements of one instance (edges in bond mode,
// vertices in site mode), reproducible from (seed, stream).
struct Configuration {
    Mode mode = Mode::Bond;
    std::vector<std::uint8_t> open;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

// Per-element probabilities resolved against the instance's class tables.
// Throws Error{Config} when a class present in the instance has no entry.
std::vector<double> element_probabilities(const FiniteInstance& I,
                                          const PercolationParams& P);

Configuration sample_configuration(const FiniteInstance& I,
                                   const PercolationParams& P,
                                   std::uint64_t seed, std::uint64_t stream);

// Union-find over instance vertices with per-node winding displacements;
// a cycle whose winding does not cancel marks its cluster as wrapping.
// Confined to a single thread.
class ClusterIndex {
  public:
    // Bond mode: every vertex starts active as a singleton.
    explicit ClusterIndex(int n_vertices, bool track_size_order = true);
    // Site mode: vertices start inactive; activate them before joining.
    static ClusterIndex inactive(int n_vertices, bool track_size_order = true);

    void activate(int v);
    bool is_active(int v) const { return active_[std::size_t(v)] != 0; }

    // Join the endpoints of an edge with winding w (v's unwrapped cell minus
    // u's). Returns true if two clusters merged. Inactive endpoints are
    // ignored in site mode.
    bool add_edge(int u, int v, Cell w);

    int find(int v);
    bool connected(int u, int v) { return is_active(u) && is_active(v) && find(u) == find(v); }

    int cluster_size(int v);
    int n_clusters() const { return n_clusters_; }
    int n_active() const { return n_active_; }
    int largest() const { return largest_; }
    // Size of the second-largest cluster (0 when fewer than two); requires
    // track_size_order.
    int second_largest() const;

    bool wraps_x() const { return any_wrap_x_; }
    bool wraps_y() const { return any_wrap_y_; }
    bool wraps_either() const { return any_wrap_x_ || any_wrap_y_; }
    // Some single cluster wraps both directions.
    bool wraps_both() const { return any_wrap_both_; }

    std::vector<int> cluster_sizes();  // sizes of all active clusters

  private:
    ClusterIndex(int n_vertices, bool all_active, bool track_size_order);
    void note_size_change(int old_a, int old_b, int merged);

    std::vector<int> parent_;
    std::vector<Cell> delta_;
    std::vector<int> size_;
    std::vector<std::uint8_t> wrap_;
    std::vector<std::uint8_t> active_;
    std::vector<int> path_;
    std::multiset<int> order_;
    bool track_order_;
    int n_clusters_ = 0;
    int n_active_ = 0;
    int largest_ = 0;
    bool any_wrap_x_ = false, any_wrap_y_ = false, any_wrap_both_ = false;
};

ClusterIndex cluster_index(const FiniteInstance& I, const Configuration& C);

// Primal index over open bonds plus the dual index over dual bonds whose
// primal partner is closed. Requires a paired dual (bond mode).
std::pair<ClusterIndex, ClusterIndex> joint_dual_index(const FiniteInstance& I,
                                                       const Configuration& C);

// ---- Newman-Ziff ------------------------------------------------------

enum class NZObservable { WrapEither, WrapBoth, LargestFrac, SecondLargestFrac, Connect };

NZObservable nz_observable_from_string(const std::string& s);

// Histogram of the element count at which a monotone boolean observable
// first became true, over replicas.
struct ThresholdHist {
    std::vector<std::uint32_t> first_true;  // index 0..N
    std::uint32_t never = 0;
    std::size_t replicas() const;
};

struct CurveAccum {
    std::vector<double> sum;    // index 0..N (state after n additions)
    std::vector<double> sumsq;
};

struct NZResult {
    std::size_t n_elements = 0;
    std::size_t replicas = 0;
    std::map<NZObservable, ThresholdHist> hists;
    std::map<NZObservable, CurveAccum> curves;
};

struct NZOptions {
    Mode mode = Mode::Bond;
    std::vector<NZObservable> observables = {NZObservable::WrapEither};
    std::size_t replicas = 200;
    std::uint64_t seed = 1;
    std::uint64_t experiment_tag = 0;
    int connect_u = -1, connect_v = -1;
    int jobs = 0;  // 0 = default_jobs()
};

// Microcanonical sweep: elements added one at a time in uniformly random
// order, observables recorded after each addition.
NZResult newman_ziff_sweep(const FiniteInstance& I, const NZOptions& opt);

// Annealed-disorder variant: a fresh instance per replica. All instances
// must share the element count of `shape`.
NZResult newman_ziff_sweep_factory(
    const std::function<FiniteInstance(std::uint64_t)>& make_instance,
    const NZOptions& opt);

// Canonical-curve convolution at occupation probability p. Boolean
// observables get exact per-replica statistics via the threshold histogram;
// curve observables get a conservative (Cauchy-Schwarz) error bound.
Estimate nz_convolve_bool(const ThresholdHist& h, std::size_t n_elements, double p);
Estimate nz_convolve_curve(const CurveAccum& c, std::size_t n_elements,
                           std::size_t replicas, double p);

const ThresholdHist& nz_hist(const NZResult& r, NZObservable o);

}  // namespace perclab
