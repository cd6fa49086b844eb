#include "perclab/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "perclab/parallel.hpp"

namespace perclab {

Mode mode_from_string(const std::string& s) {
    if (s == "bond") return Mode::Bond;
    if (s == "site") return Mode::Site;
    throw Error(ErrorKind::Config, "mode must be 'bond' or 'site'");
}

std::string to_string(Mode m) { return m == Mode::Bond ? "bond" : "site"; }

double PercolationParams::probability_for(const std::string& cls) const {
    auto it = probabilities.find(cls);
    if (it == probabilities.end()) it = probabilities.find("*");
    if (it == probabilities.end()) {
        throw Error(ErrorKind::Config, "no probability for class '" + cls + "'");
    }
    if (it->second < 0.0 || it->second > 1.0) {
        throw Error(ErrorKind::Config, "probability outside [0,1]");
    }
    return it->second;
}

std::vector<double> element_probabilities(const FiniteInstance& I,
                                          const PercolationParams& P) {
    const auto& names = P.mode == Mode::Bond ? I.bond_class_names : I.site_class_names;
    std::vector<double> by_class;
    by_class.reserve(names.size());
    for (const auto& n : names) by_class.push_back(P.probability_for(n));
    const auto& cls = P.mode == Mode::Bond ? I.edge_class : I.vertex_class;
    std::vector<double> out(cls.size());
    for (std::size_t i = 0; i < cls.size(); ++i) {
        out[i] = by_class[std::size_t(cls[i])];
    }
    return out;
}

Configuration sample_configuration(const FiniteInstance& I,
                                   const PercolationParams& P,
                                   std::uint64_t seed, std::uint64_t stream) {
    const auto probs = element_probabilities(I, P);
    Configuration C;
    C.mode = P.mode;
    C.seed = seed;
    C.stream = stream;
    C.open.resize(probs.size());
    CounterRng rng(seed, stream);
    for (std::size_t i = 0; i < probs.size(); ++i) {
        C.open[i] = rng.bernoulli(probs[i]) ? 1 : 0;
    }
    return C;
}

// ---- ClusterIndex -------------------------------------------------------

ClusterIndex::ClusterIndex(int n, bool track) : ClusterIndex(n, true, track) {}

ClusterIndex ClusterIndex::inactive(int n, bool track) {
    return ClusterIndex(n, false, track);
}

ClusterIndex::ClusterIndex(int n, bool all_active, bool track)
    : parent_(std::size_t(n)),
      delta_(std::size_t(n)),
      size_(std::size_t(n), all_active ? 1 : 0),
      wrap_(std::size_t(n), 0),
      active_(std::size_t(n), all_active ? 1 : 0),
      track_order_(track) {
    std::iota(parent_.begin(), parent_.end(), 0);
    if (all_active) {
        n_clusters_ = n;
        n_active_ = n;
        largest_ = n > 0 ? 1 : 0;
        if (track_order_) {
            for (int i = 0; i < n; ++i) order_.insert(1);
        }
    }
}

void ClusterIndex::activate(int v) {
    if (active_[std::size_t(v)]) return;
    active_[std::size_t(v)] = 1;
    size_[std::size_t(v)] = 1;
    ++n_active_;
    ++n_clusters_;
    largest_ = std::max(largest_, 1);
    if (track_order_) order_.insert(1);
}

int ClusterIndex::find(int v) {
    if (parent_[std::size_t(v)] == v) return v;
    path_.clear();
    int r = v;
    while (parent_[std::size_t(r)] != r) {
        path_.push_back(r);
        r = parent_[std::size_t(r)];
    }
    Cell suffix{0, 0};
    for (std::size_t i = path_.size(); i-- > 0;) {
        suffix = suffix + delta_[std::size_t(path_[i])];
        delta_[std::size_t(path_[i])] = suffix;
        parent_[std::size_t(path_[i])] = r;
    }
    return r;
}

void ClusterIndex::note_size_change(int old_a, int old_b, int merged) {
    if (!track_order_) return;
    order_.erase(order_.find(old_a));
    order_.erase(order_.find(old_b));
    order_.insert(merged);
}

bool ClusterIndex::add_edge(int u, int v, Cell w) {
    if (!active_[std::size_t(u)] || !active_[std::size_t(v)]) return false;
    const int ru = find(u), rv = find(v);
    const Cell du = delta_[std::size_t(u)], dv = delta_[std::size_t(v)];
    if (ru == rv) {
        const Cell diff = du + w - dv;
        if (!(diff == Cell{0, 0})) {
            std::uint8_t& bits = wrap_[std::size_t(ru)];
            if (diff.i != 0) bits |= 1;
            if (diff.j != 0) bits |= 2;
            any_wrap_x_ = any_wrap_x_ || (bits & 1);
            any_wrap_y_ = any_wrap_y_ || (bits & 2);
            any_wrap_both_ = any_wrap_both_ || (bits == 3);
        }
        return false;
    }
    int big = ru, small = rv;
    // delta for the absorbed root, oriented big <- small.
    Cell dsmall = du + w - dv;  // valid when small == rv
    if (size_[std::size_t(big)] < size_[std::size_t(small)]) {
        std::swap(big, small);
        dsmall = -dsmall;
    }
    parent_[std::size_t(small)] = big;
    delta_[std::size_t(small)] = dsmall;
    const int sa = size_[std::size_t(big)], sb = size_[std::size_t(small)];
    size_[std::size_t(big)] = sa + sb;
    std::uint8_t& bits = wrap_[std::size_t(big)];
    bits |= wrap_[std::size_t(small)];
    any_wrap_both_ = any_wrap_both_ || (bits == 3);
    --n_clusters_;
    largest_ = std::max(largest_, sa + sb);
    note_size_change(sa, sb, sa + sb);
    return true;
}

int ClusterIndex::cluster_size(int v) {
    if (!active_[std::size_t(v)]) return 0;
    return size_[std::size_t(find(v))];
}

int ClusterIndex::second_largest() const {
    if (!track_order_) {
        throw Error(ErrorKind::Internal, "second_largest needs size tracking");
    }
    if (order_.size() < 2) return 0;
    auto it = order_.rbegin();
    ++it;
    return *it;
}

std::vector<int> ClusterIndex::cluster_sizes() {
    std::vector<int> out;
    for (int v = 0; v < int(parent_.size()); ++v) {
        if (active_[std::size_t(v)] && find(v) == v) {
            out.push_back(size_[std::size_t(v)]);
        }
    }
    return out;
}

ClusterIndex cluster_index(const FiniteInstance& I, const Configuration& C) {
    if (C.mode == Mode::Bond) {
        if (C.open.size() != I.edges.size()) {
            throw Error(ErrorKind::Config, "configuration does not match instance");
        }
        ClusterIndex ci(I.vertex_count());
        for (std::size_t e = 0; e < I.edges.size(); ++e) {
            if (!C.open[e]) continue;
            const auto& ed = I.edges[e];
            ci.add_edge(ed.u, ed.v, ed.winding);
        }
        return ci;
    }
    if (C.open.size() != I.vertices.size()) {
        throw Error(ErrorKind::Config, "configuration does not match instance");
    }
    ClusterIndex ci = ClusterIndex::inactive(I.vertex_count());
    for (int v = 0; v < I.vertex_count(); ++v) {
        if (C.open[std::size_t(v)]) ci.activate(v);
    }
    for (const auto& ed : I.edges) {
        if (C.open[std::size_t(ed.u)] && C.open[std::size_t(ed.v)]) {
            ci.add_edge(ed.u, ed.v, ed.winding);
        }
    }
    return ci;
}

std::pair<ClusterIndex, ClusterIndex> joint_dual_index(const FiniteInstance& I,
                                                       const Configuration& C) {
    if (!I.dual) {
        throw Error(ErrorKind::Config, "instance has no paired dual");
    }
    if (C.mode != Mode::Bond) {
        throw Error(ErrorKind::Config, "joint dual index is bond-mode only");
    }
    Configuration dualC;
    dualC.mode = Mode::Bond;
    dualC.seed = C.seed;
    dualC.stream = C.stream;
    dualC.open.assign(I.dual->edges.size(), 0);
    for (std::size_t e = 0; e < I.edges.size(); ++e) {
        dualC.open[std::size_t(I.dual_edge_of[e])] = C.open[e] ? 0 : 1;
    }
    return {cluster_index(I, C), cluster_index(*I.dual, dualC)};
}

// ---- Newman-Ziff --------------------------------------------------------

NZObservable nz_observable_from_string(const std::string& s) {
    if (s == "wrapping-either") return NZObservable::WrapEither;
    if (s == "wrapping-both") return NZObservable::WrapBoth;
    if (s == "largest-fraction") return NZObservable::LargestFrac;
    if (s == "second-largest-fraction") return NZObservable::SecondLargestFrac;
    if (s == "connect") return NZObservable::Connect;
    throw Error(ErrorKind::Config, "unknown observable: " + s);
}

std::size_t ThresholdHist::replicas() const {
    std::size_t n = never;
    for (auto c : first_true) n += c;
    return n;
}

namespace {

bool is_bool_observable(NZObservable o) {
    return o == NZObservable::WrapEither || o == NZObservable::WrapBoth ||
           o == NZObservable::Connect;
}

struct SweepAccum {
    std::map<NZObservable, ThresholdHist> hists;
    std::map<NZObservable, CurveAccum> curves;

    void init(const std::vector<NZObservable>& obs, std::size_t N) {
        for (auto o : obs) {
            if (is_bool_observable(o)) {
                hists[o].first_true.assign(N + 1, 0);
            } else {
                curves[o].sum.assign(N + 1, 0.0);
                curves[o].sumsq.assign(N + 1, 0.0);
            }
        }
    }
    void merge(const SweepAccum& o) {
        for (const auto& [k, h] : o.hists) {
            auto& mine = hists[k];
            if (mine.first_true.size() < h.first_true.size()) {
                mine.first_true.resize(h.first_true.size(), 0);
            }
            for (std::size_t i = 0; i < h.first_true.size(); ++i) {
                mine.first_true[i] += h.first_true[i];
            }
            mine.never += h.never;
        }
        for (const auto& [k, c] : o.curves) {
            auto& mine = curves[k];
            if (mine.sum.size() < c.sum.size()) {
                mine.sum.resize(c.sum.size(), 0.0);
                mine.sumsq.resize(c.sumsq.size(), 0.0);
            }
            for (std::size_t i = 0; i < c.sum.size(); ++i) {
                mine.sum[i] += c.sum[i];
                mine.sumsq[i] += c.sumsq[i];
            }
        }
    }
};

void run_one_sweep(const FiniteInstance& I, const NZOptions& opt,
                   std::uint64_t replica, SweepAccum& acc) {
    const std::size_t N = opt.mode == Mode::Bond ? I.edges.size() : I.vertices.size();
    CounterRng rng(opt.seed, replica_stream(opt.experiment_tag, replica));
    std::vector<int> order(N);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    const bool want_largest = acc.curves.count(NZObservable::LargestFrac) > 0;
    const bool want_second = acc.curves.count(NZObservable::SecondLargestFrac) > 0;
    const bool want_either = acc.hists.count(NZObservable::WrapEither) > 0;
    const bool want_both = acc.hists.count(NZObservable::WrapBoth) > 0;
    const bool want_connect = acc.hists.count(NZObservable::Connect) > 0;
    if (want_connect &&
        (opt.connect_u < 0 || opt.connect_v < 0 || opt.connect_u == opt.connect_v ||
         opt.connect_u >= I.vertex_count() || opt.connect_v >= I.vertex_count())) {
        throw Error(ErrorKind::Config, "connect observable needs two distinct vertices");
    }

    ClusterIndex ci = opt.mode == Mode::Bond
                          ? ClusterIndex(I.vertex_count(), want_second)
                          : ClusterIndex::inactive(I.vertex_count(), want_second);

    const double denom = double(I.vertex_count());
    std::size_t n_either = 0, n_both = 0, n_connect = 0;  // 0 = not yet
    auto record_curves = [&](std::size_t n) {
        if (want_largest) {
            const double x = double(ci.largest()) / denom;
            auto& c = acc.curves[NZObservable::LargestFrac];
            c.sum[n] += x;
            c.sumsq[n] += x * x;
        }
        if (want_second) {
            const double x = double(ci.second_largest()) / denom;
            auto& c = acc.curves[NZObservable::SecondLargestFrac];
            c.sum[n] += x;
            c.sumsq[n] += x * x;
        }
    };
    record_curves(0);
    for (std::size_t n = 1; n <= N; ++n) {
        const int el = order[n - 1];
        if (opt.mode == Mode::Bond) {
            const auto& ed = I.edges[std::size_t(el)];
            ci.add_edge(ed.u, ed.v, ed.winding);
        } else {
            ci.activate(el);
            const int begin = I.adj_start[std::size_t(el)];
            const int end = I.adj_start[std::size_t(el) + 1];
            for (int k = begin; k < end; ++k) {
                const auto [nbr, ei] = I.adjacency[std::size_t(k)];
                if (ci.is_active(nbr)) {
                    const auto& ed = I.edges[std::size_t(ei)];
                    const Cell w = (el == ed.u) ? ed.winding : -ed.winding;
                    ci.add_edge(el, nbr, w);
                }
            }
        }
        if (want_either && n_either == 0 && ci.wraps_either()) n_either = n;
        if (want_both && n_both == 0 && ci.wraps_both()) n_both = n;
        if (want_connect && n_connect == 0 &&
            ci.connected(opt.connect_u, opt.connect_v)) {
            n_connect = n;
        }
        record_curves(n);
    }
    auto note = [&](NZObservable o, std::size_t n, bool wanted) {
        if (!wanted) return;
        auto& h = acc.hists[o];
        if (n == 0) ++h.never;
        else ++h.first_true[n];
    };
    note(NZObservable::WrapEither, n_either, want_either);
    note(NZObservable::WrapBoth, n_both, want_both);
    note(NZObservable::Connect, n_connect, want_connect);
}

NZResult sweep_impl(
    const std::function<const FiniteInstance&(std::uint64_t, FiniteInstance&)>& get,
    std::size_t n_elements, const NZOptions& opt) {
    NZResult result;
    result.n_elements = n_elements;
    result.replicas = opt.replicas;

    const std::size_t chunk = 16;
    const std::size_t n_blocks = (opt.replicas + chunk - 1) / chunk;
    std::vector<SweepAccum> partial(n_blocks);
    parallel_blocks(
        n_blocks,
        [&](std::size_t b) {
            auto& acc = partial[b];
            acc.init(opt.observables, n_elements);
            FiniteInstance scratch;
            const std::size_t lo = b * chunk;
            const std::size_t hi = std::min<std::size_t>(opt.replicas, lo + chunk);
            for (std::size_t r = lo; r < hi; ++r) {
                const FiniteInstance& inst = get(r, scratch);
                if ((opt.mode == Mode::Bond ? inst.edges.size()
                                            : inst.vertices.size()) != n_elements) {
                    throw Error(ErrorKind::Config,
                                "instances in a sweep must share element count");
                }
                run_one_sweep(inst, opt, r, acc);
            }
        },
        opt.jobs > 0 ? opt.jobs : default_jobs());

    SweepAccum total;
    total.init(opt.observables, n_elements);
    for (const auto& p : partial) total.merge(p);
    result.hists = std::move(total.hists);
    result.curves = std::move(total.curves);
    return result;
}

}  // namespace

NZResult newman_ziff_sweep(const FiniteInstance& I, const NZOptions& opt) {
    const std::size_t N = opt.mode == Mode::Bond ? I.edges.size() : I.vertices.size();
    return sweep_impl(
        [&I](std::uint64_t, FiniteInstance&) -> const FiniteInstance& { return I; },
        N, opt);
}

NZResult newman_ziff_sweep_factory(
    const std::function<FiniteInstance(std::uint64_t)>& make_instance,
    const NZOptions& opt) {
    const FiniteInstance shape = make_instance(0);
    const std::size_t N = opt.mode == Mode::Bond ? shape.edges.size() : shape.vertices.size();
    return sweep_impl(
        [&make_instance](std::uint64_t r, FiniteInstance& scratch) -> const FiniteInstance& {
            scratch = make_instance(r);
            return scratch;
        },
        N, opt);
}

Estimate nz_convolve_bool(const ThresholdHist& h, std::size_t n_elements, double p) {
    const auto tail = binomial_upper_tail(n_elements, p);
    const std::size_t reps = h.replicas();
    if (reps == 0) return {0.0, 0.0};
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t n = 0; n < h.first_true.size(); ++n) {
        if (h.first_true[n] == 0) continue;
        const double t = tail[n];
        sum += double(h.first_true[n]) * t;
        sumsq += double(h.first_true[n]) * t * t;
    }
    const double mean = sum / double(reps);
    double var = 0.0;
    if (reps > 1) {
        var = std::max(0.0, (sumsq - double(reps) * mean * mean) / double(reps - 1));
    }
    return {mean, std::sqrt(var / double(reps))};
}

Estimate nz_convolve_curve(const CurveAccum& c, std::size_t n_elements,
                           std::size_t replicas, double p) {
    const auto pmf = binomial_pmf(n_elements, p);
    double mean = 0.0, err = 0.0;
    for (std::size_t n = 0; n <= n_elements; ++n) {
        const double m = c.sum[n] / double(replicas);
        mean += pmf[n] * m;
        if (replicas > 1) {
            const double var = std::max(
                0.0, (c.sumsq[n] - c.sum[n] * c.sum[n] / double(replicas)) /
                         double(replicas - 1));
            err += pmf[n] * std::sqrt(var / double(replicas));
        }
    }
    return {mean, err};
}

const ThresholdHist& nz_hist(const NZResult& r, NZObservable o) {
    const auto it = r.hists.find(o);
    if (it == r.hists.end()) {
        throw Error(ErrorKind::Internal, "observable histogram not recorded");
    }
    return it->second;
}

}  // namespace perclab
