#include "perclab/geometry.hpp"

#include <algorithm>

namespace perclab {

bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const Vec2 r = b - a, s = d - c;
    const double denom = r.cross(s);
    const double scale = std::max({r.norm(), s.norm(), 1.0});
    if (std::abs(denom) <= kGeomTol * scale * scale) return false;  // parallel
    const double t = (c - a).cross(s) / denom;
    const double u = (c - a).cross(r) / denom;
    const double eps = kGeomTol / scale;
    return t > eps && t < 1.0 - eps && u > eps && u < 1.0 - eps;
}

bool segments_overlap(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double tol) {
    const Vec2 r = b - a, s = d - c;
    const double scale = std::max({r.norm(), s.norm(), 1.0});
    if (std::abs(r.cross(s)) > tol * scale * scale) return false;
    if (std::abs((c - a).cross(r)) > tol * scale) return false;
    // Collinear: project onto r and test interval overlap length.
    const double rr = r.norm2();
    if (rr == 0.0) return false;
    double t0 = (c - a).dot(r) / rr;
    double t1 = (d - a).dot(r) / rr;
    if (t0 > t1) std::swap(t0, t1);
    const double lo = std::max(0.0, t0), hi = std::min(1.0, t1);
    return (hi - lo) * std::sqrt(rr) > tol;
}

double segment_point_distance(Vec2 a, Vec2 b, Vec2 p) {
    const Vec2 d = b - a;
    const double dd = d.norm2();
    if (dd == 0.0) return (p - a).norm();
    double t = (p - a).dot(d) / dd;
    t = std::clamp(t, 0.0, 1.0);
    return (p - (a + d * t)).norm();
}

CircleCrossResult segment_circle_crossings(Vec2 a, Vec2 b, double radius,
                                           double tol) {
    CircleCrossResult out;
    const Vec2 d = b - a;
    const double A = d.norm2();
    if (A == 0.0) return out;
    const double B = 2.0 * a.dot(d);
    const double C = a.norm2() - radius * radius;
    const double disc = B * B - 4.0 * A * C;
    const double len = std::sqrt(A);

    // Grazing pass: the closest approach of the supporting line sits within
    // tol of the circle. Report tangency only when the near point lies on
    // the segment proper.
    if (disc <= 4.0 * A * radius * tol && disc >= -4.0 * A * radius * tol) {
        const double tmin = std::clamp(-B / (2.0 * A), 0.0, 1.0);
        const double dist = (a + d * tmin).norm();
        if (std::abs(dist - radius) <= tol) out.tangent = true;
        return out;
    }
    if (disc < 0) return out;

    const double sq = std::sqrt(disc);
    for (double t : {(-B - sq) / (2.0 * A), (-B + sq) / (2.0 * A)}) {
        if (t <= tol / len || t >= 1.0 - tol / len) continue;
        const Vec2 p = a + d * t;
        out.crossings.push_back({t, p, wrap_angle(p.angle())});
    }
    std::sort(out.crossings.begin(), out.crossings.end(),
              [](const CircleCrossing& l, const CircleCrossing& r) {
                  return l.t < r.t;
              });
    return out;
}

PointIndex::Key PointIndex::key(long long qx, long long qy) const {
    return (static_cast<std::uint64_t>(qx) << 32) ^
           (static_cast<std::uint64_t>(qy) & 0xffffffffull);
}

void PointIndex::insert(Vec2 p, int id) {
    const long long qx = static_cast<long long>(std::floor(p.x / cell_));
    const long long qy = static_cast<long long>(std::floor(p.y / cell_));
    buckets_[key(qx, qy)].push_back({p, id});
    ++count_;
}

int PointIndex::find(Vec2 p, double tol) const {
    const long long qx = static_cast<long long>(std::floor(p.x / cell_));
    const long long qy = static_cast<long long>(std::floor(p.y / cell_));
    for (long long dx = -1; dx <= 1; ++dx) {
        for (long long dy = -1; dy <= 1; ++dy) {
            auto it = buckets_.find(key(qx + dx, qy + dy));
            if (it == buckets_.end()) continue;
            for (const auto& [q, id] : it->second) {
                if (near(p, q, tol)) return id;
            }
        }
    }
    return -1;
}

}  // namespace perclab
