#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

namespace perclab {

// Absolute tolerance for all geometric coincidence tests.
constexpr double kGeomTol = 1e-9;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }

    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double cross(Vec2 o) const { return x * o.y - y * o.x; }
    double norm2() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm2()); }
    double angle() const { return std::atan2(y, x); }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

inline bool near(Vec2 a, Vec2 b, double tol = kGeomTol) {
    return (a - b).norm() <= tol;
}

inline Vec2 rotate(Vec2 v, double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

// Integer cell coordinate (translation multiples of the basis vectors).
struct Cell {
    int i = 0;
    int j = 0;
    Cell() = default;
    Cell(int i_, int j_) : i(i_), j(j_) {}
    Cell operator+(Cell o) const { return {i + o.i, j + o.j}; }
    Cell operator-(Cell o) const { return {i - o.i, j - o.j}; }
    Cell operator-() const { return {-i, -j}; }
    bool operator==(const Cell&) const = default;
};

// 2x2 basis matrix [w1 w2] with cached inverse.
struct Basis {
    Vec2 w1, w2;

    double det() const { return w1.cross(w2); }
    Vec2 embed(double u, double v) const { return w1 * u + w2 * v; }
    Vec2 embed(Vec2 uv) const { return embed(uv.x, uv.y); }
    Vec2 embed(Cell c) const { return embed(double(c.i), double(c.j)); }
    // Inverse map: plane point -> basis coordinates.
    Vec2 coords(Vec2 p) const {
        const double d = det();
        return {(p.x * w2.y - p.y * w2.x) / d, (p.y * w1.x - p.x * w1.y) / d};
    }
};

// Proper interior crossing of two segments; shared-endpoint touches do not
// count. Collinear overlap reports no crossing (callers treat overlap as a
// separate degeneracy).
bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

// True if the segments overlap along a common line over a run longer than tol.
bool segments_overlap(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double tol = kGeomTol);

double segment_point_distance(Vec2 a, Vec2 b, Vec2 p);

struct CircleCrossing {
    double t;      // parameter along the segment, in (0,1)
    Vec2 point;
    double angle;  // atan2 of the crossing point, in [0, 2*pi)
};

// Transversal crossings of segment ab with the circle |p| = R, sorted by t.
// `tangent` is set when the segment grazes the circle (min distance within
// tol of R without a clean sign change); callers must then perturb R.
struct CircleCrossResult {
    std::vector<CircleCrossing> crossings;
    bool tangent = false;
};
CircleCrossResult segment_circle_crossings(Vec2 a, Vec2 b, double radius,
                                           double tol = kGeomTol);

// Hash grid for point -> id lookup with tolerance. Query scans the 3x3
// neighborhood of the quantized cell, so matches within `tol` of a stored
// point are always found as long as tol << cell.
class PointIndex {
  public:
    explicit PointIndex(double cell = 1e-5) : cell_(cell) {}

    void insert(Vec2 p, int id);
    // Id of a stored point within tol of p, or -1.
    int find(Vec2 p, double tol = kGeomTol) const;
    std::size_t size() const { return count_; }

  private:
    using Key = std::uint64_t;
    Key key(long long qx, long long qy) const;
    double cell_;
    std::size_t count_ = 0;
    std::unordered_map<Key, std::vector<std::pair<Vec2, int>>> buckets_;
};

inline double two_pi() { return 6.283185307179586476925286766559; }

// Reduce an angle to [0, 2*pi).
inline double wrap_angle(double a) {
    a = std::fmod(a, two_pi());
    if (a < 0) a += two_pi();
    return a;
}

}  // namespace perclab
