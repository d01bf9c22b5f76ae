#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace polydg {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
    friend constexpr bool operator==(Point2, Point2) = default;
};

constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(b - a); }

/// Twice the signed area of triangle (a, b, c); positive when counter-clockwise.
constexpr double orient2d(Point2 a, Point2 b, Point2 c) { return cross(b - a, c - a); }

struct Triangle {
    std::array<Point2, 3> v;
    double area() const { return 0.5 * orient2d(v[0], v[1], v[2]); }
};

struct BoundingBox {
    double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    double area() const { return width() * height(); }
    Point2 center() const { return {0.5 * (xmin + xmax), 0.5 * (ymin + ymax)}; }
};

inline double signed_area(std::span<const Point2> poly) {
    double a = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i)
        a += cross(poly[i], poly[(i + 1) % n]);
    return 0.5 * a;
}

inline Point2 centroid(std::span<const Point2> poly) {
    double a = 0.0, cx = 0.0, cy = 0.0;
    const std::size_t n = poly.size();
    // Shift to the first vertex for better conditioning on small cells.
    const Point2 o = poly[0];
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 p = poly[i] - o, q = poly[(i + 1) % n] - o;
        const double c = cross(p, q);
        a += c;
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
    }
    a *= 0.5;
    return {o.x + cx / (6.0 * a), o.y + cy / (6.0 * a)};
}

inline double perimeter(std::span<const Point2> poly) {
    double l = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i)
        l += distance(poly[i], poly[(i + 1) % poly.size()]);
    return l;
}

inline double diameter(std::span<const Point2> poly) {
    double d = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i)
        for (std::size_t j = i + 1; j < poly.size(); ++j)
            d = std::max(d, distance(poly[i], poly[j]));
    return d;
}

inline BoundingBox bounding_box(std::span<const Point2> poly) {
    BoundingBox b{poly[0].x, poly[0].x, poly[0].y, poly[0].y};
    for (const Point2& p : poly) {
        b.xmin = std::min(b.xmin, p.x);
        b.xmax = std::max(b.xmax, p.x);
        b.ymin = std::min(b.ymin, p.y);
        b.ymax = std::max(b.ymax, p.y);
    }
    return b;
}

/// True when the turn a -> b -> c is straight (sine of the turning angle below tol).
inline bool is_collinear_turn(Point2 a, Point2 b, Point2 c, double tol = 1e-12) {
    const Point2 e1 = b - a, e2 = c - b;
    const double l1 = norm(e1), l2 = norm(e2);
    if (l1 == 0.0 || l2 == 0.0)
        return true;
    return std::abs(cross(e1, e2)) <= tol * l1 * l2 && dot(e1, e2) > 0.0;
}

namespace detail {

inline bool segments_properly_intersect(Point2 a, Point2 b, Point2 c, Point2 d) {
    const double o1 = orient2d(a, b, c), o2 = orient2d(a, b, d);
    const double o3 = orient2d(c, d, a), o4 = orient2d(c, d, b);
    return ((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0));
}

inline bool point_in_triangle(Point2 p, Point2 a, Point2 b, Point2 c) {
    // Closed triangle test, assumes (a, b, c) counter-clockwise.
    return orient2d(a, b, p) >= 0 && orient2d(b, c, p) >= 0 && orient2d(c, a, p) >= 0;
}

}  // namespace detail

/// True if no two non-adjacent edges of the closed polygon cross.
inline bool is_simple(std::span<const Point2> poly) {
    const std::size_t n = poly.size();
    if (n < 3)
        return false;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1)
                continue;
            if (detail::segments_properly_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]))
                return false;
        }
    }
    return true;
}

/// Ear-clipping triangulation of a simple counter-clockwise polygon.
/// Straight-angle vertices are dropped first since they only produce slivers.
inline std::vector<Triangle> triangulate_polygon(std::span<const Point2> poly) {
    if (!is_simple(poly))
        throw Error("triangulate_polygon: polygon is not simple");
    if (signed_area(poly) <= 0.0)
        throw Error("triangulate_polygon: polygon is not counter-clockwise");

    std::vector<Point2> v;
    v.reserve(poly.size());
    const std::size_t n0 = poly.size();
    for (std::size_t i = 0; i < n0; ++i) {
        if (!is_collinear_turn(poly[(i + n0 - 1) % n0], poly[i], poly[(i + 1) % n0]))
            v.push_back(poly[i]);
    }

    std::vector<Triangle> tris;
    tris.reserve(v.size());
    while (v.size() > 3) {
        const std::size_t n = v.size();
        bool clipped = false;
        for (std::size_t i = 0; i < n && !clipped; ++i) {
            const Point2 a = v[(i + n - 1) % n], b = v[i], c = v[(i + 1) % n];
            if (orient2d(a, b, c) <= 0.0)
                continue;
            bool blocked = false;
            for (std::size_t k = 0; k < n && !blocked; ++k) {
                if (k == i || k == (i + 1) % n || k == (i + n - 1) % n)
                    continue;
                if (v[k] == a || v[k] == b || v[k] == c)
                    continue;
                blocked = detail::point_in_triangle(v[k], a, b, c);
            }
            if (blocked)
                continue;
            tris.push_back({{a, b, c}});
            v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
            clipped = true;
        }
        if (!clipped)
            throw Error("triangulate_polygon: no ear found (degenerate polygon)");
    }
    tris.push_back({{v[0], v[1], v[2]}});
    return tris;
}

}  // namespace polydg
