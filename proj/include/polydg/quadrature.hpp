#pragma once

#include <polydg/geometry.hpp>
#include <polydg/mesh.hpp>

#include <cmath>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

namespace polydg {

/// Points and positive weights; the weights sum to the measure of the domain.
struct QuadRule {
    std::vector<Point2> points;
    std::vector<double> weights;
    std::size_t size() const { return weights.size(); }
};

/// Facet rule that also keeps the segment parameter t in [0,1] of every point.
struct FacetQuadRule : QuadRule {
    std::vector<double> params;
};

struct GaussRule1D {
    std::vector<double> nodes;    // on [0, 1]
    std::vector<double> weights;  // sum to 1
};

namespace detail {

/// Returns (P_n(x), P_n'(x)) by the three-term recurrence.
inline std::pair<double, double> legendre_with_derivative(std::size_t n, double x) {
    double p0 = 1.0, p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
    }
    return {p1, static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace detail

/// n-point Gauss-Legendre rule mapped to [0,1] (Newton iteration on P_n).
inline GaussRule1D gauss_legendre(std::size_t n) {
    GaussRule1D r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        for (int it = 0; it < 100; ++it) {
            const auto [p, dp] = detail::legendre_with_derivative(n, x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        const double dp = detail::legendre_with_derivative(n, x).second;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // x is the i-th largest root; store nodes in increasing order on [0,1].
        r.nodes[i] = 0.5 * (1.0 - x);
        r.nodes[n - 1 - i] = 0.5 * (1.0 + x);
        r.weights[i] = r.weights[n - 1 - i] = 0.5 * w;
    }
    return r;
}

/// Cached Gauss rules for n = 1..64 points.
inline const GaussRule1D& gauss_rule(std::size_t n) {
    static const std::vector<GaussRule1D> table = [] {
        std::vector<GaussRule1D> t(65);
        for (std::size_t k = 1; k <= 64; ++k)
            t[k] = gauss_legendre(k);
        return t;
    }();
    if (n == 0 || n > 64)
        throw Error("gauss_rule: unsupported number of points");
    return table[n];
}

/// Collapsed (Duffy) tensor Gauss rule on a triangle, exact to total degree q.
inline void append_triangle_rule(const Triangle& t, int q, QuadRule& rule) {
    const std::size_t n = static_cast<std::size_t>((q + 3) / 2);  // ceil((q+2)/2)
    const GaussRule1D& g = gauss_rule(n);
    const double two_area = 2.0 * t.area();
    const Point2 e1 = t.v[1] - t.v[0], e2 = t.v[2] - t.v[1];
    for (std::size_t i = 0; i < n; ++i) {
        const double u = g.nodes[i];
        for (std::size_t j = 0; j < n; ++j) {
            const double v = g.nodes[j];
            rule.points.push_back(t.v[0] + u * e1 + (u * v) * e2);
            rule.weights.push_back(g.weights[i] * g.weights[j] * u * two_area);
        }
    }
}

/// Rule on a simple polygon via ear-clipping sub-tessellation.
inline QuadRule volume_quadrature(std::span<const Point2> polygon, int q) {
    if (q < 0)
        throw Error("volume_quadrature: exactness degree must be non-negative");
    QuadRule rule;
    for (const Triangle& t : triangulate_polygon(polygon))
        append_triangle_rule(t, q, rule);
    return rule;
}

inline QuadRule volume_quadrature(const Mesh& m, index_t k, int q) {
    const auto poly = m.polygon(k);
    return volume_quadrature(std::span<const Point2>(poly), q);
}

/// Gauss rule on the segment a -> b, exact to degree q.
inline FacetQuadRule segment_quadrature(Point2 a, Point2 b, int q) {
    if (q < 0)
        throw Error("facet_quadrature: exactness degree must be non-negative");
    const std::size_t n = static_cast<std::size_t>((q + 2) / 2);  // ceil((q+1)/2)
    const GaussRule1D& g = gauss_rule(n);
    const double len = distance(a, b);
    FacetQuadRule r;
    for (std::size_t i = 0; i < n; ++i) {
        r.params.push_back(g.nodes[i]);
        r.points.push_back(a + g.nodes[i] * (b - a));
        r.weights.push_back(g.weights[i] * len);
    }
    return r;
}

inline FacetQuadRule facet_quadrature(const Facet& f, int q) { return segment_quadrature(f.a, f.b, q); }

}  // namespace polydg
