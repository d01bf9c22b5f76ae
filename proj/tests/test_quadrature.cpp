#include <polydg/mesh_generators.hpp>
#include <polydg/quadrature.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace polydg;

namespace {

double integrate(const QuadRule& q, double (*f)(Point2)) {
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i)
        s += q.weights[i] * f(q.points[i]);
    return s;
}

// Green's theorem: int_P x^a y^b = closed integral of x^(a+1) y^b / (a+1) dy, by Gauss on each edge.
double monomial_by_boundary(const std::vector<Point2>& poly, int a, int b) {
    const GaussRule1D& g = gauss_rule(static_cast<std::size_t>(a + b + 4));
    double s = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point2 p = poly[i], r = poly[(i + 1) % poly.size()];
        for (std::size_t k = 0; k < g.nodes.size(); ++k) {
            const double t = g.nodes[k];
            const Point2 x{p.x + t * (r.x - p.x), p.y + t * (r.y - p.y)};
            s += g.weights[k] * std::pow(x.x, a + 1) / (a + 1) * std::pow(x.y, b) * (r.y - p.y);
        }
    }
    return s;
}

}  // namespace

TEST(Quadrature, UnitSquareAndTriangle) {
    const QuadRule sq = volume_quadrature(std::vector<Point2>{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, 4);
    EXPECT_NEAR(integrate(sq, [](Point2) { return 1.0; }), 1.0, 1e-14);
    EXPECT_NEAR(integrate(sq, [](Point2 x) { return x.x * x.x * x.y * x.y; }), 1.0 / 9.0, 1e-13);
    const QuadRule tri = volume_quadrature(std::vector<Point2>{{0, 0}, {1, 0}, {0, 1}}, 1);
    EXPECT_NEAR(integrate(tri, [](Point2) { return 1.0; }), 0.5, 1e-15);
    for (double w : sq.weights)
        EXPECT_GT(w, 0.0);
}

TEST(Quadrature, SegmentRules) {
    const FacetQuadRule r = segment_quadrature({0.0, 0.0}, {3.0, 4.0}, 0);
    EXPECT_NEAR(integrate(r, [](Point2) { return 1.0; }), 5.0, 1e-14);
    const FacetQuadRule c = segment_quadrature({0.0, 0.0}, {1.0, 0.0}, 3);
    EXPECT_EQ(c.size(), 2u);
    EXPECT_NEAR(integrate(c, [](Point2 x) { return x.x * x.x * x.x; }), 0.25, 1e-14);
    for (std::size_t i = 0; i < c.size(); ++i)
        EXPECT_NEAR(c.params[i], c.points[i].x, 1e-15);
}

TEST(Quadrature, GaussLegendreExactness) {
    for (std::size_t n = 1; n <= 12; ++n) {
        const GaussRule1D g = gauss_legendre(n);
        for (std::size_t k = 0; k <= 2 * n - 1; ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                s += g.weights[i] * std::pow(g.nodes[i], static_cast<double>(k));
            EXPECT_NEAR(s, 1.0 / static_cast<double>(k + 1), 1e-14) << "n=" << n << " k=" << k;
        }
    }
}

TEST(Quadrature, MonomialsOnPolygonsMatchBoundaryIntegrals) {
    const std::vector<std::vector<Point2>> polys{
        {{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}},
        {{0.1, 0.2}, {0.9, 0.1}, {1.1, 0.7}, {0.5, 1.2}, {0.0, 0.8}},
        {{0, 0}, {1, 0}, {0.3, 0.3}, {0, 1}}};
    for (const auto& poly : polys)
        for (int q = 0; q <= 10; ++q) {
            const QuadRule r = volume_quadrature(poly, q);
            for (int a = 0; a <= q; ++a)
                for (int b = 0; a + b <= q; ++b) {
                    double s = 0.0;
                    for (std::size_t i = 0; i < r.size(); ++i)
                        s += r.weights[i] * std::pow(r.points[i].x, a) * std::pow(r.points[i].y, b);
                    const double exact = monomial_by_boundary(poly, a, b);
                    EXPECT_NEAR(s, exact, 1e-12 * std::max(1.0, std::abs(exact))) << "q=" << q << " a=" << a << " b=" << b;
                }
        }
}

TEST(Quadrature, VoronoiElementAreas) {
    const Mesh m = build_voronoi(30, 5, 2);
    for (index_t k = 0; k < m.num_elements(); ++k) {
        const QuadRule r = volume_quadrature(m, k, 2);
        double a = 0.0;
        for (double w : r.weights)
            a += w;
        EXPECT_NEAR(a, m.elements[k].area, 1e-14);
    }
}
