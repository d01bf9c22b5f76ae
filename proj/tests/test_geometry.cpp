#include <polydg/geometry.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace polydg;

TEST(Geometry, AreaCentroidDiameterOfUnitSquare) {
    const std::vector<Point2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    EXPECT_DOUBLE_EQ(signed_area(sq), 1.0);
    const Point2 c = centroid(sq);
    EXPECT_NEAR(c.x, 0.5, 1e-15);
    EXPECT_NEAR(c.y, 0.5, 1e-15);
    EXPECT_DOUBLE_EQ(diameter(sq), std::sqrt(2.0));
    EXPECT_DOUBLE_EQ(perimeter(sq), 4.0);
    const BoundingBox b = bounding_box(sq);
    EXPECT_DOUBLE_EQ(b.area(), 1.0);
}

TEST(Geometry, ClockwiseAreaIsNegative) {
    const std::vector<Point2> cw{{0, 0}, {0, 1}, {1, 1}, {1, 0}};
    EXPECT_DOUBLE_EQ(signed_area(cw), -1.0);
}

TEST(Geometry, TriangulateTriangleAndQuad) {
    const std::vector<Point2> tri{{0, 0}, {1, 0}, {0, 1}};
    EXPECT_EQ(triangulate_polygon(tri).size(), 1u);
    const std::vector<Point2> quad{{0, 0}, {2, 0}, {2, 1}, {0, 1}};
    const auto t = triangulate_polygon(quad);
    ASSERT_EQ(t.size(), 2u);
    EXPECT_NEAR(t[0].area() + t[1].area(), 2.0, 1e-14);
}

TEST(Geometry, TriangulateNonConvexLShape) {
    const std::vector<Point2> l{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
    const auto t = triangulate_polygon(l);
    ASSERT_EQ(t.size(), 4u);
    double a = 0.0;
    for (const Triangle& tr : t) {
        EXPECT_GT(tr.area(), 0.0);
        a += tr.area();
    }
    EXPECT_NEAR(a, signed_area(l), 1e-14);
}

TEST(Geometry, SimplePolygonCheck) {
    const std::vector<Point2> bowtie{{0, 0}, {1, 1}, {1, 0}, {0, 1}};
    EXPECT_FALSE(is_simple(bowtie));
    const std::vector<Point2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    EXPECT_TRUE(is_simple(sq));
}
