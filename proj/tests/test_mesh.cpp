#include <polydg/mesh_generators.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace polydg;

namespace {

std::size_t count_kind(const Mesh& m, FacetKind k) {
    std::size_t n = 0;
    for (const Facet& f : m.facets)
        n += f.kind == k;
    return n;
}

// Every facet sits on its neighbors' facet lists and normals point outward.
// The centroid test only holds on convex elements; the closure identity sum |F| n_F = 0 holds on all.
void expect_consistent(const Mesh& m, bool convex = true) {
    EXPECT_NEAR(total_area(m), 1.0, 1e-10);
    for (const Facet& f : m.facets) {
        EXPECT_NEAR(norm(f.normal), 1.0, 1e-12);
        const Element& e = m.elements[f.adjacent[0]];
        const Point2 mid{0.5 * (f.a.x + f.b.x), 0.5 * (f.a.y + f.b.y)};
        if (convex)
            EXPECT_GT(dot(mid - e.centroid, f.normal), 0.0);
        if (f.is_interior())
            EXPECT_EQ(f.other(f.adjacent[0]), f.adjacent[1]);
    }
    for (const Element& e : m.elements) {
        EXPECT_GE(e.facets.size(), 3u);
        EXPECT_GT(e.area, 0.0);
        Point2 closure{0.0, 0.0};
        double xflux = 0.0;  // int_dK x n_x = area
        for (index_t fid : e.facets) {
            const Facet& f = m.facets[fid];
            EXPECT_TRUE(f.adjacent[0] == e.id || f.adjacent[1] == e.id);
            const Point2 n = f.normal_of(e.id);
            closure = closure + f.length * n;
            xflux += f.length * 0.5 * (f.a.x + f.b.x) * n.x;
        }
        EXPECT_LE(norm(closure), 1e-12);
        EXPECT_NEAR(xflux, e.area, 1e-12);
    }
}

}  // namespace

TEST(Mesh, CartesianCounts) {
    const Mesh m1 = build_cartesian(1, 1);
    EXPECT_EQ(m1.num_elements(), 1u);
    EXPECT_EQ(m1.num_facets(), 4u);
    EXPECT_EQ(count_kind(m1, FacetKind::Dirichlet), 4u);
    EXPECT_DOUBLE_EQ(m1.meshsize, std::sqrt(2.0));

    const Mesh m2 = build_cartesian(2, 2);
    EXPECT_EQ(m2.num_elements(), 4u);
    EXPECT_EQ(count_kind(m2, FacetKind::Interior), 4u);
    EXPECT_EQ(count_kind(m2, FacetKind::Dirichlet), 8u);

    const MeshStats s = mesh_stats(build_cartesian(3, 3));
    EXPECT_EQ(s.n_elements, 9u);
    EXPECT_EQ(s.n_interior_facets, 12u);
    EXPECT_EQ(s.max_facets_per_element, 4u);
    EXPECT_NEAR(s.h, std::sqrt(2.0) / 3.0, 1e-15);
    expect_consistent(build_cartesian(3, 3));
}

TEST(Mesh, TriangularCounts) {
    const Mesh m1 = build_triangular(1, 1);
    EXPECT_EQ(m1.num_elements(), 2u);
    EXPECT_EQ(count_kind(m1, FacetKind::Interior), 1u);
    const Mesh m2 = build_triangular(2, 2);
    EXPECT_EQ(m2.num_elements(), 8u);
    EXPECT_EQ(count_kind(m2, FacetKind::Interior), 8u);
    EXPECT_EQ(build_triangular(3, 5).num_elements(), 30u);
    expect_consistent(build_triangular(4, 3));
}

TEST(Mesh, VoronoiSingleSeedIsUnitSquare) {
    const Mesh m = build_voronoi(1, 0, 7);
    EXPECT_EQ(m.num_elements(), 1u);
    EXPECT_NEAR(m.elements[0].area, 1.0, 1e-14);
}

TEST(Mesh, VoronoiSymmetricSeedsGiveCartesian) {
    const Mesh m = build_voronoi_from_seeds({{0.25, 0.25}, {0.75, 0.25}, {0.25, 0.75}, {0.75, 0.75}}, 0);
    EXPECT_EQ(m.num_elements(), 4u);
    EXPECT_EQ(count_kind(m, FacetKind::Interior), 4u);
    EXPECT_EQ(count_kind(m, FacetKind::Dirichlet), 8u);
    for (const Element& e : m.elements)
        EXPECT_NEAR(e.area, 0.25, 1e-14);
}

TEST(Mesh, VoronoiPartition) {
    const Mesh m = build_voronoi(100, 100, 42);
    EXPECT_EQ(m.num_elements(), 100u);
    EXPECT_NEAR(total_area(m), 1.0, 1e-10);
    expect_consistent(m);
}

TEST(Mesh, VoronoiMeanFacetsPerElement) {
    const MeshStats s = mesh_stats(build_voronoi(3200, 10, 3));
    EXPECT_GE(s.mean_facets_per_element, 5.6);
    EXPECT_LE(s.mean_facets_per_element, 6.0);
}

TEST(Mesh, DuplicateSeedsAreRejected) {
    EXPECT_THROW(build_voronoi_from_seeds({{0.5, 0.5}, {0.5, 0.5}}, 0), Error);
}

TEST(Mesh, AgglomerateWholeSquare) {
    const Mesh m = agglomerate(build_cartesian(2, 2), 4, 0);
    EXPECT_EQ(m.num_elements(), 1u);
    EXPECT_EQ(count_kind(m, FacetKind::Interior), 0u);
}

TEST(Mesh, AgglomerateCartesian4x4) {
    const Mesh m = agglomerate(build_cartesian(4, 4), 4, 0);
    EXPECT_EQ(m.num_elements(), 4u);
    expect_consistent(m);
}

TEST(Mesh, AgglomerateTriangularTilesTheSquare) {
    const Mesh m = agglomerate(build_triangular(8, 8), 6, 5);
    expect_consistent(m, false);
    double len = 0.0;
    for (const Facet& f : m.facets)
        if (!f.is_interior())
            len += f.length;
    EXPECT_NEAR(len, 4.0, 1e-12);
}

TEST(Mesh, ClassifyBoundary) {
    const Mesh m = classify_boundary(build_cartesian(2, 2), {{{0.0, 0.0}, {1.0, 0.0}}});
    EXPECT_EQ(count_kind(m, FacetKind::Neumann), 2u);
    EXPECT_EQ(count_kind(m, FacetKind::Dirichlet), 6u);
    EXPECT_EQ(count_kind(classify_boundary(build_cartesian(2, 2), {}), FacetKind::Neumann), 0u);
    const std::vector<Segment> all{{{0, 0}, {1, 0}}, {{1, 0}, {1, 1}}, {{1, 1}, {0, 1}}, {{0, 1}, {0, 0}}};
    EXPECT_THROW(classify_boundary(build_cartesian(2, 2), all), Error);
}
