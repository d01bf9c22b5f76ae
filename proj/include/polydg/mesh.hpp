#pragma once

#include <polydg/geometry.hpp>

#include <algorithm>
#include <array>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace polydg {

using index_t = std::size_t;
inline constexpr index_t no_element = std::numeric_limits<index_t>::max();

enum class FacetKind { Interior, Dirichlet, Neumann };

inline const char* to_string(FacetKind k) {
    switch (k) {
    case FacetKind::Interior: return "interior";
    case FacetKind::Dirichlet: return "dirichlet";
    case FacetKind::Neumann: return "neumann";
    }
    return "?";
}

struct Element {
    index_t id = 0;
    std::vector<index_t> vertices;  // counter-clockwise loop
    std::vector<index_t> facets;    // facets[i] joins vertices[i] and vertices[i+1]
    double diameter = 0.0;
    double area = 0.0;
    Point2 centroid;
    BoundingBox box;
};

/// A straight mesh facet. The endpoint order (a, b) is counter-clockwise with
/// respect to adjacent[0], so the normal (b - a) rotated clockwise points out of it.
struct Facet {
    index_t id = 0;
    std::array<index_t, 2> vertices{};
    Point2 a, b;
    FacetKind kind = FacetKind::Dirichlet;
    Point2 normal;
    std::array<index_t, 2> adjacent{no_element, no_element};
    double length = 0.0;

    bool is_interior() const { return kind == FacetKind::Interior; }
    bool is_boundary() const { return kind != FacetKind::Interior; }
    Point2 midpoint() const { return 0.5 * (a + b); }
    /// Index (0 or 1) of element k among the adjacent elements.
    int side_of(index_t k) const { return adjacent[0] == k ? 0 : 1; }
    index_t other(index_t k) const { return adjacent[0] == k ? adjacent[1] : adjacent[0]; }
    /// Outward unit normal of element k on this facet.
    Point2 normal_of(index_t k) const { return side_of(k) == 0 ? normal : -1.0 * normal; }
};

struct Mesh {
    std::vector<Point2> vertices;
    std::vector<Element> elements;
    std::vector<Facet> facets;
    std::vector<std::vector<index_t>> neighbors;
    double meshsize = 0.0;

    std::size_t num_elements() const { return elements.size(); }
    std::size_t num_facets() const { return facets.size(); }

    std::vector<Point2> polygon(index_t k) const {
        std::vector<Point2> p;
        p.reserve(elements[k].vertices.size());
        for (index_t v : elements[k].vertices)
            p.push_back(vertices[v]);
        return p;
    }
};

struct MeshStats {
    double h = 0.0;
    std::size_t n_elements = 0;
    std::size_t n_interior_facets = 0;
    std::size_t n_boundary_facets = 0;
    std::size_t min_facets_per_element = 0;
    double mean_facets_per_element = 0.0;
    std::size_t max_facets_per_element = 0;
};

namespace detail {

inline void finalize_element_geometry(Mesh& m, Element& e) {
    const auto poly = m.polygon(e.id);
    e.area = signed_area(poly);
    e.centroid = centroid(poly);
    e.diameter = diameter(poly);
    e.box = bounding_box(poly);
}

}  // namespace detail

/// Build a mesh from vertex coordinates and counter-clockwise element loops.
/// Every edge shared by two loops becomes an interior facet owned by the
/// element with the smaller id; unshared edges become Dirichlet facets.
inline Mesh build_mesh(std::vector<Point2> vertices, std::vector<std::vector<index_t>> loops) {
    Mesh m;
    m.vertices = std::move(vertices);
    m.elements.resize(loops.size());

    std::map<std::pair<index_t, index_t>, index_t> edge_to_facet;
    for (index_t k = 0; k < loops.size(); ++k) {
        Element& e = m.elements[k];
        e.id = k;
        e.vertices = std::move(loops[k]);
        const std::size_t n = e.vertices.size();
        if (n < 3)
            throw Error("build_mesh: element " + std::to_string(k) + " has fewer than 3 vertices");
        for (index_t v : e.vertices)
            if (v >= m.vertices.size())
                throw Error("build_mesh: element " + std::to_string(k) + " references undefined vertex " +
                            std::to_string(v));
        detail::finalize_element_geometry(m, e);
        if (!(e.area > 0.0))
            throw Error("build_mesh: element " + std::to_string(k) + " is not counter-clockwise or has zero area");

        e.facets.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const index_t va = e.vertices[i], vb = e.vertices[(i + 1) % n];
            if (va == vb)
                throw Error("build_mesh: element " + std::to_string(k) + " has a zero-length edge");
            const auto key = std::minmax(va, vb);
            auto it = edge_to_facet.find(key);
            if (it == edge_to_facet.end()) {
                Facet f;
                f.id = m.facets.size();
                f.vertices = {va, vb};
                f.a = m.vertices[va];
                f.b = m.vertices[vb];
                f.adjacent = {k, no_element};
                f.kind = FacetKind::Dirichlet;
                edge_to_facet.emplace(key, f.id);
                e.facets[i] = f.id;
                m.facets.push_back(f);
            } else {
                Facet& f = m.facets[it->second];
                if (f.adjacent[1] != no_element)
                    throw Error("build_mesh: edge shared by more than two elements");
                if (f.adjacent[0] == k)
                    throw Error("build_mesh: element " + std::to_string(k) + " uses an edge twice");
                f.adjacent[1] = k;
                f.kind = FacetKind::Interior;
                e.facets[i] = f.id;
            }
        }
    }

    for (Facet& f : m.facets) {
        // The owner K1 is the smaller id; endpoints follow its counter-clockwise loop.
        if (f.is_interior() && f.adjacent[1] < f.adjacent[0]) {
            std::swap(f.adjacent[0], f.adjacent[1]);
            std::swap(f.vertices[0], f.vertices[1]);
            std::swap(f.a, f.b);
        }
        const Point2 t = f.b - f.a;
        f.length = norm(t);
        f.normal = {t.y / f.length, -t.x / f.length};
    }

    m.neighbors.assign(m.elements.size(), {});
    for (const Facet& f : m.facets) {
        if (!f.is_interior())
            continue;
        m.neighbors[f.adjacent[0]].push_back(f.adjacent[1]);
        m.neighbors[f.adjacent[1]].push_back(f.adjacent[0]);
    }
    for (auto& nb : m.neighbors) {
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }
    m.meshsize = 0.0;
    for (const Element& e : m.elements)
        m.meshsize = std::max(m.meshsize, e.diameter);
    return m;
}

/// An axis-aligned (or any straight) piece of the domain boundary.
struct Segment {
    Point2 a, b;
};

namespace detail {

inline bool point_on_segment(Point2 p, const Segment& s, double tol) {
    const Point2 d = s.b - s.a;
    const double l = norm(d);
    if (l == 0.0)
        return distance(p, s.a) <= tol;
    if (std::abs(cross(d, p - s.a)) > tol * l)
        return false;
    const double t = dot(p - s.a, d) / (l * l);
    return t >= -tol / l && t <= 1.0 + tol / l;
}

}  // namespace detail

/// Tag boundary facets lying inside one of the given segments as Neumann,
/// all other boundary facets as Dirichlet.
inline Mesh classify_boundary(Mesh mesh, const std::vector<Segment>& neumann, double tol = 1e-12) {
    double dirichlet_length = 0.0;
    for (Facet& f : mesh.facets) {
        if (f.is_interior())
            continue;
        f.kind = FacetKind::Dirichlet;
        for (const Segment& s : neumann) {
            if (detail::point_on_segment(f.a, s, tol) && detail::point_on_segment(f.b, s, tol)) {
                f.kind = FacetKind::Neumann;
                break;
            }
        }
        if (f.kind == FacetKind::Dirichlet)
            dirichlet_length += f.length;
    }
    if (!(dirichlet_length > 0.0))
        throw Error("classify_boundary: Γ_D must have positive measure");
    return mesh;
}

inline MeshStats mesh_stats(const Mesh& m) {
    MeshStats s;
    s.h = m.meshsize;
    s.n_elements = m.elements.size();
    for (const Facet& f : m.facets)
        (f.is_interior() ? s.n_interior_facets : s.n_boundary_facets) += 1;
    if (m.elements.empty())
        return s;
    s.min_facets_per_element = std::numeric_limits<std::size_t>::max();
    std::size_t total = 0;
    for (const Element& e : m.elements) {
        s.min_facets_per_element = std::min(s.min_facets_per_element, e.facets.size());
        s.max_facets_per_element = std::max(s.max_facets_per_element, e.facets.size());
        total += e.facets.size();
    }
    s.mean_facets_per_element = static_cast<double>(total) / static_cast<double>(m.elements.size());
    return s;
}

/// Sum of element areas.
inline double total_area(const Mesh& m) {
    double a = 0.0;
    for (const Element& e : m.elements)
        a += e.area;
    return a;
}

}  // namespace polydg
