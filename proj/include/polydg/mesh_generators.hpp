#pragma once

#include <polydg/geometry.hpp>
#include <polydg/mesh.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace polydg {

/// Uniform nx-by-ny grid of axis-aligned rectangles on (0,1)^2.
inline Mesh build_cartesian(std::size_t nx, std::size_t ny) {
    if (nx == 0 || ny == 0)
        throw Error("build_cartesian: nx and ny must be positive");
    std::vector<Point2> verts;
    verts.reserve((nx + 1) * (ny + 1));
    for (std::size_t j = 0; j <= ny; ++j)
        for (std::size_t i = 0; i <= nx; ++i)
            verts.push_back({static_cast<double>(i) / static_cast<double>(nx),
                             static_cast<double>(j) / static_cast<double>(ny)});
    auto vid = [nx](std::size_t i, std::size_t j) { return i + (nx + 1) * j; };
    std::vector<std::vector<index_t>> loops;
    loops.reserve(nx * ny);
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i)
            loops.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
    return build_mesh(std::move(verts), std::move(loops));
}

/// Cartesian grid with every cell split along its SW-NE diagonal.
inline Mesh build_triangular(std::size_t nx, std::size_t ny) {
    if (nx == 0 || ny == 0)
        throw Error("build_triangular: nx and ny must be positive");
    std::vector<Point2> verts;
    for (std::size_t j = 0; j <= ny; ++j)
        for (std::size_t i = 0; i <= nx; ++i)
            verts.push_back({static_cast<double>(i) / static_cast<double>(nx),
                             static_cast<double>(j) / static_cast<double>(ny)});
    auto vid = [nx](std::size_t i, std::size_t j) { return i + (nx + 1) * j; };
    std::vector<std::vector<index_t>> loops;
    loops.reserve(2 * nx * ny);
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) {
            const index_t sw = vid(i, j), se = vid(i + 1, j), ne = vid(i + 1, j + 1), nw = vid(i, j + 1);
            loops.push_back({sw, se, ne});
            loops.push_back({sw, ne, nw});
        }
    return build_mesh(std::move(verts), std::move(loops));
}

namespace detail {

/// Merges points closer than tol into one vertex, using a hash grid.
class VertexWelder {
public:
    explicit VertexWelder(double tol) : tol_(tol) {}

    index_t insert(Point2 p) {
        const auto cx = static_cast<std::int64_t>(std::floor(p.x / tol_));
        const auto cy = static_cast<std::int64_t>(std::floor(p.y / tol_));
        for (std::int64_t dx = -1; dx <= 1; ++dx)
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                auto it = buckets_.find(key(cx + dx, cy + dy));
                if (it == buckets_.end())
                    continue;
                for (index_t v : it->second)
                    if (distance(points_[v], p) <= tol_)
                        return v;
            }
        const index_t id = points_.size();
        points_.push_back(p);
        buckets_[key(cx, cy)].push_back(id);
        return id;
    }

    std::vector<Point2> take_points() { return std::move(points_); }

private:
    static std::uint64_t key(std::int64_t x, std::int64_t y) {
        return (static_cast<std::uint64_t>(x) * 0x9E3779B97F4A7C15ULL) ^ static_cast<std::uint64_t>(y);
    }
    double tol_;
    std::vector<Point2> points_;
    std::unordered_map<std::uint64_t, std::vector<index_t>> buckets_;
};

/// Sutherland-Hodgman clip of a convex polygon by {x : (x - mid) . dir <= 0}.
inline std::vector<Point2> clip_halfplane(const std::vector<Point2>& poly, Point2 mid, Point2 dir) {
    std::vector<Point2> out;
    out.reserve(poly.size() + 1);
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 p = poly[i], q = poly[(i + 1) % n];
        const double fp = dot(p - mid, dir), fq = dot(q - mid, dir);
        if (fp <= 0.0)
            out.push_back(p);
        if ((fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0)) {
            const double t = fp / (fp - fq);
            out.push_back(p + t * (q - p));
        }
    }
    return out;
}

/// Uniform grid of seed indices used to enumerate nearby seeds ring by ring.
class SeedGrid {
public:
    explicit SeedGrid(const std::vector<Point2>& seeds) {
        n_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(seeds.size()) / 2.0)));
        cell_ = 1.0 / static_cast<double>(n_);
        cells_.assign(n_ * n_, {});
        for (index_t i = 0; i < seeds.size(); ++i)
            cells_[cell_of(seeds[i])].push_back(i);
    }
    std::size_t n() const { return n_; }
    double cell_size() const { return cell_; }
    std::pair<std::size_t, std::size_t> coords(Point2 p) const {
        auto c = [this](double v) {
            const auto k = static_cast<std::ptrdiff_t>(std::floor(v / cell_));
            return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(n_) - 1));
        };
        return {c(p.x), c(p.y)};
    }
    std::size_t cell_of(Point2 p) const {
        auto [i, j] = coords(p);
        return i + n_ * j;
    }
    const std::vector<index_t>& at(std::size_t i, std::size_t j) const { return cells_[i + n_ * j]; }

private:
    std::size_t n_ = 1;
    double cell_ = 1.0;
    std::vector<std::vector<index_t>> cells_;
};

inline double max_vertex_distance(const std::vector<Point2>& poly, Point2 s) {
    double r = 0.0;
    for (const Point2& p : poly)
        r = std::max(r, distance(p, s));
    return r;
}

inline std::vector<Point2> unit_square() { return {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}; }

inline std::vector<Point2> voronoi_cell_all_pairs(const std::vector<Point2>& seeds, index_t i) {
    std::vector<Point2> cell = unit_square();
    for (index_t j = 0; j < seeds.size() && !cell.empty(); ++j) {
        if (j == i)
            continue;
        cell = clip_halfplane(cell, 0.5 * (seeds[i] + seeds[j]), seeds[j] - seeds[i]);
    }
    return cell;
}

/// Exact cell by expanding rings: a seed farther than twice the current cell
/// radius cannot cut the cell, so the search stops once the ring distance exceeds it.
inline std::vector<Point2> voronoi_cell_grid(const std::vector<Point2>& seeds, const SeedGrid& grid, index_t i) {
    std::vector<Point2> cell = unit_square();
    const auto [ci, cj] = grid.coords(seeds[i]);
    const auto n = static_cast<std::ptrdiff_t>(grid.n());
    for (std::ptrdiff_t r = 0; r < n; ++r) {
        if (r >= 1 && static_cast<double>(r - 1) * grid.cell_size() > 2.0 * max_vertex_distance(cell, seeds[i]))
            break;
        for (std::ptrdiff_t dj = -r; dj <= r; ++dj)
            for (std::ptrdiff_t di = -r; di <= r; ++di) {
                if (std::max(std::abs(di), std::abs(dj)) != r)
                    continue;
                const std::ptrdiff_t gi = static_cast<std::ptrdiff_t>(ci) + di;
                const std::ptrdiff_t gj = static_cast<std::ptrdiff_t>(cj) + dj;
                if (gi < 0 || gj < 0 || gi >= n || gj >= n)
                    continue;
                for (index_t j : grid.at(static_cast<std::size_t>(gi), static_cast<std::size_t>(gj))) {
                    if (j == i)
                        continue;
                    cell = clip_halfplane(cell, 0.5 * (seeds[i] + seeds[j]), seeds[j] - seeds[i]);
                    if (cell.empty())
                        return cell;
                }
            }
    }
    return cell;
}

inline void check_distinct_seeds(const std::vector<Point2>& seeds) {
    std::vector<Point2> s = seeds;
    std::sort(s.begin(), s.end(), [](Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    for (std::size_t i = 1; i < s.size(); ++i)
        if (distance(s[i], s[i - 1]) < 1e-12)
            throw Error("build_voronoi: degenerate seed configuration");
}

inline std::vector<std::vector<Point2>> voronoi_cells(const std::vector<Point2>& seeds) {
    check_distinct_seeds(seeds);
    std::vector<std::vector<Point2>> cells(seeds.size());
    if (seeds.size() <= 512) {
        for (index_t i = 0; i < seeds.size(); ++i)
            cells[i] = voronoi_cell_all_pairs(seeds, i);
    } else {
        const SeedGrid grid(seeds);
        for (index_t i = 0; i < seeds.size(); ++i)
            cells[i] = voronoi_cell_grid(seeds, grid, i);
    }
    for (const auto& c : cells)
        if (c.size() < 3 || !(signed_area(c) > 0.0))
            throw Error("build_voronoi: degenerate seed configuration");
    return cells;
}

inline Mesh mesh_from_cells(const std::vector<std::vector<Point2>>& cells, double weld_tol = 1e-10) {
    VertexWelder welder(weld_tol);
    std::vector<std::vector<index_t>> loops;
    loops.reserve(cells.size());
    for (const auto& c : cells) {
        std::vector<index_t> loop;
        for (const Point2& p : c) {
            const index_t v = welder.insert(p);
            if (loop.empty() || loop.back() != v)
                loop.push_back(v);
        }
        while (loop.size() > 1 && loop.front() == loop.back())
            loop.pop_back();
        loops.push_back(std::move(loop));
    }
    return build_mesh(welder.take_points(), std::move(loops));
}

/// Uniform double in [0,1) from the top 53 bits, identical on every platform.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace detail

struct LloydOptions {
    std::size_t max_iterations = 100;
    double displacement_tol = 1e-8;
};

/// Voronoi mesh of the unit square from explicit seeds, optionally Lloyd-relaxed.
inline Mesh build_voronoi_from_seeds(std::vector<Point2> seeds, std::size_t lloyd_iters, double displacement_tol = 1e-8) {
    if (seeds.empty())
        throw Error("build_voronoi: at least one seed is required");
    auto cells = detail::voronoi_cells(seeds);
    for (std::size_t it = 0; it < lloyd_iters; ++it) {
        double max_move = 0.0;
        for (index_t i = 0; i < seeds.size(); ++i) {
            const Point2 c = centroid(cells[i]);
            max_move = std::max(max_move, distance(c, seeds[i]));
            seeds[i] = c;
        }
        cells = detail::voronoi_cells(seeds);
        if (max_move < displacement_tol)
            break;
    }
    return detail::mesh_from_cells(cells);
}

inline std::vector<Point2> random_seeds(std::size_t n, std::uint64_t rng_seed) {
    std::mt19937_64 rng(rng_seed);
    std::vector<Point2> seeds(n);
    for (auto& s : seeds) {
        s.x = detail::uniform01(rng);
        s.y = detail::uniform01(rng);
    }
    return seeds;
}

/// Lloyd-relaxed Voronoi mesh of (0,1)^2 from uniformly random seeds.
inline Mesh build_voronoi(std::size_t n_seeds, std::size_t lloyd_iters, std::uint64_t rng_seed) {
    if (n_seeds == 0)
        throw Error("build_voronoi: n_seeds must be positive");
    return build_voronoi_from_seeds(random_seeds(n_seeds, rng_seed), lloyd_iters);
}

namespace detail {

inline std::vector<std::size_t> cluster_elements(const Mesh& base, std::size_t target, std::uint64_t rng_seed) {
    const std::size_t n = base.num_elements();
    constexpr std::size_t unassigned = std::numeric_limits<std::size_t>::max();

    // Tie-breaking priority: element order for seed 0, a random permutation otherwise.
    std::vector<std::size_t> key(n);
    std::iota(key.begin(), key.end(), std::size_t{0});
    if (rng_seed != 0) {
        std::mt19937_64 rng(rng_seed);
        for (std::size_t i = n; i > 1; --i)
            std::swap(key[i - 1], key[rng() % i]);
    }

    std::vector<std::size_t> cluster(n, unassigned);
    std::vector<std::size_t> assigned_nbrs(n, 0);
    std::size_t n_clusters = 0, n_assigned = 0;

    auto assign = [&](index_t k, std::size_t c) {
        cluster[k] = c;
        ++n_assigned;
        for (index_t nb : base.neighbors[k])
            ++assigned_nbrs[nb];
    };

    while (n_assigned < n) {
        // Seed next to the already-built clusters to avoid enclosed islands.
        index_t seed = no_element;
        for (index_t k = 0; k < n; ++k) {
            if (cluster[k] != unassigned)
                continue;
            if (seed == no_element || assigned_nbrs[k] > assigned_nbrs[seed] ||
                (assigned_nbrs[k] == assigned_nbrs[seed] && key[k] < key[seed]))
                seed = k;
        }
        const std::size_t c = n_clusters++;
        assign(seed, c);
        std::size_t size = 1;
        std::set<index_t> frontier;
        for (index_t nb : base.neighbors[seed])
            if (cluster[nb] == unassigned)
                frontier.insert(nb);
        const Point2 origin = base.elements[seed].centroid;
        while (size < target && !frontier.empty()) {
            index_t best = no_element;
            double best_d = 0.0;
            for (index_t k : frontier) {
                const double d = distance(base.elements[k].centroid, origin);
                if (best == no_element || d < best_d - 1e-14 || (std::abs(d - best_d) <= 1e-14 && key[k] < key[best])) {
                    best = k;
                    best_d = d;
                }
            }
            frontier.erase(best);
            assign(best, c);
            ++size;
            for (index_t nb : base.neighbors[best])
                if (cluster[nb] == unassigned)
                    frontier.insert(nb);
        }
    }
    return cluster;
}

/// Merge cluster `from` into cluster `into`.
inline void merge_cluster(std::vector<std::size_t>& cluster, std::size_t from, std::size_t into) {
    for (auto& c : cluster)
        if (c == from)
            c = into;
}

/// Renumber clusters 0..n-1 in order of first appearance.
inline std::size_t compact_clusters(std::vector<std::size_t>& cluster) {
    std::map<std::size_t, std::size_t> remap;
    for (auto& c : cluster) {
        auto [it, inserted] = remap.emplace(c, remap.size());
        c = it->second;
    }
    return remap.size();
}

inline std::vector<std::vector<index_t>> cluster_adjacency(const Mesh& base, const std::vector<std::size_t>& cluster,
                                                           std::size_t n_clusters) {
    std::vector<std::set<index_t>> adj(n_clusters);
    for (const Facet& f : base.facets) {
        if (!f.is_interior())
            continue;
        const auto a = cluster[f.adjacent[0]], b = cluster[f.adjacent[1]];
        if (a != b) {
            adj[a].insert(b);
            adj[b].insert(a);
        }
    }
    std::vector<std::vector<index_t>> out(n_clusters);
    for (std::size_t c = 0; c < n_clusters; ++c)
        out[c].assign(adj[c].begin(), adj[c].end());
    return out;
}

inline void absorb_small_clusters(const Mesh& base, std::vector<std::size_t>& cluster, std::size_t min_size) {
    for (;;) {
        const std::size_t nc = compact_clusters(cluster);
        if (nc <= 1)
            return;
        std::vector<std::size_t> size(nc, 0);
        for (auto c : cluster)
            ++size[c];
        const auto adj = cluster_adjacency(base, cluster, nc);
        bool changed = false;
        for (std::size_t c = 0; c < nc && !changed; ++c) {
            if (size[c] >= min_size || adj[c].empty())
                continue;
            index_t into = adj[c].front();
            for (index_t o : adj[c])
                if (size[o] < size[into])
                    into = o;
            merge_cluster(cluster, c, into);
            changed = true;
        }
        if (!changed)
            return;
    }
}

inline constexpr std::size_t boundary_tag = std::numeric_limits<std::size_t>::max();

struct BoundaryEdge {
    index_t from, to;
    std::size_t other;  // neighboring cluster, or boundary_tag
};

struct ClusterBoundary {
    std::vector<std::vector<BoundaryEdge>> loops;
    bool pinched = false;
};

inline ClusterBoundary trace_cluster_boundary(const Mesh& base, const std::vector<std::size_t>& cluster, std::size_t c,
                                              const std::vector<index_t>& members) {
    std::multimap<index_t, BoundaryEdge> outgoing;
    for (index_t k : members) {
        const Element& e = base.elements[k];
        const std::size_t n = e.vertices.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Facet& f = base.facets[e.facets[i]];
            const std::size_t other = f.is_interior() ? cluster[f.other(k)] : boundary_tag;
            if (other == c)
                continue;
            outgoing.emplace(e.vertices[i], BoundaryEdge{e.vertices[i], e.vertices[(i + 1) % n], other});
        }
    }
    ClusterBoundary cb;
    for (const auto& [v, edge] : outgoing)
        if (outgoing.count(v) > 1)
            cb.pinched = true;
    if (cb.pinched)
        return cb;
    while (!outgoing.empty()) {
        std::vector<BoundaryEdge> loop;
        auto it = outgoing.begin();
        const index_t start = it->first;
        for (;;) {
            const BoundaryEdge e = it->second;
            outgoing.erase(it);
            loop.push_back(e);
            if (e.to == start)
                break;
            it = outgoing.find(e.to);
            if (it == outgoing.end())
                throw Error("agglomerate: open cluster boundary (internal error)");
        }
        cb.loops.push_back(std::move(loop));
    }
    return cb;
}

inline double loop_area(const Mesh& base, const std::vector<BoundaryEdge>& loop) {
    std::vector<Point2> p;
    for (const auto& e : loop)
        p.push_back(base.vertices[e.from]);
    return signed_area(p);
}

}  // namespace detail

/// Agglomerate a base mesh into connected clusters of about target_size elements.
/// The shared boundary of two agglomerates is split into maximal straight facets.
inline Mesh agglomerate(const Mesh& base, std::size_t target_size, std::uint64_t rng_seed) {
    if (target_size < 2)
        throw Error("agglomerate: target_size must be at least 2");
    std::vector<std::size_t> cluster = detail::cluster_elements(base, target_size, rng_seed);
    detail::absorb_small_clusters(base, cluster, (target_size + 1) / 2);

    // Clusters with holes or pinch points are merged with a neighbor until every
    // cluster boundary is one simple counter-clockwise loop.
    std::vector<std::vector<detail::BoundaryEdge>> loops;
    for (int pass = 0;; ++pass) {
        if (pass > 1000)
            throw Error("agglomerate: could not repair cluster topology (internal error)");
        const std::size_t nc = detail::compact_clusters(cluster);
        std::vector<std::vector<index_t>> members(nc);
        for (index_t k = 0; k < cluster.size(); ++k)
            members[cluster[k]].push_back(k);
        loops.assign(nc, {});
        bool repaired = false;
        for (std::size_t c = 0; c < nc && !repaired; ++c) {
            auto cb = detail::trace_cluster_boundary(base, cluster, c, members[c]);
            if (cb.pinched) {
                const auto adj = detail::cluster_adjacency(base, cluster, nc);
                if (adj[c].empty())
                    throw Error("agglomerate: isolated pinched cluster (internal error)");
                detail::merge_cluster(cluster, c, adj[c].front());
                repaired = true;
            } else if (cb.loops.size() > 1) {
                for (const auto& loop : cb.loops) {
                    if (detail::loop_area(base, loop) >= 0.0)
                        continue;
                    for (const auto& e : loop)
                        if (e.other != detail::boundary_tag)
                            detail::merge_cluster(cluster, e.other, c);
                }
                repaired = true;
            } else {
                loops[c] = std::move(cb.loops.front());
            }
        }
        if (!repaired)
            break;
    }

    // Keep only corners and the points where the neighbor across the boundary changes.
    std::vector<index_t> remap(base.vertices.size(), no_element);
    std::vector<Point2> verts;
    std::vector<std::vector<index_t>> elem_loops;
    for (const auto& loop : loops) {
        const std::size_t n = loop.size();
        std::vector<index_t> kept;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& in = loop[(i + n - 1) % n];
            const auto& out = loop[i];
            const bool straight =
                is_collinear_turn(base.vertices[in.from], base.vertices[out.from], base.vertices[out.to]);
            if (!straight || in.other != out.other)
                kept.push_back(out.from);
        }
        for (auto& v : kept) {
            if (remap[v] == no_element) {
                remap[v] = verts.size();
                verts.push_back(base.vertices[v]);
            }
            v = remap[v];
        }
        elem_loops.push_back(std::move(kept));
    }
    return build_mesh(std::move(verts), std::move(elem_loops));
}

}  // namespace polydg
