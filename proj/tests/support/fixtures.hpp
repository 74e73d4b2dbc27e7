#pragma once

#include <algorithm>
#include <initializer_list>
#include <vector>

#include "hodge/complex.hpp"
#include "hodge/geomgraph.hpp"
#include "hodge/prng.hpp"

namespace fixtures {

using hodge::EdgeVertices;
using hodge::Index;
using hodge::SimplicialComplex2;
using hodge::SparseChain;
using hodge::TriangleVertices;

/// Sorts vertex tuples and the lists themselves before construction.
inline SimplicialComplex2 make(Index n, std::vector<EdgeVertices> edges, std::vector<TriangleVertices> triangles = {}) {
    for (auto& e : edges) std::sort(e.begin(), e.end());
    for (auto& t : triangles) std::sort(t.begin(), t.end());
    std::sort(edges.begin(), edges.end());
    std::sort(triangles.begin(), triangles.end());
    return SimplicialComplex2(n, std::move(edges), std::move(triangles));
}

inline SimplicialComplex2 single_edge() { return make(2, {{0, 1}}); }
inline SimplicialComplex2 hollow_triangle() { return make(3, {{0, 1}, {0, 2}, {1, 2}}); }
inline SimplicialComplex2 filled_triangle() { return make(3, {{0, 1}, {0, 2}, {1, 2}}, {{0, 1, 2}}); }
inline SimplicialComplex2 path3() { return make(3, {{0, 1}, {1, 2}}); }

/// Center 0, leaves 1..4.
inline SimplicialComplex2 star4() { return make(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}); }

/// Two hollow triangles sharing edge (1, 2).
inline SimplicialComplex2 two_triangles_sharing_edge() { return make(4, {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}}); }

/// Loops 0-1-2 and 2-3-4 sharing vertex 2.
inline SimplicialComplex2 figure_eight() { return make(5, {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {2, 4}, {3, 4}}); }

/// Square 0-1-2-3 with diagonal (0, 2), both halves filled.
inline SimplicialComplex2 filled_square() {
    return make(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {2, 3}}, {{0, 1, 2}, {0, 2, 3}});
}

/// Cycle 0-1-...-(n-1)-0; every degree is 2.
inline SimplicialComplex2 ring(Index n) {
    std::vector<EdgeVertices> edges;
    for (Index i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n});
    return make(n, edges);
}

/// Outer square 0..3 around inner square 4..7, the band between them
/// triangulated: one hole.
inline SimplicialComplex2 annulus() {
    std::vector<EdgeVertices> edges;
    std::vector<TriangleVertices> triangles;
    for (Index i = 0; i < 4; ++i) {
        const Index o = i, o1 = (i + 1) % 4, in = 4 + i, in1 = 4 + (i + 1) % 4;
        edges.push_back({o, o1});
        edges.push_back({in, in1});
        edges.push_back({o, in});
        edges.push_back({o1, in});
        triangles.push_back({o, o1, in});
        triangles.push_back({o1, in, in1});
    }
    return make(8, edges, triangles);
}

/// 4 x 3 vertex grid (vertex = 4 * row + col), every unit square split by
/// the diagonal (r, c)-(r+1, c+1) and filled, except squares (0, 0) and
/// (0, 2), which stay empty: two holes.
inline SimplicialComplex2 two_hole_grid() {
    std::vector<EdgeVertices> edges;
    std::vector<TriangleVertices> triangles;
    const auto id = [](Index r, Index c) { return 4 * r + c; };
    for (Index r = 0; r < 3; ++r)
        for (Index c = 0; c < 4; ++c) {
            if (c + 1 < 4) edges.push_back({id(r, c), id(r, c + 1)});
            if (r + 1 < 3) edges.push_back({id(r, c), id(r + 1, c)});
        }
    for (Index r = 0; r < 2; ++r)
        for (Index c = 0; c < 3; ++c) {
            if (r == 0 && (c == 0 || c == 2)) continue;
            edges.push_back({id(r, c), id(r + 1, c + 1)});
            triangles.push_back({id(r, c), id(r, c + 1), id(r + 1, c + 1)});
            triangles.push_back({id(r, c), id(r + 1, c), id(r + 1, c + 1)});
        }
    return make(12, edges, triangles);
}

/// Chain of the closed walk v0 -> v1 -> ... -> v0.
inline SparseChain loop_chain(const SimplicialComplex2& k, std::initializer_list<Index> walk) {
    const std::vector<Index> v(walk);
    SparseChain c(k.edge_count());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Index a = v[i], b = v[(i + 1) % v.size()];
        const Index e = k.edge_index(a, b).value();
        c.coeffRef(e) += a < b ? 1.0 : -1.0;
    }
    c.prune(0.0);
    return c;
}

/// Connected random complex on n vertices: a random spanning tree plus each
/// other pair with probability p, then every 3-clique filled with
/// probability fill.
inline SimplicialComplex2 random_complex(hodge::SplitMix64& rng, Index n, double p, double fill = 1.0) {
    std::vector<EdgeVertices> edges;
    for (Index v = 1; v < n; ++v) edges.push_back({static_cast<Index>(rng.below(static_cast<std::uint64_t>(v))), v});
    for (Index u = 0; u < n; ++u)
        for (Index v = u + 1; v < n; ++v)
            if (rng.uniform() < p) edges.push_back({u, v});
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    const SimplicialComplex2 flag = hodge::geom::flag_complex(n, edges);
    if (fill >= 1.0) return flag;
    std::vector<TriangleVertices> kept;
    for (const auto& t : flag.triangles())
        if (rng.uniform() < fill) kept.push_back(t);
    return SimplicialComplex2(n, flag.edges(), kept);
}

}  // namespace fixtures
