#include "hodge/geomgraph.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hodge/errors.hpp"
#include "hodge/prng.hpp"

namespace hodge::geom {

double connection_radius(Index n, double avg_degree) {
    return std::sqrt(avg_degree / (std::numbers::pi * static_cast<double>(n - 1)));
}

SimplicialComplex2 flag_complex(Index vertex_count, std::vector<EdgeVertices> edges) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::vector<std::vector<Index>> higher(static_cast<std::size_t>(vertex_count));
    for (const auto& [i, j] : edges) higher[static_cast<std::size_t>(i)].push_back(j);

    std::vector<TriangleVertices> triangles;
    for (const auto& [i, j] : edges) {
        const auto& ni = higher[static_cast<std::size_t>(i)];
        const auto& nj = higher[static_cast<std::size_t>(j)];
        // both lists are sorted; common entries > j close a triangle
        auto a = std::upper_bound(ni.begin(), ni.end(), j);
        auto b = nj.begin();
        while (a != ni.end() && b != nj.end()) {
            if (*a < *b) {
                ++a;
            } else if (*b < *a) {
                ++b;
            } else {
                triangles.push_back({i, j, *a});
                ++a;
                ++b;
            }
        }
    }
    std::sort(triangles.begin(), triangles.end());
    return SimplicialComplex2(vertex_count, std::move(edges), std::move(triangles));
}

SimplicialComplex2 generate(const GeomConfig& config) {
    if (config.n < 2) throw TooSparse("need at least 2 nodes");
    if (!(config.avg_degree > 0.0)) throw TooSparse("average degree must be positive");

    const Index n = config.n;
    SplitMix64 rng(config.seed);
    std::vector<std::array<double, 2>> points(static_cast<std::size_t>(n));
    for (auto& p : points) {
        p[0] = rng.uniform();
        p[1] = rng.uniform();
    }

    const double r = connection_radius(n, config.avg_degree);
    const double r2 = r * r;

    // Bucket grid with cell side >= r; neighbors lie in the 3x3 block.
    const int cells = std::max(1, std::min(static_cast<int>(1.0 / r), 4096));
    std::vector<std::vector<Index>> grid(static_cast<std::size_t>(cells) * static_cast<std::size_t>(cells));
    auto cell_of = [&](double x) { return std::min(cells - 1, static_cast<int>(x * cells)); };
    for (Index v = 0; v < n; ++v) {
        const auto& p = points[static_cast<std::size_t>(v)];
        grid[static_cast<std::size_t>(cell_of(p[0]) * cells + cell_of(p[1]))].push_back(v);
    }

    std::vector<EdgeVertices> edges;
    for (Index v = 0; v < n; ++v) {
        const auto& p = points[static_cast<std::size_t>(v)];
        const int cx = cell_of(p[0]);
        const int cy = cell_of(p[1]);
        for (int dx = -1; dx <= 1; ++dx) {
            for (int dy = -1; dy <= 1; ++dy) {
                const int x = cx + dx;
                const int y = cy + dy;
                if (x < 0 || y < 0 || x >= cells || y >= cells) continue;
                for (Index w : grid[static_cast<std::size_t>(x * cells + y)]) {
                    if (w <= v) continue;
                    const auto& q = points[static_cast<std::size_t>(w)];
                    const double ddx = p[0] - q[0];
                    const double ddy = p[1] - q[1];
                    if (ddx * ddx + ddy * ddy <= r2) edges.push_back({v, w});
                }
            }
        }
    }

    // Largest connected component via union-find.
    std::vector<Index> parent(static_cast<std::size_t>(n));
    for (Index v = 0; v < n; ++v) parent[static_cast<std::size_t>(v)] = v;
    auto find = [&](Index v) {
        while (parent[static_cast<std::size_t>(v)] != v) {
            parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
            v = parent[static_cast<std::size_t>(v)];
        }
        return v;
    };
    for (const auto& [a, b] : edges) {
        const Index ra = find(a);
        const Index rb = find(b);
        if (ra != rb) parent[static_cast<std::size_t>(std::max(ra, rb))] = std::min(ra, rb);
    }
    std::vector<Index> size(static_cast<std::size_t>(n), 0);
    for (Index v = 0; v < n; ++v) ++size[static_cast<std::size_t>(find(v))];
    Index best = 0;
    for (Index v = 0; v < n; ++v)
        if (size[static_cast<std::size_t>(v)] > size[static_cast<std::size_t>(best)]) best = v;

    const Index kept = size[static_cast<std::size_t>(best)];
    if (kept < 3 && !(n == 2 && kept == 2)) throw TooSparse("largest component has " + std::to_string(kept) + " vertices");

    std::vector<Index> relabel(static_cast<std::size_t>(n), -1);
    Index next = 0;
    for (Index v = 0; v < n; ++v)
        if (find(v) == best) relabel[static_cast<std::size_t>(v)] = next++;

    std::vector<EdgeVertices> kept_edges;
    for (const auto& [a, b] : edges) {
        const Index ra = relabel[static_cast<std::size_t>(a)];
        const Index rb = relabel[static_cast<std::size_t>(b)];
        if (ra >= 0 && rb >= 0) kept_edges.push_back({ra, rb});
    }
    return flag_complex(kept, std::move(kept_edges));
}

DegreeStats degree_stats(const SimplicialComplex2& complex) {
    DegreeStats s;
    const auto d = complex.degrees();
    for (Index x : d) {
        s.sum += x;
        s.sum_sq += static_cast<std::int64_t>(x) * x;
    }
    if (!d.empty()) {
        const double n = static_cast<double>(d.size());
        s.mean = static_cast<double>(s.sum) / n;
        s.variance = static_cast<double>(s.sum_sq) / n - s.mean * s.mean;
    }
    return s;
}

NnzExpectation l1_nnz_expectation_check(std::span<const SimplicialComplex2> samples, double avg_degree, Index n) {
    NnzExpectation out;
    out.formula = 2.0 * avg_degree * (avg_degree - 0.25) * static_cast<double>(n);
    if (samples.empty()) return out;
    double total = 0.0;
    for (const auto& k : samples) {
        const DegreeStats d = degree_stats(k);
        total += static_cast<double>(d.sum_sq) - 0.5 * static_cast<double>(d.sum);
    }
    out.empirical_mean = total / static_cast<double>(samples.size());
    return out;
}

}  // namespace hodge::geom
