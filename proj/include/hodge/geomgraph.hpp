#pragma once

#include <cstdint>
#include <span>

#include "hodge/complex.hpp"

namespace hodge::geom {

struct GeomConfig {
    Index n = 100;
    double avg_degree = 6.0;
    std::uint64_t seed = 0;
};

/// Connection radius sqrt(k / (pi (n - 1))): expected degree k for points
/// uniform in the unit square, ignoring boundary effects.
double connection_radius(Index n, double avg_degree);

/// Random geometric graph on the unit square with every 3-clique filled in.
/// If the graph is disconnected the largest component is returned (first in
/// vertex order among equals), reindexed preserving vertex order. Throws
/// TooSparse if that component has fewer than 3 vertices, except for n == 2.
SimplicialComplex2 generate(const GeomConfig& config);

/// Flag complex over an explicit edge list (triangles = all 3-cliques).
SimplicialComplex2 flag_complex(Index vertex_count, std::vector<EdgeVertices> edges);

struct DegreeStats {
    double mean = 0.0;
    double variance = 0.0;      // population variance
    std::int64_t sum = 0;       // = 2 |E|
    std::int64_t sum_sq = 0;
};

DegreeStats degree_stats(const SimplicialComplex2& complex);

struct NnzExpectation {
    double empirical_mean = 0.0;  // mean of sum d_i^2 - (1/2) sum d_i
    double formula = 0.0;         // 2 k (k - 1/4) n
};

/// `n` is the node count the samples were generated with.
NnzExpectation l1_nnz_expectation_check(std::span<const SimplicialComplex2> samples, double avg_degree, Index n);

}  // namespace hodge::geom
