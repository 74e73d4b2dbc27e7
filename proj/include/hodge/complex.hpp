#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

namespace hodge {

using Index = int;
using EdgeVertices = std::array<Index, 2>;
using TriangleVertices = std::array<Index, 3>;

/// Signed edge combination; cycles, boundaries and harmonics all live here.
using SparseChain = Eigen::SparseVector<double, 0, Index>;

/// Vertices, edges and triangles of a 2-skeleton.
///
/// Edges (i, j) have i < j and are oriented i -> j; triangles (i, j, k) have
/// i < j < k. Both sequences are sorted lexicographically, and an edge's
/// position in the sequence is its column index everywhere in the library.
/// The constructor rejects anything else, including triangles whose edges are
/// missing. Connectivity is not enforced here (see `is_connected`).
class SimplicialComplex2 {
public:
    SimplicialComplex2() = default;
    SimplicialComplex2(Index vertex_count, std::vector<EdgeVertices> edges,
                       std::vector<TriangleVertices> triangles);

    Index vertex_count() const noexcept { return vertex_count_; }
    Index edge_count() const noexcept { return static_cast<Index>(edges_.size()); }
    Index triangle_count() const noexcept { return static_cast<Index>(triangles_.size()); }

    const std::vector<EdgeVertices>& edges() const noexcept { return edges_; }
    const std::vector<TriangleVertices>& triangles() const noexcept { return triangles_; }
    const EdgeVertices& edge(Index e) const { return edges_[static_cast<std::size_t>(e)]; }

    /// Edge id of {u, v} in either order.
    std::optional<Index> edge_index(Index u, Index v) const;
    bool has_triangle(Index u, Index v, Index w) const;

    /// Sorted neighbor ids.
    std::span<const Index> neighbors(Index v) const;
    /// Ids of edges incident to v, ascending.
    std::span<const Index> incident_edges(Index v) const;

    Index degree(Index v) const { return static_cast<Index>(neighbors(v).size()); }
    std::vector<Index> degrees() const;

    /// Number of triangles having edge e as a face.
    std::span<const Index> upper_degrees() const noexcept { return upper_degree_; }

    bool is_connected() const;

private:
    Index vertex_count_ = 0;
    std::vector<EdgeVertices> edges_;
    std::vector<TriangleVertices> triangles_;
    std::vector<std::vector<Index>> neighbors_;
    std::vector<std::vector<Index>> incident_;
    std::vector<Index> upper_degree_;
};

struct BoundaryOperators {
    Eigen::SparseMatrix<int, Eigen::ColMajor, Index> d1;  // N x |E|
    Eigen::SparseMatrix<int, Eigen::ColMajor, Index> d2;  // |E| x |T|
};

/// First combinatorial Laplacian, row-major so one edge's row is a
/// contiguous slice.
struct Laplacian1 {
    Eigen::SparseMatrix<double, Eigen::RowMajor, Index> matrix;

    struct Row {
        std::span<const Index> columns;
        std::span<const double> values;
    };

    Index size() const noexcept { return static_cast<Index>(matrix.rows()); }
    Index nnz() const noexcept { return static_cast<Index>(matrix.nonZeros()); }
    Row row(Index i) const;
};

BoundaryOperators build_boundaries(const SimplicialComplex2& complex);

/// L1 = d2 d2^T + d1^T d1 by exact integer products.
Laplacian1 build_laplacian_algebraic(const BoundaryOperators& boundaries);

/// L1 entry by entry from adjacency: deg_u + 2 on the diagonal, +/-1 for
/// lower-adjacent edge pairs that share no triangle (sign by whether the two
/// edges induce the same orientation on the common vertex), 0 otherwise.
Laplacian1 build_laplacian_combinatorial(const SimplicialComplex2& complex);

/// Exact entry-wise equality including the sparsity pattern.
bool same_entries(const Laplacian1& a, const Laplacian1& b);

/// Absolute row sums (equal to column sums, L1 being symmetric).
std::vector<double> row_abs_sums(const Laplacian1& laplacian);

/// Induced 1-norm: maximum absolute column sum.
double l1_one_norm(const Laplacian1& laplacian);

struct LaplacianCounts {
    std::int64_t laplacian_nnz = 0;          // nonzeros of L1 (upper-adjacent pairs are zero)
    std::int64_t lower_adjacency_count = 0;  // diagonal + every ordered lower-adjacent pair
    std::int64_t degree_formula = 0;         // sum d_i^2 - (1/2) sum d_i
};

/// The two nonzero counts and the degree identity that should equal the
/// lower-adjacency count. On triangle-free complexes all three agree.
LaplacianCounts nnz_degree_identity(const SimplicialComplex2& complex);

/// Boundary of a 1-chain, d1 * c.
Eigen::VectorXd boundary_of(const BoundaryOperators& boundaries, const SparseChain& chain);

}  // namespace hodge
