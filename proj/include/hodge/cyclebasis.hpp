#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "hodge/complex.hpp"
#include "hodge/harmonic.hpp"

namespace hodge {

/// Rooted spanning tree of the 1-skeleton.
struct SpanningTree {
    Index root = 0;
    std::vector<Index> parent;        // -1 at the root
    std::vector<Index> parent_edge;   // edge to the parent, -1 at the root
    std::vector<Index> hop;           // depth below the root
    std::vector<std::vector<Index>> children;  // ascending ids
    std::vector<char> is_tree_edge;   // per edge
    std::vector<Index> tree_edges;    // ascending

    bool contains_edge(Index e) const { return is_tree_edge[static_cast<std::size_t>(e)] != 0; }
};

/// BFS tree; among equally short routes the parent with the smallest id wins.
SpanningTree spanning_tree_bfs(const SimplicialComplex2& complex, Index root);

/// Tree from an explicit parent map (parent[root] == -1). Validates that the
/// parents are neighbors and that every vertex reaches the root.
SpanningTree tree_from_parents(const SimplicialComplex2& complex, Index root, std::vector<Index> parent);

/// gamma(T, e): root -> u along the tree, across e = (u, v) in its own
/// orientation, then v -> root. Tree segments above the lowest common
/// ancestor cancel and are never emitted. Throws EdgeInTree.
SparseChain cycle_from_nontree_edge(const SimplicialComplex2& complex, const SpanningTree& tree, Index e);

/// Number of edges in gamma(T, e) after cancellation.
Index cycle_hop_length(const SimplicialComplex2& complex, const SpanningTree& tree, Index e);

/// f(v) = <y, pi(root -> v)>, accumulated from the root as
/// f(child) = f(parent) + y(edge) when the step parent -> child follows the
/// edge orientation (child has the larger id) and f(parent) - y(edge)
/// otherwise.
std::vector<double> integral_function(const SimplicialComplex2& complex, const SpanningTree& tree,
                                      const Eigen::VectorXd& y);

/// <y, gamma(T, e)> = f(u) + y(e) - f(v) for e = (u, v).
inline double cycle_integral(std::span<const double> f, double y_e, const EdgeVertices& e) {
    return f[static_cast<std::size_t>(e[0])] + y_e - f[static_cast<std::size_t>(e[1])];
}

/// A basis cycle together with everything the selection steps look at.
struct CycleRecord {
    Index nontree_edge = -1;
    EdgeVertices terminals{};
    SparseChain chain;
    Index hop_length = 0;
    std::vector<double> integrals;  // one per labelling harmonic
    std::vector<double> label;      // |integral| (sign-normalised vector when several harmonics)

    double integral() const { return integrals.front(); }
};

/// Label from raw integrals: absolute value for one harmonic; for several,
/// the vector with the sign that makes its largest-magnitude entry positive.
std::vector<double> make_label(std::span<const double> integrals);

/// Cycle basis records (one per non-tree edge, ascending edge id) with
/// integrals taken from the given harmonics via the integral function.
std::vector<CycleRecord> build_cycle_records(const SimplicialComplex2& complex, const SpanningTree& tree,
                                             std::span<const Eigen::VectorXd> harmonics);

struct ContractibilityTolerance {
    double absolute = 1e-4;
    double relative = 1e-6;  // scaled by ||y||_inf * hop_length
};

/// Contractible iff every integral satisfies
/// |<y, c>| < absolute + relative * ||y||_inf * hop_length.
bool is_contractible(const CycleRecord& record, std::span<const double> harmonic_inf_norms,
                     const ContractibilityTolerance& tol);

struct Classification {
    std::vector<CycleRecord> contractible;
    std::vector<CycleRecord> noncontractible;
};

Classification classify_cycles(std::vector<CycleRecord> cycles, std::span<const double> harmonic_inf_norms,
                               const ContractibilityTolerance& tol = {});

/// Labels match when every coordinate differs by at most
/// tol * max(||a||_inf, ||b||_inf).
bool labels_match(std::span<const double> a, std::span<const double> b, double tol);

/// Clusters of equal labels. Records are visited in increasing label order
/// and join the first cluster whose leader (smallest label) matches. Clusters
/// come out ordered by leader label; members by (hop_length, edge id).
std::vector<std::vector<CycleRecord>> partition_homologous(std::vector<CycleRecord> noncontractible, double tol);

/// Shortest member of each cluster (ties: smaller edge id), ordered by
/// (hop_length, edge id).
std::vector<CycleRecord> select_P(const std::vector<std::vector<CycleRecord>>& clusters);

/// Ordering used for representatives everywhere: (hop_length, edge id).
inline bool shorter_cycle(const CycleRecord& a, const CycleRecord& b) {
    return a.hop_length != b.hop_length ? a.hop_length < b.hop_length : a.nontree_edge < b.nontree_edge;
}

struct GeneratorSet {
    std::vector<CycleRecord> P;
    Eigen::MatrixXd R;            // m x |P|, R(i, j) = <y_i, P_j>
    std::vector<Index> kept;      // positions in P of the generators
    std::vector<CycleRecord> H;
};

/// R = Y^T P, integrating each harmonic through its integral function.
Eigen::MatrixXd integrals_matrix(const SimplicialComplex2& complex, const SpanningTree& tree,
                                 std::span<const CycleRecord> P, std::span<const Eigen::VectorXd> harmonics);

/// Left-to-right modified Gram-Schmidt over the columns of R; a column is
/// kept when its residual exceeds pivot_tol times the largest column norm.
/// Throws RankDeficientHarmonics when a column of R is itself below that
/// threshold: the harmonics then fail to see a cycle already known to be
/// non-contractible.
GeneratorSet reduce_to_H(std::vector<CycleRecord> P, Eigen::MatrixXd R, double pivot_tol);

struct PipelineConfig {
    HarmonicConfig harmonic;              // seed is the base seed for every harmonic
    ContractibilityTolerance contractible;
    double label_tol = 1e-4;
    double pivot_tol = 1e-8;
    int label_harmonics = 1;
    std::optional<Index> root;            // default: largest vertex id
    bool reduce = true;                   // false stops once P is known
};

/// Seed of labelling harmonic j (j < label_harmonics) or reduction harmonic
/// label_harmonics + i.
std::uint64_t harmonic_seed(std::uint64_t base, int index);

struct PipelineResult {
    SpanningTree tree;
    GeneratorSet generators;
    Index cycle_basis_size = 0;
    Index contractible_count = 0;
    std::vector<std::int64_t> iterations_per_harmonic;
    double delta = 0.0;
    std::vector<Eigen::VectorXd> label_harmonics;
};

/// Spanning tree, labelling harmonics, classification, P, and (unless
/// config.reduce is false) |P| further harmonics and the reduction to H.
PipelineResult run_centralized(const SimplicialComplex2& complex, const PipelineConfig& config);

}  // namespace hodge
