#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hodge/complex.hpp"
#include "hodge/cyclebasis.hpp"
#include "hodge/harmonic.hpp"
#include "hodge/netsim/network.hpp"

namespace hodge::netsim {

/// Owner of edge (u, v), u < v: the higher-id endpoint.
inline Index edge_owner(const EdgeVertices& e) { return e[1]; }

struct GossipOutcome {
    double value = 0.0;
    std::vector<double> local_max;  // per node at quiescence
};

/// Every node broadcasts its value, then rebroadcasts each strict
/// improvement it hears.
GossipOutcome run_max_gossip(Network& net, std::span<const double> initial, Phase phase = Phase::Custom);

/// Hop-count flooding from `root`. A node adopts a sender whose probe
/// shortens its hop count (equal hops: the smaller sender id), acks it, sends
/// a retraction to the parent it abandons, and rebroadcasts when its hop
/// count drops. The tree is read from the parent pointers at quiescence and
/// checked against the acknowledged child sets.
SpanningTree run_spanning_tree(Network& net, Index root);

/// delta = 1 / max over nodes of the largest absolute row sum among owned rows.
double run_delta_gossip(Network& net, const Laplacian1& laplacian);

using DistributedIterateObserver = std::function<void(std::int64_t, const Eigen::VectorXd&)>;

struct DistributedHarmonic {
    HarmonicResult result;
    double y_inf_norm = 0.0;  // announced by the root with the stop verdict
};

/// Each node iterates the rows of its owned edges and broadcasts every new
/// value; a node relays values of edges it shares with a 2-hop owner. Every
/// `residual_check_period` iterations the max update is convergecast along
/// `tree` and the root broadcasts a stop/continue verdict. The root applies
/// the same ConvergenceMonitor as the centralized iteration, so in either
/// scheduling mode the iterates are bit-identical to iterate_harmonic at
/// every checked k. `config.delta` must be set. The observer, if any, sees
/// the assembled y^k at every check.
DistributedHarmonic run_distributed_harmonic(Network& net, const Laplacian1& laplacian, const SpanningTree& tree,
                                             const HarmonicConfig& config,
                                             const DistributedIterateObserver& observer = {});

struct HeardValue {
    Index from;
    double f;
    std::vector<Index> root_path;
};

struct IntegralOutcome {
    std::vector<double> f;                       // NaN at inactive nodes
    std::vector<std::vector<Index>> root_path;   // root ... v
    std::vector<std::vector<HeardValue>> heard;  // per node, from active neighbors
};

/// Each active node broadcasts once: the root with f = 0, every other node
/// after hearing its parent, with f = f(parent) +/- y(parent edge).
/// `active` empty means all nodes; `parent` may differ from tree.parent only
/// through the root having been handed off.
IntegralOutcome run_integral_function(Network& net, Index root, std::span<const Index> parent,
                                      std::span<const char> active, const Eigen::VectorXd& y);

/// Edge count of gamma(T, e) for e = (u, v), given the root paths of both
/// endpoints: the two tree segments below their common prefix, plus e.
Index hop_length_from_paths(std::span<const Index> path_u, std::span<const Index> path_v);

struct PruneSelectOutcome {
    std::vector<CycleRecord> P;                         // ordered by (hop, edge id); no chains
    std::vector<char> surviving;
    std::optional<Index> root;                          // root of the pruned tree; empty if nothing survives
    std::vector<Index> parent;                          // pruned-tree parents (-1 at root and at removed nodes)
    std::vector<std::vector<Index>> forwarded;          // per node, edge ids sent up during selection
};

/// Convergecast pruning (a non-terminal node without surviving children
/// leaves; a non-terminal root with one surviving child hands the root role
/// to it), then selection: every surviving node clusters what it holds by
/// label and forwards one shortest cycle per cluster, one packet each.
/// `records[v]` are the non-contractible cycles at v.
PruneSelectOutcome run_prune_and_select(Network& net, const SpanningTree& tree,
                                        const std::vector<std::vector<CycleRecord>>& records, double label_tol);

struct DistributedResult {
    SpanningTree tree;
    GeneratorSet generators;
    Index cycle_basis_size = 0;
    Index contractible_count = 0;
    Index surviving_nodes = 0;
    std::optional<Index> pruned_root;
    std::vector<std::int64_t> iterations_per_harmonic;
    double delta = 0.0;
    std::vector<Eigen::VectorXd> label_harmonics;
    CostReport cost;
    std::int64_t scheduled_deliveries = 0;
    std::int64_t delivered = 0;
    std::vector<std::string> transcript;
};

/// Observer for every harmonic run: (harmonic index, k, y^k).
using PipelineIterateObserver = std::function<void(int, std::int64_t, const Eigen::VectorXd&)>;

/// Root election (unless config.root is set), spanning tree, delta gossip,
/// labelling harmonics and integral functions, local classification at the
/// terminals, prune and select, and (unless config.reduce is false) |P|
/// further harmonics, integral functions over the pruned tree, a final
/// convergecast of integral vectors and the reduction at the root.
DistributedResult run_full_pipeline(const SimplicialComplex2& complex, const PipelineConfig& config,
                                    const SimConfig& sim, const PipelineIterateObserver& observer = {});

}  // namespace hodge::netsim
