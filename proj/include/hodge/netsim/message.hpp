#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hodge/complex.hpp"

namespace hodge::netsim {

inline constexpr Index kBroadcast = -1;

/// Cost-accounting label of every packet.
enum class Phase : int {
    RootElection,
    SpanningTree,
    TreeAck,
    DeltaGossip,
    Harmonic,
    HarmonicRelay,
    HarmonicTermination,
    HarmonicFinal,
    Integral,
    Prune,
    Select,
    ReductionStart,
    FinalConvergecast,
    Custom,
};
inline constexpr int kPhaseCount = static_cast<int>(Phase::Custom) + 1;

std::string_view phase_name(Phase p);

struct MaxGossip {
    double value;
};

/// Table-2 probe: `hop_count` is the hop the receiver would have via `origin`.
struct TreeProbe {
    Index origin;
    Index hop_count;
};

struct ChildAck {
    Index child;
};

/// Sent to a former parent when a better one is found.
struct ChildRetract {
    Index child;
};

/// Integral function value pushed down the tree, with the sender's path from
/// the root (used by terminal nodes to measure cycle lengths).
struct IntegralDown {
    Index sender;
    double f_value;
    std::vector<Index> root_path;
};

struct EdgeValue {
    Index edge;
    double value;
};

/// All values one node emits for an iteration: its owned edges in ascending
/// order, or (relayed) the edges it forwards for 2-hop owners.
struct HarmonicY {
    std::int64_t iteration;
    bool relayed;
    std::vector<EdgeValue> values;
};

struct ResidualUp {
    std::int64_t iteration;
    double max_abs_delta;
    double max_abs_y;
};

/// Root verdict for a residual check, flooded down the tree.
struct TerminateBroadcast {
    std::int64_t iteration;
    bool stop;
    double y_inf_norm;
};

struct CycleEntry {
    Index edge;
    EdgeVertices terminals;
    Index hop_length;
    std::vector<double> label;
    std::vector<double> integrals;
};

/// One packet per cycle; `last` closes a child's stream.
struct CycleReport {
    CycleEntry entry;
    bool last;
};

struct PruneNotice {
    Index leaf;
    bool removed;
};

struct RootHandoff {
    Index new_root;
};

struct PhaseStart {
    Index harmonics;
};

using Payload = std::variant<MaxGossip, TreeProbe, ChildAck, ChildRetract, IntegralDown, HarmonicY, ResidualUp,
                             TerminateBroadcast, CycleReport, PruneNotice, RootHandoff, PhaseStart>;

struct Message {
    Index src = 0;
    Index dst = kBroadcast;
    Phase phase = Phase::Custom;
    Payload payload;
};

/// Number of scalars carried, for payload accounting.
std::int64_t payload_floats(const Payload& p);

/// Short human-readable payload description for transcripts.
std::string payload_summary(const Payload& p);

}  // namespace hodge::netsim
