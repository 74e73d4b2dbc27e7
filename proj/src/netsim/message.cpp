#include "hodge/netsim/message.hpp"

#include <sstream>

namespace hodge::netsim {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::string_view phase_name(Phase p) {
    switch (p) {
        case Phase::RootElection: return "root_election";
        case Phase::SpanningTree: return "spanning_tree";
        case Phase::TreeAck: return "tree_ack";
        case Phase::DeltaGossip: return "delta_gossip";
        case Phase::Harmonic: return "harmonic";
        case Phase::HarmonicRelay: return "harmonic_relay";
        case Phase::HarmonicTermination: return "harmonic_termination";
        case Phase::HarmonicFinal: return "harmonic_final";
        case Phase::Integral: return "integral";
        case Phase::Prune: return "prune";
        case Phase::Select: return "select";
        case Phase::ReductionStart: return "reduction_start";
        case Phase::FinalConvergecast: return "final_convergecast";
        case Phase::Custom: return "custom";
    }
    return "unknown";
}

std::int64_t payload_floats(const Payload& p) {
    return std::visit(
        overloaded{
            [](const MaxGossip&) -> std::int64_t { return 1; },
            [](const TreeProbe&) -> std::int64_t { return 2; },
            [](const ChildAck&) -> std::int64_t { return 1; },
            [](const ChildRetract&) -> std::int64_t { return 1; },
            [](const IntegralDown& m) -> std::int64_t { return 2 + static_cast<std::int64_t>(m.root_path.size()); },
            [](const HarmonicY& m) -> std::int64_t { return 1 + 2 * static_cast<std::int64_t>(m.values.size()); },
            [](const ResidualUp&) -> std::int64_t { return 3; },
            [](const TerminateBroadcast&) -> std::int64_t { return 3; },
            [](const CycleReport& m) -> std::int64_t {
                return 4 + static_cast<std::int64_t>(m.entry.label.size() + m.entry.integrals.size());
            },
            [](const PruneNotice&) -> std::int64_t { return 2; },
            [](const RootHandoff&) -> std::int64_t { return 1; },
            [](const PhaseStart&) -> std::int64_t { return 1; },
        },
        p);
}

std::string payload_summary(const Payload& p) {
    std::ostringstream s;
    s.precision(17);
    std::visit(overloaded{
                   [&](const MaxGossip& m) { s << "max " << m.value; },
                   [&](const TreeProbe& m) { s << "probe origin=" << m.origin << " hop=" << m.hop_count; },
                   [&](const ChildAck& m) { s << "child " << m.child; },
                   [&](const ChildRetract& m) { s << "retract " << m.child; },
                   [&](const IntegralDown& m) { s << "f " << m.sender << ' ' << m.f_value << " depth=" << m.root_path.size(); },
                   [&](const HarmonicY& m) {
                       s << (m.relayed ? "relay" : "y") << " k=" << m.iteration;
                       for (const auto& v : m.values) s << ' ' << v.edge << ':' << v.value;
                   },
                   [&](const ResidualUp& m) { s << "residual k=" << m.iteration << ' ' << m.max_abs_delta; },
                   [&](const TerminateBroadcast& m) {
                       s << (m.stop ? "stop" : "continue") << " k=" << m.iteration;
                   },
                   [&](const CycleReport& m) {
                       s << "cycle (" << m.entry.terminals[0] << ',' << m.entry.terminals[1] << ") hop="
                         << m.entry.hop_length << " n_int=" << m.entry.integrals.size() << (m.last ? " last" : "");
                   },
                   [&](const PruneNotice& m) { s << "prune " << m.leaf << (m.removed ? " removed" : " kept"); },
                   [&](const RootHandoff& m) { s << "handoff " << m.new_root; },
                   [&](const PhaseStart& m) { s << "start m=" << m.harmonics; },
               },
               p);
    return s.str();
}

}  // namespace hodge::netsim
