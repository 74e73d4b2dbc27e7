#include "hodge/netsim/network.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <sstream>

namespace hodge::netsim {

CostReport::CostReport(Index nodes) : nodes_(nodes) {
    for (auto& column : table_) column.assign(static_cast<std::size_t>(nodes), NodeCost{});
}

std::int64_t CostReport::total_broadcasts(Phase phase) const {
    std::int64_t total = 0;
    for (const auto& c : table_[idx(phase)]) total += c.broadcasts;
    return total;
}

std::int64_t CostReport::total_received(Phase phase) const {
    std::int64_t total = 0;
    for (const auto& c : table_[idx(phase)]) total += c.packets_received;
    return total;
}

std::int64_t CostReport::max_broadcasts(Phase phase) const {
    std::int64_t best = 0;
    for (const auto& c : table_[idx(phase)]) best = std::max(best, c.broadcasts);
    return best;
}

std::int64_t CostReport::total_broadcasts() const {
    std::int64_t total = 0;
    for (int p = 0; p < kPhaseCount; ++p) total += total_broadcasts(static_cast<Phase>(p));
    return total;
}

bool CostReport::phase_active(Phase phase) const {
    for (const auto& c : table_[idx(phase)])
        if (c.broadcasts != 0 || c.packets_received != 0) return true;
    return false;
}

void CostReport::write_csv(std::ostream& out) const {
    out << "phase,node_id,broadcasts,packets_received,payload_floats\n";
    for (int p = 0; p < kPhaseCount; ++p) {
        const auto phase = static_cast<Phase>(p);
        if (!phase_active(phase)) continue;
        for (Index v = 0; v < nodes_; ++v) {
            const NodeCost& c = at(phase, v);
            out << phase_name(phase) << ',' << v << ',' << c.broadcasts << ',' << c.packets_received << ','
                << c.payload_floats << '\n';
        }
    }
}

Network::Network(const SimplicialComplex2& topology, SimConfig config)
    : topology_(&topology),
      config_(config),
      cost_(topology.vertex_count()),
      delay_rng_(derive_seed(config.async_seed, 0x6e6574)) {
    if (config_.delay_spread < 1) throw std::invalid_argument("delay_spread must be at least 1");
    if (config_.residual_check_period < 1) throw std::invalid_argument("residual_check_period must be at least 1");
    if (config_.scheduling == Scheduling::Asynchronous) {
        link_clock_.resize(static_cast<std::size_t>(topology.vertex_count()));
        for (Index v = 0; v < topology.vertex_count(); ++v)
            link_clock_[static_cast<std::size_t>(v)].assign(topology.neighbors(v).size(), 0);
    }
}

void Network::enqueue(std::int64_t time, Event event) {
    auto [it, inserted] = calendar_.try_emplace(time);
    if (inserted && !spare_.empty()) {
        it->second = std::move(spare_.back());
        spare_.pop_back();
    }
    it->second.push_back(std::move(event));
}

void Network::recycle(std::vector<Event>&& bucket) {
    bucket.clear();
    if (spare_.size() < 8) spare_.push_back(std::move(bucket));
}

std::int64_t Network::arrival_time(Index src, Index dst) {
    const auto nb = topology_->neighbors(src);
    const auto pos = std::lower_bound(nb.begin(), nb.end(), dst) - nb.begin();
    const auto delay = 1 + static_cast<std::int64_t>(delay_rng_.below(static_cast<std::uint64_t>(config_.delay_spread)));
    auto& clock = link_clock_[static_cast<std::size_t>(src)][static_cast<std::size_t>(pos)];
    clock = std::max(clock, now_ + delay);
    return clock;
}

void Network::log(const Message& m) {
    std::ostringstream line;
    line << "t=" << now_ << ' ' << m.src << "->";
    if (m.dst == kBroadcast)
        line << '*';
    else
        line << m.dst;
    line << ' ' << phase_name(m.phase) << ' ' << payload_summary(m.payload);
    if (config_.transcript_sink)
        config_.transcript_sink(line.str());
    else
        transcript_.push_back(line.str());
}

void Network::broadcast(Index src, Phase phase, Payload payload) {
    NodeCost& c = cost_.at(phase, src);
    ++c.broadcasts;
    c.payload_floats += payload_floats(payload);
    const auto nb = topology_->neighbors(src);
    scheduled_ += static_cast<std::int64_t>(nb.size());
    Message m{src, kBroadcast, phase, std::move(payload)};
    if (config_.record_transcript) log(m);

    if (config_.scheduling == Scheduling::Synchronous) {
        enqueue(now_ + 1, Event{src, kBroadcast, std::move(m)});
        return;
    }
    for (const Index r : nb) enqueue(arrival_time(src, r), Event{src, r, m});
}

void Network::send(Index src, Index dst, Phase phase, Payload payload) {
    const auto nb = topology_->neighbors(src);
    if (!std::binary_search(nb.begin(), nb.end(), dst))
        throw ProtocolViolation("node " + std::to_string(src) + " sent to non-neighbor " + std::to_string(dst));
    NodeCost& c = cost_.at(phase, src);
    ++c.broadcasts;
    c.payload_floats += payload_floats(payload);
    ++scheduled_;
    Message m{src, dst, phase, std::move(payload)};
    if (config_.record_transcript) log(m);
    const std::int64_t t = config_.scheduling == Scheduling::Synchronous ? now_ + 1 : arrival_time(src, dst);
    enqueue(t, Event{src, dst, std::move(m)});
}

}  // namespace hodge::netsim
