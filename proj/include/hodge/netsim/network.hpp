#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "hodge/complex.hpp"
#include "hodge/errors.hpp"
#include "hodge/netsim/message.hpp"
#include "hodge/prng.hpp"

namespace hodge::netsim {

class NonQuiescent : public Error {
public:
    using Error::Error;
};

/// Protocol-level contract broken during a run (e.g. a non-terminal leaf
/// surviving the prune).
class ProtocolViolation : public Error {
public:
    using Error::Error;
};

enum class Scheduling { Synchronous, Asynchronous };

struct SimConfig {
    Scheduling scheduling = Scheduling::Synchronous;
    std::uint64_t async_seed = 0;
    int delay_spread = 4;            // async delays uniform on [1, delay_spread]
    int residual_check_period = 1;   // harmonic iterations between termination checks
    bool record_transcript = false;
    // With record_transcript, lines go here instead of being kept in memory.
    std::function<void(const std::string&)> transcript_sink;
    std::int64_t event_limit = 0;    // 0: unbounded; otherwise NonQuiescent beyond it
};

struct NodeCost {
    std::int64_t broadcasts = 0;  // transmissions; a broadcast and a unicast both count one
    std::int64_t packets_received = 0;
    std::int64_t payload_floats = 0;
};

class CostReport {
public:
    explicit CostReport(Index nodes = 0);

    Index node_count() const noexcept { return nodes_; }
    NodeCost& at(Phase phase, Index node) { return table_[idx(phase)][static_cast<std::size_t>(node)]; }
    const NodeCost& at(Phase phase, Index node) const { return table_[idx(phase)][static_cast<std::size_t>(node)]; }

    std::int64_t total_broadcasts(Phase phase) const;
    std::int64_t total_received(Phase phase) const;
    std::int64_t max_broadcasts(Phase phase) const;
    std::int64_t total_broadcasts() const;
    bool phase_active(Phase phase) const;

    /// `phase,node_id,broadcasts,packets_received,payload_floats`, one row per
    /// node for every phase that carried traffic.
    void write_csv(std::ostream& out) const;

private:
    static std::size_t idx(Phase p) { return static_cast<std::size_t>(p); }
    Index nodes_;
    std::array<std::vector<NodeCost>, kPhaseCount> table_;
};

/// Single-threaded discrete-event network over the 1-skeleton of a complex.
///
/// Events are processed by (time, sender, sequence number). Under synchronous
/// scheduling every packet takes one time unit; under asynchronous
/// scheduling each (packet, receiver) pair draws a delay from a seeded
/// stream, with arrival times clamped so each directed link stays FIFO.
class Network {
public:
    /// Keeps a reference: `topology` must outlive the network.
    Network(const SimplicialComplex2& topology, SimConfig config);
    Network(SimplicialComplex2&&, SimConfig) = delete;

    const SimplicialComplex2& topology() const noexcept { return *topology_; }
    const SimConfig& config() const noexcept { return config_; }
    Index node_count() const noexcept { return topology_->vertex_count(); }
    std::int64_t now() const noexcept { return now_; }

    void broadcast(Index src, Phase phase, Payload payload);
    void send(Index src, Index dst, Phase phase, Payload payload);

    /// Delivers packets until the queue drains; handler(receiver, message).
    template <typename Handler>
    void run(Handler&& handler);

    CostReport& cost() noexcept { return cost_; }
    const CostReport& cost() const noexcept { return cost_; }
    std::int64_t scheduled_deliveries() const noexcept { return scheduled_; }
    std::int64_t delivered() const noexcept { return delivered_; }
    const std::vector<std::string>& transcript() const noexcept { return transcript_; }
    std::vector<std::string> take_transcript() { return std::move(transcript_); }

private:
    struct Event {
        Index sender;
        Index receiver;  // kBroadcast: fan out to every neighbor at delivery
        Message message;
    };

    void enqueue(std::int64_t time, Event event);
    void recycle(std::vector<Event>&& bucket);
    std::int64_t arrival_time(Index src, Index dst);
    void log(const Message& m);

    const SimplicialComplex2* topology_;
    SimConfig config_;
    CostReport cost_;
    std::map<std::int64_t, std::vector<Event>> calendar_;
    std::vector<std::vector<std::int64_t>> link_clock_;  // [src][position of dst in neighbors(src)]
    SplitMix64 delay_rng_;
    std::int64_t now_ = 0;
    std::int64_t scheduled_ = 0;
    std::int64_t delivered_ = 0;
    std::int64_t processed_ = 0;
    std::vector<std::string> transcript_;
    std::vector<std::uint32_t> order_;
    std::vector<std::vector<Event>> spare_;
};

template <typename Handler>
void Network::run(Handler&& handler) {
    while (!calendar_.empty()) {
        auto first = calendar_.begin();
        now_ = first->first;
        std::vector<Event> bucket = std::move(first->second);
        calendar_.erase(first);

        // Appends happen in send order, so a stable sort by sender yields
        // (sender, sequence) order.
        order_.resize(bucket.size());
        std::iota(order_.begin(), order_.end(), 0U);
        auto by_sender = [&](std::uint32_t a, std::uint32_t b) { return bucket[a].sender < bucket[b].sender; };
        if (!std::is_sorted(order_.begin(), order_.end(), by_sender))
            std::stable_sort(order_.begin(), order_.end(), by_sender);

        for (const std::uint32_t i : order_) {
            const Event& ev = bucket[i];
            if (config_.event_limit > 0 && ++processed_ > config_.event_limit)
                throw NonQuiescent("event limit exceeded without reaching quiescence");
            if (ev.receiver == kBroadcast) {
                for (const Index r : topology_->neighbors(ev.sender)) {
                    ++delivered_;
                    ++cost_.at(ev.message.phase, r).packets_received;
                    handler(r, ev.message);
                }
            } else {
                ++delivered_;
                ++cost_.at(ev.message.phase, ev.receiver).packets_received;
                handler(ev.receiver, ev.message);
            }
        }
        recycle(std::move(bucket));
    }
}

}  // namespace hodge::netsim
