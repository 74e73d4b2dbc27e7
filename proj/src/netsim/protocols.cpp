#include "hodge/netsim/protocols.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace hodge::netsim {

namespace {

std::size_t at(Index i) { return static_cast<std::size_t>(i); }

template <typename T>
const T& expect(const Message& m, const char* context) {
    const T* p = std::get_if<T>(&m.payload);
    if (p == nullptr)
        throw ProtocolViolation(std::string("unexpected ") + std::string(phase_name(m.phase)) + " packet during " +
                                context);
    return *p;
}

CycleEntry to_entry(const CycleRecord& r) {
    return CycleEntry{r.nontree_edge, r.terminals, r.hop_length, r.label, r.integrals};
}

CycleRecord from_entry(const CycleEntry& e) {
    CycleRecord r;
    r.nontree_edge = e.edge;
    r.terminals = e.terminals;
    r.hop_length = e.hop_length;
    r.label = e.label;
    r.integrals = e.integrals;
    return r;
}

}  // namespace

GossipOutcome run_max_gossip(Network& net, std::span<const double> initial, Phase phase) {
    const Index n = net.node_count();
    if (initial.size() != at(n)) throw std::invalid_argument("one initial value per node required");
    GossipOutcome out;
    out.local_max.assign(initial.begin(), initial.end());
    for (Index v = 0; v < n; ++v) net.broadcast(v, phase, MaxGossip{out.local_max[at(v)]});
    net.run([&](Index r, const Message& m) {
        const double value = expect<MaxGossip>(m, "max gossip").value;
        if (value > out.local_max[at(r)]) {
            out.local_max[at(r)] = value;
            net.broadcast(r, phase, MaxGossip{value});
        }
    });
    if (n == 0) return out;
    out.value = out.local_max.front();
    for (const double v : out.local_max)
        if (v != out.value) throw ProtocolViolation("max gossip ended without agreement");
    return out;
}

SpanningTree run_spanning_tree(Network& net, Index root) {
    const SimplicialComplex2& complex = net.topology();
    const Index n = complex.vertex_count();
    if (root < 0 || root >= n) throw std::out_of_range("root outside the vertex range");
    constexpr Index kUnreached = std::numeric_limits<Index>::max();

    std::vector<Index> hop(at(n), kUnreached);
    std::vector<Index> parent(at(n), -1);
    std::vector<std::vector<Index>> acked(at(n));
    hop[at(root)] = 0;
    net.broadcast(root, Phase::SpanningTree, TreeProbe{root, 1});

    net.run([&](Index r, const Message& m) {
        if (const auto* probe = std::get_if<TreeProbe>(&m.payload)) {
            if (r == root) return;
            const bool shorter = probe->hop_count < hop[at(r)];
            const bool tie = probe->hop_count == hop[at(r)] && probe->origin < parent[at(r)];
            if (!shorter && !tie) return;
            if (parent[at(r)] != probe->origin) {
                if (parent[at(r)] != -1) net.send(r, parent[at(r)], Phase::TreeAck, ChildRetract{r});
                net.send(r, probe->origin, Phase::TreeAck, ChildAck{r});
                parent[at(r)] = probe->origin;
            }
            if (shorter) {
                hop[at(r)] = probe->hop_count;
                net.broadcast(r, Phase::SpanningTree, TreeProbe{r, probe->hop_count + 1});
            }
        } else if (const auto* ack = std::get_if<ChildAck>(&m.payload)) {
            acked[at(r)].push_back(ack->child);
        } else {
            const Index child = expect<ChildRetract>(m, "spanning tree").child;
            auto& list = acked[at(r)];
            const auto it = std::find(list.begin(), list.end(), child);
            if (it == list.end()) throw ProtocolViolation("retraction from a node that never acknowledged");
            list.erase(it);
        }
    });

    SpanningTree tree = tree_from_parents(complex, root, parent);
    for (Index v = 0; v < n; ++v) {
        auto children = acked[at(v)];
        std::sort(children.begin(), children.end());
        if (children != tree.children[at(v)]) throw ProtocolViolation("acknowledged children disagree with parents");
        if (tree.hop[at(v)] != hop[at(v)]) throw ProtocolViolation("hop count disagrees with the parent chain");
    }
    return tree;
}

double run_delta_gossip(Network& net, const Laplacian1& laplacian) {
    const SimplicialComplex2& complex = net.topology();
    const auto sums = row_abs_sums(laplacian);
    std::vector<double> local(at(complex.vertex_count()), 0.0);
    for (Index e = 0; e < complex.edge_count(); ++e) {
        double& slot = local[at(edge_owner(complex.edge(e)))];
        slot = std::max(slot, sums[at(e)]);
    }
    const double norm = run_max_gossip(net, local, Phase::DeltaGossip).value;
    if (!(norm > 0.0)) throw ZeroMatrix("Laplacian has no nonzero entries");
    return 1.0 / norm;
}

namespace {

/// Where entry `position` of a neighbor's bundle goes at the receiver (-1: unused).
struct Route {
    std::uint32_t position;
    Index edge;
    int foreign_slot;
    int relay_slot;
};

/// Routes for the entries a receiver uses, plus the bundle size it expects.
struct RouteTable {
    std::size_t bundle_size = 0;
    std::vector<Route> used;
};

/// Per-node state of the distributed harmonic iteration.
struct HarmonicNode {
    std::vector<Index> owned;    // ascending edge ids
    std::vector<Index> foreign;  // non-owned columns of owned rows, ascending
    std::vector<Index> relay;    // edges this node rebroadcasts, ascending
    std::vector<Index> local_columns;
    std::vector<std::size_t> row_begin;
    std::vector<Laplacian1::Row> rows;
    std::vector<RouteTable> direct_routes;  // per neighbor position, over its owned edges
    std::vector<RouteTable> relay_routes;   // per neighbor position, over its relay edges

    std::vector<double> own, next_own;
    std::vector<double> cur, ahead;
    std::vector<std::int64_t> cur_tag, ahead_tag;
    std::size_t have_cur = 0, have_ahead = 0;
    std::array<std::vector<double>, 2> relay_value;
    std::array<std::vector<std::int64_t>, 2> relay_tag;
    std::array<std::size_t, 2> relay_have{0, 0};
    std::int64_t k = 0;
    bool blocked = false;
    bool done = false;

    bool own_ready = false;
    double own_delta = 0.0, own_y = 0.0;
    std::size_t child_reports = 0;
    double child_delta = 0.0, child_y = 0.0;
};

class HarmonicRun {
public:
    HarmonicRun(Network& net, const Laplacian1& laplacian, const SpanningTree& tree, const HarmonicConfig& config,
                const DistributedIterateObserver& observer)
        : net_(net),
          complex_(net.topology()),
          laplacian_(laplacian),
          tree_(tree),
          config_(config),
          observer_(observer),
          delta_(*config.delta),
          cap_(config.max_iterations.value_or(default_max_iterations(laplacian.size(), config.epsilon))),
          period_(net.config().residual_check_period),
          monitor_(config.epsilon, *config.delta),
          nodes_(at(complex_.vertex_count())) {
        build_local_rows();
        build_relays();
        build_routes();
    }

    DistributedHarmonic run() {
        for (Index v = 0; v < complex_.vertex_count(); ++v) {
            HarmonicNode& node = nodes_[at(v)];
            for (std::size_t i = 0; i < node.owned.size(); ++i) node.own[i] = initial_value(config_.seed, node.owned[i]);
            send_values(v, Phase::Harmonic);
        }
        for (Index v = 0; v < complex_.vertex_count(); ++v) advance(v);

        net_.run([&](Index r, const Message& m) { deliver(r, m); });

        for (const HarmonicNode& node : nodes_)
            if (!node.done || node.k != stop_iteration_) throw ProtocolViolation("harmonic iteration did not terminate");

        DistributedHarmonic out;
        out.result.y = assemble();
        out.result.iterations = stop_iteration_;
        out.result.delta_used = delta_;
        out.result.final_update_norm = final_update_;
        out.y_inf_norm = y_inf_;
        if (failure_) throw MaxIterationsExceeded(*failure_, std::move(out.result));
        return out;
    }

private:
    static int slot_of(const std::vector<Index>& sorted, Index x) {
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
        return it != sorted.end() && *it == x ? static_cast<int>(it - sorted.begin()) : -1;
    }

    void build_local_rows() {
        for (Index e = 0; e < complex_.edge_count(); ++e) nodes_[at(edge_owner(complex_.edge(e)))].owned.push_back(e);
        for (Index v = 0; v < complex_.vertex_count(); ++v) {
            HarmonicNode& node = nodes_[at(v)];
            for (const Index e : node.owned)
                for (const Index c : laplacian_.row(e).columns)
                    if (edge_owner(complex_.edge(c)) != v) node.foreign.push_back(c);
            std::sort(node.foreign.begin(), node.foreign.end());
            node.foreign.erase(std::unique(node.foreign.begin(), node.foreign.end()), node.foreign.end());

            const std::size_t n_own = node.owned.size();
            node.row_begin.push_back(0);
            for (const Index e : node.owned) {
                for (const Index c : laplacian_.row(e).columns) {
                    const int o = slot_of(node.owned, c);
                    node.local_columns.push_back(o >= 0 ? o : static_cast<Index>(n_own) + slot_of(node.foreign, c));
                }
                node.row_begin.push_back(node.local_columns.size());
            }
            for (std::size_t i = 0; i < n_own; ++i) {
                const std::span<const Index> cols(node.local_columns.data() + node.row_begin[i],
                                                  node.row_begin[i + 1] - node.row_begin[i]);
                node.rows.push_back(Laplacian1::Row{cols, laplacian_.row(node.owned[i]).values});
            }
            node.own.assign(n_own, 0.0);
            node.next_own.assign(n_own, 0.0);
            node.cur.assign(node.foreign.size(), 0.0);
            node.ahead.assign(node.foreign.size(), 0.0);
            node.cur_tag.assign(node.foreign.size(), -1);
            node.ahead_tag.assign(node.foreign.size(), -1);
        }
    }

    static bool contains(const std::vector<Index>& sorted, Index x) {
        return std::binary_search(sorted.begin(), sorted.end(), x);
    }

    /// Edge (a, c) owned by c is relayed by a when some other neighbor b of a
    /// needs it but is not adjacent to c.
    void build_relays() {
        for (Index a = 0; a < complex_.vertex_count(); ++a) {
            HarmonicNode& node = nodes_[at(a)];
            for (const Index f : complex_.incident_edges(a)) {
                const Index c = edge_owner(complex_.edge(f));
                if (c == a) continue;
                for (const Index b : complex_.neighbors(a)) {
                    if (b == c || !contains(nodes_[at(b)].foreign, f) || complex_.edge_index(b, c)) continue;
                    node.relay.push_back(f);
                    break;
                }
            }
            std::sort(node.relay.begin(), node.relay.end());
            for (int p = 0; p < 2; ++p) {
                node.relay_value[at(p)].assign(node.relay.size(), 0.0);
                node.relay_tag[at(p)].assign(node.relay.size(), -1);
            }
        }
        for (Index b = 0; b < complex_.vertex_count(); ++b) {
            for (const Index f : nodes_[at(b)].foreign) {
                const EdgeVertices& ev = complex_.edge(f);
                const Index c = edge_owner(ev);
                const Index a = ev[0];
                const bool direct = complex_.edge_index(b, c).has_value();
                const bool relayed = complex_.edge_index(b, a).has_value() && contains(nodes_[at(a)].relay, f);
                if (!direct && !relayed) throw ProtocolViolation("an L1 row value is out of two-hop reach");
            }
        }
    }

    void build_routes() {
        for (Index r = 0; r < complex_.vertex_count(); ++r) {
            HarmonicNode& node = nodes_[at(r)];
            for (const Index s : complex_.neighbors(r)) {
                const HarmonicNode& sender = nodes_[at(s)];
                auto& direct = node.direct_routes.emplace_back();
                direct.bundle_size = sender.owned.size();
                for (std::size_t i = 0; i < sender.owned.size(); ++i) {
                    const Index e = sender.owned[i];
                    const Route route{static_cast<std::uint32_t>(i), e, slot_of(node.foreign, e), slot_of(node.relay, e)};
                    if (route.foreign_slot >= 0 || route.relay_slot >= 0) direct.used.push_back(route);
                }
                auto& relayed = node.relay_routes.emplace_back();
                relayed.bundle_size = sender.relay.size();
                for (std::size_t i = 0; i < sender.relay.size(); ++i) {
                    const Index e = sender.relay[i];
                    const Route route{static_cast<std::uint32_t>(i), e, slot_of(node.foreign, e), -1};
                    if (route.foreign_slot >= 0) relayed.used.push_back(route);
                }
            }
        }
    }

    void send_values(Index v, Phase phase) {
        const HarmonicNode& node = nodes_[at(v)];
        if (node.owned.empty()) return;
        HarmonicY packet{node.k, false, {}};
        packet.values.reserve(node.owned.size());
        for (std::size_t i = 0; i < node.owned.size(); ++i) packet.values.push_back(EdgeValue{node.owned[i], node.own[i]});
        net_.broadcast(v, phase, std::move(packet));
    }

    void store_relay(Index v, std::int64_t iteration, int slot, double value) {
        HarmonicNode& node = nodes_[at(v)];
        const auto p = static_cast<std::size_t>(iteration & 1);
        auto& tag = node.relay_tag[p][static_cast<std::size_t>(slot)];
        if (tag == iteration) return;
        tag = iteration;
        node.relay_value[p][static_cast<std::size_t>(slot)] = value;
        if (++node.relay_have[p] < node.relay.size()) return;
        node.relay_have[p] = 0;
        HarmonicY packet{iteration, true, {}};
        packet.values.reserve(node.relay.size());
        for (std::size_t i = 0; i < node.relay.size(); ++i)
            packet.values.push_back(EdgeValue{node.relay[i], node.relay_value[p][i]});
        net_.broadcast(v, Phase::HarmonicRelay, std::move(packet));
    }

    void store_foreign(HarmonicNode& node, std::int64_t iteration, int slot, double value) {
        const auto i = static_cast<std::size_t>(slot);
        if (iteration == node.k) {
            if (node.cur_tag[i] == iteration) return;
            node.cur_tag[i] = iteration;
            node.cur[i] = value;
            ++node.have_cur;
        } else if (iteration == node.k + 1) {
            if (node.ahead_tag[i] == iteration) return;
            node.ahead_tag[i] = iteration;
            node.ahead[i] = value;
            ++node.have_ahead;
        } else if (iteration > node.k + 1) {
            throw ProtocolViolation("harmonic value from more than one iteration ahead");
        }
    }

    void deliver(Index r, const Message& m) {
        if (const auto* y = std::get_if<HarmonicY>(&m.payload)) {
            if (m.phase == Phase::HarmonicFinal) return;
            HarmonicNode& node = nodes_[at(r)];
            const auto nb = complex_.neighbors(r);
            const auto j = static_cast<std::size_t>(std::lower_bound(nb.begin(), nb.end(), m.src) - nb.begin());
            const RouteTable& routes = y->relayed ? node.relay_routes[j] : node.direct_routes[j];
            if (routes.bundle_size != y->values.size()) throw ProtocolViolation("harmonic bundle of unexpected size");
            for (const Route& route : routes.used) {
                const EdgeValue& ev = y->values[route.position];
                if (route.edge != ev.edge) throw ProtocolViolation("harmonic bundle out of order");
                if (route.relay_slot >= 0) store_relay(r, y->iteration, route.relay_slot, ev.value);
                if (route.foreign_slot >= 0) store_foreign(node, y->iteration, route.foreign_slot, ev.value);
            }
            advance(r);
        } else if (const auto* up = std::get_if<ResidualUp>(&m.payload)) {
            HarmonicNode& node = nodes_[at(r)];
            const std::int64_t next_check = node.blocked ? node.k : (node.k / period_ + 1) * period_;
            if (up->iteration != next_check) throw ProtocolViolation("residual report out of step");
            ++node.child_reports;
            node.child_delta = max_keep_nan(node.child_delta, up->max_abs_delta);
            node.child_y = max_keep_nan(node.child_y, up->max_abs_y);
            report(r);
        } else {
            const auto& verdict = expect<TerminateBroadcast>(m, "harmonic iteration");
            if (m.src != tree_.parent[at(r)]) return;
            apply_verdict(r, verdict);
        }
    }

    void advance(Index v) {
        HarmonicNode& node = nodes_[at(v)];
        while (!node.blocked && !node.done && node.have_cur == node.foreign.size()) {
            const std::size_t n_own = node.owned.size();
            auto lookup = [&node, n_own](Index c) {
                const auto i = static_cast<std::size_t>(c);
                return i < n_own ? node.own[i] : node.cur[i - n_own];
            };
            double dmax = 0.0, ymax = 0.0;
            for (std::size_t i = 0; i < n_own; ++i) {
                node.next_own[i] = relaxed_value(node.rows[i], node.own[i], delta_, lookup);
                dmax = max_keep_nan(dmax, std::abs(node.next_own[i] - node.own[i]));
                ymax = max_keep_nan(ymax, std::abs(node.next_own[i]));
            }
            node.own.swap(node.next_own);
            ++node.k;
            node.cur.swap(node.ahead);
            node.cur_tag.swap(node.ahead_tag);
            node.have_cur = node.have_ahead;
            node.have_ahead = 0;

            if (node.k % period_ == 0) {
                node.blocked = true;
                node.own_ready = true;
                node.own_delta = dmax;
                node.own_y = ymax;
                report(v);
                return;
            }
            send_values(v, Phase::Harmonic);
        }
    }

    void report(Index v) {
        HarmonicNode& node = nodes_[at(v)];
        if (!node.own_ready || node.child_reports != tree_.children[at(v)].size()) return;
        const double d = max_keep_nan(node.own_delta, node.child_delta);
        const double y = max_keep_nan(node.own_y, node.child_y);
        node.own_ready = false;
        node.child_reports = 0;
        node.child_delta = 0.0;
        node.child_y = 0.0;
        if (v == tree_.root)
            decide(node.k, d, y);
        else
            net_.send(v, tree_.parent[at(v)], Phase::HarmonicTermination, ResidualUp{node.k, d, y});
    }

    void decide(std::int64_t k, double update, double y_inf) {
        if (observer_) observer_(k, assemble());
        final_update_ = update;
        bool stop = true;
        if (!std::isfinite(update))
            failure_ = "harmonic iteration diverged";
        else if (monitor_.observe(k, update))
            stop = true;
        else if (k >= cap_)
            failure_ = "harmonic iteration hit the cap of " + std::to_string(cap_) + " iterations";
        else
            stop = false;
        apply_verdict(tree_.root, TerminateBroadcast{k, stop, y_inf});
    }

    void apply_verdict(Index v, const TerminateBroadcast& verdict) {
        HarmonicNode& node = nodes_[at(v)];
        if (!node.blocked || verdict.iteration != node.k) throw ProtocolViolation("verdict out of step");
        if (!tree_.children[at(v)].empty()) net_.broadcast(v, Phase::HarmonicTermination, verdict);
        node.blocked = false;
        if (verdict.stop) {
            node.done = true;
            stop_iteration_ = node.k;
            y_inf_ = verdict.y_inf_norm;
            send_values(v, Phase::HarmonicFinal);
            return;
        }
        send_values(v, Phase::Harmonic);
        advance(v);
    }

    Eigen::VectorXd assemble() const {
        Eigen::VectorXd y(laplacian_.size());
        for (const HarmonicNode& node : nodes_)
            for (std::size_t i = 0; i < node.owned.size(); ++i) y[node.owned[i]] = node.own[i];
        return y;
    }

    Network& net_;
    const SimplicialComplex2& complex_;
    const Laplacian1& laplacian_;
    const SpanningTree& tree_;
    const HarmonicConfig& config_;
    const DistributedIterateObserver& observer_;
    double delta_;
    std::int64_t cap_;
    int period_;
    ConvergenceMonitor monitor_;
    std::vector<HarmonicNode> nodes_;
    std::int64_t stop_iteration_ = -1;
    double final_update_ = 0.0;
    double y_inf_ = 0.0;
    std::optional<std::string> failure_;
};

}  // namespace

DistributedHarmonic run_distributed_harmonic(Network& net, const Laplacian1& laplacian, const SpanningTree& tree,
                                             const HarmonicConfig& config, const DistributedIterateObserver& observer) {
    if (!config.delta) throw std::invalid_argument("distributed harmonic needs delta");
    if (laplacian.size() != net.topology().edge_count()) throw std::invalid_argument("Laplacian size mismatch");
    if (laplacian.size() == 0) {
        DistributedHarmonic out;
        out.result.y = Eigen::VectorXd(0);
        out.result.delta_used = *config.delta;
        return out;
    }
    return HarmonicRun(net, laplacian, tree, config, observer).run();
}

IntegralOutcome run_integral_function(Network& net, Index root, std::span<const Index> parent,
                                      std::span<const char> active, const Eigen::VectorXd& y) {
    const SimplicialComplex2& complex = net.topology();
    const Index n = complex.vertex_count();
    auto is_active = [&](Index v) { return active.empty() || active[at(v)] != 0; };
    if (!is_active(root)) throw std::invalid_argument("inactive root");

    IntegralOutcome out;
    out.f.assign(at(n), std::numeric_limits<double>::quiet_NaN());
    out.root_path.assign(at(n), {});
    out.heard.assign(at(n), {});
    out.f[at(root)] = 0.0;
    out.root_path[at(root)] = {root};
    net.broadcast(root, Phase::Integral, IntegralDown{root, 0.0, {root}});

    net.run([&](Index r, const Message& m) {
        const auto& down = expect<IntegralDown>(m, "integral function");
        if (!is_active(r)) return;
        out.heard[at(r)].push_back(HeardValue{down.sender, down.f_value, down.root_path});
        if (parent[at(r)] != down.sender || !out.root_path[at(r)].empty()) return;
        const double ye = y[*complex.edge_index(down.sender, r)];
        out.f[at(r)] = r > down.sender ? down.f_value + ye : down.f_value - ye;
        out.root_path[at(r)] = down.root_path;
        out.root_path[at(r)].push_back(r);
        net.broadcast(r, Phase::Integral, IntegralDown{r, out.f[at(r)], out.root_path[at(r)]});
    });

    for (Index v = 0; v < n; ++v)
        if (is_active(v) && out.root_path[at(v)].empty())
            throw ProtocolViolation("integral function did not reach node " + std::to_string(v));
    return out;
}

Index hop_length_from_paths(std::span<const Index> path_u, std::span<const Index> path_v) {
    std::size_t common = 0;
    while (common < path_u.size() && common < path_v.size() && path_u[common] == path_v[common]) ++common;
    return static_cast<Index>(path_u.size() - common + path_v.size() - common + 1);
}

PruneSelectOutcome run_prune_and_select(Network& net, const SpanningTree& tree,
                                        const std::vector<std::vector<CycleRecord>>& records, double label_tol) {
    const Index n = net.node_count();
    if (records.size() != at(n)) throw std::invalid_argument("one record list per node required");

    PruneSelectOutcome out;
    out.surviving.assign(at(n), 1);
    out.parent = tree.parent;
    out.forwarded.assign(at(n), {});
    std::vector<std::size_t> reports(at(n), 0);
    std::vector<std::vector<Index>> kept(at(n));
    auto terminal = [&](Index v) { return !records[at(v)].empty(); };

    auto settle_root = [&](Index v) {
        out.parent[at(v)] = -1;
        auto& k = kept[at(v)];
        if (terminal(v) || k.size() >= 2) {
            out.root = v;
            return;
        }
        out.surviving[at(v)] = 0;
        if (k.empty()) return;
        net.send(v, k.front(), Phase::Prune, RootHandoff{k.front()});
    };
    auto finish = [&](Index v) {
        std::sort(kept[at(v)].begin(), kept[at(v)].end());
        if (v == tree.root) {
            settle_root(v);
            return;
        }
        const bool removed = !terminal(v) && kept[at(v)].empty();
        if (removed) {
            out.surviving[at(v)] = 0;
            out.parent[at(v)] = -1;
        }
        net.send(v, tree.parent[at(v)], Phase::Prune, PruneNotice{v, removed});
    };

    for (Index v = 0; v < n; ++v)
        if (tree.children[at(v)].empty()) finish(v);
    net.run([&](Index r, const Message& m) {
        if (const auto* notice = std::get_if<PruneNotice>(&m.payload)) {
            if (!notice->removed) kept[at(r)].push_back(notice->leaf);
            if (++reports[at(r)] == tree.children[at(r)].size()) finish(r);
        } else {
            expect<RootHandoff>(m, "pruning");
            settle_root(r);
        }
    });

    if (!out.root) {
        for (Index v = 0; v < n; ++v)
            if (out.surviving[at(v)]) throw ProtocolViolation("pruning removed the root but left nodes behind");
        return out;
    }
    for (Index v = 0; v < n; ++v)
        if (out.surviving[at(v)] && kept[at(v)].empty() && !terminal(v))
            throw ProtocolViolation("non-terminal leaf " + std::to_string(v) + " survived pruning");

    std::vector<std::vector<CycleRecord>> held = records;
    std::vector<std::size_t> closed(at(n), 0);
    auto forward = [&](Index v) {
        auto reps = select_P(partition_homologous(std::move(held[at(v)]), label_tol));
        for (const auto& r : reps) out.forwarded[at(v)].push_back(r.nontree_edge);
        if (v == *out.root) {
            out.P = std::move(reps);
            return;
        }
        if (reps.empty()) throw ProtocolViolation("surviving node has nothing to report");
        for (std::size_t i = 0; i < reps.size(); ++i)
            net.send(v, out.parent[at(v)], Phase::Select, CycleReport{to_entry(reps[i]), i + 1 == reps.size()});
    };
    for (Index v = 0; v < n; ++v)
        if (out.surviving[at(v)] && kept[at(v)].empty()) forward(v);
    net.run([&](Index r, const Message& m) {
        const auto& report = expect<CycleReport>(m, "selection");
        held[at(r)].push_back(from_entry(report.entry));
        if (report.last && ++closed[at(r)] == kept[at(r)].size()) forward(r);
    });
    return out;
}

namespace {

struct LocalView {
    const IntegralOutcome* outcome;

    const HeardValue& from(Index v, Index w) const {
        for (const HeardValue& h : outcome->heard[at(v)])
            if (h.from == w) return h;
        throw ProtocolViolation("node " + std::to_string(v) + " never heard from neighbor " + std::to_string(w));
    }

    /// f(a) + y(e) - f(b) at endpoint v of e = (a, b).
    double integral(Index v, const EdgeVertices& e, double y_e) const {
        const Index w = e[0] == v ? e[1] : e[0];
        const double fv = outcome->f[at(v)];
        const double fw = from(v, w).f;
        return e[0] == v ? fv + y_e - fw : fw + y_e - fv;
    }
};

}  // namespace

DistributedResult run_full_pipeline(const SimplicialComplex2& complex, const PipelineConfig& config,
                                    const SimConfig& sim, const PipelineIterateObserver& observer) {
    Network net(complex, sim);
    const Index n = complex.vertex_count();
    DistributedResult res;
    auto finish = [&]() -> DistributedResult {
        res.cost = net.cost();
        res.scheduled_deliveries = net.scheduled_deliveries();
        res.delivered = net.delivered();
        res.transcript = net.take_transcript();
        return std::move(res);
    };

    Index root = 0;
    if (config.root) {
        root = *config.root;
        if (root < 0 || root >= n) throw std::out_of_range("root outside the vertex range");
    } else {
        std::vector<double> ids(at(n));
        for (Index v = 0; v < n; ++v) ids[at(v)] = static_cast<double>(v);
        root = static_cast<Index>(run_max_gossip(net, ids, Phase::RootElection).value);
    }
    res.tree = run_spanning_tree(net, root);
    if (complex.edge_count() == 0) return finish();

    const Laplacian1 laplacian = build_laplacian_algebraic(build_boundaries(complex));
    res.delta = config.harmonic.delta ? *config.harmonic.delta : run_delta_gossip(net, laplacian);
    int harmonic_index = 0;
    auto harmonic = [&]() {
        HarmonicConfig hc = config.harmonic;
        hc.delta = res.delta;
        hc.seed = harmonic_seed(config.harmonic.seed, harmonic_index);
        DistributedIterateObserver obs;
        if (observer) {
            const int index = harmonic_index;
            obs = [&observer, index](std::int64_t k, const Eigen::VectorXd& y) { observer(index, k, y); };
        }
        ++harmonic_index;
        DistributedHarmonic h = run_distributed_harmonic(net, laplacian, res.tree, hc, obs);
        res.iterations_per_harmonic.push_back(h.result.iterations);
        return h;
    };

    const int k = std::max(1, config.label_harmonics);
    std::vector<double> inf_norms;
    std::vector<IntegralOutcome> label_integrals;
    for (int j = 0; j < k; ++j) {
        DistributedHarmonic h = harmonic();
        inf_norms.push_back(h.y_inf_norm);
        label_integrals.push_back(run_integral_function(net, root, res.tree.parent, {}, h.result.y));
        res.label_harmonics.push_back(std::move(h.result.y));
    }

    // Each endpoint of a non-tree edge classifies its cycle from what it heard.
    std::vector<std::vector<CycleRecord>> records(at(n));
    res.cycle_basis_size = complex.edge_count() - n + 1;
    for (Index v = 0; v < n; ++v) {
        for (const Index e : complex.incident_edges(v)) {
            if (res.tree.contains_edge(e)) continue;
            const EdgeVertices& ev = complex.edge(e);
            const Index w = ev[0] == v ? ev[1] : ev[0];
            CycleRecord rec;
            rec.nontree_edge = e;
            rec.terminals = ev;
            const LocalView first{&label_integrals.front()};
            rec.hop_length = hop_length_from_paths(label_integrals.front().root_path[at(v)], first.from(v, w).root_path);
            for (int j = 0; j < k; ++j)
                rec.integrals.push_back(LocalView{&label_integrals[at(j)]}.integral(v, ev, res.label_harmonics[at(j)][e]));
            rec.label = make_label(rec.integrals);
            if (is_contractible(rec, inf_norms, config.contractible)) {
                if (v == edge_owner(ev)) ++res.contractible_count;
                continue;
            }
            records[at(v)].push_back(std::move(rec));
        }
    }

    PruneSelectOutcome ps = run_prune_and_select(net, res.tree, records, config.label_tol);
    res.pruned_root = ps.root;
    res.surviving_nodes = static_cast<Index>(std::count(ps.surviving.begin(), ps.surviving.end(), 1));
    std::vector<CycleRecord> P = std::move(ps.P);
    for (CycleRecord& r : P) r.chain = cycle_from_nontree_edge(complex, res.tree, r.nontree_edge);

    if (!config.reduce || P.empty()) {
        res.generators.P = std::move(P);
        return finish();
    }

    const Index m = static_cast<Index>(P.size());
    const Index new_root = *ps.root;
    std::vector<char> started(at(n), 0);
    started[at(new_root)] = 1;
    net.broadcast(new_root, Phase::ReductionStart, PhaseStart{m});
    net.run([&](Index r, const Message& msg) {
        const auto& start = expect<PhaseStart>(msg, "reduction start");
        if (started[at(r)]) return;
        started[at(r)] = 1;
        net.broadcast(r, Phase::ReductionStart, start);
    });

    // Integrals of each reduction harmonic over the cycles every terminal holds.
    std::vector<std::map<Index, std::vector<double>>> own_integrals(at(n));
    for (Index i = 0; i < m; ++i) {
        DistributedHarmonic h = harmonic();
        const IntegralOutcome io = run_integral_function(net, new_root, ps.parent, ps.surviving, h.result.y);
        const LocalView view{&io};
        for (Index v = 0; v < n; ++v)
            for (const CycleRecord& rec : records[at(v)])
                own_integrals[at(v)][rec.nontree_edge].push_back(
                    view.integral(v, rec.terminals, h.result.y[rec.nontree_edge]));
    }

    // Final convergecast: each surviving node resends the cycles it forwarded
    // during selection, now carrying their integral vectors.
    std::vector<std::map<Index, std::vector<double>>> known = own_integrals;
    std::vector<std::size_t> closed(at(n), 0);
    std::vector<std::size_t> kept_children(at(n), 0);
    for (Index v = 0; v < n; ++v)
        if (ps.surviving[at(v)] && ps.parent[at(v)] >= 0) ++kept_children[at(ps.parent[at(v)])];
    std::map<Index, std::vector<double>> at_root;
    auto send_up = [&](Index v) {
        auto entries = [&](Index edge) -> const std::vector<double>& {
            const auto it = known[at(v)].find(edge);
            if (it == known[at(v)].end()) throw ProtocolViolation("integrals missing for a forwarded cycle");
            return it->second;
        };
        const auto& fwd = ps.forwarded[at(v)];
        if (v == new_root) {
            for (const Index e : fwd) at_root[e] = entries(e);
            return;
        }
        for (std::size_t i = 0; i < fwd.size(); ++i) {
            CycleEntry entry{fwd[i], complex.edge(fwd[i]), 0, {}, entries(fwd[i])};
            net.send(v, ps.parent[at(v)], Phase::FinalConvergecast, CycleReport{std::move(entry), i + 1 == fwd.size()});
        }
    };
    for (Index v = 0; v < n; ++v)
        if (ps.surviving[at(v)] && kept_children[at(v)] == 0) send_up(v);
    net.run([&](Index r, const Message& msg) {
        const auto& report = expect<CycleReport>(msg, "final convergecast");
        known[at(r)][report.entry.edge] = report.entry.integrals;
        if (report.last && ++closed[at(r)] == kept_children[at(r)]) send_up(r);
    });

    Eigen::MatrixXd R(m, m);
    for (Index j = 0; j < m; ++j) {
        const auto it = at_root.find(P[at(j)].nontree_edge);
        if (it == at_root.end() || static_cast<Index>(it->second.size()) != m)
            throw ProtocolViolation("root is missing integrals for a selected cycle");
        for (Index i = 0; i < m; ++i) R(i, j) = it->second[at(i)];
    }
    res.generators = reduce_to_H(std::move(P), std::move(R), config.pivot_tol);
    return finish();
}

}  // namespace hodge::netsim
