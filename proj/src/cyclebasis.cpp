#include "hodge/cyclebasis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "hodge/errors.hpp"
#include "hodge/prng.hpp"

namespace hodge {

namespace {

std::size_t at(Index i) { return static_cast<std::size_t>(i); }

SpanningTree finish_tree(const SimplicialComplex2& complex, Index root, std::vector<Index> parent) {
    const Index n = complex.vertex_count();
    SpanningTree t;
    t.root = root;
    t.parent = std::move(parent);
    t.parent_edge.assign(at(n), -1);
    t.hop.assign(at(n), -1);
    t.children.assign(at(n), {});
    t.is_tree_edge.assign(at(complex.edge_count()), 0);

    for (Index v = 0; v < n; ++v) {
        const Index p = t.parent[at(v)];
        if (v == root) {
            if (p != -1) throw Error("root must not have a parent");
            continue;
        }
        if (p < 0 || p >= n) throw Disconnected("vertex " + std::to_string(v) + " has no parent");
        const auto e = complex.edge_index(v, p);
        if (!e) throw Error("parent of " + std::to_string(v) + " is not a neighbor");
        t.parent_edge[at(v)] = *e;
        t.is_tree_edge[at(*e)] = 1;
        t.children[at(p)].push_back(v);
        t.tree_edges.push_back(*e);
    }
    std::sort(t.tree_edges.begin(), t.tree_edges.end());

    // Depths by walking down from the root; anything unreached is on a parent cycle.
    std::queue<Index> frontier;
    frontier.push(root);
    t.hop[at(root)] = 0;
    Index reached = 1;
    while (!frontier.empty()) {
        const Index v = frontier.front();
        frontier.pop();
        for (Index c : t.children[at(v)]) {
            t.hop[at(c)] = t.hop[at(v)] + 1;
            ++reached;
            frontier.push(c);
        }
    }
    if (reached != n) throw Error("parent map does not reach the root from every vertex");
    return t;
}

// Sign of edge parent(x)-x when walked from the parent down to x.
double downward_sign(const SpanningTree& tree, Index x) { return tree.parent[at(x)] < x ? 1.0 : -1.0; }

}  // namespace

SpanningTree spanning_tree_bfs(const SimplicialComplex2& complex, Index root) {
    const Index n = complex.vertex_count();
    if (root < 0 || root >= n) throw Error("root " + std::to_string(root) + " out of range");

    std::vector<Index> dist(at(n), -1);
    std::queue<Index> frontier;
    dist[at(root)] = 0;
    frontier.push(root);
    while (!frontier.empty()) {
        const Index v = frontier.front();
        frontier.pop();
        for (Index w : complex.neighbors(v)) {
            if (dist[at(w)] < 0) {
                dist[at(w)] = dist[at(v)] + 1;
                frontier.push(w);
            }
        }
    }
    std::vector<Index> parent(at(n), -1);
    for (Index v = 0; v < n; ++v) {
        if (dist[at(v)] < 0) throw Disconnected("vertex " + std::to_string(v) + " unreachable from root");
        if (v == root) continue;
        for (Index w : complex.neighbors(v)) {  // ascending, so the first hit is the smallest id
            if (dist[at(w)] == dist[at(v)] - 1) {
                parent[at(v)] = w;
                break;
            }
        }
    }
    return finish_tree(complex, root, std::move(parent));
}

SpanningTree tree_from_parents(const SimplicialComplex2& complex, Index root, std::vector<Index> parent) {
    if (static_cast<Index>(parent.size()) != complex.vertex_count()) throw Error("parent map has wrong size");
    return finish_tree(complex, root, std::move(parent));
}

SparseChain cycle_from_nontree_edge(const SimplicialComplex2& complex, const SpanningTree& tree, Index e) {
    if (tree.contains_edge(e)) throw EdgeInTree("edge " + std::to_string(e) + " is a tree edge");
    SparseChain chain(complex.edge_count());

    Index u = complex.edge(e)[0];
    Index v = complex.edge(e)[1];
    std::vector<std::pair<Index, double>> entries{{e, 1.0}};
    while (u != v) {
        if (tree.hop[at(u)] >= tree.hop[at(v)]) {
            entries.emplace_back(tree.parent_edge[at(u)], downward_sign(tree, u));
            u = tree.parent[at(u)];
        } else {
            entries.emplace_back(tree.parent_edge[at(v)], -downward_sign(tree, v));
            v = tree.parent[at(v)];
        }
    }
    std::sort(entries.begin(), entries.end());
    chain.reserve(static_cast<Index>(entries.size()));
    for (const auto& [idx, val] : entries) chain.insertBack(idx) = val;
    return chain;
}

Index cycle_hop_length(const SimplicialComplex2& complex, const SpanningTree& tree, Index e) {
    Index u = complex.edge(e)[0];
    Index v = complex.edge(e)[1];
    Index length = 1;
    while (u != v) {
        if (tree.hop[at(u)] >= tree.hop[at(v)])
            u = tree.parent[at(u)];
        else
            v = tree.parent[at(v)];
        ++length;
    }
    return length;
}

std::vector<double> integral_function(const SimplicialComplex2& complex, const SpanningTree& tree,
                                      const Eigen::VectorXd& y) {
    std::vector<double> f(at(complex.vertex_count()), 0.0);
    std::queue<Index> frontier;
    frontier.push(tree.root);
    while (!frontier.empty()) {
        const Index p = frontier.front();
        frontier.pop();
        for (Index c : tree.children[at(p)]) {
            const double ye = y[tree.parent_edge[at(c)]];
            const double temp = c > p ? ye : -ye;
            f[at(c)] = f[at(p)] + temp;
            frontier.push(c);
        }
    }
    return f;
}

std::vector<double> make_label(std::span<const double> integrals) {
    std::vector<double> label(integrals.begin(), integrals.end());
    if (label.size() == 1) {
        label[0] = std::abs(label[0]);
        return label;
    }
    const auto largest = std::max_element(label.begin(), label.end(),
                                          [](double a, double b) { return std::abs(a) < std::abs(b); });
    if (largest != label.end() && *largest < 0.0)
        for (double& x : label) x = -x;
    return label;
}

std::vector<CycleRecord> build_cycle_records(const SimplicialComplex2& complex, const SpanningTree& tree,
                                             std::span<const Eigen::VectorXd> harmonics) {
    std::vector<std::vector<double>> f;
    f.reserve(harmonics.size());
    for (const auto& y : harmonics) f.push_back(integral_function(complex, tree, y));

    std::vector<CycleRecord> out;
    for (Index e = 0; e < complex.edge_count(); ++e) {
        if (tree.contains_edge(e)) continue;
        CycleRecord r;
        r.nontree_edge = e;
        r.terminals = complex.edge(e);
        r.chain = cycle_from_nontree_edge(complex, tree, e);
        r.hop_length = static_cast<Index>(r.chain.nonZeros());
        for (std::size_t j = 0; j < harmonics.size(); ++j)
            r.integrals.push_back(cycle_integral(f[j], harmonics[j][e], r.terminals));
        r.label = make_label(r.integrals);
        out.push_back(std::move(r));
    }
    return out;
}

bool is_contractible(const CycleRecord& record, std::span<const double> harmonic_inf_norms,
                     const ContractibilityTolerance& tol) {
    for (std::size_t j = 0; j < record.integrals.size(); ++j) {
        const double bound = tol.absolute + tol.relative * harmonic_inf_norms[j] * record.hop_length;
        if (!(std::abs(record.integrals[j]) < bound)) return false;
    }
    return true;
}

Classification classify_cycles(std::vector<CycleRecord> cycles, std::span<const double> harmonic_inf_norms,
                               const ContractibilityTolerance& tol) {
    Classification out;
    for (auto& c : cycles) {
        if (is_contractible(c, harmonic_inf_norms, tol))
            out.contractible.push_back(std::move(c));
        else
            out.noncontractible.push_back(std::move(c));
    }
    return out;
}

bool labels_match(std::span<const double> a, std::span<const double> b, double tol) {
    if (a.size() != b.size()) return false;
    double scale = 0.0;
    for (double x : a) scale = std::max(scale, std::abs(x));
    for (double x : b) scale = std::max(scale, std::abs(x));
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > tol * scale) return false;
    return true;
}

std::vector<std::vector<CycleRecord>> partition_homologous(std::vector<CycleRecord> noncontractible, double tol) {
    std::sort(noncontractible.begin(), noncontractible.end(), [](const CycleRecord& a, const CycleRecord& b) {
        if (a.label != b.label) return a.label < b.label;
        return shorter_cycle(a, b);
    });
    std::vector<std::vector<CycleRecord>> clusters;
    for (auto& r : noncontractible) {
        auto home = std::find_if(clusters.begin(), clusters.end(),
                                 [&](const auto& c) { return labels_match(c.front().label, r.label, tol); });
        if (home == clusters.end())
            clusters.push_back({std::move(r)});
        else
            home->push_back(std::move(r));
    }
    for (auto& c : clusters) std::sort(c.begin(), c.end(), shorter_cycle);
    return clusters;
}

std::vector<CycleRecord> select_P(const std::vector<std::vector<CycleRecord>>& clusters) {
    std::vector<CycleRecord> P;
    for (const auto& c : clusters) {
        if (c.empty()) continue;
        P.push_back(*std::min_element(c.begin(), c.end(), shorter_cycle));
    }
    std::sort(P.begin(), P.end(), shorter_cycle);
    return P;
}

Eigen::MatrixXd integrals_matrix(const SimplicialComplex2& complex, const SpanningTree& tree,
                                 std::span<const CycleRecord> P, std::span<const Eigen::VectorXd> harmonics) {
    Eigen::MatrixXd R(static_cast<Eigen::Index>(harmonics.size()), static_cast<Eigen::Index>(P.size()));
    for (std::size_t i = 0; i < harmonics.size(); ++i) {
        const auto f = integral_function(complex, tree, harmonics[i]);
        for (std::size_t j = 0; j < P.size(); ++j)
            R(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                cycle_integral(f, harmonics[i][P[j].nontree_edge], P[j].terminals);
    }
    return R;
}

GeneratorSet reduce_to_H(std::vector<CycleRecord> P, Eigen::MatrixXd R, double pivot_tol) {
    GeneratorSet g;
    g.P = std::move(P);
    g.R = std::move(R);
    if (g.P.empty()) return g;
    if (g.R.cols() != static_cast<Eigen::Index>(g.P.size()) || g.R.rows() == 0)
        throw RankDeficientHarmonics("integral matrix does not match P");

    const double threshold = pivot_tol * g.R.colwise().norm().maxCoeff();
    for (Eigen::Index j = 0; j < g.R.cols(); ++j)
        if (!(g.R.col(j).norm() > threshold))
            throw RankDeficientHarmonics("harmonics integrate to zero on non-contractible cycle " +
                                         std::to_string(g.P[static_cast<std::size_t>(j)].nontree_edge));

    std::vector<Eigen::VectorXd> basis;
    for (Eigen::Index j = 0; j < g.R.cols(); ++j) {
        Eigen::VectorXd v = g.R.col(j);
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : basis) v -= q.dot(v) * q;
        const double residual = v.norm();
        if (residual > threshold) {
            basis.push_back(v / residual);
            g.kept.push_back(static_cast<Index>(j));
            g.H.push_back(g.P[static_cast<std::size_t>(j)]);
        }
    }
    return g;
}

std::uint64_t harmonic_seed(std::uint64_t base, int index) {
    return derive_seed(base, static_cast<std::uint64_t>(index));
}

PipelineResult run_centralized(const SimplicialComplex2& complex, const PipelineConfig& config) {
    const BoundaryOperators boundaries = build_boundaries(complex);
    const Laplacian1 laplacian = build_laplacian_algebraic(boundaries);

    PipelineResult out;
    out.tree = spanning_tree_bfs(complex, config.root.value_or(complex.vertex_count() - 1));
    if (complex.edge_count() == 0) return out;

    out.delta = config.harmonic.delta.value_or(compute_delta(laplacian));
    auto harmonic = [&](int index) {
        HarmonicConfig hc = config.harmonic;
        hc.delta = out.delta;
        hc.seed = harmonic_seed(config.harmonic.seed, index);
        HarmonicResult r = iterate_harmonic(laplacian, hc);
        out.iterations_per_harmonic.push_back(r.iterations);
        return std::move(r.y);
    };

    const int k = std::max(1, config.label_harmonics);
    std::vector<double> inf_norms;
    for (int j = 0; j < k; ++j) {
        out.label_harmonics.push_back(harmonic(j));
        inf_norms.push_back(out.label_harmonics.back().lpNorm<Eigen::Infinity>());
    }

    auto records = build_cycle_records(complex, out.tree, out.label_harmonics);
    out.cycle_basis_size = static_cast<Index>(records.size());
    auto classes = classify_cycles(std::move(records), inf_norms, config.contractible);
    out.contractible_count = static_cast<Index>(classes.contractible.size());
    auto P = select_P(partition_homologous(std::move(classes.noncontractible), config.label_tol));

    if (!config.reduce || P.empty()) {
        out.generators.P = std::move(P);
        return out;
    }
    std::vector<Eigen::VectorXd> reduction;
    for (std::size_t i = 0; i < P.size(); ++i) reduction.push_back(harmonic(k + static_cast<int>(i)));
    Eigen::MatrixXd R = integrals_matrix(complex, out.tree, P, reduction);
    out.generators = reduce_to_H(std::move(P), std::move(R), config.pivot_tol);
    return out;
}

}  // namespace hodge
