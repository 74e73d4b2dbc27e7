#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <doctest.h>

#include "hodge/complex.hpp"
#include "hodge/cyclebasis.hpp"
#include "hodge/errors.hpp"
#include "hodge/geomgraph.hpp"
#include "hodge/harmonic.hpp"
#include "hodge/oracle.hpp"
#include "support/fixtures.hpp"

using namespace hodge;
using fixtures::loop_chain;

namespace {

Eigen::VectorXd dense(const SparseChain& c) { return Eigen::VectorXd(c); }

std::vector<SparseChain> chains_of(const std::vector<CycleRecord>& records) {
    std::vector<SparseChain> out;
    for (const auto& r : records) out.push_back(r.chain);
    return out;
}

Eigen::VectorXd harmonic(const SimplicialComplex2& k, std::uint64_t seed, double epsilon = 1e-6) {
    HarmonicConfig config;
    config.seed = seed;
    config.epsilon = epsilon;
    return iterate_harmonic(build_laplacian_combinatorial(k), config).y;
}

CycleRecord record_with_label(Index edge, Index hop, double label) {
    CycleRecord r;
    r.nontree_edge = edge;
    r.hop_length = hop;
    r.integrals = {label};
    r.label = {label};
    return r;
}

}  // namespace

TEST_SUITE("cyclebasis") {

TEST_CASE("BFS trees") {
    SUBCASE("path rooted at its end") {
        const auto t = spanning_tree_bfs(fixtures::path3(), 2);
        CHECK(t.parent == std::vector<Index>{1, 2, -1});
        CHECK(t.hop == std::vector<Index>{2, 1, 0});
    }
    SUBCASE("hollow triangle rooted at 2") {
        const auto k = fixtures::hollow_triangle();
        const auto t = spanning_tree_bfs(k, 2);
        CHECK(t.tree_edges == std::vector<Index>{k.edge_index(0, 2).value(), k.edge_index(1, 2).value()});
        CHECK_FALSE(t.contains_edge(k.edge_index(0, 1).value()));
    }
    SUBCASE("star rooted at the center") {
        const auto t = spanning_tree_bfs(fixtures::star4(), 0);
        for (Index v = 1; v <= 4; ++v) {
            CHECK(t.parent[v] == 0);
            CHECK(t.hop[v] == 1);
        }
        CHECK(t.children[0] == std::vector<Index>{1, 2, 3, 4});
    }
    SUBCASE("ties go to the smallest parent id") {
        // 3 is two hops from 0 through either 1 or 2.
        const auto k = fixtures::make(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
        CHECK(spanning_tree_bfs(k, 0).parent[3] == 1);
    }
    SUBCASE("disconnected graphs are refused") {
        const SimplicialComplex2 k(3, {{0, 1}}, {});
        CHECK_THROWS_AS(spanning_tree_bfs(k, 0), Disconnected);
    }
}

TEST_CASE("BFS trees on random complexes satisfy the tree invariants") {
    SplitMix64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const auto k = fixtures::random_complex(rng, 2 + static_cast<Index>(rng.below(40)), 0.1);
        const Index root = static_cast<Index>(rng.below(static_cast<std::uint64_t>(k.vertex_count())));
        const auto t = spanning_tree_bfs(k, root);
        CHECK(static_cast<Index>(t.tree_edges.size()) == k.vertex_count() - 1);
        CHECK(t.hop[root] == 0);
        for (Index v = 0; v < k.vertex_count(); ++v)
            if (v != root) CHECK(t.hop[v] == t.hop[t.parent[v]] + 1);
        const auto rebuilt = tree_from_parents(k, root, t.parent);
        CHECK(rebuilt.tree_edges == t.tree_edges);
    }
}

TEST_CASE("tree_from_parents rejects non-neighbors and cycles") {
    const auto k = fixtures::path3();
    CHECK_THROWS(tree_from_parents(k, 2, {2, 2, -1}));
    CHECK_THROWS(tree_from_parents(fixtures::hollow_triangle(), 2, {1, 0, -1}));
}

TEST_CASE("hollow triangle: the tree cycle, f, and its integral") {
    const auto k = fixtures::hollow_triangle();
    const auto t = spanning_tree_bfs(k, 2);
    const Index e01 = k.edge_index(0, 1).value();
    const auto c = cycle_from_nontree_edge(k, t, e01);
    CHECK(dense(c) == Eigen::Vector3d(1, -1, 1));
    CHECK(cycle_hop_length(k, t, e01) == 3);
    CHECK_THROWS_AS(cycle_from_nontree_edge(k, t, k.edge_index(0, 2).value()), EdgeInTree);

    const Eigen::Vector3d y = Eigen::Vector3d(1, -1, 1) / std::sqrt(3.0);
    const auto f = integral_function(k, t, y);
    CHECK(f[2] == 0.0);
    CHECK(f[0] == doctest::Approx(1 / std::sqrt(3.0)));
    CHECK(f[1] == doctest::Approx(-1 / std::sqrt(3.0)));
    CHECK(cycle_integral(f, y[e01], k.edge(e01)) == doctest::Approx(std::sqrt(3.0)));
    CHECK(integral_function(k, t, Eigen::Vector3d::Zero()) == std::vector<double>{0, 0, 0});
}

TEST_CASE("integral function sign rule on a single edge") {
    const auto k = fixtures::single_edge();
    const Eigen::VectorXd y = Eigen::VectorXd::Constant(1, 0.5);
    // Root 0: the step 0 -> 1 follows the orientation.
    CHECK(integral_function(k, spanning_tree_bfs(k, 0), y)[1] == 0.5);
    // Root 1: the step 1 -> 0 opposes it.
    CHECK(integral_function(k, spanning_tree_bfs(k, 1), y)[0] == -0.5);
}

TEST_CASE("random complexes: tree cycles, telescoping f, local integrals") {
    SplitMix64 rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const auto k = fixtures::random_complex(rng, 3 + static_cast<Index>(rng.below(30)), 0.2, 0.5);
        const auto b = build_boundaries(k);
        const Index root = static_cast<Index>(rng.below(static_cast<std::uint64_t>(k.vertex_count())));
        const auto t = spanning_tree_bfs(k, root);
        Eigen::VectorXd y(k.edge_count());
        for (Index i = 0; i < y.size(); ++i) y[i] = rng.uniform() - 0.5;
        const auto f = integral_function(k, t, y);
        CHECK(f[root] == 0.0);

        Index basis = 0;
        for (Index e = 0; e < k.edge_count(); ++e) {
            if (t.contains_edge(e)) continue;
            ++basis;
            const auto c = cycle_from_nontree_edge(k, t, e);
            CHECK(boundary_of(b, c).isZero());
            CHECK(c.nonZeros() == cycle_hop_length(k, t, e));
            CHECK(c.coeff(e) == 1.0);
            for (SparseChain::InnerIterator it(c); it; ++it) {
                CHECK(std::abs(it.value()) == 1.0);
                if (it.index() != e) CHECK(t.contains_edge(it.index()));
            }
            CHECK(cycle_integral(f, y[e], k.edge(e)) == doctest::Approx(dense(c).dot(y)).epsilon(1e-9));
        }
        CHECK(basis == k.edge_count() - k.vertex_count() + 1);

        // f(v) - f(parent) is the signed parent edge value.
        for (Index v = 0; v < k.vertex_count(); ++v) {
            if (v == root) continue;
            const Index p = t.parent[v];
            const double step = y[t.parent_edge[v]] * (p < v ? 1.0 : -1.0);
            CHECK(f[v] - f[p] == doctest::Approx(step).epsilon(1e-12));
        }
    }
}

TEST_CASE("labels") {
    CHECK(make_label(std::vector<double>{-0.3}) == std::vector<double>{0.3});
    CHECK(make_label(std::vector<double>{0.1, -0.5, 0.2}) == std::vector<double>{-0.1, 0.5, -0.2});
    CHECK(make_label(std::vector<double>{0.1, 0.5, -0.2}) == std::vector<double>{0.1, 0.5, -0.2});
    CHECK(labels_match(std::vector<double>{1.0}, std::vector<double>{1.0 + 5e-5}, 1e-4));
    CHECK_FALSE(labels_match(std::vector<double>{1.0}, std::vector<double>{1.0 + 2e-4}, 1e-4));
}

TEST_CASE("classification of the two triangles") {
    for (const bool filled : {true, false}) {
        const auto k = filled ? fixtures::filled_triangle() : fixtures::hollow_triangle();
        const auto t = spanning_tree_bfs(k, 2);
        const std::vector<Eigen::VectorXd> ys{harmonic(k, 1)};
        const auto records = build_cycle_records(k, t, ys);
        REQUIRE(records.size() == 1);
        const std::vector<double> norms{ys[0].cwiseAbs().maxCoeff()};
        const auto cls = classify_cycles(records, norms);
        CHECK(cls.contractible.size() == (filled ? 1u : 0u));
        CHECK(cls.noncontractible.size() == (filled ? 0u : 1u));
        if (!filled) CHECK(records[0].label[0] > 0.1);
    }
}

TEST_CASE("annulus: every non-contractible tree cycle falls in one cluster") {
    const auto k = fixtures::annulus();
    const auto b = build_boundaries(k);
    const auto t = spanning_tree_bfs(k, 7);
    const std::vector<Eigen::VectorXd> ys{harmonic(k, 3)};
    const auto cls = classify_cycles(build_cycle_records(k, t, ys), std::vector<double>{ys[0].cwiseAbs().maxCoeff()});
    REQUIRE(cls.noncontractible.size() >= 2);
    for (const auto& r : cls.noncontractible) CHECK_FALSE(oracle::is_boundary(r.chain, b));
    for (const auto& r : cls.contractible) CHECK(oracle::is_boundary(r.chain, b));
    for (const auto& r : cls.noncontractible)
        CHECK(oracle::are_homologous(r.chain, cls.noncontractible.front().chain, b));
    const auto clusters = partition_homologous(cls.noncontractible, 1e-4);
    CHECK(clusters.size() == 1);
    CHECK(select_P(clusters).size() == 1);
}

TEST_CASE("figure-eight: two clusters, both loops kept") {
    const auto k = fixtures::figure_eight();
    PipelineConfig config;
    config.harmonic.seed = 5;
    const auto r = run_centralized(k, config);
    CHECK(r.generators.P.size() == 2);
    CHECK(r.generators.H.size() == 2);
    CHECK(r.generators.R.rows() == 2);
    CHECK(r.generators.R.cols() == 2);
    CHECK(std::abs(r.generators.R.determinant()) > 1e-6);
    const auto b = build_boundaries(k);
    CHECK(oracle::verify_generating_set(chains_of(r.generators.H), b));
    CHECK_FALSE(oracle::are_homologous(r.generators.P[0].chain, r.generators.P[1].chain, b));
}

TEST_CASE("clustering and selection rules") {
    SUBCASE("labels further apart than the tolerance split") {
        const auto clusters = partition_homologous({record_with_label(0, 3, 1.0), record_with_label(1, 3, 1.01)}, 1e-4);
        CHECK(clusters.size() == 2);
        CHECK(clusters[0][0].label[0] == 1.0);
    }
    SUBCASE("the shortest member represents its cluster") {
        const std::vector<std::vector<CycleRecord>> clusters{
            {record_with_label(4, 8, 1.0), record_with_label(2, 4, 1.0), record_with_label(3, 6, 1.0)}};
        const auto p = select_P(clusters);
        REQUIRE(p.size() == 1);
        CHECK(p[0].hop_length == 4);
    }
    SUBCASE("equal lengths go to the smaller edge id") {
        const auto p = select_P({{record_with_label(9, 5, 1.0), record_with_label(3, 5, 1.0)}});
        CHECK(p[0].nontree_edge == 3);
    }
    SUBCASE("representatives ascend by hop length") {
        const auto p = select_P({{record_with_label(0, 7, 1.0)}, {record_with_label(1, 4, 2.0)}});
        CHECK(p[0].hop_length == 4);
        CHECK(p[1].hop_length == 7);
    }
    SUBCASE("no clusters, no representatives") { CHECK(select_P({}).empty()); }
    SUBCASE("members are ordered by length within a cluster") {
        const auto clusters = partition_homologous(
            {record_with_label(5, 9, 2.0), record_with_label(1, 4, 2.0), record_with_label(2, 4, 2.0 + 1e-9)}, 1e-4);
        REQUIRE(clusters.size() == 1);
        CHECK(clusters[0][0].nontree_edge == 1);
        CHECK(clusters[0][1].nontree_edge == 2);
        CHECK(clusters[0][2].nontree_edge == 5);
    }
}

TEST_CASE("selection does not depend on the order inside clusters") {
    SplitMix64 rng(13);
    std::vector<std::vector<CycleRecord>> clusters;
    for (int c = 0; c < 5; ++c) {
        std::vector<CycleRecord> members;
        for (int m = 0; m < 6; ++m)
            members.push_back(record_with_label(10 * c + m, 3 + static_cast<Index>(rng.below(4)), 1.0 + c));
        clusters.push_back(members);
    }
    const auto reference = select_P(clusters);
    for (int round = 0; round < 20; ++round) {
        auto shuffled = clusters;
        for (auto& members : shuffled)
            for (std::size_t i = members.size(); i > 1; --i) std::swap(members[i - 1], members[rng.below(i)]);
        const auto p = select_P(shuffled);
        REQUIRE(p.size() == reference.size());
        for (std::size_t i = 0; i < p.size(); ++i) CHECK(p[i].nontree_edge == reference[i].nontree_edge);
    }
}

TEST_CASE("reduction keeps b1 of three pairwise non-homologous cycles") {
    // Around hole 1, around hole 2, and around both: the third is the sum.
    const auto k = fixtures::two_hole_grid();
    const auto b = build_boundaries(k);
    std::vector<CycleRecord> p(3);
    p[0].chain = loop_chain(k, {0, 1, 5, 4});
    p[1].chain = loop_chain(k, {2, 3, 7, 6});
    p[2].chain = loop_chain(k, {0, 1, 2, 3, 7, 11, 10, 9, 8, 4});
    for (int j = 0; j < 3; ++j) {
        p[j].nontree_edge = j;
        p[j].hop_length = static_cast<Index>(p[j].chain.nonZeros());
    }
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) CHECK_FALSE(oracle::are_homologous(p[i].chain, p[j].chain, b));

    // At epsilon 1e-6 this small complex stops after ~130 steps with a curl
    // residue near 5e-8, above the 1e-8 pivot threshold; converge further.
    Eigen::MatrixXd r(3, 3);
    for (int i = 0; i < 3; ++i) {
        const Eigen::VectorXd y = harmonic(k, harmonic_seed(0, i), 1e-12);
        for (int j = 0; j < 3; ++j) r(i, j) = dense(p[j].chain).dot(y);
    }
    const auto g = reduce_to_H(p, r, 1e-8);
    CHECK(g.H.size() == 2);
    CHECK(g.kept == std::vector<Index>{0, 1});
    CHECK(oracle::verify_generating_set(chains_of(g.H), b));
}

TEST_CASE("reduction edge cases") {
    CHECK(reduce_to_H({}, Eigen::MatrixXd(0, 0), 1e-8).H.empty());
    std::vector<CycleRecord> p{record_with_label(0, 3, 1.0), record_with_label(1, 3, 2.0)};
    Eigen::MatrixXd blind(2, 2);
    blind << 1.0, 0.0,
             0.5, 0.0;
    CHECK_THROWS_AS(reduce_to_H(p, blind, 1e-8), RankDeficientHarmonics);
}

TEST_CASE("converged harmonics integrate to about zero on boundaries") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto k = geom::generate({80, 7.0, 40 + seed});
        const auto b = build_boundaries(k);
        const Eigen::VectorXd y = harmonic(k, seed);
        SplitMix64 rng(seed);
        for (int r = 0; r < 10; ++r) {
            Eigen::VectorXd x(k.triangle_count());
            for (Index i = 0; i < x.size(); ++i) x[i] = static_cast<double>(rng.below(5)) - 2.0;
            const Eigen::VectorXd bx = b.d2.cast<double>() * x;
            CHECK(std::abs(y.dot(bx)) <= 1e-4 * bx.norm() * y.norm());
        }
    }
}

TEST_CASE("centralized pipeline on the small complexes") {
    SUBCASE("hollow triangle") {
        const auto k = fixtures::hollow_triangle();
        const auto r = run_centralized(k, {});
        REQUIRE(r.generators.H.size() == 1);
        CHECK(r.tree.root == 2);
        CHECK(dense(r.generators.H[0].chain).cwiseAbs() == Eigen::Vector3d(1, 1, 1));
        CHECK(r.iterations_per_harmonic.size() == 2);
        CHECK(r.delta == 0.25);
    }
    SUBCASE("filled triangle") {
        const auto r = run_centralized(fixtures::filled_triangle(), {});
        CHECK(r.generators.H.empty());
        CHECK(r.contractible_count == 1);
        CHECK(r.iterations_per_harmonic.size() == 1);
    }
    SUBCASE("annulus and grid") {
        for (const auto& k : {fixtures::annulus(), fixtures::two_hole_grid(), fixtures::two_triangles_sharing_edge()}) {
            const auto r = run_centralized(k, {});
            CHECK(oracle::verify_generating_set(chains_of(r.generators.H), build_boundaries(k)));
        }
    }
    SUBCASE("several labelling harmonics") {
        PipelineConfig config;
        config.label_harmonics = 3;
        const auto k = fixtures::two_hole_grid();
        const auto r = run_centralized(k, config);
        CHECK(r.label_harmonics.size() == 3);
        CHECK(r.generators.P.front().label.size() == 3);
        CHECK(oracle::verify_generating_set(chains_of(r.generators.H), build_boundaries(k)));
    }
}

TEST_CASE("geometric complexes: every decision agrees with the exact oracle") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        const auto k = geom::generate({static_cast<Index>(40 + 5 * seed), 6.0, 7000 + seed});
        const oracle::HomologyOracle o(build_boundaries(k));
        PipelineConfig config;
        config.harmonic.seed = seed;
        const auto r = run_centralized(k, config);
        CAPTURE(seed);

        const auto records = build_cycle_records(k, r.tree, r.label_harmonics);
        std::vector<double> norms;
        for (const auto& y : r.label_harmonics) norms.push_back(y.cwiseAbs().maxCoeff());
        const auto cls = classify_cycles(records, norms);
        for (const auto& c : cls.contractible) CHECK(o.is_boundary(c.chain));
        for (const auto& c : cls.noncontractible) CHECK_FALSE(o.is_boundary(c.chain));
        const auto clusters = partition_homologous(cls.noncontractible, config.label_tol);
        for (std::size_t a = 0; a < clusters.size(); ++a) {
            for (const auto& m : clusters[a]) CHECK(o.are_homologous(m.chain, clusters[a].front().chain));
            for (std::size_t c = a + 1; c < clusters.size(); ++c)
                CHECK_FALSE(o.are_homologous(clusters[a].front().chain, clusters[c].front().chain));
        }
        CHECK(static_cast<Index>(r.generators.H.size()) == o.betti1());
        CHECK(o.verify_generating_set(chains_of(r.generators.H)));
    }
}

}  // TEST_SUITE
