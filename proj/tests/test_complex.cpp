#include <sstream>

#include <Eigen/Dense>
#include <doctest.h>

#include "hodge/complex.hpp"
#include "hodge/errors.hpp"
#include "hodge/sc_format.hpp"
#include "support/fixtures.hpp"

using namespace hodge;

namespace {

Eigen::MatrixXi dense(const Eigen::SparseMatrix<int, Eigen::ColMajor, Index>& m) { return Eigen::MatrixXi(m); }
Eigen::MatrixXd dense(const Laplacian1& l) { return Eigen::MatrixXd(l.matrix); }

}  // namespace

TEST_SUITE("complex") {

TEST_CASE("single edge: d1 is (-1, +1), L1 = [2]") {
    const auto k = fixtures::single_edge();
    const auto b = build_boundaries(k);
    CHECK(dense(b.d1) == (Eigen::MatrixXi(2, 1) << -1, 1).finished());
    CHECK(b.d2.cols() == 0);
    CHECK(Eigen::SparseMatrix<int, Eigen::ColMajor, Index>(b.d1 * b.d2).nonZeros() == 0);

    const auto l = build_laplacian_algebraic(b);
    CHECK(dense(l) == Eigen::MatrixXd::Constant(1, 1, 2.0));
    CHECK(same_entries(l, build_laplacian_combinatorial(k)));
    CHECK(l1_one_norm(l) == 2.0);

    const auto counts = nnz_degree_identity(k);
    CHECK(counts.laplacian_nnz == 1);
    CHECK(counts.degree_formula == 1);
}

TEST_CASE("hollow triangle: boundary columns and L1") {
    const auto k = fixtures::hollow_triangle();
    const auto b = build_boundaries(k);
    const Eigen::MatrixXi d1 = (Eigen::MatrixXi(3, 3) << -1, -1, 0,
                                                          1, 0, -1,
                                                          0, 1, 1).finished();
    CHECK(dense(b.d1) == d1);

    const Eigen::MatrixXd expected = (Eigen::MatrixXd(3, 3) << 2, 1, -1,
                                                                1, 2, 1,
                                                                -1, 1, 2).finished();
    const auto alg = build_laplacian_algebraic(b);
    const auto comb = build_laplacian_combinatorial(k);
    CHECK(dense(alg) == expected);
    CHECK(dense(comb) == expected);
    CHECK(same_entries(alg, comb));
    // (0,1) and (0,2) both leave vertex 0: similar orientation, +1.
    CHECK(comb.matrix.coeff(0, 1) == 1.0);
    // (0,1) enters vertex 1, (1,2) leaves it: dissimilar, -1.
    CHECK(comb.matrix.coeff(0, 2) == -1.0);
    CHECK(l1_one_norm(alg) == 4.0);

    const auto counts = nnz_degree_identity(k);
    CHECK(counts.laplacian_nnz == 9);
    CHECK(counts.degree_formula == 9);
    CHECK(counts.lower_adjacency_count == 9);
}

TEST_CASE("filled triangle: d2 = (+1, -1, +1), L1 = 3 I") {
    const auto k = fixtures::filled_triangle();
    const auto b = build_boundaries(k);
    CHECK(dense(b.d2) == (Eigen::MatrixXi(3, 1) << 1, -1, 1).finished());
    CHECK(dense(b.d1) * dense(b.d2) == Eigen::MatrixXi::Zero(3, 1));

    const auto l = build_laplacian_algebraic(b);
    CHECK(dense(l) == 3.0 * Eigen::MatrixXd::Identity(3, 3));
    CHECK(same_entries(l, build_laplacian_combinatorial(k)));
    CHECK(l1_one_norm(l) == 3.0);
    CHECK(k.upper_degrees()[0] == 1);

    // Upper-adjacent pairs are zero in L1 but still lower-adjacent.
    const auto counts = nnz_degree_identity(k);
    CHECK(counts.laplacian_nnz == 3);
    CHECK(counts.lower_adjacency_count == 9);
    CHECK(counts.degree_formula == 9);
}

TEST_CASE("construction rejects malformed complexes") {
    CHECK_THROWS_AS(SimplicialComplex2(3, {{0, 2}, {0, 1}}, {}), InvalidComplex);
    CHECK_THROWS_AS(SimplicialComplex2(3, {{0, 1}, {0, 1}}, {}), InvalidComplex);
    CHECK_THROWS_AS(SimplicialComplex2(3, {{1, 0}}, {}), InvalidComplex);
    CHECK_THROWS_AS(SimplicialComplex2(2, {{0, 2}}, {}), InvalidComplex);
    CHECK_THROWS_AS(SimplicialComplex2(3, {{0, 1}, {1, 2}}, {{0, 1, 2}}), ClosureViolation);
    CHECK_THROWS_AS(SimplicialComplex2(-1, {}, {}), InvalidComplex);
}

TEST_CASE("boundaries of a disconnected complex are refused") {
    const SimplicialComplex2 k(4, {{0, 1}, {2, 3}}, {});
    CHECK_FALSE(k.is_connected());
    CHECK_THROWS_AS(build_boundaries(k), Disconnected);
}

TEST_CASE("adjacency queries") {
    const auto k = fixtures::figure_eight();
    CHECK(k.edge_index(2, 0) == k.edge_index(0, 2));
    CHECK_FALSE(k.edge_index(0, 3).has_value());
    CHECK(k.degree(2) == 4);
    CHECK(std::vector<Index>(k.neighbors(2).begin(), k.neighbors(2).end()) == std::vector<Index>{0, 1, 3, 4});
    CHECK(fixtures::filled_triangle().has_triangle(2, 0, 1));
    CHECK_FALSE(fixtures::hollow_triangle().has_triangle(0, 1, 2));
}

TEST_CASE("random complexes: both Laplacians agree, d1 d2 = 0, L1 symmetric PSD") {
    SplitMix64 rng(20261016);
    int triangle_free = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const Index n = 2 + static_cast<Index>(rng.below(39));
        const double p = 0.02 + 0.3 * rng.uniform();
        const double fill = trial % 3 == 0 ? 0.0 : (trial % 3 == 1 ? 0.5 : 1.0);
        const auto k = fixtures::random_complex(rng, n, p, fill);
        CAPTURE(trial);

        const auto b = build_boundaries(k);
        const Eigen::SparseMatrix<int, Eigen::ColMajor, Index> product = b.d1 * b.d2;
        CHECK(Eigen::MatrixXi(product).isZero());

        const auto alg = build_laplacian_algebraic(b);
        const auto comb = build_laplacian_combinatorial(k);
        REQUIRE(same_entries(alg, comb));

        const Eigen::MatrixXd l = dense(comb);
        CHECK(l == l.transpose());
        for (int r = 0; r < 3; ++r) {
            Eigen::VectorXd x(l.rows());
            for (Index i = 0; i < x.size(); ++i) x[i] = rng.uniform() - 0.5;
            CHECK(x.dot(l * x) >= -1e-9 * x.squaredNorm() * l.cwiseAbs().maxCoeff());
        }

        const auto counts = nnz_degree_identity(k);
        CHECK(counts.lower_adjacency_count == counts.degree_formula);
        if (k.triangle_count() == 0) {
            ++triangle_free;
            CHECK(counts.laplacian_nnz == counts.degree_formula);
        }
        CHECK(counts.laplacian_nnz == comb.nnz());
    }
    CHECK(triangle_free >= 50);
}

TEST_CASE("row slices expose one row in column order") {
    const auto l = build_laplacian_combinatorial(fixtures::hollow_triangle());
    const auto row = l.row(1);
    CHECK(std::vector<Index>(row.columns.begin(), row.columns.end()) == std::vector<Index>{0, 1, 2});
    CHECK(std::vector<double>(row.values.begin(), row.values.end()) == std::vector<double>{1, 2, 1});
    CHECK(row_abs_sums(l) == std::vector<double>{4, 4, 4});
}

TEST_CASE("boundary_of applies d1") {
    const auto k = fixtures::hollow_triangle();
    const auto b = build_boundaries(k);
    CHECK(boundary_of(b, fixtures::loop_chain(k, {0, 1, 2})).isZero());
    SparseChain one(3);
    one.coeffRef(0) = 1.0;
    CHECK(boundary_of(b, one) == Eigen::Vector3d(-1, 1, 0));
}

}  // TEST_SUITE

TEST_SUITE("sc_format") {

TEST_CASE("round trip preserves the complex byte for byte") {
    const auto k = fixtures::annulus();
    std::ostringstream a;
    write_sc(a, k);
    std::istringstream in(a.str());
    const auto back = read_sc(in);
    CHECK(back.edges() == k.edges());
    CHECK(back.triangles() == k.triangles());
    std::ostringstream b;
    write_sc(b, back);
    CHECK(a.str() == b.str());
}

TEST_CASE("comments and blank lines are skipped") {
    std::istringstream in("# header\n\nv 3\n# edges\ne 0 1\ne 0 2\ne 1 2\nt 0 1 2\n");
    const auto k = read_sc(in);
    CHECK(k.edge_count() == 3);
    CHECK(k.triangle_count() == 1);
}

TEST_CASE("malformed files are rejected") {
    const auto parse = [](const char* text) {
        std::istringstream in(text);
        return read_sc(in);
    };
    CHECK_THROWS_AS(parse("e 0 1\n"), ParseError);
    CHECK_THROWS_AS(parse("v 3\ne 0 2\ne 0 1\n"), ParseError);
    CHECK_THROWS_AS(parse("v 3\ne 0 1\ne 0 1\n"), ParseError);
    CHECK_THROWS_AS(parse("v 3\ne 0 1 2\n"), ParseError);
    CHECK_THROWS_AS(parse("v 3\ne 0 x\n"), ParseError);
    CHECK_THROWS_AS(parse("v 3\ne 0 1\ne 0 2\nt 0 1 2\n"), ClosureViolation);
    CHECK_THROWS_AS(parse("v 3\ne 0 1\nt 0 1 2\ne 1 2\n"), ParseError);
    CHECK_THROWS_AS(parse("v 3\nq 1\n"), ParseError);
}

}  // TEST_SUITE
