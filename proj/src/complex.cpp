#include "hodge/complex.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "hodge/errors.hpp"

namespace hodge {

namespace {

std::string to_string(const EdgeVertices& e) {
    return "(" + std::to_string(e[0]) + "," + std::to_string(e[1]) + ")";
}

std::string to_string(const TriangleVertices& t) {
    return "(" + std::to_string(t[0]) + "," + std::to_string(t[1]) + "," + std::to_string(t[2]) + ")";
}

}  // namespace

SimplicialComplex2::SimplicialComplex2(Index vertex_count, std::vector<EdgeVertices> edges,
                                       std::vector<TriangleVertices> triangles)
    : vertex_count_(vertex_count), edges_(std::move(edges)), triangles_(std::move(triangles)) {
    if (vertex_count_ < 0) throw InvalidComplex("negative vertex count");

    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const auto& [i, j] = edges_[e];
        if (i < 0 || j >= vertex_count_ || !(i < j))
            throw InvalidComplex("edge " + to_string(edges_[e]) + " is not (i,j) with 0 <= i < j < N");
        if (e > 0 && !(edges_[e - 1] < edges_[e]))
            throw InvalidComplex("edges not strictly sorted at " + to_string(edges_[e]));
    }
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        const auto& [i, j, k] = triangles_[t];
        if (i < 0 || k >= vertex_count_ || !(i < j && j < k))
            throw InvalidComplex("triangle " + to_string(triangles_[t]) + " is not (i,j,k) with i < j < k < N");
        if (t > 0 && !(triangles_[t - 1] < triangles_[t]))
            throw InvalidComplex("triangles not strictly sorted at " + to_string(triangles_[t]));
    }

    neighbors_.assign(static_cast<std::size_t>(vertex_count_), {});
    incident_.assign(static_cast<std::size_t>(vertex_count_), {});
    for (Index e = 0; e < edge_count(); ++e) {
        const auto& [i, j] = edges_[static_cast<std::size_t>(e)];
        neighbors_[static_cast<std::size_t>(i)].push_back(j);
        neighbors_[static_cast<std::size_t>(j)].push_back(i);
        incident_[static_cast<std::size_t>(i)].push_back(e);
        incident_[static_cast<std::size_t>(j)].push_back(e);
    }
    for (auto& n : neighbors_) std::sort(n.begin(), n.end());

    upper_degree_.assign(edges_.size(), 0);
    for (const auto& t : triangles_) {
        for (const EdgeVertices face : {EdgeVertices{t[1], t[2]}, EdgeVertices{t[0], t[2]}, EdgeVertices{t[0], t[1]}}) {
            auto e = edge_index(face[0], face[1]);
            if (!e) throw ClosureViolation("triangle " + to_string(t) + " lacks edge " + to_string(face));
            ++upper_degree_[static_cast<std::size_t>(*e)];
        }
    }
}

std::optional<Index> SimplicialComplex2::edge_index(Index u, Index v) const {
    const EdgeVertices key = u < v ? EdgeVertices{u, v} : EdgeVertices{v, u};
    auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
    if (it == edges_.end() || *it != key) return std::nullopt;
    return static_cast<Index>(it - edges_.begin());
}

bool SimplicialComplex2::has_triangle(Index u, Index v, Index w) const {
    TriangleVertices key{u, v, w};
    std::sort(key.begin(), key.end());
    return std::binary_search(triangles_.begin(), triangles_.end(), key);
}

std::span<const Index> SimplicialComplex2::neighbors(Index v) const {
    return neighbors_[static_cast<std::size_t>(v)];
}

std::span<const Index> SimplicialComplex2::incident_edges(Index v) const {
    return incident_[static_cast<std::size_t>(v)];
}

std::vector<Index> SimplicialComplex2::degrees() const {
    std::vector<Index> d(neighbors_.size());
    std::transform(neighbors_.begin(), neighbors_.end(), d.begin(),
                   [](const auto& n) { return static_cast<Index>(n.size()); });
    return d;
}

bool SimplicialComplex2::is_connected() const {
    if (vertex_count_ <= 1) return true;
    std::vector<char> seen(static_cast<std::size_t>(vertex_count_), 0);
    std::queue<Index> frontier;
    frontier.push(0);
    seen[0] = 1;
    Index reached = 1;
    while (!frontier.empty()) {
        const Index v = frontier.front();
        frontier.pop();
        for (Index w : neighbors(v)) {
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = 1;
                ++reached;
                frontier.push(w);
            }
        }
    }
    return reached == vertex_count_;
}

Laplacian1::Row Laplacian1::row(Index i) const {
    const Index begin = matrix.outerIndexPtr()[i];
    const Index end = matrix.outerIndexPtr()[i + 1];
    const auto count = static_cast<std::size_t>(end - begin);
    return {{matrix.innerIndexPtr() + begin, count}, {matrix.valuePtr() + begin, count}};
}

BoundaryOperators build_boundaries(const SimplicialComplex2& complex) {
    if (!complex.is_connected()) throw Disconnected("1-skeleton is not connected");

    using Triplet = Eigen::Triplet<int, Index>;
    BoundaryOperators b;

    std::vector<Triplet> t1;
    t1.reserve(2 * static_cast<std::size_t>(complex.edge_count()));
    for (Index e = 0; e < complex.edge_count(); ++e) {
        t1.emplace_back(complex.edge(e)[0], e, -1);
        t1.emplace_back(complex.edge(e)[1], e, +1);
    }
    b.d1.resize(complex.vertex_count(), complex.edge_count());
    b.d1.setFromTriplets(t1.begin(), t1.end());

    std::vector<Triplet> t2;
    t2.reserve(3 * static_cast<std::size_t>(complex.triangle_count()));
    for (Index t = 0; t < complex.triangle_count(); ++t) {
        const auto& [i, j, k] = complex.triangles()[static_cast<std::size_t>(t)];
        t2.emplace_back(*complex.edge_index(j, k), t, +1);
        t2.emplace_back(*complex.edge_index(i, k), t, -1);
        t2.emplace_back(*complex.edge_index(i, j), t, +1);
    }
    b.d2.resize(complex.edge_count(), complex.triangle_count());
    b.d2.setFromTriplets(t2.begin(), t2.end());
    return b;
}

Laplacian1 build_laplacian_algebraic(const BoundaryOperators& boundaries) {
    using IntMatrix = Eigen::SparseMatrix<int, Eigen::ColMajor, Index>;
    const IntMatrix d1t = boundaries.d1.transpose();
    const IntMatrix d2t = boundaries.d2.transpose();
    IntMatrix lower = d1t * boundaries.d1;
    IntMatrix upper = boundaries.d2 * d2t;
    IntMatrix sum = (lower + upper).pruned();

    Laplacian1 l;
    l.matrix = sum.cast<double>();
    l.matrix.makeCompressed();
    return l;
}

Laplacian1 build_laplacian_combinatorial(const SimplicialComplex2& complex) {
    using Triplet = Eigen::Triplet<double, Index>;
    std::vector<Triplet> entries;
    const auto upper_degree = complex.upper_degrees();

    for (Index e = 0; e < complex.edge_count(); ++e)
        entries.emplace_back(e, e, upper_degree[static_cast<std::size_t>(e)] + 2.0);

    // Edges sharing vertex v: v is the tail (coefficient -1) of edges to higher
    // vertices and the head (+1) of edges from lower ones. Equal coefficients
    // mean the two edges induce the same orientation on v.
    for (Index v = 0; v < complex.vertex_count(); ++v) {
        const auto nbrs = complex.neighbors(v);
        for (std::size_t p = 0; p < nbrs.size(); ++p) {
            for (std::size_t q = p + 1; q < nbrs.size(); ++q) {
                const Index a = nbrs[p];
                const Index c = nbrs[q];
                if (complex.has_triangle(v, a, c)) continue;
                const int coeff_a = a > v ? -1 : +1;
                const int coeff_c = c > v ? -1 : +1;
                const double value = coeff_a == coeff_c ? 1.0 : -1.0;
                const Index ea = *complex.edge_index(v, a);
                const Index ec = *complex.edge_index(v, c);
                entries.emplace_back(ea, ec, value);
                entries.emplace_back(ec, ea, value);
            }
        }
    }

    Laplacian1 l;
    l.matrix.resize(complex.edge_count(), complex.edge_count());
    l.matrix.setFromTriplets(entries.begin(), entries.end());
    l.matrix.makeCompressed();
    return l;
}

bool same_entries(const Laplacian1& a, const Laplacian1& b) {
    if (a.size() != b.size() || a.nnz() != b.nnz()) return false;
    for (Index i = 0; i < a.size(); ++i) {
        const auto ra = a.row(i);
        const auto rb = b.row(i);
        if (!std::equal(ra.columns.begin(), ra.columns.end(), rb.columns.begin(), rb.columns.end())) return false;
        if (!std::equal(ra.values.begin(), ra.values.end(), rb.values.begin(), rb.values.end())) return false;
    }
    return true;
}

std::vector<double> row_abs_sums(const Laplacian1& laplacian) {
    std::vector<double> sums(static_cast<std::size_t>(laplacian.size()), 0.0);
    for (Index i = 0; i < laplacian.size(); ++i) {
        double s = 0.0;
        for (double v : laplacian.row(i).values) s += std::abs(v);
        sums[static_cast<std::size_t>(i)] = s;
    }
    return sums;
}

double l1_one_norm(const Laplacian1& laplacian) {
    const auto sums = row_abs_sums(laplacian);
    return sums.empty() ? 0.0 : *std::max_element(sums.begin(), sums.end());
}

LaplacianCounts nnz_degree_identity(const SimplicialComplex2& complex) {
    LaplacianCounts counts;
    counts.laplacian_nnz = build_laplacian_combinatorial(complex).nnz();

    std::int64_t sum_sq = 0;
    std::int64_t sum = 0;
    for (Index v = 0; v < complex.vertex_count(); ++v) {
        const std::int64_t d = complex.degree(v);
        sum_sq += d * d;
        sum += d;
        counts.lower_adjacency_count += d * (d - 1);  // ordered pairs of edges meeting at v
    }
    counts.lower_adjacency_count += complex.edge_count();
    counts.degree_formula = sum_sq - sum / 2;  // sum of degrees is 2|E|, always even
    return counts;
}

Eigen::VectorXd boundary_of(const BoundaryOperators& boundaries, const SparseChain& chain) {
    const Eigen::SparseMatrix<double, Eigen::ColMajor, Index> d1 = boundaries.d1.cast<double>();
    return d1 * Eigen::VectorXd(chain);
}

}  // namespace hodge
