#pragma once

#include <span>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "hodge/complex.hpp"

namespace hodge::oracle {

using Rational = mpq_class;

/// Sparse exact vector: strictly increasing indices, no stored zeros.
using RationalChain = std::vector<std::pair<Index, Rational>>;

/// Column-sparse exact matrix.
struct RationalMatrix {
    Index rows = 0;
    Index cols = 0;
    std::vector<RationalChain> columns;

    static RationalMatrix from_integer(const Eigen::SparseMatrix<int, Eigen::ColMajor, Index>& m);
};

/// Exact conversion; every double is a dyadic rational.
RationalChain to_rational(const SparseChain& chain);

/// Exact rank by fraction-free elimination. The pivot in each column is the
/// entry of smallest magnitude, which keeps integer growth down.
Index rank(const RationalMatrix& m);

/// Img d2 held in echelon form (leading index = smallest nonzero index,
/// leading coefficient 1). `normal_form` reduces a chain modulo the span and
/// is canonical: two chains differ by a boundary iff their normal forms are
/// equal.
class BoundarySpace {
public:
    BoundarySpace() = default;
    BoundarySpace(Index dimension, std::span<const RationalChain> generators);

    Index dimension() const noexcept { return dimension_; }
    Index rank() const noexcept { return static_cast<Index>(basis_.size()); }

    RationalChain normal_form(const RationalChain& v) const;

    /// Adds v to the span; returns false if it was already inside.
    bool insert(const RationalChain& v);

private:
    Index dimension_ = 0;
    std::vector<RationalChain> basis_;
    std::vector<Index> slot_;  // pivot index -> position in basis_, or -1
};

/// Exact homology queries for one complex. Construction reduces d2 once;
/// every query afterwards costs one reduction.
class HomologyOracle {
public:
    explicit HomologyOracle(const BoundaryOperators& boundaries);

    Index rank_d1() const noexcept { return rank_d1_; }
    Index rank_d2() const noexcept { return boundaries_space_.rank(); }
    Index betti1() const noexcept { return betti1_; }

    /// Throws NotACycle unless d1 * c == 0 exactly.
    void require_cycle(const SparseChain& c) const;

    RationalChain normal_form(const SparseChain& c) const;
    bool is_boundary(const SparseChain& c) const;
    bool are_homologous(const SparseChain& a, const SparseChain& b) const;

    /// |H| == b1 and the classes of H are independent.
    bool verify_generating_set(std::span<const SparseChain> generators) const;

private:
    std::vector<std::vector<std::pair<Index, int>>> d1_columns_;
    Index vertex_count_ = 0;
    Index rank_d1_ = 0;
    Index betti1_ = 0;
    BoundarySpace boundaries_space_;
};

Index betti1(const BoundaryOperators& boundaries);
bool is_boundary(const SparseChain& c, const BoundaryOperators& boundaries);
bool are_homologous(const SparseChain& a, const SparseChain& b, const BoundaryOperators& boundaries);
bool verify_generating_set(std::span<const SparseChain> generators, const BoundaryOperators& boundaries);

/// rank([d2 | c]) == rank(d2), straight from the definition. Slow; used to
/// cross-check `is_boundary`.
bool is_boundary_by_rank(const SparseChain& c, const BoundaryOperators& boundaries);

}  // namespace hodge::oracle
