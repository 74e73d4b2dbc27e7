#include "hodge/oracle.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "hodge/errors.hpp"

namespace hodge::oracle {

namespace {

using IntegerRow = std::vector<std::pair<Index, mpz_class>>;

// a*x - b*y over sparse integer rows; drops zeros.
IntegerRow combine(const mpz_class& a, const IntegerRow& x, const mpz_class& b, const IntegerRow& y) {
    IntegerRow out;
    out.reserve(x.size() + y.size());
    auto ix = x.begin();
    auto iy = y.begin();
    while (ix != x.end() || iy != y.end()) {
        if (iy == y.end() || (ix != x.end() && ix->first < iy->first)) {
            out.emplace_back(ix->first, a * ix->second);
            ++ix;
        } else if (ix == x.end() || iy->first < ix->first) {
            out.emplace_back(iy->first, -b * iy->second);
            ++iy;
        } else {
            mpz_class v = a * ix->second - b * iy->second;
            if (v != 0) out.emplace_back(ix->first, std::move(v));
            ++ix;
            ++iy;
        }
    }
    return out;
}

void remove_content(IntegerRow& row) {
    if (row.empty()) return;
    mpz_class g = 0;
    for (const auto& [col, v] : row) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
        if (g == 1) return;
    }
    for (auto& [col, v] : row) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), g.get_mpz_t());
}

void subtract_scaled(std::map<Index, Rational>& v, const Rational& a, const RationalChain& b) {
    for (const auto& [j, bj] : b) {
        auto [it, inserted] = v.try_emplace(j, 0);
        it->second -= a * bj;
        if (it->second == 0) v.erase(it);
    }
}

RationalChain to_chain(const std::map<Index, Rational>& v) {
    return RationalChain(v.begin(), v.end());
}

}  // namespace

RationalMatrix RationalMatrix::from_integer(const Eigen::SparseMatrix<int, Eigen::ColMajor, Index>& m) {
    RationalMatrix out;
    out.rows = static_cast<Index>(m.rows());
    out.cols = static_cast<Index>(m.cols());
    out.columns.resize(static_cast<std::size_t>(out.cols));
    for (Index c = 0; c < out.cols; ++c) {
        for (Eigen::SparseMatrix<int, Eigen::ColMajor, Index>::InnerIterator it(m, c); it; ++it)
            if (it.value() != 0) out.columns[static_cast<std::size_t>(c)].emplace_back(it.index(), Rational(it.value()));
    }
    return out;
}

RationalChain to_rational(const SparseChain& chain) {
    std::map<Index, Rational> v;
    for (SparseChain::InnerIterator it(chain); it; ++it)
        if (it.value() != 0.0) v.emplace(it.index(), Rational(it.value()));
    return to_chain(v);
}

Index rank(const RationalMatrix& m) {
    // Rows scaled to integers by the lcm of their denominators.
    std::vector<std::map<Index, Rational>> rational_rows(static_cast<std::size_t>(m.rows));
    for (Index c = 0; c < m.cols; ++c)
        for (const auto& [r, v] : m.columns[static_cast<std::size_t>(c)])
            if (v != 0) rational_rows[static_cast<std::size_t>(r)].emplace(c, v);

    std::vector<IntegerRow> rows;
    rows.reserve(rational_rows.size());
    for (const auto& rr : rational_rows) {
        if (rr.empty()) continue;
        mpz_class scale = 1;
        for (const auto& [c, v] : rr) mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), v.get_den_mpz_t());
        IntegerRow row;
        row.reserve(rr.size());
        for (const auto& [c, v] : rr) row.emplace_back(c, mpz_class(v * scale));
        remove_content(row);
        rows.push_back(std::move(row));
    }

    // Every active row has all entries at columns >= the current one.
    Index r = 0;
    std::vector<std::size_t> active(rows.size());
    std::iota(active.begin(), active.end(), 0);
    for (Index c = 0; c < m.cols && !active.empty(); ++c) {
        std::vector<std::size_t> hits;
        for (std::size_t a : active)
            if (!rows[a].empty() && rows[a].front().first == c) hits.push_back(a);
        if (hits.empty()) continue;

        const auto pivot = *std::min_element(hits.begin(), hits.end(), [&](std::size_t x, std::size_t y) {
            const int cmp = mpz_cmpabs(rows[x].front().second.get_mpz_t(), rows[y].front().second.get_mpz_t());
            if (cmp != 0) return cmp < 0;
            if (rows[x].size() != rows[y].size()) return rows[x].size() < rows[y].size();
            return x < y;
        });
        const mpz_class p = rows[pivot].front().second;
        for (std::size_t h : hits) {
            if (h == pivot) continue;
            const mpz_class a = rows[h].front().second;
            mpz_class g;
            mpz_gcd(g.get_mpz_t(), p.get_mpz_t(), a.get_mpz_t());
            rows[h] = combine(p / g, rows[h], a / g, rows[pivot]);
            remove_content(rows[h]);
        }
        ++r;
        active.erase(std::find(active.begin(), active.end(), pivot));
        std::erase_if(active, [&](std::size_t a) { return rows[a].empty(); });
    }
    return r;
}

BoundarySpace::BoundarySpace(Index dimension, std::span<const RationalChain> generators)
    : dimension_(dimension), slot_(static_cast<std::size_t>(dimension), -1) {
    for (const auto& g : generators) insert(g);
}

RationalChain BoundarySpace::normal_form(const RationalChain& v) const {
    std::map<Index, Rational> work(v.begin(), v.end());
    // Eliminating with the basis vector led by p only touches indices >= p,
    // so one ascending sweep clears every pivot position.
    auto it = work.begin();
    while (it != work.end()) {
        const Index pos = it->first;
        const Index s = slot_[static_cast<std::size_t>(pos)];
        if (s < 0) {
            ++it;
            continue;
        }
        const Rational a = it->second;
        subtract_scaled(work, a, basis_[static_cast<std::size_t>(s)]);
        it = work.upper_bound(pos);
    }
    return to_chain(work);
}

bool BoundarySpace::insert(const RationalChain& v) {
    RationalChain r = normal_form(v);
    if (r.empty()) return false;
    const Rational lead = r.front().second;
    for (auto& [j, x] : r) x /= lead;
    slot_[static_cast<std::size_t>(r.front().first)] = static_cast<Index>(basis_.size());
    basis_.push_back(std::move(r));
    return true;
}

HomologyOracle::HomologyOracle(const BoundaryOperators& boundaries)
    : vertex_count_(static_cast<Index>(boundaries.d1.rows())) {
    const Index edges = static_cast<Index>(boundaries.d1.cols());
    d1_columns_.resize(static_cast<std::size_t>(edges));
    for (Index e = 0; e < edges; ++e)
        for (Eigen::SparseMatrix<int, Eigen::ColMajor, Index>::InnerIterator it(boundaries.d1, e); it; ++it)
            d1_columns_[static_cast<std::size_t>(e)].emplace_back(it.index(), it.value());

    rank_d1_ = rank(RationalMatrix::from_integer(boundaries.d1));
    const auto d2 = RationalMatrix::from_integer(boundaries.d2);
    boundaries_space_ = BoundarySpace(edges, d2.columns);
    betti1_ = edges - rank_d1_ - boundaries_space_.rank();
}

void HomologyOracle::require_cycle(const SparseChain& c) const {
    std::map<Index, Rational> boundary;
    for (SparseChain::InnerIterator it(c); it; ++it) {
        if (it.index() < 0 || it.index() >= static_cast<Index>(d1_columns_.size()))
            throw NotACycle("chain index out of range");
        const Rational x(it.value());
        for (const auto& [v, sign] : d1_columns_[static_cast<std::size_t>(it.index())]) boundary[v] += x * sign;
    }
    for (const auto& [v, x] : boundary)
        if (x != 0) throw NotACycle("boundary is nonzero at vertex " + std::to_string(v));
}

RationalChain HomologyOracle::normal_form(const SparseChain& c) const {
    require_cycle(c);
    return boundaries_space_.normal_form(to_rational(c));
}

bool HomologyOracle::is_boundary(const SparseChain& c) const { return normal_form(c).empty(); }

bool HomologyOracle::are_homologous(const SparseChain& a, const SparseChain& b) const {
    // Normal forms are linear, so a -/+ b bounds iff NF(a) == +/-NF(b); no
    // floating-point sum is ever formed.
    const RationalChain na = normal_form(a);
    RationalChain nb = normal_form(b);
    if (na == nb) return true;
    for (auto& entry : nb) entry.second = -entry.second;
    return na == nb;
}

bool HomologyOracle::verify_generating_set(std::span<const SparseChain> generators) const {
    for (const auto& g : generators) require_cycle(g);
    if (static_cast<Index>(generators.size()) != betti1_) return false;
    BoundarySpace extended = boundaries_space_;
    for (const auto& g : generators)
        if (!extended.insert(to_rational(g))) return false;
    return true;
}

Index betti1(const BoundaryOperators& boundaries) { return HomologyOracle(boundaries).betti1(); }

bool is_boundary(const SparseChain& c, const BoundaryOperators& boundaries) {
    return HomologyOracle(boundaries).is_boundary(c);
}

bool are_homologous(const SparseChain& a, const SparseChain& b, const BoundaryOperators& boundaries) {
    return HomologyOracle(boundaries).are_homologous(a, b);
}

bool verify_generating_set(std::span<const SparseChain> generators, const BoundaryOperators& boundaries) {
    return HomologyOracle(boundaries).verify_generating_set(generators);
}

bool is_boundary_by_rank(const SparseChain& c, const BoundaryOperators& boundaries) {
    HomologyOracle(boundaries).require_cycle(c);
    RationalMatrix d2 = RationalMatrix::from_integer(boundaries.d2);
    const Index base = rank(d2);
    d2.columns.push_back(to_rational(c));
    ++d2.cols;
    return rank(d2) == base;
}

}  // namespace hodge::oracle
