#include "charp/fpsolve.hpp"

#include <algorithm>
#include <stdexcept>

namespace charp {

std::vector<std::size_t> FpMat::rref() {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols_ && row < rows_; ++col) {
        std::size_t sel = rows_;
        for (std::size_t r = row; r < rows_; ++r)
            if (at(r, col) != 0) { sel = r; break; }
        if (sel == rows_) continue;
        if (sel != row)
            for (std::size_t c = col; c < cols_; ++c) std::swap(at(sel, c), at(row, c));
        std::uint32_t inv = inv_mod(at(row, col), p_);
        for (std::size_t c = col; c < cols_; ++c) at(row, c) = mul_mod(at(row, c), inv, p_);
        for (std::size_t r = 0; r < rows_; ++r) {
            if (r == row) continue;
            std::uint32_t f = at(r, col);
            if (f == 0) continue;
            for (std::size_t c = col; c < cols_; ++c)
                at(r, c) = sub_mod(at(r, c), mul_mod(f, at(row, c), p_), p_);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

std::vector<std::vector<std::uint32_t>> kernel_basis(FpMat A) {
    const std::size_t n = A.cols();
    auto pivots = A.rref();
    std::vector<char> is_pivot(n, 0);
    for (auto c : pivots) is_pivot[c] = 1;
    std::vector<std::vector<std::uint32_t>> basis;
    for (std::size_t free_col = 0; free_col < n; ++free_col) {
        if (is_pivot[free_col]) continue;
        std::vector<std::uint32_t> v(n, 0);
        v[free_col] = 1;
        for (std::size_t r = 0; r < pivots.size(); ++r)
            v[pivots[r]] = sub_mod(0, A.at(r, free_col), A.modulus());
        basis.push_back(std::move(v));
    }
    return basis;
}

std::size_t rank(FpMat A) { return A.rref().size(); }

bool solve_linear(const FpMat& A, const std::vector<std::uint32_t>& b, std::vector<std::uint32_t>& x) {
    if (b.size() != A.rows()) throw std::invalid_argument("solve_linear: size mismatch");
    FpMat aug(A.modulus(), A.rows(), A.cols() + 1);
    for (std::size_t r = 0; r < A.rows(); ++r) {
        for (std::size_t c = 0; c < A.cols(); ++c) aug.at(r, c) = A.at(r, c);
        aug.at(r, A.cols()) = b[r] % A.modulus();
    }
    auto pivots = aug.rref();
    if (!pivots.empty() && pivots.back() == A.cols()) return false; // inconsistent
    x.assign(A.cols(), 0);
    for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug.at(r, A.cols());
    return true;
}

void FpSpan::reduce(std::vector<std::uint32_t>& v) const {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        std::uint32_t f = v[pivots_[i]];
        if (f == 0) continue;
        for (std::size_t c = 0; c < dim_; ++c)
            v[c] = sub_mod(v[c], mul_mod(f, rows_[i][c], p_), p_);
    }
}

bool FpSpan::insert(std::vector<std::uint32_t> v) {
    if (v.size() != dim_) throw std::invalid_argument("FpSpan: dimension mismatch");
    reduce(v);
    std::size_t piv = dim_;
    for (std::size_t c = 0; c < dim_; ++c)
        if (v[c] != 0) { piv = c; break; }
    if (piv == dim_) return false;
    std::uint32_t inv = inv_mod(v[piv], p_);
    for (auto& x : v) x = mul_mod(x, inv, p_);
    // keep earlier rows reduced against the new one
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        std::uint32_t f = rows_[i][piv];
        if (f == 0) continue;
        for (std::size_t c = 0; c < dim_; ++c)
            rows_[i][c] = sub_mod(rows_[i][c], mul_mod(f, v[c], p_), p_);
    }
    rows_.push_back(std::move(v));
    pivots_.push_back(piv);
    return true;
}

bool FpSpan::contains(std::vector<std::uint32_t> v) const {
    if (v.size() != dim_) throw std::invalid_argument("FpSpan: dimension mismatch");
    reduce(v);
    return std::all_of(v.begin(), v.end(), [](std::uint32_t x) { return x == 0; });
}

namespace {
void enumerate(std::size_t nvars, int bound, Exponents& cur, std::size_t pos, int used,
               std::vector<Exponents>& out) {
    if (pos == nvars) {
        out.push_back(cur);
        return;
    }
    for (int e = 0; e + used <= bound; ++e) {
        cur[pos] = e;
        enumerate(nvars, bound, cur, pos + 1, used + e, out);
    }
    cur[pos] = 0;
}
} // namespace

MonomialBasis::MonomialBasis(std::size_t nvars, int bound) : bound_(bound) {
    if (bound < 0) throw std::invalid_argument("MonomialBasis: negative bound");
    Exponents cur(nvars, 0);
    enumerate(nvars, bound, cur, 0, 0, list_);
    std::sort(list_.begin(), list_.end(), DegLexLess{});
    for (std::size_t i = 0; i < list_.size(); ++i) index_.emplace(list_[i], i);
}

std::ptrdiff_t MonomialBasis::index_of(const Exponents& e) const {
    auto it = index_.find(e);
    return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

std::vector<std::uint32_t> MonomialBasis::coords(const Poly& a) const {
    std::vector<std::uint32_t> v(list_.size(), 0);
    for (const auto& [e, c] : a.terms()) {
        auto idx = index_of(e);
        if (idx < 0)
            throw std::out_of_range("MonomialBasis: term of degree " + std::to_string(total_degree(e)) +
                                    " exceeds bound " + std::to_string(bound_));
        v[static_cast<std::size_t>(idx)] = c;
    }
    return v;
}

Poly MonomialBasis::from_coords(std::uint32_t p, const std::vector<std::string>& ring,
                                const std::vector<std::uint32_t>& v) const {
    Poly r(p, ring);
    for (std::size_t i = 0; i < v.size() && i < list_.size(); ++i)
        if (v[i] != 0) r.add_term(list_[i], v[i]);
    return r;
}

std::uint64_t Rng::next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace charp
