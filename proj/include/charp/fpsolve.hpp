#ifndef CHARP_FPSOLVE_HPP
#define CHARP_FPSOLVE_HPP

#include "charp/poly.hpp"

#include <cstdint>
#include <vector>

namespace charp {

// Dense matrix over F_p for the graded kernel/span solvers. Row-major.
class FpMat {
  public:
    FpMat() = default;
    FpMat(std::uint32_t p, std::size_t rows, std::size_t cols)
        : p_(p), rows_(rows), cols_(cols), a_(rows * cols, 0) {}

    std::uint32_t modulus() const { return p_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    std::uint32_t& at(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
    std::uint32_t at(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }

    // In-place reduced row echelon form; returns pivot column per echelon row.
    std::vector<std::size_t> rref();

  private:
    std::uint32_t p_ = 0;
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<std::uint32_t> a_;
};

// Basis of the right kernel {x : A x = 0}; each element has A.cols() entries.
std::vector<std::vector<std::uint32_t>> kernel_basis(FpMat A);

std::size_t rank(FpMat A);

// One solution of A x = b, if any.
bool solve_linear(const FpMat& A, const std::vector<std::uint32_t>& b, std::vector<std::uint32_t>& x);

// Incremental span of F_p row vectors; tracks membership and rank.
class FpSpan {
  public:
    FpSpan(std::uint32_t p, std::size_t dim) : p_(p), dim_(dim) {}

    // Returns true (and absorbs the vector) when v was independent of the span.
    bool insert(std::vector<std::uint32_t> v);
    bool contains(std::vector<std::uint32_t> v) const;
    std::size_t rank() const { return rows_.size(); }

  private:
    std::uint32_t p_;
    std::size_t dim_;
    std::vector<std::vector<std::uint32_t>> rows_; // reduced, sorted by pivot
    std::vector<std::size_t> pivots_;

    void reduce(std::vector<std::uint32_t>& v) const;
};

// Monomials of total degree <= bound in nvars variables, deg-lex ordered,
// with index lookup. Coordinate space for the graded solvers.
class MonomialBasis {
  public:
    MonomialBasis(std::size_t nvars, int bound);

    std::size_t size() const { return list_.size(); }
    const Exponents& operator[](std::size_t i) const { return list_[i]; }
    // -1 when the monomial exceeds the bound.
    std::ptrdiff_t index_of(const Exponents& e) const;
    int bound() const { return bound_; }

    // Coordinate vector of a polynomial; throws if a term exceeds the bound.
    std::vector<std::uint32_t> coords(const Poly& a) const;
    Poly from_coords(std::uint32_t p, const std::vector<std::string>& ring,
                     const std::vector<std::uint32_t>& v) const;

  private:
    int bound_;
    std::vector<Exponents> list_;
    std::map<Exponents, std::size_t, DegLexLess> index_;
};

// Deterministic splitmix64 stream; the only randomness source in the library.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    // Uniform-ish value in [0, n); desk-scale bias is irrelevant here.
    std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }

  private:
    std::uint64_t state_;
};

} // namespace charp

#endif
