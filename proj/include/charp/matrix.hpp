#ifndef CHARP_MATRIX_HPP
#define CHARP_MATRIX_HPP

#include "charp/poly.hpp"

#include <functional>
#include <vector>

namespace charp {

// Dense matrix with Poly entries (all sharing modulus and ring).
class PolyMat {
  public:
    PolyMat() = default;
    PolyMat(std::uint32_t p, std::vector<std::string> ring, std::size_t rows, std::size_t cols);

    static PolyMat identity(std::uint32_t p, const std::vector<std::string>& ring, std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::uint32_t modulus() const { return p_; }
    const std::vector<std::string>& ring() const { return ring_; }

    Poly& at(std::size_t r, std::size_t c) { return e_[r * cols_ + c]; }
    const Poly& at(std::size_t r, std::size_t c) const { return e_[r * cols_ + c]; }

    bool is_zero() const;

    friend bool operator==(const PolyMat& a, const PolyMat& b);
    friend bool operator!=(const PolyMat& a, const PolyMat& b) { return !(a == b); }
    friend PolyMat operator+(const PolyMat& a, const PolyMat& b);
    friend PolyMat operator-(const PolyMat& a, const PolyMat& b);
    friend PolyMat operator*(const PolyMat& a, const PolyMat& b);
    friend PolyMat operator*(const Poly& c, const PolyMat& a);
    friend PolyMat operator-(const PolyMat& a);

    PolyMat map(const std::function<Poly(const Poly&)>& f) const;
    PolyMat embedded_into(const std::vector<std::string>& vars) const;

    std::string str() const;

  private:
    std::uint32_t p_ = 0;
    std::vector<std::string> ring_;
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Poly> e_;
};

PolyMat derivative(const PolyMat& a, std::size_t var_index);
PolyMat frobenius_substitute(const PolyMat& a, int k);
PolyMat mat_pow(const PolyMat& a, unsigned e);

Poly det(const PolyMat& a);
// Inverse for matrices whose determinant is a nonzero constant (the units of
// the polynomial ring); throws otherwise.
PolyMat inverse(const PolyMat& a);

} // namespace charp

#endif
