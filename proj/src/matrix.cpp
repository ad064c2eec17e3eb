#include "charp/matrix.hpp"

#include <sstream>
#include <stdexcept>

namespace charp {

PolyMat::PolyMat(std::uint32_t p, std::vector<std::string> ring, std::size_t rows, std::size_t cols)
    : p_(p), ring_(std::move(ring)), rows_(rows), cols_(cols) {
    e_.assign(rows * cols, Poly::zero(p, ring_));
}

PolyMat PolyMat::identity(std::uint32_t p, const std::vector<std::string>& ring, std::size_t n) {
    PolyMat m(p, ring, n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = Poly::constant(p, ring, 1);
    return m;
}

bool PolyMat::is_zero() const {
    for (const auto& x : e_)
        if (!x.is_zero()) return false;
    return true;
}

bool operator==(const PolyMat& a, const PolyMat& b) {
    return a.p_ == b.p_ && a.ring_ == b.ring_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.e_ == b.e_;
}

namespace {
void require_same_shape(const PolyMat& a, const PolyMat& b) {
    if (a.modulus() != b.modulus() || a.ring() != b.ring() || a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("PolyMat: shape or ring mismatch");
}
} // namespace

PolyMat operator+(const PolyMat& a, const PolyMat& b) {
    require_same_shape(a, b);
    PolyMat r = a;
    for (std::size_t i = 0; i < r.e_.size(); ++i) r.e_[i] += b.e_[i];
    return r;
}

PolyMat operator-(const PolyMat& a, const PolyMat& b) {
    require_same_shape(a, b);
    PolyMat r = a;
    for (std::size_t i = 0; i < r.e_.size(); ++i) r.e_[i] -= b.e_[i];
    return r;
}

PolyMat operator-(const PolyMat& a) {
    PolyMat r = a;
    for (auto& x : r.e_) x = -x;
    return r;
}

PolyMat operator*(const PolyMat& a, const PolyMat& b) {
    if (a.modulus() != b.modulus() || a.ring() != b.ring() || a.cols() != b.rows())
        throw std::invalid_argument("PolyMat: product shape or ring mismatch");
    PolyMat r(a.modulus(), a.ring(), a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            if (a.at(i, k).is_zero()) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) {
                if (b.at(k, j).is_zero()) continue;
                r.at(i, j) += a.at(i, k) * b.at(k, j);
            }
        }
    return r;
}

PolyMat operator*(const Poly& c, const PolyMat& a) {
    PolyMat r = a;
    Poly cc = c.embedded_into(a.ring());
    for (auto& x : r.e_) x = cc * x;
    return r;
}

PolyMat PolyMat::map(const std::function<Poly(const Poly&)>& f) const {
    PolyMat r = *this;
    for (auto& x : r.e_) x = f(x);
    return r;
}

PolyMat PolyMat::embedded_into(const std::vector<std::string>& vars) const {
    PolyMat r(p_, vars, rows_, cols_);
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] = e_[i].embedded_into(vars);
    return r;
}

std::string PolyMat::str() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < rows_; ++i) {
        os << (i ? ", [" : "[");
        for (std::size_t j = 0; j < cols_; ++j) os << (j ? ", " : "") << at(i, j).str();
        os << "]";
    }
    os << "]";
    return os.str();
}

PolyMat derivative(const PolyMat& a, std::size_t var_index) {
    return a.map([&](const Poly& x) { return derivative(x, var_index); });
}

PolyMat frobenius_substitute(const PolyMat& a, int k) {
    return a.map([&](const Poly& x) { return frobenius_substitute(x, k); });
}

PolyMat mat_pow(const PolyMat& a, unsigned e) {
    if (a.rows() != a.cols()) throw std::invalid_argument("mat_pow: square matrix required");
    PolyMat r = PolyMat::identity(a.modulus(), a.ring(), a.rows());
    PolyMat base = a;
    while (e) {
        if (e & 1) r = r * base;
        if (e > 1) base = base * base;
        e >>= 1;
    }
    return r;
}

Poly det(const PolyMat& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("det: square matrix required");
    const std::size_t n = a.rows();
    if (n == 0) return Poly::constant(a.modulus(), a.ring(), 1);
    if (n == 1) return a.at(0, 0);
    // Laplace expansion along the first row; fine at desk-scale ranks
    Poly r = Poly::zero(a.modulus(), a.ring());
    for (std::size_t j = 0; j < n; ++j) {
        if (a.at(0, j).is_zero()) continue;
        PolyMat minor(a.modulus(), a.ring(), n - 1, n - 1);
        for (std::size_t
                 r2 = 1;
             r2 < n; ++r2)
            for (std::size_t c2 = 0, cc = 0; c2 < n; ++c2) {
                if (c2 == j) continue;
                minor.at(r2 - 1, cc++) = a.at(r2, c2);
            }
        Poly term = a.at(0, j) * det(minor);
        r = (j % 2 == 0) ? r + term : r - term;
    }
    return r;
}

PolyMat inverse(const PolyMat& a) {
    Poly d = det(a);
    if (!d.is_constant() || d.is_zero())
        throw std::domain_error("PolyMat::inverse: determinant is not a unit (got " + d.str() + ")");
    std::uint32_t dinv = inv_mod(d.constant_term().v, a.modulus());
    const std::size_t n = a.rows();
    PolyMat adj(a.modulus(), a.ring(), n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            PolyMat minor(a.modulus(), a.ring(), n - 1, n - 1);
            for (std::size_t r2 = 0, rr = 0; r2 < n; ++r2) {
                if (r2 == i) continue;
                for (std::size_t c2 = 0, cc = 0; c2 < n; ++c2) {
                    if (c2 == j) continue;
                    minor.at(rr, cc++) = a.at(r2, c2);
                }
                ++rr;
            }
            Poly cof = det(minor);
            if ((i + j) % 2 == 1) cof = -cof;
            adj.at(j, i) = cof.scaled(static_cast<std::int64_t>(dinv));
        }
    return adj;
}

} // namespace charp
