#pragma once

// Small dense linear algebra over an arbitrary field. Used with exact
// rationals for everything that touches stoichiometric data, and with
// double inside the LP solver.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace dcrn {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

template <typename T>
using Vec = std::vector<T>;

namespace detail {

template <typename T>
bool is_zero(const T& v) {
  if constexpr (std::is_floating_point_v<T>) {
    return std::abs(v) <= 1e-12;
  } else {
    return v == 0;
  }
}

template <typename T>
T abs_value(const T& v) {
  return v < 0 ? T(-v) : v;
}

}  // namespace detail

/// Row-major dense matrix with value semantics.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const T& fill = T(0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(const std::vector<Vec<T>>& rows, std::size_t cols) {
    Matrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      assert(rows[i].size() == cols);
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  Vec<T> row(std::size_t i) const {
    return Vec<T>(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_);
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j)
      std::swap((*this)(a, j), (*this)(b, j));
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// Reduced row echelon form plus the pivot column of each nonzero row.
template <typename T>
struct Echelon {
  Matrix<T> reduced;
  std::vector<std::size_t> pivots;
  std::size_t rank() const { return pivots.size(); }
};

/// Gauss-Jordan elimination. Exact for Rational; partial pivoting for
/// floating types.
template <typename T>
Echelon<T> rref(Matrix<T> m) {
  Echelon<T> out;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t best = r;
    bool found = false;
    for (std::size_t i = r; i < m.rows(); ++i) {
      if (detail::is_zero(m(i, c))) continue;
      if constexpr (std::is_floating_point_v<T>) {
        if (!found || std::abs(m(i, c)) > std::abs(m(best, c))) best = i;
        found = true;
      } else {
        best = i;
        found = true;
        break;
      }
    }
    if (!found) continue;
    m.swap_rows(r, best);
    const T inv = T(1) / m(r, c);
    for (std::size_t j = c; j < m.cols(); ++j) m(r, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || detail::is_zero(m(i, c))) continue;
      const T f = m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    out.pivots.push_back(c);
    ++r;
  }
  out.reduced = std::move(m);
  return out;
}

template <typename T>
std::size_t rank(const Matrix<T>& m) {
  return rref(m).rank();
}

/// Basis of {x : m x = 0}, one vector per free column.
template <typename T>
std::vector<Vec<T>> nullspace(const Matrix<T>& m) {
  const auto e = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : e.pivots) is_pivot[p] = true;
  std::vector<Vec<T>> basis;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    Vec<T> v(m.cols(), T(0));
    v[free] = T(1);
    for (std::size_t i = 0; i < e.pivots.size(); ++i)
      v[e.pivots[i]] = -e.reduced(i, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Indices of a maximal linearly independent subset of `vectors`, chosen
/// greedily in input order.
template <typename T>
std::vector<std::size_t> independent_subset(const std::vector<Vec<T>>& vectors,
                                            std::size_t dim) {
  // Pivot columns of the matrix whose columns are the vectors.
  Matrix<T> m(dim, vectors.size());
  for (std::size_t j = 0; j < vectors.size(); ++j)
    for (std::size_t i = 0; i < dim; ++i) m(i, j) = vectors[j][i];
  return rref(m).pivots;
}

/// Solves the square system a x = b exactly; returns false when singular.
template <typename T>
bool solve_square(const Matrix<T>& a, const Vec<T>& b, Vec<T>& x) {
  const std::size_t n = a.rows();
  assert(a.cols() == n && b.size() == n);
  Matrix<T> aug(n, n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n) = b[i];
  }
  const auto e = rref(aug);
  if (e.rank() < n || e.pivots.back() >= n) return false;
  x.assign(n, T(0));
  for (std::size_t i = 0; i < n; ++i) x[i] = e.reduced(i, n);
  return true;
}

/// Scales a rational vector to the primitive integer vector on the same
/// ray (first nonzero entry positive).
inline Vec<Rational> primitive_integer(Vec<Rational> v) {
  BigInt lcm_den = 1;
  for (const auto& x : v) {
    if (x == 0) continue;
    lcm_den = boost::multiprecision::lcm(lcm_den,
                                         boost::multiprecision::denominator(x));
  }
  BigInt g = 0;
  for (auto& x : v) {
    x *= Rational(lcm_den);
    g = boost::multiprecision::gcd(g, boost::multiprecision::numerator(x));
  }
  if (g == 0) return v;
  auto first = std::find_if(v.begin(), v.end(),
                            [](const Rational& x) { return x != 0; });
  if (*first < 0) g = -g;
  for (auto& x : v) x /= Rational(g);
  return v;
}

template <typename T>
T dot(const Vec<T>& a, const Vec<T>& b) {
  assert(a.size() == b.size());
  T s(0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Vec<double> to_double(const Vec<Rational>& v) {
  Vec<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].convert_to<double>();
  return out;
}

}  // namespace dcrn
