#pragma once

// Dense two-phase primal simplex for
//
//   maximize c^T x  subject to  A x = b,  x >= 0,
//
// templated on the scalar so the same code runs in double and in exact
// rationals. Bland's rule throughout, so the exact instantiation always
// terminates. `verify_optimal_basis` re-derives a floating-point basis in
// exact arithmetic and checks primal and dual feasibility.

#include <cstddef>
#include <optional>
#include <vector>

#include "dcrn/linalg.hpp"

namespace dcrn::lp {

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

template <typename T>
struct Problem {
  Matrix<T> a;
  Vec<T> b;
  Vec<T> c;
};

template <typename T>
struct Result {
  Status status = Status::IterationLimit;
  Vec<T> x;
  T objective = T(0);
  std::vector<std::size_t> basis;  // column index per row, structural only
};

namespace detail {

template <typename T>
T tolerance() {
  if constexpr (std::is_floating_point_v<T>) return T(1e-10);
  else return T(0);
}

template <typename T>
class Tableau {
 public:
  Tableau(const Problem<T>& p) : m_(p.a.rows()), n_(p.a.cols()) {
    cols_ = n_ + m_;
    t_ = Matrix<T>(m_, cols_ + 1);
    basis_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      const bool flip = p.b[i] < T(0);
      for (std::size_t j = 0; j < n_; ++j)
        t_(i, j) = flip ? T(-p.a(i, j)) : p.a(i, j);
      t_(i, n_ + i) = T(1);
      t_(i, cols_) = flip ? T(-p.b[i]) : p.b[i];
      basis_[i] = n_ + i;
    }
    allowed_.assign(cols_, true);
  }

  // Returns false on iteration limit; sets unbounded_ when detected.
  bool optimize(const Vec<T>& cost, std::size_t max_iter) {
    const T tol = tolerance<T>();
    for (std::size_t it = 0; it < max_iter; ++it) {
      std::optional<std::size_t> enter;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (!allowed_[j] || is_basic(j)) continue;
        T d = cost[j];
        for (std::size_t i = 0; i < m_; ++i) d -= cost[basis_[i]] * t_(i, j);
        if (d > tol) {
          enter = j;
          break;
        }
      }
      if (!enter) return true;
      std::optional<std::size_t> leave;
      T best(0);
      for (std::size_t i = 0; i < m_; ++i) {
        if (!(t_(i, *enter) > tol)) continue;
        const T ratio = t_(i, cols_) / t_(i, *enter);
        if (!leave || ratio < best ||
            (ratio == best && basis_[i] < basis_[*leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (!leave) {
        unbounded_ = true;
        return true;
      }
      pivot(*leave, *enter);
    }
    return false;
  }

  void pivot(std::size_t r, std::size_t c) {
    const T inv = T(1) / t_(r, c);
    for (std::size_t j = 0; j <= cols_; ++j) t_(r, j) *= inv;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r || t_(i, c) == T(0)) continue;
      const T f = t_(i, c);
      for (std::size_t j = 0; j <= cols_; ++j) t_(i, j) -= f * t_(r, j);
    }
    basis_[r] = c;
  }

  bool is_basic(std::size_t j) const {
    for (auto b : basis_)
      if (b == j) return true;
    return false;
  }

  // Pivots zero-level artificials out of the basis where possible and drops
  // rows that are redundant.
  void drive_out_artificials() {
    const T tol = tolerance<T>();
    for (std::size_t i = 0; i < m_;) {
      if (basis_[i] < n_) {
        ++i;
        continue;
      }
      std::optional<std::size_t> col;
      for (std::size_t j = 0; j < n_; ++j)
        if (!is_basic(j) && dcrn::detail::abs_value(T(t_(i, j))) > tol) {
          col = j;
          break;
        }
      if (col) {
        pivot(i, *col);
        ++i;
      } else {
        remove_row(i);
      }
    }
    for (std::size_t j = n_; j < cols_; ++j) allowed_[j] = false;
  }

  void remove_row(std::size_t r) {
    Matrix<T> next(m_ - 1, cols_ + 1);
    std::vector<std::size_t> nb;
    for (std::size_t i = 0, k = 0; i < m_; ++i) {
      if (i == r) continue;
      for (std::size_t j = 0; j <= cols_; ++j) next(k, j) = t_(i, j);
      nb.push_back(basis_[i]);
      ++k;
    }
    t_ = std::move(next);
    basis_ = std::move(nb);
    --m_;
  }

  T objective(const Vec<T>& cost) const {
    T z(0);
    for (std::size_t i = 0; i < m_; ++i) z += cost[basis_[i]] * t_(i, cols_);
    return z;
  }

  Vec<T> solution() const {
    Vec<T> x(n_, T(0));
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) x[basis_[i]] = t_(i, cols_);
    return x;
  }

  std::size_t structural() const { return n_; }
  std::size_t columns() const { return cols_; }
  const std::vector<std::size_t>& basis() const { return basis_; }
  bool unbounded() const { return unbounded_; }

 private:
  std::size_t m_;
  std::size_t n_;
  std::size_t cols_;
  Matrix<T> t_;
  std::vector<std::size_t> basis_;
  std::vector<bool> allowed_;
  bool unbounded_ = false;
};

}  // namespace detail

template <typename T>
Result<T> solve(const Problem<T>& p, std::size_t max_iter = 10000) {
  Result<T> res;
  detail::Tableau<T> tab(p);
  const std::size_t n = p.a.cols();

  Vec<T> phase1(tab.columns(), T(0));
  for (std::size_t j = n; j < tab.columns(); ++j) phase1[j] = T(-1);
  if (!tab.optimize(phase1, max_iter)) return res;
  if (tab.objective(phase1) < -detail::tolerance<T>() * T(100)) {
    res.status = Status::Infeasible;
    return res;
  }
  tab.drive_out_artificials();

  Vec<T> phase2(tab.columns(), T(0));
  for (std::size_t j = 0; j < n; ++j) phase2[j] = p.c[j];
  if (!tab.optimize(phase2, max_iter)) return res;
  if (tab.unbounded()) {
    res.status = Status::Unbounded;
    return res;
  }
  res.status = Status::Optimal;
  res.x = tab.solution();
  res.objective = tab.objective(phase2);
  res.basis = tab.basis();
  return res;
}

/// Exact check that `basis` (structural columns, one per row of a full
/// row-rank `p`) is primal feasible and dual optimal. Returns the exact
/// basic solution when it is.
inline std::optional<Vec<Rational>> verify_optimal_basis(
    const Problem<Rational>& p, const std::vector<std::size_t>& basis) {
  const std::size_t m = p.a.rows();
  const std::size_t n = p.a.cols();
  if (basis.size() != m) return std::nullopt;
  Matrix<Rational> bm(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < m; ++k) {
      if (basis[k] >= n) return std::nullopt;
      bm(i, k) = p.a(i, basis[k]);
    }
  Vec<Rational> xb;
  if (!solve_square(bm, p.b, xb)) return std::nullopt;
  for (const auto& v : xb)
    if (v < 0) return std::nullopt;
  // Duals: B^T y = c_B; reduced costs c_j - a_j^T y <= 0 for a maximum.
  Vec<Rational> cb(m), y;
  for (std::size_t k = 0; k < m; ++k) cb[k] = p.c[basis[k]];
  if (!solve_square(bm.transpose(), cb, y)) return std::nullopt;
  for (std::size_t j = 0; j < n; ++j) {
    Rational d = p.c[j];
    for (std::size_t i = 0; i < m; ++i) d -= p.a(i, j) * y[i];
    if (d > 0) return std::nullopt;
  }
  Vec<Rational> x(n, Rational(0));
  for (std::size_t k = 0; k < m; ++k) x[basis[k]] = xb[k];
  return x;
}

}  // namespace dcrn::lp
