#pragma once

// Delayed compatibility classes and boundary faces.
//
// The conserved quantities of the delayed dynamics are
//   C_a(x_t) = a^T [x(t) + sum_i k_i (int_{t-tau_i}^t x(s)^{y_i} ds) y_i]
// for a orthogonal to the stoichiometric subspace S. A boundary face
// L_W (W-species identically zero) is classified by the dimension of
// S ∩ {v : v_W = 0} and by whether some function in L_W attains the class
// values of the initial history.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "dcrn/errors.hpp"
#include "dcrn/history.hpp"
#include "dcrn/linalg.hpp"
#include "dcrn/lp.hpp"
#include "dcrn/network.hpp"
#include "dcrn/quadrature.hpp"
#include "dcrn/structure.hpp"

namespace dcrn {

/// Exact basis of S^⊥, each vector primitive integral.
struct ConservedBasis {
  std::vector<Vec<Rational>> vectors;

  std::size_t size() const { return vectors.size(); }
  bool empty() const { return vectors.empty(); }

  std::vector<Point> as_double() const {
    std::vector<Point> out;
    for (const auto& v : vectors) out.push_back(to_double(v));
    return out;
  }
};

inline ConservedBasis conserved_basis(const ReactionNetwork& net) {
  const auto rows = reaction_vectors(net);
  const auto m = Matrix<Rational>::from_rows(rows, net.species_count());
  ConservedBasis cb;
  for (auto& v : nullspace(m)) cb.vectors.push_back(primitive_integer(v));
  return cb;
}

/// int_{-tau}^0 psi(s)^y ds; exact for constant histories.
inline double history_monomial_integral(const HistoryFunction& psi,
                                        const Complex& y, double tau,
                                        double tol = 1e-10) {
  if (tau == 0.0) return 0.0;
  if (psi.is_constant()) return tau * monomial(psi(0.0), y);
  return quad::adaptive_simpson(
      [&](double s) { return monomial(psi(s), y); }, -tau, 0.0, tol);
}

/// g(psi) = psi(0) + sum_i k_i (int_{-tau_i}^0 psi(s)^{y_i} ds) y_i.
inline Point g_functional(const HistoryFunction& psi,
                          const ReactionNetwork& net) {
  Point g = psi(0.0);
  for (const auto& r : net.reactions()) {
    if (r.delay == 0.0 || r.source.is_zero()) continue;
    const double w =
        r.rate_constant * history_monomial_integral(psi, r.source, r.delay);
    for (const auto& [s, c] : r.source.terms()) g[s] += w * c;
  }
  return g;
}

struct ClassSpec {
  ConservedBasis basis;
  std::vector<double> values;
};

inline ClassSpec class_values(const HistoryFunction& psi,
                              const ReactionNetwork& net,
                              const ConservedBasis& basis) {
  ClassSpec spec{basis, {}};
  if (basis.empty()) return spec;
  const Point g = g_functional(psi, net);
  for (const auto& a : basis.as_double()) spec.values.push_back(dot(a, g));
  return spec;
}

inline ClassSpec class_values(const HistoryFunction& psi,
                              const ReactionNetwork& net) {
  return class_values(psi, net, conserved_basis(net));
}

/// dim(S ∩ {v : v_j = 0 for X_j in W}), exact.
inline std::size_t zw_dimension(const ReactionNetwork& net, SpeciesSet w) {
  const auto basis = stoich_subspace_basis(net);
  const auto d = basis.size();
  if (d == 0) return 0;
  const auto rows = members(w);
  Matrix<Rational> restricted(rows.size(), d);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < d; ++k) restricted(i, k) = basis[k][rows[i]];
  return d - rank(restricted);
}

struct FaceWitness {
  Point state;                 // x(0) on the face: zero on W
  std::vector<double> weights; // per reaction k_i ∫ x^{y_i}; 0 if unused
};

struct FaceFeasibility {
  bool nonempty = false;
  double margin = 0.0;          // optimal normalized margin
  bool exact_verified = false;  // witness re-derived in exact arithmetic
  std::optional<FaceWitness> witness;
  std::string detail;
};

constexpr double kFaceMargin = 1e-9;

namespace detail {

/// Reactions whose source avoids W and whose delay is positive: their
/// integral terms survive on L_W.
inline std::vector<std::size_t> surviving_delayed(const ReactionNetwork& net,
                                                  SpeciesSet w) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < net.reaction_count(); ++i) {
    const auto& r = net.reaction(i);
    if (r.delay > 0.0 && !r.source.is_zero() && !(r.source.support_mask() & w))
      out.push_back(i);
  }
  return out;
}

}  // namespace detail

/// Decides whether L_W meets the delayed class described by `spec`:
/// find q >= eps off W (q = 0 on W) and theta_i >= eps for surviving
/// delayed reactions with a^T (q + sum theta_i y_i) = c_a for every
/// conserved a. Solved as a margin maximization; the optimal basis is
/// re-verified in exact rationals.
inline FaceFeasibility face_nonempty(const ReactionNetwork& net, SpeciesSet w,
                                     const ClassSpec& spec,
                                     double eps = kFaceMargin) {
  const auto n = net.species_count();
  const auto off = members(full_set(n) & ~w);
  const auto delayed = detail::surviving_delayed(net, w);
  FaceFeasibility out;

  if (spec.basis.empty()) {
    FaceWitness wit{Point(n, 0.0), std::vector<double>(net.reaction_count(), 0.0)};
    for (auto j : off) wit.state[j] = 1.0;
    for (auto i : delayed) wit.weights[i] = 1.0;
    out.nonempty = true;
    out.margin = 1.0;
    out.exact_verified = true;
    out.witness = wit;
    out.detail = "no conservation constraints";
    return out;
  }

  const std::size_t m1 = off.size();
  const std::size_t m2 = delayed.size();
  const std::size_t vars = m1 + m2;

  double scale = 1.0;
  for (double c : spec.values) scale = std::max(scale, std::abs(c));

  // Equality system M z = c / scale over z = (q_off, theta).
  const auto& basis = spec.basis.vectors;
  std::vector<Vec<Rational>> rows;
  Vec<Rational> rhs;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    Vec<Rational> row(vars, Rational(0));
    for (std::size_t u = 0; u < m1; ++u) row[u] = basis[k][off[u]];
    for (std::size_t v = 0; v < m2; ++v) {
      Rational ay = 0;
      for (const auto& [s, c] : net.reaction(delayed[v]).source.terms())
        ay += basis[k][s] * c;
      row[m1 + v] = ay;
    }
    rows.push_back(std::move(row));
    rhs.push_back(Rational(spec.values[k] / scale));
  }

  // Consistency: every left-null combination of M must annihilate the rhs.
  {
    Matrix<Rational> mt(vars, rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k)
      for (std::size_t u = 0; u < vars; ++u) mt(u, k) = rows[k][u];
    for (const auto& lam : nullspace(mt)) {
      Rational combo = 0;
      double l1 = 0.0;
      for (std::size_t k = 0; k < lam.size(); ++k) {
        combo += lam[k] * rhs[k];
        l1 += std::abs(lam[k].convert_to<double>());
      }
      if (std::abs(combo.convert_to<double>()) > 1e-9 * l1) {
        out.nonempty = false;
        out.exact_verified = true;
        out.detail = "class values unattainable on the face";
        return out;
      }
    }
  }
  const auto keep = independent_subset(rows, vars);

  // Standard form over (s, theta', t+, t-, slack): q = s + t, theta = theta' + t.
  const std::size_t cols = vars + 3;
  const std::size_t m = keep.size() + 1;
  lp::Problem<Rational> exact{Matrix<Rational>(m, cols), Vec<Rational>(m),
                              Vec<Rational>(cols, Rational(0))};
  for (std::size_t r = 0; r < keep.size(); ++r) {
    Rational rowsum = 0;
    for (std::size_t u = 0; u < vars; ++u) {
      exact.a(r, u) = rows[keep[r]][u];
      rowsum += rows[keep[r]][u];
    }
    exact.a(r, vars) = rowsum;
    exact.a(r, vars + 1) = -rowsum;
    exact.b[r] = rhs[keep[r]];
  }
  exact.a(m - 1, vars) = 1;
  exact.a(m - 1, vars + 1) = -1;
  exact.a(m - 1, vars + 2) = 1;
  exact.b[m - 1] = 1;
  exact.c[vars] = 1;
  exact.c[vars + 1] = -1;

  lp::Problem<double> approx{Matrix<double>(m, cols), Vec<double>(m),
                             Vec<double>(cols)};
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < cols; ++j)
      approx.a(i, j) = exact.a(i, j).convert_to<double>();
    approx.b[i] = exact.b[i].convert_to<double>();
  }
  for (std::size_t j = 0; j < cols; ++j) approx.c[j] = exact.c[j].convert_to<double>();

  std::optional<Vec<Rational>> sol;
  const auto fres = lp::solve(approx);
  if (fres.status == lp::Status::Optimal)
    sol = lp::verify_optimal_basis(exact, fres.basis);
  if (!sol) {
    const auto eres = lp::solve(exact, 100000);
    if (eres.status != lp::Status::Optimal)
      throw NumericError("face LP failed for W (status " +
                         std::to_string(static_cast<int>(eres.status)) + ")");
    sol = eres.x;
  }

  const Rational t = (*sol)[vars] - (*sol)[vars + 1];
  out.margin = t.convert_to<double>();
  out.exact_verified = true;
  out.nonempty = out.margin >= eps;
  if (!out.nonempty) {
    out.detail = "no strictly positive point of the face attains the class";
    return out;
  }
  FaceWitness wit{Point(n, 0.0), std::vector<double>(net.reaction_count(), 0.0)};
  for (std::size_t u = 0; u < m1; ++u)
    wit.state[off[u]] = (((*sol)[u] + t) * Rational(scale)).convert_to<double>();
  for (std::size_t v = 0; v < m2; ++v)
    wit.weights[delayed[v]] =
        (((*sol)[m1 + v] + t) * Rational(scale)).convert_to<double>();
  out.witness = wit;
  out.detail = "feasible";
  return out;
}

enum class FaceTag { Empty, Facet, Vertex, Other };

inline const char* to_string(FaceTag t) {
  switch (t) {
    case FaceTag::Empty: return "Empty";
    case FaceTag::Facet: return "Facet";
    case FaceTag::Vertex: return "Vertex";
    case FaceTag::Other: return "Other";
  }
  return "?";
}

struct FaceClass {
  FaceTag tag = FaceTag::Other;
  std::size_t zw_dim = 0;
  FaceFeasibility feasibility;
};

inline FaceClass classify_face(const ReactionNetwork& net, SpeciesSet w,
                               const ClassSpec& spec) {
  FaceClass fc;
  fc.zw_dim = zw_dimension(net, w);
  fc.feasibility = face_nonempty(net, w, spec);
  const auto dim_s = stoich_dimension(net);
  if (!fc.feasibility.nonempty) fc.tag = FaceTag::Empty;
  else if (dim_s >= 1 && fc.zw_dim == dim_s - 1) fc.tag = FaceTag::Facet;
  else if (fc.zw_dim == 0) fc.tag = FaceTag::Vertex;
  else fc.tag = FaceTag::Other;
  return fc;
}

}  // namespace dcrn
