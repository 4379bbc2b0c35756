#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dcrn/errors.hpp"
#include "dcrn/geometry.hpp"
#include "dcrn/history.hpp"
#include "dcrn/linalg.hpp"
#include "dcrn/network.hpp"
#include "dcrn/structure.hpp"

namespace dcrn {

/// A[z', z] accumulates k_i over reactions z -> z'; A[z, z] the negative
/// outflow. Complex balance at x is A * (x^{y_z})_z = 0.
struct KineticLaplacian {
  Eigen::MatrixXd matrix;
  ReactionGraph graph;
};

inline KineticLaplacian kinetic_laplacian(const ReactionNetwork& net) {
  KineticLaplacian lap{Eigen::MatrixXd(), build_reaction_graph(net)};
  const auto m = static_cast<Eigen::Index>(lap.graph.nodes.size());
  lap.matrix = Eigen::MatrixXd::Zero(m, m);
  for (const auto& e : lap.graph.edges) {
    const double k = net.reaction(e.reaction).rate_constant;
    lap.matrix(static_cast<Eigen::Index>(e.to), static_cast<Eigen::Index>(e.from)) += k;
    lap.matrix(static_cast<Eigen::Index>(e.from), static_cast<Eigen::Index>(e.from)) -= k;
  }
  return lap;
}

struct EquilibriumResult {
  Point point;
  double cb_residual = 0.0;
  double drift_residual = 0.0;
  int newton_iterations = 0;
};

/// Thrown when the computed point fails complex balance: the rate
/// constants do not admit a complex-balanced equilibrium.
class NotComplexBalanced : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// max_z |inflow(z) - outflow(z)| at x.
inline double complex_balance_residual(const ReactionNetwork& net,
                                       std::span<const double> x) {
  const auto g = build_reaction_graph(net);
  std::vector<double> net_flow(g.nodes.size(), 0.0);
  for (const auto& e : g.edges) {
    const double f = mass_action_rate(x, net.reaction(e.reaction));
    net_flow[e.to] += f;
    net_flow[e.from] -= f;
  }
  return max_abs(net_flow);
}

/// Per linkage class, the exact kernel of the restricted Laplacian scaled
/// to max entry 1; requires one-dimensional kernels (weak reversibility).
inline std::vector<double> laplacian_kernel(const ReactionNetwork& net,
                                            const ReactionGraph& g) {
  std::vector<double> psi(g.nodes.size(), 0.0);
  for (const auto& cls : linkage_classes(g)) {
    const auto size = cls.size();
    Matrix<Rational> a(size, size);
    auto local = [&](std::size_t node) {
      return static_cast<std::size_t>(std::find(cls.begin(), cls.end(), node) -
                                      cls.begin());
    };
    for (const auto& e : g.edges) {
      const auto from = local(e.from);
      if (from == size) continue;
      const Rational k(net.reaction(e.reaction).rate_constant);
      a(local(e.to), from) += k;
      a(from, from) -= k;
    }
    const auto ker = nullspace(a);
    if (ker.size() != 1)
      throw PreconditionError("linkage class kernel has dimension " +
                              std::to_string(ker.size()) +
                              "; network is not weakly reversible");
    Rational top = 0;
    for (const auto& v : ker[0])
      if (detail::abs_value(v) > top) top = detail::abs_value(v);
    for (std::size_t i = 0; i < size; ++i) {
      const double v = (ker[0][i] / top).convert_to<double>();
      if (!(v > 0.0))
        throw PreconditionError("linkage class kernel is not strictly positive");
      psi[cls[i]] = v;
    }
  }
  return psi;
}

namespace detail {

inline Eigen::MatrixXd conserved_matrix(const ConservedBasis& basis,
                                        std::size_t n) {
  Eigen::MatrixXd b(static_cast<Eigen::Index>(n),
                    static_cast<Eigen::Index>(basis.size()));
  const auto vecs = basis.as_double();
  for (std::size_t k = 0; k < vecs.size(); ++k)
    for (std::size_t j = 0; j < n; ++j)
      b(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = vecs[k][j];
  return b;
}

}  // namespace detail

constexpr double kComplexBalanceTolerance = 1e-10;

/// Positive complex-balanced equilibrium via the Laplacian kernel and the
/// log-linear system y_z^T ln x - ln lambda_{L(z)} = ln psi*_z. The returned
/// point has ln x orthogonal to S^⊥.
inline EquilibriumResult solve_complex_balanced(const ReactionNetwork& net) {
  const auto g = build_reaction_graph(net);
  if (!is_weakly_reversible(g))
    throw PreconditionError(
        "network is not weakly reversible; complex-balanced solve unsupported");
  const auto psi = laplacian_kernel(net, g);
  const auto classes = linkage_classes(g);
  std::vector<std::size_t> class_of(g.nodes.size());
  for (std::size_t l = 0; l < classes.size(); ++l)
    for (auto z : classes[l]) class_of[z] = l;

  const auto n = static_cast<Eigen::Index>(net.species_count());
  const auto m = static_cast<Eigen::Index>(g.nodes.size());
  const auto nl = static_cast<Eigen::Index>(classes.size());
  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(m, n + nl);
  Eigen::VectorXd rhs(m);
  for (Eigen::Index z = 0; z < m; ++z) {
    for (const auto& [s, c] : g.nodes[static_cast<std::size_t>(z)].terms())
      sys(z, static_cast<Eigen::Index>(s)) = c;
    sys(z, n + static_cast<Eigen::Index>(class_of[static_cast<std::size_t>(z)])) = -1.0;
    rhs(z) = std::log(psi[static_cast<std::size_t>(z)]);
  }
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(sys);
  Eigen::VectorXd sol = cod.solve(rhs);
  // One refinement pass on the log residual.
  sol -= cod.solve(sys * sol - rhs);

  Eigen::VectorXd lnx = sol.head(n);
  const auto basis = conserved_basis(net);
  if (!basis.empty()) {
    const Eigen::MatrixXd b = detail::conserved_matrix(basis, net.species_count());
    lnx -= b * (b.transpose() * b).ldlt().solve(b.transpose() * lnx);
  }

  EquilibriumResult res;
  res.point.resize(net.species_count());
  for (Eigen::Index j = 0; j < n; ++j) res.point[static_cast<std::size_t>(j)] = std::exp(lnx(j));
  res.cb_residual = complex_balance_residual(net, res.point);
  res.drift_residual = max_abs(mass_action_drift(net, res.point));

  double flux = 1.0;
  for (const auto& r : net.reactions())
    flux = std::max(flux, mass_action_rate(res.point, r));
  if (!(res.cb_residual <= kComplexBalanceTolerance * flux))
    throw NotComplexBalanced(
        "not complex balanced for these rate constants (residual " +
        std::to_string(res.cb_residual) + ")");
  return res;
}

/// Unique positive equilibrium in the delayed class of psi: x = exp(ln xbar +
/// B u) with a^T [x + sum_i k_i tau_i x^{y_i} y_i] = c_a(psi), by damped
/// Newton on u.
inline EquilibriumResult equilibrium_in_class(const ReactionNetwork& net,
                                              const HistoryFunction& psi,
                                              const EquilibriumResult& global,
                                              int max_iter = 200) {
  const auto basis = conserved_basis(net);
  if (basis.empty()) return global;
  const auto spec = class_values(psi, net, basis);
  const auto n = net.species_count();
  const Eigen::MatrixXd b = detail::conserved_matrix(basis, n);
  const auto p = b.cols();
  Eigen::VectorXd target(p);
  for (Eigen::Index k = 0; k < p; ++k) target(k) = spec.values[static_cast<std::size_t>(k)];

  Eigen::VectorXd lnbar(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) lnbar(static_cast<Eigen::Index>(j)) = std::log(global.point[j]);

  auto state = [&](const Eigen::VectorXd& u) {
    const Eigen::VectorXd lx = lnbar + b * u;
    Point x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = std::exp(lx(static_cast<Eigen::Index>(j)));
    return x;
  };
  auto residual = [&](const Point& x) {
    Eigen::VectorXd g(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) g(static_cast<Eigen::Index>(j)) = x[j];
    for (const auto& r : net.reactions()) {
      if (r.delay == 0.0) continue;
      const double w = r.rate_constant * r.delay * monomial(x, r.source);
      for (const auto& [s, c] : r.source.terms()) g(static_cast<Eigen::Index>(s)) += w * c;
    }
    return Eigen::VectorXd(b.transpose() * g - target);
  };

  Eigen::VectorXd u = Eigen::VectorXd::Zero(p);
  Point x = state(u);
  Eigen::VectorXd f = residual(x);
  int it = 0;
  for (; f.lpNorm<Eigen::Infinity>() > 1e-10; ++it) {
    if (it >= max_iter) {
      std::string last;
      for (double v : x) last += " " + std::to_string(v);
      throw NumericError("in-class equilibrium Newton did not converge; last iterate" + last);
    }
    // J = B^T [diag(x) + sum k tau x^y y y^T] B, symmetric positive definite.
    Eigen::MatrixXd inner = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) inner(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = x[j];
    for (const auto& r : net.reactions()) {
      if (r.delay == 0.0) continue;
      const double w = r.rate_constant * r.delay * monomial(x, r.source);
      const auto y = r.source.dense(n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          inner(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += w * y[i] * y[j];
    }
    const Eigen::MatrixXd jac = b.transpose() * inner * b;
    const Eigen::VectorXd step = jac.ldlt().solve(f);
    double lambda = 1.0;
    Eigen::VectorXd u_next = u - step;
    Point x_next = state(u_next);
    Eigen::VectorXd f_next = residual(x_next);
    for (int halving = 0; halving < 30 &&
                          !(f_next.lpNorm<Eigen::Infinity>() < f.lpNorm<Eigen::Infinity>());
         ++halving) {
      lambda *= 0.5;
      u_next = u - lambda * step;
      x_next = state(u_next);
      f_next = residual(x_next);
    }
    u = u_next;
    x = x_next;
    f = f_next;
  }

  EquilibriumResult res;
  res.point = x;
  res.cb_residual = complex_balance_residual(net, x);
  res.drift_residual = max_abs(mass_action_drift(net, x));
  res.newton_iterations = it;
  return res;
}

inline EquilibriumResult equilibrium_in_class(const ReactionNetwork& net,
                                              const HistoryFunction& psi) {
  return equilibrium_in_class(net, psi, solve_complex_balanced(net));
}

}  // namespace dcrn
