#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "dcrn/dcrn.hpp"

namespace fixtures {

using dcrn::Point;

inline dcrn::ReactionNetwork example1() {
  return dcrn::parse_network(
      "2 X1 -> 3 X1 + X2 ; k=1 ; tau=1\n"
      "3 X1 + X2 -> X1 + 2 X2 ; k=1 ; tau=2\n"
      "X1 + 2 X2 -> 2 X1 ; k=2 ; tau=1\n");
}

inline dcrn::ReactionNetwork example2() {
  return dcrn::parse_network(
      "2 X1 <-> X1 + X2 ; k=1,1 ; tau=1,2\n"
      "X1 + X2 <-> X2 + X3 ; k=1,1 ; tau=3,4\n");
}

// dim S = 3, W = {A, D} locking with zw_dim 1: neither facet nor vertex.
inline dcrn::ReactionNetwork other_face_network() {
  return dcrn::parse_network(
      "species A B C D\n"
      "B + D <-> A ; k=1,1\n"
      "D <-> A ; k=1,1\n"
      "A + D <-> A + C ; k=1,1\n");
}

inline dcrn::SpeciesSet set_of(const dcrn::ReactionNetwork& net,
                               std::initializer_list<const char*> names) {
  dcrn::SpeciesSet w = 0;
  for (const char* n : names) w |= dcrn::SpeciesSet{1} << net.find_species(n).value();
  return w;
}

// Cycle balance of example 1: k1 x1^2 = k2 x1^3 x2 = k3 x1 x2^2 with
// k = (1,1,2) gives x1 x2 = 1 and x1 = 2 x2^2, so x1^3 = 2.
inline Point example1_equilibrium() { return {std::cbrt(2.0), 1.0 / std::cbrt(2.0)}; }

// Example 2 in-class equilibrium for psi = (2,3,1), tau = (1,2,3,4):
// 3c + 20c^2 = 98.
inline double example2_cstar() { return (-3.0 + std::sqrt(7849.0)) / 40.0; }

// Plain RK4 on the undelayed mass-action ODE.
inline std::vector<Point> ode_rk4(const dcrn::ReactionNetwork& net, Point x,
                                  double h, std::size_t steps) {
  std::vector<Point> out{x};
  auto f = [&](const Point& z) { return dcrn::mass_action_drift(net, z); };
  auto add = [](const Point& a, double s, const Point& b) {
    Point c = a;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += s * b[i];
    return c;
  };
  for (std::size_t n = 0; n < steps; ++n) {
    const auto k1 = f(x);
    const auto k2 = f(add(x, h / 2, k1));
    const auto k3 = f(add(x, h / 2, k2));
    const auto k4 = f(add(x, h, k3));
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    out.push_back(x);
  }
  return out;
}

// Independent method of steps: explicit midpoint rule on a grid that divides
// every delay, delayed midpoints by linear interpolation. Second order.
inline Point dde_midpoint(const dcrn::ReactionNetwork& net,
                          const dcrn::HistoryFunction& psi, double h, double t_end) {
  const auto steps = static_cast<long>(std::llround(t_end / h));
  std::vector<Point> xs{psi(0.0)};
  // Value at time index j/2 (half-step resolution).
  auto at_half = [&](long j2) -> Point {
    if (j2 <= 0) return psi(0.5 * static_cast<double>(j2) * h);
    if (j2 % 2 == 0) return xs[static_cast<std::size_t>(j2 / 2)];
    const auto& a = xs[static_cast<std::size_t>(j2 / 2)];
    const auto& b = xs[static_cast<std::size_t>(j2 / 2 + 1)];
    Point m(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) m[i] = 0.5 * (a[i] + b[i]);
    return m;
  };
  auto rhs = [&](const Point& x, long j2) {
    Point d(x.size(), 0.0);
    for (const auto& r : net.reactions()) {
      const long lag = std::lround(r.delay / h);
      const Point xd = lag == 0 ? x : at_half(j2 - 2 * lag);
      const double produce = dcrn::mass_action_rate(xd, r);
      const double consume = dcrn::mass_action_rate(x, r);
      for (const auto& [s, c] : r.target.terms()) d[s] += produce * c;
      for (const auto& [s, c] : r.source.terms()) d[s] -= consume * c;
    }
    return d;
  };
  for (long n = 0; n < steps; ++n) {
    const Point x = xs.back();
    const Point k1 = rhs(x, 2 * n);
    Point mid = x;
    for (std::size_t i = 0; i < x.size(); ++i) mid[i] += 0.5 * h * k1[i];
    const Point k2 = rhs(mid, 2 * n + 1);
    Point next = x;
    for (std::size_t i = 0; i < x.size(); ++i) next[i] += h * k2[i];
    xs.push_back(next);
  }
  return xs.back();
}

// Random small networks. Complexes have coefficients in {0,1,2}; every
// species occurs somewhere. `reversible` adds each reverse reaction.
struct RandomNetworks {
  std::mt19937_64 rng;
  explicit RandomNetworks(std::uint64_t seed) : rng(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

  dcrn::Complex complex(std::size_t n, bool allow_zero) {
    while (true) {
      std::vector<int> c(n);
      for (auto& v : c) v = uniform(0, 3) == 0 ? uniform(1, 2) : 0;
      if (uniform(0, 2) == 0) c[static_cast<std::size_t>(uniform(0, static_cast<int>(n) - 1))] = 1;
      auto z = dcrn::Complex::from_dense(c);
      if (allow_zero || !z.is_zero()) return z;
    }
  }

  dcrn::ReactionNetwork network(std::size_t n, std::size_t r, bool reversible,
                                bool delays, bool allow_zero = false) {
    std::vector<std::string> names;
    for (std::size_t j = 0; j < n; ++j) names.push_back("S" + std::to_string(j + 1));
    while (true) {
      std::vector<dcrn::Reaction> rs;
      for (std::size_t i = 0; i < r; ++i) {
        auto a = complex(n, allow_zero);
        auto b = complex(n, allow_zero);
        if (a == b) continue;
        const double tau = delays ? 0.25 * uniform(0, 8) : 0.0;
        rs.push_back({a, b, real(0.5, 2.0), tau});
        if (reversible) rs.push_back({b, a, real(0.5, 2.0), delays ? 0.25 * uniform(0, 8) : 0.0});
      }
      if (rs.empty()) continue;
      try {
        return dcrn::ReactionNetwork(names, rs);
      } catch (const dcrn::ParseError&) {
        // some species unused or duplicate structure; draw again
      }
    }
  }

  // Weakly reversible but generally not reversible: a directed cycle over
  // m distinct complexes, optionally plus a second cycle.
  dcrn::ReactionNetwork weakly_reversible(std::size_t n) {
    std::vector<std::string> names;
    for (std::size_t j = 0; j < n; ++j) names.push_back("S" + std::to_string(j + 1));
    while (true) {
      std::vector<dcrn::Reaction> rs;
      const int cycles = uniform(1, 2);
      for (int c = 0; c < cycles; ++c) {
        const auto m = static_cast<std::size_t>(uniform(2, 4));
        std::vector<dcrn::Complex> zs;
        while (zs.size() < m) {
          auto z = complex(n, false);
          if (std::find(zs.begin(), zs.end(), z) == zs.end()) zs.push_back(z);
        }
        for (std::size_t i = 0; i < m; ++i)
          rs.push_back({zs[i], zs[(i + 1) % m], real(0.5, 2.0), 0.25 * uniform(0, 8)});
      }
      try {
        return dcrn::ReactionNetwork(names, rs);
      } catch (const dcrn::ParseError&) {
      }
    }
  }
};

inline double max_diff(const Point& a, const Point& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace fixtures
