#pragma once

// Method-of-steps integration of
//   x'(t) = sum_i k_i [x(t - tau_i)^{y_i} y'_i - x(t)^{y_i} y_i],  x = psi on [-tau_max, 0]
// with fixed-step RK4 and cubic Hermite dense output, the chain-method ODE
// approximation, and trajectory monitors (Lyapunov functional, delayed
// conserved quantities, per-species minima).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dcrn/errors.hpp"
#include "dcrn/geometry.hpp"
#include "dcrn/history.hpp"
#include "dcrn/network.hpp"
#include "dcrn/quadrature.hpp"

namespace dcrn {

struct SolverConfig {
  double step = 0.005;
  double t_end = 60.0;
  int monitor_stride = 20;

  std::size_t steps() const {
    return static_cast<std::size_t>(std::llround(t_end / step));
  }

  void validate(const ReactionNetwork& net) const {
    if (!(step > 0.0) || !std::isfinite(step)) throw ConfigError("step must be positive");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be positive");
    if (monitor_stride < 1) throw ConfigError("monitor stride must be >= 1");
    const double n = t_end / step;
    if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n))
      throw ConfigError("t_end must be an integer multiple of the step");
    if (auto tau = net.min_positive_delay(); tau && step > *tau / 4.0 * (1 + 1e-12))
      throw ConfigError("step " + format_double(step) +
                        " exceeds min delay / 4 = " + format_double(*tau / 4.0));
  }

  static std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
  }
};

struct MonitorSample {
  double t = 0.0;
  Point x;
  double lyapunov = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> conserved;
};

/// Knot states and derivatives on the uniform grid t_k = k h, prefixed by
/// the initial history; evaluates anywhere on [-tau_max, t_last].
class Trajectory {
 public:
  Trajectory(HistoryFunction psi, double step)
      : psi_(std::move(psi)), step_(step) {}

  double step() const { return step_; }
  const HistoryFunction& history() const { return psi_; }
  std::size_t knots() const { return states_.size(); }
  double time(std::size_t k) const { return static_cast<double>(k) * step_; }
  double t_end() const { return time(states_.size() - 1); }
  const std::vector<Point>& states() const { return states_; }
  const std::vector<Point>& derivatives() const { return derivs_; }
  const Point& state(std::size_t k) const { return states_[k]; }

  std::vector<MonitorSample>& monitors() { return monitors_; }
  const std::vector<MonitorSample>& monitors() const { return monitors_; }
  std::vector<std::size_t>& monitor_knots() { return monitor_knots_; }
  const std::vector<std::size_t>& monitor_knots() const { return monitor_knots_; }

  int clamp_events() const { return clamps_; }

  void push_state(Point x) { states_.push_back(std::move(x)); }
  void push_derivative(Point f) { derivs_.push_back(std::move(f)); }
  void set_clamp_events(int c) { clamps_ = c; }

  /// x(t). Within the knot range the cubic Hermite piece through the two
  /// bracketing knots; at or before 0 the history itself.
  Point at(double t) const {
    if (t <= 0.0) return psi_(t);
    const double pos = t / step_;
    const auto last = states_.size() - 1;
    auto k = static_cast<std::size_t>(pos);
    if (k >= last) {
      if (pos > static_cast<double>(last) * (1 + 1e-12) + 1e-12)
        throw NumericError("trajectory evaluated beyond its last knot");
      return states_[last];
    }
    if (k + 1 >= derivs_.size()) {
      // Segment not closed yet: only its left knot is available.
      if (pos - static_cast<double>(k) > 1e-9)
        throw NumericError("trajectory evaluated inside an open segment");
      return states_[k];
    }
    return hermite(k, pos - static_cast<double>(k));
  }

  /// Cubic Hermite on segment k at fraction u in [0, 1].
  Point hermite(std::size_t k, double u) const {
    const auto& x0 = states_[k];
    const auto& x1 = states_[k + 1];
    const auto& f0 = derivs_[k];
    const auto& f1 = derivs_[k + 1];
    const double u2 = u * u, u3 = u2 * u;
    const double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u;
    const double h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
    Point x(x0.size());
    for (std::size_t j = 0; j < x.size(); ++j)
      x[j] = h00 * x0[j] + h10 * step_ * f0[j] + h01 * x1[j] + h11 * step_ * f1[j];
    return x;
  }

  /// int_a^b phi(x(s)) ds, split at 0 and at knots. History part by
  /// doubling composite Simpson (exact for constant histories); each knot
  /// piece by five-point Gauss-Legendre on the cubic interpolant.
  template <typename Phi>
  double integrate(const Phi& phi, double a, double b) const {
    double total = 0.0;
    if (a < 0.0) {
      const double hb = std::min(b, 0.0);
      if (psi_.is_constant()) {
        total += (hb - a) * phi(psi_(0.0));
      } else {
        total += quad::simpson_doubling([&](double s) { return phi(psi_(s)); },
                                        a, hb, 1e-10);
      }
    }
    if (b > 0.0) {
      const std::size_t last_segment = derivs_.size() - 2;
      double lo = std::max(a, 0.0);
      while (lo < b) {
        auto k = static_cast<std::size_t>(std::floor(lo / step_));
        while (time(k + 1) <= lo + 1e-12 * step_) ++k;
        k = std::min(k, last_segment);
        const double seg_end = std::min(b, time(k + 1));
        if (seg_end <= lo) break;
        total += quad::gauss_legendre5(
            [&](double s) { return phi(hermite(k, (s - time(k)) / step_)); },
            lo, seg_end);
        lo = seg_end;
      }
    }
    return total;
  }

 private:
  HistoryFunction psi_;
  double step_;
  std::vector<Point> states_;
  std::vector<Point> derivs_;
  std::vector<MonitorSample> monitors_;
  std::vector<std::size_t> monitor_knots_;
  int clamps_ = 0;
};

namespace detail {

constexpr double kUndershoot = 1e-12;

inline void accept_state(Point& x, int& clamps, double t) {
  for (double& v : x) {
    if (!std::isfinite(v))
      throw NumericError("integration produced a non-finite state at t=" +
                         std::to_string(t));
    if (v < 0.0) {
      if (v < -kUndershoot)
        throw NumericError("state became negative (" + std::to_string(v) +
                           ") at t=" + std::to_string(t) + "; step too large");
      v = 0.0;
      ++clamps;
    }
  }
}

inline std::vector<std::size_t> monitor_grid(std::size_t steps, int stride) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k <= steps; k += static_cast<std::size_t>(stride)) out.push_back(k);
  if (out.back() != steps) out.push_back(steps);
  return out;
}

inline Point axpy(const Point& x, double a, const Point& d) {
  Point out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = x[j] + a * d[j];
  return out;
}

}  // namespace detail

/// Fixed-step RK4 method of steps. Delayed arguments come from the exact
/// history for t - tau_i <= 0 and from the dense output afterwards.
inline Trajectory integrate_dde(const ReactionNetwork& net,
                                const HistoryFunction& psi,
                                const SolverConfig& cfg) {
  cfg.validate(net);
  if (psi.species_count() != net.species_count())
    throw ConfigError("history dimension does not match species count");
  if (psi.tau_max() + 1e-12 < net.tau_max())
    throw ConfigError("history interval shorter than the largest delay");
  const double h = cfg.step;
  const auto steps = cfg.steps();
  Trajectory traj(psi, h);
  traj.push_state(psi(0.0));
  int clamps = 0;

  auto drift = [&](double t, const Point& x) {
    return delayed_drift(net, [&](double s) { return s == 0.0 ? x : traj.at(t - s); });
  };

  for (std::size_t n = 0; n < steps; ++n) {
    const double t = traj.time(n);
    const Point x = traj.state(n);
    const Point k1 = drift(t, x);
    traj.push_derivative(k1);
    const Point k2 = drift(t + 0.5 * h, detail::axpy(x, 0.5 * h, k1));
    const Point k3 = drift(t + 0.5 * h, detail::axpy(x, 0.5 * h, k2));
    const Point k4 = drift(t + h, detail::axpy(x, h, k3));
    Point next(x.size());
    for (std::size_t j = 0; j < x.size(); ++j)
      next[j] = x[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    detail::accept_state(next, clamps, t + h);
    traj.push_state(std::move(next));
  }
  traj.push_derivative(drift(traj.t_end(), traj.state(steps)));
  traj.set_clamp_events(clamps);
  traj.monitor_knots() = detail::monitor_grid(steps, cfg.monitor_stride);
  for (auto k : traj.monitor_knots())
    traj.monitors().push_back({traj.time(k), traj.state(k), std::numeric_limits<double>::quiet_NaN(), {}});
  return traj;
}

/// Integrand of the delayed pseudo-Helmholtz functional for one complex:
/// u (ln u - ln ubar - 1) + ubar with u = x^y, ubar = xbar^y.
inline double helmholtz_term(double log_u, double log_ubar) {
  const double u = std::exp(log_u);
  return u * (log_u - log_ubar - 1.0) + std::exp(log_ubar);
}

namespace detail {

inline double require_positive_log_monomial(std::span<const double> x,
                                            const Complex& y) {
  for (const auto& [s, c] : y.terms())
    if (!(x[s] > 0.0))
      throw NumericError("Lyapunov functional needs a strictly positive window");
  return log_monomial(x, y);
}

inline double helmholtz_point(std::span<const double> x, const Point& xbar) {
  double v = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!(x[j] > 0.0))
      throw NumericError("Lyapunov functional needs a strictly positive window");
    v += x[j] * (std::log(x[j]) - std::log(xbar[j]) - 1.0) + xbar[j];
  }
  return v;
}

}  // namespace detail

/// V of a history segment (the window at t = 0), quadrature to 1e-9.
inline double lyapunov_value(const ReactionNetwork& net,
                             const HistoryFunction& window, const Point& xbar) {
  for (double v : xbar)
    if (!(v > 0.0)) throw NumericError("reference equilibrium must be positive");
  double v = detail::helmholtz_point(window(0.0), xbar);
  for (const auto& r : net.reactions()) {
    if (r.delay == 0.0) continue;
    const double lbar = log_monomial(xbar, r.source);
    auto phi = [&](double s) {
      return helmholtz_term(detail::require_positive_log_monomial(window(s), r.source), lbar);
    };
    const double integral = window.is_constant()
                                ? r.delay * phi(0.0)
                                : quad::adaptive_simpson(phi, -r.delay, 0.0, 1e-9);
    v += r.rate_constant * integral;
  }
  return v;
}

/// V of the trajectory window [t - tau_max, t].
inline double lyapunov_at(const Trajectory& traj, const ReactionNetwork& net,
                          double t, const Point& xbar) {
  double v = detail::helmholtz_point(traj.at(t), xbar);
  for (const auto& r : net.reactions()) {
    if (r.delay == 0.0) continue;
    const double lbar = log_monomial(xbar, r.source);
    v += r.rate_constant *
         traj.integrate(
             [&](const Point& x) {
               return helmholtz_term(detail::require_positive_log_monomial(x, r.source), lbar);
             },
             t - r.delay, t);
  }
  return v;
}

/// C_a(t) = a^T [x(t) + sum_i k_i (int_{t-tau_i}^t x^{y_i}) y_i] for each a.
inline std::vector<double> conserved_at(const Trajectory& traj,
                                        const ReactionNetwork& net,
                                        const std::vector<Point>& basis,
                                        double t) {
  if (basis.empty()) return {};
  Point g = traj.at(t);
  for (const auto& r : net.reactions()) {
    if (r.delay == 0.0 || r.source.is_zero()) continue;
    const double w = r.rate_constant *
                     traj.integrate([&](const Point& x) { return monomial(x, r.source); },
                                    t - r.delay, t);
    for (const auto& [s, c] : r.source.terms()) g[s] += w * c;
  }
  std::vector<double> out;
  for (const auto& a : basis) out.push_back(dot(a, g));
  return out;
}

/// Fills V (when `xbar` is given) and C_a on every monitor sample.
inline void attach_monitors(Trajectory& traj, const ReactionNetwork& net,
                            const std::optional<Point>& xbar,
                            const ConservedBasis& basis) {
  const auto vecs = basis.as_double();
  for (auto& m : traj.monitors()) {
    if (xbar) m.lyapunov = lyapunov_at(traj, net, m.t, *xbar);
    m.conserved = conserved_at(traj, net, vecs, m.t);
  }
}

struct DescentReport {
  double v0 = 0.0;
  double max_jump = 0.0;     // largest V(t_{k+1}) - V(t_k), >= 0
  double at_time = 0.0;      // where it occurred
  double tolerance = 0.0;
  bool pass = true;
};

inline DescentReport check_descent(const Trajectory& traj) {
  DescentReport rep;
  const auto& mon = traj.monitors();
  if (mon.empty() || std::isnan(mon.front().lyapunov))
    throw ConfigError("Lyapunov monitors not populated");
  rep.v0 = mon.front().lyapunov;
  rep.tolerance = 1e-6 * (1.0 + rep.v0);
  for (std::size_t k = 1; k < mon.size(); ++k) {
    const double jump = mon[k].lyapunov - mon[k - 1].lyapunov;
    if (jump > rep.max_jump) {
      rep.max_jump = jump;
      rep.at_time = mon[k].t;
    }
  }
  rep.pass = rep.max_jump <= rep.tolerance;
  return rep;
}

/// max_t |C_a(t) - C_a(0)| per conserved vector over the monitor grid.
inline std::vector<double> conservation_drift(const Trajectory& traj) {
  const auto& mon = traj.monitors();
  if (mon.empty()) return {};
  std::vector<double> drift(mon.front().conserved.size(), 0.0);
  for (const auto& m : mon)
    for (std::size_t a = 0; a < drift.size(); ++a)
      drift[a] = std::max(drift[a], std::abs(m.conserved[a] - mon.front().conserved[a]));
  return drift;
}

/// Evaluates C_a on the monitor grid and reports the drift.
inline std::vector<double> conservation_drift(Trajectory& traj,
                                              const ReactionNetwork& net,
                                              const ConservedBasis& basis) {
  const auto vecs = basis.as_double();
  for (auto& m : traj.monitors()) m.conserved = conserved_at(traj, net, vecs, m.t);
  return conservation_drift(traj);
}

/// Per-species minimum over monitor samples with t >= t_skip.
inline Point min_profile(const Trajectory& traj, double t_skip) {
  if (!(t_skip < traj.t_end())) throw ConfigError("t_skip must be before the horizon");
  Point mins(traj.state(0).size(), std::numeric_limits<double>::infinity());
  for (const auto& m : traj.monitors()) {
    if (m.t < t_skip) continue;
    for (std::size_t j = 0; j < mins.size(); ++j) mins[j] = std::min(mins[j], m.x[j]);
  }
  return mins;
}

/// Sup-norm distance between two trajectories on their common knots.
inline double sup_gap(const Trajectory& a, const Trajectory& b) {
  if (a.step() != b.step()) throw ConfigError("trajectories use different steps");
  const auto k = std::min(a.knots(), b.knots());
  double gap = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < a.state(i).size(); ++j)
      gap = std::max(gap, std::abs(a.state(i)[j] - b.state(i)[j]));
  return gap;
}

// ---------------------------------------------------------------------------
// Chain method: each delayed reaction becomes a chain of N first-order
// stages with rate N / tau_i whose contents v_ij approximate
// k_i ∫ x^{y_i} over consecutive sub-intervals of the delay window.

struct ChainState {
  Point z;
  std::vector<std::vector<double>> v;  // per delayed reaction, N stages
  std::vector<std::size_t> delayed;    // reaction index of each chain
  std::size_t length = 0;

  std::size_t dimension() const { return z.size() + delayed.size() * length; }
};

/// z(0) = psi(0), v_ij(0) = k_i ∫_{-j tau_i/N}^{-(j-1) tau_i/N} psi^{y_i}.
inline ChainState chain_initial_state(const ReactionNetwork& net,
                                      const HistoryFunction& psi,
                                      std::size_t length) {
  if (length < 1) throw ConfigError("chain length must be >= 1");
  ChainState st;
  st.z = psi(0.0);
  st.length = length;
  const double nd = static_cast<double>(length);
  for (std::size_t i = 0; i < net.reaction_count(); ++i) {
    const auto& r = net.reaction(i);
    if (r.delay <= 0.0) continue;
    st.delayed.push_back(i);
    std::vector<double> v(length);
    const double w = r.delay / nd;
    for (std::size_t j = 1; j <= length; ++j) {
      const double lo = -static_cast<double>(j) * w;
      const double hi = -static_cast<double>(j - 1) * w;
      const double integral =
          psi.is_constant()
              ? w * monomial(psi(0.0), r.source)
              : quad::simpson_doubling(
                    [&](double s) { return monomial(psi(s), r.source); }, lo, hi,
                    1e-12, 16, 16);
      v[j - 1] = r.rate_constant * integral;
    }
    st.v.push_back(std::move(v));
  }
  return st;
}

inline ChainState chain_rhs(const ReactionNetwork& net, const ChainState& st) {
  ChainState d = st;
  std::fill(d.z.begin(), d.z.end(), 0.0);
  const double nd = static_cast<double>(st.length);
  std::size_t chain = 0;
  for (std::size_t i = 0; i < net.reaction_count(); ++i) {
    const auto& r = net.reaction(i);
    const double consume = mass_action_rate(st.z, r);
    double produce = consume;
    if (r.delay > 0.0) {
      const double rate = nd / r.delay;
      const auto& v = st.v[chain];
      auto& dv = d.v[chain];
      produce = rate * v.back();
      dv[0] = consume - rate * v[0];
      for (std::size_t j = 1; j < st.length; ++j) dv[j] = rate * (v[j - 1] - v[j]);
      ++chain;
    }
    for (const auto& [s, c] : r.target.terms()) d.z[s] += produce * c;
    for (const auto& [s, c] : r.source.terms()) d.z[s] -= consume * c;
  }
  return d;
}

namespace detail {

inline ChainState chain_axpy(const ChainState& x, double a, const ChainState& d) {
  ChainState out = x;
  for (std::size_t j = 0; j < x.z.size(); ++j) out.z[j] += a * d.z[j];
  for (std::size_t c = 0; c < x.v.size(); ++c)
    for (std::size_t j = 0; j < x.length; ++j) out.v[c][j] += a * d.v[c][j];
  return out;
}

}  // namespace detail

/// RK4 on the augmented chain ODE; returns the z component as a trajectory
/// on the same grid as `integrate_dde`.
inline Trajectory chain_approximation(const ReactionNetwork& net,
                                      const HistoryFunction& psi,
                                      std::size_t length,
                                      const SolverConfig& cfg,
                                      ChainState* final_state = nullptr) {
  cfg.validate(net);
  if (psi.species_count() != net.species_count())
    throw ConfigError("history dimension does not match species count");
  const double h = cfg.step;
  const auto steps = cfg.steps();
  Trajectory traj(psi, h);
  ChainState st = chain_initial_state(net, psi, length);
  traj.push_state(st.z);
  int clamps = 0;
  for (std::size_t n = 0; n < steps; ++n) {
    const ChainState k1 = chain_rhs(net, st);
    traj.push_derivative(k1.z);
    const ChainState k2 = chain_rhs(net, detail::chain_axpy(st, 0.5 * h, k1));
    const ChainState k3 = chain_rhs(net, detail::chain_axpy(st, 0.5 * h, k2));
    const ChainState k4 = chain_rhs(net, detail::chain_axpy(st, h, k3));
    ChainState next = st;
    for (std::size_t j = 0; j < st.z.size(); ++j)
      next.z[j] = st.z[j] + h / 6.0 * (k1.z[j] + 2.0 * k2.z[j] + 2.0 * k3.z[j] + k4.z[j]);
    for (std::size_t c = 0; c < st.v.size(); ++c)
      for (std::size_t j = 0; j < st.length; ++j) {
        next.v[c][j] = st.v[c][j] + h / 6.0 * (k1.v[c][j] + 2.0 * k2.v[c][j] +
                                               2.0 * k3.v[c][j] + k4.v[c][j]);
      }
    detail::accept_state(next.z, clamps, traj.time(n + 1));
    for (auto& v : next.v) detail::accept_state(v, clamps, traj.time(n + 1));
    st = std::move(next);
    traj.push_state(st.z);
  }
  traj.push_derivative(chain_rhs(net, st).z);
  traj.set_clamp_events(clamps);
  traj.monitor_knots() = detail::monitor_grid(steps, cfg.monitor_stride);
  for (auto k : traj.monitor_knots())
    traj.monitors().push_back({traj.time(k), traj.state(k), std::numeric_limits<double>::quiet_NaN(), {}});
  if (final_state) *final_state = st;
  return traj;
}

// ---------------------------------------------------------------------------

/// CSV with header t,x1..xn,V,Ca_1..Ca_p, one row per monitor sample,
/// 17 significant digits.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const auto n = traj.state(0).size();
  const auto p = traj.monitors().empty() ? 0 : traj.monitors().front().conserved.size();
  out << "t";
  for (std::size_t j = 1; j <= n; ++j) out << ",x" << j;
  out << ",V";
  for (std::size_t a = 1; a <= p; ++a) out << ",Ca_" << a;
  out << "\n";
  char buf[40];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
  };
  for (const auto& m : traj.monitors()) {
    put(m.t);
    for (double v : m.x) {
      out << ",";
      put(v);
    }
    out << ",";
    put(m.lyapunov);
    for (double c : m.conserved) {
      out << ",";
      put(c);
    }
    out << "\n";
  }
}

}  // namespace dcrn
