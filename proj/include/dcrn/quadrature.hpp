#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <string>

#include "dcrn/errors.hpp"

namespace dcrn::quad {

namespace detail {

template <typename F>
double adaptive_step(const F& f, double a, double b, double fa, double fm,
                     double fb, double whole, double tol, int depth,
                     bool& converged) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth <= 0) {
    converged = false;
    return left + right + delta / 15.0;
  }
  return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1,
                       converged) +
         adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1,
                       converged);
}

}  // namespace detail

/// Adaptive Simpson quadrature to absolute tolerance `tol`. Throws
/// NumericError when the recursion limit is reached without convergence.
template <typename F>
double adaptive_simpson(const F& f, double a, double b, double tol = 1e-10,
                        int max_depth = 40) {
  if (a == b) return 0.0;
  // Start from a few panels so that integrands vanishing at the three
  // initial nodes are not mistaken for zero.
  constexpr int kPanels = 8;
  const double h = (b - a) / kPanels;
  bool converged = true;
  double total = 0.0;
  for (int p = 0; p < kPanels; ++p) {
    const double lo = a + p * h;
    const double hi = p + 1 == kPanels ? b : a + (p + 1) * h;
    const double flo = f(lo);
    const double fhi = f(hi);
    const double fm = f(0.5 * (lo + hi));
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
    total += detail::adaptive_step(f, lo, hi, flo, fm, fhi, whole,
                                   tol / kPanels, max_depth, converged);
  }
  if (!converged)
    throw NumericError("adaptive Simpson did not converge on [" +
                       std::to_string(a) + ", " + std::to_string(b) + "]");
  return total;
}

/// Composite Simpson with `panels` (even) subintervals.
template <typename F>
double composite_simpson(const F& f, double a, double b, int panels) {
  if (a == b) return 0.0;
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// Composite Simpson starting at `panels` subintervals and doubling until
/// two successive estimates agree to `tol`.
template <typename F>
double simpson_doubling(const F& f, double a, double b, double tol = 1e-9,
                        int panels = 256, int max_doublings = 10) {
  if (a == b) return 0.0;
  double prev = composite_simpson(f, a, b, panels);
  for (int k = 0; k < max_doublings; ++k) {
    panels *= 2;
    const double next = composite_simpson(f, a, b, panels);
    if (std::abs(next - prev) <= tol) return next;
    prev = next;
  }
  throw NumericError("composite Simpson did not reach tolerance on [" +
                     std::to_string(a) + ", " + std::to_string(b) + "]");
}

/// Five-point Gauss-Legendre rule on [a, b]; exact for degree <= 9.
template <typename F>
double gauss_legendre5(const F& f, double a, double b) {
  static constexpr std::array<double, 5> x = {
      0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
      0.9061798459386640};
  static constexpr std::array<double, 5> w = {
      0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
      0.2369268850561891, 0.2369268850561891};
  const double c = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < 5; ++i) s += w[i] * f(c + r * x[i]);
  return s * r;
}

}  // namespace dcrn::quad
