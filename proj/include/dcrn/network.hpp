#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dcrn/errors.hpp"

namespace dcrn {

using Point = std::vector<double>;

struct SpeciesId {
  std::size_t index = 0;
  std::string name;

  friend bool operator==(const SpeciesId&, const SpeciesId&) = default;
};

/// Non-negative integer combination of species. Zero coefficients are never
/// stored; the empty complex is the zero complex.
class Complex {
 public:
  using Term = std::pair<std::size_t, int>;

  Complex() = default;

  /// Accumulates repeated species; drops zero totals.
  explicit Complex(const std::vector<Term>& terms) {
    std::map<std::size_t, int> acc;
    for (const auto& [species, coeff] : terms) {
      if (coeff < 0) throw ParseError("negative stoichiometric coefficient");
      acc[species] += coeff;
    }
    for (const auto& [species, coeff] : acc)
      if (coeff > 0) terms_.emplace_back(species, coeff);
  }

  static Complex from_dense(const std::vector<int>& coeffs) {
    std::vector<Term> terms;
    for (std::size_t j = 0; j < coeffs.size(); ++j)
      if (coeffs[j] != 0) terms.emplace_back(j, coeffs[j]);
    return Complex(terms);
  }

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  int coefficient(std::size_t species) const {
    for (const auto& [s, c] : terms_)
      if (s == species) return c;
    return 0;
  }

  std::vector<int> dense(std::size_t n) const {
    std::vector<int> v(n, 0);
    for (const auto& [s, c] : terms_) v[s] = c;
    return v;
  }

  /// Bitmask of supp(y); callers guarantee species indices < 64.
  std::uint64_t support_mask() const {
    std::uint64_t m = 0;
    for (const auto& [s, c] : terms_) m |= std::uint64_t{1} << s;
    return m;
  }

  int order() const {
    int total = 0;
    for (const auto& t : terms_) total += t.second;
    return total;
  }

  friend bool operator==(const Complex&, const Complex&) = default;
  friend auto operator<=>(const Complex&, const Complex&) = default;

 private:
  std::vector<Term> terms_;  // sorted by species index
};

struct Reaction {
  Complex source;
  Complex target;
  double rate_constant = 1.0;
  double delay = 0.0;

  friend bool operator==(const Reaction&, const Reaction&) = default;
};

/// x^y with the convention 0^0 = 1.
inline double monomial(std::span<const double> x, const Complex& y) {
  double v = 1.0;
  for (const auto& [s, c] : y.terms()) {
    const double xs = x[s];
    switch (c) {
      case 1: v *= xs; break;
      case 2: v *= xs * xs; break;
      case 3: v *= xs * xs * xs; break;
      default: v *= std::pow(xs, c);
    }
  }
  return v;
}

/// ln(x^y) = sum_j y_j ln x_j for strictly positive x.
inline double log_monomial(std::span<const double> x, const Complex& y) {
  double v = 0.0;
  for (const auto& [s, c] : y.terms()) v += c * std::log(x[s]);
  return v;
}

/// Mass-action rate k * x^y of one reaction.
inline double mass_action_rate(std::span<const double> x, const Reaction& r) {
  return r.rate_constant * monomial(x, r.source);
}

/// Static model: species in declaration order and reactions in file order.
class ReactionNetwork {
 public:
  ReactionNetwork() = default;

  ReactionNetwork(std::vector<std::string> species,
                  std::vector<Reaction> reactions)
      : species_(std::move(species)), reactions_(std::move(reactions)) {
    validate();
  }

  std::size_t species_count() const { return species_.size(); }
  std::size_t reaction_count() const { return reactions_.size(); }
  const std::vector<std::string>& species_names() const { return species_; }
  const std::vector<Reaction>& reactions() const { return reactions_; }
  const Reaction& reaction(std::size_t i) const { return reactions_[i]; }

  SpeciesId species(std::size_t index) const { return {index, species_[index]}; }

  std::optional<std::size_t> find_species(const std::string& name) const {
    auto it = std::find(species_.begin(), species_.end(), name);
    if (it == species_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - species_.begin());
  }

  double tau_max() const {
    double t = 0.0;
    for (const auto& r : reactions_) t = std::max(t, r.delay);
    return t;
  }

  /// Smallest strictly positive delay, if any reaction is delayed.
  std::optional<double> min_positive_delay() const {
    std::optional<double> t;
    for (const auto& r : reactions_)
      if (r.delay > 0.0 && (!t || r.delay < *t)) t = r.delay;
    return t;
  }

  bool has_delays() const { return min_positive_delay().has_value(); }

  /// Reaction vector y' - y as dense integers.
  std::vector<int> reaction_vector(std::size_t i) const {
    auto t = reactions_[i].target.dense(species_count());
    const auto s = reactions_[i].source.dense(species_count());
    for (std::size_t j = 0; j < t.size(); ++j) t[j] -= s[j];
    return t;
  }

  ReactionNetwork with_delays(const std::vector<double>& delays) const {
    if (delays.size() != reactions_.size())
      throw ConfigError("expected " + std::to_string(reactions_.size()) +
                        " delays, got " + std::to_string(delays.size()));
    auto copy = reactions_;
    for (std::size_t i = 0; i < copy.size(); ++i) copy[i].delay = delays[i];
    return ReactionNetwork(species_, std::move(copy));
  }

  ReactionNetwork with_rate_constants(const std::vector<double>& k) const {
    if (k.size() != reactions_.size())
      throw ConfigError("expected " + std::to_string(reactions_.size()) +
                        " rate constants, got " + std::to_string(k.size()));
    auto copy = reactions_;
    for (std::size_t i = 0; i < copy.size(); ++i) copy[i].rate_constant = k[i];
    return ReactionNetwork(species_, std::move(copy));
  }

  ReactionNetwork without_delays() const {
    return with_delays(std::vector<double>(reactions_.size(), 0.0));
  }

  friend bool operator==(const ReactionNetwork&,
                         const ReactionNetwork&) = default;

 private:
  void validate() const {
    if (species_.empty()) throw ParseError("network has no species");
    for (std::size_t i = 0; i < species_.size(); ++i)
      for (std::size_t j = i + 1; j < species_.size(); ++j)
        if (species_[i] == species_[j])
          throw ParseError("duplicate species '" + species_[i] + "'");
    if (reactions_.empty()) throw ParseError("network has no reactions");
    std::vector<bool> seen(species_.size(), false);
    for (const auto& r : reactions_) {
      if (r.source == r.target)
        throw ParseError("reaction source equals target");
      if (!(r.rate_constant > 0.0) || !std::isfinite(r.rate_constant))
        throw ParseError("rate constant must be positive");
      if (!(r.delay >= 0.0) || !std::isfinite(r.delay))
        throw ParseError("delay must be non-negative");
      for (const auto* c : {&r.source, &r.target})
        for (const auto& [s, coeff] : c->terms()) {
          if (s >= species_.size())
            throw ParseError("species index out of range");
          seen[s] = true;
        }
    }
    for (std::size_t j = 0; j < species_.size(); ++j)
      if (!seen[j])
        throw ParseError("species '" + species_[j] +
                         "' does not appear in any reaction");
  }

  std::vector<std::string> species_;
  std::vector<Reaction> reactions_;
};

/// Undelayed mass-action drift sum_i k_i x^{y_i} (y'_i - y_i).
inline Point mass_action_drift(const ReactionNetwork& net,
                               std::span<const double> x) {
  Point dx(net.species_count(), 0.0);
  for (const auto& r : net.reactions()) {
    const double rate = mass_action_rate(x, r);
    for (const auto& [s, c] : r.target.terms()) dx[s] += rate * c;
    for (const auto& [s, c] : r.source.terms()) dx[s] -= rate * c;
  }
  return dx;
}

/// Delayed drift sum_i k_i [x(t - tau_i)^{y_i} y'_i - x(t)^{y_i} y_i].
/// `lookup(s)` returns x(t - s) for s in [0, tau_max]; it is called with
/// s = 0 once and with each positive delay.
template <typename Lookup>
Point delayed_drift(const ReactionNetwork& net, const Lookup& lookup) {
  const Point now = lookup(0.0);
  Point dx(net.species_count(), 0.0);
  for (const auto& r : net.reactions()) {
    const double consume = mass_action_rate(now, r);
    const double produce =
        r.delay > 0.0 ? mass_action_rate(lookup(r.delay), r) : consume;
    for (const auto& [s, c] : r.target.terms()) dx[s] += produce * c;
    for (const auto& [s, c] : r.source.terms()) dx[s] -= consume * c;
  }
  return dx;
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace dcrn
