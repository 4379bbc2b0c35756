#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "dcrn/errors.hpp"
#include "dcrn/expression.hpp"
#include "dcrn/network.hpp"

namespace dcrn {

/// Initial data psi on [-tau_max, 0], strictly positive in every coordinate.
class HistoryFunction {
 public:
  struct Constant {
    Point value;
  };
  struct Sampled {
    std::vector<double> grid;          // increasing, covers [-tau_max, 0]
    std::vector<Point> values;         // one point per grid node
    int order = 3;                     // 1: linear, 3: monotone cubic
  };
  struct Expression {
    std::vector<ExpressionAst> exprs;  // one per species
  };
  using Form = std::variant<Constant, Sampled, Expression>;

  static constexpr int kValidationSamples = 1001;

  HistoryFunction(Form form, std::size_t species, double tau_max)
      : form_(std::move(form)), species_(species), tau_max_(tau_max) {
    if (!(tau_max >= 0.0)) throw ConfigError("tau_max must be non-negative");
    prepare();
    validate();
  }

  static HistoryFunction constant(Point c, double tau_max) {
    const std::size_t n = c.size();
    return HistoryFunction(Constant{std::move(c)}, n, tau_max);
  }

  static HistoryFunction expression(const std::vector<std::string>& exprs,
                                    double tau_max) {
    Expression e;
    for (const auto& s : exprs) e.exprs.push_back(ExpressionAst::parse(s));
    return HistoryFunction(std::move(e), exprs.size(), tau_max);
  }

  static HistoryFunction sampled(std::vector<double> grid,
                                 std::vector<Point> values, int order,
                                 double tau_max) {
    const std::size_t n = values.empty() ? 0 : values.front().size();
    return HistoryFunction(Sampled{std::move(grid), std::move(values), order},
                           n, tau_max);
  }

  std::size_t species_count() const { return species_; }
  double tau_max() const { return tau_max_; }
  const Form& form() const { return form_; }

  bool is_constant() const { return std::holds_alternative<Constant>(form_); }

  /// psi(s) for s in [-tau_max, 0]; outside the interval is an error.
  Point operator()(double s) const {
    const double slack = 1e-12 * std::max(1.0, tau_max_);
    if (s > slack || s < -tau_max_ - slack)
      throw ConfigError("history evaluated outside [-tau_max, 0] at s=" +
                        std::to_string(s));
    s = std::clamp(s, -tau_max_, 0.0);
    return std::visit([&](const auto& f) { return eval(f, s); }, form_);
  }

  /// Same history re-declared on a different interval (the caller keeps it
  /// within the form's domain).
  HistoryFunction with_tau_max(double tau_max) const {
    return HistoryFunction(form_, species_, tau_max);
  }

  /// Minimum coordinate over the validation sample set.
  double sampled_minimum() const {
    double m = std::numeric_limits<double>::infinity();
    for (double s : validation_points())
      for (double v : (*this)(s)) m = std::min(m, v);
    return m;
  }

 private:
  Point eval(const Constant& c, double) const { return c.value; }

  Point eval(const Expression& e, double s) const {
    Point out(e.exprs.size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = e.exprs[j].evaluate(s);
    return out;
  }

  Point eval(const Sampled& smp, double s) const {
    const auto& g = smp.grid;
    auto it = std::upper_bound(g.begin(), g.end(), s);
    std::size_t i = it == g.begin() ? 0 : static_cast<std::size_t>(it - g.begin()) - 1;
    if (i >= g.size() - 1) i = g.size() - 2;
    const double h = g[i + 1] - g[i];
    const double u = (s - g[i]) / h;
    Point out(species_);
    for (std::size_t j = 0; j < species_; ++j) {
      const double y0 = smp.values[i][j];
      const double y1 = smp.values[i + 1][j];
      if (smp.order == 1) {
        out[j] = y0 + u * (y1 - y0);
        continue;
      }
      const double m0 = slopes_[i][j];
      const double m1 = slopes_[i + 1][j];
      const double u2 = u * u;
      const double u3 = u2 * u;
      out[j] = (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * h * m0 +
               (-2 * u3 + 3 * u2) * y1 + (u3 - u2) * h * m1;
    }
    return out;
  }

  // Fritsch-Carlson slopes: the interpolant is monotone on every piece
  // where the data are, so it stays within the bracketing samples.
  void prepare() {
    auto* smp = std::get_if<Sampled>(&form_);
    if (!smp) return;
    const auto& g = smp->grid;
    if (g.size() < 2 || smp->values.size() != g.size())
      throw ConfigError("sampled history needs >= 2 nodes and one value per node");
    for (std::size_t i = 0; i + 1 < g.size(); ++i)
      if (!(g[i + 1] > g[i])) throw ConfigError("history grid must be increasing");
    if (smp->order != 1 && smp->order != 3)
      throw ConfigError("history interpolation order must be 1 or 3");
    for (const auto& v : smp->values)
      if (v.size() != species_) throw ConfigError("history sample has wrong dimension");
    const double slack = 1e-12 * std::max(1.0, tau_max_);
    if (g.front() > -tau_max_ + slack || g.back() < -slack)
      throw ConfigError("history grid must cover [-tau_max, 0]");

    const std::size_t m = g.size();
    slopes_.assign(m, Point(species_, 0.0));
    for (std::size_t j = 0; j < species_; ++j) {
      std::vector<double> d(m - 1);
      for (std::size_t i = 0; i + 1 < m; ++i)
        d[i] = (smp->values[i + 1][j] - smp->values[i][j]) / (g[i + 1] - g[i]);
      slopes_[0][j] = d[0];
      slopes_[m - 1][j] = d[m - 2];
      for (std::size_t i = 1; i + 1 < m; ++i) {
        if (d[i - 1] * d[i] <= 0.0) {
          slopes_[i][j] = 0.0;
        } else {
          const double w1 = 2 * (g[i + 1] - g[i]) + (g[i] - g[i - 1]);
          const double w2 = (g[i + 1] - g[i]) + 2 * (g[i] - g[i - 1]);
          slopes_[i][j] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
      }
      // Endpoint slopes limited to keep the first/last pieces monotone.
      for (std::size_t e : {std::size_t{0}, m - 1}) {
        const double de = e == 0 ? d[0] : d[m - 2];
        if (slopes_[e][j] * de <= 0.0) slopes_[e][j] = 0.0;
        else if (std::abs(slopes_[e][j]) > 3 * std::abs(de)) slopes_[e][j] = 3 * de;
      }
    }
  }

  std::vector<double> validation_points() const {
    std::vector<double> pts;
    if (tau_max_ == 0.0) {
      pts.push_back(0.0);
    } else {
      for (int i = 0; i < kValidationSamples; ++i)
        pts.push_back(-tau_max_ + tau_max_ * i / (kValidationSamples - 1));
    }
    if (const auto* smp = std::get_if<Sampled>(&form_))
      for (double s : smp->grid)
        if (s >= -tau_max_ && s <= 0.0) pts.push_back(s);
    return pts;
  }

  void validate() const {
    if (species_ == 0) throw ConfigError("history has no coordinates");
    if (const auto* c = std::get_if<Constant>(&form_))
      if (c->value.size() != species_)
        throw ConfigError("constant history has wrong dimension");
    if (const auto* e = std::get_if<Expression>(&form_))
      if (e->exprs.size() != species_)
        throw ConfigError("expression history needs one expression per species");
    for (double s : validation_points()) {
      for (double v : (*this)(s)) {
        if (!std::isfinite(v))
          throw ConfigError("history is not finite at s=" + std::to_string(s));
        if (!(v > 0.0))
          throw ConfigError("history is not strictly positive at s=" +
                            std::to_string(s));
      }
    }
  }

  Form form_;
  std::size_t species_;
  double tau_max_;
  std::vector<Point> slopes_;
};

/// Reads the history JSON object; `species` and `tau_max` come from the
/// network the history will drive.
inline HistoryFunction history_from_json(const nlohmann::json& j,
                                         std::size_t species, double tau_max) {
  try {
    const std::string type = j.at("type").get<std::string>();
    HistoryFunction::Form form;
    if (type == "constant") {
      form = HistoryFunction::Constant{j.at("value").get<Point>()};
    } else if (type == "sampled") {
      HistoryFunction::Sampled smp;
      smp.grid = j.at("grid").get<std::vector<double>>();
      smp.values = j.at("values").get<std::vector<Point>>();
      smp.order = j.value("order", 3);
      form = std::move(smp);
    } else if (type == "expr") {
      HistoryFunction::Expression e;
      for (const auto& s : j.at("exprs").get<std::vector<std::string>>())
        e.exprs.push_back(ExpressionAst::parse(s));
      form = std::move(e);
    } else {
      throw ParseError("unknown history type '" + type + "'");
    }
    return HistoryFunction(std::move(form), species, tau_max);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("history JSON: ") + e.what());
  }
}

inline nlohmann::json history_to_json(const HistoryFunction& h) {
  return std::visit(
      [](const auto& f) -> nlohmann::json {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, HistoryFunction::Constant>) {
          return {{"type", "constant"}, {"value", f.value}};
        } else if constexpr (std::is_same_v<F, HistoryFunction::Sampled>) {
          return {{"type", "sampled"}, {"grid", f.grid}, {"values", f.values},
                  {"order", f.order}};
        } else {
          std::vector<std::string> src;
          for (const auto& e : f.exprs) src.push_back(e.source());
          return {{"type", "expr"}, {"exprs", src}};
        }
      },
      h.form());
}

inline HistoryFunction load_history(const std::string& path,
                                    std::size_t species, double tau_max) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open history file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("history JSON: ") + e.what());
  }
  return history_from_json(j, species, tau_max);
}

}  // namespace dcrn
