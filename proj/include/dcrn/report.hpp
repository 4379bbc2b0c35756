#pragma once

// JSON views of analysis results. Field names follow the published report
// schema consumed by downstream tooling.

#include <cmath>
#include <limits>
#include <string>

#include "json.hpp"

#include "dcrn/certificate.hpp"
#include "dcrn/equilibrium.hpp"
#include "dcrn/parser.hpp"
#include "dcrn/structure.hpp"

namespace dcrn {

using nlohmann::json;

inline json rational_json(const Rational& r) {
  if (boost::multiprecision::denominator(r) == 1) {
    const auto num = boost::multiprecision::numerator(r);
    if (num >= std::numeric_limits<long long>::min() &&
        num <= std::numeric_limits<long long>::max())
      return num.convert_to<long long>();
  }
  return r.str();
}

inline json number_or_null(double v) {
  return std::isfinite(v) ? json(v) : json(nullptr);
}

inline json to_json(const ReactionNetwork& net, const StructureReport& rep) {
  json classes = json::array();
  const auto g = build_reaction_graph(net);
  for (const auto& cls : rep.linkage_classes) {
    json c = json::array();
    for (auto z : cls) c.push_back(format_complex(net, g.nodes[z]));
    classes.push_back(c);
  }
  json basis = json::array();
  for (const auto& v : rep.stoich_basis) {
    json jv = json::array();
    for (const auto& x : v) jv.push_back(rational_json(x));
    basis.push_back(jv);
  }
  json sl = json::array();
  for (std::size_t i = 0; i < rep.semilocking.size(); ++i)
    sl.push_back({{"W", species_names(net, rep.semilocking.semilocking[i])},
                  {"locking", static_cast<bool>(rep.semilocking.locking[i])}});
  return {{"species", net.species_names()},
          {"reactions", rep.reactions},
          {"complexes", rep.complexes},
          {"linkage_classes", classes},
          {"weakly_reversible", rep.weakly_reversible},
          {"reversible", rep.reversible},
          {"stoich_basis", basis},
          {"dim_S", rep.dim_S},
          {"deficiency", rep.deficiency},
          {"semilocking", sl}};
}

inline json to_json(const EquilibriumResult& eq) {
  return {{"point", eq.point},
          {"cb_residual", number_or_null(eq.cb_residual)},
          {"drift_residual", number_or_null(eq.drift_residual)},
          {"newton_iterations", eq.newton_iterations}};
}

inline json to_json(const ReactionNetwork& net, const PersistenceCertificate& cert) {
  json sl = json::array();
  for (const auto& e : cert.per_w) {
    json entry = {{"W", species_names(net, e.w)},
                  {"locking", e.locking},
                  {"face", to_string(e.face.tag)},
                  {"zw_dim", e.face.zw_dim},
                  {"margin", e.face.feasibility.margin},
                  {"exact_verified", e.face.feasibility.exact_verified}};
    if (e.face.feasibility.witness)
      entry["witness"] = {{"state", e.face.feasibility.witness->state},
                          {"weights", e.face.feasibility.witness->weights}};
    sl.push_back(entry);
  }
  json routes = json::array();
  for (auto r : cert.routes) routes.push_back(to_string(r));
  json out = {{"verdict", to_string(cert.verdict)},
              {"route", cert.routes.empty() ? json(nullptr) : json(to_string(cert.routes.front()))},
              {"routes", routes},
              {"dim_S", cert.dim_S},
              {"deficiency", cert.deficiency},
              {"weakly_reversible", cert.weakly_reversible},
              {"complex_balanced", cert.complex_balanced},
              {"cb_residual", number_or_null(cert.cb_residual)},
              {"semilocking", sl},
              {"notes", cert.notes}};
  if (cert.equilibrium) out["equilibrium"] = to_json(*cert.equilibrium);
  return out;
}

inline json to_json(const StabilityStatement& st) {
  json routes = json::array();
  for (auto r : st.basis) routes.push_back(to_string(r));
  return {{"equilibrium", st.equilibrium},
          {"cb_residual", st.detail.cb_residual},
          {"drift_residual", st.detail.drift_residual},
          {"claim", st.claim},
          {"certificate_routes", routes}};
}

}  // namespace dcrn
