#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dcrn/equilibrium.hpp"
#include "dcrn/geometry.hpp"
#include "dcrn/history.hpp"
#include "dcrn/network.hpp"
#include "dcrn/structure.hpp"

namespace dcrn {

enum class Verdict { Persistent, Inconclusive };
enum class Route { FaceClassification, TwoDimCorollary };

inline const char* to_string(Verdict v) {
  return v == Verdict::Persistent ? "Persistent" : "Inconclusive";
}
inline const char* to_string(Route r) {
  return r == Route::FaceClassification ? "FaceClassification" : "TwoDimCorollary";
}

struct FaceEntry {
  SpeciesSet w = 0;
  bool locking = false;
  FaceClass face;
};

/// Persistence verdict with the evidence it rests on. The criteria are
/// sufficient only, so the negative outcome is Inconclusive, never
/// "not persistent".
struct PersistenceCertificate {
  Verdict verdict = Verdict::Inconclusive;
  std::vector<Route> routes;  // every route that applies
  std::size_t dim_S = 0;
  std::size_t deficiency = 0;
  bool weakly_reversible = false;
  bool complex_balanced = false;
  double cb_residual = std::numeric_limits<double>::quiet_NaN();
  std::optional<EquilibriumResult> equilibrium;  // global complex-balanced point
  std::vector<FaceEntry> per_w;
  std::vector<std::string> notes;

  bool has_route(Route r) const {
    return std::find(routes.begin(), routes.end(), r) != routes.end();
  }
};

inline std::string format_set(const ReactionNetwork& net, SpeciesSet w) {
  std::string s = "{";
  for (const auto& name : species_names(net, w)) s += (s.size() > 1 ? "," : "") + name;
  return s + "}";
}

inline PersistenceCertificate certify(const ReactionNetwork& net,
                                      const HistoryFunction& psi) {
  PersistenceCertificate cert;
  const auto g = build_reaction_graph(net);
  cert.weakly_reversible = is_weakly_reversible(g);
  cert.dim_S = stoich_dimension(net);
  cert.deficiency = deficiency(net);

  try {
    cert.equilibrium = solve_complex_balanced(net);
    cert.complex_balanced = true;
    cert.cb_residual = cert.equilibrium->cb_residual;
  } catch (const PreconditionError& e) {
    cert.notes.push_back(std::string("complex balance not established: ") + e.what());
  }

  const auto catalog = enumerate_semilocking(net);
  const auto spec = class_values(psi, net);
  bool faces_ok = true;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    FaceEntry e{catalog.semilocking[i], catalog.locking[i],
                classify_face(net, catalog.semilocking[i], spec)};
    if (e.face.tag == FaceTag::Other) {
      faces_ok = false;
      cert.notes.push_back("W=" + format_set(net, e.w) + " has dim Z_W = " +
                           std::to_string(e.face.zw_dim) +
                           ", neither facet nor vertex");
    }
    if (e.face.tag == FaceTag::Empty)
      cert.notes.push_back("W=" + format_set(net, e.w) +
                           ": face does not meet the class of the history");
    cert.per_w.push_back(std::move(e));
  }

  if (cert.complex_balanced) {
    if (faces_ok) cert.routes.push_back(Route::FaceClassification);
    if (cert.dim_S == 2) cert.routes.push_back(Route::TwoDimCorollary);
  }
  cert.verdict = cert.routes.empty() ? Verdict::Inconclusive : Verdict::Persistent;
  return cert;
}

struct StabilityStatement {
  Point equilibrium;
  EquilibriumResult detail;
  std::string claim;
  std::vector<Route> basis;
};

inline StabilityStatement stability_statement(const ReactionNetwork& net,
                                              const HistoryFunction& psi,
                                              const PersistenceCertificate& cert) {
  if (cert.verdict != Verdict::Persistent || !cert.equilibrium)
    throw PreconditionError("stability statement requires a Persistent certificate");
  StabilityStatement st;
  st.detail = equilibrium_in_class(net, psi, *cert.equilibrium);
  if (!(st.detail.cb_residual <= kComplexBalanceTolerance *
                                     std::max(1.0, max_abs(st.detail.point))))
    throw PreconditionError("in-class equilibrium fails complex balance");
  st.equilibrium = st.detail.point;
  st.basis = cert.routes;
  st.claim =
      "globally asymptotically stable at the positive equilibrium relative to "
      "the positive delayed compatibility class of the history";
  return st;
}

struct LemmaReport {
  std::size_t checked = 0;               // semilocking sets with zw_dim = 0
  std::vector<SpeciesSet> violations;    // zw_dim = 0 but not locking
  bool consistent() const { return violations.empty(); }
};

/// Every semilocking W with dim Z_W = 0 must be locking.
inline LemmaReport lemma_checks(const ReactionNetwork& net) {
  LemmaReport rep;
  const auto cat = enumerate_semilocking(net);
  for (std::size_t i = 0; i < cat.size(); ++i) {
    if (zw_dimension(net, cat.semilocking[i]) != 0) continue;
    ++rep.checked;
    if (!cat.locking[i]) rep.violations.push_back(cat.semilocking[i]);
  }
  return rep;
}

}  // namespace dcrn
