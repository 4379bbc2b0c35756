#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "dcrn/errors.hpp"
#include "dcrn/linalg.hpp"
#include "dcrn/network.hpp"

namespace dcrn {

/// Species subset as a bitmask over declaration indices.
using SpeciesSet = std::uint64_t;

constexpr bool contains(SpeciesSet set, std::size_t species) {
  return (set >> species) & 1u;
}

inline std::vector<std::size_t> members(SpeciesSet set) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; set >> j; ++j)
    if (contains(set, j)) out.push_back(j);
  return out;
}

inline std::vector<std::string> species_names(const ReactionNetwork& net,
                                              SpeciesSet set) {
  std::vector<std::string> out;
  for (auto j : members(set)) out.push_back(net.species_names()[j]);
  return out;
}

inline SpeciesSet full_set(std::size_t n) {
  return n >= 64 ? ~SpeciesSet{0} : (SpeciesSet{1} << n) - 1;
}

struct ReactionGraph {
  struct Edge {
    std::size_t from;
    std::size_t to;
    std::size_t reaction;
  };

  std::vector<Complex> nodes;
  std::vector<Edge> edges;

  std::size_t node_index(const Complex& c) const {
    return static_cast<std::size_t>(
        std::find(nodes.begin(), nodes.end(), c) - nodes.begin());
  }
};

/// Nodes are distinct complexes in order of first appearance (source before
/// target); one edge per reaction in reaction order.
inline ReactionGraph build_reaction_graph(const ReactionNetwork& net) {
  ReactionGraph g;
  auto intern = [&](const Complex& c) {
    auto i = g.node_index(c);
    if (i == g.nodes.size()) g.nodes.push_back(c);
    return i;
  };
  for (std::size_t i = 0; i < net.reaction_count(); ++i) {
    const auto s = intern(net.reaction(i).source);
    const auto t = intern(net.reaction(i).target);
    g.edges.push_back({s, t, i});
  }
  return g;
}

/// Connected components of the underlying undirected graph. Each class is
/// sorted; classes are ordered by their smallest node index.
inline std::vector<std::vector<std::size_t>> linkage_classes(
    const ReactionGraph& g) {
  std::vector<std::size_t> parent(g.nodes.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : g.edges) {
    auto a = find(e.from), b = find(e.to);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::vector<std::size_t>> classes;
  std::vector<int> slot(g.nodes.size(), -1);
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    const auto root = find(v);
    if (slot[root] < 0) {
      slot[root] = static_cast<int>(classes.size());
      classes.emplace_back();
    }
    classes[static_cast<std::size_t>(slot[root])].push_back(v);
  }
  return classes;
}

namespace detail {

inline std::vector<bool> reachable_from(const ReactionGraph& g,
                                        std::size_t start) {
  std::vector<bool> seen(g.nodes.size(), false);
  std::vector<std::size_t> stack{start};
  seen[start] = true;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    for (const auto& e : g.edges)
      if (e.from == v && !seen[e.to]) {
        seen[e.to] = true;
        stack.push_back(e.to);
      }
  }
  return seen;
}

}  // namespace detail

/// Every linkage class strongly connected, i.e. each edge lies on a cycle.
inline bool is_weakly_reversible(const ReactionGraph& g) {
  for (const auto& e : g.edges)
    if (!detail::reachable_from(g, e.to)[e.from]) return false;
  return true;
}

inline bool is_reversible(const ReactionNetwork& net) {
  for (const auto& r : net.reactions()) {
    const bool has_reverse =
        std::any_of(net.reactions().begin(), net.reactions().end(),
                    [&](const Reaction& q) {
                      return q.source == r.target && q.target == r.source;
                    });
    if (!has_reverse) return false;
  }
  return true;
}

inline std::vector<Vec<Rational>> reaction_vectors(const ReactionNetwork& net) {
  std::vector<Vec<Rational>> out;
  for (std::size_t i = 0; i < net.reaction_count(); ++i) {
    const auto v = net.reaction_vector(i);
    out.emplace_back(v.begin(), v.end());
  }
  return out;
}

/// Basis of the stoichiometric subspace: the first maximal independent
/// subset of reaction vectors, in reaction order.
inline std::vector<Vec<Rational>> stoich_subspace_basis(
    const ReactionNetwork& net) {
  const auto vecs = reaction_vectors(net);
  std::vector<Vec<Rational>> basis;
  for (auto i : independent_subset(vecs, net.species_count()))
    basis.push_back(vecs[i]);
  return basis;
}

inline std::size_t stoich_dimension(const ReactionNetwork& net) {
  return stoich_subspace_basis(net).size();
}

inline std::size_t deficiency(const ReactionNetwork& net) {
  const auto g = build_reaction_graph(net);
  const auto m = g.nodes.size();
  const auto l = linkage_classes(g).size();
  const auto s = stoich_dimension(net);
  // Each linkage class with c complexes contributes at most c - 1 to dim S.
  if (m < l + s) throw Error("internal: negative deficiency");
  return m - l - s;
}

struct SemilockingCatalog {
  std::vector<SpeciesSet> semilocking;  // ascending bitmask order
  std::vector<bool> locking;

  bool contains_set(SpeciesSet w) const {
    return std::binary_search(semilocking.begin(), semilocking.end(), w);
  }
  std::size_t size() const { return semilocking.size(); }
};

constexpr std::size_t kMaxEnumerationSpecies = 24;

/// W semilocking: every reaction whose target meets W has a source that
/// meets W.
inline bool is_semilocking(const ReactionNetwork& net, SpeciesSet w) {
  if (w == 0) return false;
  for (const auto& r : net.reactions())
    if ((r.target.support_mask() & w) && !(r.source.support_mask() & w))
      return false;
  return true;
}

/// W locking: every source complex meets W.
inline bool is_locking(const ReactionNetwork& net, SpeciesSet w) {
  if (w == 0) return false;
  for (const auto& r : net.reactions())
    if (!(r.source.support_mask() & w)) return false;
  return true;
}

/// Exhaustive scan over all non-empty species subsets.
inline SemilockingCatalog enumerate_semilocking(const ReactionNetwork& net) {
  const auto n = net.species_count();
  if (n > kMaxEnumerationSpecies)
    throw CapabilityError("semilocking enumeration supports at most " +
                          std::to_string(kMaxEnumerationSpecies) +
                          " species, network has " + std::to_string(n));
  std::vector<std::pair<SpeciesSet, SpeciesSet>> masks;  // (source, target)
  for (const auto& r : net.reactions())
    masks.emplace_back(r.source.support_mask(), r.target.support_mask());

  SemilockingCatalog cat;
  const SpeciesSet end = SpeciesSet{1} << n;
  for (SpeciesSet w = 1; w < end; ++w) {
    bool ok = true;
    bool lock = true;
    for (const auto& [src, tgt] : masks) {
      const bool hits_source = (src & w) != 0;
      if ((tgt & w) && !hits_source) {
        ok = false;
        break;
      }
      lock = lock && hits_source;
    }
    if (!ok) continue;
    cat.semilocking.push_back(w);
    cat.locking.push_back(lock);
  }
  return cat;
}

/// Catalog members that contain no other member.
inline SemilockingCatalog minimal_semilocking(const SemilockingCatalog& cat) {
  SemilockingCatalog out;
  for (std::size_t i = 0; i < cat.size(); ++i) {
    const auto w = cat.semilocking[i];
    const bool minimal = std::none_of(
        cat.semilocking.begin(), cat.semilocking.end(),
        [w](SpeciesSet v) { return v != w && (v & w) == v; });
    if (minimal) {
      out.semilocking.push_back(w);
      out.locking.push_back(cat.locking[i]);
    }
  }
  return out;
}

struct StructureReport {
  std::size_t species = 0;
  std::size_t reactions = 0;
  std::size_t complexes = 0;
  std::vector<std::vector<std::size_t>> linkage_classes;
  bool weakly_reversible = false;
  bool reversible = false;
  std::vector<Vec<Rational>> stoich_basis;
  std::size_t dim_S = 0;
  std::size_t deficiency = 0;
  SemilockingCatalog semilocking;
};

inline StructureReport analyze_structure(const ReactionNetwork& net) {
  StructureReport rep;
  const auto g = build_reaction_graph(net);
  rep.species = net.species_count();
  rep.reactions = net.reaction_count();
  rep.complexes = g.nodes.size();
  rep.linkage_classes = linkage_classes(g);
  rep.weakly_reversible = is_weakly_reversible(g);
  rep.reversible = is_reversible(net);
  rep.stoich_basis = stoich_subspace_basis(net);
  rep.dim_S = rep.stoich_basis.size();
  rep.deficiency = rep.complexes - rep.linkage_classes.size() - rep.dim_S;
  rep.semilocking = enumerate_semilocking(net);
  return rep;
}

}  // namespace dcrn
