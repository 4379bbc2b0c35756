#include <gtest/gtest.h>

#include <Eigen/SVD>

#include "fixtures.hpp"

using namespace dcrn;

namespace {

constexpr int kInstances = 200;
constexpr std::uint64_t kSeed = 20240611;

std::size_t random_size(fixtures::RandomNetworks& gen) {
  return static_cast<std::size_t>(gen.uniform(2, 4));
}

Point positive_point(fixtures::RandomNetworks& gen, std::size_t n) {
  Point x(n);
  for (auto& v : x) v = gen.real(0.5, 2.0);
  return x;
}

Matrix<Rational> columns(const std::vector<Vec<Rational>>& rows, const std::vector<std::size_t>& cols) {
  Matrix<Rational> m(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) m(i, j) = rows[i][cols[j]];
  return m;
}

// All subsets of {0..p-1} with exactly k members, in lexicographic order.
std::vector<std::vector<std::size_t>> subsets(std::size_t p, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  for (std::uint32_t m = 0; m < (1u << p); ++m) {
    if (static_cast<std::size_t>(std::popcount(m)) != k) continue;
    std::vector<std::size_t> s;
    for (std::size_t j = 0; j < p; ++j)
      if (m >> j & 1u) s.push_back(j);
    out.push_back(s);
  }
  return out;
}

// Strict feasibility of {x > 0, A x = c} decided by enumerating the
// vertices and extreme rays of {x >= 0, A x = c} in exact arithmetic: a
// strictly positive point exists iff some vertex exists and the supports of
// vertices and rays together cover every coordinate.
bool strictly_feasible(std::vector<Vec<Rational>> a, Vec<Rational> c, std::size_t p) {
  if (p == 0) {
    for (const auto& v : c)
      if (v != 0) return false;
    return true;
  }
  // drop dependent rows, checking consistency against the augmented system
  std::vector<Vec<Rational>> aug;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto row = a[i];
    row.push_back(c[i]);
    aug.push_back(row);
  }
  const auto keep = independent_subset(a, p);
  if (rank(Matrix<Rational>::from_rows(aug, p + 1)) != keep.size()) return false;
  std::vector<Vec<Rational>> rows;
  Vec<Rational> rhs;
  for (auto i : keep) {
    rows.push_back(a[i]);
    rhs.push_back(c[i]);
  }
  const std::size_t r = rows.size();

  bool any_vertex = false;
  std::vector<bool> covered(p, false);
  if (r == 0) {
    any_vertex = true;  // the origin
  } else {
    for (const auto& s : subsets(p, r)) {
      Vec<Rational> x;
      if (!solve_square(columns(rows, s), rhs, x)) continue;
      if (std::any_of(x.begin(), x.end(), [](const Rational& v) { return v < 0; })) continue;
      any_vertex = true;
      for (std::size_t j = 0; j < r; ++j)
        if (x[j] > 0) covered[s[j]] = true;
    }
  }
  if (!any_vertex) return false;
  for (std::size_t k = 1; k <= std::min(p, r + 1); ++k) {
    for (const auto& s : subsets(p, k)) {
      const auto ns = r == 0 ? std::vector<Vec<Rational>>{Vec<Rational>(k, Rational(1))}
                             : nullspace(columns(rows, s));
      if (ns.size() != 1) continue;
      const auto& v = ns[0];
      const bool pos = std::all_of(v.begin(), v.end(), [](const Rational& q) { return q > 0; });
      const bool neg = std::all_of(v.begin(), v.end(), [](const Rational& q) { return q < 0; });
      if (!pos && !neg) continue;
      for (auto j : s) covered[j] = true;
    }
  }
  return std::all_of(covered.begin(), covered.end(), [](bool b) { return b; });
}

}  // namespace

TEST(Properties, SemilockingUnionClosureAndLocking) {
  fixtures::RandomNetworks gen(kSeed);
  for (int it = 0; it < kInstances; ++it) {
    const auto net = gen.network(random_size(gen), static_cast<std::size_t>(gen.uniform(1, 4)),
                                 gen.uniform(0, 1) == 1, true);
    const auto cat = enumerate_semilocking(net);
    const std::set<SpeciesSet> members(cat.semilocking.begin(), cat.semilocking.end());
    for (auto a : cat.semilocking)
      for (auto b : cat.semilocking) EXPECT_TRUE(members.count(a | b)) << format_network(net);
    for (std::size_t i = 0; i < cat.size(); ++i) {
      EXPECT_TRUE(is_semilocking(net, cat.semilocking[i]));
      if (cat.locking[i]) EXPECT_TRUE(is_locking(net, cat.semilocking[i]));
    }
    // every source is non-empty here, so the full set is semilocking
    EXPECT_TRUE(members.count(full_set(net.species_count()))) << format_network(net);
    // the catalog is exhaustive
    for (SpeciesSet w = 1; w <= full_set(net.species_count()); ++w)
      EXPECT_EQ(is_semilocking(net, w), members.count(w) == 1);
  }
}

TEST(Properties, LockingImpliesSemilockingIncludingInflows) {
  fixtures::RandomNetworks gen(kSeed + 1);
  for (int it = 0; it < kInstances; ++it) {
    const auto net = gen.network(random_size(gen), 3, false, false, true);
    for (SpeciesSet w = 1; w <= full_set(net.species_count()); ++w)
      if (is_locking(net, w)) EXPECT_TRUE(is_semilocking(net, w));
  }
}

TEST(Properties, DeficiencyNonNegative) {
  fixtures::RandomNetworks gen(kSeed + 2);
  for (int it = 0; it < kInstances; ++it) {
    const auto net = gen.network(random_size(gen), static_cast<std::size_t>(gen.uniform(1, 5)),
                                 gen.uniform(0, 1) == 1, false, true);
    const auto g = build_reaction_graph(net);
    const long delta = static_cast<long>(g.nodes.size()) -
                       static_cast<long>(linkage_classes(g).size()) -
                       static_cast<long>(stoich_dimension(net));
    EXPECT_GE(delta, 0);
    EXPECT_EQ(static_cast<long>(deficiency(net)), delta);
  }
}

TEST(Properties, ExactRankMatchesFloatingRank) {
  std::mt19937_64 rng(kSeed + 3);
  std::uniform_int_distribution<int> coef(0, 10), count(2, 5);
  for (int it = 0; it < kInstances; ++it) {
    const auto n = static_cast<std::size_t>(count(rng));
    const auto r = static_cast<std::size_t>(count(rng));
    std::vector<std::string> names;
    for (std::size_t j = 0; j < n; ++j) names.push_back("S" + std::to_string(j));
    std::vector<Reaction> rs;
    while (rs.size() < r) {
      std::vector<int> a(n), b(n);
      for (auto& v : a) v = coef(rng) > 6 ? coef(rng) : 0;
      for (auto& v : b) v = coef(rng) > 6 ? coef(rng) : 0;
      if (a == b) continue;
      rs.push_back({Complex::from_dense(a), Complex::from_dense(b), 1.0, 0.0});
    }
    // make every species appear
    std::vector<int> all(n, 1);
    rs.push_back({Complex::from_dense(all), Complex::from_dense(std::vector<int>(n, 0)), 1.0, 0.0});
    const ReactionNetwork net(names, rs);
    Eigen::MatrixXd m(n, rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i)
      for (std::size_t j = 0; j < n; ++j)
        m(j, i) = rs[i].target.dense(n)[j] - rs[i].source.dense(n)[j];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    std::size_t frank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
      if (sv[k] > 1e-9 * std::max(1.0, sv[0])) ++frank;
    EXPECT_EQ(stoich_dimension(net), frank);
  }
}

TEST(Properties, ZwMonotoneAndBounded) {
  fixtures::RandomNetworks gen(kSeed + 4);
  for (int it = 0; it < kInstances; ++it) {
    const auto net = gen.network(random_size(gen), static_cast<std::size_t>(gen.uniform(1, 4)),
                                 gen.uniform(0, 1) == 1, false);
    const auto d = stoich_dimension(net);
    const auto full = full_set(net.species_count());
    std::vector<std::size_t> zw(full + 1);
    for (SpeciesSet w = 0; w <= full; ++w) {
      zw[w] = zw_dimension(net, w);
      EXPECT_LE(zw[w], d);
    }
    EXPECT_EQ(zw[0], d);
    EXPECT_EQ(zw[full], 0u);
    for (SpeciesSet w = 0; w <= full; ++w)
      for (SpeciesSet v = w; v <= full; ++v)
        if ((w & v) == w) EXPECT_LE(zw[v], zw[w]);
  }
}

TEST(Properties, VertexImpliesLockingOnWeaklyReversible) {
  fixtures::RandomNetworks gen(kSeed + 5);
  std::size_t checked = 0;
  for (int it = 0; it < kInstances; ++it) {
    const auto net = gen.weakly_reversible(random_size(gen));
    ASSERT_TRUE(is_weakly_reversible(build_reaction_graph(net)));
    const auto rep = lemma_checks(net);
    checked += rep.checked;
    EXPECT_TRUE(rep.consistent()) << format_network(net);
  }
  EXPECT_GT(checked, 0u);
}

TEST(Properties, KernelPositiveOnWeaklyReversible) {
  fixtures::RandomNetworks gen(kSeed + 6);
  for (int it = 0; it < kInstances; ++it) {
    const auto net = gen.weakly_reversible(random_size(gen));
    const auto g = build_reaction_graph(net);
    const auto psi = laplacian_kernel(net, g);
    ASSERT_EQ(psi.size(), g.nodes.size());
    for (double v : psi) EXPECT_GT(v, 0.0) << format_network(net);
    // and it lies in the Laplacian kernel
    const auto lap = kinetic_laplacian(net);
    Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(psi.data(), static_cast<Eigen::Index>(psi.size()));
    EXPECT_LT((lap.matrix * p).cwiseAbs().maxCoeff(), 1e-10 * std::max(1.0, p.cwiseAbs().maxCoeff()));
  }
}

TEST(Properties, ParseFormatRoundTrip) {
  fixtures::RandomNetworks gen(kSeed + 7);
  for (int it = 0; it < kInstances; ++it) {
    const auto net = gen.network(random_size(gen), static_cast<std::size_t>(gen.uniform(1, 4)),
                                 gen.uniform(0, 1) == 1, true, true);
    const auto text = format_network(net);
    const auto back = parse_network(text);
    EXPECT_EQ(back.species_names(), net.species_names());
    EXPECT_EQ(back.reactions(), net.reactions()) << text;
    EXPECT_EQ(format_network(back), text);
  }
}

TEST(Properties, UndelayedDriftReduction) {
  fixtures::RandomNetworks gen(kSeed + 8);
  for (int it = 0; it < kInstances; ++it) {
    const auto net = gen.network(random_size(gen), 3, gen.uniform(0, 1) == 1, true, true);
    const auto n = net.species_count();
    const Point c = positive_point(gen, n);
    Point want(n, 0.0);
    double scale = 0.0;
    for (const auto& r : net.reactions()) {
      const auto y = r.source.dense(n);
      const auto yp = r.target.dense(n);
      double rate = r.rate_constant;
      for (std::size_t j = 0; j < n; ++j) rate *= std::pow(c[j], y[j]);
      for (std::size_t j = 0; j < n; ++j) {
        want[j] += rate * (yp[j] - y[j]);
        scale = std::max(scale, std::abs(rate * (yp[j] - y[j])));
      }
    }
    const auto nodelay = net.without_delays();
    const auto got = delayed_drift(nodelay, [&](double) { return c; });
    EXPECT_LT(fixtures::max_diff(got, want), 1e-14 * std::max(1.0, scale) * 8);
    // delays do not matter over a constant history
    const auto delayed = delayed_drift(net, [&](double) { return c; });
    EXPECT_LT(fixtures::max_diff(delayed, want), 1e-14 * std::max(1.0, scale) * 8);
    EXPECT_LT(fixtures::max_diff(mass_action_drift(net, c), want), 1e-14 * std::max(1.0, scale) * 8);
  }
}

TEST(Properties, ConservedVectorsAnnihilateDrift) {
  fixtures::RandomNetworks gen(kSeed + 9);
  for (int it = 0; it < kInstances; ++it) {
    const auto net = gen.network(random_size(gen), 3, gen.uniform(0, 1) == 1, true);
    const Point c = positive_point(gen, net.species_count());
    const auto dx = delayed_drift(net, [&](double) { return c; });
    for (const auto& a : conserved_basis(net).as_double()) {
      double s = 0.0, mag = 0.0;
      for (std::size_t j = 0; j < a.size(); ++j) {
        s += a[j] * dx[j];
        mag += std::abs(a[j] * dx[j]);
      }
      EXPECT_LT(std::abs(s), 1e-12 * std::max(1.0, mag));
    }
  }
}

TEST(Properties, UndelayedClassIsFlatAlongS) {
  // tau = 0: psi(0) and psi(0) + v with v in S give the same class values
  fixtures::RandomNetworks gen(kSeed + 10);
  for (int it = 0; it < kInstances; ++it) {
    const auto net = gen.network(random_size(gen), 3, true, false);
    const auto n = net.species_count();
    Point x = positive_point(gen, n);
    for (auto& v : x) v += 2.0;
    Point y = x;
    for (const auto& b : stoich_subspace_basis(net)) {
      const double t = gen.real(-0.2, 0.2);
      for (std::size_t j = 0; j < n; ++j) y[j] += t * b[j].convert_to<double>();
    }
    ASSERT_GT(*std::min_element(y.begin(), y.end()), 0.0);
    const auto a = class_values(HistoryFunction::constant(x, 0), net);
    const auto b = class_values(HistoryFunction::constant(y, 0), net);
    for (std::size_t k = 0; k < a.values.size(); ++k)
      EXPECT_NEAR(a.values[k], b.values[k], 1e-8 * std::max(1.0, std::abs(a.values[k])));
  }
}

TEST(Properties, DelayedClassInvariantAlongTrajectories) {
  fixtures::RandomNetworks gen(kSeed + 11);
  int ran = 0;
  for (int it = 0; it < kInstances; ++it) {
    const auto net = gen.weakly_reversible(random_size(gen));
    if (net.tau_max() == 0.0) continue;
    SolverConfig cfg;
    cfg.step = 0.005;
    cfg.t_end = 2.0;
    cfg.monitor_stride = 20;
    const auto psi = HistoryFunction::constant(positive_point(gen, net.species_count()), net.tau_max());
    try {
      auto tr = integrate_dde(net, psi, cfg);
      const auto drift = conservation_drift(tr, net, conserved_basis(net));
      // random rates and coefficients put C_a(0) up to a few hundred
      for (std::size_t a = 0; a < drift.size(); ++a)
        EXPECT_LT(drift[a], 1e-6 * std::max(1.0, std::abs(tr.monitors().front().conserved[a])))
            << format_network(net);
      ++ran;
    } catch (const NumericError&) {
    }
  }
  EXPECT_GT(ran, kInstances * 3 / 4);
}

TEST(Properties, FaceWitnessesSatisfyConstraints) {
  fixtures::RandomNetworks gen(kSeed + 12);
  std::size_t witnesses = 0;
  for (int it = 0; it < kInstances; ++it) {
    const auto net = gen.network(random_size(gen), static_cast<std::size_t>(gen.uniform(1, 3)),
                                 true, true);
    const auto n = net.species_count();
    const auto spec = class_values(HistoryFunction::constant(positive_point(gen, n), net.tau_max()), net);
    double scale = 1.0;
    for (double v : spec.values) scale = std::max(scale, std::abs(v));
    const auto basis = spec.basis.as_double();
    for (auto w : enumerate_semilocking(net).semilocking) {
      const auto f = face_nonempty(net, w, spec);
      if (!f.nonempty) continue;
      ASSERT_TRUE(f.witness);
      ++witnesses;
      const auto& x = f.witness->state;
      for (std::size_t j = 0; j < n; ++j) {
        if (w >> j & 1u) EXPECT_EQ(x[j], 0.0);
        else EXPECT_GE(x[j] / scale, kFaceMargin / 2);
      }
      for (std::size_t k = 0; k < basis.size(); ++k) {
        double lhs = 0.0;
        for (std::size_t j = 0; j < n; ++j) lhs += basis[k][j] * x[j];
        for (std::size_t i = 0; i < net.reaction_count(); ++i) {
          const double th = f.witness->weights[i];
          if (th == 0.0) continue;
          EXPECT_GE(th / scale, kFaceMargin / 2);
          for (const auto& [s, c] : net.reaction(i).source.terms()) lhs += basis[k][s] * c * th;
        }
        EXPECT_NEAR(lhs, spec.values[k], 1e-9 * scale);
      }
    }
  }
  EXPECT_GT(witnesses, 0u);
}

TEST(Properties, UndelayedFacesMatchEnumerationOracle) {
  fixtures::RandomNetworks gen(kSeed + 13);
  std::size_t empty = 0, nonempty = 0;
  for (int it = 0; it < kInstances; ++it) {
    const auto net = gen.network(random_size(gen), static_cast<std::size_t>(gen.uniform(1, 3)),
                                 gen.uniform(0, 1) == 1, false);
    const auto n = net.species_count();
    Point x0(n);
    for (auto& v : x0) v = gen.uniform(1, 3);
    const auto spec = class_values(HistoryFunction::constant(x0, 0), net);
    if (spec.basis.empty()) continue;
    for (SpeciesSet w = 1; w <= full_set(n); ++w) {
      std::vector<std::size_t> off;
      for (std::size_t j = 0; j < n; ++j)
        if (!(w >> j & 1u)) off.push_back(j);
      std::vector<Vec<Rational>> a;
      Vec<Rational> c;
      for (std::size_t k = 0; k < spec.basis.size(); ++k) {
        Vec<Rational> row;
        for (auto j : off) row.push_back(spec.basis.vectors[k][j]);
        a.push_back(row);
        c.push_back(Rational(spec.values[k]));
      }
      const bool want = strictly_feasible(a, c, off.size());
      const bool got = face_nonempty(net, w, spec).nonempty;
      EXPECT_EQ(got, want) << format_network(net) << " W=" << w;
      (want ? nonempty : empty)++;
    }
  }
  EXPECT_GT(empty, 0u);
  EXPECT_GT(nonempty, 0u);
}

TEST(Properties, UndelayedChainEqualsMethodOfSteps) {
  fixtures::RandomNetworks gen(kSeed + 14);
  int ran = 0;
  for (int it = 0; it < kInstances; ++it) {
    const auto net = gen.weakly_reversible(random_size(gen)).without_delays();
    SolverConfig cfg;
    cfg.step = 0.01;
    cfg.t_end = 1.0;
    const auto psi = HistoryFunction::constant(positive_point(gen, net.species_count()), 0);
    bool mos_ok = true, chain_ok = true;
    Trajectory a(psi, cfg.step), b(psi, cfg.step);
    try { a = integrate_dde(net, psi, cfg); } catch (const NumericError&) { mos_ok = false; }
    try { b = chain_approximation(net, psi, 3, cfg); } catch (const NumericError&) { chain_ok = false; }
    ASSERT_EQ(mos_ok, chain_ok);
    if (!mos_ok) continue;
    ++ran;
    EXPECT_LT(sup_gap(a, b), 1e-12);
  }
  EXPECT_GT(ran, kInstances * 3 / 4);
}
