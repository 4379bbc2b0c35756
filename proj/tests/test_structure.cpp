#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace dcrn;
using fixtures::set_of;

TEST(Graph, Example1Cycle) {
  const auto net = fixtures::example1();
  const auto g = build_reaction_graph(net);
  ASSERT_EQ(g.nodes.size(), 3u);
  ASSERT_EQ(g.edges.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(g.edges[i].reaction, i);
    EXPECT_EQ(g.edges[i].to, g.edges[(i + 1) % 3].from);
  }
}

TEST(Graph, Example2) {
  const auto net = fixtures::example2();
  const auto g = build_reaction_graph(net);
  ASSERT_EQ(g.nodes.size(), 3u);
  EXPECT_EQ(g.edges.size(), 4u);
  EXPECT_EQ(g.nodes[0], Complex::from_dense({2, 0, 0}));
  EXPECT_EQ(g.nodes[1], Complex::from_dense({1, 1, 0}));
  EXPECT_EQ(g.nodes[2], Complex::from_dense({0, 1, 1}));
}

TEST(Graph, SingleReaction) {
  const auto g = build_reaction_graph(parse_network("A -> B ; k=1"));
  EXPECT_EQ(g.nodes.size(), 2u);
  EXPECT_EQ(g.edges.size(), 1u);
}

TEST(LinkageClasses, Examples) {
  EXPECT_EQ(linkage_classes(build_reaction_graph(fixtures::example1())).size(), 1u);
  const auto cls = linkage_classes(build_reaction_graph(fixtures::example2()));
  ASSERT_EQ(cls.size(), 1u);
  EXPECT_EQ(cls[0].size(), 3u);
}

TEST(LinkageClasses, DisjointUnion) {
  const auto net = parse_network(
      "2 X1 -> 3 X1 + X2 ; k=1\n3 X1 + X2 -> X1 + 2 X2 ; k=1\nX1 + 2 X2 -> 2 X1 ; k=2\n"
      "A -> B ; k=1\n");
  const auto cls = linkage_classes(build_reaction_graph(net));
  ASSERT_EQ(cls.size(), 2u);
  EXPECT_EQ(cls[0], (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(cls[1], (std::vector<std::size_t>{3, 4}));
  EXPECT_FALSE(is_weakly_reversible(build_reaction_graph(net)));
  EXPECT_EQ(deficiency(net), 0u);
}

TEST(Reversibility, Examples) {
  const auto e1 = fixtures::example1();
  EXPECT_TRUE(is_weakly_reversible(build_reaction_graph(e1)));
  EXPECT_FALSE(is_reversible(e1));
  const auto e2 = fixtures::example2();
  EXPECT_TRUE(is_reversible(e2));
  EXPECT_TRUE(is_weakly_reversible(build_reaction_graph(e2)));
}

TEST(Reversibility, BrokenCycle) {
  const auto net = parse_network("2 X1 -> 3 X1 + X2 ; k=1\n3 X1 + X2 -> X1 + 2 X2 ; k=1\n");
  EXPECT_FALSE(is_weakly_reversible(build_reaction_graph(net)));
}

TEST(Reversibility, TwoCyclesSharingAComplex) {
  const auto net = parse_network("A -> B ; k=1\nB -> A ; k=1\nB -> C ; k=1\nC -> B ; k=1\n");
  EXPECT_TRUE(is_weakly_reversible(build_reaction_graph(net)));
}

TEST(Stoich, Example1SpansPlane) {
  const auto basis = stoich_subspace_basis(fixtures::example1());
  ASSERT_EQ(basis.size(), 2u);
  // first two reaction vectors: (1,1) and (-2,1)
  EXPECT_EQ(basis[0], (Vec<Rational>{1, 1}));
  EXPECT_EQ(basis[1], (Vec<Rational>{-2, 1}));
}

TEST(Stoich, Example2AndIsomerization) {
  EXPECT_EQ(stoich_dimension(fixtures::example2()), 2u);
  const auto b = stoich_subspace_basis(parse_network("A -> B ; k=1"));
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0], (Vec<Rational>{-1, 1}));
}

TEST(Deficiency, Examples) {
  EXPECT_EQ(deficiency(fixtures::example1()), 0u);
  EXPECT_EQ(deficiency(fixtures::example2()), 0u);
  EXPECT_EQ(deficiency(parse_network("A -> B ; k=1")), 0u);
  // classic deficiency-one network
  EXPECT_EQ(deficiency(parse_network("A <-> 2A ; k=1,1\nA + B <-> C ; k=1,1\nC <-> B ; k=1,1")), 1u);
}

TEST(Semilocking, Example1) {
  const auto net = fixtures::example1();
  const auto cat = enumerate_semilocking(net);
  ASSERT_EQ(cat.size(), 2u);
  EXPECT_EQ(cat.semilocking[0], set_of(net, {"X1"}));
  EXPECT_EQ(cat.semilocking[1], set_of(net, {"X1", "X2"}));
  EXPECT_TRUE(cat.locking[0]);
  EXPECT_TRUE(cat.locking[1]);
  EXPECT_FALSE(is_semilocking(net, set_of(net, {"X2"})));
}

TEST(Semilocking, Example2) {
  const auto net = fixtures::example2();
  const auto cat = enumerate_semilocking(net);
  const std::vector<SpeciesSet> expected{set_of(net, {"X1", "X2"}), set_of(net, {"X1", "X3"}),
                                         set_of(net, {"X1", "X2", "X3"})};
  std::vector<SpeciesSet> got = cat.semilocking;
  std::sort(got.begin(), got.end());
  std::vector<SpeciesSet> want = expected;
  std::sort(want.begin(), want.end());
  EXPECT_EQ(got, want);
  for (bool l : cat.locking) EXPECT_TRUE(l);
}

TEST(Semilocking, NonLockingMember) {
  // {A} is semilocking (A is produced only where consumed) but 0 -> B avoids it.
  const auto net = parse_network("A -> B ; k=1\n0 -> B ; k=1\n");
  const auto w = set_of(net, {"A"});
  EXPECT_TRUE(is_semilocking(net, w));
  EXPECT_FALSE(is_locking(net, w));
}

TEST(Semilocking, MinimalFilter) {
  const auto cat = enumerate_semilocking(fixtures::example2());
  const auto min = minimal_semilocking(cat);
  EXPECT_EQ(min.size(), 2u);
}

TEST(Semilocking, CapabilityLimit) {
  std::string text;
  for (int i = 0; i < 25; ++i)
    text += "S" + std::to_string(i) + " -> S" + std::to_string(i + 1) + " ; k=1\n";
  const auto net = parse_network(text);
  EXPECT_EQ(net.species_count(), 26u);
  EXPECT_THROW(enumerate_semilocking(net), CapabilityError);
}

TEST(Structure, Report) {
  const auto rep = analyze_structure(fixtures::example2());
  EXPECT_EQ(rep.complexes, 3u);
  EXPECT_EQ(rep.dim_S, 2u);
  EXPECT_EQ(rep.deficiency, 0u);
  EXPECT_TRUE(rep.reversible);
  EXPECT_EQ(rep.semilocking.size(), 3u);
}
