#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "cmonrw/canonical.hpp"
#include "cmonrw/hypergraph.hpp"
#include "support.hpp"

using namespace cmonrw;

namespace {

Signature two_gens() {
  Signature sig;
  sig.declare("a", 1, 1);
  sig.declare("b", 2, 1);
  return sig;
}

std::multiset<std::string> edge_strings(const Hypergraph& g, const std::vector<NodeId>& map) {
  std::multiset<std::string> out;
  for (const auto& e : g.edges()) {
    std::string s = e.label + ":";
    for (NodeId v : e.sources) s += std::to_string(map[v]) + ",";
    s += ">";
    for (NodeId v : e.targets) s += std::to_string(map[v]) + ",";
    out.insert(s);
  }
  return out;
}

// Exhaustive isomorphism search respecting pins pointwise.
bool brute_iso(const Hypergraph& x, const std::vector<NodeId>& px, const Hypergraph& y,
               const std::vector<NodeId>& py) {
  if (x.node_count() != y.node_count() || x.edge_count() != y.edge_count() || px.size() != py.size()) return false;
  std::vector<NodeId> id(y.node_count());
  std::iota(id.begin(), id.end(), NodeId{0});
  const auto target = edge_strings(y, id);
  std::vector<NodeId> perm = id;
  do {
    bool ok = true;
    for (std::size_t i = 0; i < px.size() && ok; ++i) ok = perm[px[i]] == py[i];
    if (ok && edge_strings(x, perm) == target) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

// Every label-preserving homomorphism, by enumerating all maps.
std::vector<Homomorphism> brute_homs(const Hypergraph& p, const Hypergraph& h, bool injective) {
  std::vector<Homomorphism> out;
  const std::size_t pn = p.node_count(), pe = p.edge_count();
  std::vector<NodeId> nm(pn, 0);
  std::vector<EdgeId> em(pe, 0);
  auto next = [](auto& v, std::size_t base) {
    for (auto& d : v) {
      if (++d < base) return true;
      d = 0;
    }
    return false;
  };
  if (pn > 0 && h.node_count() == 0) return out;
  if (pe > 0 && h.edge_count() == 0) return out;
  do {
    do {
      Homomorphism hom{nm, em};
      if (!is_homomorphism(p, h, hom)) continue;
      if (injective) {
        std::set<NodeId> ns(nm.begin(), nm.end());
        std::set<EdgeId> es(em.begin(), em.end());
        if (ns.size() != pn || es.size() != pe) continue;
      }
      out.push_back(hom);
    } while (next(em, h.edge_count()));
  } while (next(nm, h.node_count()));
  return out;
}

// All node-to-node paths of a DAG, checking that each one between members
// of `s` stays inside `s`.
bool brute_convex(const Hypergraph& g, const SubHypergraph& s) {
  bool ok = true;
  std::vector<EdgeId> trail;
  std::function<void(NodeId)> walk = [&](NodeId v) {
    if (!trail.empty() && s.nodes[v])
      for (EdgeId e : trail) ok = ok && s.edges[e];
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      const auto& he = g.edge(static_cast<EdgeId>(e));
      if (std::find(he.sources.begin(), he.sources.end(), v) == he.sources.end()) continue;
      trail.push_back(static_cast<EdgeId>(e));
      for (NodeId w : he.targets) walk(w);
      trail.pop_back();
    }
  };
  for (std::size_t v = 0; v < g.node_count(); ++v)
    if (s.nodes[v]) walk(static_cast<NodeId>(v));
  return ok;
}

}  // namespace

TEST(Degrees, Examples) {
  Hypergraph g(3);
  EXPECT_EQ(in_degree(g, 0), 0u);
  EXPECT_EQ(out_degree(g, 0), 0u);
  g.add_edge("h", {0}, {1, 1});
  EXPECT_EQ(in_degree(g, 1), 2u);
  EXPECT_THROW(in_degree(g, 7), Error);
  const Cospan ex = testkit::example_cospan();
  EXPECT_EQ(in_degree(ex.carrier, 2), 3u);
}

TEST(Degrees, SumsMatchTentacles) {
  std::mt19937_64 rng(testkit::test_seed(11));
  const auto sig = testkit::small_signature();
  for (int i = 0; i < 200; ++i) {
    const auto g = testkit::random_hypergraph(rng, sig, 1 + i % 6, i % 5);
    std::size_t in = 0, out = 0, t = 0, s = 0;
    for (std::size_t v = 0; v < g.node_count(); ++v) {
      in += in_degree(g, static_cast<NodeId>(v));
      out += out_degree(g, static_cast<NodeId>(v));
    }
    for (const auto& e : g.edges()) {
      t += e.targets.size();
      s += e.sources.size();
    }
    EXPECT_EQ(in, t);
    EXPECT_EQ(out, s);
  }
}

TEST(TerminalNodes, Examples) {
  EXPECT_EQ(terminal_nodes(Hypergraph(3)), (std::vector<NodeId>{0, 1, 2}));
  Hypergraph g(2);
  g.add_edge("f", {0}, {1});
  EXPECT_EQ(terminal_nodes(g), (std::vector<NodeId>{1}));
  EXPECT_TRUE(terminal_nodes(Hypergraph{}).empty());
}

TEST(Acyclic, Examples) {
  Hypergraph g(2);
  g.add_edge("f", {0}, {1});
  EXPECT_TRUE(is_acyclic(g));
  Hypergraph loop(1);
  loop.add_edge("f", {0}, {0});
  EXPECT_FALSE(is_acyclic(loop));
  g.add_edge("f", {1}, {0});
  EXPECT_FALSE(is_acyclic(g));
}

TEST(Acyclic, AgreesWithTopologicalOrderAndEdgeRepetition) {
  std::mt19937_64 rng(testkit::test_seed(12));
  const auto sig = testkit::small_signature();
  int cyclic = 0;
  for (int i = 0; i < 500; ++i) {
    const auto g = testkit::random_hypergraph(rng, sig, 1 + i % 8, i % 6);
    const bool acyclic = is_acyclic(g);
    cyclic += acyclic ? 0 : 1;
    EXPECT_EQ(acyclic, topological_edge_order(g).has_value());
    // A repeated node on a path yields a repeated edge unless the cycle has no edges.
    EXPECT_EQ(acyclic, !has_edge_repeating_path(g));
  }
  EXPECT_GT(cyclic, 10);
}

TEST(Convex, Examples) {
  const Cospan ex = testkit::example_cospan();
  const std::vector<EdgeId> all{0, 1, 2};
  EXPECT_TRUE(is_convex(ex.carrier, SubHypergraph::from_edges(ex.carrier, all)));
  const std::vector<EdgeId> only_b{2};
  EXPECT_TRUE(is_convex(ex.carrier, SubHypergraph::from_edges(ex.carrier, only_b)));

  Hypergraph chain(3);
  chain.add_edge("f", {0}, {1});
  chain.add_edge("f", {1}, {2});
  auto s = SubHypergraph::empty_of(chain);
  s.nodes[0] = s.nodes[2] = true;
  EXPECT_FALSE(is_convex(chain, s));
  EXPECT_EQ(convex_hull(chain, s), SubHypergraph::from_edges(chain, std::vector<EdgeId>{0, 1}));
}

TEST(Convex, EmbeddingMustBeInjectiveHomomorphism) {
  Hypergraph h(2);
  h.add_edge("f", {0}, {1});
  Hypergraph g(2);
  g.add_edge("f", {0}, {1});
  EXPECT_TRUE(is_convex_subhypergraph(h, g, Homomorphism{{0, 1}, {0}}));
  EXPECT_THROW(is_convex_subhypergraph(h, g, Homomorphism{{1, 0}, {0}}), Error);
}

TEST(Convex, AgreesWithPathEnumeration) {
  std::mt19937_64 rng(testkit::test_seed(13));
  const auto sig = testkit::small_signature();
  int non_convex = 0;
  for (int i = 0; i < 400; ++i) {
    const auto g = testkit::random_dag(rng, sig, 2 + i % 6, 1 + i % 5);
    auto s = SubHypergraph::empty_of(g);
    for (std::size_t e = 0; e < g.edge_count(); ++e) s.edges[e] = rng() % 2 == 0;
    std::vector<EdgeId> chosen;
    for (std::size_t e = 0; e < g.edge_count(); ++e)
      if (s.edges[e]) chosen.push_back(static_cast<EdgeId>(e));
    s = SubHypergraph::from_edges(g, chosen);
    for (std::size_t v = 0; v < g.node_count(); ++v)
      if (rng() % 4 == 0) s.nodes[v] = true;
    const bool expect = brute_convex(g, s);
    non_convex += expect ? 0 : 1;
    EXPECT_EQ(is_convex(g, s), expect);
    const auto hull = convex_hull(g, s);
    EXPECT_TRUE(brute_convex(g, hull));
  }
  EXPECT_GT(non_convex, 20);
}

TEST(Homomorphisms, Examples) {
  Hypergraph f1(2);
  f1.add_edge("f", {0}, {1});
  Hypergraph no_f(2);
  no_f.add_edge("g", {0}, {1});
  EXPECT_TRUE(find_homomorphisms(f1, no_f).empty());
  const auto self = find_homomorphisms(f1, f1);
  ASSERT_EQ(self.size(), 1u);
  EXPECT_EQ(self[0], (Homomorphism{{0, 1}, {0}}));

  Hypergraph par(4);
  par.add_edge("f", {0}, {1});
  par.add_edge("f", {2}, {3});
  Hypergraph shared(3);
  shared.add_edge("f", {0}, {2});
  shared.add_edge("f", {1}, {2});
  EXPECT_TRUE(find_homomorphisms(par, shared).empty());
  const std::vector<NodeId> merge{1, 3};
  const auto ms = find_homomorphisms(par, shared, merge);
  EXPECT_EQ(ms.size(), 2u);
  for (const auto& m : ms) EXPECT_EQ(m.node_map[1], m.node_map[3]);
}

TEST(Homomorphisms, InjectiveAgreesWithBruteForce) {
  std::mt19937_64 rng(testkit::test_seed(14));
  const auto sig = two_gens();
  for (int i = 0; i < 300; ++i) {
    const auto p = testkit::random_hypergraph(rng, sig, 1 + i % 3, i % 3);
    const auto h = testkit::random_hypergraph(rng, sig, 1 + i % 4, 1 + i % 4);
    auto got = find_homomorphisms(p, h);
    auto want = brute_homs(p, h, true);
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    EXPECT_EQ(got, want);
  }
}

TEST(Homomorphisms, MergeAllowedAgreesWithBruteForce) {
  std::mt19937_64 rng(testkit::test_seed(15));
  const auto sig = two_gens();
  for (int i = 0; i < 300; ++i) {
    const auto p = testkit::random_hypergraph(rng, sig, 1 + i % 4, i % 3);
    const auto h = testkit::random_hypergraph(rng, sig, 1 + i % 3, 1 + i % 4);
    std::vector<NodeId> merge;
    std::vector<bool> mergeable(p.node_count(), false);
    for (std::size_t v = 0; v < p.node_count(); ++v)
      if (rng() % 2 == 0) {
        merge.push_back(static_cast<NodeId>(v));
        mergeable[v] = true;
      }
    auto got = find_homomorphisms(p, h, merge);
    std::vector<Homomorphism> want;
    for (const auto& m : brute_homs(p, h, false)) {
      std::set<EdgeId> es(m.edge_map.begin(), m.edge_map.end());
      bool ok = es.size() == m.edge_map.size();
      for (std::size_t x = 0; x < p.node_count() && ok; ++x)
        for (std::size_t y = x + 1; y < p.node_count() && ok; ++y)
          if (m.node_map[x] == m.node_map[y] && !(mergeable[x] && mergeable[y])) ok = false;
      if (ok) want.push_back(m);
    }
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    EXPECT_EQ(got, want);
  }
}

TEST(CanonicalForm, Examples) {
  std::mt19937_64 rng(1);
  Hypergraph g(3);
  g.add_edge("f", {0}, {1});
  g.add_edge("f", {1}, {2});
  const auto perm = testkit::random_permutation(rng, 3);
  const auto r = testkit::rename(g, perm, rng);
  const std::vector<NodeId> no_pins;
  EXPECT_EQ(canonical_form(g, no_pins), canonical_form(r, no_pins));

  Hypergraph relabelled(3);
  relabelled.add_edge("f", {0}, {1});
  relabelled.add_edge("k", {1}, {2});
  EXPECT_NE(canonical_form(g, no_pins), canonical_form(relabelled, no_pins));

  // chained vs parallel: same degree sequence once pinned suitably
  Hypergraph chained(4);
  chained.add_edge("f", {0}, {1});
  chained.add_edge("f", {2}, {3});
  Hypergraph crossed(4);
  crossed.add_edge("f", {0}, {3});
  crossed.add_edge("f", {2}, {1});
  const std::vector<NodeId> pins{0, 1, 2, 3};
  EXPECT_NE(canonical_form(chained, pins), canonical_form(crossed, pins));
  EXPECT_EQ(canonical_form(chained, no_pins), canonical_form(crossed, no_pins));
}

TEST(CanonicalForm, AgreesWithExhaustiveIsomorphism) {
  std::mt19937_64 rng(testkit::test_seed(16));
  const auto sig = two_gens();
  struct Item {
    Hypergraph g;
    std::vector<NodeId> pins;
    CanonicalKey key;
  };
  std::vector<Item> items;
  for (int i = 0; i < 700; ++i) {
    const std::size_t n = 1 + i % 5;
    auto g = testkit::random_hypergraph(rng, sig, n, i % 5);
    std::vector<NodeId> pins;
    for (std::size_t k = 0; k < static_cast<std::size_t>(i % 3); ++k) pins.push_back(static_cast<NodeId>(rng() % n));
    const auto key = canonical_form(g, pins);
    // renamed copy must agree
    const auto perm = testkit::random_permutation(rng, n);
    const auto r = testkit::rename(g, perm, rng);
    std::vector<NodeId> rp;
    for (NodeId v : pins) rp.push_back(perm[v]);
    EXPECT_EQ(canonical_form(r, rp), key);
    items.push_back({std::move(g), std::move(pins), key});
  }
  std::size_t equal_pairs = 0, compared = 0;
  for (std::size_t i = 0; i < items.size(); ++i)
    for (std::size_t j = i + 1; j < items.size(); ++j) {
      const auto& x = items[i];
      const auto& y = items[j];
      if (x.g.node_count() != y.g.node_count() || x.g.edge_count() != y.g.edge_count() ||
          x.pins.size() != y.pins.size() || x.g.node_count() > 4)
        continue;
      ++compared;
      const bool iso = brute_iso(x.g, x.pins, y.g, y.pins);
      equal_pairs += iso ? 1 : 0;
      EXPECT_EQ(x.key == y.key, iso);
    }
  EXPECT_GT(compared, 1000u);
  EXPECT_GT(equal_pairs, 20u);
}
