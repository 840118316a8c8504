#include <gtest/gtest.h>

#include <set>

#include "cmonrw/dpo.hpp"
#include "cmonrw/oracle.hpp"
#include "support.hpp"

using namespace cmonrw;

namespace {

Signature sig() {
  Signature s = testkit::small_signature();
  s.declare("k", 1, 1);
  s.declare("p", 1, 1);
  s.declare("q", 1, 1);
  return s;
}

Term T(const std::string& src) { return parse_term(src, sig()); }
Cospan E(const std::string& src) { return eval_term(T(src), sig()); }
RewriteRule R(const std::string& l, const std::string& r) { return rule_from_terms("r", T(l), T(r), sig()); }

std::set<CanonicalKey> result_keys(const std::vector<RewriteStep>& steps) {
  std::set<CanonicalKey> out;
  for (const auto& s : steps) out.insert(cospan_key(s.result));
  return out;
}

std::set<CanonicalKey> oracle_keys(const std::string& l, const std::string& r, const std::string& d) {
  const Term td = T(d);
  auto o = enumerate_rewrites_bruteforce(T(l), T(r), td, sig(), term_size(td) + 6);
  EXPECT_FALSE(o.truncated);
  return {o.keys.begin(), o.keys.end()};
}

// d = c1 ; (id_k + l) ; c2 with random contexts, as in the definition of rewriting.
struct Instance {
  Term l, r, d;
};

std::optional<Instance> random_instance(testkit::TermGen& gen) {
  Term l = gen.term(gen.pick(0, 2));
  const auto tl = term_type(l);
  Term r = l;
  for (int a = 0; a < 30; ++a) {
    Term c = gen.term(tl.dom);
    if (term_type(c).cod == tl.cod) {
      r = c;
      break;
    }
  }
  Term c1 = gen.term(gen.pick(0, 2));
  std::size_t w = term_type(c1).cod;
  for (; w < tl.dom; ++w) c1 = Term::par(c1, Term::eta());
  const std::size_t k = w - tl.dom;
  Term c2 = gen.term(k + tl.cod);
  Term d = Term::seq(c1, Term::seq(Term::par(Term::id(k), l), c2));
  if (generator_count(d) > 5) return std::nullopt;
  return Instance{l, r, d};
}

testkit::TermGen small_gen(std::uint64_t seed) {
  testkit::TermGenOptions o;
  o.max_generators = 2;
  o.max_layers = 2;
  o.max_width = 3;
  static const Signature s = sig();
  return testkit::TermGen(s, testkit::test_seed(seed), o);
}

}  // namespace

TEST(Rules, InterfacesMustAgree) {
  EXPECT_THROW(R("f", "g"), Error);
  try {
    R("mu", "eta");
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TypeMismatch);
  }
  EXPECT_NO_THROW(R("f ; k", "p"));
}

TEST(Matches, AbsentLabel) {
  EXPECT_TRUE(enumerate_convex_matches(R("k", "p"), E("f ; f")).empty());
  EXPECT_TRUE(enumerate_matches(R("k", "p"), E("f ; f")).empty());
  EXPECT_TRUE(rewrite_all({R("k", "p")}, E("f ; f")).empty());
}

TEST(Matches, MergedOutputs) {
  // f + f whose two outputs the host merges: the match identifies two
  // right boundary nodes of the rule.
  const auto rule = R("f + f", "mu ; h");
  const Cospan host = E("(f + f) ; (mu ; k)");
  const auto ms = enumerate_convex_matches(rule, host);
  ASSERT_EQ(ms.size(), 2u);
  for (const auto& m : ms) {
    const auto& nm = m.hom.node_map;
    EXPECT_EQ(nm[rule.lhs.right[0]], nm[rule.lhs.right[1]]);
    EXPECT_TRUE(is_convex_match(rule, host, m.hom));
  }
  const auto comps = boundary_complement(rule, ms[0], host);
  ASSERT_EQ(comps.size(), 1u);
  const auto& c = comps[0];
  EXPECT_EQ(c.carrier.edge_count(), 1u);
  EXPECT_EQ(c.c2[0], c.c2[1]);
  EXPECT_TRUE(validate_complement(rule, ms[0], c, host));
  EXPECT_TRUE(iso_equal(apply_rewrite(rule, ms[0], c, host), E("(mu ; h) ; (mu ; k)")));
}

TEST(Matches, IdentifiedInputsAreNotMatches) {
  // f ; f would need the output of the first f and the input of the second
  // identified, which condition (A) forbids for an input node.
  const auto rule = R("f + f", "id_2");
  const Cospan host = E("f ; f");
  EXPECT_TRUE(enumerate_matches(rule, host).empty());
}

TEST(Matches, NonConvexExcluded) {
  const auto rule = R("f + f", "id_2");
  const Cospan host = E("f ; (f ; f)");
  const auto homs = find_homomorphisms(rule.lhs.carrier, host.carrier, rule.lhs.right);
  ASSERT_EQ(homs.size(), 2u);  // first and last f, either order
  for (const auto& h : homs) EXPECT_FALSE(is_convex_match(rule, host, h));
  EXPECT_TRUE(enumerate_convex_matches(rule, host).empty());
  // the ordered mode finds the path from an output back to an input
  for (const auto& m : enumerate_matches(rule, host)) EXPECT_TRUE(boundary_complement(rule, m, host).empty());
  EXPECT_TRUE(rewrite_all({rule}, host).empty());
  EXPECT_TRUE(oracle_keys("f + f", "id_2", "f ; (f ; f)").empty());
}

TEST(Matches, DeterministicOrder) {
  const auto rule = R("f", "k");
  const Cospan host = E("(f + f) ; (f + f)");
  const auto a = enumerate_matches(rule, host), b = enumerate_matches(rule, host);
  ASSERT_EQ(a.size(), 4u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].hom.edge_map, b[i].hom.edge_map);
    if (i > 0) {
      EXPECT_LT(a[i - 1].hom.edge_map, a[i].hom.edge_map);
    }
  }
}

TEST(Complement, WholeHostIsDiscreteIdentity) {
  const auto rule = R("f", "f");
  const Cospan host = E("f");
  const auto ms = enumerate_matches(rule, host);
  ASSERT_EQ(ms.size(), 1u);
  const auto comps = boundary_complement(rule, ms[0], host);
  ASSERT_EQ(comps.size(), 1u);
  const auto& c = comps[0];
  EXPECT_EQ(c.carrier.node_count(), 2u);
  EXPECT_EQ(c.carrier.edge_count(), 0u);
  EXPECT_EQ(c.c1, c.d1);
  EXPECT_EQ(c.c2, c.d2);
  EXPECT_NE(c.c1, c.c2);
}

TEST(Complement, SeveralPerMatch) {
  // id_1 sitting on the merged node of mu: each merged input may enter
  // before or after the rule.
  const auto rule = R("id_1", "k");
  const Cospan host = E("mu");
  const auto ms = enumerate_matches(rule, host);
  ASSERT_EQ(ms.size(), 1u);
  const auto comps = boundary_complement(rule, ms[0], host);
  EXPECT_EQ(comps.size(), 4u);
  std::set<CanonicalKey> results;
  for (const auto& c : comps) {
    EXPECT_TRUE(validate_complement(rule, ms[0], c, host));
    results.insert(cospan_key(apply_rewrite(rule, ms[0], c, host)));
  }
  EXPECT_EQ(results.size(), 4u);
  EXPECT_TRUE(results.count(cospan_key(E("mu ; k"))));
  EXPECT_TRUE(results.count(cospan_key(E("(k + id_1) ; mu"))));
  EXPECT_TRUE(results.count(cospan_key(E("(id_1 + k) ; mu"))));
  EXPECT_TRUE(results.count(cospan_key(E("(id_2 + (eta ; k)) ; (mu + id_1) ; mu"))));
  EXPECT_EQ(results, oracle_keys("id_1", "k", "mu"));
}

TEST(Complement, SharedNodeFailsConditionC) {
  const auto rule = R("f", "f");
  const Cospan host = E("f");
  const auto m = enumerate_matches(rule, host).at(0);
  auto c = boundary_complement(rule, m, host).at(0);
  c.c1[0] = c.c2[0];
  const auto why = complement_violation(rule, m, c, host);
  ASSERT_TRUE(why);
  EXPECT_NE(why->find("condition C"), std::string::npos);
}

TEST(Complement, DanglingEdge) {
  Hypergraph g2(3);
  g2.add_edge("f", {0}, {1});
  g2.add_edge("f", {1}, {2});
  const Cospan host2{g2, {0, 1}, {2}};  // node 1 also a left port
  const auto rule = R("f ; f", "k");
  const auto ms = enumerate_matches(rule, host2);
  ASSERT_EQ(ms.size(), 1u);
  try {
    boundary_complement(rule, ms[0], host2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DanglingEdge);
  }
  EXPECT_TRUE(rewrite_all({rule}, host2).empty());
}

TEST(Rewrite, SameSidesGiveHost) {
  const Cospan host = E("(f + p) ; g ; h");
  for (const char* l : {"f", "p", "g", "h", "g ; h"}) {
    const auto steps = rewrite_all({R(l, l)}, host);
    ASSERT_FALSE(steps.empty()) << l;
    for (const auto& s : steps) EXPECT_TRUE(iso_equal(s.result, host)) << l;
  }
}

TEST(Rewrite, InContext) {
  const auto steps = rewrite_all({R("p ; q", "k")}, E("(p ; q) + f"));
  ASSERT_EQ(steps.size(), 1u);
  EXPECT_TRUE(iso_equal(steps[0].result, E("k + f")));
  EXPECT_EQ(result_keys(steps), oracle_keys("p ; q", "k", "(p ; q) + f"));
}

TEST(Rewrite, MergedRedex) {
  const std::string d = "(f + f) ; (mu ; k)";
  EXPECT_EQ(result_keys(rewrite_all({R("f + f", "mu ; h")}, E(d))), oracle_keys("f + f", "mu ; h", d));
}

TEST(RewriteAll, TwoDisjointRedexes) {
  const auto steps = rewrite_all({R("f", "k")}, E("f + f"));
  EXPECT_EQ(steps.size(), 2u);
  EXPECT_EQ(result_keys(steps), (std::set<CanonicalKey>{cospan_key(E("k + f")), cospan_key(E("f + k"))}));
  EXPECT_EQ(result_keys(steps), oracle_keys("f", "k", "f + f"));
}

TEST(RewriteAll, SymmetricRedexesCollapse) {
  const auto steps = rewrite_all({R("f", "k")}, E("((eta ; f) + (eta ; f)) ; mu"));
  EXPECT_EQ(steps.size(), 1u);
  EXPECT_EQ(result_keys(steps), oracle_keys("f", "k", "((eta ; f) + (eta ; f)) ; mu"));
}

TEST(RewriteAll, SeveralRulesKeepRuleIndex) {
  const auto steps = rewrite_all({R("k", "p"), R("f", "q")}, E("f ; k"));
  ASSERT_EQ(steps.size(), 2u);
  EXPECT_EQ(steps[0].rule, 0u);
  EXPECT_EQ(steps[1].rule, 1u);
  EXPECT_EQ(steps[1].match.rule, 1u);
}

TEST(RewriteAll, EmptyRuleMatchesOnce) {
  const auto empty = make_rule("e", identity(0), Cospan{Hypergraph(0), {}, {}});
  const auto steps = rewrite_all({empty}, E("f + k"));
  ASSERT_EQ(steps.size(), 1u);
  EXPECT_TRUE(iso_equal(steps[0].result, E("f + k")));
}

TEST(Normalize, NoRulesGivesHost) {
  const Cospan host = E("f ; k");
  for (auto s : {Strategy::Leftmost, Strategy::ExhaustiveBfs}) {
    const auto nf = normalize({}, host, s, 0);
    ASSERT_EQ(nf.size(), 1u);
    EXPECT_TRUE(iso_equal(nf[0], host));
  }
}

TEST(Normalize, ConfluentToySystem) {
  const Cospan host = E("f + f");
  const auto nf = normalize({R("f", "k")}, host, Strategy::ExhaustiveBfs, 100);
  ASSERT_EQ(nf.size(), 1u);
  EXPECT_TRUE(iso_equal(nf[0], E("k + k")));
  const auto lm = normalize({R("f", "k")}, host, Strategy::Leftmost, 100);
  ASSERT_EQ(lm.size(), 1u);
  EXPECT_TRUE(iso_equal(lm[0], E("k + k")));
}

TEST(Normalize, BudgetZero) {
  for (auto s : {Strategy::Leftmost, Strategy::ExhaustiveBfs}) {
    try {
      normalize({R("f", "k")}, E("f"), s, 0);
      FAIL();
    } catch (const BudgetExhausted& e) {
      EXPECT_EQ(e.code(), ErrorCode::StepBudgetExhausted);
      ASSERT_EQ(e.frontier().size(), 1u);
      EXPECT_TRUE(iso_equal(e.frontier()[0], E("f")));
    }
  }
}

TEST(Normalize, CommutativityNeverStops) {
  EXPECT_TRUE(iso_equal(E("mu"), E("sym_1_1 ; mu")));
  EXPECT_THROW(normalize({R("mu", "sym_1_1 ; mu")}, E("mu"), Strategy::Leftmost, 50), BudgetExhausted);
  // exhaustive search sees only one state, which rewrites to itself
  EXPECT_TRUE(normalize({R("mu", "sym_1_1 ; mu")}, E("mu"), Strategy::ExhaustiveBfs, 50).empty());
}

TEST(MatchModes, ConvexMissesMergedAfterContext) {
  const std::string l = "sym_1_1", r = "id_2", d = "(eta + eta) ; ((id_0 + sym_1_1) ; (g ; k))";
  const auto convex = result_keys(rewrite_all({R(l, r)}, E(d), MatchMode::Convex));
  const auto ordered = result_keys(rewrite_all({R(l, r)}, E(d), MatchMode::Ordered));
  const auto oracle = oracle_keys(l, r, d);
  EXPECT_EQ(ordered, oracle);
  EXPECT_LT(convex.size(), oracle.size());
  for (const auto& k : convex) EXPECT_TRUE(oracle.count(k));
}

TEST(Random, AcceptedComplementsArePushouts) {
  auto gen = small_gen(11);
  std::size_t checked = 0;
  for (int it = 0; it < 150; ++it) {
    const auto inst = random_instance(gen);
    if (!inst) continue;
    const auto rule = rule_from_terms("r", inst->l, inst->r, sig());
    const Cospan host = eval_term(inst->d, sig());
    for (const auto& m : enumerate_matches(rule, host)) {
      std::vector<Complement> comps;
      try {
        comps = boundary_complement(rule, m, host);
      } catch (const Error& e) {
        ASSERT_EQ(e.code(), ErrorCode::DanglingEdge);
        continue;
      }
      for (const auto& c : comps) {
        const auto why = complement_violation(rule, m, c, host);
        EXPECT_FALSE(why) << *why << " in " << pretty_print(inst->d);
        EXPECT_TRUE(iso_equal(compose(detail::as_0_interface(rule.lhs), c.cospan()), detail::as_0_interface(host)));
        const Cospan res = apply_rewrite(rule, m, c, host);
        EXPECT_TRUE(is_right_monogamous(res) && is_acyclic(res));
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 100u);
}

TEST(Random, MutatedComplementsRejected) {
  auto gen = small_gen(12);
  std::mt19937_64 rng(testkit::test_seed(12));
  std::size_t rejected = 0;
  for (int it = 0; it < 150; ++it) {
    const auto inst = random_instance(gen);
    if (!inst) continue;
    const auto rule = rule_from_terms("r", inst->l, inst->r, sig());
    const Cospan host = eval_term(inst->d, sig());
    for (const auto& m : enumerate_matches(rule, host)) {
      std::vector<Complement> comps;
      try {
        comps = boundary_complement(rule, m, host);
      } catch (const Error&) {
        continue;
      }
      for (auto c : comps) {
        switch (rng() % 3) {
          case 0:  // merge two c1 nodes
            if (c.c1.size() < 2) continue;
            c.c1[1] = c.c1[0];
            break;
          case 1:  // a c1 node that is also a c2 node
            if (c.c1.empty() || c.c2.empty()) continue;
            c.c1[rng() % c.c1.size()] = c.c2[rng() % c.c2.size()];
            break;
          default:  // a new node that is terminal but on no right leg
            c.carrier.add_node();
            break;
        }
        EXPECT_FALSE(validate_complement(rule, m, c, host)) << pretty_print(inst->d);
        ++rejected;
      }
    }
  }
  EXPECT_GT(rejected, 50u);
}

TEST(Random, AgreesWithOracle) {
  auto gen = small_gen(7);
  std::size_t compared = 0, nonempty = 0;
  for (int it = 0; it < 120; ++it) {
    const auto inst = random_instance(gen);
    if (!inst) continue;
    const auto steps = rewrite_all({rule_from_terms("r", inst->l, inst->r, sig())}, eval_term(inst->d, sig()));
    const auto o = enumerate_rewrites_bruteforce(inst->l, inst->r, inst->d, sig(), term_size(inst->d) + 6);
    ASSERT_FALSE(o.truncated);
    EXPECT_EQ(result_keys(steps), (std::set<CanonicalKey>(o.keys.begin(), o.keys.end())))
        << "d = " << pretty_print(inst->d) << ", l = " << pretty_print(inst->l) << ", r = " << pretty_print(inst->r);
    ++compared;
    nonempty += !steps.empty();
  }
  EXPECT_GT(compared, 80u);
  EXPECT_GT(nonempty, 60u);
}
