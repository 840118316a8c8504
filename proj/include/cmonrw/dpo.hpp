#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cmonrw/cospan.hpp"
#include "cmonrw/error.hpp"
#include "cmonrw/hypergraph.hpp"
#include "cmonrw/signature.hpp"
#include "cmonrw/term.hpp"
#include "cmonrw/translate.hpp"

namespace cmonrw {

/// A rule i -> L <- j, i -> R <- j.
struct RewriteRule {
  std::string name;
  Cospan lhs;
  Cospan rhs;
};

inline RewriteRule make_rule(std::string name, Cospan lhs, Cospan rhs) {
  if (lhs.dom() != rhs.dom() || lhs.cod() != rhs.cod())
    throw Error(ErrorCode::TypeMismatch, "rule " + name + ": sides have different interfaces");
  for (const Cospan* c : {&lhs, &rhs}) {
    c->validate();
    if (!is_right_monogamous(*c)) throw Error(ErrorCode::NotRightMonogamous, "rule " + name + " is not right-monogamous");
    if (!is_acyclic(*c)) throw Error(ErrorCode::Cyclic, "rule " + name + " is cyclic");
  }
  return RewriteRule{std::move(name), std::move(lhs), std::move(rhs)};
}

inline RewriteRule rule_from_terms(std::string name, const Term& l, const Term& r, const Signature& sig) {
  const TermType tl = term_type(l), tr = term_type(r);
  if (tl != tr)
    throw Error(ErrorCode::TypeMismatch, "rule " + name + ": " + std::to_string(tl.dom) + " -> " +
                                             std::to_string(tl.cod) + " vs " + std::to_string(tr.dom) + " -> " +
                                             std::to_string(tr.cod));
  return make_rule(std::move(name), eval_term(l, sig), eval_term(r, sig));
}

struct Match {
  std::size_t rule = 0;  // index into the rule list it was found for
  Homomorphism hom;      // lhs carrier -> host carrier
};

/// i + j -> C <- n + m.
struct Complement {
  Hypergraph carrier;
  std::vector<NodeId> c1, c2, d1, d2;

  Cospan cospan() const {
    std::vector<NodeId> left = c1, right = d1;
    left.insert(left.end(), c2.begin(), c2.end());
    right.insert(right.end(), d2.begin(), d2.end());
    return Cospan{carrier, std::move(left), std::move(right)};
  }
  /// n + j -> C <- m + i: the arrangement that condition (D) asks to be right-monogamous.
  Cospan rearranged() const {
    std::vector<NodeId> left = d1, right = d2;
    left.insert(left.end(), c2.begin(), c2.end());
    right.insert(right.end(), c1.begin(), c1.end());
    return Cospan{carrier, std::move(left), std::move(right)};
  }
  bool operator==(const Complement&) const = default;
};

struct RewriteStep {
  std::size_t rule = 0;
  Match match;
  Complement complement;
  Cospan result;
};

namespace detail {

inline Cospan as_0_interface(const Cospan& c) {
  std::vector<NodeId> right = c.left;
  right.insert(right.end(), c.right.begin(), c.right.end());
  return Cospan{c.carrier, {}, std::move(right)};
}

inline void require_host(const Cospan& host) {
  host.validate();
  if (!is_right_monogamous(host)) throw Error(ErrorCode::NotRightMonogamous, "host is not right-monogamous");
  if (!is_acyclic(host)) throw Error(ErrorCode::Cyclic, "host is cyclic");
}

inline SubHypergraph match_image(const Hypergraph& host, const Homomorphism& hom) {
  auto s = SubHypergraph::empty_of(host);
  for (NodeId v : hom.node_map) s.nodes[v] = true;
  for (EdgeId e : hom.edge_map) s.edges[e] = true;
  return s;
}

}  // namespace detail

/// Condition (A): identified nodes all lie on the right boundary of L.
inline bool satisfies_condition_a(const RewriteRule& rule, const Homomorphism& hom) {
  std::vector<bool> out(rule.lhs.carrier.node_count(), false);
  for (NodeId v : rule.lhs.right) out[v] = true;
  std::map<NodeId, std::vector<NodeId>> pre;
  for (std::size_t v = 0; v < hom.node_map.size(); ++v) pre[hom.node_map[v]].push_back(static_cast<NodeId>(v));
  for (const auto& [x, vs] : pre)
    if (vs.size() > 1)
      for (NodeId v : vs)
        if (!out[v]) return false;
  return true;
}

inline bool is_convex_match(const RewriteRule& rule, const Cospan& host, const Homomorphism& hom) {
  return is_homomorphism(rule.lhs.carrier, host.carrier, hom) && satisfies_condition_a(rule, hom) &&
         is_convex(host.carrier, detail::match_image(host.carrier, hom));
}

/// Homomorphisms L -> host with convex image that identify only right
/// boundary nodes of L, in lexicographic order of edge assignment.
inline std::vector<Match> enumerate_convex_matches(const RewriteRule& rule, const Cospan& host) {
  detail::require_host(host);
  std::vector<Match> out;
  for (auto& hom : find_homomorphisms(rule.lhs.carrier, host.carrier, rule.lhs.right))
    if (is_convex(host.carrier, detail::match_image(host.carrier, hom))) out.push_back(Match{0, std::move(hom)});
  return out;
}

/// Which matches a rewrite may use.
///
/// Convex: the image must be convex. This misses rewrites where the context
/// after the rule merges an output of L into a node downstream of another
/// image node, e.g. d = (eta + eta) ; g ; k with l = sym_1_1 placed on the
/// wire out of g and an eta wire merged after k.
///
/// Ordered: any match obeying condition (A); instead the complement may have
/// no path from the node of an output of L to the node of an input of L.
/// Every convex match passes, and this is the condition that lets the
/// complement split into a context before and a context after the rule.
enum class MatchMode { Ordered, Convex };

/// Homomorphisms L -> host that identify only right boundary nodes of L.
inline std::vector<Match> enumerate_matches(const RewriteRule& rule, const Cospan& host,
                                            MatchMode mode = MatchMode::Ordered) {
  if (mode == MatchMode::Convex) return enumerate_convex_matches(rule, host);
  detail::require_host(host);
  std::vector<Match> out;
  for (auto& hom : find_homomorphisms(rule.lhs.carrier, host.carrier, rule.lhs.right))
    out.push_back(Match{0, std::move(hom)});
  return out;
}

/// Whether some path in the complement runs from a c2 node to a c1 node.
inline bool has_output_to_input_path(const Complement& comp) {
  const auto out = detail::outgoing_edges(comp.carrier);
  std::vector<bool> seen(comp.carrier.node_count(), false);
  std::vector<NodeId> work(comp.c2.begin(), comp.c2.end());
  while (!work.empty()) {
    const NodeId v = work.back();
    work.pop_back();
    if (seen[v]) continue;
    seen[v] = true;
    for (EdgeId e : out[v])
      for (NodeId t : comp.carrier.edge(e).targets) work.push_back(t);
  }
  return std::any_of(comp.c1.begin(), comp.c1.end(), [&](NodeId v) { return seen[v]; });
}

/// Every weak boundary complement of the match, up to isomorphism.
///
/// Host nodes outside the image keep one node. An image node x whose
/// preimages lie on the boundary of L becomes a fiber: one node per input of
/// L landing on x (the c1 images), plus one node o_x for the connection
/// leaving x when that connection is not in L (the c2 images land there).
/// The in-connections of x outside L may attach to any fiber node, and each
/// choice is a separate complement, kept when no path leads from an output
/// of L back to an input of L.
inline std::vector<Complement> boundary_complement(const RewriteRule& rule, const Match& match, const Cospan& host) {
  const Hypergraph& l = rule.lhs.carrier;
  const Hypergraph& g = host.carrier;
  const auto& f = match.hom;
  if (!is_homomorphism(l, g, f)) throw Error(ErrorCode::NotASubhypergraph, "match is not a homomorphism");
  if (!satisfies_condition_a(rule, f))
    throw Error(ErrorCode::NotConvex, "match identifies nodes off the right boundary of the rule");
  const auto image = detail::match_image(g, f);
  const std::size_t ng = g.node_count();

  std::vector<bool> boundary(l.node_count(), false);
  for (NodeId v : rule.lhs.left) boundary[v] = true;
  for (NodeId v : rule.lhs.right) boundary[v] = true;
  std::vector<bool> interior(ng, false);
  for (std::size_t v = 0; v < l.node_count(); ++v)
    if (!boundary[v]) interior[f.node_map[v]] = true;

  // out-item of every host node that is not an edge of L
  std::vector<bool> free_out(ng, false);
  for (NodeId x : host.right) free_out[x] = true;
  for (std::size_t e = 0; e < g.edge_count(); ++e)
    if (!image.edges[e])
      for (NodeId s : g.edge(static_cast<EdgeId>(e)).sources) free_out[s] = true;

  for (std::size_t x = 0; x < ng; ++x) {
    if (!interior[x]) continue;
    const bool port = std::find(host.left.begin(), host.left.end(), x) != host.left.end() || free_out[x];
    bool edge = false;
    for (std::size_t e = 0; e < g.edge_count() && !edge; ++e) {
      if (image.edges[e]) continue;
      const auto& he = g.edge(static_cast<EdgeId>(e));
      edge = std::find(he.targets.begin(), he.targets.end(), x) != he.targets.end();
    }
    if (port || edge)
      throw Error(ErrorCode::DanglingEdge, "deleted node " + std::to_string(x) + " is still connected outside the match",
                  "node " + std::to_string(x));
  }

  // carrier skeleton: plain nodes, then fibers
  Hypergraph c;
  std::vector<std::optional<NodeId>> plain(ng);
  std::vector<std::vector<NodeId>> fiber(ng);
  std::vector<std::optional<NodeId>> o(ng);
  for (std::size_t x = 0; x < ng; ++x)
    if (!image.nodes[x]) plain[x] = c.add_node();
  Complement res;
  for (NodeId v : rule.lhs.left) {
    const NodeId x = f.node_map[v];
    if (interior[x]) return {};
    const NodeId u = c.add_node();
    fiber[x].push_back(u);
    res.c1.push_back(u);
  }
  for (std::size_t x = 0; x < ng; ++x)
    if (image.nodes[x] && !interior[x] && free_out[x]) {
      o[x] = c.add_node();
      fiber[x].push_back(*o[x]);
    }
  for (NodeId v : rule.lhs.right) {
    const NodeId x = f.node_map[v];
    if (!o[x]) return {};
    res.c2.push_back(*o[x]);
  }
  // every fiber node must be glued to L
  for (std::size_t x = 0; x < ng; ++x)
    if (o[x] && std::find(res.c2.begin(), res.c2.end(), *o[x]) == res.c2.end()) return {};
  for (std::size_t x = 0; x < ng; ++x)
    if (image.nodes[x] && !interior[x] && fiber[x].empty()) return {};

  auto out_node = [&](NodeId x) { return plain[x] ? *plain[x] : o[x].value(); };

  // in-connections that choose a fiber node
  struct Choice {
    NodeId host_node;
    bool is_port;
    std::size_t index;     // port position or surviving-edge slot
    std::size_t position;  // target position for edges
  };
  std::vector<Choice> choices;
  std::vector<Hyperedge> edges;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (image.edges[e]) continue;
    Hyperedge he = g.edge(static_cast<EdgeId>(e));
    for (auto& s : he.sources) s = out_node(s);
    for (std::size_t p = 0; p < he.targets.size(); ++p) {
      const NodeId x = he.targets[p];
      if (plain[x]) {
        he.targets[p] = *plain[x];
      } else {
        choices.push_back({x, false, edges.size(), p});
      }
    }
    edges.push_back(std::move(he));
  }
  res.d1.resize(host.left.size());
  for (std::size_t i = 0; i < host.left.size(); ++i) {
    const NodeId x = host.left[i];
    if (plain[x]) {
      res.d1[i] = *plain[x];
    } else {
      choices.push_back({x, true, i, 0});
    }
  }
  for (NodeId x : host.right) res.d2.push_back(out_node(x));

  std::vector<Complement> out;
  std::vector<std::size_t> pick(choices.size(), 0);
  for (;;) {
    Complement cand = res;
    cand.carrier = c;
    std::vector<Hyperedge> es = edges;
    for (std::size_t k = 0; k < choices.size(); ++k) {
      const auto& ch = choices[k];
      const NodeId u = fiber[ch.host_node][pick[k]];
      if (ch.is_port) {
        cand.d1[ch.index] = u;
      } else {
        es[ch.index].targets[ch.position] = u;
      }
    }
    for (auto& he : es) cand.carrier.add_edge(std::move(he));
    if (!has_output_to_input_path(cand)) out.push_back(std::move(cand));
    std::size_t k = 0;
    while (k < choices.size() && ++pick[k] == fiber[choices[k].host_node].size()) pick[k++] = 0;
    if (k == choices.size()) break;
  }
  return out;
}

/// Empty when the complement is a weak boundary complement for the match;
/// otherwise the first violated condition.
inline std::optional<std::string> complement_violation(const RewriteRule& rule, const Match& match,
                                                       const Complement& comp, const Cospan& host) {
  if (!satisfies_condition_a(rule, match.hom)) return "condition A: match identifies nodes off the right boundary";
  if (comp.c1.size() != rule.lhs.dom() || comp.c2.size() != rule.lhs.cod() || comp.d1.size() != host.dom() ||
      comp.d2.size() != host.cod())
    return "interface sizes differ from the rule and host";
  try {
    comp.cospan().validate();
  } catch (const Error&) {
    return "complement legs leave the carrier";
  }
  if (!is_injective(comp.c1)) return "condition B: c1 is not injective";
  for (NodeId v : comp.c1)
    if (std::find(comp.c2.begin(), comp.c2.end(), v) != comp.c2.end()) return "condition C: c1 and c2 share a node";
  if (!is_right_monogamous(comp.rearranged())) return "condition D: rearranged complement is not right-monogamous";
  if (has_output_to_input_path(comp)) return "a path leads from an output of the rule back to one of its inputs";
  if (!iso_equal(compose(detail::as_0_interface(rule.lhs), comp.cospan()), detail::as_0_interface(host)))
    return "pushout of the rule and complement is not the host";
  return std::nullopt;
}

inline bool validate_complement(const RewriteRule& rule, const Match& match, const Complement& comp,
                                const Cospan& host) {
  return !complement_violation(rule, match, comp, host);
}

/// The right pushout square: R glued to the complement along i + j.
inline Cospan apply_rewrite(const RewriteRule& rule, const Match& match, const Complement& comp, const Cospan& host) {
  (void)match;
  const Cospan e = compose(detail::as_0_interface(rule.rhs), comp.cospan());
  const auto n = static_cast<std::ptrdiff_t>(host.dom());
  Cospan res{e.carrier, {e.right.begin(), e.right.begin() + n}, {e.right.begin() + n, e.right.end()}};
  if (!is_right_monogamous(res) || !is_acyclic(res))
    throw Error(ErrorCode::ResultNotRightMonogamous, "rewrite with rule " + rule.name + " left the right-monogamous fragment");
  return res;
}

/// All weakly convex steps, one per iso class of result, in rule, match and
/// complement order.
inline std::vector<RewriteStep> rewrite_all(const std::vector<RewriteRule>& rules, const Cospan& host,
                                            MatchMode mode = MatchMode::Ordered) {
  detail::require_host(host);
  std::vector<RewriteStep> out;
  std::set<CanonicalKey> seen;
  for (std::size_t r = 0; r < rules.size(); ++r) {
    for (Match m : enumerate_matches(rules[r], host, mode)) {
      m.rule = r;
      std::vector<Complement> comps;
      try {
        comps = boundary_complement(rules[r], m, host);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DanglingEdge) throw;
        continue;
      }
      for (auto& comp : comps) {
        Cospan res = apply_rewrite(rules[r], m, comp, host);
        if (!seen.insert(cospan_key(res)).second) continue;
        out.push_back(RewriteStep{r, m, std::move(comp), std::move(res)});
      }
    }
  }
  return out;
}

enum class Strategy { Leftmost, ExhaustiveBfs };

/// Thrown by normalize; carries the states still waiting when the budget ran out.
class BudgetExhausted : public Error {
 public:
  BudgetExhausted(std::size_t steps, std::vector<Cospan> frontier)
      : Error(ErrorCode::StepBudgetExhausted,
              "step budget of " + std::to_string(steps) + " exhausted with " + std::to_string(frontier.size()) +
                  " open state(s)"),
        frontier_(std::move(frontier)) {}
  const std::vector<Cospan>& frontier() const noexcept { return frontier_; }

 private:
  std::vector<Cospan> frontier_;
};

/// Leftmost follows the first step each time. Exhaustive BFS expands every
/// iso-distinct state and returns the normal forms it reaches; a state that
/// only rewrites to states already seen is not a normal form. Each
/// expansion of a state with successors spends one step.
inline std::vector<Cospan> normalize(const std::vector<RewriteRule>& rules, const Cospan& host, Strategy strategy,
                                     std::size_t max_steps, MatchMode mode = MatchMode::Ordered) {
  std::size_t spent = 0;
  if (strategy == Strategy::Leftmost) {
    Cospan cur = host;
    for (;;) {
      auto steps = rewrite_all(rules, cur, mode);
      if (steps.empty()) return {cur};
      if (spent == max_steps) throw BudgetExhausted(max_steps, {cur});
      ++spent;
      cur = std::move(steps.front().result);
    }
  }
  std::vector<Cospan> normal;
  std::set<CanonicalKey> seen{cospan_key(host)};
  std::deque<Cospan> queue{host};
  while (!queue.empty()) {
    auto steps = rewrite_all(rules, queue.front(), mode);
    if (steps.empty()) {
      normal.push_back(std::move(queue.front()));
      queue.pop_front();
      continue;
    }
    if (spent == max_steps) throw BudgetExhausted(max_steps, {queue.begin(), queue.end()});
    ++spent;
    queue.pop_front();
    for (auto& s : steps)
      if (seen.insert(cospan_key(s.result)).second) queue.push_back(std::move(s.result));
  }
  return normal;
}

}  // namespace cmonrw
