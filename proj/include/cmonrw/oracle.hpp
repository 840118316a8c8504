#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "cmonrw/canonical.hpp"
#include "cmonrw/cospan.hpp"
#include "cmonrw/error.hpp"
#include "cmonrw/signature.hpp"
#include "cmonrw/term.hpp"
#include "cmonrw/translate.hpp"

namespace cmonrw {

// ---------------------------------------------------------------------------
// Equality modulo the laws, by bounded closure

struct AxiomClosure {
  Term seed;
  std::size_t bound = 0;
  std::vector<Term> members;  // in discovery order, seed first
  bool saturated = true;      // false when the member cap stopped the search
};

enum class Equality { Equal, DistinctWithinBound, Unknown };

inline std::string_view to_string(Equality e) {
  switch (e) {
    case Equality::Equal: return "equal";
    case Equality::DistinctWithinBound: return "distinct-within-bound";
    case Equality::Unknown: return "unknown";
  }
  return "unknown";
}

namespace detail {

inline bool is_id(const Term& t, std::size_t n) { return t.kind() == TermKind::Id && t.a() == n; }
inline bool is_sym(const Term& t, std::size_t m, std::size_t n) {
  return t.kind() == TermKind::Sym && t.a() == m && t.b() == n;
}

/// Every term obtained by one law application at the root, either direction.
inline void root_rewrites(const Term& t, std::vector<Term>& out) {
  using K = TermKind;
  const TermType ty = term_type(t);
  auto seq = Term::seq;
  auto par = Term::par;

  // units, introduced on any term
  out.push_back(seq(Term::id(ty.dom), t));
  out.push_back(seq(t, Term::id(ty.cod)));
  out.push_back(par(Term::id(0), t));
  out.push_back(par(t, Term::id(0)));

  if (t.kind() == K::Seq) {
    const Term &x = t.lhs(), &y = t.rhs();
    if (x.kind() == K::Seq) out.push_back(seq(x.lhs(), seq(x.rhs(), y)));
    if (y.kind() == K::Seq) out.push_back(seq(seq(x, y.lhs()), y.rhs()));
    if (x.kind() == K::Id) out.push_back(y);
    if (y.kind() == K::Id) out.push_back(x);
    // symmetry is involutive
    if (x.kind() == K::Sym && is_sym(y, x.b(), x.a())) out.push_back(Term::id(x.a() + x.b()));
    // naturality of the symmetry, both directions
    if (x.kind() == K::Par && y.kind() == K::Sym && x.rhs().kind() == K::Id && x.rhs().a() == y.b()) {
      const TermType s = term_type(x.lhs());
      if (s.cod == y.a()) out.push_back(seq(Term::sym(s.dom, y.b()), par(Term::id(y.b()), x.lhs())));
    }
    if (x.kind() == K::Sym && y.kind() == K::Par && y.lhs().kind() == K::Id && y.lhs().a() == x.b()) {
      const TermType s = term_type(y.rhs());
      if (s.dom == x.a()) out.push_back(seq(par(y.rhs(), Term::id(x.b())), Term::sym(s.cod, x.b())));
    }
    // the mirrored form (id_m + s) ; sym_{m,o} = sym_{m,n} ; (s + id_m)
    if (x.kind() == K::Par && y.kind() == K::Sym && x.lhs().kind() == K::Id && x.lhs().a() == y.a()) {
      const TermType s = term_type(x.rhs());
      if (s.cod == y.b()) out.push_back(seq(Term::sym(y.a(), s.dom), par(x.rhs(), Term::id(y.a()))));
    }
    if (x.kind() == K::Sym && y.kind() == K::Par && y.rhs().kind() == K::Id && y.rhs().a() == x.a()) {
      const TermType s = term_type(y.lhs());
      if (s.dom == x.b()) out.push_back(seq(par(Term::id(x.a()), y.lhs()), Term::sym(x.a(), s.cod)));
    }
    // interchange, right to left
    if (x.kind() == K::Par && y.kind() == K::Par && term_type(x.lhs()).cod == term_type(y.lhs()).dom)
      out.push_back(par(seq(x.lhs(), y.lhs()), seq(x.rhs(), y.rhs())));
    // symmetry on a sum
    if (x.kind() == K::Par && y.kind() == K::Par && x.lhs().kind() == K::Sym && x.rhs().kind() == K::Id &&
        y.lhs().kind() == K::Id && y.rhs().kind() == K::Sym) {
      const std::size_t m = x.lhs().a(), n = x.lhs().b(), o = x.rhs().a();
      if (y.lhs().a() == n && is_sym(y.rhs(), m, o)) out.push_back(Term::sym(m, n + o));
    }
    // commutative monoid
    if (is_sym(x, 1, 1) && y.kind() == K::Mu) out.push_back(y);
    if (x.kind() == K::Par && y.kind() == K::Mu) {
      if (x.lhs().kind() == K::Mu && is_id(x.rhs(), 1)) out.push_back(seq(par(Term::id(1), Term::mu()), Term::mu()));
      if (is_id(x.lhs(), 1) && x.rhs().kind() == K::Mu) out.push_back(seq(par(Term::mu(), Term::id(1)), Term::mu()));
      if (x.lhs().kind() == K::Eta && is_id(x.rhs(), 1)) out.push_back(Term::id(1));
    }
  }
  if (t.kind() == K::Par) {
    const Term &x = t.lhs(), &y = t.rhs();
    if (x.kind() == K::Par) out.push_back(par(x.lhs(), par(x.rhs(), y)));
    if (y.kind() == K::Par) out.push_back(par(par(x, y.lhs()), y.rhs()));
    if (is_id(x, 0)) out.push_back(y);
    if (is_id(y, 0)) out.push_back(x);
    if (x.kind() == K::Id && y.kind() == K::Id) out.push_back(Term::id(x.a() + y.a()));
    if (x.kind() == K::Seq && y.kind() == K::Seq)
      out.push_back(seq(par(x.lhs(), y.lhs()), par(x.rhs(), y.rhs())));
  }
  if (t.kind() == K::Id) {
    const std::size_t p = t.a();
    for (std::size_t m = 1; m < p; ++m) out.push_back(par(Term::id(m), Term::id(p - m)));
    for (std::size_t m = 0; m <= p; ++m) out.push_back(seq(Term::sym(m, p - m), Term::sym(p - m, m)));
    out.push_back(Term::sym(0, p));
    out.push_back(Term::sym(p, 0));
    if (p == 1) out.push_back(seq(par(Term::eta(), Term::id(1)), Term::mu()));
  }
  if (t.kind() == K::Sym) {
    const std::size_t m = t.a(), p = t.b();
    if (m == 0 || p == 0) out.push_back(Term::id(m + p));
    for (std::size_t n = 0; n <= p; ++n)
      out.push_back(seq(par(Term::sym(m, n), Term::id(p - n)), par(Term::id(n), Term::sym(m, p - n))));
  }
  if (t.kind() == K::Mu) out.push_back(seq(Term::sym(1, 1), Term::mu()));
}

/// Every term one law application away, at any position.
inline void one_step(const Term& t, std::vector<Term>& out) {
  root_rewrites(t, out);
  if (!t.is_binary()) return;
  std::vector<Term> sub;
  one_step(t.lhs(), sub);
  for (auto& s : sub)
    out.push_back(t.kind() == TermKind::Seq ? Term::seq(s, t.rhs()) : Term::par(s, t.rhs()));
  sub.clear();
  one_step(t.rhs(), sub);
  for (auto& s : sub)
    out.push_back(t.kind() == TermKind::Seq ? Term::seq(t.lhs(), s) : Term::par(t.lhs(), s));
}

}  // namespace detail

inline constexpr std::size_t kDefaultMemberCap = 200000;

/// Breadth-first fixpoint of the symmetric monoidal and commutative monoid
/// laws, applied in both directions at every position, keeping terms whose
/// size is at most `bound`.
inline AxiomClosure axiom_closure(const Term& t, std::size_t bound, std::size_t member_cap = kDefaultMemberCap,
                                  const std::function<bool(const Term&)>& stop = {}) {
  term_type(t);
  if (term_size(t) > bound)
    throw Error(ErrorCode::BoundTooSmall,
                "seed has size " + std::to_string(term_size(t)) + " above bound " + std::to_string(bound));
  AxiomClosure res{t, bound, {t}, true};
  std::unordered_set<std::string> seen{pretty_print(t)};
  std::size_t head = 0;
  std::vector<Term> next;
  while (head < res.members.size()) {
    if (stop && stop(res.members[head])) return res;
    next.clear();
    detail::one_step(res.members[head++], next);
    for (auto& n : next) {
      if (term_size(n) > bound) continue;
      if (!seen.insert(pretty_print(n)).second) continue;
      if (res.members.size() == member_cap) {
        res.saturated = false;
        return res;
      }
      res.members.push_back(std::move(n));
    }
  }
  return res;
}

inline Equality terms_equal_mod_axioms(const Term& t1, const Term& t2, std::size_t bound,
                                       std::size_t member_cap = kDefaultMemberCap) {
  if (term_type(t1) != term_type(t2)) return Equality::DistinctWithinBound;
  if (term_size(t2) > bound) throw Error(ErrorCode::BoundTooSmall, "second term exceeds the bound");
  const std::string want = pretty_print(t2);
  bool found = false;
  const auto c = axiom_closure(t1, bound, member_cap, [&](const Term& m) {
    found = found || pretty_print(m) == want;
    return found;
  });
  if (found) return Equality::Equal;
  for (const auto& m : c.members)
    if (pretty_print(m) == want) return Equality::Equal;
  if (!c.saturated) return Equality::Unknown;
  // the closure of t2 is the same set when it saturates, so it is disjoint
  return Equality::DistinctWithinBound;
}

// ---------------------------------------------------------------------------
// Brute-force rewriting: all e = c1 ; (id_k + r) ; c2 with d = c1 ; (id_k + l) ; c2

struct OracleRewrites {
  std::vector<Term> results;          // one per iso class of evaluation
  std::vector<CanonicalKey> keys;     // cospan_key of each result's evaluation
  std::vector<Term> witnesses;        // the matching c1 ; (id_k + l) ; c2, per result
  bool truncated = false;             // the wire bound cut some branch
  std::size_t states = 0;
};

namespace detail {

inline const std::string kBoxLabel = "\x01box";

/// Key with the left interface pinned by position and the right interface as
/// an unordered set.
inline CanonicalKey open_key(const Cospan& c) {
  std::vector<std::vector<std::uint64_t>> tags(c.carrier.node_count());
  for (std::size_t i = 0; i < c.left.size(); ++i) tags.at(c.left[i]).push_back(2 * i + 2);
  for (NodeId v : c.right) tags.at(v).push_back(1);
  return canonical_form_tagged(c.carrier, std::move(tags)) + "#" + std::to_string(c.dom()) + ":" +
         std::to_string(c.cod());
}

/// Whether `q` can still grow (by gluing more structure onto its right
/// interface only) into something isomorphic to `d`: a left-pinned
/// homomorphism into d that is injective off the right interface and
/// preserves in-connection counts of nodes that can no longer change.
class PrefixEmbedding {
 public:
  PrefixEmbedding(const Cospan& q, const Cospan& d, const std::vector<std::size_t>& d_in)
      : q_(q), d_(d), d_in_(d_in), q_in_(in_connection_counts_of(q)) {}

  bool exists() {
    open_.assign(q_.carrier.node_count(), false);
    for (NodeId v : q_.right) open_[v] = true;
    map_.assign(q_.carrier.node_count(), std::nullopt);
    pre_.assign(d_.carrier.node_count(), {});
    used_.assign(d_.carrier.edge_count(), false);
    for (std::size_t i = 0; i < q_.left.size(); ++i)
      if (!one(q_.left[i], d_.left[i], nullptr)) return false;
    const auto order = topological_edge_order(q_.carrier);
    if (!order) return false;
    order_ = *order;
    return edges_from(0);
  }

 private:
  static std::vector<std::size_t> in_connection_counts_of(const Cospan& c) {
    std::vector<std::size_t> n(c.carrier.node_count(), 0);
    for (NodeId v : c.left) ++n[v];
    for (const auto& e : c.carrier.edges())
      for (NodeId t : e.targets) ++n[t];
    return n;
  }

  bool fits(NodeId x) const {
    std::size_t total = 0;
    bool closed = false;
    for (NodeId p : pre_[x]) {
      total += q_in_[p];
      closed = closed || !open_[p];
    }
    return closed ? total == d_in_[x] : total <= d_in_[x];
  }

  bool one(NodeId p, NodeId x, std::vector<NodeId>* fresh) {
    if (map_[p]) return *map_[p] == x;
    for (NodeId o : pre_[x])
      if (!open_[o] || !open_[p]) return false;
    map_[p] = x;
    pre_[x].push_back(p);
    if (fresh) fresh->push_back(p);
    if (!fits(x)) {
      pre_[x].pop_back();
      map_[p].reset();
      if (fresh) fresh->pop_back();
      return false;
    }
    return true;
  }

  void undo(std::vector<NodeId>& fresh) {
    for (auto it = fresh.rbegin(); it != fresh.rend(); ++it) {
      pre_[*map_[*it]].pop_back();
      map_[*it].reset();
    }
    fresh.clear();
  }

  bool edges_from(std::size_t k) {
    if (k == order_.size()) return true;
    const auto& pe = q_.carrier.edge(order_[k]);
    for (std::size_t h = 0; h < d_.carrier.edge_count(); ++h) {
      if (used_[h]) continue;
      const auto& he = d_.carrier.edge(static_cast<EdgeId>(h));
      if (he.label != pe.label || he.sources.size() != pe.sources.size() || he.targets.size() != pe.targets.size())
        continue;
      std::vector<NodeId> fresh;
      bool ok = true;
      for (std::size_t i = 0; ok && i < pe.sources.size(); ++i) ok = one(pe.sources[i], he.sources[i], &fresh);
      for (std::size_t i = 0; ok && i < pe.targets.size(); ++i) ok = one(pe.targets[i], he.targets[i], &fresh);
      if (ok) {
        used_[h] = true;
        if (edges_from(k + 1)) return true;
        used_[h] = false;
      }
      undo(fresh);
    }
    return false;
  }

  const Cospan& q_;
  const Cospan& d_;
  const std::vector<std::size_t>& d_in_;
  std::vector<std::size_t> q_in_;
  std::vector<bool> open_;
  std::vector<std::optional<NodeId>> map_;
  std::vector<std::vector<NodeId>> pre_;
  std::vector<bool> used_;
  std::vector<EdgeId> order_;
};

/// One layer over `w` open wires: wire p with val[p] = t > 0 joins block t of
/// the `blocks` merged blocks, val[p] = 0 stays open.
struct Layer {
  Cospan cospan;
  Term term = Term::id(0);
};

inline Term merges_then(const std::vector<std::size_t>& sizes, const Term& after) {
  std::vector<Term> trees;
  for (auto s : sizes) trees.push_back(merge_tree(s));
  Term m = trees.empty() ? Term::id(0) : par_all(trees);
  return seq_simplified(m, after);
}

/// Generator layer: blocks feed the generator, the rest stays after its outputs.
/// For the box (`label` empty) the rest comes first and the blocks are left open.
inline Layer make_layer(const std::vector<std::size_t>& val, std::size_t blocks, const std::string& label,
                        std::size_t coarity, bool rest_first) {
  const std::size_t w = val.size();
  std::vector<std::vector<std::size_t>> block(blocks + 1);
  for (std::size_t p = 0; p < w; ++p) block[val[p]].push_back(p);
  const std::size_t rest = block[0].size();
  std::vector<std::size_t> dest(w);
  std::size_t slot = rest_first ? rest : 0;
  for (std::size_t t = 1; t <= blocks; ++t)
    for (auto p : block[t]) dest[p] = slot++;
  slot = rest_first ? 0 : w - rest;
  for (auto p : block[0]) dest[p] = slot++;

  std::vector<std::size_t> sizes;
  for (std::size_t t = 1; t <= blocks; ++t) sizes.push_back(block[t].size());
  Layer out;
  Hypergraph g;
  std::vector<NodeId> merged, kept;
  for (std::size_t t = 0; t < blocks; ++t) merged.push_back(g.add_node());
  for (std::size_t r = 0; r < rest; ++r) kept.push_back(g.add_node());
  std::vector<NodeId> left(w);
  std::size_t r = 0;
  for (std::size_t p = 0; p < w; ++p) left[p] = val[p] ? merged[val[p] - 1] : kept[r++];
  std::vector<NodeId> right;
  if (label.empty()) {
    right = kept;
    right.insert(right.end(), merged.begin(), merged.end());
    out.term = seq_simplified(permutation_term(dest), par_simplified(Term::id(rest), merges_then(sizes, Term::id(blocks))));
  } else {
    const NodeId first = g.add_nodes(coarity);
    std::vector<NodeId> outs;
    for (std::size_t k = 0; k < coarity; ++k) outs.push_back(first + static_cast<NodeId>(k));
    g.add_edge(label, merged, outs);
    right = outs;
    right.insert(right.end(), kept.begin(), kept.end());
    out.term = seq_simplified(permutation_term(dest),
                              par_simplified(merges_then(sizes, Term::gen(label, blocks, coarity)), Term::id(rest)));
  }
  out.cospan = Cospan{std::move(g), std::move(left), std::move(right)};
  return out;
}

/// Final layer: every open wire joins one of the m outputs.
inline Layer final_layer(const std::vector<std::size_t>& val, std::size_t m) {
  const std::size_t w = val.size();
  std::vector<std::size_t> count(m, 0);
  for (auto v : val) ++count[v];
  std::vector<std::size_t> start(m, 0);
  for (std::size_t q = 1; q < m; ++q) start[q] = start[q - 1] + count[q - 1];
  std::vector<std::size_t> dest(w);
  for (std::size_t p = 0; p < w; ++p) dest[p] = start[val[p]]++;
  Hypergraph g(m);
  std::vector<NodeId> left(w), right(m);
  for (std::size_t p = 0; p < w; ++p) left[p] = static_cast<NodeId>(val[p]);
  for (std::size_t q = 0; q < m; ++q) right[q] = static_cast<NodeId>(q);
  return Layer{Cospan{std::move(g), std::move(left), std::move(right)},
               seq_simplified(permutation_term(dest), merges_then(count, Term::id(m)))};
}

/// Calls fn for every vector in {0..k-1}^w.
inline void for_each_assignment(std::size_t w, std::size_t k, const std::function<void(const std::vector<std::size_t>&)>& fn) {
  if (k == 0) {
    if (w == 0) fn({});
    return;
  }
  std::vector<std::size_t> val(w, 0);
  for (;;) {
    fn(val);
    std::size_t p = 0;
    while (p < w && ++val[p] == k) val[p++] = 0;
    if (p == w) return;
  }
}

}  // namespace detail

/// All e with d = c1 ; (id_k + l) ; c2 and e = c1 ; (id_k + r) ; c2, found by
/// building the contexts layer by layer: each layer feeds one generator (or
/// the rule's left side, exactly once) with merges of open wires, and a last
/// layer merges what is left into the m outputs. `bound` caps the number of
/// open wires. d = c1 ; (id_k + l) ; c2 is decided on the evaluations.
inline OracleRewrites enumerate_rewrites_bruteforce(const Term& l, const Term& r, const Term& d, const Signature& sig,
                                                    std::size_t bound) {
  const TermType tl = term_type(l), tr = term_type(r), td = term_type(d);
  if (tl != tr) throw Error(ErrorCode::TypeMismatch, "rule sides have different types");
  OracleRewrites res;
  const Cospan dc = eval_term(d, sig);
  const Cospan lc = eval_term(l, sig), rc = eval_term(r, sig);
  const CanonicalKey dkey = cospan_key(dc);
  std::vector<std::size_t> d_in(dc.carrier.node_count(), 0);
  for (NodeId v : dc.left) ++d_in[v];
  for (const auto& e : dc.carrier.edges())
    for (NodeId t : e.targets) ++d_in[t];

  std::map<std::string, std::size_t> remaining;
  for (const auto& e : dc.carrier.edges()) ++remaining[e.label];
  for (const auto& e : lc.carrier.edges())
    if (remaining[e.label]-- == 0) return res;

  Hypergraph box_graph(tl.dom + tl.cod);
  {
    std::vector<NodeId> src, tgt;
    for (std::size_t p = 0; p < tl.dom; ++p) src.push_back(static_cast<NodeId>(p));
    for (std::size_t q = 0; q < tl.cod; ++q) tgt.push_back(static_cast<NodeId>(tl.dom + q));
    box_graph.add_edge(detail::kBoxLabel, src, tgt);
  }
  Cospan box{box_graph, {}, {}};
  for (std::size_t p = 0; p < tl.dom; ++p) box.left.push_back(static_cast<NodeId>(p));
  for (std::size_t q = 0; q < tl.cod; ++q) box.right.push_back(static_cast<NodeId>(tl.dom + q));

  struct State {
    bool placed = false;
    Cospan pre;     // before the box: n -> wires; after: the fixed c1, n -> k + i
    Term pre_term = Term::id(0);
    std::size_t k = 0;
    Cospan post;    // after the box: k + j -> wires
    Term post_term = Term::id(0);
    std::map<std::string, std::size_t> left_over;
    std::size_t wires() const { return placed ? post.cod() : pre.cod(); }
  };
  std::set<CanonicalKey> seen_states;
  std::set<CanonicalKey> seen_results;

  auto with_l = [&](const State& s) {
    return compose(s.pre, compose(tensor(identity(s.k), lc), s.post));
  };
  auto viable = [&](const State& s) {
    const Cospan q = s.placed ? with_l(s) : s.pre;
    return detail::PrefixEmbedding(q, dc, d_in).exists();
  };
  auto key_of = [&](const State& s) {
    if (!s.placed) return "U" + detail::open_key(s.pre);
    return "P" + detail::open_key(compose(s.pre, compose(tensor(identity(s.k), box), s.post)));
  };

  std::function<void(const State&)> visit = [&](const State& s) {
    ++res.states;
    const std::size_t w = s.wires();
    bool all_used = true;
    for (const auto& [label, n] : s.left_over) all_used = all_used && n == 0;

    auto push = [&](State next) {
      if (next.wires() > bound) {
        res.truncated = true;
        return;
      }
      if (!viable(next)) return;
      if (!seen_states.insert(key_of(next)).second) return;
      visit(next);
    };

    if (s.placed && all_used) {
      detail::for_each_assignment(w, td.cod, [&](const std::vector<std::size_t>& val) {
        const auto fin = detail::final_layer(val, td.cod);
        const Cospan post = compose(s.post, fin.cospan);
        const Cospan dcand = compose(s.pre, compose(tensor(identity(s.k), lc), post));
        if (cospan_key(dcand) != dkey) return;
        const Cospan ecand = compose(s.pre, compose(tensor(identity(s.k), rc), post));
        if (!seen_results.insert(cospan_key(ecand)).second) return;
        const Term c2 = seq_simplified(s.post_term, fin.term);
        res.results.push_back(seq_simplified(s.pre_term, seq_simplified(par_simplified(Term::id(s.k), r), c2)));
        res.witnesses.push_back(seq_simplified(s.pre_term, seq_simplified(par_simplified(Term::id(s.k), l), c2)));
        res.keys.push_back(cospan_key(ecand));
      });
    }
    if (!s.placed) {
      detail::for_each_assignment(w, tl.dom + 1, [&](const std::vector<std::size_t>& val) {
        const auto lay = detail::make_layer(val, tl.dom, {}, 0, true);
        State next = s;
        next.placed = true;
        next.pre = compose(s.pre, lay.cospan);
        next.pre_term = seq_simplified(s.pre_term, lay.term);
        next.k = w - std::count_if(val.begin(), val.end(), [](auto v) { return v != 0; });
        next.post = identity(next.k + tl.cod);
        next.post_term = Term::id(next.k + tl.cod);
        push(std::move(next));
      });
    }
    for (const auto& [label, n] : s.left_over) {
      if (n == 0) continue;
      const auto& ty = sig.at(label);
      detail::for_each_assignment(w, ty.arity + 1, [&](const std::vector<std::size_t>& val) {
        const auto lay = detail::make_layer(val, ty.arity, label, ty.coarity, false);
        State next = s;
        --next.left_over[label];
        if (s.placed) {
          next.post = compose(s.post, lay.cospan);
          next.post_term = seq_simplified(s.post_term, lay.term);
        } else {
          next.pre = compose(s.pre, lay.cospan);
          next.pre_term = seq_simplified(s.pre_term, lay.term);
        }
        push(std::move(next));
      });
    }
  };

  State start;
  start.pre = identity(td.dom);
  start.pre_term = Term::id(td.dom);
  start.left_over = remaining;
  seen_states.insert(key_of(start));
  visit(start);
  return res;
}

}  // namespace cmonrw
