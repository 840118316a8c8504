#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

#include "cmonrw/cospan.hpp"
#include "cmonrw/decompose.hpp"
#include "cmonrw/error.hpp"
#include "cmonrw/signature.hpp"
#include "cmonrw/term.hpp"
#include "cmonrw/translate.hpp"

namespace cmonrw {

struct Level0Decomposition {
  Cospan m;           // monogamous: the level-0 edges
  std::size_t k = 0;  // order-0 outputs passed through untouched
  Cospan d;           // discrete: realises the order-1 left-amonogamous nodes
  Cospan rest;        // everything of level >= 1
};

/// m ; (id_k + (d ; rest)).
inline Cospan recompose(const Level0Decomposition& l) {
  return compose(l.m, tensor(identity(l.k), compose(l.d, l.rest)));
}

/// Splits off the level-0 edges. The right interface of `g` must list its
/// order-0 nodes first.
inline Level0Decomposition level0_decompose(const Cospan& g) {
  const OrderInfo info = compute_orders(g);
  const auto& h = g.carrier;
  const std::size_t nn = h.node_count();
  std::size_t k = 0;
  while (k < g.right.size() && info.node_order[g.right[k]] == 0) ++k;
  for (std::size_t q = k; q < g.right.size(); ++q)
    if (info.node_order[g.right[q]] == 0)
      throw Error(ErrorCode::BadInterfaceOrder, "order-0 output at position " + std::to_string(q) +
                                                    " follows an output of higher order");

  const auto ins = all_in_connections(g);
  auto feeds_level0 = [&](const Connection& c) { return c.interface || info.edge_level[c.index] == 0; };
  // order-0 nodes that feed an edge of level >= 1
  std::vector<bool> passthrough(nn, false);
  for (std::size_t e = 0; e < h.edge_count(); ++e)
    if (info.edge_level[e] > 0)
      for (NodeId s : h.edge(static_cast<EdgeId>(e)).sources)
        if (info.node_order[s] == 0) passthrough[s] = true;

  Level0Decomposition res;
  res.k = k;
  // M: order-0 nodes, then one fresh node per level-0 in-connection of a higher-order node
  Hypergraph hm;
  std::vector<std::optional<NodeId>> m_of(nn);
  for (std::size_t v = 0; v < nn; ++v)
    if (info.node_order[v] == 0) m_of[v] = hm.add_node();
  std::map<Connection, NodeId> fresh;
  std::vector<std::vector<NodeId>> fresh_of(nn);  // G node -> its fresh M nodes
  for (std::size_t v = 0; v < nn; ++v) {
    if (info.node_order[v] == 0) continue;
    for (const auto& c : ins[v])
      if (feeds_level0(c)) {
        const NodeId u = hm.add_node();
        fresh[c] = u;
        fresh_of[v].push_back(u);
      }
  }
  auto m_target = [&](NodeId v, const Connection& c) { return m_of[v] ? *m_of[v] : fresh.at(c); };
  for (std::size_t e = 0; e < h.edge_count(); ++e) {
    if (info.edge_level[e] != 0) continue;
    Hyperedge he = h.edge(static_cast<EdgeId>(e));
    for (auto& s : he.sources) s = m_of[s].value();
    for (std::size_t p = 0; p < he.targets.size(); ++p)
      he.targets[p] = m_target(he.targets[p], Connection::edge(static_cast<EdgeId>(e), p));
    hm.add_edge(std::move(he));
  }
  res.m.carrier = std::move(hm);
  for (std::size_t i = 0; i < g.left.size(); ++i) res.m.left.push_back(m_target(g.left[i], Connection::port(i)));
  for (std::size_t q = 0; q < k; ++q) res.m.right.push_back(*m_of[g.right[q]]);

  // D and the left interface of the rest, walking G nodes in ascending order
  Hypergraph hd;
  Hypergraph hr;
  std::vector<std::optional<NodeId>> r_of(nn);
  for (std::size_t v = 0; v < nn; ++v)
    if (passthrough[v] || info.node_order[v] > 0) r_of[v] = hr.add_node();
  for (std::size_t v = 0; v < nn; ++v) {
    if (passthrough[v]) {
      res.m.right.push_back(*m_of[v]);
      const NodeId x = hd.add_node();
      res.d.left.push_back(x);
      res.d.right.push_back(x);
      res.rest.left.push_back(*r_of[v]);
    } else if (info.node_order[v] == 1 && info.left_amonogamous[v]) {
      const NodeId x = hd.add_node();
      for (NodeId u : fresh_of[v]) {
        res.m.right.push_back(u);
        res.d.left.push_back(x);
      }
      res.d.right.push_back(x);
      res.rest.left.push_back(*r_of[v]);
    } else {
      for (NodeId u : fresh_of[v]) {
        res.m.right.push_back(u);
        const NodeId x = hd.add_node();
        res.d.left.push_back(x);
        res.d.right.push_back(x);
        res.rest.left.push_back(*r_of[v]);
      }
    }
  }
  res.d.carrier = std::move(hd);
  for (std::size_t e = 0; e < h.edge_count(); ++e) {
    if (info.edge_level[e] == 0) continue;
    Hyperedge he = h.edge(static_cast<EdgeId>(e));
    for (auto& s : he.sources) s = r_of[s].value();
    for (auto& t : he.targets) t = r_of[t].value();
    hr.add_edge(std::move(he));
  }
  res.rest.carrier = std::move(hr);
  for (std::size_t q = k; q < g.right.size(); ++q) res.rest.right.push_back(*r_of[g.right[q]]);
  return res;
}

struct LevelFactor {
  Cospan m;
  std::size_t k = 0;
  Cospan d;
};

/// g = pi-ordered composite M0 ; (id_k0 + (D0 ; M1 ; (id_k1 + (D1 ; ...)))) ; pi.
struct LevelFactorisation {
  std::vector<LevelFactor> factors;
  /// Permutation from the sorted terminal order back to g's right interface.
  FinFunction pi;
};

inline Cospan recompose(const LevelFactorisation& f) {
  Cospan acc = identity(0);
  for (auto it = f.factors.rbegin(); it != f.factors.rend(); ++it)
    acc = compose(it->m, tensor(identity(it->k), compose(it->d, acc)));
  return compose(acc, function_to_cospan(f.pi));
}

/// Factorises into alternating monogamous and discrete levels. Terminal
/// nodes are sorted by (order, node id) first; `pi` restores g's order.
inline LevelFactorisation factorise_into_levels(const Cospan& g) {
  const OrderInfo info = compute_orders(g);
  std::vector<std::size_t> perm(g.right.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
    const NodeId x = g.right[a], y = g.right[b];
    return std::pair(info.node_order[x], x) < std::pair(info.node_order[y], y);
  });
  LevelFactorisation res;
  res.pi = FinFunction(g.right.size(), perm);
  Cospan cur = g;
  for (std::size_t q = 0; q < perm.size(); ++q) cur.right[q] = g.right[perm[q]];
  for (std::size_t round = 0;; ++round) {
    if (round > info.max_order) throw Error(ErrorCode::Cyclic, "level factorisation did not terminate");
    Level0Decomposition l = level0_decompose(cur);
    res.factors.push_back({std::move(l.m), l.k, std::move(l.d)});
    if (l.rest.carrier.node_count() == 0 && l.rest.dom() == 0 && l.rest.cod() == 0) break;
    cur = std::move(l.rest);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Readback

/// A term for a monogamous acyclic cospan: its edges one at a time in
/// topological order, with permutations routing the wires.
inline Term readback_monogamous(const Cospan& c) {
  if (!is_monogamous(c)) throw Error(ErrorCode::NotRightMonogamous, "factor is not monogamous");
  const auto order = topological_edge_order(c.carrier);
  if (!order) throw Error(ErrorCode::Cyclic, "cospan carrier is cyclic");
  std::vector<NodeId> wires = c.left;
  std::vector<Term> steps;
  for (EdgeId e : *order) {
    const auto& he = c.carrier.edge(e);
    std::vector<std::size_t> dest(wires.size());
    std::vector<bool> used(wires.size(), false);
    for (std::size_t i = 0; i < he.sources.size(); ++i) {
      const auto pos = static_cast<std::size_t>(std::find(wires.begin(), wires.end(), he.sources[i]) - wires.begin());
      dest[pos] = i;
      used[pos] = true;
    }
    std::vector<NodeId> next(he.targets.begin(), he.targets.end());
    std::size_t slot = he.sources.size();
    for (std::size_t p = 0; p < wires.size(); ++p)
      if (!used[p]) {
        dest[p] = slot++;
        next.push_back(wires[p]);
      }
    steps.push_back(permutation_term(dest));
    steps.push_back(par_simplified(Term::gen(he.label, he.sources.size(), he.targets.size()),
                                   Term::id(wires.size() - he.sources.size())));
    wires = std::move(next);
  }
  std::vector<std::size_t> dest(wires.size());
  for (std::size_t p = 0; p < wires.size(); ++p)
    dest[p] = static_cast<std::size_t>(std::find(c.right.begin(), c.right.end(), wires[p]) - c.right.begin());
  steps.push_back(permutation_term(dest));
  return seq_all(steps, c.dom());
}

/// A term whose interpretation is isomorphic to g.
inline Term readback_term(const Cospan& g, const Signature& sig) {
  g.carrier.validate(sig);
  const LevelFactorisation f = factorise_into_levels(g);
  Term acc = Term::id(0);
  for (auto it = f.factors.rbegin(); it != f.factors.rend(); ++it) {
    const Term d = synthesize_cmon_term(cospan_to_function(it->d));
    acc = seq_simplified(readback_monogamous(it->m), par_simplified(Term::id(it->k), seq_simplified(d, acc)));
  }
  return seq_simplified(acc, synthesize_cmon_term(f.pi));
}

}  // namespace cmonrw
