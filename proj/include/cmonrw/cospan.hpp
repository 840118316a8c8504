#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "cmonrw/canonical.hpp"
#include "cmonrw/error.hpp"
#include "cmonrw/hypergraph.hpp"

namespace cmonrw {

/// A function {0..dom-1} -> {0..cod-1}; a morphism of the prop of functions.
struct FinFunction {
  std::size_t dom = 0;
  std::size_t cod = 0;
  std::vector<std::size_t> table;

  FinFunction() = default;
  FinFunction(std::size_t cod_, std::vector<std::size_t> table_) : dom(table_.size()), cod(cod_), table(std::move(table_)) {
    for (auto x : table)
      if (x >= cod) throw Error(ErrorCode::TypeMismatch, "function entry out of range");
  }

  static FinFunction identity(std::size_t n) {
    std::vector<std::size_t> t(n);
    std::iota(t.begin(), t.end(), std::size_t{0});
    return FinFunction(n, std::move(t));
  }

  std::size_t operator()(std::size_t x) const { return table.at(x); }

  /// (*this) then g, i.e. g ∘ this.
  FinFunction then(const FinFunction& g) const {
    if (cod != g.dom) throw Error(ErrorCode::TypeMismatch, "function composition arity mismatch");
    std::vector<std::size_t> t;
    for (auto x : table) t.push_back(g(x));
    return FinFunction(g.cod, std::move(t));
  }

  /// Disjoint union (monoidal product).
  FinFunction plus(const FinFunction& g) const {
    std::vector<std::size_t> t = table;
    for (auto x : g.table) t.push_back(x + cod);
    return FinFunction(cod + g.cod, std::move(t));
  }

  bool is_bijection() const {
    if (dom != cod) return false;
    std::vector<bool> hit(cod, false);
    for (auto x : table) {
      if (hit[x]) return false;
      hit[x] = true;
    }
    return true;
  }

  bool operator==(const FinFunction&) const = default;
};

/// Discrete cospan  |left| -> carrier <- |right|  of labelled hypergraphs.
struct Cospan {
  Hypergraph carrier;
  std::vector<NodeId> left;
  std::vector<NodeId> right;

  std::size_t dom() const { return left.size(); }
  std::size_t cod() const { return right.size(); }

  void validate() const {
    for (NodeId v : left) carrier.check_node(v);
    for (NodeId v : right) carrier.check_node(v);
  }

  bool operator==(const Cospan&) const = default;
};

// ---------------------------------------------------------------------------
// Structure

inline Cospan identity(std::size_t n) {
  Cospan c{Hypergraph(n), {}, {}};
  for (std::size_t v = 0; v < n; ++v) {
    c.left.push_back(static_cast<NodeId>(v));
    c.right.push_back(static_cast<NodeId>(v));
  }
  return c;
}

/// m -> f -> cod <- id <- cod.
inline Cospan function_to_cospan(const FinFunction& f) {
  Cospan c = identity(f.cod);
  c.left.clear();
  for (auto x : f.table) c.left.push_back(static_cast<NodeId>(x));
  return c;
}

inline FinFunction symmetry_function(std::size_t m, std::size_t n) {
  std::vector<std::size_t> t;
  for (std::size_t x = 0; x < m; ++x) t.push_back(x + n);
  for (std::size_t x = 0; x < n; ++x) t.push_back(x);
  return FinFunction(m + n, std::move(t));
}

/// Swaps a block of m wires past a block of n wires.
inline Cospan symmetry(std::size_t m, std::size_t n) { return function_to_cospan(symmetry_function(m, n)); }

namespace detail {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[b] = a;
  }
};

/// Quotient of `g` by `uf`; classes numbered in order of their least member.
inline Hypergraph quotient(const Hypergraph& g, UnionFind& uf, std::vector<NodeId>& cls) {
  cls.assign(g.node_count(), 0);
  std::vector<std::ptrdiff_t> id_of_root(g.node_count(), -1);
  NodeId next = 0;
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    const auto r = uf.find(v);
    if (id_of_root[r] < 0) id_of_root[r] = next++;
    cls[v] = static_cast<NodeId>(id_of_root[r]);
  }
  Hypergraph q(next);
  for (const auto& e : g.edges()) {
    Hyperedge he = e;
    for (auto& v : he.sources) v = cls[v];
    for (auto& v : he.targets) v = cls[v];
    q.add_edge(std::move(he));
  }
  return q;
}

/// Copies `src` into `dst`, returning the node offset.
inline NodeId append_graph(Hypergraph& dst, const Hypergraph& src) {
  const NodeId off = dst.add_nodes(src.node_count());
  for (const auto& e : src.edges()) {
    Hyperedge he = e;
    for (auto& v : he.sources) v += off;
    for (auto& v : he.targets) v += off;
    dst.add_edge(std::move(he));
  }
  return off;
}

}  // namespace detail

/// Monoidal product: disjoint union, concatenated interfaces.
inline Cospan tensor(const Cospan& a, const Cospan& b) {
  Cospan c{a.carrier, a.left, a.right};
  const NodeId off = detail::append_graph(c.carrier, b.carrier);
  for (NodeId v : b.left) c.left.push_back(v + off);
  for (NodeId v : b.right) c.right.push_back(v + off);
  return c;
}

/// Sequential composition by pushout over the shared interface.
inline Cospan compose(const Cospan& a, const Cospan& b) {
  if (a.cod() != b.dom())
    throw Error(ErrorCode::InterfaceMismatch, "cannot compose cospan with right interface " + std::to_string(a.cod()) +
                                                  " and left interface " + std::to_string(b.dom()));
  Hypergraph sum = a.carrier;
  const NodeId off = detail::append_graph(sum, b.carrier);
  detail::UnionFind uf(sum.node_count());
  for (std::size_t i = 0; i < a.cod(); ++i) uf.unite(a.right[i], b.left[i] + off);
  std::vector<NodeId> cls;
  Cospan c{detail::quotient(sum, uf, cls), {}, {}};
  for (NodeId v : a.left) c.left.push_back(cls[v]);
  for (NodeId v : b.right) c.right.push_back(cls[v + off]);
  return c;
}

/// Left-to-right composite of a non-empty chain.
inline Cospan compose_all(const std::vector<Cospan>& chain) {
  Cospan acc = chain.at(0);
  for (std::size_t i = 1; i < chain.size(); ++i) acc = compose(acc, chain[i]);
  return acc;
}

/// Rebuilds the cospan with the carrier restricted to nodes reachable from
/// nothing but itself, i.e. a fresh dense copy (useful after manual edits).
inline Cospan with_interfaces(Hypergraph g, std::vector<NodeId> left, std::vector<NodeId> right) {
  Cospan c{std::move(g), std::move(left), std::move(right)};
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Predicates

inline bool is_injective(const std::vector<NodeId>& leg) {
  std::vector<NodeId> s = leg;
  std::sort(s.begin(), s.end());
  return std::adjacent_find(s.begin(), s.end()) == s.end();
}

inline bool is_discrete(const Cospan& c) { return c.carrier.edge_count() == 0; }

/// Right leg injective with image exactly the terminal nodes, and every node
/// has at most one outgoing tentacle (no copying).
inline bool is_right_monogamous(const Cospan& c) {
  if (!is_injective(c.right)) return false;
  const auto out = out_degrees(c.carrier);
  std::vector<bool> in_right(c.carrier.node_count(), false);
  for (NodeId v : c.right) in_right[v] = true;
  for (std::size_t v = 0; v < out.size(); ++v) {
    if (out[v] > 1) return false;
    if ((out[v] == 0) != in_right[v]) return false;
  }
  return true;
}

/// Both legs mono, inputs are exactly the in-degree-0 nodes, outputs exactly
/// the out-degree-0 nodes, and all degrees are at most 1.
inline bool is_monogamous(const Cospan& c) {
  if (!is_injective(c.left) || !is_injective(c.right)) return false;
  const auto in = in_degrees(c.carrier);
  const auto out = out_degrees(c.carrier);
  std::vector<bool> in_left(c.carrier.node_count(), false), in_right(c.carrier.node_count(), false);
  for (NodeId v : c.left) in_left[v] = true;
  for (NodeId v : c.right) in_right[v] = true;
  for (std::size_t v = 0; v < in.size(); ++v) {
    if (in[v] > 1 || out[v] > 1) return false;
    if ((in[v] == 0) != in_left[v]) return false;
    if ((out[v] == 0) != in_right[v]) return false;
  }
  return true;
}

inline bool is_acyclic(const Cospan& c) { return is_acyclic(c.carrier); }

// ---------------------------------------------------------------------------
// Isomorphism

/// Pins every left position with tag 2i and right position with tag 2j+1.
inline CanonicalKey cospan_key(const Cospan& c) {
  std::vector<std::vector<std::uint64_t>> tags(c.carrier.node_count());
  for (std::size_t i = 0; i < c.left.size(); ++i) tags.at(c.left[i]).push_back(2 * i);
  for (std::size_t j = 0; j < c.right.size(); ++j) tags.at(c.right[j]).push_back(2 * j + 1);
  return canonical_form_tagged(c.carrier, std::move(tags)) + "#" + std::to_string(c.dom()) + ":" +
         std::to_string(c.cod());
}

inline bool iso_equal(const Cospan& a, const Cospan& b) {
  if (a.dom() != b.dom() || a.cod() != b.cod()) return false;
  if (a.carrier.node_count() != b.carrier.node_count() || a.carrier.edge_count() != b.carrier.edge_count())
    return false;
  return cospan_key(a) == cospan_key(b);
}

// ---------------------------------------------------------------------------
// Commutative monoids as discrete cospans

/// Inverse of function_to_cospan up to isomorphism: normalises the right leg
/// to the identity by composing the left leg with its inverse.
inline FinFunction cospan_to_function(const Cospan& c) {
  if (!is_discrete(c)) throw Error(ErrorCode::NotDiscrete, "cospan carrier has hyperedges");
  if (!is_right_monogamous(c))
    throw Error(ErrorCode::NotRightMonogamous, "discrete cospan is not right-monogamous");
  std::vector<std::size_t> inv(c.carrier.node_count());
  for (std::size_t j = 0; j < c.right.size(); ++j) inv[c.right[j]] = j;
  std::vector<std::size_t> t;
  for (NodeId v : c.left) t.push_back(inv[v]);
  return FinFunction(c.cod(), std::move(t));
}

// ---------------------------------------------------------------------------
// Connections (tentacles incl. interface positions)

/// An in-connection (edge, target position) or (left-interface index, 0); an
/// out-connection (edge, source position) or (right-interface index, 0).
struct Connection {
  bool interface = false;
  std::size_t index = 0;  // EdgeId or interface position
  std::size_t position = 0;

  static Connection edge(EdgeId e, std::size_t pos) { return {false, e, pos}; }
  static Connection port(std::size_t i) { return {true, i, 0}; }

  auto operator<=>(const Connection&) const = default;
  bool operator==(const Connection&) const = default;
};

inline std::vector<Connection> in_connections(const Cospan& c, NodeId v) {
  c.carrier.check_node(v);
  std::vector<Connection> res;
  for (std::size_t i = 0; i < c.left.size(); ++i)
    if (c.left[i] == v) res.push_back(Connection::port(i));
  for (std::size_t e = 0; e < c.carrier.edge_count(); ++e) {
    const auto& tg = c.carrier.edge(static_cast<EdgeId>(e)).targets;
    for (std::size_t p = 0; p < tg.size(); ++p)
      if (tg[p] == v) res.push_back(Connection::edge(static_cast<EdgeId>(e), p));
  }
  return res;
}

inline std::vector<Connection> out_connections(const Cospan& c, NodeId v) {
  c.carrier.check_node(v);
  std::vector<Connection> res;
  for (std::size_t i = 0; i < c.right.size(); ++i)
    if (c.right[i] == v) res.push_back(Connection::port(i));
  for (std::size_t e = 0; e < c.carrier.edge_count(); ++e) {
    const auto& sr = c.carrier.edge(static_cast<EdgeId>(e)).sources;
    for (std::size_t p = 0; p < sr.size(); ++p)
      if (sr[p] == v) res.push_back(Connection::edge(static_cast<EdgeId>(e), p));
  }
  return res;
}

/// All in-connections of every node.
inline std::vector<std::vector<Connection>> all_in_connections(const Cospan& c) {
  std::vector<std::vector<Connection>> res(c.carrier.node_count());
  for (std::size_t i = 0; i < c.left.size(); ++i) res[c.left[i]].push_back(Connection::port(i));
  for (std::size_t e = 0; e < c.carrier.edge_count(); ++e) {
    const auto& tg = c.carrier.edge(static_cast<EdgeId>(e)).targets;
    for (std::size_t p = 0; p < tg.size(); ++p) res[tg[p]].push_back(Connection::edge(static_cast<EdgeId>(e), p));
  }
  return res;
}

}  // namespace cmonrw
