#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cmonrw/cospan.hpp"
#include "cmonrw/error.hpp"
#include "cmonrw/hypergraph.hpp"

namespace cmonrw {

// ---------------------------------------------------------------------------
// Orders and levels

inline void require_right_monogamous_acyclic(const Cospan& c) {
  if (!is_right_monogamous(c)) throw Error(ErrorCode::NotRightMonogamous, "cospan is not right-monogamous");
  if (!is_acyclic(c.carrier)) throw Error(ErrorCode::Cyclic, "cospan carrier is cyclic");
}

/// Number of in-connections of every node, interface positions included.
inline std::vector<std::size_t> in_connection_counts(const Cospan& c) {
  auto counts = in_degrees(c.carrier);
  for (NodeId v : c.left) ++counts.at(v);
  return counts;
}

/// Nodes whose in-connections (edges and input positions) do not number
/// exactly one: the places where a multiplication or unit sits.
inline std::vector<NodeId> left_amonogamous_nodes(const Cospan& c) {
  if (!is_right_monogamous(c)) throw Error(ErrorCode::NotRightMonogamous, "cospan is not right-monogamous");
  const auto counts = in_connection_counts(c);
  std::vector<NodeId> out;
  for (std::size_t v = 0; v < counts.size(); ++v)
    if (counts[v] != 1) out.push_back(static_cast<NodeId>(v));
  return out;
}

struct OrderInfo {
  std::vector<std::size_t> node_order;
  std::vector<std::size_t> edge_level;
  std::vector<bool> left_amonogamous;
  std::size_t max_order = 0;
};

/// Order of every node and level of every edge in one topological sweep.
inline OrderInfo compute_orders(const Cospan& c) {
  require_right_monogamous_acyclic(c);
  const auto& g = c.carrier;
  OrderInfo info;
  const auto counts = in_connection_counts(c);
  info.left_amonogamous.resize(g.node_count());
  for (std::size_t v = 0; v < counts.size(); ++v) info.left_amonogamous[v] = counts[v] != 1;
  std::vector<std::size_t> best_in(g.node_count(), 0);
  info.edge_level.assign(g.edge_count(), 0);
  auto order_of = [&](NodeId v) { return best_in[v] + (info.left_amonogamous[v] ? 1 : 0); };
  const auto topo = topological_edge_order(g);
  for (EdgeId e : *topo) {
    std::size_t lvl = 0;
    for (NodeId s : g.edge(e).sources) lvl = std::max(lvl, order_of(s));
    info.edge_level[e] = lvl;
    for (NodeId t : g.edge(e).targets) best_in[t] = std::max(best_in[t], lvl);
  }
  info.node_order.resize(g.node_count());
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    info.node_order[v] = order_of(static_cast<NodeId>(v));
    info.max_order = std::max(info.max_order, info.node_order[v]);
  }
  return info;
}

inline std::size_t node_order(const Cospan& c, NodeId v) {
  c.carrier.check_node(v);
  return compute_orders(c).node_order[v];
}

inline std::size_t edge_level(const Cospan& c, EdgeId e) {
  if (e >= c.carrier.edge_count()) throw Error(ErrorCode::UnknownNode, "unknown hyperedge " + std::to_string(e));
  return compute_orders(c).edge_level[e];
}

// ---------------------------------------------------------------------------
// Cuts

/// An ordered partition of the in-connections of a terminal node.
struct Cut {
  NodeId node = 0;
  std::vector<std::vector<Connection>> blocks;

  static Cut trivial(const Cospan& c, NodeId v) { return {v, {in_connections(c, v)}}; }
  bool operator==(const Cut&) const = default;
};

struct CutResult {
  Cospan cospan;
  /// New right-interface position -> original right-interface position.
  FinFunction reconnect;
};

namespace detail {

inline void check_partition(const Cospan& c, const Cut& cut) {
  auto want = in_connections(c, cut.node);
  std::vector<Connection> got;
  for (const auto& b : cut.blocks) got.insert(got.end(), b.begin(), b.end());
  std::sort(want.begin(), want.end());
  std::sort(got.begin(), got.end());
  if (got != want)
    throw Error(ErrorCode::PartitionMismatch,
                "cut of node " + std::to_string(cut.node) + " does not partition its in-connections");
}

}  // namespace detail

/// Splits every cut node into one fresh node per block, all at once.
/// Each cut node must be terminal; its right-interface position expands to
/// the block nodes in order.
inline CutResult apply_cuts(const Cospan& c, const std::vector<Cut>& cuts) {
  const auto& g = c.carrier;
  const auto out = out_degrees(g);
  std::vector<const Cut*> cut_of(g.node_count(), nullptr);
  for (const auto& cut : cuts) {
    g.check_node(cut.node);
    if (out[cut.node] != 0)
      throw Error(ErrorCode::NotTerminal, "node " + std::to_string(cut.node) + " is not terminal");
    if (cut_of[cut.node]) throw Error(ErrorCode::PartitionMismatch, "node " + std::to_string(cut.node) + " cut twice");
    detail::check_partition(c, cut);
    cut_of[cut.node] = &cut;
  }
  // new ids: uncut nodes keep one node, cut nodes get one per block
  std::vector<std::vector<NodeId>> image(g.node_count());
  Hypergraph h;
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    const std::size_t k = cut_of[v] ? cut_of[v]->blocks.size() : 1;
    for (std::size_t i = 0; i < k; ++i) image[v].push_back(h.add_node());
  }
  auto place = [&](NodeId v, const Connection& conn) -> NodeId {
    if (!cut_of[v]) return image[v][0];
    const auto& blocks = cut_of[v]->blocks;
    for (std::size_t b = 0; b < blocks.size(); ++b)
      if (std::find(blocks[b].begin(), blocks[b].end(), conn) != blocks[b].end()) return image[v][b];
    throw Error(ErrorCode::PartitionMismatch, "in-connection missing from cut");
  };
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    Hyperedge he = g.edge(static_cast<EdgeId>(e));
    for (auto& s : he.sources) s = image[s].at(0);  // cut nodes are never sources
    for (std::size_t p = 0; p < he.targets.size(); ++p)
      he.targets[p] = place(he.targets[p], Connection::edge(static_cast<EdgeId>(e), p));
    h.add_edge(std::move(he));
  }
  CutResult res{Cospan{std::move(h), {}, {}}, {}};
  for (std::size_t i = 0; i < c.left.size(); ++i) res.cospan.left.push_back(place(c.left[i], Connection::port(i)));
  std::vector<std::size_t> recon;
  for (std::size_t q = 0; q < c.right.size(); ++q) {
    const NodeId v = c.right[q];
    if (!cut_of[v]) {
      res.cospan.right.push_back(image[v][0]);
      recon.push_back(q);
      continue;
    }
    for (NodeId u : image[v]) {
      res.cospan.right.push_back(u);
      recon.push_back(q);
    }
  }
  res.reconnect = FinFunction(c.right.size(), std::move(recon));
  return res;
}

inline CutResult apply_cut(const Cospan& c, const Cut& cut) { return apply_cuts(c, {cut}); }

/// One cut per terminal node; reconnect is the blockwise sum.
inline CutResult complete_cut(const Cospan& c, const std::vector<Cut>& cuts) {
  const auto terminal = terminal_nodes(c.carrier);
  for (NodeId v : terminal) {
    const bool present = std::any_of(cuts.begin(), cuts.end(), [&](const Cut& k) { return k.node == v; });
    if (!present) throw Error(ErrorCode::MissingCut, "no cut given for terminal node " + std::to_string(v));
  }
  return apply_cuts(c, cuts);
}

// ---------------------------------------------------------------------------
// Weak decomposition

struct UpDownSplit {
  std::vector<Connection> upper;
  std::vector<Connection> lower;
  bool operator==(const UpDownSplit&) const = default;
};

/// Left-shared node -> how its outside in-connections are split.
using UpDownSignature = std::map<NodeId, UpDownSplit>;

/// In-connections of v in the cospan that do not come from an edge of `l`.
inline std::vector<Connection> external_in_connections(const Cospan& c, const SubHypergraph& l, NodeId v) {
  std::vector<Connection> out;
  for (const auto& conn : in_connections(c, v))
    if (conn.interface || !l.edges[conn.index]) out.push_back(conn);
  return out;
}

/// Nodes of `l` with in-connections from outside `l`.
inline std::vector<NodeId> left_shared_nodes(const Cospan& c, const SubHypergraph& l) {
  std::vector<NodeId> out;
  for (std::size_t v = 0; v < c.carrier.node_count(); ++v)
    if (l.nodes[v] && !external_in_connections(c, l, static_cast<NodeId>(v)).empty())
      out.push_back(static_cast<NodeId>(v));
  return out;
}

/// Every outside in-connection goes to the lower part.
inline UpDownSignature all_lower_signature(const Cospan& c, const SubHypergraph& l) {
  UpDownSignature tau;
  for (NodeId v : left_shared_nodes(c, l)) tau[v] = UpDownSplit{{}, external_in_connections(c, l, v)};
  return tau;
}

struct WeakDecomposition {
  Cospan c1;   // m -> k + i
  std::size_t k = 0;
  Cospan lc;   // i -> j
  Cospan c2;   // k + j -> n
};

/// The three-part composite c1 ; (id_k + lc) ; c2.
inline Cospan recompose(const WeakDecomposition& w) {
  return compose(compose(w.c1, tensor(identity(w.k), w.lc)), w.c2);
}

namespace detail {

/// Edges outside `l` with a path into a node of `l`.
inline std::vector<bool> edges_reaching(const Hypergraph& g, const SubHypergraph& l) {
  std::vector<bool> reach_node = l.nodes;  // node has a path into l (or is in l)
  std::vector<bool> reach(g.edge_count(), false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      if (reach[e] || l.edges[e]) continue;
      const auto& he = g.edge(static_cast<EdgeId>(e));
      if (std::none_of(he.targets.begin(), he.targets.end(), [&](NodeId t) { return reach_node[t]; })) continue;
      reach[e] = true;
      changed = true;
      for (NodeId s : he.sources) reach_node[s] = true;
    }
  }
  return reach;
}

}  // namespace detail

/// How a convex L splits the carrier: C1 is everything feeding L, C2 the rest.
struct WeakRegions {
  std::vector<bool> c1_edges, c2_edges;
  std::vector<bool> c1_nodes, c2_nodes;
  std::vector<NodeId> i_nodes;  // in C1 and L only
  std::vector<NodeId> j_nodes;  // in C2 and L only
  std::vector<NodeId> k_nodes;  // in C1 and C2, not L
  std::vector<NodeId> l_nodes;  // in all three
};

inline WeakRegions weak_regions(const Cospan& gc, const SubHypergraph& l) {
  require_right_monogamous_acyclic(gc);
  const auto& g = gc.carrier;
  if (l.nodes.size() != g.node_count() || l.edges.size() != g.edge_count() || !is_closed(g, l))
    throw Error(ErrorCode::NotASubhypergraph, "L is not a sub-hypergraph of the carrier");
  if (!is_convex(g, l)) throw Error(ErrorCode::NotConvex, "L is not convex");
  const std::size_t nn = g.node_count();
  WeakRegions r;
  r.c1_edges = detail::edges_reaching(g, l);
  r.c2_edges.assign(g.edge_count(), false);
  r.c1_nodes.assign(nn, false);
  r.c2_nodes.assign(nn, false);
  for (NodeId v : gc.left) r.c1_nodes[v] = true;
  for (NodeId v : gc.right) r.c2_nodes[v] = true;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (l.edges[e]) continue;
    if (!r.c1_edges[e]) r.c2_edges[e] = true;
    auto& side = r.c1_edges[e] ? r.c1_nodes : r.c2_nodes;
    const auto& he = g.edge(static_cast<EdgeId>(e));
    for (NodeId v : he.sources) side[v] = true;
    for (NodeId v : he.targets) side[v] = true;
  }
  for (std::size_t v = 0; v < nn; ++v) {
    const auto id = static_cast<NodeId>(v);
    const bool a = r.c1_nodes[v], b = r.c2_nodes[v], in_l = l.nodes[v];
    if (a && in_l && !b) r.i_nodes.push_back(id);
    if (b && in_l && !a) r.j_nodes.push_back(id);
    if (a && b && !in_l) r.k_nodes.push_back(id);
    if (a && b && in_l) r.l_nodes.push_back(id);
  }
  return r;
}

/// Extracts `l` as the middle cospan of c1 ; (id_k + lc) ; c2, with the
/// outside in-connections of left-shared nodes split by `tau`.
/// Interfaces: c1 right = k' + t'* + i' + u, lc = i' + u -> j' + t',
/// c2 left = k' + t'* + j' + t' (each block in ascending node order).
inline WeakDecomposition weak_decompose(const Cospan& gc, const SubHypergraph& l, const UpDownSignature& tau) {
  const WeakRegions regions = weak_regions(gc, l);
  const auto& g = gc.carrier;
  const std::size_t nn = g.node_count();
  const auto& in_c1_edge = regions.c1_edges;
  const auto& in_c2_edge = regions.c2_edges;
  const auto& c1n = regions.c1_nodes;
  const auto& c2n = regions.c2_nodes;
  const auto& ip = regions.i_nodes;
  const auto& jp = regions.j_nodes;
  const auto& kp = regions.k_nodes;
  const auto& lp = regions.l_nodes;

  // validate the up-down signature
  const auto shared = left_shared_nodes(gc, l);
  for (const auto& [v, split] : tau)
    if (!std::binary_search(shared.begin(), shared.end(), v))
      throw Error(ErrorCode::InvalidUpDownSignature, "node " + std::to_string(v) + " is not left-shared");
  for (NodeId v : shared) {
    auto it = tau.find(v);
    if (it == tau.end())
      throw Error(ErrorCode::InvalidUpDownSignature, "no up-down split for node " + std::to_string(v));
    std::vector<Connection> got = it->second.upper;
    got.insert(got.end(), it->second.lower.begin(), it->second.lower.end());
    auto want = external_in_connections(gc, l, v);
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    if (got != want)
      throw Error(ErrorCode::InvalidUpDownSignature,
                  "split of node " + std::to_string(v) + " does not partition its outside in-connections");
    if (!it->second.upper.empty() && !std::binary_search(lp.begin(), lp.end(), v))
      throw Error(ErrorCode::InvalidUpDownSignature,
                  "node " + std::to_string(v) + " is not shared with the output side; its upper set must be empty");
  }

  WeakDecomposition w;
  // c1: C1 without the l' nodes, which are replaced by xi' (upper) and xi'' (lower)
  std::vector<std::optional<NodeId>> c1_of(nn);
  Hypergraph h1;
  for (std::size_t v = 0; v < nn; ++v)
    if (c1n[v] && !std::binary_search(lp.begin(), lp.end(), static_cast<NodeId>(v))) c1_of[v] = h1.add_node();
  std::map<NodeId, NodeId> upper_node, lower_node;
  for (NodeId v : lp) upper_node[v] = h1.add_node();
  std::vector<NodeId> u_nodes;  // l' nodes with a non-empty lower set
  for (NodeId v : lp)
    if (!tau.at(v).lower.empty()) {
      lower_node[v] = h1.add_node();
      u_nodes.push_back(v);
    }
  auto c1_target = [&](NodeId v, const Connection& conn) -> NodeId {
    if (c1_of[v]) return *c1_of[v];
    const auto& split = tau.at(v);
    if (std::find(split.upper.begin(), split.upper.end(), conn) != split.upper.end()) return upper_node.at(v);
    return lower_node.at(v);
  };
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (!in_c1_edge[e]) continue;
    Hyperedge he = g.edge(static_cast<EdgeId>(e));
    for (auto& s : he.sources) s = c1_of[s].value();
    for (std::size_t p = 0; p < he.targets.size(); ++p)
      he.targets[p] = c1_target(he.targets[p], Connection::edge(static_cast<EdgeId>(e), p));
    h1.add_edge(std::move(he));
  }
  w.c1.carrier = std::move(h1);
  for (std::size_t i = 0; i < gc.left.size(); ++i) w.c1.left.push_back(c1_target(gc.left[i], Connection::port(i)));
  for (NodeId v : kp) w.c1.right.push_back(*c1_of[v]);
  for (NodeId v : lp) w.c1.right.push_back(upper_node.at(v));
  for (NodeId v : ip) w.c1.right.push_back(*c1_of[v]);
  for (NodeId v : u_nodes) w.c1.right.push_back(lower_node.at(v));
  w.k = kp.size() + lp.size();

  // lc: the nodes and edges of L
  std::vector<std::optional<NodeId>> l_of(nn);
  Hypergraph hl;
  for (std::size_t v = 0; v < nn; ++v)
    if (l.nodes[v]) l_of[v] = hl.add_node();
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (!l.edges[e]) continue;
    Hyperedge he = g.edge(static_cast<EdgeId>(e));
    for (auto& s : he.sources) s = *l_of[s];
    for (auto& t : he.targets) t = *l_of[t];
    hl.add_edge(std::move(he));
  }
  w.lc.carrier = std::move(hl);
  for (NodeId v : ip) w.lc.left.push_back(*l_of[v]);
  for (NodeId v : u_nodes) w.lc.left.push_back(*l_of[v]);
  for (NodeId v : jp) w.lc.right.push_back(*l_of[v]);
  for (NodeId v : lp) w.lc.right.push_back(*l_of[v]);

  // c2: nodes and edges of C2
  std::vector<std::optional<NodeId>> c2_of(nn);
  Hypergraph h2;
  for (std::size_t v = 0; v < nn; ++v)
    if (c2n[v]) c2_of[v] = h2.add_node();
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (!in_c2_edge[e]) continue;
    Hyperedge he = g.edge(static_cast<EdgeId>(e));
    for (auto& s : he.sources) s = *c2_of[s];
    for (auto& t : he.targets) t = *c2_of[t];
    h2.add_edge(std::move(he));
  }
  w.c2.carrier = std::move(h2);
  for (const auto* block : {&kp, &lp, &jp, &lp})
    for (NodeId v : *block) w.c2.left.push_back(*c2_of[v]);
  for (NodeId v : gc.right) w.c2.right.push_back(*c2_of[v]);
  return w;
}

/// Convenience overload: L given as an embedding of `h` into the carrier.
inline WeakDecomposition weak_decompose(const Cospan& gc, const Hypergraph& h, const Homomorphism& embedding,
                                        const UpDownSignature& tau) {
  return weak_decompose(gc, image_of(h, gc.carrier, embedding), tau);
}

// ---------------------------------------------------------------------------
// Strong decomposition

struct InOutSignature {
  std::vector<Cut> in;   // complete cut of c1; the k passthrough nodes get 1-cuts
  std::vector<Cut> out;  // complete cut of lc
};

/// Explicit inner gluing: c1-offcut right position (>= k) -> block index in
/// the cut of the corresponding lc node. Positions not listed use the block
/// holding the original interface connection.
using Gluing = std::map<std::size_t, std::size_t>;

struct StrongDecomposition {
  Cospan first;   // m -> k + i^in
  Cospan middle;  // k + i^in -> k + j^out
  Cospan last;    // k + j^out -> n
};

inline Cospan recompose(const StrongDecomposition& s) { return compose(compose(s.first, s.middle), s.last); }

inline StrongDecomposition strong_decompose(const WeakDecomposition& w, const InOutSignature& sig,
                                            const Gluing& gluing = {}) {
  CutResult cin, cout;
  try {
    for (std::size_t p = 0; p < w.k; ++p) {
      const NodeId v = w.c1.right.at(p);
      for (const auto& cut : sig.in)
        if (cut.node == v && cut.blocks.size() != 1)
          throw Error(ErrorCode::InvalidInOutSignature, "passthrough node " + std::to_string(v) + " must not be cut");
    }
    cin = complete_cut(w.c1, sig.in);
    cout = complete_cut(w.lc, sig.out);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidInOutSignature) throw;
    throw Error(ErrorCode::InvalidInOutSignature, e.what());
  }
  const Cospan& lo = cout.cospan;
  // lc node -> its block nodes in the offcut (only for cut, i.e. terminal, nodes)
  std::map<NodeId, std::vector<NodeId>> blocks_of;
  std::map<NodeId, const Cut*> cut_of;
  for (const auto& cut : sig.out) cut_of[cut.node] = &cut;
  for (std::size_t q = 0; q < lo.right.size(); ++q) blocks_of[w.lc.right[cout.reconnect(q)]].push_back(lo.right[q]);
  // alpha: where the lc node behind a c1-offcut output lands in the lc offcut
  auto offcut_node = [&](std::size_t i_pos, std::size_t c1_pos) -> NodeId {
    const NodeId v = w.lc.left.at(i_pos);
    auto it = cut_of.find(v);
    if (it == cut_of.end()) return lo.left[i_pos];
    const auto& blocks = it->second->blocks;
    std::size_t b;
    if (auto g = gluing.find(c1_pos); g != gluing.end()) {
      b = g->second;
      if (b >= blocks.size())
        throw Error(ErrorCode::IncompatibleGluing, "gluing sends position " + std::to_string(c1_pos) +
                                                       " to a block its node does not have");
    } else {
      b = 0;
      const Connection port = Connection::port(i_pos);
      for (std::size_t x = 0; x < blocks.size(); ++x)
        if (std::find(blocks[x].begin(), blocks[x].end(), port) != blocks[x].end()) b = x;
    }
    return blocks_of.at(v).at(b);
  };
  for (const auto& [pos, b] : gluing)
    if (pos < w.k || pos >= cin.cospan.right.size())
      throw Error(ErrorCode::IncompatibleGluing, "gluing position " + std::to_string(pos) + " is not a cut input");

  StrongDecomposition s;
  s.first = cin.cospan;
  Cospan mid = tensor(identity(w.k), lo);
  mid.left.resize(w.k);
  for (std::size_t p = w.k; p < cin.cospan.right.size(); ++p) {
    const std::size_t i_pos = cin.reconnect(p) - w.k;
    mid.left.push_back(static_cast<NodeId>(offcut_node(i_pos, p) + w.k));
  }
  s.middle = std::move(mid);
  s.last = w.c2;
  s.last.left.resize(w.k);
  for (std::size_t q = 0; q < lo.right.size(); ++q) s.last.left.push_back(w.c2.left[w.k + cout.reconnect(q)]);
  return s;
}

}  // namespace cmonrw
