#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cmonrw/error.hpp"
#include "cmonrw/signature.hpp"

namespace cmonrw {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

struct Hyperedge {
  std::string label;
  std::vector<NodeId> sources;
  std::vector<NodeId> targets;
  bool operator==(const Hyperedge&) const = default;
};

/// Directed hypergraph with labelled hyperedges and ordered tentacles.
/// Nodes are the dense range [0, node_count()).
class Hypergraph {
 public:
  Hypergraph() = default;
  explicit Hypergraph(std::size_t nodes) : node_count_(nodes) {}

  NodeId add_node() { return static_cast<NodeId>(node_count_++); }

  /// Adds `n` nodes and returns the id of the first.
  NodeId add_nodes(std::size_t n) {
    const auto first = static_cast<NodeId>(node_count_);
    node_count_ += n;
    return first;
  }

  EdgeId add_edge(std::string label, std::vector<NodeId> sources, std::vector<NodeId> targets) {
    for (NodeId v : sources) check_node(v);
    for (NodeId v : targets) check_node(v);
    edges_.push_back({std::move(label), std::move(sources), std::move(targets)});
    return static_cast<EdgeId>(edges_.size() - 1);
  }

  EdgeId add_edge(Hyperedge e) { return add_edge(std::move(e.label), std::move(e.sources), std::move(e.targets)); }

  std::size_t node_count() const { return node_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Hyperedge>& edges() const { return edges_; }
  const Hyperedge& edge(EdgeId e) const { return edges_.at(e); }
  Hyperedge& edge_mut(EdgeId e) { return edges_.at(e); }

  bool has_node(NodeId v) const { return v < node_count_; }

  void check_node(NodeId v) const {
    if (!has_node(v)) throw Error(ErrorCode::UnknownNode, "unknown node " + std::to_string(v));
  }

  /// Every edge label is declared and its tentacle counts match the signature.
  void validate(const Signature& sig) const {
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const auto& ty = sig.at(edges_[e].label);
      if (ty.arity != edges_[e].sources.size() || ty.coarity != edges_[e].targets.size())
        throw Error(ErrorCode::TypeMismatch, "edge " + std::to_string(e) + " labelled '" + edges_[e].label +
                                                 "' does not match its declared type");
    }
  }

  /// Removes the nodes flagged in `drop` (which must have no incident edges
  /// left) and returns old -> new ids (nullopt for dropped nodes).
  std::vector<std::optional<NodeId>> remove_nodes(const std::vector<bool>& drop) {
    std::vector<std::optional<NodeId>> remap(node_count_);
    NodeId next = 0;
    for (std::size_t v = 0; v < node_count_; ++v)
      if (!drop[v]) remap[v] = next++;
    for (auto& e : edges_) {
      for (auto& v : e.sources) v = remap.at(v).value();
      for (auto& v : e.targets) v = remap.at(v).value();
    }
    node_count_ = next;
    return remap;
  }

  bool operator==(const Hypergraph&) const = default;

 private:
  std::size_t node_count_ = 0;
  std::vector<Hyperedge> edges_;
};

/// Structure-preserving map between hypergraphs (label- and position-preserving).
struct Homomorphism {
  std::vector<NodeId> node_map;
  std::vector<EdgeId> edge_map;
  bool operator==(const Homomorphism&) const = default;
  auto operator<=>(const Homomorphism&) const = default;
};

inline bool is_homomorphism(const Hypergraph& from, const Hypergraph& to, const Homomorphism& h) {
  if (h.node_map.size() != from.node_count() || h.edge_map.size() != from.edge_count()) return false;
  for (NodeId v : h.node_map)
    if (!to.has_node(v)) return false;
  for (std::size_t e = 0; e < from.edge_count(); ++e) {
    if (h.edge_map[e] >= to.edge_count()) return false;
    const auto& pe = from.edge(static_cast<EdgeId>(e));
    const auto& he = to.edge(h.edge_map[e]);
    if (pe.label != he.label || pe.sources.size() != he.sources.size() || pe.targets.size() != he.targets.size())
      return false;
    for (std::size_t i = 0; i < pe.sources.size(); ++i)
      if (h.node_map[pe.sources[i]] != he.sources[i]) return false;
    for (std::size_t i = 0; i < pe.targets.size(); ++i)
      if (h.node_map[pe.targets[i]] != he.targets[i]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Degrees

inline std::size_t in_degree(const Hypergraph& g, NodeId v) {
  g.check_node(v);
  std::size_t d = 0;
  for (const auto& e : g.edges()) d += static_cast<std::size_t>(std::count(e.targets.begin(), e.targets.end(), v));
  return d;
}

inline std::size_t out_degree(const Hypergraph& g, NodeId v) {
  g.check_node(v);
  std::size_t d = 0;
  for (const auto& e : g.edges()) d += static_cast<std::size_t>(std::count(e.sources.begin(), e.sources.end(), v));
  return d;
}

inline std::vector<std::size_t> in_degrees(const Hypergraph& g) {
  std::vector<std::size_t> d(g.node_count(), 0);
  for (const auto& e : g.edges())
    for (NodeId v : e.targets) ++d[v];
  return d;
}

inline std::vector<std::size_t> out_degrees(const Hypergraph& g) {
  std::vector<std::size_t> d(g.node_count(), 0);
  for (const auto& e : g.edges())
    for (NodeId v : e.sources) ++d[v];
  return d;
}

/// Nodes of out-degree 0, ascending.
inline std::vector<NodeId> terminal_nodes(const Hypergraph& g) {
  const auto out = out_degrees(g);
  std::vector<NodeId> res;
  for (std::size_t v = 0; v < out.size(); ++v)
    if (out[v] == 0) res.push_back(static_cast<NodeId>(v));
  return res;
}

// ---------------------------------------------------------------------------
// Paths and acyclicity

/// One step of a path: from a node through an edge (entered at a source
/// position) out to a node (left at a target position).
struct PathStep {
  EdgeId edge;
  NodeId target;
};

/// Alternating node/edge list; `nodes.size() == edges.size() + 1` for a
/// node-to-node path.
struct Path {
  std::vector<NodeId> nodes;
  std::vector<EdgeId> edges;
};

namespace detail {

/// node -> edges having it as a source (with repetition per position).
inline std::vector<std::vector<EdgeId>> outgoing_edges(const Hypergraph& g) {
  std::vector<std::vector<EdgeId>> out(g.node_count());
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto& srcs = g.edge(static_cast<EdgeId>(e)).sources;
    for (std::size_t i = 0; i < srcs.size(); ++i)
      if (std::find(srcs.begin(), srcs.begin() + static_cast<std::ptrdiff_t>(i), srcs[i]) ==
          srcs.begin() + static_cast<std::ptrdiff_t>(i))
        out[srcs[i]].push_back(static_cast<EdgeId>(e));
  }
  return out;
}

}  // namespace detail

/// No path visits the same node twice.
inline bool is_acyclic(const Hypergraph& g) {
  const auto out = detail::outgoing_edges(g);
  enum class Mark : std::uint8_t { White, Grey, Black };
  std::vector<Mark> mark(g.node_count(), Mark::White);
  // iterative DFS over the node-successor relation
  for (std::size_t root = 0; root < g.node_count(); ++root) {
    if (mark[root] != Mark::White) continue;
    struct Frame {
      NodeId v;
      std::size_t edge_idx;
      std::size_t tgt_idx;
    };
    std::vector<Frame> stack{{static_cast<NodeId>(root), 0, 0}};
    mark[root] = Mark::Grey;
    while (!stack.empty()) {
      auto& f = stack.back();
      if (f.edge_idx == out[f.v].size()) {
        mark[f.v] = Mark::Black;
        stack.pop_back();
        continue;
      }
      const auto& tg = g.edge(out[f.v][f.edge_idx]).targets;
      if (f.tgt_idx == tg.size()) {
        ++f.edge_idx;
        f.tgt_idx = 0;
        continue;
      }
      const NodeId w = tg[f.tgt_idx++];
      if (mark[w] == Mark::Grey) return false;
      if (mark[w] == Mark::White) {
        mark[w] = Mark::Grey;
        stack.push_back({w, 0, 0});
      }
    }
  }
  return true;
}

/// Edge-based variant: true iff some path contains the same hyperedge twice.
inline bool has_edge_repeating_path(const Hypergraph& g) {
  const auto out = detail::outgoing_edges(g);
  // edge -> successor edges
  const std::size_t ne = g.edge_count();
  std::vector<std::vector<EdgeId>> succ(ne);
  for (std::size_t e = 0; e < ne; ++e)
    for (NodeId t : g.edge(static_cast<EdgeId>(e)).targets)
      for (EdgeId f : out[t]) succ[e].push_back(f);
  std::vector<int> mark(ne, 0);
  std::vector<std::pair<EdgeId, std::size_t>> stack;
  for (std::size_t r = 0; r < ne; ++r) {
    if (mark[r]) continue;
    stack.push_back({static_cast<EdgeId>(r), 0});
    mark[r] = 1;
    while (!stack.empty()) {
      auto& [e, i] = stack.back();
      if (i == succ[e].size()) {
        mark[e] = 2;
        stack.pop_back();
        continue;
      }
      const EdgeId f = succ[e][i++];
      if (mark[f] == 1) return true;
      if (mark[f] == 0) {
        mark[f] = 1;
        stack.push_back({f, 0});
      }
    }
  }
  return false;
}

/// Edges in an order where every edge follows all edges that feed it.
/// Returns nullopt when the graph is cyclic.
inline std::optional<std::vector<EdgeId>> topological_edge_order(const Hypergraph& g) {
  const std::size_t ne = g.edge_count();
  std::vector<std::vector<EdgeId>> producers_of(g.node_count());
  for (std::size_t e = 0; e < ne; ++e)
    for (NodeId t : g.edge(static_cast<EdgeId>(e)).targets) producers_of[t].push_back(static_cast<EdgeId>(e));
  std::vector<std::size_t> pending(ne, 0);
  std::vector<std::vector<EdgeId>> succ(ne);
  for (std::size_t e = 0; e < ne; ++e)
    for (NodeId s : g.edge(static_cast<EdgeId>(e)).sources)
      for (EdgeId p : producers_of[s]) {
        succ[p].push_back(static_cast<EdgeId>(e));
        ++pending[e];
      }
  std::set<EdgeId> ready;
  for (std::size_t e = 0; e < ne; ++e)
    if (pending[e] == 0) ready.insert(static_cast<EdgeId>(e));
  std::vector<EdgeId> order;
  while (!ready.empty()) {
    const EdgeId e = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(e);
    for (EdgeId f : succ[e])
      if (--pending[f] == 0) ready.insert(f);
  }
  if (order.size() != ne) return std::nullopt;
  return order;
}

// ---------------------------------------------------------------------------
// Sub-hypergraphs and convexity

/// A sub-hypergraph given by node and edge membership flags of its host.
struct SubHypergraph {
  std::vector<bool> nodes;
  std::vector<bool> edges;

  static SubHypergraph empty_of(const Hypergraph& g) {
    return {std::vector<bool>(g.node_count(), false), std::vector<bool>(g.edge_count(), false)};
  }

  /// The edges plus all their endpoints.
  static SubHypergraph from_edges(const Hypergraph& g, std::span<const EdgeId> edge_ids) {
    auto s = empty_of(g);
    for (EdgeId e : edge_ids) {
      s.edges.at(e) = true;
      for (NodeId v : g.edge(e).sources) s.nodes[v] = true;
      for (NodeId v : g.edge(e).targets) s.nodes[v] = true;
    }
    return s;
  }

  bool operator==(const SubHypergraph&) const = default;
};

/// Image of an injective embedding as membership flags; throws
/// NotASubhypergraph when the map is not an injective homomorphism.
inline SubHypergraph image_of(const Hypergraph& h, const Hypergraph& g, const Homomorphism& emb) {
  if (!is_homomorphism(h, g, emb)) throw Error(ErrorCode::NotASubhypergraph, "embedding is not a homomorphism");
  auto s = SubHypergraph::empty_of(g);
  for (NodeId v : emb.node_map) {
    if (s.nodes[v]) throw Error(ErrorCode::NotASubhypergraph, "embedding is not injective on nodes");
    s.nodes[v] = true;
  }
  for (EdgeId e : emb.edge_map) {
    if (s.edges[e]) throw Error(ErrorCode::NotASubhypergraph, "embedding is not injective on edges");
    s.edges[e] = true;
  }
  return s;
}

/// Every edge of the sub-hypergraph has all its endpoints inside it.
inline bool is_closed(const Hypergraph& g, const SubHypergraph& s) {
  if (s.nodes.size() != g.node_count() || s.edges.size() != g.edge_count()) return false;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (!s.edges[e]) continue;
    for (NodeId v : g.edge(static_cast<EdgeId>(e)).sources)
      if (!s.nodes[v]) return false;
    for (NodeId v : g.edge(static_cast<EdgeId>(e)).targets)
      if (!s.nodes[v]) return false;
  }
  return true;
}

/// True iff every path of `g` between two nodes of `s` uses only edges of `s`.
/// Searches (node, left-s-already) states from every node of `s`.
inline bool is_convex(const Hypergraph& g, const SubHypergraph& s) {
  const auto out = detail::outgoing_edges(g);
  const std::size_t n = g.node_count();
  std::vector<bool> seen(2 * n, false);
  std::vector<std::pair<NodeId, bool>> work;
  for (std::size_t v = 0; v < n; ++v)
    if (s.nodes[v]) {
      seen[2 * v] = true;
      work.push_back({static_cast<NodeId>(v), false});
    }
  while (!work.empty()) {
    const auto [v, left] = work.back();
    work.pop_back();
    for (EdgeId e : out[v]) {
      const bool now_left = left || !s.edges[e];
      for (NodeId w : g.edge(e).targets) {
        if (now_left && s.nodes[w]) return false;
        const std::size_t key = 2 * w + (now_left ? 1 : 0);
        if (!seen[key]) {
          seen[key] = true;
          work.push_back({w, now_left});
        }
      }
    }
  }
  return true;
}

/// Convexity of the image of `h` in `g` under an injective embedding.
inline bool is_convex_subhypergraph(const Hypergraph& h, const Hypergraph& g, const Homomorphism& embedding) {
  return is_convex(g, image_of(h, g, embedding));
}

/// Smallest convex sub-hypergraph containing `s`: repeatedly adds every edge
/// lying on a path between two member nodes (with its endpoints).
inline SubHypergraph convex_hull(const Hypergraph& g, SubHypergraph s) {
  const auto out = detail::outgoing_edges(g);
  for (;;) {
    // forward reachability from s-nodes, backward reachability to s-nodes
    std::vector<bool> fwd(g.node_count(), false), bwd(g.node_count(), false);
    std::vector<NodeId> work;
    for (std::size_t v = 0; v < g.node_count(); ++v)
      if (s.nodes[v]) {
        fwd[v] = true;
        work.push_back(static_cast<NodeId>(v));
      }
    while (!work.empty()) {
      const NodeId v = work.back();
      work.pop_back();
      for (EdgeId e : out[v])
        for (NodeId w : g.edge(e).targets)
          if (!fwd[w]) {
            fwd[w] = true;
            work.push_back(w);
          }
    }
    for (std::size_t v = 0; v < g.node_count(); ++v) bwd[v] = s.nodes[v];
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& e : g.edges()) {
        bool reaches = false;
        for (NodeId t : e.targets) reaches = reaches || bwd[t];
        if (!reaches) continue;
        for (NodeId src : e.sources)
          if (!bwd[src]) {
            bwd[src] = true;
            changed = true;
          }
      }
    }
    bool grew = false;
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      if (s.edges[e]) continue;
      const auto& he = g.edge(static_cast<EdgeId>(e));
      bool from = false, to = false;
      for (NodeId v : he.sources) from = from || fwd[v];
      for (NodeId v : he.targets) to = to || bwd[v];
      if (from && to) {
        s.edges[e] = true;
        for (NodeId v : he.sources) s.nodes[v] = true;
        for (NodeId v : he.targets) s.nodes[v] = true;
        grew = true;
      }
    }
    if (!grew) return s;
  }
}

// ---------------------------------------------------------------------------
// Homomorphism search

namespace detail {

struct HomSearch {
  const Hypergraph& pattern;
  const Hypergraph& host;
  std::vector<bool> mergeable;  // per pattern node
  std::vector<EdgeId> edge_order;
  std::vector<NodeId> isolated;
  std::vector<std::optional<NodeId>> node_map;
  std::vector<EdgeId> edge_map;
  std::vector<bool> host_edge_used;
  std::vector<std::vector<NodeId>> host_preimages;  // host node -> pattern nodes
  std::vector<Homomorphism> results;

  bool can_bind(NodeId p, NodeId h) const {
    if (host_preimages[h].empty()) return true;
    if (!mergeable[p]) return false;
    for (NodeId q : host_preimages[h])
      if (!mergeable[q]) return false;
    return true;
  }

  void bind(NodeId p, NodeId h) {
    node_map[p] = h;
    host_preimages[h].push_back(p);
  }
  void unbind(NodeId p) {
    auto& pre = host_preimages[*node_map[p]];
    pre.erase(std::find(pre.begin(), pre.end(), p));
    node_map[p].reset();
  }

  // Binds the tentacles of pattern edge `pe` to host edge `he`; records the
  // newly bound pattern nodes in `fresh` so they can be undone.
  bool unify(const Hyperedge& pe, const Hyperedge& he, std::vector<NodeId>& fresh) {
    auto one = [&](NodeId p, NodeId h) {
      if (node_map[p]) return *node_map[p] == h;
      if (!can_bind(p, h)) return false;
      bind(p, h);
      fresh.push_back(p);
      return true;
    };
    for (std::size_t i = 0; i < pe.sources.size(); ++i)
      if (!one(pe.sources[i], he.sources[i])) return false;
    for (std::size_t i = 0; i < pe.targets.size(); ++i)
      if (!one(pe.targets[i], he.targets[i])) return false;
    return true;
  }

  void edges_from(std::size_t k) {
    if (k == edge_order.size()) {
      isolated_from(0);
      return;
    }
    const auto& pe = pattern.edge(edge_order[k]);
    for (std::size_t h = 0; h < host.edge_count(); ++h) {
      if (host_edge_used[h]) continue;
      const auto& he = host.edge(static_cast<EdgeId>(h));
      if (he.label != pe.label || he.sources.size() != pe.sources.size() || he.targets.size() != pe.targets.size())
        continue;
      std::vector<NodeId> fresh;
      if (unify(pe, he, fresh)) {
        host_edge_used[h] = true;
        edge_map[edge_order[k]] = static_cast<EdgeId>(h);
        edges_from(k + 1);
        host_edge_used[h] = false;
      }
      for (auto it = fresh.rbegin(); it != fresh.rend(); ++it) unbind(*it);
    }
  }

  void isolated_from(std::size_t k) {
    if (k == isolated.size()) {
      Homomorphism hom;
      hom.edge_map = edge_map;
      hom.node_map.reserve(node_map.size());
      for (const auto& v : node_map) hom.node_map.push_back(*v);
      results.push_back(std::move(hom));
      return;
    }
    const NodeId p = isolated[k];
    for (std::size_t h = 0; h < host.node_count(); ++h) {
      if (!can_bind(p, static_cast<NodeId>(h))) continue;
      bind(p, static_cast<NodeId>(h));
      isolated_from(k + 1);
      unbind(p);
    }
  }
};

}  // namespace detail

/// All label/position-preserving homomorphisms pattern -> host that are
/// injective on edges, and injective on nodes except that nodes listed in
/// `merge_allowed` may share an image with each other. Ordered
/// lexicographically by edge assignment (pattern edges in id order).
inline std::vector<Homomorphism> find_homomorphisms(const Hypergraph& pattern, const Hypergraph& host,
                                                    std::span<const NodeId> merge_allowed = {}) {
  detail::HomSearch s{pattern, host, std::vector<bool>(pattern.node_count(), false), {}, {}, {}, {}, {}, {}, {}};
  for (NodeId v : merge_allowed) s.mergeable.at(v) = true;
  std::vector<bool> touched(pattern.node_count(), false);
  for (std::size_t e = 0; e < pattern.edge_count(); ++e) {
    s.edge_order.push_back(static_cast<EdgeId>(e));
    for (NodeId v : pattern.edge(static_cast<EdgeId>(e)).sources) touched[v] = true;
    for (NodeId v : pattern.edge(static_cast<EdgeId>(e)).targets) touched[v] = true;
  }
  for (std::size_t v = 0; v < pattern.node_count(); ++v)
    if (!touched[v]) s.isolated.push_back(static_cast<NodeId>(v));
  s.node_map.assign(pattern.node_count(), std::nullopt);
  s.edge_map.assign(pattern.edge_count(), 0);
  s.host_edge_used.assign(host.edge_count(), false);
  s.host_preimages.assign(host.node_count(), {});
  s.edges_from(0);
  return std::move(s.results);
}

}  // namespace cmonrw
