#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cmonrw/hypergraph.hpp"

namespace cmonrw {

/// Opaque isomorphism certificate; equal keys iff isomorphic (respecting tags).
using CanonicalKey = std::string;

namespace detail {

class Canonicaliser {
 public:
  Canonicaliser(const Hypergraph& g, std::vector<std::vector<std::uint64_t>> tags)
      : g_(g), tags_(std::move(tags)), incident_(g.node_count()) {
    for (auto& t : tags_) std::sort(t.begin(), t.end());
    std::vector<std::string> labels;
    for (const auto& e : g.edges()) labels.push_back(e.label);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    for (std::size_t i = 0; i < labels.size(); ++i) label_id_[labels[i]] = i;
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      const auto& he = g.edge(static_cast<EdgeId>(e));
      for (std::size_t i = 0; i < he.sources.size(); ++i)
        incident_[he.sources[i]].push_back({static_cast<EdgeId>(e), 0, static_cast<std::uint32_t>(i)});
      for (std::size_t i = 0; i < he.targets.size(); ++i)
        incident_[he.targets[i]].push_back({static_cast<EdgeId>(e), 1, static_cast<std::uint32_t>(i)});
    }
  }

  CanonicalKey run() {
    const std::size_t n = g_.node_count();
    std::vector<std::vector<std::uint64_t>> init(n);
    for (std::size_t v = 0; v < n; ++v) init[v] = tags_[v];
    std::vector<std::uint32_t> colors = rank(init);
    search(std::move(colors));
    return *best_;
  }

 private:
  struct Incidence {
    EdgeId edge;
    std::uint32_t role;  // 0 source, 1 target
    std::uint32_t pos;
  };

  template <typename Sig>
  static std::vector<std::uint32_t> rank(const std::vector<Sig>& sigs) {
    std::vector<Sig> sorted = sigs;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<std::uint32_t> out(sigs.size());
    for (std::size_t i = 0; i < sigs.size(); ++i)
      out[i] = static_cast<std::uint32_t>(std::lower_bound(sorted.begin(), sorted.end(), sigs[i]) - sorted.begin());
    return out;
  }

  static std::size_t count_colors(const std::vector<std::uint32_t>& c) {
    std::vector<std::uint32_t> s = c;
    std::sort(s.begin(), s.end());
    return static_cast<std::size_t>(std::unique(s.begin(), s.end()) - s.begin());
  }

  std::vector<std::uint32_t> refine(std::vector<std::uint32_t> colors) const {
    const std::size_t n = g_.node_count();
    std::size_t classes = count_colors(colors);
    for (;;) {
      std::vector<std::vector<std::uint64_t>> sigs(n);
      for (std::size_t v = 0; v < n; ++v) {
        std::vector<std::vector<std::uint64_t>> descs;
        for (const auto& inc : incident_[v]) {
          const auto& he = g_.edge(inc.edge);
          std::vector<std::uint64_t> d{label_id_.at(he.label), inc.role, inc.pos};
          for (NodeId s : he.sources) d.push_back(colors[s]);
          d.push_back(~0ULL);
          for (NodeId t : he.targets) d.push_back(colors[t]);
          descs.push_back(std::move(d));
        }
        std::sort(descs.begin(), descs.end());
        auto& sig = sigs[v];
        sig.push_back(colors[v]);
        for (const auto& d : descs) {
          sig.push_back(d.size());
          sig.insert(sig.end(), d.begin(), d.end());
        }
      }
      colors = rank(sigs);
      const std::size_t now = count_colors(colors);
      if (now == classes) return colors;
      classes = now;
    }
  }

  void search(std::vector<std::uint32_t> colors) {
    colors = refine(std::move(colors));
    const std::size_t n = g_.node_count();
    // smallest colour with a non-singleton cell
    std::vector<std::size_t> cell_size(n, 0);
    for (auto c : colors) ++cell_size[c];
    std::optional<std::uint32_t> target;
    for (std::size_t c = 0; c < n; ++c)
      if (cell_size[c] > 1) {
        target = static_cast<std::uint32_t>(c);
        break;
      }
    if (!target) {
      CanonicalKey cert = certificate(colors);
      if (!best_ || cert < *best_) best_ = std::move(cert);
      return;
    }
    std::vector<NodeId> cell;
    for (std::size_t v = 0; v < n; ++v)
      if (colors[v] == *target) cell.push_back(static_cast<NodeId>(v));
    // Equal-coloured nodes without incident edges are interchangeable.
    const bool all_isolated =
        std::all_of(cell.begin(), cell.end(), [&](NodeId v) { return incident_[v].empty(); });
    if (all_isolated) cell.resize(1);
    for (NodeId v : cell) {
      std::vector<std::uint32_t> next(n);
      for (std::size_t u = 0; u < n; ++u) next[u] = 2 * colors[u] + (u == v ? 0 : 1);
      search(rank(next));
    }
  }

  // `colors` is a discrete colouring (a bijection onto 0..n-1), or empty for n = 0.
  CanonicalKey certificate(const std::vector<std::uint32_t>& colors) const {
    const std::size_t n = g_.node_count();
    std::vector<NodeId> by_color(n);
    for (std::size_t v = 0; v < n; ++v) by_color[colors[v]] = static_cast<NodeId>(v);
    std::string out = "n" + std::to_string(n) + "|";
    for (std::size_t i = 0; i < n; ++i) {
      for (auto t : tags_[by_color[i]]) out += std::to_string(t) + ",";
      out += ";";
    }
    std::vector<std::string> edges;
    for (const auto& e : g_.edges()) {
      std::string s = e.label + "(";
      for (NodeId v : e.sources) s += std::to_string(colors[v]) + ",";
      s += ">";
      for (NodeId v : e.targets) s += std::to_string(colors[v]) + ",";
      s += ")";
      edges.push_back(std::move(s));
    }
    std::sort(edges.begin(), edges.end());
    out += "|";
    for (const auto& s : edges) out += s;
    return out;
  }

  const Hypergraph& g_;
  std::vector<std::vector<std::uint64_t>> tags_;
  std::vector<std::vector<Incidence>> incident_;
  std::map<std::string, std::uint64_t> label_id_;
  std::optional<CanonicalKey> best_;
};

}  // namespace detail

/// Canonical key where each node carries a multiset of integer tags; two
/// (graph, tags) pairs get equal keys iff a label-preserving isomorphism maps
/// tags onto identical tags.
inline CanonicalKey canonical_form_tagged(const Hypergraph& g, std::vector<std::vector<std::uint64_t>> tags) {
  tags.resize(g.node_count());
  return detail::Canonicaliser(g, std::move(tags)).run();
}

/// Canonical key with `pins` fixed pointwise in order (a node may appear at
/// several positions).
inline CanonicalKey canonical_form(const Hypergraph& g, std::span<const NodeId> pins) {
  std::vector<std::vector<std::uint64_t>> tags(g.node_count());
  for (std::size_t i = 0; i < pins.size(); ++i) tags.at(pins[i]).push_back(i);
  return canonical_form_tagged(g, std::move(tags)) + "#" + std::to_string(pins.size());
}

}  // namespace cmonrw
