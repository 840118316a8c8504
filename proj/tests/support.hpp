#pragma once

#include <algorithm>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "cmonrw/cospan.hpp"
#include "cmonrw/decompose.hpp"
#include "cmonrw/hypergraph.hpp"
#include "cmonrw/signature.hpp"
#include "cmonrw/term.hpp"

namespace cmonrw::testkit {

inline Signature small_signature() {
  Signature sig;
  sig.declare("f", 1, 1);
  sig.declare("g", 2, 1);
  sig.declare("h", 1, 2);
  return sig;
}

inline Signature example_signature() {
  Signature sig;
  sig.declare("A", 1, 2);
  sig.declare("B", 1, 1);
  sig.declare("C", 1, 2);
  return sig;
}

/// The worked right-monogamous example: nodes v0..v4, edges A (0), C (1), B (2).
inline Cospan example_cospan() {
  Hypergraph g(5);
  g.add_edge("A", {0}, {2, 2});
  g.add_edge("C", {1}, {2, 3});
  g.add_edge("B", {2}, {4});
  return Cospan{g, {0, 2, 2, 3, 1}, {3, 4}};
}

/// Random hypergraph with `nodes` nodes and `edges` edges over `sig`.
inline Hypergraph random_hypergraph(std::mt19937_64& rng, const Signature& sig, std::size_t nodes, std::size_t edges) {
  Hypergraph g(nodes);
  std::vector<std::pair<std::string, GeneratorType>> gens(sig.generators().begin(), sig.generators().end());
  std::uniform_int_distribution<std::size_t> pick_gen(0, gens.size() - 1), pick_node(0, nodes - 1);
  for (std::size_t e = 0; e < edges && nodes > 0; ++e) {
    const auto& [name, ty] = gens[pick_gen(rng)];
    std::vector<NodeId> src, tgt;
    for (std::size_t i = 0; i < ty.arity; ++i) src.push_back(static_cast<NodeId>(pick_node(rng)));
    for (std::size_t i = 0; i < ty.coarity; ++i) tgt.push_back(static_cast<NodeId>(pick_node(rng)));
    g.add_edge(name, src, tgt);
  }
  return g;
}

/// Random acyclic hypergraph: every edge goes from lower to strictly higher node ids.
inline Hypergraph random_dag(std::mt19937_64& rng, const Signature& sig, std::size_t nodes, std::size_t edges) {
  Hypergraph g(nodes);
  std::vector<std::pair<std::string, GeneratorType>> gens(sig.generators().begin(), sig.generators().end());
  std::uniform_int_distribution<std::size_t> pick_gen(0, gens.size() - 1);
  for (std::size_t e = 0; e < edges && nodes >= 2; ++e) {
    const auto& [name, ty] = gens[pick_gen(rng)];
    const std::size_t cut = std::uniform_int_distribution<std::size_t>(1, nodes - 1)(rng);
    std::uniform_int_distribution<std::size_t> lo(0, cut - 1), hi(cut, nodes - 1);
    std::vector<NodeId> src, tgt;
    for (std::size_t i = 0; i < ty.arity; ++i) src.push_back(static_cast<NodeId>(lo(rng)));
    for (std::size_t i = 0; i < ty.coarity; ++i) tgt.push_back(static_cast<NodeId>(hi(rng)));
    g.add_edge(name, src, tgt);
  }
  return g;
}

/// Renames nodes by `perm` (old -> new) and shuffles the edge list.
inline Hypergraph rename(const Hypergraph& g, const std::vector<NodeId>& perm, std::mt19937_64& rng) {
  std::vector<Hyperedge> es = g.edges();
  std::shuffle(es.begin(), es.end(), rng);
  Hypergraph h(g.node_count());
  for (auto e : es) {
    for (auto& v : e.sources) v = perm[v];
    for (auto& v : e.targets) v = perm[v];
    h.add_edge(std::move(e));
  }
  return h;
}

inline std::vector<NodeId> random_permutation(std::mt19937_64& rng, std::size_t n) {
  std::vector<NodeId> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<NodeId>(i);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

// Random ordered partition of the in-connections of v into 0..3 blocks.
inline Cut random_cut(std::mt19937_64& rng, const Cospan& c, NodeId v) {
  const auto ins = in_connections(c, v);
  std::size_t k = 1 + rng() % 3;
  if (ins.empty() && rng() % 3 == 0) k = 0;
  Cut cut{v, std::vector<std::vector<Connection>>(k)};
  for (const auto& conn : ins) cut.blocks[rng() % k].push_back(conn);
  return cut;
}

inline std::vector<Cut> random_complete_cut(std::mt19937_64& rng, const Cospan& c) {
  std::vector<Cut> cuts;
  for (NodeId v : terminal_nodes(c.carrier)) cuts.push_back(random_cut(rng, c, v));
  std::shuffle(cuts.begin(), cuts.end(), rng);
  return cuts;
}

inline SubHypergraph random_convex(std::mt19937_64& rng, const Hypergraph& g) {
  auto s = SubHypergraph::empty_of(g);
  std::vector<EdgeId> chosen;
  for (std::size_t e = 0; e < g.edge_count(); ++e)
    if (rng() % 3 == 0) chosen.push_back(static_cast<EdgeId>(e));
  s = SubHypergraph::from_edges(g, chosen);
  for (std::size_t v = 0; v < g.node_count(); ++v)
    if (rng() % 6 == 0) s.nodes[v] = true;
  return convex_hull(g, s);
}

inline UpDownSignature random_signature(std::mt19937_64& rng, const Cospan& g, const SubHypergraph& l) {
  const auto regions = weak_regions(g, l);
  UpDownSignature tau;
  for (NodeId v : left_shared_nodes(g, l)) {
    const bool both = std::binary_search(regions.l_nodes.begin(), regions.l_nodes.end(), v);
    UpDownSplit split;
    for (const auto& conn : external_in_connections(g, l, v))
      (both && rng() % 2 == 0 ? split.upper : split.lower).push_back(conn);
    tau[v] = split;
  }
  return tau;
}

/// Random in-out signature and gluing for a weak decomposition; wires passing
/// C1 unchanged keep the trivial cut.
inline std::pair<InOutSignature, Gluing> random_in_out(std::mt19937_64& rng, const WeakDecomposition& w) {
  InOutSignature io;
  for (NodeId v : terminal_nodes(w.c1.carrier)) {
    const bool passthrough = std::find(w.c1.right.begin(), w.c1.right.begin() + static_cast<std::ptrdiff_t>(w.k),
                                       v) != w.c1.right.begin() + static_cast<std::ptrdiff_t>(w.k);
    io.in.push_back(passthrough ? Cut::trivial(w.c1, v) : random_cut(rng, w.c1, v));
  }
  io.out = random_complete_cut(rng, w.lc);
  const auto cin = complete_cut(w.c1, io.in);
  Gluing glue;
  for (std::size_t p = w.k; p < cin.cospan.cod(); ++p) {
    const NodeId v = w.lc.left[cin.reconnect(p) - w.k];
    for (const auto& cut : io.out)
      if (cut.node == v && !cut.blocks.empty() && rng() % 2 == 0) glue[p] = rng() % cut.blocks.size();
  }
  return {io, glue};
}

inline std::uint64_t test_seed(std::uint64_t fallback) {
  if (const char* s = std::getenv("CMONRW_SEED")) return std::strtoull(s, nullptr, 10);
  return fallback;
}

struct TermGenOptions {
  std::size_t max_width = 4;
  std::size_t max_generators = 6;
  std::size_t max_layers = 4;
  bool allow_generators = true;
  bool allow_cmon = true;
};

/// Random well-typed term built from layers; each layer is a parallel
/// composite of atoms consuming the current wires.
class TermGen {
 public:
  TermGen(const Signature& sig, std::uint64_t seed, TermGenOptions opt = {}) : sig_(sig), rng_(seed), opt_(opt) {}

  Term term(std::size_t dom) {
    std::size_t width = dom;
    std::size_t gens = 0;
    const std::size_t layers = pick(1, opt_.max_layers);
    Term acc = Term::id(dom);
    bool first = true;
    for (std::size_t l = 0; l < layers; ++l) {
      Term layer = this->layer(width, gens);
      acc = first ? layer : Term::seq(acc, layer);
      first = false;
    }
    return acc;
  }

  Term any() { return term(pick(0, 3)); }

  std::mt19937_64& rng() { return rng_; }

  std::size_t pick(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_); }

 private:
  // Consumes `width` wires; updates width to the layer's codomain.
  Term layer(std::size_t& width, std::size_t& gens) {
    std::vector<Term> atoms;
    std::size_t left = width, out = 0;
    while (left > 0 || (atoms.empty() || pick(0, 5) == 0)) {
      std::vector<Term> options;
      options.push_back(Term::id(std::min<std::size_t>(left, pick(0, 2))));
      if (left >= 2) options.push_back(Term::sym(1, 1));
      if (left >= 3) options.push_back(Term::sym(1, 2));
      if (opt_.allow_cmon) {
        if (left >= 2) options.push_back(Term::mu());
        if (out + left < opt_.max_width) options.push_back(Term::eta());
      }
      if (opt_.allow_generators && gens < opt_.max_generators) {
        for (const auto& [name, ty] : sig_.generators())
          if (ty.arity <= left && out + ty.coarity + (left - ty.arity) <= opt_.max_width)
            options.push_back(Term::gen(name, ty.arity, ty.coarity));
      }
      Term a = options[pick(0, options.size() - 1)];
      const TermType ty = term_type(a);
      if (ty.dom == 0 && ty.cod == 0) {
        if (left == 0) break;
        continue;
      }
      if (a.kind() == TermKind::Gen) ++gens;
      left -= ty.dom;
      out += ty.cod;
      atoms.push_back(a);
      if (left == 0 && pick(0, 2) != 0) break;
    }
    Term acc = atoms.empty() ? Term::id(0) : atoms[0];
    for (std::size_t i = 1; i < atoms.size(); ++i) acc = Term::par(acc, atoms[i]);
    width = out;
    return acc;
  }

  Signature sig_;
  std::mt19937_64 rng_;
  TermGenOptions opt_;
};

}  // namespace cmonrw::testkit
