#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "cmonrw/cospan.hpp"
#include "cmonrw/error.hpp"
#include "cmonrw/signature.hpp"
#include "cmonrw/term.hpp"

namespace cmonrw {

/// m sources then n targets; a single hyperedge, legs the evident inclusions.
inline Cospan generator_cospan(const std::string& name, const Signature& sig) {
  const auto& ty = sig.at(name);
  Cospan c{Hypergraph(ty.arity + ty.coarity), {}, {}};
  std::vector<NodeId> src, tgt;
  for (std::size_t i = 0; i < ty.arity; ++i) src.push_back(static_cast<NodeId>(i));
  for (std::size_t i = 0; i < ty.coarity; ++i) tgt.push_back(static_cast<NodeId>(ty.arity + i));
  c.carrier.add_edge(name, src, tgt);
  c.left = std::move(src);
  c.right = std::move(tgt);
  return c;
}

inline FinFunction merge_function() { return FinFunction(1, {0, 0}); }
inline FinFunction unit_function() { return FinFunction(1, {}); }

/// The interpretation of a term as a cospan of hypergraphs.
inline Cospan eval_term(const Term& t, const Signature& sig) {
  switch (t.kind()) {
    case TermKind::Gen: {
      Cospan c = generator_cospan(t.name(), sig);
      if (c.dom() != t.a() || c.cod() != t.b())
        throw Error(ErrorCode::TypeMismatch, "generator '" + t.name() + "' used at a type other than declared");
      return c;
    }
    case TermKind::Id: return identity(t.a());
    case TermKind::Sym: return symmetry(t.a(), t.b());
    case TermKind::Mu: return function_to_cospan(merge_function());
    case TermKind::Eta: return function_to_cospan(unit_function());
    case TermKind::Seq: return compose(eval_term(t.lhs(), sig), eval_term(t.rhs(), sig));
    case TermKind::Par: return tensor(eval_term(t.lhs(), sig), eval_term(t.rhs(), sig));
  }
  throw Error(ErrorCode::TypeMismatch, "unknown term kind");
}

/// The function a generator-free term denotes.
inline FinFunction cmon_term_to_function(const Term& t) {
  switch (t.kind()) {
    case TermKind::Gen: throw Error(ErrorCode::ContainsGenerator, "term contains generator '" + t.name() + "'");
    case TermKind::Id: return FinFunction::identity(t.a());
    case TermKind::Sym: return symmetry_function(t.a(), t.b());
    case TermKind::Mu: return merge_function();
    case TermKind::Eta: return unit_function();
    case TermKind::Seq: return cmon_term_to_function(t.lhs()).then(cmon_term_to_function(t.rhs()));
    case TermKind::Par: return cmon_term_to_function(t.lhs()).plus(cmon_term_to_function(t.rhs()));
  }
  throw Error(ErrorCode::TypeMismatch, "unknown term kind");
}

// ---------------------------------------------------------------------------
// Term builders with trivial simplification

inline bool is_identity_term(const Term& t) { return t.kind() == TermKind::Id; }

/// a ; b, dropping identities.
inline Term seq_simplified(const Term& a, const Term& b) {
  if (is_identity_term(a)) return b;
  if (is_identity_term(b)) return a;
  return Term::seq(a, b);
}

/// a + b, dropping id_0 and fusing identities.
inline Term par_simplified(const Term& a, const Term& b) {
  if (is_identity_term(a) && a.a() == 0) return b;
  if (is_identity_term(b) && b.a() == 0) return a;
  if (is_identity_term(a) && is_identity_term(b)) return Term::id(a.a() + b.a());
  return Term::par(a, b);
}

inline Term seq_all(const std::vector<Term>& ts, std::size_t width) {
  Term acc = Term::id(width);
  for (const auto& t : ts) acc = seq_simplified(acc, t);
  return acc;
}

inline Term par_all(const std::vector<Term>& ts) {
  Term acc = Term::id(0);
  for (const auto& t : ts) acc = par_simplified(acc, t);
  return acc;
}

/// Permutation term sending input wire x to output position dest[x], built
/// from adjacent swaps.
inline Term permutation_term(const std::vector<std::size_t>& dest) {
  const std::size_t m = dest.size();
  std::vector<std::size_t> at = dest;  // at[pos] = destination of the wire now at pos
  std::vector<Term> layers;
  bool swapped = true;
  while (swapped) {
    swapped = false;
    for (std::size_t p = 0; p + 1 < m; ++p) {
      if (at[p] > at[p + 1]) {
        std::swap(at[p], at[p + 1]);
        layers.push_back(par_all({Term::id(p), Term::sym(1, 1), Term::id(m - p - 2)}));
        swapped = true;
      }
    }
  }
  return seq_all(layers, m);
}

/// k wires merged into one by a right-combed tree of mu; eta when k = 0.
inline Term merge_tree(std::size_t k) {
  if (k == 0) return Term::eta();
  Term acc = Term::id(1);
  for (std::size_t i = 1; i < k; ++i) acc = seq_simplified(par_simplified(Term::id(1), acc), Term::mu());
  return acc;
}

/// A generator-free term denoting f: sort wires by target, then merge each fiber.
inline Term synthesize_cmon_term(const FinFunction& f) {
  std::vector<std::size_t> order(f.dom);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return f(x) < f(y); });
  std::vector<std::size_t> dest(f.dom);
  for (std::size_t pos = 0; pos < order.size(); ++pos) dest[order[pos]] = pos;
  std::vector<std::size_t> fiber(f.cod, 0);
  for (auto y : f.table) ++fiber[y];
  std::vector<Term> trees;
  for (std::size_t y = 0; y < f.cod; ++y) trees.push_back(merge_tree(fiber[y]));
  Term merges = par_all(trees);
  return seq_simplified(permutation_term(dest), merges);
}

}  // namespace cmonrw
