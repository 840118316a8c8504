#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cmonrw/error.hpp"
#include "cmonrw/signature.hpp"

namespace cmonrw {

enum class TermKind { Gen, Id, Sym, Mu, Eta, Seq, Par };

struct TermType {
  std::size_t dom = 0;
  std::size_t cod = 0;
  bool operator==(const TermType&) const = default;
};

struct TermNode;

/// Immutable syntax tree of the free prop over a signature plus the
/// commutative monoid (mu : 2 -> 1, eta : 0 -> 1). Subtrees are shared.
/// Generator leaves carry their declared arity/coarity so that typing does
/// not need the signature.
class Term {
 public:
  static Term gen(std::string name, std::size_t arity, std::size_t coarity);
  static Term gen(const std::string& name, const Signature& sig) {
    const auto& ty = sig.at(name);
    return gen(name, ty.arity, ty.coarity);
  }
  static Term id(std::size_t n);
  static Term sym(std::size_t m, std::size_t n);
  static Term mu();
  static Term eta();
  static Term seq(Term a, Term b);
  static Term par(Term a, Term b);

  TermKind kind() const;
  const std::string& name() const;
  /// Id: n; Sym: m; Gen: arity.
  std::size_t a() const;
  /// Sym: n; Gen: coarity.
  std::size_t b() const;
  const Term& lhs() const;
  const Term& rhs() const;

  bool is_binary() const { return kind() == TermKind::Seq || kind() == TermKind::Par; }

  friend bool operator==(const Term& x, const Term& y);

 private:
  explicit Term(std::shared_ptr<const TermNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const TermNode> node_;
};

struct TermNode {
  TermKind kind;
  std::string name;
  std::size_t a = 0;
  std::size_t b = 0;
  std::vector<Term> kids;
};

inline Term Term::gen(std::string name, std::size_t arity, std::size_t coarity) {
  return Term(std::make_shared<const TermNode>(TermNode{TermKind::Gen, std::move(name), arity, coarity, {}}));
}
inline Term Term::id(std::size_t n) { return Term(std::make_shared<const TermNode>(TermNode{TermKind::Id, {}, n, 0, {}})); }
inline Term Term::sym(std::size_t m, std::size_t n) {
  return Term(std::make_shared<const TermNode>(TermNode{TermKind::Sym, {}, m, n, {}}));
}
inline Term Term::mu() {
  static const Term t(std::make_shared<const TermNode>(TermNode{TermKind::Mu, {}, 0, 0, {}}));
  return t;
}
inline Term Term::eta() {
  static const Term t(std::make_shared<const TermNode>(TermNode{TermKind::Eta, {}, 0, 0, {}}));
  return t;
}
inline Term Term::seq(Term x, Term y) {
  return Term(std::make_shared<const TermNode>(TermNode{TermKind::Seq, {}, 0, 0, {std::move(x), std::move(y)}}));
}
inline Term Term::par(Term x, Term y) {
  return Term(std::make_shared<const TermNode>(TermNode{TermKind::Par, {}, 0, 0, {std::move(x), std::move(y)}}));
}

inline TermKind Term::kind() const { return node_->kind; }
inline const std::string& Term::name() const { return node_->name; }
inline std::size_t Term::a() const { return node_->a; }
inline std::size_t Term::b() const { return node_->b; }
inline const Term& Term::lhs() const { return node_->kids.at(0); }
inline const Term& Term::rhs() const { return node_->kids.at(1); }

inline bool operator==(const Term& x, const Term& y) {
  if (x.node_ == y.node_) return true;
  if (x.kind() != y.kind()) return false;
  switch (x.kind()) {
    case TermKind::Gen:
      return x.name() == y.name() && x.a() == y.a() && x.b() == y.b();
    case TermKind::Id: return x.a() == y.a();
    case TermKind::Sym: return x.a() == y.a() && x.b() == y.b();
    case TermKind::Mu:
    case TermKind::Eta: return true;
    case TermKind::Seq:
    case TermKind::Par: return x.lhs() == y.lhs() && x.rhs() == y.rhs();
  }
  return false;
}

/// Derives (dom, cod); throws TypeMismatch on a Seq whose middle types differ.
inline TermType term_type(const Term& t) {
  switch (t.kind()) {
    case TermKind::Gen: return {t.a(), t.b()};
    case TermKind::Id: return {t.a(), t.a()};
    case TermKind::Sym: return {t.a() + t.b(), t.a() + t.b()};
    case TermKind::Mu: return {2, 1};
    case TermKind::Eta: return {0, 1};
    case TermKind::Seq: {
      const TermType l = term_type(t.lhs());
      const TermType r = term_type(t.rhs());
      if (l.cod != r.dom)
        throw Error(ErrorCode::TypeMismatch, "sequential composition of " + std::to_string(l.dom) + " -> " +
                                                 std::to_string(l.cod) + " with " + std::to_string(r.dom) + " -> " +
                                                 std::to_string(r.cod));
      return {l.dom, r.cod};
    }
    case TermKind::Par: {
      const TermType l = term_type(t.lhs());
      const TermType r = term_type(t.rhs());
      return {l.dom + r.dom, l.cod + r.cod};
    }
  }
  return {};
}

/// Number of syntax-tree nodes.
inline std::size_t term_size(const Term& t) {
  return t.is_binary() ? 1 + term_size(t.lhs()) + term_size(t.rhs()) : 1;
}

inline std::size_t generator_count(const Term& t) {
  if (t.kind() == TermKind::Gen) return 1;
  return t.is_binary() ? generator_count(t.lhs()) + generator_count(t.rhs()) : 0;
}

inline void append_generator_names(const Term& t, std::vector<std::string>& out) {
  if (t.kind() == TermKind::Gen) out.push_back(t.name());
  if (t.is_binary()) {
    append_generator_names(t.lhs(), out);
    append_generator_names(t.rhs(), out);
  }
}

inline void append_pretty(const Term& t, std::string& out) {
  switch (t.kind()) {
    case TermKind::Gen: out += t.name(); return;
    case TermKind::Id: out += "id_" + std::to_string(t.a()); return;
    case TermKind::Sym: out += "sym_" + std::to_string(t.a()) + "_" + std::to_string(t.b()); return;
    case TermKind::Mu: out += "mu"; return;
    case TermKind::Eta: out += "eta"; return;
    case TermKind::Seq:
    case TermKind::Par:
      out += '(';
      append_pretty(t.lhs(), out);
      out += t.kind() == TermKind::Seq ? " ; " : " + ";
      append_pretty(t.rhs(), out);
      out += ')';
      return;
  }
}

/// Fully parenthesised surface syntax; parse_term inverts it.
inline std::string pretty_print(const Term& t) {
  std::string out;
  append_pretty(t, out);
  return out;
}

struct TermHash {
  std::size_t operator()(const Term& t) const noexcept {
    std::size_t h = static_cast<std::size_t>(t.kind()) * 0x9e3779b97f4a7c15ULL;
    auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    switch (t.kind()) {
      case TermKind::Gen: mix(std::hash<std::string>{}(t.name())); break;
      case TermKind::Id: mix(t.a()); break;
      case TermKind::Sym: mix(t.a()); mix(t.b()); break;
      case TermKind::Mu:
      case TermKind::Eta: break;
      case TermKind::Seq:
      case TermKind::Par: mix((*this)(t.lhs())); mix((*this)(t.rhs())); break;
    }
    return h;
  }
};

namespace detail {

class TermParser {
 public:
  TermParser(std::string_view src, const Signature& sig) : src_(src), sig_(sig) {}

  Term parse() {
    Term t = expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return t;
  }

 private:
  // expr := operand (';' operand)* | operand ('+' operand)*
  // Operators are left-associative; mixing ';' and '+' requires parentheses.
  Term expr() {
    Term acc = operand();
    char op = 0;
    for (;;) {
      skip_ws();
      if (pos_ >= src_.size() || (src_[pos_] != ';' && src_[pos_] != '+')) break;
      const char c = src_[pos_];
      if (op != 0 && c != op) fail("mixed ';' and '+' need parentheses");
      op = c;
      ++pos_;
      Term rhs = operand();
      acc = op == ';' ? Term::seq(std::move(acc), std::move(rhs)) : Term::par(std::move(acc), std::move(rhs));
    }
    return acc;
  }

  Term operand() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    if (src_[pos_] == '(') {
      ++pos_;
      Term t = expr();
      skip_ws();
      if (pos_ >= src_.size() || src_[pos_] != ')') fail("expected ')'");
      ++pos_;
      return t;
    }
    return atom();
  }

  Term atom() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string word(src_.substr(start, pos_ - start));
    if (word.empty()) fail("expected a term", start);
    if (word == "mu") return Term::mu();
    if (word == "eta") return Term::eta();
    if (word.starts_with("id_")) return Term::id(number(word.substr(3), start));
    if (word.starts_with("sym_")) {
      const std::string rest = word.substr(4);
      const auto us = rest.find('_');
      if (us == std::string::npos) fail("malformed symmetry '" + word + "'", start);
      return Term::sym(number(rest.substr(0, us), start), number(rest.substr(us + 1), start));
    }
    if (!is_identifier(word)) fail("malformed name '" + word + "'", start);
    if (!sig_.contains(word))
      throw Error(ErrorCode::UnknownGenerator, "unknown generator '" + word + "'", location(start));
    return Term::gen(word, sig_);
  }

  std::size_t number(const std::string& digits, std::size_t at) {
    if (digits.empty() || digits.size() > 9) fail("expected a natural number", at);
    for (char c : digits)
      if (!std::isdigit(static_cast<unsigned char>(c))) fail("expected a natural number", at);
    return static_cast<std::size_t>(std::stoul(digits));
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  std::string location(std::size_t at) const { return "column " + std::to_string(at + 1); }

  [[noreturn]] void fail(const std::string& msg) { fail(msg, pos_); }
  [[noreturn]] void fail(const std::string& msg, std::size_t at) {
    throw Error(ErrorCode::SyntaxError, msg, location(at));
  }

  std::string_view src_;
  const Signature& sig_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses and typechecks a term. Errors: SyntaxError, UnknownGenerator, TypeMismatch.
inline Term parse_term(std::string_view src, const Signature& sig) {
  Term t = detail::TermParser(src, sig).parse();
  (void)term_type(t);
  return t;
}

}  // namespace cmonrw
