#pragma once

#include <cctype>
#include <cstddef>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "cmonrw/error.hpp"

namespace cmonrw {

struct GeneratorType {
  std::size_t arity = 0;
  std::size_t coarity = 0;
  bool operator==(const GeneratorType&) const = default;
};

inline bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

/// Names taken by the built-in structure: mu, eta, id_*, sym_*.
inline bool is_reserved_name(std::string_view s) {
  return s == "mu" || s == "eta" || s.starts_with("id_") || s.starts_with("sym_");
}

/// A monoidal signature: generator name -> (arity, coarity), single-sorted.
class Signature {
 public:
  void declare(const std::string& name, std::size_t arity, std::size_t coarity) {
    if (!is_identifier(name))
      throw Error(ErrorCode::InvalidSignature, "invalid generator name '" + name + "'");
    if (is_reserved_name(name))
      throw Error(ErrorCode::InvalidSignature, "generator name '" + name + "' is reserved");
    if (generators_.contains(name))
      throw Error(ErrorCode::InvalidSignature, "duplicate generator '" + name + "'");
    generators_.emplace(name, GeneratorType{arity, coarity});
  }

  bool contains(const std::string& name) const { return generators_.contains(name); }

  const GeneratorType& at(const std::string& name) const {
    auto it = generators_.find(name);
    if (it == generators_.end())
      throw Error(ErrorCode::UnknownGenerator, "unknown generator '" + name + "'");
    return it->second;
  }

  const std::map<std::string, GeneratorType>& generators() const { return generators_; }
  std::size_t size() const { return generators_.size(); }

  bool operator==(const Signature&) const = default;

 private:
  std::map<std::string, GeneratorType> generators_;
};

/// Parses the line-based signature format: `gen <name> : <m> -> <n>`, `#` comments.
inline Signature parse_signature(std::string_view text) {
  Signature sig;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw)) continue;
    const std::string where = "line " + std::to_string(lineno);
    std::string name, colon, arrow;
    long long m = -1, n = -1;
    if (kw != "gen" || !(ls >> name)) throw Error(ErrorCode::SyntaxError, "expected 'gen <name> : <m> -> <n>'", where);
    // allow "f:" and "f :" spellings
    if (name.size() > 1 && name.back() == ':') {
      name.pop_back();
      colon = ":";
    } else if (!(ls >> colon)) {
      throw Error(ErrorCode::SyntaxError, "expected ':'", where);
    }
    if (colon != ":" || !(ls >> m >> arrow >> n) || arrow != "->" || m < 0 || n < 0)
      throw Error(ErrorCode::SyntaxError, "expected 'gen <name> : <m> -> <n>'", where);
    std::string rest;
    if (ls >> rest) throw Error(ErrorCode::SyntaxError, "trailing text '" + rest + "'", where);
    try {
      sig.declare(name, static_cast<std::size_t>(m), static_cast<std::size_t>(n));
    } catch (const Error& e) {
      throw Error(e.code(), e.what(), where);
    }
  }
  return sig;
}

inline std::string format_signature(const Signature& sig) {
  std::string out;
  for (const auto& [name, ty] : sig.generators())
    out += "gen " + name + " : " + std::to_string(ty.arity) + " -> " + std::to_string(ty.coarity) + "\n";
  return out;
}

}  // namespace cmonrw
