#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "cmonrw/cospan.hpp"
#include "cmonrw/dpo.hpp"
#include "cmonrw/error.hpp"
#include "cmonrw/hypergraph.hpp"
#include "cmonrw/signature.hpp"
#include "cmonrw/term.hpp"

namespace cmonrw {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Graph and cospan documents

inline Json graph_to_json(const Hypergraph& g) {
  Json nodes = Json::array();
  for (std::size_t v = 0; v < g.node_count(); ++v) nodes.push_back(v);
  Json edges = Json::array();
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto& he = g.edge(static_cast<EdgeId>(e));
    edges.push_back(Json{{"id", e}, {"label", he.label}, {"sources", he.sources}, {"targets", he.targets}});
  }
  return Json{{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

inline Json cospan_to_json(const Cospan& c) {
  Json j = graph_to_json(c.carrier);
  j["left"] = c.left;
  j["right"] = c.right;
  return j;
}

namespace detail {

[[noreturn]] inline void malformed(const std::string& what, const std::string& where) {
  throw Error(ErrorCode::MalformedDocument, what, where);
}

inline std::uint64_t as_id(const Json& j, const std::string& where) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
    malformed("expected a non-negative integer", where);
  return j.get<std::uint64_t>();
}

// Document node ids may be any distinct naturals; they become 0..n-1 in listed order.
struct NodeIds {
  std::map<std::uint64_t, NodeId> dense;
  NodeId at(const Json& j, const std::string& where) const {
    const auto id = as_id(j, where);
    auto it = dense.find(id);
    if (it == dense.end()) throw Error(ErrorCode::UnknownNode, "node " + std::to_string(id) + " is not declared", where);
    return it->second;
  }
  std::vector<NodeId> list(const Json& j, const std::string& where) const {
    if (!j.is_array()) malformed("expected a list of node ids", where);
    std::vector<NodeId> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(at(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
  }
};

inline Hypergraph graph_from_json(const Json& j, NodeIds& ids) {
  if (!j.is_object()) malformed("expected an object", "document");
  if (!j.contains("nodes") || !j["nodes"].is_array()) malformed("missing 'nodes' list", "nodes");
  if (!j.contains("edges") || !j["edges"].is_array()) malformed("missing 'edges' list", "edges");
  Hypergraph g;
  for (std::size_t i = 0; i < j["nodes"].size(); ++i) {
    const std::string where = "nodes[" + std::to_string(i) + "]";
    const auto id = as_id(j["nodes"][i], where);
    if (!ids.dense.emplace(id, g.add_node()).second) malformed("node " + std::to_string(id) + " declared twice", where);
  }
  // edges are stored in id order when ids are given
  std::map<std::uint64_t, Hyperedge> by_id;
  for (std::size_t i = 0; i < j["edges"].size(); ++i) {
    const std::string where = "edges[" + std::to_string(i) + "]";
    const Json& e = j["edges"][i];
    if (!e.is_object()) malformed("expected an edge object", where);
    if (!e.contains("label") || !e["label"].is_string()) malformed("edge without a label", where);
    if (!e.contains("sources") || !e.contains("targets")) malformed("edge without sources or targets", where);
    const std::uint64_t id = e.contains("id") ? as_id(e["id"], where + ".id") : i;
    Hyperedge he{e["label"].get<std::string>(), ids.list(e["sources"], where + ".sources"),
                 ids.list(e["targets"], where + ".targets")};
    if (!by_id.emplace(id, std::move(he)).second) malformed("edge id " + std::to_string(id) + " used twice", where);
  }
  for (auto& [id, he] : by_id) g.add_edge(std::move(he));
  return g;
}

inline Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    malformed(e.what(), "byte " + std::to_string(e.byte));
  }
}

}  // namespace detail

inline Hypergraph graph_from_json(const Json& j) {
  detail::NodeIds ids;
  return detail::graph_from_json(j, ids);
}

inline Cospan cospan_from_json(const Json& j) {
  detail::NodeIds ids;
  Hypergraph g = detail::graph_from_json(j, ids);
  if (!j.contains("left") || !j.contains("right")) detail::malformed("missing 'left' or 'right' interface", "document");
  return Cospan{std::move(g), ids.list(j["left"], "left"), ids.list(j["right"], "right")};
}

inline Cospan parse_cospan_document(std::string_view text) { return cospan_from_json(detail::parse_json(text)); }

inline std::string format_cospan_document(const Cospan& c) { return cospan_to_json(c).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// DOT

namespace detail {

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out;
}

}  // namespace detail

/// Nodes are points, hyperedges labelled boxes; tentacles carry their port
/// number. The interfaces are two rails of numbered ports on either side.
inline std::string to_dot(const Cospan& c, const std::string& name = "cospan") {
  std::ostringstream o;
  o << "digraph \"" << detail::dot_escape(name) << "\" {\n";
  o << "  rankdir=LR;\n";
  o << "  node [fontname=\"Helvetica\", fontsize=10];\n";
  o << "  edge [fontname=\"Helvetica\", fontsize=8, arrowsize=0.6];\n";
  for (std::size_t v = 0; v < c.carrier.node_count(); ++v)
    o << "  n" << v << " [shape=point, width=0.08, xlabel=\"" << v << "\"];\n";
  for (std::size_t e = 0; e < c.carrier.edge_count(); ++e) {
    const auto& he = c.carrier.edge(static_cast<EdgeId>(e));
    o << "  e" << e << " [shape=box, label=\"" << detail::dot_escape(he.label) << "\"];\n";
    for (std::size_t p = 0; p < he.sources.size(); ++p)
      o << "  n" << he.sources[p] << " -> e" << e << " [headlabel=\"" << p << "\"];\n";
    for (std::size_t p = 0; p < he.targets.size(); ++p)
      o << "  e" << e << " -> n" << he.targets[p] << " [taillabel=\"" << p << "\"];\n";
  }
  auto rail = [&](const char* id, const char* label, const std::vector<NodeId>& leg, bool into) {
    o << "  subgraph cluster_" << id << " {\n";
    o << "    label=\"" << label << "\"; style=rounded; color=blue;\n";
    for (std::size_t i = 0; i < leg.size(); ++i)
      o << "    " << id << i << " [shape=plaintext, label=\"" << i << "\"];\n";
    o << "  }\n";
    for (std::size_t i = 0; i < leg.size(); ++i) {
      if (into) {
        o << "  " << id << i << " -> n" << leg[i] << " [style=dashed, arrowhead=none];\n";
      } else {
        o << "  n" << leg[i] << " -> " << id << i << " [style=dashed, arrowhead=none];\n";
      }
    }
  };
  rail("left", "left", c.left, true);
  rail("right", "right", c.right, false);
  o << "}\n";
  return o.str();
}

// ---------------------------------------------------------------------------
// Rule files: `rule <name> : <term> => <term>`, `#` comments

struct RuleSource {
  std::string name;
  Term lhs, rhs;
};

inline std::vector<RuleSource> parse_rule_file(std::string_view text, const Signature& sig) {
  std::vector<RuleSource> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string where = "line " + std::to_string(lineno);
    std::istringstream ls(line);
    std::string kw;
    if (!(ls >> kw)) continue;
    if (kw != "rule") throw Error(ErrorCode::SyntaxError, "expected 'rule <name> : <term> => <term>'", where);
    const auto colon = line.find(':');
    const auto arrow = line.find("=>");
    if (colon == std::string::npos || arrow == std::string::npos || arrow < colon)
      throw Error(ErrorCode::SyntaxError, "expected 'rule <name> : <term> => <term>'", where);
    std::istringstream head(line.substr(0, colon));
    std::string name, extra;
    head >> kw >> name;
    if (name.empty() || (head >> extra)) throw Error(ErrorCode::SyntaxError, "expected one rule name", where);
    auto term_at = [&](std::string_view src) {
      try {
        return parse_term(src, sig);
      } catch (const Error& e) {
        throw Error(e.code(), e.what(), where);
      }
    };
    Term l = term_at(std::string_view(line).substr(colon + 1, arrow - colon - 1));
    Term r = term_at(std::string_view(line).substr(arrow + 2));
    if (term_type(l) != term_type(r)) throw Error(ErrorCode::TypeMismatch, "rule " + name + ": sides have different types", where);
    out.push_back(RuleSource{std::move(name), std::move(l), std::move(r)});
  }
  return out;
}

inline std::vector<RewriteRule> load_rules(std::string_view text, const Signature& sig) {
  std::vector<RewriteRule> out;
  for (const auto& r : parse_rule_file(text, sig)) out.push_back(rule_from_terms(r.name, r.lhs, r.rhs, sig));
  return out;
}

inline std::string format_rule(const RuleSource& r) {
  return "rule " + r.name + " : " + pretty_print(r.lhs) + " => " + pretty_print(r.rhs) + "\n";
}

// ---------------------------------------------------------------------------
// Errors and files

inline Json error_record(const Error& e) {
  return Json{{"error", std::string(to_string(e.code()))}, {"message", e.what()}, {"location", e.location()}};
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + p.string(), p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Writes next to the target, then renames over it.
inline void write_file_atomic(const std::filesystem::path& p, std::string_view content) {
  auto tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + tmp.string(), p.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::IoFailure, "short write to " + tmp.string(), p.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, p, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::IoFailure, "cannot rename onto " + p.string(), p.string());
  }
}

}  // namespace cmonrw
