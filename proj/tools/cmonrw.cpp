// cmonrw: command-line front end to the rewriting library.
//
// Exit status: 0 on success, 1 on a domain error (a JSON record goes to
// stderr), 2 on a usage error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cmonrw/cospan.hpp"
#include "cmonrw/decompose.hpp"
#include "cmonrw/dpo.hpp"
#include "cmonrw/io.hpp"
#include "cmonrw/levels.hpp"
#include "cmonrw/oracle.hpp"
#include "cmonrw/translate.hpp"

using namespace cmonrw;
namespace fs = std::filesystem;

namespace {

struct Options {
  std::string format = "text";
  std::string out;
  std::string sig_path;
  std::string cospan_path;
  std::string term;
  std::string term_path;
  std::string rules_path;
  std::string host_path;
  std::string host_term;
  std::string dot_path;
  std::string dot_dir;
  std::string strategy;
  std::string match_mode = "ordered";
  std::size_t max_steps = 100;
  std::size_t bound = 0;
  bool all = false;
};

bool structured(const Options& o) { return o.format == "structured"; }

// Inputs are read up front so that a missing file fails before any work.
struct Inputs {
  Signature sig;
  std::optional<std::string> cospan_text, term_text, rules_text, host_text;
};

Inputs read_inputs(const Options& o) {
  Inputs in;
  if (!o.sig_path.empty()) in.sig = parse_signature(read_file(o.sig_path));
  if (!o.cospan_path.empty()) in.cospan_text = read_file(o.cospan_path);
  if (!o.term_path.empty()) in.term_text = read_file(o.term_path);
  if (!o.term.empty()) in.term_text = o.term;
  if (!o.rules_path.empty()) in.rules_text = read_file(o.rules_path);
  if (!o.host_path.empty()) in.host_text = read_file(o.host_path);
  return in;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
  } else {
    write_file_atomic(o.out, text);
  }
}

void emit(const Options& o, const Json& j, const std::string& text) { emit(o, structured(o) ? j.dump(2) + "\n" : text); }

Term input_term(const Inputs& in) {
  if (!in.term_text) throw Error(ErrorCode::Usage, "a term is required (--term or --term-file)");
  std::string t = *in.term_text;
  while (!t.empty() && (t.back() == '\n' || t.back() == ' ')) t.pop_back();
  return parse_term(t, in.sig);
}

Cospan input_cospan(const Inputs& in) {
  if (!in.cospan_text) throw Error(ErrorCode::Usage, "a cospan document is required (--cospan)");
  Cospan c = parse_cospan_document(*in.cospan_text);
  c.validate();
  return c;
}

Cospan input_host(const Options& o, const Inputs& in) {
  if (in.host_text) return parse_cospan_document(*in.host_text);
  if (!o.host_term.empty()) return eval_term(parse_term(o.host_term, in.sig), in.sig);
  throw Error(ErrorCode::Usage, "a host is required (--host or --host-term)");
}

std::vector<RewriteRule> input_rules(const Inputs& in) {
  if (!in.rules_text) throw Error(ErrorCode::Usage, "a rule file is required (--rules)");
  return load_rules(*in.rules_text, in.sig);
}

MatchMode match_mode(const Options& o) { return o.match_mode == "convex" ? MatchMode::Convex : MatchMode::Ordered; }

std::string yes(bool b) { return b ? "true" : "false"; }

// ---------------------------------------------------------------------------

int run_check(const Options& o, const Inputs& in) {
  const Cospan c = input_cospan(in);
  if (!in.sig.generators().empty()) c.carrier.validate(in.sig);
  const bool rm = is_right_monogamous(c), ac = is_acyclic(c), mono = is_monogamous(c);
  Json j{{"dom", c.dom()},          {"cod", c.cod()},          {"nodes", c.carrier.node_count()},
         {"edges", c.carrier.edge_count()}, {"right_monogamous", rm}, {"acyclic", ac},
         {"monogamous", mono}};
  emit(o, j, "right-monogamous: " + yes(rm) + ", acyclic: " + yes(ac) + "\n");
  return 0;
}

int run_translate(const Options& o, const Inputs& in) {
  const Cospan c = eval_term(input_term(in), in.sig);
  if (!o.dot_path.empty()) write_file_atomic(o.dot_path, to_dot(c, "term"));
  emit(o, format_cospan_document(c));
  return 0;
}

int run_factorize(const Options& o, const Inputs& in) {
  const Cospan c = input_cospan(in);
  const auto f = factorise_into_levels(c);
  Json factors = Json::array();
  std::string text;
  for (std::size_t i = 0; i < f.factors.size(); ++i) {
    const auto& fa = f.factors[i];
    factors.push_back(Json{{"m", cospan_to_json(fa.m)}, {"k", fa.k}, {"d", cospan_to_json(fa.d)}});
    text += "level " + std::to_string(i) + ": M " + std::to_string(fa.m.dom()) + " -> " + std::to_string(fa.m.cod()) +
            " (" + std::to_string(fa.m.carrier.edge_count()) + " edges), k = " + std::to_string(fa.k) + ", D " +
            std::to_string(fa.d.dom()) + " -> " + std::to_string(fa.d.cod()) + "\n";
  }
  text += "pi:";
  for (auto v : f.pi.table) text += " " + std::to_string(v);
  text += "\n";
  emit(o, Json{{"factors", factors}, {"pi", f.pi.table}}, text);
  return 0;
}

int run_readback(const Options& o, const Inputs& in) {
  const Cospan c = input_cospan(in);
  const Term t = readback_term(c, in.sig);
  emit(o, Json{{"term", pretty_print(t)}}, pretty_print(t) + "\n");
  return 0;
}

Json hom_json(const Homomorphism& h) { return Json{{"nodes", h.node_map}, {"edges", h.edge_map}}; }

int run_match(const Options& o, const Inputs& in) {
  const auto rules = input_rules(in);
  const Cospan host = input_host(o, in);
  Json list = Json::array();
  std::string text;
  for (std::size_t r = 0; r < rules.size(); ++r) {
    for (const auto& m : enumerate_matches(rules[r], host, match_mode(o))) {
      std::size_t comps = 0;
      std::string note;
      try {
        comps = boundary_complement(rules[r], m, host).size();
      } catch (const Error& e) {
        note = std::string(to_string(e.code()));
      }
      Json j = hom_json(m.hom);
      j["rule"] = rules[r].name;
      j["complements"] = comps;
      if (!note.empty()) j["note"] = note;
      list.push_back(j);
      text += rules[r].name + ": edges";
      for (auto e : m.hom.edge_map) text += " " + std::to_string(e);
      text += ", nodes";
      for (auto v : m.hom.node_map) text += " " + std::to_string(v);
      text += ", complements " + std::to_string(comps) + (note.empty() ? "" : " (" + note + ")") + "\n";
    }
  }
  if (list.empty()) text = "no matches\n";
  emit(o, Json{{"matches", list}}, text);
  return 0;
}

int run_rewrite(const Options& o, const Inputs& in) {
  const auto rules = input_rules(in);
  const Cospan host = input_host(o, in);
  auto steps = rewrite_all(rules, host, match_mode(o));
  if (!o.all && steps.size() > 1) steps.resize(1);
  if (!o.dot_dir.empty()) fs::create_directories(o.dot_dir);
  Json list = Json::array();
  std::string text;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    Json j{{"rule", rules[s.rule].name}, {"match", hom_json(s.match.hom)}, {"result", cospan_to_json(s.result)}};
    list.push_back(j);
    text += "step " + std::to_string(i) + ": " + rules[s.rule].name + " -> " + pretty_print(readback_term(s.result, in.sig)) +
            "\n";
    if (!o.dot_dir.empty())
      write_file_atomic(fs::path(o.dot_dir) / ("step_" + std::to_string(i) + ".dot"), to_dot(s.result, "step"));
  }
  if (steps.empty()) text = "no steps\n";
  Json out{{"steps", list}};
  if (!o.strategy.empty()) {
    const Strategy st = o.strategy == "leftmost" ? Strategy::Leftmost : Strategy::ExhaustiveBfs;
    const auto nf = normalize(rules, host, st, o.max_steps, match_mode(o));
    Json forms = Json::array();
    for (std::size_t i = 0; i < nf.size(); ++i) {
      forms.push_back(cospan_to_json(nf[i]));
      text += "normal form " + std::to_string(i) + ": " + pretty_print(readback_term(nf[i], in.sig)) + "\n";
      if (!o.dot_dir.empty())
        write_file_atomic(fs::path(o.dot_dir) / ("normal_" + std::to_string(i) + ".dot"), to_dot(nf[i], "normal"));
    }
    out["normal_forms"] = forms;
  }
  emit(o, out, text);
  return 0;
}

int run_oracle_compare(const Options& o, const Inputs& in) {
  if (!in.rules_text) throw Error(ErrorCode::Usage, "a rule file is required (--rules)");
  if (o.host_term.empty()) throw Error(ErrorCode::Usage, "oracle-compare needs the host as a term (--host-term)");
  const auto sources = parse_rule_file(*in.rules_text, in.sig);
  const Term d = parse_term(o.host_term, in.sig);
  const std::size_t bound = o.bound ? o.bound : term_size(d) + 6;
  const Cospan host = eval_term(d, in.sig);
  std::map<CanonicalKey, std::string> dpo, oracle;
  bool truncated = false;
  for (const auto& src : sources) {
    const auto rule = rule_from_terms(src.name, src.lhs, src.rhs, in.sig);
    for (const auto& s : rewrite_all({rule}, host, match_mode(o)))
      dpo.emplace(cospan_key(s.result), pretty_print(readback_term(s.result, in.sig)));
    const auto res = enumerate_rewrites_bruteforce(src.lhs, src.rhs, d, in.sig, bound);
    truncated = truncated || res.truncated;
    for (std::size_t i = 0; i < res.results.size(); ++i) oracle.emplace(res.keys[i], pretty_print(res.results[i]));
  }
  Json only_dpo = Json::array(), only_oracle = Json::array(), jd = Json::array(), jo = Json::array();
  for (const auto& [k, t] : dpo) {
    jd.push_back(t);
    if (!oracle.count(k)) only_dpo.push_back(t);
  }
  for (const auto& [k, t] : oracle) {
    jo.push_back(t);
    if (!dpo.count(k)) only_oracle.push_back(t);
  }
  const bool agree = only_dpo.empty() && only_oracle.empty();
  std::string text = "dpo (" + std::to_string(jd.size()) + "):\n";
  for (const auto& t : jd) text += "  " + t.get<std::string>() + "\n";
  text += "oracle (" + std::to_string(jo.size()) + "):\n";
  for (const auto& t : jo) text += "  " + t.get<std::string>() + "\n";
  text += "only dpo: " + std::to_string(only_dpo.size()) + ", only oracle: " + std::to_string(only_oracle.size()) +
          (truncated ? " (oracle truncated)" : "") + "\n";
  emit(o,
       Json{{"dpo", jd},
            {"oracle", jo},
            {"only_dpo", only_dpo},
            {"only_oracle", only_oracle},
            {"agree", agree},
            {"bound", bound},
            {"truncated", truncated}},
       text);
  return 0;
}

int run_export(const Options& o, const Inputs& in) {
  const Cospan c = in.cospan_text ? input_cospan(in) : eval_term(input_term(in), in.sig);
  emit(o, to_dot(c, "cospan"));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rewriting of string diagrams modulo commutative monoids"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "structured"}));
  app.add_option("-o,--out", o.out, "Write output here instead of stdout");
  app.add_option("--sig", o.sig_path, "Signature file");

  auto* check = app.add_subcommand("check", "Report right-monogamy and acyclicity of a cospan");
  check->add_option("--cospan", o.cospan_path, "Cospan document")->required();

  auto* translate = app.add_subcommand("translate", "Evaluate a term to a cospan document");
  auto* tt = translate->add_option("--term", o.term, "Term text");
  translate->add_option("--term-file", o.term_path, "File holding a term")->excludes(tt);
  translate->add_option("--dot", o.dot_path, "Also write DOT here");

  auto* factorize = app.add_subcommand("factorize", "Factorise a cospan into levels");
  factorize->add_option("--cospan", o.cospan_path, "Cospan document")->required();

  auto* readback = app.add_subcommand("readback", "Read a cospan back into a term");
  readback->add_option("--cospan", o.cospan_path, "Cospan document")->required();

  auto add_host = [&](CLI::App* sub) {
    auto* h = sub->add_option("--host", o.host_path, "Host cospan document");
    sub->add_option("--host-term", o.host_term, "Host given as a term")->excludes(h);
    sub->add_option("--rules", o.rules_path, "Rule file")->required();
    sub->add_option("--match-mode", o.match_mode, "Match condition")->check(CLI::IsMember({"ordered", "convex"}));
  };
  auto* match = app.add_subcommand("match", "List the matches of each rule");
  add_host(match);

  auto* rewrite = app.add_subcommand("rewrite", "Rewrite a host");
  add_host(rewrite);
  rewrite->add_option("--strategy", o.strategy, "Also normalise")->check(CLI::IsMember({"bfs", "leftmost"}));
  rewrite->add_option("--max-steps", o.max_steps, "Step budget for --strategy");
  rewrite->add_flag("--all", o.all, "List every one-step rewrite, not just the first");
  rewrite->add_option("--dot-dir", o.dot_dir, "Write DOT files of results here");

  auto* compare = app.add_subcommand("oracle-compare", "Compare DPO rewriting with the brute-force oracle");
  add_host(compare);
  compare->add_option("--bound", o.bound, "Oracle wire bound (default: host size + 6)");

  auto* exp = app.add_subcommand("export", "Write DOT for a cospan or term");
  auto* ec = exp->add_option("--cospan", o.cospan_path, "Cospan document");
  exp->add_option("--term", o.term, "Term text")->excludes(ec);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const Inputs in = read_inputs(o);
    if (*check) return run_check(o, in);
    if (*translate) return run_translate(o, in);
    if (*factorize) return run_factorize(o, in);
    if (*readback) return run_readback(o, in);
    if (*match) return run_match(o, in);
    if (*rewrite) return run_rewrite(o, in);
    if (*compare) return run_oracle_compare(o, in);
    if (*exp) return run_export(o, in);
  } catch (const Error& e) {
    std::cerr << error_record(e).dump() << "\n";
    return e.code() == ErrorCode::Usage ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << Json{{"error", "Internal"}, {"message", e.what()}, {"location", ""}}.dump() << "\n";
    return 1;
  }
  return 2;
}
