#include <algorithm>
#include <functional>
#include <numeric>

#include "cae/rules.h"
#include "cae/text.h"
#include "json.hpp"

namespace cae {
namespace {

using nlohmann::json;

constexpr std::string_view kExtentNames[] = {
    "TokenOnly", "EnclosingChunk", "Subtree", "SubtreeWithoutClausalDependents"};

std::set<std::string> StringSet(const json &j, const std::string &rule,
                                const char *what) {
  if (!j.is_array() || j.empty()) {
    throw CompileError(rule, std::string(what) + " expects a non-empty list");
  }
  std::set<std::string> out;
  for (const json &v : j) {
    if (!v.is_string()) throw CompileError(rule, std::string(what) + " expects strings");
    out.insert(v.get<std::string>());
  }
  return out;
}

NodePredicate CompilePredicate(const json &j, const std::string &rule,
                               const TermSets &sets) {
  if (!j.is_object() || j.size() != 1) {
    throw CompileError(rule, "a predicate is a single-key object, got " + j.dump());
  }
  const std::string &kind = j.begin().key();
  const json &arg = j.begin().value();
  if (kind == "lemma_in") {
    LemmaIn p;
    if (arg.is_string()) {
      p.set_name = arg.get<std::string>();
      auto it = sets.find(p.set_name);
      if (it == sets.end()) {
        throw CompileError(rule, "unknown term set '" + p.set_name + "'");
      }
      p.lemmas = it->second.lemmas;
    } else {
      for (const std::string &lemma : StringSet(arg, rule, "lemma_in")) {
        p.lemmas.insert(CaseFold(lemma));
      }
    }
    return p;
  }
  if (kind == "upos_in") return UposIn{StringSet(arg, rule, "upos_in")};
  if (kind == "deprel_in") return DeprelIn{StringSet(arg, rule, "deprel_in")};
  if (kind == "feats_has") {
    FeatsHas p;
    if (arg.is_string()) {
      std::string s = arg.get<std::string>();
      std::size_t eq = s.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == s.size()) {
        throw CompileError(rule, "feats_has expects 'Name=Value'");
      }
      p.name = s.substr(0, eq);
      p.value = s.substr(eq + 1);
    } else if (arg.is_object() && arg.contains("name") && arg.contains("value")) {
      p.name = arg.at("name").get<std::string>();
      p.value = arg.at("value").get<std::string>();
    } else {
      throw CompileError(rule, "feats_has expects 'Name=Value'");
    }
    return p;
  }
  if (kind == "surface_matches") {
    if (!arg.is_string()) throw CompileError(rule, "surface_matches expects a pattern");
    SurfaceMatches p;
    p.pattern = arg.get<std::string>();
    try {
      p.regex = std::make_shared<const std::regex>(
          p.pattern, std::regex::ECMAScript | std::regex::icase);
    } catch (const std::regex_error &e) {
      throw CompileError(rule, "bad surface pattern '" + p.pattern + "': " + e.what());
    }
    return p;
  }
  if (kind == "is_first_person") {
    if (arg != true) throw CompileError(rule, "is_first_person expects true");
    return IsFirstPerson{};
  }
  if (kind == "in_emotion_lexicon") {
    if (arg != true) throw CompileError(rule, "in_emotion_lexicon expects true");
    return InEmotionLexicon{};
  }
  throw CompileError(rule, "unknown predicate '" + kind + "'");
}

std::size_t VarRef(const Rule &rule, const json &j, const char *what) {
  if (!j.is_string()) throw CompileError(rule.id, std::string(what) + " expects a variable name");
  auto idx = rule.VarIndex(j.get<std::string>());
  if (!idx) {
    throw CompileError(rule.id, std::string(what) + " references unknown variable '" +
                                    j.get<std::string>() + "'");
  }
  return *idx;
}

AnnotationRef CompileRef(const Rule &rule, const json &j, const char *what) {
  if (!j.is_object() || !j.contains("role") || !j.contains("var")) {
    throw CompileError(rule.id, std::string(what) + " expects {role, var}");
  }
  std::string role_name = j.at("role").get<std::string>();
  auto role = ParseRole(role_name);
  if (!role) throw CompileError(rule.id, std::string(what) + ": unknown role '" + role_name + "'");
  return AnnotationRef{*role, VarRef(rule, j.at("var"), what)};
}

void CheckKeys(const json &j, std::initializer_list<std::string_view> allowed,
               const std::string &rule, const char *what) {
  for (const auto &[key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw CompileError(rule, std::string("unknown ") + what + " field '" + key + "'");
    }
  }
}

bool IsConnected(const Rule &rule) {
  const std::size_t n = rule.vars.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (const RuleArc &arc : rule.arcs) parent[find(arc.governor)] = find(arc.dependent);
  for (std::size_t i = 1; i < n; ++i) {
    if (find(i) != find(0)) return false;
  }
  return true;
}

Rule CompileRuleJson(const json &j, const TermSets &sets) {
  if (!j.is_object()) throw CompileError("", "a rule must be an object");
  Rule rule;
  if (!j.contains("id") || !j.at("id").is_string() ||
      j.at("id").get<std::string>().empty()) {
    throw CompileError("", "rule without an id");
  }
  rule.id = j.at("id").get<std::string>();
  CheckKeys(j, {"id", "priority", "enabled", "vars", "arcs", "produce", "comment"},
            rule.id, "rule");
  try {
    rule.priority = j.value("priority", 0);
    rule.enabled = j.value("enabled", true);
  } catch (const json::exception &) {
    throw CompileError(rule.id, "priority must be an integer, enabled a boolean");
  }

  if (!j.contains("vars") || !j.at("vars").is_object() || j.at("vars").empty()) {
    throw CompileError(rule.id, "rule needs at least one variable");
  }
  for (const auto &[name, preds] : j.at("vars").items()) {
    if (name.empty()) throw CompileError(rule.id, "empty variable name");
    if (!preds.is_array()) {
      throw CompileError(rule.id, "variable '" + name + "' needs a predicate list");
    }
    RuleVariable var;
    var.name = name;
    for (const json &p : preds) var.predicates.push_back(CompilePredicate(p, rule.id, sets));
    rule.vars.push_back(std::move(var));
  }
  std::sort(rule.vars.begin(), rule.vars.end(),
            [](const RuleVariable &a, const RuleVariable &b) { return a.name < b.name; });
  for (std::size_t i = 1; i < rule.vars.size(); ++i) {
    if (rule.vars[i].name == rule.vars[i - 1].name) {
      throw CompileError(rule.id, "duplicate variable '" + rule.vars[i].name + "'");
    }
  }

  for (const json &a : j.value("arcs", json::array())) {
    RuleArc arc;
    if (a.is_array() && a.size() == 3) {
      arc.governor = VarRef(rule, a[0], "arc");
      arc.dependent = VarRef(rule, a[1], "arc");
      arc.deprels = StringSet(a[2], rule.id, "arc deprels");
    } else if (a.is_object()) {
      CheckKeys(a, {"gov", "dep", "deprels"}, rule.id, "arc");
      arc.governor = VarRef(rule, a.value("gov", json()), "arc");
      arc.dependent = VarRef(rule, a.value("dep", json()), "arc");
      arc.deprels = StringSet(a.value("deprels", json()), rule.id, "arc deprels");
    } else {
      throw CompileError(rule.id, "an arc is [gov, dep, [deprels]]");
    }
    if (arc.governor == arc.dependent) {
      throw CompileError(rule.id, "arc from a variable to itself");
    }
    rule.arcs.push_back(std::move(arc));
  }
  if (!IsConnected(rule)) throw CompileError(rule.id, "pattern is not connected");

  if (!j.contains("produce") || !j.at("produce").is_array() || j.at("produce").empty()) {
    throw CompileError(rule.id, "rule needs at least one production");
  }
  for (const json &p : j.at("produce")) {
    if (!p.is_object()) throw CompileError(rule.id, "a production must be an object");
    CheckKeys(p, {"role", "var", "extent", "link", "require"}, rule.id, "production");
    Production prod;
    std::string role_name = p.value("role", std::string());
    auto role = ParseRole(role_name);
    if (!role) throw CompileError(rule.id, "unknown role '" + role_name + "'");
    prod.role = *role;
    prod.var = VarRef(rule, p.value("var", json()), "production");
    std::string extent = p.value("extent", std::string("TokenOnly"));
    auto policy = ParseExtent(extent);
    if (!policy) throw CompileError(rule.id, "unknown extent '" + extent + "'");
    prod.extent = *policy;
    if (p.contains("link")) {
      prod.link = CompileRef(rule, p.at("link"), "link");
      if (prod.link->role != RoleLabel::kCue && prod.link->role != RoleLabel::kAttack) {
        throw CompileError(rule.id, "links must point at a Cue or an Attack");
      }
      if (prod.role == RoleLabel::kCue || prod.role == RoleLabel::kAttack) {
        throw CompileError(rule.id, "Cue and Attack productions cannot carry a link");
      }
    }
    if (p.contains("require")) prod.require = CompileRef(rule, p.at("require"), "require");
    rule.productions.push_back(prod);
  }
  return rule;
}

json ParseJson(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error &e) {
    throw ParseError(0, std::string("rule document: ") + e.what());
  }
}

const json &RuleList(const json &doc) {
  if (!doc.is_object()) throw CompileError("", "rule document must be an object");
  if (!doc.contains("schema") || doc.at("schema") != kRuleSchema) {
    throw CompileError("", "rule document must declare schema \"" +
                               std::string(kRuleSchema) + "\"");
  }
  if (!doc.contains("rules") || !doc.at("rules").is_array()) {
    throw CompileError("", "rule document needs a \"rules\" list");
  }
  return doc.at("rules");
}

void SortRules(std::vector<Rule> &rules) {
  std::sort(rules.begin(), rules.end(), [](const Rule &a, const Rule &b) {
    if (a.priority != b.priority) return a.priority > b.priority;
    return a.id < b.id;
  });
}

}  // namespace

std::string_view ExtentName(ExtentPolicy policy) {
  return kExtentNames[static_cast<std::size_t>(policy)];
}

std::optional<ExtentPolicy> ParseExtent(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kExtentNames); ++i) {
    if (kExtentNames[i] == name) return static_cast<ExtentPolicy>(i);
  }
  return std::nullopt;
}

std::optional<std::size_t> Rule::VarIndex(std::string_view name) const {
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (vars[i].name == name) return i;
  }
  return std::nullopt;
}

const Rule *RuleSet::Find(std::string_view id) const {
  for (const Rule &r : rules) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

Rule CompileRule(std::string_view rule_json, const TermSets &sets) {
  return CompileRuleJson(ParseJson(rule_json), sets);
}

RuleSet CompileRuleset(std::string_view document, const TermSets &sets) {
  json doc = ParseJson(document);
  RuleSet set;
  set.source = std::string(document);
  std::set<std::string> seen;
  for (const json &r : RuleList(doc)) {
    Rule rule = CompileRuleJson(r, sets);
    if (!seen.insert(rule.id).second) {
      throw CompileError(rule.id, "duplicate rule id");
    }
    set.rules.push_back(std::move(rule));
  }
  SortRules(set.rules);
  return set;
}

std::vector<CompileError> CheckRuleset(std::string_view document,
                                       const TermSets &sets) {
  std::vector<CompileError> errors;
  json doc;
  try {
    doc = ParseJson(document);
    const json &rules = RuleList(doc);
    std::set<std::string> seen;
    for (const json &r : rules) {
      try {
        Rule rule = CompileRuleJson(r, sets);
        if (!seen.insert(rule.id).second) {
          errors.emplace_back(rule.id, "duplicate rule id");
        }
      } catch (const CompileError &e) {
        errors.push_back(e);
      }
    }
  } catch (const CompileError &e) {
    errors.push_back(e);
  } catch (const ParseError &e) {
    errors.emplace_back("", e.what());
  }
  return errors;
}

}  // namespace cae
