// Declarative dependency-pattern rules: compilation from a JSON rule
// document and matching against parsed sentences.
//
// A rule binds named variables to distinct tokens of one sentence. Each
// variable carries a conjunction of node predicates; arcs constrain pairs of
// variables to stand in a governor -> dependent relation with one of the
// listed dependency labels. Productions turn a match into role annotations.

#ifndef CAE_RULES_H_
#define CAE_RULES_H_

#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cae/lexicon.h"
#include "cae/model.h"

namespace cae {

inline constexpr std::string_view kRuleSchema = "cae-rules/1";

// Lemma membership, either in a named term set (resolved at compile time)
// or in a literal list.
struct LemmaIn {
  std::string set_name;  // empty for a literal list
  std::set<std::string> lemmas;
};
struct UposIn {
  std::set<std::string> tags;
};
struct FeatsHas {
  std::string name;
  std::string value;
};
struct SurfaceMatches {
  std::string pattern;
  std::shared_ptr<const std::regex> regex;  // case-insensitive, whole surface
};
struct IsFirstPerson {};
struct InEmotionLexicon {};
struct DeprelIn {
  std::set<std::string> labels;
};

using NodePredicate = std::variant<LemmaIn, UposIn, FeatsHas, SurfaceMatches,
                                   IsFirstPerson, InEmotionLexicon, DeprelIn>;

enum class ExtentPolicy {
  kTokenOnly,
  kEnclosingChunk,
  kSubtree,
  kSubtreeWithoutClausalDependents,
};

std::string_view ExtentName(ExtentPolicy policy);
std::optional<ExtentPolicy> ParseExtent(std::string_view name);

struct RuleVariable {
  std::string name;
  std::vector<NodePredicate> predicates;
};

struct RuleArc {
  std::size_t governor;   // index into Rule::vars
  std::size_t dependent;  // index into Rule::vars
  std::set<std::string> deprels;
};

// Points at an annotation of `role` whose span covers the token bound to
// `var`.
struct AnnotationRef {
  RoleLabel role;
  std::size_t var;
};

struct Production {
  RoleLabel role;
  std::size_t var;
  ExtentPolicy extent = ExtentPolicy::kTokenOnly;
  std::optional<AnnotationRef> link;     // becomes cue_link (Cue or Attack)
  std::optional<AnnotationRef> require;  // production fires only if present
};

struct Rule {
  std::string id;
  int priority = 0;
  bool enabled = true;
  std::vector<RuleVariable> vars;  // sorted by name
  std::vector<RuleArc> arcs;
  std::vector<Production> productions;

  std::optional<std::size_t> VarIndex(std::string_view name) const;
};

struct RuleSet {
  std::vector<Rule> rules;  // ordered by (priority desc, id)
  std::string source;       // the rule document text

  const Rule *Find(std::string_view id) const;
};

class CompileError : public Error {
 public:
  CompileError(std::string rule_id, const std::string &message)
      : Error(rule_id.empty() ? message : "rule " + rule_id + ": " + message),
        rule_id_(std::move(rule_id)) {}
  const std::string &rule_id() const { return rule_id_; }

 private:
  std::string rule_id_;
};

// Compiles a rule document:
//   {"schema": "cae-rules/1", "rules": [ {rule}, ... ]}
// Throws CompileError naming the rule on an unknown term set, a
// disconnected pattern, duplicate ids or variables, bad link specs, and
// ParseError on malformed JSON.
RuleSet CompileRuleset(std::string_view document, const TermSets &sets);
// Compiles one rule object (no envelope).
Rule CompileRule(std::string_view rule_json, const TermSets &sets);
// Every error found in `document`, one per rule; empty if it compiles.
std::vector<CompileError> CheckRuleset(std::string_view document,
                                       const TermSets &sets);

// Resources some predicates consult at match time.
struct MatchContext {
  const std::set<std::string> *first_person = nullptr;  // case-folded surfaces
  const EmotionLexicon *emotions = nullptr;
};

bool EvaluatePredicate(const NodePredicate &predicate, const Token &token,
                       const MatchContext &context);

struct MatchResult {
  std::string rule_id;
  std::size_t sentence = 0;
  std::vector<std::size_t> bindings;  // token index per Rule::vars entry

  bool operator==(const MatchResult &) const = default;
};

// Every injective assignment of the rule's variables to tokens that
// satisfies all node predicates and arcs, sorted by the bound-index tuple.
std::vector<MatchResult> FindMatches(const Rule &rule, const Sentence &sentence,
                                     const MatchContext &context);

// Token span for `token` under `policy`.
Span ExtractSpan(std::size_t token, ExtentPolicy policy, const Sentence &sentence);

// True for dependency labels marking a subordinate clause (advcl, ccomp,
// csubj, acl, xcomp, parataxis and their subtypes).
bool IsClausalDeprel(std::string_view deprel);

}  // namespace cae

#endif  // CAE_RULES_H_
