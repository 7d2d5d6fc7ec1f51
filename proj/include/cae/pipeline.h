// The role-annotation pipeline: lexicon cue detection, attack terms, rule
// matching, experiencer / target / cause detectors, negation and modifier
// attachment, coreference propagation and duplicate resolution.

#ifndef CAE_PIPELINE_H_
#define CAE_PIPELINE_H_

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cae/lexicon.h"
#include "cae/model.h"
#include "cae/rules.h"

namespace cae {

// Lemma sequence matched contiguously, e.g. {"a", "little"}.
using MarkerPhrase = std::vector<std::string>;

struct LanguageProfile {
  std::set<std::string> first_person;  // case-folded surfaces
  std::vector<MarkerPhrase> causal_markers;
  std::vector<MarkerPhrase> negation_markers;
  std::vector<MarkerPhrase> degree_markers;
};

enum class ConflictPolicy {
  kCollapseIdentical,  // identical (role, span) duplicates keep one record
  kKeepAll,
};

struct PipelineConfig {
  std::map<std::string, LanguageProfile> languages;
  std::size_t max_path = 2;  // negation / modifier scope in dependency hops
  bool keep_marker = true;   // keep the causal marker inside Cause spans
  CueConfig cue;
  ConflictPolicy conflict = ConflictPolicy::kCollapseIdentical;
  std::string attack_set = "attack";

  // English and French marker lists.
  static PipelineConfig Default();

  // Profile for the primary subtag of `language`; the union of all
  // profiles when the language is unknown.
  LanguageProfile ProfileFor(std::string_view language) const;
};

// Working annotation list for one document. Ids are assigned on Add.
class Workspace {
 public:
  std::size_t Add(RoleAnnotation annotation);
  std::vector<RoleAnnotation> &annotations() { return annotations_; }
  const std::vector<RoleAnnotation> &annotations() const { return annotations_; }
  RoleAnnotation *Find(std::size_t id);
  // Ids of annotations with `role` in `sentence`, in insertion order.
  std::vector<std::size_t> InSentence(std::size_t sentence, RoleLabel role) const;

 private:
  std::vector<RoleAnnotation> annotations_;
  std::size_t next_id_ = 0;
};

// Provenance names used by the built-in detectors.
inline constexpr std::string_view kCueDetector = "lexicon-cue";
inline constexpr std::string_view kAttackDetector = "attack-terms";
inline constexpr std::string_view kFirstPersonDetector = "first-person";
inline constexpr std::string_view kSubjectDetector = "cue-subject";
inline constexpr std::string_view kTargetDetector = "cue-object";
inline constexpr std::string_view kCauseDetector = "causal-clause";
inline constexpr std::string_view kNegationDetector = "negation-marker";
inline constexpr std::string_view kModifierDetector = "degree-marker";
inline constexpr std::string_view kCorefProvenance = "coref";

// Undirected dependency-tree distance between every pair of tokens.
std::vector<std::vector<std::size_t>> PathLengths(const Sentence &sentence);

// Token of `span` closest to the root (leftmost on ties).
std::size_t SpanHeadToken(const Sentence &sentence, const Span &span);

// Occurrences of `phrases` in the sentence, longest first, left to right,
// without overlaps.
std::vector<Span> FindMarkers(const Sentence &sentence,
                              const std::vector<MarkerPhrase> &phrases);

void DetectCues(const Sentence &sentence, const Lexicons &lexicons,
                const PipelineConfig &config, Workspace &ws);
void DetectAttacks(const Sentence &sentence, const Lexicons &lexicons,
                   const PipelineConfig &config, Workspace &ws);
void ApplyRules(const RuleSet &rules, const Sentence &sentence,
                const MatchContext &context, Workspace &ws);
void DetectExperiencers(const Sentence &sentence, const LanguageProfile &profile,
                        Workspace &ws);
void DetectTargetsAndCauses(const Sentence &sentence, const LanguageProfile &profile,
                            const PipelineConfig &config, Workspace &ws);
void AttachNegationAndModifiers(const Sentence &sentence,
                                const LanguageProfile &profile,
                                const PipelineConfig &config, Workspace &ws);

// Spreads Experiencer and Target annotations along coreference chains until
// nothing changes. Idempotent; other roles are untouched.
AnnotationSet PropagateCoref(const Document &doc, const AnnotationSet &set);

// Collapses identical (role, span) duplicates, keeping the record with the
// highest-priority provenance and redirecting links to it.
AnnotationSet ResolveConflicts(const AnnotationSet &set, const RuleSet &rules);

// Runs all stages in order and returns the canonical annotation set.
AnnotationSet AnnotateDocument(const Document &doc, const RuleSet &rules,
                               const Lexicons &lexicons, const PipelineConfig &config);

}  // namespace cae

#endif  // CAE_PIPELINE_H_
