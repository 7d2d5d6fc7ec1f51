// Scoring predicted annotations against gold: per-role precision / recall /
// F1 under exact, overlap or Jaccard span matching, and a labeled diff.

#ifndef CAE_EVAL_H_
#define CAE_EVAL_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cae/model.h"

namespace cae {

struct MatchPolicy {
  enum class Kind { kExact, kOverlap, kJaccard };
  Kind kind = Kind::kExact;
  double theta = 1.0;  // Jaccard threshold, in (0, 1]

  static MatchPolicy Exact() { return {Kind::kExact, 1.0}; }
  static MatchPolicy Overlap() { return {Kind::kOverlap, 1.0}; }
  static MatchPolicy Jaccard(double theta) { return {Kind::kJaccard, theta}; }

  bool Accepts(const Span &gold, const Span &pred) const;
  std::string ToString() const;
};

// "exact", "overlap" or "jaccard:<theta>". Throws Error otherwise.
MatchPolicy ParsePolicy(std::string_view text);

double JaccardRatio(const Span &a, const Span &b);

struct RoleScore {
  std::size_t gold = 0;
  std::size_t predicted = 0;
  std::size_t matched = 0;

  double Precision() const;
  double Recall() const;
  double F1() const;
};

struct ScoreReport {
  MatchPolicy policy;
  std::map<RoleLabel, RoleScore> roles;  // roles present in gold or pred
  std::size_t matched_cues = 0;
  std::size_t cue_category_agreements = 0;

  RoleScore Micro() const;
  double MacroPrecision() const;
  double MacroRecall() const;
  double MacroF1() const;
  // Fraction of matched cues with the same emotion category; nullopt when
  // no cue matched.
  std::optional<double> CueCategoryAccuracy() const;

  // Adds another document's counts.
  void Merge(const ScoreReport &other);
};

// Matched (gold, pred) index pairs for one role: a maximum one-to-one
// alignment seeded greedily by descending overlap, then position.
std::vector<std::pair<std::size_t, std::size_t>> AlignRole(
    const std::vector<const RoleAnnotation *> &gold,
    const std::vector<const RoleAnnotation *> &pred, const MatchPolicy &policy);

// Throws Error when the two sets name different documents.
ScoreReport Score(const AnnotationSet &gold, const AnnotationSet &pred,
                  const MatchPolicy &policy);

std::string FormatReportTable(const ScoreReport &report);
std::string FormatReportJson(const ScoreReport &report);

struct DiffRecord {
  enum class Kind { kFalsePositive, kFalseNegative, kSpanMismatch };
  Kind kind;
  std::optional<RoleAnnotation> gold;
  std::optional<RoleAnnotation> pred;
};

std::string_view DiffKindName(DiffRecord::Kind kind);

// Unmatched annotations under exact matching. Overlapping leftovers of the
// same role pair up as span mismatches; every unmatched annotation appears
// in exactly one record.
std::vector<DiffRecord> Diff(const AnnotationSet &gold, const AnnotationSet &pred);

}  // namespace cae

#endif  // CAE_EVAL_H_
