#include "cae/model.h"

#include <algorithm>
#include <array>
#include <numeric>
#include <set>
#include <tuple>

namespace cae {

bool Token::HasFeat(std::string_view name, std::string_view value) const {
  auto it = feats.find(std::string(name));
  return it != feats.end() && it->second == value;
}

std::size_t Span::OverlapSize(const Span &other) const {
  if (!Overlaps(other)) return 0;
  return std::min(end, other.end) - std::max(start, other.start);
}

std::string FormatSpan(const Span &span) {
  return std::to_string(span.sentence) + ":" + std::to_string(span.start) +
         ":" + std::to_string(span.end);
}

std::size_t Document::TokenCount() const {
  std::size_t n = 0;
  for (const Sentence &s : sentences) n += s.size();
  return n;
}

bool Document::IsValidSpan(const Span &span) const {
  return span.sentence < sentences.size() && span.start < span.end &&
         span.end <= sentences[span.sentence].size();
}

const RoleAnnotation *AnnotationSet::Find(std::size_t id) const {
  for (const RoleAnnotation &a : annotations) {
    if (a.id == id) return &a;
  }
  return nullptr;
}

void CheckIntegrity(const AnnotationSet &set) {
  std::map<std::size_t, RoleLabel> roles;
  for (const RoleAnnotation &a : set.annotations) {
    if (!roles.emplace(a.id, a.role).second) {
      throw IntegrityError("duplicate annotation id " + std::to_string(a.id));
    }
  }
  for (const RoleAnnotation &a : set.annotations) {
    std::string who = "annotation " + std::to_string(a.id);
    if (a.span.start >= a.span.end) throw IntegrityError(who + ": empty span");
    if (a.role != RoleLabel::kCue) {
      if (a.emotion) throw IntegrityError(who + ": emotion on a non-Cue role");
      if (a.negated) throw IntegrityError(who + ": negated on a non-Cue role");
      if (a.intensity_span) {
        throw IntegrityError(who + ": intensity span on a non-Cue role");
      }
    }
    if (a.cue_link) {
      auto it = roles.find(*a.cue_link);
      if (it == roles.end()) {
        throw IntegrityError(who + ": dangling cue_link " +
                             std::to_string(*a.cue_link));
      }
      if (it->second != RoleLabel::kCue && it->second != RoleLabel::kAttack) {
        throw IntegrityError(who + ": cue_link " + std::to_string(*a.cue_link) +
                             " is neither a Cue nor an Attack");
      }
    }
  }
}

std::vector<std::string> CheckAgainstDocument(const AnnotationSet &set,
                                              const Document &doc) {
  std::vector<std::string> problems;
  if (set.document_id != doc.id) {
    problems.push_back("annotation set is for document '" + set.document_id +
                       "', not '" + doc.id + "'");
  }
  for (const RoleAnnotation &a : set.annotations) {
    if (!doc.IsValidSpan(a.span)) {
      problems.push_back("annotation " + std::to_string(a.id) + ": span " +
                         FormatSpan(a.span) + " out of range");
    }
    if (a.intensity_span && !doc.IsValidSpan(*a.intensity_span)) {
      problems.push_back("annotation " + std::to_string(a.id) +
                         ": intensity span " + FormatSpan(*a.intensity_span) +
                         " out of range");
    }
  }
  return problems;
}

AnnotationSet Canonicalize(const AnnotationSet &set) {
  CheckIntegrity(set);
  const auto &in = set.annotations;
  std::vector<std::size_t> order(in.size());
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](std::size_t i) {
    const RoleAnnotation &a = in[i];
    return std::make_tuple(a.span.sentence, a.span.start, a.span.end, a.role,
                           a.emotion, a.negated, a.intensity_span,
                           std::string_view(a.provenance));
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return key(x) < key(y); });

  std::map<std::size_t, std::size_t> renumber;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    renumber[in[order[pos]].id] = pos;
  }
  AnnotationSet out;
  out.document_id = set.document_id;
  out.annotations.reserve(in.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    RoleAnnotation a = in[order[pos]];
    a.id = pos;
    if (a.cue_link) a.cue_link = renumber.at(*a.cue_link);
    out.annotations.push_back(std::move(a));
  }
  return out;
}

namespace {

constexpr std::array<std::string_view, 10> kRoleNames = {
    "Cue",       "Experiencer", "Target", "Cause",    "Territory",
    "Object",    "Attack",      "Attacker", "Modifier", "Negation"};

constexpr std::array<std::string_view, 6> kEmotionNames = {
    "Joy", "Sadness", "Anger", "Fear", "UnspecifiedNegative",
    "UnspecifiedPositive"};

constexpr std::array<std::string_view, 5> kSectionNames = {
    "Facts", "Emotions", "Reasons", "Actions", "Unknown"};

template <typename Enum, std::size_t N>
std::optional<Enum> Lookup(const std::array<std::string_view, N> &names,
                           std::string_view name) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == name) return static_cast<Enum>(i);
  }
  return std::nullopt;
}

}  // namespace

std::string_view RoleName(RoleLabel role) {
  return kRoleNames[static_cast<std::size_t>(role)];
}
std::optional<RoleLabel> ParseRole(std::string_view name) {
  return Lookup<RoleLabel>(kRoleNames, name);
}
std::string_view EmotionName(EmotionCategory emotion) {
  return kEmotionNames[static_cast<std::size_t>(emotion)];
}
std::optional<EmotionCategory> ParseEmotion(std::string_view name) {
  return Lookup<EmotionCategory>(kEmotionNames, name);
}
std::string_view SectionName(SceneSection section) {
  return kSectionNames[static_cast<std::size_t>(section)];
}
std::optional<SceneSection> ParseSection(std::string_view name) {
  return Lookup<SceneSection>(kSectionNames, name);
}

}  // namespace cae
