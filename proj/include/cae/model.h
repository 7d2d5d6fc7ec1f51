// Document, annotation and taxonomy types shared by every stage of the
// emotion role engine.

#ifndef CAE_MODEL_H_
#define CAE_MODEL_H_

#include <compare>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cae {

// Governor index of the sentence root. Distinct from every token index.
inline constexpr std::size_t kRoot = std::numeric_limits<std::size_t>::max();

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. `line` is 1-based; 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string &message)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message
                       : message),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Structurally invalid data (dangling links, spans out of range, ...).
class IntegrityError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

// A writer lock is already held by someone else.
class ConflictError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Text model
// ---------------------------------------------------------------------------

struct Token {
  std::size_t index = 0;
  std::string surface;
  std::string lemma;
  std::string upos;
  std::string xpos;
  std::map<std::string, std::string> feats;
  std::size_t head = kRoot;
  std::string deprel;
  std::string deps;
  std::map<std::string, std::string> misc;

  bool IsRoot() const { return head == kRoot; }
  bool HasFeat(std::string_view name, std::string_view value) const;

  bool operator==(const Token &) const = default;
};

// Half-open token range [start, end) inside one sentence.
struct Span {
  std::size_t sentence = 0;
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end > start ? end - start : 0; }
  bool Contains(std::size_t sent, std::size_t token) const {
    return sent == sentence && token >= start && token < end;
  }
  bool Overlaps(const Span &other) const {
    return sentence == other.sentence && start < other.end &&
           other.start < end;
  }
  std::size_t OverlapSize(const Span &other) const;

  auto operator<=>(const Span &) const = default;
};

std::string FormatSpan(const Span &span);  // "sent:start:end"

enum class SceneSection { kFacts, kEmotions, kReasons, kActions, kUnknown };

struct Sentence {
  std::size_t index = 0;
  std::vector<Token> tokens;
  std::vector<Span> chunks;
  SceneSection section = SceneSection::kUnknown;

  std::size_t size() const { return tokens.size(); }
  bool operator==(const Sentence &) const = default;
};

struct CorefChain {
  std::string id;
  std::vector<Span> mentions;

  bool operator==(const CorefChain &) const = default;
};

struct Document {
  std::string id;
  std::string language = "und";
  std::vector<Sentence> sentences;
  std::vector<CorefChain> chains;
  std::map<std::string, std::string> meta;

  std::size_t TokenCount() const;
  // True when the span lies inside an existing sentence.
  bool IsValidSpan(const Span &span) const;

  bool operator==(const Document &) const = default;
};

// ---------------------------------------------------------------------------
// Annotation model
// ---------------------------------------------------------------------------

enum class RoleLabel {
  kCue,
  kExperiencer,
  kTarget,
  kCause,
  kTerritory,
  kObject,
  kAttack,
  kAttacker,
  kModifier,
  kNegation,
};

inline constexpr RoleLabel kAllRoles[] = {
    RoleLabel::kCue,       RoleLabel::kExperiencer, RoleLabel::kTarget,
    RoleLabel::kCause,     RoleLabel::kTerritory,   RoleLabel::kObject,
    RoleLabel::kAttack,    RoleLabel::kAttacker,    RoleLabel::kModifier,
    RoleLabel::kNegation,
};

enum class EmotionCategory {
  kJoy,
  kSadness,
  kAnger,
  kFear,
  kUnspecifiedNegative,
  kUnspecifiedPositive,
};

struct RoleAnnotation {
  std::size_t id = 0;
  RoleLabel role = RoleLabel::kCue;
  Span span;
  std::optional<EmotionCategory> emotion;   // Cue only
  std::optional<std::size_t> cue_link;      // id of a Cue or Attack
  bool negated = false;                     // Cue only
  std::optional<Span> intensity_span;       // Cue only
  std::string provenance;

  bool operator==(const RoleAnnotation &) const = default;
};

struct AnnotationSet {
  std::string document_id;
  std::vector<RoleAnnotation> annotations;

  const RoleAnnotation *Find(std::size_t id) const;
  bool operator==(const AnnotationSet &) const = default;
};

// Throws IntegrityError on duplicate ids, dangling or mistyped cue links,
// and Cue-only fields set on other roles.
void CheckIntegrity(const AnnotationSet &set);

// Span and id violations of `set` against `doc`; empty when consistent.
std::vector<std::string> CheckAgainstDocument(const AnnotationSet &set,
                                              const Document &doc);

// Sorts by (sentence, start, end, role) and renumbers ids densely from 0,
// rewriting cue links. Idempotent.
AnnotationSet Canonicalize(const AnnotationSet &set);

// ---------------------------------------------------------------------------
// Names
// ---------------------------------------------------------------------------

std::string_view RoleName(RoleLabel role);
std::optional<RoleLabel> ParseRole(std::string_view name);
std::string_view EmotionName(EmotionCategory emotion);
std::optional<EmotionCategory> ParseEmotion(std::string_view name);
std::string_view SectionName(SceneSection section);
std::optional<SceneSection> ParseSection(std::string_view name);

}  // namespace cae

#endif  // CAE_MODEL_H_
