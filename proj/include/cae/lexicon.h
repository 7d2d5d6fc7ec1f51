// Emotion, sentiment and lexical-relation resources, and the seed-expanded
// term sets the rule engine consumes.

#ifndef CAE_LEXICON_H_
#define CAE_LEXICON_H_

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cae/model.h"

namespace cae {

// Word-level emotion and polarity tags of the eight-emotion lexicon format.
enum class LexiconTag {
  kAnger,
  kAnticipation,
  kDisgust,
  kFear,
  kJoy,
  kSadness,
  kSurprise,
  kTrust,
  kNegative,
  kPositive,
};

std::string_view LexiconTagName(LexiconTag tag);
std::optional<LexiconTag> ParseLexiconTag(std::string_view name);

class EmotionLexicon {
 public:
  // `upos` empty means the entry applies to every part of speech.
  void Add(std::string_view lemma, std::string_view upos, LexiconTag tag);

  // Union of the POS-independent entry and the entry for `upos`.
  std::set<LexiconTag> Lookup(std::string_view lemma, std::string_view upos) const;
  bool Contains(std::string_view lemma) const;

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  std::map<std::pair<std::string, std::string>, std::set<LexiconTag>> entries_;
};

// Reads `word<TAB>tag<TAB>0|1` lines; only flag 1 is kept. Blank lines are
// ignored. Throws ParseError on a malformed line or an unknown tag.
EmotionLexicon LoadEmotionLexicon(std::istream &in);

struct SentimentScore {
  double positivity = 0;
  double negativity = 0;
  double objectivity = 1;
};

class SenseSentimentLexicon {
 public:
  void Set(std::string_view lemma, std::string_view upos, SentimentScore score);
  std::optional<SentimentScore> Lookup(std::string_view lemma,
                                       std::string_view upos) const;
  const std::map<std::pair<std::string, std::string>, SentimentScore> &entries()
      const {
    return entries_;
  }
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::pair<std::string, std::string>, SentimentScore> entries_;
};

// Reads `POS<TAB>sense_id<TAB>pos<TAB>neg<TAB>terms[<TAB>gloss]` records.
// Terms are space-separated `lemma#sense`. Scores are averaged per
// (lemma, UPOS) over senses, objectivity taken per sense as 1 - pos - neg.
// Throws ParseError on scores outside [0, 1] or pos + neg > 1.
SenseSentimentLexicon LoadSentimentLexicon(std::istream &in);

enum class Relation { kSynonym, kHyponym, kHypernym, kAntonym, kMeronym, kHolonym };

std::string_view RelationName(Relation relation);
// Accepts full names and the short forms syn, hypo, hyper, ant, mero, holo.
std::optional<Relation> ParseRelation(std::string_view name);

// Labeled lemma graph. Synonym and antonym edges are stored in both
// directions; hyponym/hypernym and meronym/holonym as mutual inverses.
class SynonymGraph {
 public:
  // `a relation b`: for hyponym, b is a hyponym of a.
  void AddEdge(std::string_view a, Relation relation, std::string_view b);
  std::vector<std::string> Neighbors(std::string_view lemma,
                                     Relation relation) const;
  bool HasEdge(std::string_view a, Relation relation, std::string_view b) const;
  std::size_t node_count() const;

 private:
  std::map<std::string, std::map<Relation, std::set<std::string>>> adjacency_;
};

// Reads `lemma<TAB>relation<TAB>lemma` lines; '#' comments skipped.
SynonymGraph LoadSynonymGraph(std::istream &in);

struct TermSet {
  std::string name;
  std::set<std::string> lemmas;
  std::vector<std::string> seeds;
  std::set<Relation> relations;
  int depth = 0;

  bool Contains(std::string_view lemma) const;
  bool operator==(const TermSet &) const = default;
};

using TermSets = std::map<std::string, TermSet>;

// Breadth-first closure of `seeds` over `relations`, at most `depth` hops.
// Antonym edges are never followed.
TermSet ExpandSeeds(std::string name, const std::vector<std::string> &seeds,
                    const SynonymGraph &graph, const std::set<Relation> &relations,
                    int depth);

// Cache format: a '#' header recording seeds/relations/depth, then one
// lemma per line.
void WriteTermSet(std::ostream &out, const TermSet &set);
TermSet ReadTermSet(std::istream &in, std::string name);

struct CueConfig {
  double sentiment_threshold = 0.5;
  bool disgust_as_anger = false;
};

struct CueClass {
  EmotionCategory category;
  double strength;

  bool operator==(const CueClass &) const = default;
};

// Emotion lexicon first: the highest-priority primary among the lemma's
// tags (fear > anger > sadness > joy) with strength 1. Otherwise the
// sentiment lexicon when max(pos, neg) reaches the threshold.
std::optional<CueClass> ClassifyCue(std::string_view lemma, std::string_view upos,
                                    const EmotionLexicon &emotions,
                                    const SenseSentimentLexicon &sentiment,
                                    const CueConfig &config);

struct Lexicons {
  EmotionLexicon emotions;
  SenseSentimentLexicon sentiment;
  SynonymGraph graph;
  TermSets term_sets;
};

struct ExpansionDefaults {
  std::set<Relation> relations = {Relation::kSynonym, Relation::kHyponym};
  int depth = 2;
};

// Loads a lexicon directory: emotion.tsv, sentiment.tsv, synonyms.tsv (each
// optional) and termsets/<name>.terms caches or termsets/<name>.seeds seed
// lists expanded over the synonym graph.
Lexicons LoadLexiconDir(const std::filesystem::path &dir,
                        const ExpansionDefaults &expansion = {});

}  // namespace cae

#endif  // CAE_LEXICON_H_
