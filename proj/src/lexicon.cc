#include "cae/lexicon.h"

#include <algorithm>
#include <array>
#include <deque>
#include <fstream>
#include <sstream>

#include "cae/text.h"

namespace cae {
namespace {

constexpr std::array<std::string_view, 10> kTagNames = {
    "anger",   "anticipation", "disgust", "fear",     "joy",
    "sadness", "surprise",     "trust",   "negative", "positive"};

struct RelationAlias {
  std::string_view name;
  Relation relation;
};

constexpr RelationAlias kRelationAliases[] = {
    {"synonym", Relation::kSynonym},   {"syn", Relation::kSynonym},
    {"hyponym", Relation::kHyponym},   {"hypo", Relation::kHyponym},
    {"hypernym", Relation::kHypernym}, {"hyper", Relation::kHypernym},
    {"antonym", Relation::kAntonym},   {"ant", Relation::kAntonym},
    {"meronym", Relation::kMeronym},   {"mero", Relation::kMeronym},
    {"holonym", Relation::kHolonym},   {"holo", Relation::kHolonym},
};

Relation Inverse(Relation r) {
  switch (r) {
    case Relation::kHyponym: return Relation::kHypernym;
    case Relation::kHypernym: return Relation::kHyponym;
    case Relation::kMeronym: return Relation::kHolonym;
    case Relation::kHolonym: return Relation::kMeronym;
    default: return r;
  }
}

std::string UposFromSensePos(std::string_view pos) {
  if (pos == "a" || pos == "s") return "ADJ";
  if (pos == "n") return "NOUN";
  if (pos == "v") return "VERB";
  if (pos == "r") return "ADV";
  return "";
}

std::string NormalizeLemma(std::string_view lemma) {
  std::string folded = CaseFold(Trim(lemma));
  std::replace(folded.begin(), folded.end(), '_', ' ');
  return folded;
}

}  // namespace

std::string_view LexiconTagName(LexiconTag tag) {
  return kTagNames[static_cast<std::size_t>(tag)];
}

std::optional<LexiconTag> ParseLexiconTag(std::string_view name) {
  for (std::size_t i = 0; i < kTagNames.size(); ++i) {
    if (kTagNames[i] == name) return static_cast<LexiconTag>(i);
  }
  return std::nullopt;
}

// --- EmotionLexicon --------------------------------------------------------

void EmotionLexicon::Add(std::string_view lemma, std::string_view upos,
                         LexiconTag tag) {
  entries_[{NormalizeLemma(lemma), std::string(upos)}].insert(tag);
}

std::set<LexiconTag> EmotionLexicon::Lookup(std::string_view lemma,
                                            std::string_view upos) const {
  std::string key = NormalizeLemma(lemma);
  std::set<LexiconTag> tags;
  if (auto it = entries_.find({key, ""}); it != entries_.end()) tags = it->second;
  if (!upos.empty()) {
    if (auto it = entries_.find({key, std::string(upos)}); it != entries_.end()) {
      tags.insert(it->second.begin(), it->second.end());
    }
  }
  return tags;
}

bool EmotionLexicon::Contains(std::string_view lemma) const {
  std::string key = NormalizeLemma(lemma);
  auto it = entries_.lower_bound({key, ""});
  return it != entries_.end() && it->first.first == key;
}

EmotionLexicon LoadEmotionLexicon(std::istream &in) {
  EmotionLexicon lexicon;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    std::vector<std::string> cols = Split(line, '\t');
    if (cols.size() != 3) {
      throw ParseError(line_no, "expected word<TAB>tag<TAB>flag, found " +
                                    std::to_string(cols.size()) + " columns");
    }
    auto tag = ParseLexiconTag(Trim(cols[1]));
    if (!tag) throw ParseError(line_no, "unknown emotion tag '" + cols[1] + "'");
    std::string_view flag = Trim(cols[2]);
    if (flag != "0" && flag != "1") {
      throw ParseError(line_no, "association flag must be 0 or 1");
    }
    if (Trim(cols[0]).empty()) throw ParseError(line_no, "empty word");
    if (flag == "1") lexicon.Add(cols[0], "", *tag);
  }
  return lexicon;
}

// --- SenseSentimentLexicon -------------------------------------------------

void SenseSentimentLexicon::Set(std::string_view lemma, std::string_view upos,
                                SentimentScore score) {
  entries_[{NormalizeLemma(lemma), std::string(upos)}] = score;
}

std::optional<SentimentScore> SenseSentimentLexicon::Lookup(
    std::string_view lemma, std::string_view upos) const {
  auto it = entries_.find({NormalizeLemma(lemma), std::string(upos)});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

SenseSentimentLexicon LoadSentimentLexicon(std::istream &in) {
  struct Sum {
    double pos = 0, neg = 0, obj = 0;
    std::size_t senses = 0;
  };
  std::map<std::pair<std::string, std::string>, Sum> sums;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty() || Trim(line)[0] == '#') continue;
    std::vector<std::string> cols = Split(line, '\t');
    if (cols.size() != 5 && cols.size() != 6) {
      throw ParseError(line_no, "expected POS<TAB>id<TAB>pos<TAB>neg<TAB>terms");
    }
    std::string upos = UposFromSensePos(Trim(cols[0]));
    if (upos.empty()) throw ParseError(line_no, "unknown POS '" + cols[0] + "'");
    auto pos = ParseDouble(Trim(cols[2]));
    auto neg = ParseDouble(Trim(cols[3]));
    if (!pos || !neg) throw ParseError(line_no, "non-numeric score");
    if (*pos < 0 || *pos > 1 || *neg < 0 || *neg > 1) {
      throw ParseError(line_no, "score outside [0, 1]");
    }
    if (*pos + *neg > 1 + 1e-9) {
      throw ParseError(line_no, "positive + negative score exceeds 1");
    }
    for (const std::string &term : Split(Trim(cols[4]), ' ')) {
      if (term.empty()) continue;
      std::string lemma = NormalizeLemma(term.substr(0, term.find('#')));
      if (lemma.empty()) continue;
      Sum &s = sums[{lemma, upos}];
      s.pos += *pos;
      s.neg += *neg;
      s.obj += 1.0 - *pos - *neg;
      ++s.senses;
    }
  }
  SenseSentimentLexicon lexicon;
  for (const auto &[key, s] : sums) {
    double n = static_cast<double>(s.senses);
    lexicon.Set(key.first, key.second,
                SentimentScore{s.pos / n, s.neg / n, s.obj / n});
  }
  return lexicon;
}

// --- SynonymGraph ----------------------------------------------------------

std::string_view RelationName(Relation relation) {
  for (const RelationAlias &a : kRelationAliases) {
    if (a.relation == relation) return a.name;
  }
  return "";
}

std::optional<Relation> ParseRelation(std::string_view name) {
  for (const RelationAlias &a : kRelationAliases) {
    if (a.name == name) return a.relation;
  }
  return std::nullopt;
}

void SynonymGraph::AddEdge(std::string_view a, Relation relation,
                           std::string_view b) {
  std::string from = NormalizeLemma(a);
  std::string to = NormalizeLemma(b);
  adjacency_[from][relation].insert(to);
  adjacency_[to][Inverse(relation)].insert(from);
}

std::vector<std::string> SynonymGraph::Neighbors(std::string_view lemma,
                                                 Relation relation) const {
  auto node = adjacency_.find(NormalizeLemma(lemma));
  if (node == adjacency_.end()) return {};
  auto edges = node->second.find(relation);
  if (edges == node->second.end()) return {};
  return {edges->second.begin(), edges->second.end()};
}

bool SynonymGraph::HasEdge(std::string_view a, Relation relation,
                           std::string_view b) const {
  auto n = Neighbors(a, relation);
  return std::find(n.begin(), n.end(), NormalizeLemma(b)) != n.end();
}

std::size_t SynonymGraph::node_count() const { return adjacency_.size(); }

SynonymGraph LoadSynonymGraph(std::istream &in) {
  SynonymGraph graph;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty() || Trim(line)[0] == '#') continue;
    std::vector<std::string> cols = Split(line, '\t');
    if (cols.size() != 3) {
      throw ParseError(line_no, "expected lemma<TAB>relation<TAB>lemma");
    }
    auto relation = ParseRelation(Trim(cols[1]));
    if (!relation) throw ParseError(line_no, "unknown relation '" + cols[1] + "'");
    if (Trim(cols[0]).empty() || Trim(cols[2]).empty()) {
      throw ParseError(line_no, "empty lemma");
    }
    graph.AddEdge(cols[0], *relation, cols[2]);
  }
  return graph;
}

// --- TermSet ---------------------------------------------------------------

bool TermSet::Contains(std::string_view lemma) const {
  return lemmas.count(NormalizeLemma(lemma)) > 0;
}

TermSet ExpandSeeds(std::string name, const std::vector<std::string> &seeds,
                    const SynonymGraph &graph, const std::set<Relation> &relations,
                    int depth) {
  TermSet set;
  set.name = std::move(name);
  set.seeds = seeds;
  set.relations = relations;
  set.relations.erase(Relation::kAntonym);
  set.depth = depth;

  std::deque<std::pair<std::string, int>> frontier;
  for (const std::string &seed : seeds) {
    std::string lemma = NormalizeLemma(seed);
    if (lemma.empty()) continue;
    if (set.lemmas.insert(lemma).second) frontier.emplace_back(lemma, 0);
  }
  while (!frontier.empty()) {
    auto [lemma, hops] = frontier.front();
    frontier.pop_front();
    if (hops >= depth) continue;
    for (Relation r : set.relations) {
      for (const std::string &next : graph.Neighbors(lemma, r)) {
        if (set.lemmas.insert(next).second) frontier.emplace_back(next, hops + 1);
      }
    }
  }
  return set;
}

void WriteTermSet(std::ostream &out, const TermSet &set) {
  std::vector<std::string> relations;
  for (Relation r : set.relations) relations.emplace_back(RelationName(r));
  out << "# termset " << set.name << "\n";
  out << "# seeds " << Join(set.seeds, ",") << "\n";
  out << "# relations " << Join(relations, ",") << "\n";
  out << "# depth " << set.depth << "\n";
  for (const std::string &lemma : set.lemmas) out << lemma << "\n";
}

TermSet ReadTermSet(std::istream &in, std::string name) {
  TermSet set;
  set.name = std::move(name);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = Trim(line);
    if (body.empty()) continue;
    if (body[0] == '#') {
      body = Trim(body.substr(1));
      std::size_t sp = body.find(' ');
      std::string_view key = body.substr(0, sp);
      std::string_view value =
          sp == std::string_view::npos ? std::string_view() : Trim(body.substr(sp));
      if (key == "seeds") {
        for (const std::string &s : Split(value, ',')) {
          if (!s.empty()) set.seeds.push_back(s);
        }
      } else if (key == "relations") {
        for (const std::string &r : Split(value, ',')) {
          if (r.empty()) continue;
          auto rel = ParseRelation(r);
          if (!rel) throw ParseError(line_no, "unknown relation '" + r + "'");
          set.relations.insert(*rel);
        }
      } else if (key == "depth") {
        auto d = ParseIndex(value);
        if (!d) throw ParseError(line_no, "bad depth");
        set.depth = static_cast<int>(*d);
      }
      continue;
    }
    set.lemmas.insert(NormalizeLemma(body));
  }
  for (const std::string &seed : set.seeds) set.lemmas.insert(NormalizeLemma(seed));
  return set;
}

// --- Cue classification ----------------------------------------------------

std::optional<CueClass> ClassifyCue(std::string_view lemma, std::string_view upos,
                                    const EmotionLexicon &emotions,
                                    const SenseSentimentLexicon &sentiment,
                                    const CueConfig &config) {
  std::set<LexiconTag> tags = emotions.Lookup(lemma, upos);
  if (config.disgust_as_anger && tags.count(LexiconTag::kDisgust)) {
    tags.insert(LexiconTag::kAnger);
  }
  static constexpr std::pair<LexiconTag, EmotionCategory> kPriority[] = {
      {LexiconTag::kFear, EmotionCategory::kFear},
      {LexiconTag::kAnger, EmotionCategory::kAnger},
      {LexiconTag::kSadness, EmotionCategory::kSadness},
      {LexiconTag::kJoy, EmotionCategory::kJoy},
  };
  for (const auto &[tag, category] : kPriority) {
    if (tags.count(tag)) return CueClass{category, 1.0};
  }
  if (auto score = sentiment.Lookup(lemma, upos)) {
    double strongest = std::max(score->positivity, score->negativity);
    if (strongest >= config.sentiment_threshold && strongest > 0) {
      if (score->positivity > score->negativity) {
        return CueClass{EmotionCategory::kUnspecifiedPositive, score->positivity};
      }
      return CueClass{EmotionCategory::kUnspecifiedNegative, score->negativity};
    }
  }
  return std::nullopt;
}

// --- Directory loader ------------------------------------------------------

Lexicons LoadLexiconDir(const std::filesystem::path &dir,
                        const ExpansionDefaults &expansion) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) {
    throw NotFoundError("lexicon directory " + dir.string() + " not found");
  }
  auto open = [](const fs::path &p) {
    std::ifstream in(p);
    if (!in) throw IoError("cannot read " + p.string());
    return in;
  };
  auto with_file = [](const fs::path &p, auto &&fn) {
    try {
      return fn();
    } catch (const ParseError &e) {
      throw ParseError(e.line(), p.filename().string() + ": " +
                                     std::string(e.what()));
    }
  };
  Lexicons lex;
  if (fs::exists(dir / "emotion.tsv")) {
    auto in = open(dir / "emotion.tsv");
    lex.emotions = with_file(dir / "emotion.tsv", [&] { return LoadEmotionLexicon(in); });
  }
  if (fs::exists(dir / "sentiment.tsv")) {
    auto in = open(dir / "sentiment.tsv");
    lex.sentiment =
        with_file(dir / "sentiment.tsv", [&] { return LoadSentimentLexicon(in); });
  }
  if (fs::exists(dir / "synonyms.tsv")) {
    auto in = open(dir / "synonyms.tsv");
    lex.graph = with_file(dir / "synonyms.tsv", [&] { return LoadSynonymGraph(in); });
  }
  fs::path sets_dir = dir / "termsets";
  if (fs::is_directory(sets_dir)) {
    std::vector<fs::path> files;
    for (const auto &entry : fs::directory_iterator(sets_dir)) {
      files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const fs::path &p : files) {
      std::string name = p.stem().string();
      if (p.extension() == ".terms") {
        auto in = open(p);
        lex.term_sets[name] = with_file(p, [&] { return ReadTermSet(in, name); });
      } else if (p.extension() == ".seeds" && !lex.term_sets.count(name)) {
        auto in = open(p);
        std::vector<std::string> seeds;
        std::string line;
        while (std::getline(in, line)) {
          std::string_view s = Trim(line);
          if (!s.empty() && s[0] != '#') seeds.emplace_back(s);
        }
        lex.term_sets[name] = ExpandSeeds(name, seeds, lex.graph,
                                          expansion.relations, expansion.depth);
      }
    }
  }
  return lex;
}

}  // namespace cae
