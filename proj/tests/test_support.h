// Fixture loading, scratch directories and random generators shared by the
// unit and acceptance tests.

#ifndef CAE_TESTS_TEST_SUPPORT_H_
#define CAE_TESTS_TEST_SUPPORT_H_

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "cae/ingestion.h"
#include "cae/lexicon.h"
#include "cae/model.h"
#include "cae/pipeline.h"
#include "cae/rules.h"
#include "cae/store.h"
#include "json.hpp"

#ifndef CAE_DATA_DIR
#define CAE_DATA_DIR "data"
#endif

namespace cae::testing {

inline std::filesystem::path DataDir() { return CAE_DATA_DIR; }
inline std::filesystem::path CorpusDir() { return DataDir() / "corpus"; }

inline std::string ReadText(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void WriteText(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline Document LoadFixture(const std::string &name) {
  return CorpusStore(CorpusDir()).LoadDocument(name);
}

inline const Lexicons &DefaultLexicons() {
  static const Lexicons lexicons = LoadLexiconDir(DataDir() / "lexicons");
  return lexicons;
}

inline const RuleSet &DefaultRules() {
  static const RuleSet rules =
      CompileRuleset(ReadText(DataDir() / "rules" / "default.json"), DefaultLexicons().term_sets);
  return rules;
}

inline AnnotationSet AnnotateFixture(const std::string &name) {
  return AnnotateDocument(LoadFixture(name), DefaultRules(), DefaultLexicons(),
                          PipelineConfig::Default());
}

// Annotations with `role` as (sentence, start, end) triples.
inline std::vector<Span> SpansOf(const AnnotationSet &set, RoleLabel role) {
  std::vector<Span> out;
  for (const RoleAnnotation &a : set.annotations) {
    if (a.role == role) out.push_back(a.span);
  }
  return out;
}

class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() /
            ("cae-test-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const std::filesystem::path &path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Copies the fixture corpus into a scratch store.
inline void CopyCorpus(const std::filesystem::path &to) {
  std::filesystem::copy(CorpusDir(), to, std::filesystem::copy_options::recursive |
                                             std::filesystem::copy_options::overwrite_existing);
}

// ---------------------------------------------------------------------------
// Random sentences
// ---------------------------------------------------------------------------

inline const std::vector<std::string> kRandomUpos = {"NOUN", "VERB", "ADJ", "DET", "PRON", "ADP"};
inline const std::vector<std::string> kRandomLemmas = {"a", "b", "c", "d", "e"};
inline const std::vector<std::string> kRandomDeprels = {"nsubj", "obj", "det", "obl", "amod",
                                                        "advcl"};
inline const std::vector<std::pair<std::string, std::string>> kRandomFeats = {
    {"Voice", "Pass"}, {"Number", "Plur"}, {"Person", "1"}};

template <typename T>
const T &Pick(std::mt19937 &rng, const std::vector<T> &items) {
  return items[std::uniform_int_distribution<std::size_t>(0, items.size() - 1)(rng)];
}

inline Sentence RandomSentence(std::mt19937 &rng, std::size_t max_tokens, std::size_t index = 0) {
  std::size_t n = std::uniform_int_distribution<std::size_t>(1, max_tokens)(rng);
  Sentence s;
  s.index = index;
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  s.tokens.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Token &t = s.tokens[i];
    t.index = i;
    t.lemma = Pick(rng, kRandomLemmas);
    t.surface = t.lemma + std::to_string(i);
    t.upos = Pick(rng, kRandomUpos);
    for (const auto &[k, v] : kRandomFeats) {
      if (rng() % 3 == 0) t.feats[k] = v;
    }
  }
  // Attach each token below one already in the tree.
  s.tokens[order[0]].head = kRoot;
  s.tokens[order[0]].deprel = "root";
  for (std::size_t k = 1; k < n; ++k) {
    std::size_t parent = order[std::uniform_int_distribution<std::size_t>(0, k - 1)(rng)];
    s.tokens[order[k]].head = parent;
    s.tokens[order[k]].deprel = Pick(rng, kRandomDeprels);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Random rules with an independent brute-force matcher
// ---------------------------------------------------------------------------

struct OracleVar {
  std::string name;
  std::set<std::string> upos;    // empty: unconstrained
  std::set<std::string> lemmas;  // empty: unconstrained
  std::optional<std::pair<std::string, std::string>> feat;
  std::set<std::string> deprels;  // empty: unconstrained
};

struct OracleArc {
  std::size_t gov, dep;
  std::set<std::string> deprels;
};

struct OracleRule {
  std::string id;
  std::vector<OracleVar> vars;  // sorted by name
  std::vector<OracleArc> arcs;

  std::string ToJson() const {
    nlohmann::json j;
    j["id"] = id;
    j["vars"] = nlohmann::json::object();
    for (const OracleVar &v : vars) {
      nlohmann::json preds = nlohmann::json::array();
      if (!v.upos.empty()) preds.push_back({{"upos_in", v.upos}});
      if (!v.lemmas.empty()) preds.push_back({{"lemma_in", v.lemmas}});
      if (v.feat) preds.push_back({{"feats_has", v.feat->first + "=" + v.feat->second}});
      if (!v.deprels.empty()) preds.push_back({{"deprel_in", v.deprels}});
      j["vars"][v.name] = preds;
    }
    j["arcs"] = nlohmann::json::array();
    for (const OracleArc &a : arcs) {
      j["arcs"].push_back({vars[a.gov].name, vars[a.dep].name, a.deprels});
    }
    j["produce"] = {{{"role", "Cue"}, {"var", vars[0].name}}};
    return j.dump();
  }
};

template <typename T>
std::set<T> RandomSubset(std::mt19937 &rng, const std::vector<T> &items, std::size_t max) {
  std::set<T> out;
  std::size_t k = std::uniform_int_distribution<std::size_t>(1, max)(rng);
  while (out.size() < k) out.insert(Pick(rng, items));
  return out;
}

inline OracleRule RandomOracleRule(std::mt19937 &rng, std::size_t index) {
  OracleRule r;
  r.id = "r" + std::to_string(index);
  std::size_t k = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
  for (std::size_t i = 0; i < k; ++i) {
    OracleVar v;
    v.name = std::string(1, static_cast<char>('a' + i));
    if (rng() % 2) v.upos = RandomSubset(rng, kRandomUpos, 3);
    if (rng() % 3 == 0) v.lemmas = RandomSubset(rng, kRandomLemmas, 2);
    if (rng() % 4 == 0) v.feat = Pick(rng, kRandomFeats);
    if (rng() % 4 == 0) v.deprels = RandomSubset(rng, kRandomDeprels, 3);
    r.vars.push_back(std::move(v));
  }
  // A spanning tree over the variables keeps the pattern connected.
  for (std::size_t i = 1; i < k; ++i) {
    std::size_t other = std::uniform_int_distribution<std::size_t>(0, i - 1)(rng);
    OracleArc arc{other, i, RandomSubset(rng, kRandomDeprels, 3)};
    if (rng() % 2) std::swap(arc.gov, arc.dep);
    r.arcs.push_back(std::move(arc));
  }
  if (k == 3 && rng() % 3 == 0) {
    r.arcs.push_back(OracleArc{0, 2, RandomSubset(rng, kRandomDeprels, 4)});
  }
  return r;
}

inline bool OracleAccepts(const OracleVar &v, const Token &t) {
  if (!v.upos.empty() && !v.upos.count(t.upos)) return false;
  if (!v.lemmas.empty() && !v.lemmas.count(t.lemma)) return false;
  if (v.feat) {
    auto it = t.feats.find(v.feat->first);
    if (it == t.feats.end() || it->second != v.feat->second) return false;
  }
  if (!v.deprels.empty() && !v.deprels.count(t.deprel)) return false;
  return true;
}

// Every injective tuple, checked exhaustively, in lexicographic order.
inline std::vector<std::vector<std::size_t>> BruteForceMatches(const OracleRule &rule,
                                                               const Sentence &s) {
  std::vector<std::vector<std::size_t>> out;
  const std::size_t k = rule.vars.size(), n = s.size();
  std::vector<std::size_t> tuple(k, 0);
  while (true) {
    std::set<std::size_t> distinct(tuple.begin(), tuple.end());
    bool ok = distinct.size() == k;
    for (std::size_t i = 0; ok && i < k; ++i) ok = OracleAccepts(rule.vars[i], s.tokens[tuple[i]]);
    for (const OracleArc &a : rule.arcs) {
      if (!ok) break;
      const Token &dep = s.tokens[tuple[a.dep]];
      ok = dep.head == tuple[a.gov] && a.deprels.count(dep.deprel) > 0;
    }
    if (ok) out.push_back(tuple);
    std::size_t i = k;
    while (i > 0 && ++tuple[i - 1] == n) tuple[--i] = 0;
    if (i == 0) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random annotation sets
// ---------------------------------------------------------------------------

inline const std::vector<RoleLabel> kRandomRoles = {RoleLabel::kCue, RoleLabel::kTarget,
                                                    RoleLabel::kExperiencer, RoleLabel::kCause};

// Unlinked annotations over `sentences` sentences of `tokens` tokens each.
inline AnnotationSet RandomAnnotationSet(std::mt19937 &rng, const std::string &doc_id,
                                         std::size_t sentences, std::size_t tokens,
                                         std::size_t max_count) {
  AnnotationSet set;
  set.document_id = doc_id;
  std::size_t count = std::uniform_int_distribution<std::size_t>(0, max_count)(rng);
  for (std::size_t i = 0; i < count; ++i) {
    RoleAnnotation a;
    a.id = i;
    a.role = Pick(rng, kRandomRoles);
    std::size_t start = std::uniform_int_distribution<std::size_t>(0, tokens - 1)(rng);
    std::size_t end = std::uniform_int_distribution<std::size_t>(start + 1, tokens)(rng);
    a.span = Span{std::uniform_int_distribution<std::size_t>(0, sentences - 1)(rng), start, end};
    if (a.role == RoleLabel::kCue) {
      a.emotion = static_cast<EmotionCategory>(rng() % 6);
      a.negated = rng() % 2;
    }
    a.provenance = "random";
    set.annotations.push_back(std::move(a));
  }
  return Canonicalize(set);
}

// ---------------------------------------------------------------------------
// Random synonym graphs
// ---------------------------------------------------------------------------

// Reachability by repeated relaxation over explicit edge lists: lemma ->
// fewest hops, for hops <= depth.
inline std::set<std::string> RelaxationClosure(
    const std::vector<std::tuple<std::string, Relation, std::string>> &edges,
    const std::vector<std::string> &seeds, const std::set<Relation> &relations, int depth) {
  std::set<std::string> reached(seeds.begin(), seeds.end());
  for (int step = 0; step < depth; ++step) {
    std::set<std::string> next = reached;
    for (const auto &[a, rel, b] : edges) {
      // Stored direction and its inverse.
      Relation inverse = rel;
      if (rel == Relation::kHyponym) inverse = Relation::kHypernym;
      if (rel == Relation::kHypernym) inverse = Relation::kHyponym;
      if (rel == Relation::kMeronym) inverse = Relation::kHolonym;
      if (rel == Relation::kHolonym) inverse = Relation::kMeronym;
      if (rel == Relation::kAntonym) continue;
      if (relations.count(rel) && reached.count(a)) next.insert(b);
      if (relations.count(inverse) && reached.count(b)) next.insert(a);
    }
    reached = std::move(next);
  }
  return reached;
}

using Edges = std::vector<std::tuple<std::string, Relation, std::string>>;

inline Edges RandomEdges(std::mt19937 &rng, int nodes, int count) {
  const std::vector<Relation> rels = {Relation::kSynonym, Relation::kHyponym,
                                      Relation::kHypernym, Relation::kAntonym};
  Edges edges;
  for (int i = 0; i < count; ++i) {
    int a = static_cast<int>(rng() % nodes), b = static_cast<int>(rng() % nodes);
    if (a == b) continue;
    edges.emplace_back("w" + std::to_string(a), Pick(rng, rels), "w" + std::to_string(b));
  }
  return edges;
}

inline SynonymGraph GraphOf(const Edges &edges) {
  SynonymGraph g;
  for (const auto &[a, r, b] : edges) g.AddEdge(a, r, b);
  return g;
}

}  // namespace cae::testing

#endif  // CAE_TESTS_TEST_SUPPORT_H_
