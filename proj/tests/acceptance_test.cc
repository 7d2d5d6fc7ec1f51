// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>

#include "cae/cli.h"
#include "cae/eval.h"
#include "cae/graph.h"
#include "test_support.h"

namespace cae {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Collects failed expectations for one criterion.
class Checker {
 public:
  void Expect(bool ok, const std::string &what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++count_;
  }
  bool ok() const { return count_ == 0; }
  std::string Summary() const {
    std::string s = std::to_string(count_) + " failed";
    for (const std::string &f : failures_) s += "; " + f;
    return s;
  }

 private:
  std::vector<std::string> failures_;
  std::size_t count_ = 0;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

bool Contains(const std::string &text, const std::string &needle) {
  return text.find(needle) != std::string::npos;
}

const std::set<EdgeType> kAllLayers = {EdgeType::kSequential, EdgeType::kDependency,
                                       EdgeType::kChunkMembership, EdgeType::kCoref};

std::vector<std::string> Fixtures() { return CorpusStore(testing::CorpusDir()).ListDocuments(); }

const RoleAnnotation *Find(const AnnotationSet &set, RoleLabel role, Span span) {
  for (const RoleAnnotation &a : set.annotations) {
    if (a.role == role && a.span == span) return &a;
  }
  return nullptr;
}

void Criterion1(Checker &c, std::string &detail) {
  auto start = Clock::now();
  std::string conllu = (testing::CorpusDir() / "fig1" / "source.conllu").string();
  std::string sidecar = (testing::CorpusDir() / "fig1" / "sidecar.json").string();
  std::ostringstream out, err, dot, dot_err;
  int code = RunCli({"annotate", "--in", conllu, "--sidecar", sidecar}, out, err);
  c.Expect(code == kExitOk, "annotate exit " + std::to_string(code) + " " + err.str());
  AnnotationSet set = ReadAnnotations(out.str());
  std::vector<std::tuple<RoleLabel, Span>> expected = {{RoleLabel::kExperiencer, {0, 0, 1}},
                                                       {RoleLabel::kTerritory, {0, 0, 2}},
                                                       {RoleLabel::kAttack, {0, 3, 4}},
                                                       {RoleLabel::kAttacker, {0, 5, 6}}};
  c.Expect(set.annotations.size() == 4, "annotation count " + std::to_string(set.annotations.size()));
  for (const auto &[role, span] : expected) {
    c.Expect(Find(set, role, span) != nullptr, std::string(RoleName(role)) + " " + FormatSpan(span));
  }
  code = RunCli({"graph", "--in", conllu, "--sidecar", sidecar, "--format", "dot"}, dot, dot_err);
  c.Expect(code == kExitOk, "graph exit " + std::to_string(code));
  const std::string g = dot.str();
  c.Expect(Contains(g, "\"Mes-0\" [fillcolor=\"red\"]"), "Mes-0 red");
  c.Expect(Contains(g, "\"Marc-5\" [fillcolor=\"brown\"]"), "Marc-5 brown");
  c.Expect(Contains(g, "\"attaquées-3\" [fillcolor=\"yellow\"]"), "attaquées-3 yellow");
  c.Expect(Contains(g, "\"Mes-0\" -> \"compétences-1\" [color=\"green\"]"), "chunk edge green");
  c.Expect(Contains(g, "[color=\"pink\"]"), "sequential edges pink");
  double secs = Seconds(start);
  c.Expect(secs < 1.0, "runtime " + std::to_string(secs) + " s");
  detail = "runtime " + std::to_string(secs) + " s";
}

void Criterion2(Checker &c, std::string &) {
  AnnotationSet set = testing::AnnotateFixture("gustave");
  const RoleAnnotation *cue = Find(set, RoleLabel::kCue, {0, 1, 2});
  c.Expect(cue && cue->emotion == EmotionCategory::kJoy, "Cue(loves, Joy)");
  c.Expect(Find(set, RoleLabel::kExperiencer, {0, 0, 1}), "Experiencer(Gustave)");
  c.Expect(Find(set, RoleLabel::kTarget, {0, 2, 4}), "Target(carnivorous plants)");
  c.Expect(Find(set, RoleLabel::kCause, {0, 4, 8}), "Cause(because they are beautiful)");
  c.Expect(set.annotations.size() == 4, "exactly four annotations");
}

std::vector<Span> CueSpans(const Workspace &ws) {
  std::vector<Span> out;
  for (const RoleAnnotation &a : ws.annotations()) {
    if (a.role == RoleLabel::kCue) out.push_back(a.span);
  }
  return out;
}

void Criterion3(Checker &c, std::string &) {
  AnnotationSet sad = testing::AnnotateFixture("sad");
  const RoleAnnotation *cue = Find(sad, RoleLabel::kCue, {0, 4, 5});
  const RoleAnnotation *mod = Find(sad, RoleLabel::kModifier, {0, 2, 4});
  c.Expect(cue && cue->emotion == EmotionCategory::kSadness && !cue->negated, "Cue(sad, Sadness)");
  c.Expect(cue && mod && mod->cue_link == cue->id, "Modifier(a little) linked");

  AnnotationSet angry = testing::AnnotateFixture("angry");
  cue = Find(angry, RoleLabel::kCue, {0, 3, 4});
  const RoleAnnotation *neg = Find(angry, RoleLabel::kNegation, {0, 2, 3});
  c.Expect(cue && cue->emotion == EmotionCategory::kAnger && cue->negated, "Cue(angry, Anger, negated)");
  c.Expect(cue && neg && neg->cue_link == cue->id, "Negation(not) linked");

  for (const char *name : {"sad", "angry"}) {
    Document doc = testing::LoadFixture(name);
    PipelineConfig cfg = PipelineConfig::Default();
    Workspace ws;
    DetectCues(doc.sentences[0], testing::DefaultLexicons(), cfg, ws);
    std::vector<Span> before = CueSpans(ws);
    AttachNegationAndModifiers(doc.sentences[0], cfg.ProfileFor(doc.language), cfg, ws);
    c.Expect(CueSpans(ws) == before, std::string(name) + ": cue spans changed by markers");
  }
}

void Criterion4(Checker &c, std::string &detail) {
  auto start = Clock::now();
  std::mt19937 rng(4242);
  std::vector<Sentence> sentences;
  for (int i = 0; i < 200; ++i) sentences.push_back(testing::RandomSentence(rng, 12));
  std::size_t discrepancies = 0, matches = 0;
  for (int r = 0; r < 50; ++r) {
    testing::OracleRule oracle = testing::RandomOracleRule(rng, r);
    Rule rule = CompileRule(oracle.ToJson(), testing::DefaultLexicons().term_sets);
    for (const Sentence &s : sentences) {
      std::vector<std::vector<std::size_t>> expected = testing::BruteForceMatches(oracle, s);
      std::vector<std::vector<std::size_t>> got;
      for (const MatchResult &m : FindMatches(rule, s, {})) got.push_back(m.bindings);
      matches += expected.size();
      if (got != expected) ++discrepancies;
    }
  }
  double secs = Seconds(start);
  c.Expect(discrepancies == 0, std::to_string(discrepancies) + " discrepancies");
  c.Expect(matches > 0, "oracle found no matches at all");
  c.Expect(secs < 30.0, "runtime " + std::to_string(secs) + " s");
  detail = "200 sentences x 50 rules, " + std::to_string(matches) + " matches, " +
           std::to_string(secs) + " s";
}

void Criterion5(Checker &c, std::string &) {
  for (const std::string &name : Fixtures()) {
    Document doc = testing::LoadFixture(name);
    AnnotationSet set = testing::AnnotateFixture(name);
    TextGraph g = BuildGraph(doc, set, kAllLayers);
    c.Expect(g.nodes.size() == doc.TokenCount(), name + ": node count");
    for (const Sentence &s : doc.sentences) {
      std::size_t seq = 0, dep = 0;
      for (const GraphEdge &e : g.edges) {
        if (e.src.first != s.index) continue;
        seq += e.type == EdgeType::kSequential;
        dep += e.type == EdgeType::kDependency;
      }
      c.Expect(seq == s.size() - 1, name + ": sequential edges");
      c.Expect(dep == s.size() - 1, name + ": dependency edges");
    }
    std::map<NodeId, std::set<RoleLabel>> sweep;
    for (const Sentence &s : doc.sentences) {
      for (const Token &t : s.tokens) sweep[{s.index, t.index}];
    }
    for (const RoleAnnotation &a : set.annotations) {
      for (std::size_t t = a.span.start; t < a.span.end; ++t) sweep[{a.span.sentence, t}].insert(a.role);
    }
    for (const GraphNode &n : g.nodes) c.Expect(n.roles == sweep[n.id], name + ": node roles");
    std::string first = ToDot(g);
    std::string second = ToDot(BuildGraph(testing::LoadFixture(name), testing::AnnotateFixture(name), kAllLayers));
    c.Expect(first == second, name + ": DOT not byte-stable");
  }
}

void Criterion6(Checker &c, std::string &) {
  for (const std::string &name : Fixtures()) {
    AnnotationSet x = testing::AnnotateFixture(name);
    ScoreReport r = Score(x, x, MatchPolicy::Exact());
    for (const auto &[role, s] : r.roles) {
      c.Expect(s.F1() == 1.0, name + ": F1(x,x) for " + std::string(RoleName(role)));
    }
  }
  std::mt19937 rng(606);
  const std::vector<MatchPolicy> policies = {MatchPolicy::Exact(), MatchPolicy::Jaccard(0.5),
                                             MatchPolicy::Overlap()};
  for (int i = 0; i < 150; ++i) {
    AnnotationSet a = testing::RandomAnnotationSet(rng, "d", 2, 10, 10);
    AnnotationSet b = testing::RandomAnnotationSet(rng, "d", 2, 10, 10);
    for (const MatchPolicy &p : policies) {
      ScoreReport ab = Score(a, b, p), ba = Score(b, a, p);
      for (const auto &[role, s] : ab.roles) {
        c.Expect(std::abs(s.Precision() - ba.roles.at(role).Recall()) < 1e-12, "symmetry");
      }
    }
    double exact = Score(a, b, policies[0]).Micro().F1();
    double jaccard = Score(a, b, policies[1]).Micro().F1();
    double overlap = Score(a, b, policies[2]).Micro().F1();
    c.Expect(exact <= jaccard + 1e-12 && jaccard <= overlap + 1e-12,
             "monotonicity pair " + std::to_string(i));
  }
}

void Criterion7(Checker &c, std::string &) {
  testing::TempDir dir;
  testing::CopyCorpus(dir.path());
  CorpusStore store(dir.path());
  for (const std::string &name : Fixtures()) {
    std::string text = testing::ReadText(testing::CorpusDir() / name / "source.conllu");
    Document once = ParseConllu(std::string_view(text));
    std::string serialized = SerializeConllu(once);
    Document twice = ParseConllu(std::string_view(serialized));
    c.Expect(twice == once && SerializeConllu(twice) == serialized, name + ": CoNLL-U fixed point");
    SidecarData sidecar = ParseSidecar(testing::ReadText(testing::CorpusDir() / name / "sidecar.json"));
    c.Expect(ParseSidecar(SerializeSidecar(sidecar)) == sidecar, name + ": sidecar fixed point");

    Document doc = testing::LoadFixture(name);
    AnnotationSet set = testing::AnnotateFixture(name);
    store.SaveAnnotations(name, set, AnnotationKind::kGold);
    c.Expect(store.LoadAnnotations(name, AnnotationKind::kGold) == set, name + ": store identity");
    AnnotationSet propagated = PropagateCoref(doc, set);
    c.Expect(PropagateCoref(doc, propagated) == propagated, name + ": coref idempotent");
    c.Expect(Canonicalize(Canonicalize(set)) == Canonicalize(set), name + ": canonicalize idempotent");
  }
  std::mt19937 rng(7);
  for (int i = 0; i < 200; ++i) {
    AnnotationSet set = testing::RandomAnnotationSet(rng, "r", 3, 9, 12);
    c.Expect(ReadAnnotations(WriteAnnotations(set)) == set, "random standoff round-trip");
    c.Expect(Canonicalize(Canonicalize(set)) == Canonicalize(set), "random canonicalize");
  }
}

void Criterion8(Checker &c, std::string &) {
  std::mt19937 rng(808);
  const std::set<Relation> rels = {Relation::kSynonym, Relation::kHyponym};
  for (int trial = 0; trial < 40; ++trial) {
    testing::Edges edges = testing::RandomEdges(rng, 50, 90);
    SynonymGraph g = testing::GraphOf(edges);
    std::vector<std::string> seeds = {"w" + std::to_string(rng() % 50)};
    std::vector<std::string> more = seeds;
    more.push_back("w" + std::to_string(rng() % 50));
    TermSet zero = ExpandSeeds("t", seeds, g, rels, 0);
    c.Expect(zero.lemmas == std::set<std::string>(seeds.begin(), seeds.end()), "depth 0 is the seeds");
    std::set<std::string> previous;
    for (int d = 0; d <= 6; ++d) {
      std::set<std::string> now = ExpandSeeds("t", seeds, g, rels, d).lemmas;
      c.Expect(std::includes(now.begin(), now.end(), previous.begin(), previous.end()), "monotone in depth");
      std::set<std::string> wider = ExpandSeeds("t", more, g, rels, d).lemmas;
      c.Expect(std::includes(wider.begin(), wider.end(), now.begin(), now.end()), "monotone in seeds");
      c.Expect(now == testing::RelaxationClosure(edges, seeds, rels, d), "relaxation oracle");
      previous = std::move(now);
    }
    // 50 nodes: any depth >= 50 has saturated
    std::set<std::string> saturated = ExpandSeeds("t", seeds, g, rels, 50).lemmas;
    std::vector<std::string> as_seeds(saturated.begin(), saturated.end());
    c.Expect(ExpandSeeds("t", as_seeds, g, rels, 3).lemmas == saturated, "saturation fixed point");
    c.Expect(ExpandSeeds("t", seeds, g, rels, 64).lemmas == saturated, "saturation stable");
  }

  std::ostringstream text;
  std::uniform_real_distribution<double> unit(0, 1);
  for (int i = 0; i < 400; ++i) {
    double pos = std::round(unit(rng) * 8) / 8;
    double neg = std::round(unit(rng) * 8 * (1 - pos)) / 8;
    text << "a\t" << i << "\t" << pos << "\t" << neg << "\tw" << (rng() % 60) << "#" << i << "\n";
  }
  std::istringstream in(text.str());
  SenseSentimentLexicon lex = LoadSentimentLexicon(in);
  for (const auto &[key, s] : lex.entries()) {
    c.Expect(std::abs(s.positivity + s.negativity + s.objectivity - 1.0) <= 1e-6, "sentiment sums to 1");
  }
  for (const auto &[key, s] : testing::DefaultLexicons().sentiment.entries()) {
    c.Expect(std::abs(s.positivity + s.negativity + s.objectivity - 1.0) <= 1e-6, "shipped sentiment sums to 1");
  }
}

}  // namespace
}  // namespace cae

int main() {
  using Fn = std::function<void(cae::Checker &, std::string &)>;
  const std::vector<std::pair<std::string, Fn>> criteria = {
      {"worked example: passive attack annotation and DOT colors", cae::Criterion1},
      {"worked example: English cue with experiencer, target and cause", cae::Criterion2},
      {"worked example: modifier and negation markers", cae::Criterion3},
      {"matcher equals brute-force enumeration", cae::Criterion4},
      {"graph invariants and DOT stability", cae::Criterion5},
      {"evaluation identities, symmetry and monotonicity", cae::Criterion6},
      {"round-trips and idempotence", cae::Criterion7},
      {"lexicon expansion and sentiment properties", cae::Criterion8},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    cae::Checker checker;
    std::string detail;
    try {
      criteria[i].second(checker, detail);
    } catch (const std::exception &e) {
      checker.Expect(false, std::string("exception: ") + e.what());
    }
    std::cout << (checker.ok() ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first;
    if (!checker.ok()) {
      std::cout << " (" << checker.Summary() << ")";
      ++failed;
    } else if (!detail.empty()) {
      std::cout << " (" << detail << ")";
    }
    std::cout << "\n";
  }
  return failed == 0 ? 0 : 1;
}
