#include <random>

#include "cae/graph.h"
#include "doctest.h"
#include "test_support.h"

namespace cae {
namespace {

const std::set<EdgeType> kAllLayers = {EdgeType::kSequential, EdgeType::kDependency,
                                       EdgeType::kChunkMembership, EdgeType::kCoref};

// Role set per token by sweeping every annotation span.
std::map<NodeId, std::set<RoleLabel>> SweepCoverage(const Document &doc, const AnnotationSet &set) {
  std::map<NodeId, std::set<RoleLabel>> cover;
  for (const Sentence &s : doc.sentences) {
    for (const Token &t : s.tokens) cover[{s.index, t.index}];
  }
  for (const RoleAnnotation &a : set.annotations) {
    for (std::size_t t = a.span.start; t < a.span.end; ++t) cover[{a.span.sentence, t}].insert(a.role);
  }
  return cover;
}

TEST_CASE("layer names") {
  CHECK(ParseLayers("seq,dep") == std::set<EdgeType>{EdgeType::kSequential, EdgeType::kDependency});
  CHECK(ParseLayers("Coref, chunk") ==
        std::set<EdgeType>{EdgeType::kCoref, EdgeType::kChunkMembership});
  CHECK_THROWS_AS(ParseLayers("seq,amr"), Error);
}

TEST_CASE("graph invariants hold on every fixture") {
  for (const std::string &name : CorpusStore(testing::CorpusDir()).ListDocuments()) {
    CAPTURE(name);
    Document doc = testing::LoadFixture(name);
    AnnotationSet set = testing::AnnotateFixture(name);
    TextGraph g = BuildGraph(doc, set, kAllLayers);
    CHECK(g.nodes.size() == doc.TokenCount());
    for (const Sentence &s : doc.sentences) {
      std::size_t seq = 0, dep = 0;
      for (const GraphEdge &e : g.edges) {
        if (e.src.first != s.index) continue;
        if (e.type == EdgeType::kSequential) ++seq;
        if (e.type == EdgeType::kDependency) ++dep;
      }
      CHECK(seq == s.size() - 1);
      CHECK(dep == s.size() - 1);
    }
    for (const GraphEdge &e : g.edges) {
      CHECK(g.FindNode(e.src) != nullptr);
      CHECK(g.FindNode(e.dst) != nullptr);
    }
    auto cover = SweepCoverage(doc, set);
    for (const GraphNode &n : g.nodes) CHECK(n.roles == cover.at(n.id));
  }
}

TEST_CASE("graph invariants hold on random documents") {
  std::mt19937 rng(99);
  for (int i = 0; i < 100; ++i) {
    Document doc;
    doc.id = "r";
    for (std::size_t s = 0; s < 3; ++s) doc.sentences.push_back(testing::RandomSentence(rng, 12, s));
    AnnotationSet set = testing::RandomAnnotationSet(rng, "r", 1, doc.sentences[0].size(), 6);
    TextGraph g = BuildGraph(doc, set, kAllLayers);
    CHECK(g.nodes.size() == doc.TokenCount());
    std::size_t expected = 0;
    for (const Sentence &s : doc.sentences) expected += s.size() - 1;
    CHECK(g.CountEdges(EdgeType::kSequential) == expected);
    CHECK(g.CountEdges(EdgeType::kDependency) == expected);
    auto cover = SweepCoverage(doc, set);
    for (const GraphNode &n : g.nodes) CHECK(n.roles == cover.at(n.id));
  }
}

TEST_CASE("layers can be left out") {
  Document doc = testing::LoadFixture("fig1");
  TextGraph g = BuildGraph(doc, testing::AnnotateFixture("fig1"), {EdgeType::kSequential});
  CHECK(g.CountEdges(EdgeType::kSequential) == 5);
  CHECK(g.CountEdges(EdgeType::kDependency) == 0);
  CHECK(g.CountEdges(EdgeType::kChunkMembership) == 0);
}

TEST_CASE("chunk and coref edges") {
  Document doc = testing::LoadFixture("coref");
  TextGraph g = BuildGraph(doc, testing::AnnotateFixture("coref"), kAllLayers);
  // chunks (0,2,5) and (1,3,5) contribute 2 + 1 edges
  CHECK(g.CountEdges(EdgeType::kChunkMembership) == 3);
  REQUIRE(g.CountEdges(EdgeType::kCoref) == 2);
  std::vector<GraphEdge> coref;
  for (const GraphEdge &e : g.edges) {
    if (e.type == EdgeType::kCoref) coref.push_back(e);
  }
  CHECK(coref[0].src == NodeId{0, 0});
  CHECK(coref[0].dst == NodeId{1, 0});
  // head of "les plantes carnivores" is "plantes"
  CHECK(coref[1].src == NodeId{0, 3});
  CHECK(coref[1].dst == NodeId{1, 1});
}

TEST_CASE("annotations outside the document are rejected") {
  Document doc = testing::LoadFixture("fig1");
  AnnotationSet set;
  set.document_id = "fig1";
  RoleAnnotation a;
  a.role = RoleLabel::kCue;
  a.span = {0, 5, 9};
  a.provenance = "x";
  set.annotations.push_back(a);
  CHECK_THROWS_AS(BuildGraph(doc, set, kAllLayers), IntegrityError);
}

TEST_CASE("DOT export uses the role palette") {
  Document doc = testing::LoadFixture("fig1");
  std::string dot = ToDot(BuildGraph(doc, testing::AnnotateFixture("fig1"), kAllLayers));
  CHECK(dot.find("\"Mes-0\" [fillcolor=\"red\"]") != std::string::npos);
  CHECK(dot.find("\"Marc-5\" [fillcolor=\"brown\"]") != std::string::npos);
  CHECK(dot.find("\"attaquées-3\" [fillcolor=\"yellow\"]") != std::string::npos);
  CHECK(dot.find("\"compétences-1\" [fillcolor=\"purple\"]") != std::string::npos);
  CHECK(dot.find("\"sont-2\" [fillcolor=\"white\"]") != std::string::npos);
  CHECK(dot.find("\"Mes-0\" -> \"compétences-1\" [color=\"green\"]") != std::string::npos);
  CHECK(dot.find("\"Mes-0\" -> \"compétences-1\" [color=\"pink\"]") != std::string::npos);
  CHECK(dot.find("[color=\"gray\", label=\"obl:agent\"]") != std::string::npos);
  CHECK(dot.rfind("digraph", 0) == 0);
}

TEST_CASE("fill priority") {
  DotStyle style;
  CHECK(style.FillFor({RoleLabel::kTerritory, RoleLabel::kExperiencer}) == "red");
  CHECK(style.FillFor({RoleLabel::kCue, RoleLabel::kAttack}) == "yellow");
  CHECK(style.FillFor({RoleLabel::kCause}) == "gray");
  CHECK(style.FillFor({}) == "white");
}

TEST_CASE("DOT output is deterministic and prefixes later sentences") {
  Document doc = testing::LoadFixture("coref");
  AnnotationSet set = testing::AnnotateFixture("coref");
  std::string a = ToDot(BuildGraph(doc, set, kAllLayers));
  std::string b = ToDot(BuildGraph(doc, set, kAllLayers));
  CHECK(a == b);
  CHECK(a.find("\"s1:Il-0\"") != std::string::npos);
  CHECK(a.find("style=\"dashed\"") != std::string::npos);
}

TEST_CASE("JSON graph round-trips") {
  for (const std::string &name : CorpusStore(testing::CorpusDir()).ListDocuments()) {
    TextGraph g = BuildGraph(testing::LoadFixture(name), testing::AnnotateFixture(name), kAllLayers);
    CHECK(FromJsonGraph(ToJsonGraph(g)) == g);
  }
  CHECK_THROWS_AS(FromJsonGraph("{\"schema\": \"other\"}"), ParseError);
}

}  // namespace
}  // namespace cae
