#include <thread>

#include "cae/graph.h"
#include "cae/service.h"
#include "doctest.h"
#include "httplib.h"
#include "test_support.h"

namespace cae {
namespace {

using nlohmann::json;

struct Fixture {
  testing::TempDir dir;
  Service service;

  Fixture()
      : service((testing::CopyCorpus(dir.path()), CorpusStore(dir.path())),
                std::make_shared<const Lexicons>(testing::DefaultLexicons()), testing::DefaultRules()) {}

  HttpResponse Call(const std::string &method, const std::string &path, const std::string &body = "",
                    std::map<std::string, std::string> query = {},
                    std::map<std::string, std::string> headers = {}) {
    return service.Handle(HttpRequest{method, path, std::move(query), std::move(headers), body});
  }

  static json Data(const HttpResponse &r) {
    json j = json::parse(r.body);
    CHECK(j["schema"] == "cae-api/1");
    return j["data"];
  }
  static json ErrorOf(const HttpResponse &r) { return json::parse(r.body)["error"]; }
};

std::string GoldBody(const AnnotationSet &set) {
  return json{{"schema", "cae-api/1"}, {"data", json::parse(AnnotationsToJson(set))}}.dump();
}

TEST_CASE("listing and reading documents") {
  Fixture f;
  HttpResponse list = f.Call("GET", "/documents");
  CHECK(list.status == 200);
  json ids = Fixture::Data(list)["documents"];
  CHECK(ids.size() == CorpusStore(testing::CorpusDir()).ListDocuments().size());

  HttpResponse doc = f.Call("GET", "/documents/fig1");
  REQUIRE(doc.status == 200);
  json d = Fixture::Data(doc);
  CHECK(d["id"] == "fig1");
  CHECK(d["sentences"][0]["tokens"][5] == "Marc");
  CHECK(ParseConllu(std::string_view(d["conllu"].get<std::string>())).sentences.size() == 1);

  CHECK(f.Call("GET", "/documents/nope").status == 404);
  CHECK(f.Call("GET", "/nowhere").status == 404);
  CHECK(f.Call("DELETE", "/documents/fig1").status == 404);
}

TEST_CASE("annotate then read predicted annotations") {
  Fixture f;
  CHECK(f.Call("GET", "/documents/fig1/annotations").status == 404);
  HttpResponse a = f.Call("POST", "/documents/fig1/annotate");
  REQUIRE(a.status == 200);
  AnnotationSet set = AnnotationsFromJson(Fixture::Data(a).dump());
  CHECK(set == testing::AnnotateFixture("fig1"));
  HttpResponse g = f.Call("GET", "/documents/fig1/annotations", "", {{"kind", "predicted"}});
  REQUIRE(g.status == 200);
  CHECK(AnnotationsFromJson(Fixture::Data(g).dump()) == set);
  CHECK(g.headers.at("ETag") == a.headers.at("ETag"));
  CHECK(f.Call("GET", "/documents/fig1/annotations", "", {{"kind", "draft"}}).status == 400);
  CHECK(f.Call("POST", "/documents/nope/annotate").status == 404);
}

TEST_CASE("read endpoints are idempotent") {
  Fixture f;
  f.Call("POST", "/documents/coref/annotate");
  for (const std::string path : {"/documents", "/documents/coref", "/documents/coref/annotations",
                                 "/documents/coref/graph", "/ruleset"}) {
    HttpResponse a = f.Call("GET", path), b = f.Call("GET", path);
    CHECK(a.status == 200);
    CHECK(a.body == b.body);
  }
}

TEST_CASE("gold writes") {
  Fixture f;
  AnnotationSet gold = testing::AnnotateFixture("fig1");
  CHECK(AnnotationEtag(CorpusStore(f.dir.path()), "fig1", AnnotationKind::kGold) == "none");
  HttpResponse put = f.Call("PUT", "/documents/fig1/gold", GoldBody(gold), {}, {{"if-match", "none"}});
  REQUIRE(put.status == 200);
  json d = Fixture::Data(put);
  CHECK(d["count"] == 4);
  std::string etag = d["etag"];
  CHECK(etag == put.headers.at("ETag"));

  HttpResponse get = f.Call("GET", "/documents/fig1/gold");
  REQUIRE(get.status == 200);
  CHECK(AnnotationsFromJson(Fixture::Data(get).dump()) == gold);
  CHECK(get.headers.at("ETag") == etag);

  SUBCASE("stale version conflicts") {
    AnnotationSet smaller = gold;
    smaller.annotations.pop_back();
    HttpResponse ok = f.Call("PUT", "/documents/fig1/gold", GoldBody(smaller), {}, {{"if-match", etag}});
    CHECK(ok.status == 200);
    HttpResponse stale = f.Call("PUT", "/documents/fig1/gold", GoldBody(gold), {}, {{"if-match", etag}});
    CHECK(stale.status == 409);
    CHECK(AnnotationsFromJson(Fixture::Data(f.Call("GET", "/documents/fig1/gold")).dump()) == smaller);
  }
  SUBCASE("held lock conflicts") {
    CorpusStore store(f.dir.path());
    DocumentLock lock = store.Lock("fig1");
    CHECK(f.Call("PUT", "/documents/fig1/gold", GoldBody(gold)).status == 409);
  }
  SUBCASE("raw bodies and missing document ids are accepted") {
    AnnotationSet unnamed = gold;
    unnamed.document_id.clear();
    HttpResponse r = f.Call("PUT", "/documents/fig1/gold", AnnotationsToJson(unnamed));
    CHECK(r.status == 200);
  }
}

TEST_CASE("invalid gold is rejected with reasons") {
  Fixture f;
  AnnotationSet bad = testing::AnnotateFixture("fig1");
  bad.annotations[1].cue_link = 99;
  HttpResponse r = f.Call("PUT", "/documents/fig1/gold", GoldBody(bad));
  CHECK(r.status == 422);
  CHECK(Fixture::ErrorOf(r)["status"] == 422);

  AnnotationSet outside = testing::AnnotateFixture("fig1");
  outside.annotations.back().span = {0, 5, 40};
  r = f.Call("PUT", "/documents/fig1/gold", GoldBody(outside));
  CHECK(r.status == 422);
  CHECK(Fixture::ErrorOf(r)["reasons"].size() >= 1);

  CHECK(f.Call("PUT", "/documents/fig1/gold", GoldBody(testing::AnnotateFixture("sad"))).status == 422);
  CHECK(f.Call("PUT", "/documents/fig1/gold", "{not json").status == 422);
  CHECK(f.Call("PUT", "/documents/nope/gold", GoldBody(outside)).status == 404);
  CHECK_FALSE(std::filesystem::exists(CorpusStore(f.dir.path()).AnnotationPath("fig1", AnnotationKind::kGold)));
}

TEST_CASE("graph endpoint") {
  Fixture f;
  HttpResponse dot = f.Call("GET", "/documents/fig1/graph", "", {{"format", "dot"}});
  REQUIRE(dot.status == 200);
  CHECK(dot.content_type == "text/vnd.graphviz");
  CHECK(dot.body.find("\"Marc-5\" [fillcolor=\"brown\"]") != std::string::npos);
  HttpResponse j = f.Call("GET", "/documents/fig1/graph", "", {{"layers", "seq,dep"}});
  REQUIRE(j.status == 200);
  TextGraph g = FromJsonGraph(Fixture::Data(j).dump());
  CHECK(g.nodes.size() == 6);
  CHECK(g.edges.size() == 10);
  CHECK(f.Call("GET", "/documents/fig1/graph", "", {{"layers", "amr"}}).status == 400);
  CHECK(f.Call("GET", "/documents/fig1/graph", "", {{"format", "png"}}).status == 400);
  HttpResponse gold = f.Call("GET", "/documents/fig1/graph", "", {{"kind", "gold"}});
  REQUIRE(gold.status == 200);
  for (const GraphNode &n : FromJsonGraph(Fixture::Data(gold).dump()).nodes) CHECK(n.roles.empty());
}

TEST_CASE("ruleset replacement") {
  Fixture f;
  json before = Fixture::Data(f.Call("GET", "/ruleset"));
  CHECK(before["rules"].size() == 5);

  std::string bad = R"({"schema": "cae-rules/1", "rules": [
    {"id": "broken", "vars": {"A": [{"lemma_in": "missing"}]}, "produce": [{"role": "Cue", "var": "A"}]}]})";
  HttpResponse r = f.Call("PUT", "/ruleset", bad);
  CHECK(r.status == 422);
  CHECK(Fixture::ErrorOf(r)["reasons"][0]["rule"] == "broken");
  CHECK(f.service.ruleset()->rules.size() == 5);
  CHECK(f.Call("PUT", "/ruleset", "[1, 2").status == 422);

  std::string one = testing::ReadText(testing::DataDir() / "rules" / "passive_attack.json");
  std::string good = R"({"schema": "cae-rules/1", "rules": [)" + one + "]}";
  HttpResponse ok = f.Call("PUT", "/ruleset", good);
  CHECK(ok.status == 200);
  CHECK(f.service.ruleset()->rules.size() == 1);
  HttpResponse a = f.Call("POST", "/documents/active/annotate");
  AnnotationSet set = AnnotationsFromJson(Fixture::Data(a).dump());
  CHECK(testing::SpansOf(set, RoleLabel::kAttack) == std::vector<Span>{{0, 1, 2}});
  CHECK(testing::SpansOf(set, RoleLabel::kAttacker).empty());
}

TEST_CASE("rule preview never changes the active ruleset") {
  Fixture f;
  std::string rule = testing::ReadText(testing::DataDir() / "rules" / "passive_attack.json");
  HttpResponse r = f.Call("POST", "/ruleset/preview", R"({"rule": )" + rule + R"(, "documents": ["fig1"]})");
  REQUIRE(r.status == 200);
  json d = Fixture::Data(r);
  CHECK(d["total"] == 1);
  CHECK(d["documents"][0]["count"] == 1);
  CHECK(d["documents"][0]["matches"][0]["bindings"]["G"]["surface"] == "Marc");

  HttpResponse all = f.Call("POST", "/ruleset/preview", R"({"rule": )" + rule + "}");
  CHECK(Fixture::Data(all)["total"] == 1);
  CHECK(Fixture::Data(all)["documents"].size() == CorpusStore(testing::CorpusDir()).ListDocuments().size());

  CHECK(f.Call("POST", "/ruleset/preview", R"({"rule": {"id": "x"}})").status == 422);
  CHECK(f.Call("POST", "/ruleset/preview", R"({"nothing": 1})").status == 422);
  CHECK(f.service.ruleset()->rules.size() == 5);
}

TEST_CASE("listen addresses") {
  CHECK(ParseListenAddress("127.0.0.1:8080") == std::pair<std::string, int>{"127.0.0.1", 8080});
  CHECK_THROWS_AS(ParseListenAddress("localhost"), Error);
  CHECK_THROWS_AS(ParseListenAddress("localhost:http"), Error);
  CHECK_THROWS_AS(ParseListenAddress("localhost:70000"), Error);
}

TEST_CASE("real HTTP round-trip") {
  Fixture f;
  int port = f.service.BindToAnyPort("127.0.0.1");
  REQUIRE(port > 0);
  std::thread server([&] { f.service.ListenAfterBind(); });
  httplib::Client client("127.0.0.1", port);
  auto list = client.Get("/documents");
  REQUIRE(list);
  CHECK(list->status == 200);
  CHECK(json::parse(list->body)["data"]["documents"].size() > 0);

  AnnotationSet gold = testing::AnnotateFixture("gustave");
  auto put = client.Put("/documents/gustave/gold", GoldBody(gold), "application/json");
  REQUIRE(put);
  CHECK(put->status == 200);
  std::string etag = put->get_header_value("ETag");
  httplib::Headers stale = {{"If-Match", "0000"}};
  auto conflict = client.Put("/documents/gustave/gold", stale, GoldBody(gold), "application/json");
  REQUIRE(conflict);
  CHECK(conflict->status == 409);
  auto get = client.Get("/documents/gustave/annotations?kind=gold");
  REQUIRE(get);
  CHECK(get->get_header_value("ETag") == etag);
  auto missing = client.Get("/documents/unknown");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  f.service.Stop();
  server.join();
  CHECK_FALSE(f.service.IsRunning());
}

}  // namespace
}  // namespace cae
