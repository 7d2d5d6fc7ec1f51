#include "cae/service.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cae/graph.h"
#include "cae/text.h"
#include "httplib.h"
#include "json.hpp"

namespace cae {
namespace {

using nlohmann::json;

HttpResponse Ok(json data, int status = 200) {
  HttpResponse r;
  r.status = status;
  r.body = json{{"schema", kApiSchema}, {"data", std::move(data)}}.dump(2) + "\n";
  return r;
}

HttpResponse Fail(int status, const std::string &message, json reasons = json::array()) {
  HttpResponse r;
  r.status = status;
  r.body = json{{"schema", kApiSchema},
                {"error", {{"status", status}, {"message", message}, {"reasons", reasons}}}}
               .dump(2) +
           "\n";
  return r;
}

// Accepts either an envelope {"schema": "cae-api/1", "data": X} or X.
json Unwrap(const std::string &body) {
  json j = json::parse(body);
  if (j.is_object() && j.value("schema", std::string()) == kApiSchema && j.contains("data")) {
    return j.at("data");
  }
  return j;
}

std::string QueryOr(const HttpRequest &req, const std::string &key, const std::string &def) {
  auto it = req.query.find(key);
  return it == req.query.end() || it->second.empty() ? def : it->second;
}

std::string Fnv1a(std::string_view data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json RulesetSummary(const RuleSet &rules) {
  json ids = json::array();
  for (const Rule &r : rules.rules) {
    ids.push_back(json{{"id", r.id}, {"priority", r.priority}, {"enabled", r.enabled}});
  }
  json source;
  try {
    source = json::parse(rules.source);
  } catch (const json::exception &) {
    source = rules.source;
  }
  return json{{"rules", ids}, {"source", source}};
}

}  // namespace

std::pair<std::string, int> ParseListenAddress(std::string_view address) {
  std::size_t colon = address.rfind(':');
  if (colon == std::string_view::npos) {
    throw Error("listen address must be host:port, got '" + std::string(address) + "'");
  }
  auto port = ParseIndex(address.substr(colon + 1));
  if (!port || *port > 65535) throw Error("bad port in '" + std::string(address) + "'");
  std::string host(address.substr(0, colon));
  if (host.empty()) host = "127.0.0.1";
  return {host, static_cast<int>(*port)};
}

std::string AnnotationEtag(const CorpusStore &store, std::string_view id, AnnotationKind kind) {
  std::ifstream in(store.AnnotationPath(id, kind), std::ios::binary);
  if (!in) return "none";
  std::ostringstream buf;
  buf << in.rdbuf();
  return Fnv1a(buf.str());
}

// ---------------------------------------------------------------------------

struct Service::Server {
  httplib::Server http;
};

Service::Service(CorpusStore store, std::shared_ptr<const Lexicons> lexicons, RuleSet rules,
                 PipelineConfig config)
    : store_(std::move(store)),
      lexicons_(std::move(lexicons)),
      config_(std::move(config)),
      ruleset_(std::make_shared<const RuleSet>(std::move(rules))) {}

Service::~Service() { Stop(); }

std::shared_ptr<const RuleSet> Service::ruleset() const {
  std::lock_guard<std::mutex> lock(ruleset_mu_);
  return ruleset_;
}

HttpResponse Service::Handle(const HttpRequest &request) {
  try {
    return Route(request);
  } catch (const NotFoundError &e) {
    return Fail(404, e.what());
  } catch (const ConflictError &e) {
    return Fail(409, e.what());
  } catch (const CompileError &e) {
    return Fail(422, e.what(), json::array({json{{"rule", e.rule_id()}, {"message", e.what()}}}));
  } catch (const IntegrityError &e) {
    return Fail(422, e.what(), json::array({json{{"message", e.what()}}}));
  } catch (const ParseError &e) {
    return Fail(422, e.what(), json::array({json{{"line", e.line()}, {"message", e.what()}}}));
  } catch (const json::exception &e) {
    return Fail(422, std::string("malformed body: ") + e.what());
  } catch (const IoError &e) {
    return Fail(500, e.what());
  } catch (const Error &e) {
    return Fail(400, e.what());
  }
}

HttpResponse Service::Route(const HttpRequest &req) {
  std::vector<std::string> parts;
  for (const std::string &p : Split(req.path, '/')) {
    if (!p.empty()) parts.push_back(p);
  }
  const std::string &m = req.method;
  if (!parts.empty() && parts[0] == "documents") {
    if (parts.size() == 1 && m == "GET") return Documents();
    if (parts.size() == 2 && m == "GET") return GetDocument(parts[1]);
    if (parts.size() == 3) {
      const std::string &id = parts[1];
      if (parts[2] == "annotations" && m == "GET") return GetAnnotations(id, req);
      if (parts[2] == "annotate" && m == "POST") return Annotate(id);
      if (parts[2] == "gold" && m == "PUT") return PutGold(id, req);
      if (parts[2] == "gold" && m == "GET") {
        HttpRequest r = req;
        r.query["kind"] = "gold";
        return GetAnnotations(id, r);
      }
      if (parts[2] == "graph" && m == "GET") return GetGraph(id, req);
    }
  }
  if (!parts.empty() && parts[0] == "ruleset") {
    if (parts.size() == 1 && m == "GET") return GetRuleset();
    if (parts.size() == 1 && m == "PUT") return PutRuleset(req);
    if (parts.size() == 2 && parts[1] == "preview" && m == "POST") return Preview(req);
  }
  return Fail(404, "no route for " + m + " " + req.path);
}

HttpResponse Service::Documents() {
  return Ok(json{{"documents", store_.ListDocuments()}});
}

HttpResponse Service::GetDocument(const std::string &id) {
  Document doc = store_.LoadDocument(id);
  json data;
  data["id"] = doc.id;
  data["language"] = doc.language;
  data["conllu"] = SerializeConllu(doc);
  data["sidecar"] = json::parse(SerializeSidecar(ExtractSidecar(doc)));
  json sentences = json::array();
  for (const Sentence &s : doc.sentences) {
    json tokens = json::array();
    for (const Token &t : s.tokens) tokens.push_back(t.surface);
    sentences.push_back(json{{"index", s.index},
                             {"section", SectionName(s.section)},
                             {"tokens", tokens}});
  }
  data["sentences"] = sentences;
  return Ok(data);
}

HttpResponse Service::GetAnnotations(const std::string &id, const HttpRequest &req) {
  std::string kind_name = QueryOr(req, "kind", "predicted");
  auto kind = ParseKind(kind_name);
  if (!kind) return Fail(400, "kind must be predicted or gold");
  if (!store_.HasDocument(id)) throw NotFoundError("no document '" + id + "'");
  AnnotationSet set = store_.LoadAnnotations(id, *kind);
  HttpResponse r = Ok(json::parse(AnnotationsToJson(set)));
  r.headers["ETag"] = AnnotationEtag(store_, id, *kind);
  return r;
}

HttpResponse Service::Annotate(const std::string &id) {
  Document doc = store_.LoadDocument(id);
  std::shared_ptr<const RuleSet> rules = ruleset();
  AnnotationSet set = AnnotateDocument(doc, *rules, *lexicons_, config_);
  {
    std::lock_guard<std::mutex> lock(predicted_mu_);
    store_.SaveAnnotations(id, set, AnnotationKind::kPredicted);
  }
  HttpResponse r = Ok(json::parse(AnnotationsToJson(set)));
  r.headers["ETag"] = AnnotationEtag(store_, id, AnnotationKind::kPredicted);
  return r;
}

HttpResponse Service::PutGold(const std::string &id, const HttpRequest &req) {
  Document doc = store_.LoadDocument(id);
  AnnotationSet set = AnnotationsFromJson(Unwrap(req.body).dump());
  if (set.document_id.empty()) set.document_id = id;
  if (set.document_id != id) {
    return Fail(422, "annotation set names document '" + set.document_id + "'");
  }
  CheckIntegrity(set);
  set = Canonicalize(set);
  std::vector<std::string> problems = CheckAgainstDocument(set, doc);
  if (!problems.empty()) {
    json reasons = json::array();
    for (const std::string &p : problems) reasons.push_back(json{{"message", p}});
    return Fail(422, "annotations do not fit the document", reasons);
  }

  // The lock is held across the version check and the write so two
  // writers with the same base cannot both succeed.
  DocumentLock lock = store_.Lock(id);
  auto expected = req.headers.find("if-match");
  if (expected != req.headers.end()) {
    std::string current = AnnotationEtag(store_, id, AnnotationKind::kGold);
    if (expected->second != current && expected->second != "*") {
      return Fail(409, "gold for '" + id + "' changed since version " + expected->second,
                  json::array({json{{"current", current}}}));
    }
  }
  SaveReceipt receipt = store_.SaveAnnotations(id, set, AnnotationKind::kGold, lock);
  std::string etag = AnnotationEtag(store_, id, AnnotationKind::kGold);
  HttpResponse r = Ok(json{{"document", id},
                           {"kind", "gold"},
                           {"count", receipt.count},
                           {"etag", etag},
                           {"annotations", json::parse(AnnotationsToJson(set))}});
  r.headers["ETag"] = etag;
  return r;
}

HttpResponse Service::GetGraph(const std::string &id, const HttpRequest &req) {
  Document doc = store_.LoadDocument(id);
  std::set<EdgeType> layers = ParseLayers(QueryOr(req, "layers", "seq,dep,chunk,coref"));
  std::string format = QueryOr(req, "format", "json");
  if (format != "json" && format != "dot") return Fail(400, "format must be json or dot");
  std::string kind_name = QueryOr(req, "kind", "predicted");
  auto kind = ParseKind(kind_name);
  if (!kind) return Fail(400, "kind must be predicted or gold");

  AnnotationSet set;
  if (std::filesystem::exists(store_.AnnotationPath(id, *kind))) {
    set = store_.LoadAnnotations(id, *kind);
  } else if (*kind == AnnotationKind::kPredicted) {
    set = AnnotateDocument(doc, *ruleset(), *lexicons_, config_);
  } else {
    set.document_id = doc.id;
  }
  TextGraph graph = BuildGraph(doc, set, layers);
  if (format == "dot") {
    HttpResponse r;
    r.content_type = "text/vnd.graphviz";
    r.body = ToDot(graph);
    return r;
  }
  return Ok(json::parse(ToJsonGraph(graph)));
}

HttpResponse Service::GetRuleset() { return Ok(RulesetSummary(*ruleset())); }

HttpResponse Service::PutRuleset(const HttpRequest &req) {
  std::string document;
  try {
    document = Unwrap(req.body).dump();
  } catch (const json::exception &e) {
    return Fail(422, std::string("malformed ruleset: ") + e.what());
  }
  std::vector<CompileError> errors = CheckRuleset(document, lexicons_->term_sets);
  if (!errors.empty()) {
    json reasons = json::array();
    for (const CompileError &e : errors) {
      reasons.push_back(json{{"rule", e.rule_id()}, {"message", e.what()}});
    }
    return Fail(422, "ruleset does not compile", reasons);
  }
  auto compiled = std::make_shared<const RuleSet>(CompileRuleset(document, lexicons_->term_sets));
  {
    std::lock_guard<std::mutex> lock(ruleset_mu_);
    ruleset_ = compiled;
  }
  return Ok(RulesetSummary(*compiled));
}

HttpResponse Service::Preview(const HttpRequest &req) {
  json body = Unwrap(req.body);
  if (!body.is_object() || !body.contains("rule")) {
    return Fail(422, "preview body needs a \"rule\" object");
  }
  Rule rule = CompileRule(body.at("rule").dump(), lexicons_->term_sets);
  std::vector<std::string> ids;
  if (body.contains("documents") && !body.at("documents").is_null()) {
    for (const json &d : body.at("documents")) ids.push_back(d.get<std::string>());
  } else {
    ids = store_.ListDocuments();
  }
  json docs = json::array();
  std::size_t total = 0;
  for (const std::string &id : ids) {
    Document doc = store_.LoadDocument(id);
    LanguageProfile profile = config_.ProfileFor(doc.language);
    MatchContext context{&profile.first_person, &lexicons_->emotions};
    json matches = json::array();
    for (const Sentence &s : doc.sentences) {
      for (const MatchResult &m : FindMatches(rule, s, context)) {
        json bindings = json::object();
        for (std::size_t v = 0; v < rule.vars.size(); ++v) {
          bindings[rule.vars[v].name] = json{{"token", m.bindings[v]},
                                             {"surface", s.tokens[m.bindings[v]].surface}};
        }
        matches.push_back(json{{"sentence", m.sentence}, {"bindings", bindings}});
      }
    }
    total += matches.size();
    docs.push_back(json{{"id", id}, {"count", matches.size()}, {"matches", matches}});
  }
  return Ok(json{{"rule", rule.id}, {"total", total}, {"documents", docs}});
}

// ---------------------------------------------------------------------------

namespace {

void Mount(httplib::Server &http, Service &service) {
  auto handler = [&service](const httplib::Request &req, httplib::Response &res) {
    HttpRequest r;
    r.method = req.method;
    r.path = req.path;
    for (const auto &[k, v] : req.params) r.query[k] = v;
    for (const auto &[k, v] : req.headers) r.headers[CaseFold(k)] = v;
    r.body = req.body;
    HttpResponse out = service.Handle(r);
    res.status = out.status;
    for (const auto &[k, v] : out.headers) res.set_header(k, v);
    res.set_content(out.body, out.content_type);
  };
  const char *pattern = R"(/.*)";
  http.Get(pattern, handler);
  http.Post(pattern, handler);
  http.Put(pattern, handler);
  http.Delete(pattern, handler);
}

}  // namespace

bool Service::Listen(const std::string &host, int port) {
  if (!server_) {
    server_ = std::make_unique<Server>();
    Mount(server_->http, *this);
  }
  return server_->http.listen(host, port);
}

int Service::BindToAnyPort(const std::string &host) {
  if (!server_) {
    server_ = std::make_unique<Server>();
    Mount(server_->http, *this);
  }
  return server_->http.bind_to_any_port(host);
}

bool Service::ListenAfterBind() { return server_ && server_->http.listen_after_bind(); }

void Service::Stop() {
  if (server_) server_->http.stop();
}

bool Service::IsRunning() const { return server_ && server_->http.is_running(); }

}  // namespace cae
