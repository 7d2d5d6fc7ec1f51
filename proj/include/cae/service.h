// HTTP facade over the engine and a corpus store. Every payload is wrapped
// in {"schema": "cae-api/1", "data": ...}; errors carry
// {"schema": ..., "error": {"status", "message", "reasons"}}.
//
//   GET  /documents
//   GET  /documents/{id}
//   GET  /documents/{id}/annotations?kind=predicted|gold
//   POST /documents/{id}/annotate
//   PUT  /documents/{id}/gold            (If-Match: <etag> optional)
//   GET  /documents/{id}/graph?layers=seq,dep&format=json|dot&kind=...
//   GET  /ruleset
//   PUT  /ruleset
//   POST /ruleset/preview                ({"rule": {...}, "documents": [...]})

#ifndef CAE_SERVICE_H_
#define CAE_SERVICE_H_

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "cae/lexicon.h"
#include "cae/pipeline.h"
#include "cae/rules.h"
#include "cae/store.h"

namespace cae {

inline constexpr std::string_view kApiSchema = "cae-api/1";

struct HttpRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> headers;  // lower-case names
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::map<std::string, std::string> headers;
  std::string body;
};

class Service {
 public:
  Service(CorpusStore store, std::shared_ptr<const Lexicons> lexicons, RuleSet rules,
          PipelineConfig config = PipelineConfig::Default());

  // Transport-independent request handling; safe to call concurrently.
  HttpResponse Handle(const HttpRequest &request);

  // Blocks serving HTTP/1.1 on `host:port` until Stop(). Returns false if
  // the address cannot be bound.
  bool Listen(const std::string &host, int port);
  // Binds an ephemeral port on `host` and returns it (or -1); then call
  // ListenAfterBind from a serving thread.
  int BindToAnyPort(const std::string &host);
  bool ListenAfterBind();
  void Stop();
  bool IsRunning() const;

  std::shared_ptr<const RuleSet> ruleset() const;

  ~Service();

 private:
  HttpResponse Route(const HttpRequest &request);
  HttpResponse Documents();
  HttpResponse GetDocument(const std::string &id);
  HttpResponse GetAnnotations(const std::string &id, const HttpRequest &request);
  HttpResponse Annotate(const std::string &id);
  HttpResponse PutGold(const std::string &id, const HttpRequest &request);
  HttpResponse GetGraph(const std::string &id, const HttpRequest &request);
  HttpResponse GetRuleset();
  HttpResponse PutRuleset(const HttpRequest &request);
  HttpResponse Preview(const HttpRequest &request);

  CorpusStore store_;
  std::shared_ptr<const Lexicons> lexicons_;
  PipelineConfig config_;

  mutable std::mutex ruleset_mu_;
  std::shared_ptr<const RuleSet> ruleset_;
  std::mutex predicted_mu_;  // serializes predicted writes

  struct Server;
  std::unique_ptr<Server> server_;
};

// Splits "host:port" (port required). Throws Error.
std::pair<std::string, int> ParseListenAddress(std::string_view address);

// Opaque version tag of a stored annotation file ("none" when absent).
std::string AnnotationEtag(const CorpusStore &store, std::string_view id, AnnotationKind kind);

}  // namespace cae

#endif  // CAE_SERVICE_H_
