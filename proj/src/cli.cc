#include "cae/cli.h"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "cae/eval.h"
#include "cae/graph.h"
#include "cae/ingestion.h"
#include "cae/lexicon.h"
#include "cae/pipeline.h"
#include "cae/rules.h"
#include "cae/service.h"
#include "cae/store.h"
#include "cae/text.h"
#include "json.hpp"

#ifndef CAE_DATA_DIR
#define CAE_DATA_DIR "data"
#endif

namespace cae {
namespace {

namespace fs = std::filesystem;

const std::string kDataDir = CAE_DATA_DIR;
const std::string kDefaultRules = kDataDir + "/rules/default.json";
const std::string kDefaultLexicons = kDataDir + "/lexicons";

std::string ReadFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteOutput(const std::string &path, const std::string &content, std::ostream &out) {
  if (path.empty() || path == "-") {
    out << content;
  } else {
    AtomicWrite(path, content);
  }
}

Document LoadInput(const std::string &conllu, const std::string &sidecar) {
  Document doc = ParseConllu(ReadFile(conllu));
  if (doc.id.empty()) doc.id = fs::path(conllu).stem().string();
  if (!sidecar.empty()) {
    SidecarData data = ParseSidecar(ReadFile(sidecar));
    if (data.document_id.empty()) data.document_id = doc.id;
    doc = AttachSidecar(std::move(doc), data);
  }
  std::vector<Violation> violations = Validate(doc);
  if (!violations.empty()) {
    throw IntegrityError(conllu + ": " + violations.front().where + ": " +
                         violations.front().message);
  }
  return doc;
}

struct Engine {
  Lexicons lexicons;
  RuleSet rules;
  PipelineConfig config = PipelineConfig::Default();
};

Engine LoadEngine(const std::string &rules_path, const std::string &lexicon_dir) {
  Engine e;
  e.lexicons = LoadLexiconDir(lexicon_dir);
  e.rules = CompileRuleset(ReadFile(rules_path), e.lexicons.term_sets);
  return e;
}

// A ruleset document, or a single rule object.
std::vector<Rule> LoadRulesLoose(const std::string &path, const TermSets &sets) {
  std::string text = ReadFile(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw ParseError(0, path + ": " + e.what());
  }
  if (j.is_object() && j.contains("rules")) return CompileRuleset(text, sets).rules;
  return {CompileRule(text, sets)};
}

const CLI::Validator kPolicyValidator(
    [](std::string &value) -> std::string {
      try {
        ParsePolicy(value);
      } catch (const Error &e) {
        return e.what();
      }
      return "";
    },
    "exact|overlap|jaccard:THETA", "policy");

const CLI::Validator kLayersValidator(
    [](std::string &value) -> std::string {
      try {
        ParseLayers(value);
      } catch (const Error &e) {
        return e.what();
      }
      return "";
    },
    "LAYERS", "layers");

// ---------------------------------------------------------------------------

struct AnnotateArgs {
  std::string in, sidecar, out = "-", format = "ann";
  std::string rules = kDefaultRules, lexicons = kDefaultLexicons;
  std::string store;
  std::vector<std::string> docs;
  unsigned jobs = 1;
};

int Annotate(const AnnotateArgs &a, std::ostream &out, std::ostream &err) {
  Engine engine = LoadEngine(a.rules, a.lexicons);
  if (!a.in.empty()) {
    Document doc = LoadInput(a.in, a.sidecar);
    AnnotationSet set = AnnotateDocument(doc, engine.rules, engine.lexicons, engine.config);
    WriteOutput(a.out, a.format == "json" ? AnnotationsToJson(set) : WriteAnnotations(set), out);
    return kExitOk;
  }

  CorpusStore store(a.store);
  std::vector<std::string> ids = a.docs.empty() ? store.ListDocuments() : a.docs;
  std::sort(ids.begin(), ids.end());
  std::vector<std::string> lines(ids.size());
  std::vector<std::string> failures(ids.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < ids.size(); i = next++) {
      try {
        Document doc = store.LoadDocument(ids[i]);
        AnnotationSet set = AnnotateDocument(doc, engine.rules, engine.lexicons, engine.config);
        SaveReceipt r = store.SaveAnnotations(ids[i], set, AnnotationKind::kPredicted);
        lines[i] = ids[i] + "\t" + std::to_string(r.count);
      } catch (const std::exception &e) {
        failures[i] = ids[i] + ": " + e.what();
      }
    }
  };
  unsigned jobs = std::max(1u, std::min<unsigned>(a.jobs, static_cast<unsigned>(ids.size())));
  std::vector<std::thread> threads;
  for (unsigned t = 1; t < jobs; ++t) threads.emplace_back(worker);
  worker();
  for (std::thread &t : threads) t.join();

  int code = kExitOk;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!failures[i].empty()) {
      err << "error: " << failures[i] << "\n";
      code = kExitFailure;
    } else {
      out << lines[i] << "\n";
    }
  }
  return code;
}

struct GraphArgs {
  std::string in, sidecar, store, doc, annotations, out = "-";
  std::string layers = "seq,dep,chunk,coref", format = "dot";
  std::string rules = kDefaultRules, lexicons = kDefaultLexicons;
};

int Graph(const GraphArgs &a, std::ostream &out) {
  Document doc;
  if (!a.in.empty()) {
    doc = LoadInput(a.in, a.sidecar);
  } else {
    doc = CorpusStore(a.store).LoadDocument(a.doc);
  }
  AnnotationSet set;
  if (!a.annotations.empty()) {
    set = ReadAnnotations(ReadFile(a.annotations));
  } else {
    Engine engine = LoadEngine(a.rules, a.lexicons);
    set = AnnotateDocument(doc, engine.rules, engine.lexicons, engine.config);
  }
  TextGraph graph = BuildGraph(doc, set, ParseLayers(a.layers));
  WriteOutput(a.out, a.format == "json" ? ToJsonGraph(graph) : ToDot(graph), out);
  return kExitOk;
}

struct EvalArgs {
  std::string gold, pred, store, policy = "exact", format = "table";
  bool diff = false;
};

void PrintDiff(const std::vector<DiffRecord> &records, std::ostream &out) {
  for (const DiffRecord &d : records) {
    const RoleAnnotation &a = d.gold ? *d.gold : *d.pred;
    out << DiffKindName(d.kind) << "\t" << RoleName(a.role);
    out << "\tgold=" << (d.gold ? FormatSpan(d.gold->span) : "_");
    out << "\tpred=" << (d.pred ? FormatSpan(d.pred->span) : "_");
    out << "\tprovenance=" << (d.pred ? d.pred->provenance : d.gold->provenance) << "\n";
  }
}

int Eval(const EvalArgs &a, std::ostream &out) {
  MatchPolicy policy = ParsePolicy(a.policy);
  ScoreReport report;
  report.policy = policy;
  std::vector<DiffRecord> diff;
  if (!a.store.empty()) {
    CorpusStore store(a.store);
    for (const std::string &id : store.ListDocuments()) {
      if (!fs::exists(store.AnnotationPath(id, AnnotationKind::kGold))) continue;
      AnnotationSet gold = store.LoadAnnotations(id, AnnotationKind::kGold);
      AnnotationSet pred = store.LoadAnnotations(id, AnnotationKind::kPredicted);
      report.Merge(Score(gold, pred, policy));
      if (a.diff) {
        for (DiffRecord &d : Diff(gold, pred)) diff.push_back(std::move(d));
      }
    }
  } else {
    AnnotationSet gold = ReadAnnotations(ReadFile(a.gold));
    AnnotationSet pred = ReadAnnotations(ReadFile(a.pred));
    report = Score(gold, pred, policy);
    if (a.diff) diff = Diff(gold, pred);
  }
  out << (a.format == "json" ? FormatReportJson(report) : FormatReportTable(report));
  if (a.diff) PrintDiff(diff, out);
  return kExitOk;
}

int RulesCheck(const std::string &path, const std::string &lexicons, std::ostream &out,
               std::ostream &err) {
  Lexicons lex = LoadLexiconDir(lexicons);
  std::string text = ReadFile(path);
  std::vector<CompileError> errors = CheckRuleset(text, lex.term_sets);
  if (!errors.empty()) {
    for (const CompileError &e : errors) err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  RuleSet rules = CompileRuleset(text, lex.term_sets);
  out << "ok: " << rules.rules.size() << " rules\n";
  for (const Rule &r : rules.rules) {
    out << r.id << "\tpriority=" << r.priority << (r.enabled ? "" : "\tdisabled") << "\n";
  }
  return kExitOk;
}

int RulesPreview(const std::string &path, const std::string &corpus, const std::string &lexicons,
                 std::ostream &out) {
  Lexicons lex = LoadLexiconDir(lexicons);
  std::vector<Rule> rules = LoadRulesLoose(path, lex.term_sets);
  PipelineConfig config = PipelineConfig::Default();
  CorpusStore store(corpus);
  out << "document\trule\tmatches\n";
  for (const std::string &id : store.ListDocuments()) {
    Document doc = store.LoadDocument(id);
    LanguageProfile profile = config.ProfileFor(doc.language);
    MatchContext context{&profile.first_person, &lex.emotions};
    for (const Rule &rule : rules) {
      std::size_t count = 0;
      for (const Sentence &s : doc.sentences) count += FindMatches(rule, s, context).size();
      out << id << "\t" << rule.id << "\t" << count << "\n";
    }
  }
  return kExitOk;
}

struct LexiconArgs {
  std::string seeds, graph, relations = "syn,hypo", name, out = "-";
  int depth = 2;
};

int LexiconBuild(const LexiconArgs &a, std::ostream &out) {
  std::vector<std::string> seeds;
  std::istringstream in(ReadFile(a.seeds));
  for (std::string line; std::getline(in, line);) {
    std::string_view s = Trim(line);
    if (!s.empty() && s[0] != '#') seeds.emplace_back(s);
  }
  std::ifstream graph_in(a.graph);
  if (!graph_in) throw IoError("cannot read " + a.graph);
  SynonymGraph graph = LoadSynonymGraph(graph_in);
  std::set<Relation> relations;
  for (const std::string &r : Split(a.relations, ',')) {
    if (Trim(r).empty()) continue;
    relations.insert(*ParseRelation(Trim(r)));
  }
  std::string name = a.name.empty() ? fs::path(a.seeds).stem().string() : a.name;
  TermSet set = ExpandSeeds(name, seeds, graph, relations, a.depth);
  std::ostringstream buf;
  WriteTermSet(buf, set);
  WriteOutput(a.out, buf.str(), out);
  return kExitOk;
}

struct ServeArgs {
  std::string store, listen = "127.0.0.1:8080";
  std::string rules = kDefaultRules, lexicons = kDefaultLexicons;
};

int Serve(const ServeArgs &a, std::ostream &out, std::ostream &err) {
  auto [host, port] = ParseListenAddress(a.listen);
  Engine engine = LoadEngine(a.rules, a.lexicons);
  auto lexicons = std::make_shared<const Lexicons>(std::move(engine.lexicons));
  Service service(CorpusStore(a.store), lexicons, std::move(engine.rules), engine.config);
  out << "serving " << a.store << " on http://" << host << ":" << port << "\n" << std::flush;
  if (!service.Listen(host, port)) {
    err << "error: cannot listen on " << a.listen << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

const CLI::Validator kRelationsValidator(
    [](std::string &value) -> std::string {
      for (const std::string &r : Split(value, ',')) {
        if (!Trim(r).empty() && !ParseRelation(Trim(r))) return "unknown relation '" + r + "'";
      }
      return "";
    },
    "RELATIONS", "relations");

}  // namespace

int RunCli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Emotion semantic-role annotation engine", "cae"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file of default flag values");
  app.set_version_flag("--version",
                       std::string("cae ") + kVersion +
                           "\nschemas: cae-rules/1 cae-ann/1 cae-graph/1 cae-api/1 cae-eval/1");

  AnnotateArgs annotate;
  CLI::App *annotate_cmd = app.add_subcommand("annotate", "Annotate a document or a corpus store");
  auto *in_opt = annotate_cmd->add_option("--in", annotate.in, "CoNLL-U input")->check(CLI::ExistingFile);
  annotate_cmd->add_option("--sidecar", annotate.sidecar, "Sidecar JSON")->check(CLI::ExistingFile)->needs(in_opt);
  annotate_cmd->add_option("--rules", annotate.rules, "Rule document")->check(CLI::ExistingFile);
  annotate_cmd->add_option("--lexicons", annotate.lexicons, "Lexicon directory")->check(CLI::ExistingDirectory);
  annotate_cmd->add_option("--out", annotate.out, "Output file ('-' for stdout)");
  annotate_cmd->add_option("--format", annotate.format, "ann or json")->check(CLI::IsMember({"ann", "json"}));
  auto *store_opt = annotate_cmd->add_option("--store", annotate.store, "Corpus store")
                        ->envname("CAE_STORE")
                        ->check(CLI::ExistingDirectory)
                        ->excludes(in_opt);
  annotate_cmd->add_option("--doc", annotate.docs, "Restrict to these documents")->needs(store_opt);
  annotate_cmd->add_option("--jobs", annotate.jobs, "Parallel workers")->check(CLI::Range(1u, 256u));

  GraphArgs graph;
  CLI::App *graph_cmd = app.add_subcommand("graph", "Export the layered token graph");
  auto *g_in = graph_cmd->add_option("--in", graph.in, "CoNLL-U input")->check(CLI::ExistingFile);
  graph_cmd->add_option("--sidecar", graph.sidecar, "Sidecar JSON")->check(CLI::ExistingFile)->needs(g_in);
  auto *g_store = graph_cmd->add_option("--store", graph.store, "Corpus store")
                      ->envname("CAE_STORE")
                      ->check(CLI::ExistingDirectory);
  graph_cmd->add_option("--doc", graph.doc, "Document id in the store")->needs(g_store);
  graph_cmd->add_option("--annotations", graph.annotations, "Annotation file")->check(CLI::ExistingFile);
  graph_cmd->add_option("--rules", graph.rules, "Rule document")->check(CLI::ExistingFile);
  graph_cmd->add_option("--lexicons", graph.lexicons, "Lexicon directory")->check(CLI::ExistingDirectory);
  graph_cmd->add_option("--layers", graph.layers, "seq,dep,chunk,coref")->check(kLayersValidator);
  graph_cmd->add_option("--format", graph.format, "dot or json")->check(CLI::IsMember({"dot", "json"}));
  graph_cmd->add_option("--out", graph.out, "Output file ('-' for stdout)");

  EvalArgs eval;
  CLI::App *eval_cmd = app.add_subcommand("eval", "Score predictions against gold");
  auto *e_gold = eval_cmd->add_option("--gold", eval.gold, "Gold annotation file")->check(CLI::ExistingFile);
  auto *e_pred = eval_cmd->add_option("--pred", eval.pred, "Predicted annotation file")->check(CLI::ExistingFile);
  eval_cmd->add_option("--store", eval.store, "Score every gold document of a store")
                      ->check(CLI::ExistingDirectory)
                      ->excludes(e_gold)
                      ->excludes(e_pred);
  e_gold->needs(e_pred);
  e_pred->needs(e_gold);
  eval_cmd->add_option("--policy", eval.policy, "exact|overlap|jaccard:THETA")->check(kPolicyValidator);
  eval_cmd->add_option("--format", eval.format, "table or json")->check(CLI::IsMember({"table", "json"}));
  eval_cmd->add_flag("--diff", eval.diff, "Print unmatched annotations");

  CLI::App *rules_cmd = app.add_subcommand("rules", "Rule development");
  rules_cmd->require_subcommand(1);
  std::string check_path, check_lex = kDefaultLexicons;
  CLI::App *check_cmd = rules_cmd->add_subcommand("check", "Compile a rule document");
  check_cmd->add_option("rules", check_path, "Rule document")->required()->check(CLI::ExistingFile);
  check_cmd->add_option("--lexicons", check_lex, "Lexicon directory")->check(CLI::ExistingDirectory);
  std::string preview_path, preview_corpus, preview_lex = kDefaultLexicons;
  CLI::App *preview_cmd = rules_cmd->add_subcommand("preview", "Count rule matches over a corpus");
  preview_cmd->add_option("rules", preview_path, "Rule or rule document")->required()->check(CLI::ExistingFile);
  preview_cmd->add_option("--corpus", preview_corpus, "Corpus store")
      ->required()
      ->envname("CAE_STORE")
      ->check(CLI::ExistingDirectory);
  preview_cmd->add_option("--lexicons", preview_lex, "Lexicon directory")->check(CLI::ExistingDirectory);

  LexiconArgs lexicon;
  CLI::App *lexicon_cmd = app.add_subcommand("lexicon", "Lexicon tools");
  lexicon_cmd->require_subcommand(1);
  CLI::App *build_cmd = lexicon_cmd->add_subcommand("build", "Expand seeds into a TermSet cache");
  build_cmd->add_option("--seeds", lexicon.seeds, "Seed list")->required()->check(CLI::ExistingFile);
  build_cmd->add_option("--graph", lexicon.graph, "Synonym graph TSV")->required()->check(CLI::ExistingFile);
  build_cmd->add_option("--depth", lexicon.depth, "Maximum hops")->check(CLI::Range(0, 64));
  build_cmd->add_option("--relations", lexicon.relations, "syn,hypo,...")->check(kRelationsValidator);
  build_cmd->add_option("--name", lexicon.name, "TermSet name (default: seed file stem)");
  build_cmd->add_option("--out", lexicon.out, "Output file ('-' for stdout)");

  ServeArgs serve;
  CLI::App *serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  serve_cmd->add_option("--store", serve.store, "Corpus store")
      ->required()
      ->envname("CAE_STORE")
      ->check(CLI::ExistingDirectory);
  serve_cmd->add_option("--listen", serve.listen, "host:port");
  serve_cmd->add_option("--rules", serve.rules, "Rule document")->check(CLI::ExistingFile);
  serve_cmd->add_option("--lexicons", serve.lexicons, "Lexicon directory")->check(CLI::ExistingDirectory);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
    if (annotate_cmd->parsed() && annotate.in.empty() && annotate.store.empty()) {
      throw CLI::ValidationError("annotate", "one of --in or --store is required");
    }
    if (graph_cmd->parsed() && graph.in.empty() && (graph.store.empty() || graph.doc.empty())) {
      throw CLI::ValidationError("graph", "--in, or --store with --doc, is required");
    }
    if (eval_cmd->parsed() && eval.store.empty() && (eval.gold.empty() || eval.pred.empty())) {
      throw CLI::ValidationError("eval", "--gold and --pred (or --store) are required");
    }
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (annotate_cmd->parsed()) return Annotate(annotate, out, err);
    if (graph_cmd->parsed()) return Graph(graph, out);
    if (eval_cmd->parsed()) return Eval(eval, out);
    if (check_cmd->parsed()) return RulesCheck(check_path, check_lex, out, err);
    if (preview_cmd->parsed()) return RulesPreview(preview_path, preview_corpus, preview_lex, out);
    if (build_cmd->parsed()) return LexiconBuild(lexicon, out);
    if (serve_cmd->parsed()) return Serve(serve, out, err);
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace cae
