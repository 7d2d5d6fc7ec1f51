#include <algorithm>

#include "cae/ingestion.h"
#include "json.hpp"

namespace cae {
namespace {

using nlohmann::json;

Span SpanFromJson(const json &j) {
  return Span{j.at("sent").get<std::size_t>(), j.at("start").get<std::size_t>(),
              j.at("end").get<std::size_t>()};
}

json SpanToJson(const Span &s) {
  return json{{"sent", s.sentence}, {"start", s.start}, {"end", s.end}};
}

void RequireSpan(const Document &doc, const Span &span, const std::string &what) {
  if (!doc.IsValidSpan(span)) {
    throw IntegrityError(what + ": span " + FormatSpan(span) + " out of range");
  }
}

}  // namespace

SidecarData ParseSidecar(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error &e) {
    throw ParseError(0, std::string("sidecar: ") + e.what());
  }
  SidecarData sc;
  try {
    sc.document_id = j.at("doc_id").get<std::string>();
    sc.language = j.value("language", std::string());
    for (const json &c : j.value("chains", json::array())) {
      CorefChain chain;
      chain.id = c.at("id").is_string() ? c.at("id").get<std::string>()
                                        : c.at("id").dump();
      for (const json &m : c.at("mentions")) chain.mentions.push_back(SpanFromJson(m));
      sc.chains.push_back(std::move(chain));
    }
    for (const json &c : j.value("chunks", json::array())) {
      sc.chunks.push_back(SpanFromJson(c));
    }
    for (const json &s : j.value("sections", json::array())) {
      std::string label = s.at("label").get<std::string>();
      auto section = ParseSection(label);
      if (!section) throw ParseError(0, "sidecar: unknown section label '" + label + "'");
      sc.sections.push_back(SectionRange{*section,
                                         s.at("first_sent").get<std::size_t>(),
                                         s.at("last_sent").get<std::size_t>()});
    }
    if (j.contains("meta")) {
      for (const auto &[key, value] : j.at("meta").items()) {
        sc.meta[key] = value.is_string() ? value.get<std::string>() : value.dump();
      }
    }
  } catch (const json::exception &e) {
    throw ParseError(0, std::string("sidecar: ") + e.what());
  }
  return sc;
}

std::string SerializeSidecar(const SidecarData &sc) {
  json j;
  j["doc_id"] = sc.document_id;
  if (!sc.language.empty()) j["language"] = sc.language;
  j["chains"] = json::array();
  for (const CorefChain &c : sc.chains) {
    json mentions = json::array();
    for (const Span &m : c.mentions) mentions.push_back(SpanToJson(m));
    j["chains"].push_back(json{{"id", c.id}, {"mentions", mentions}});
  }
  j["chunks"] = json::array();
  for (const Span &c : sc.chunks) j["chunks"].push_back(SpanToJson(c));
  j["sections"] = json::array();
  for (const SectionRange &s : sc.sections) {
    j["sections"].push_back(json{{"label", SectionName(s.label)},
                                 {"first_sent", s.first_sentence},
                                 {"last_sent", s.last_sentence}});
  }
  if (!sc.meta.empty()) j["meta"] = sc.meta;
  return j.dump(2) + "\n";
}

SidecarData ExtractSidecar(const Document &doc) {
  SidecarData sc;
  sc.document_id = doc.id;
  sc.language = doc.language;
  sc.chains = doc.chains;
  for (const Sentence &s : doc.sentences) {
    for (const Span &c : s.chunks) sc.chunks.push_back(c);
    if (s.section == SceneSection::kUnknown) continue;
    if (!sc.sections.empty() && sc.sections.back().label == s.section &&
        sc.sections.back().last_sentence + 1 == s.index) {
      sc.sections.back().last_sentence = s.index;
    } else {
      sc.sections.push_back(SectionRange{s.section, s.index, s.index});
    }
  }
  for (const auto &[key, value] : doc.meta) {
    if (key.rfind("sent.", 0) != 0) sc.meta[key] = value;
  }
  return sc;
}

Document AttachSidecar(Document doc, const SidecarData &sc) {
  if (!doc.id.empty() && sc.document_id != doc.id) {
    throw IntegrityError("sidecar is for document '" + sc.document_id +
                         "', not '" + doc.id + "'");
  }
  doc.id = sc.document_id;
  if (!sc.language.empty()) doc.language = sc.language;

  std::vector<CorefChain> chains = sc.chains;
  for (CorefChain &chain : chains) {
    if (chain.mentions.size() < 2) {
      throw IntegrityError("chain " + chain.id + ": fewer than two mentions");
    }
    for (const Span &m : chain.mentions) RequireSpan(doc, m, "chain " + chain.id);
    std::sort(chain.mentions.begin(), chain.mentions.end());
  }

  for (Sentence &s : doc.sentences) {
    s.chunks.clear();
    s.section = SceneSection::kUnknown;
  }
  for (const Span &c : sc.chunks) {
    RequireSpan(doc, c, "chunk");
    doc.sentences[c.sentence].chunks.push_back(c);
  }
  for (Sentence &s : doc.sentences) std::sort(s.chunks.begin(), s.chunks.end());

  std::size_t next_free = 0;
  for (const SectionRange &r : sc.sections) {
    if (r.first_sentence > r.last_sentence ||
        r.last_sentence >= doc.sentences.size()) {
      throw IntegrityError("section " + std::string(SectionName(r.label)) +
                           ": sentence range out of bounds");
    }
    if (r.first_sentence < next_free) {
      throw IntegrityError("section " + std::string(SectionName(r.label)) +
                           ": ranges overlap or are unsorted");
    }
    for (std::size_t i = r.first_sentence; i <= r.last_sentence; ++i) {
      doc.sentences[i].section = r.label;
    }
    next_free = r.last_sentence + 1;
  }
  doc.chains = std::move(chains);
  for (const auto &[key, value] : sc.meta) doc.meta[key] = value;
  return doc;
}

}  // namespace cae
