#include "cae/store.h"
#include "cae/text.h"
#include "json.hpp"

namespace cae {
namespace {

using nlohmann::json;

constexpr std::string_view kAbsent = "_";
constexpr std::string_view kColumns =
    "# id\trole\tspan\temotion\tnegated\tcue_link\tprovenance\tintensity";

std::optional<Span> ParseSpanField(std::string_view field) {
  std::vector<std::string> parts = Split(field, ':');
  if (parts.size() != 3) return std::nullopt;
  auto s = ParseIndex(parts[0]), b = ParseIndex(parts[1]), e = ParseIndex(parts[2]);
  if (!s || !b || !e) return std::nullopt;
  return Span{*s, *b, *e};
}

bool CleanField(std::string_view text) {
  return !text.empty() && text.find_first_of("\t\n\r") == std::string_view::npos;
}

json SpanJson(const Span &s) {
  return json{{"sent", s.sentence}, {"start", s.start}, {"end", s.end}};
}

Span SpanFromJson(const json &j) {
  return Span{j.at("sent").get<std::size_t>(), j.at("start").get<std::size_t>(),
              j.at("end").get<std::size_t>()};
}

}  // namespace

std::string WriteAnnotations(const AnnotationSet &set) {
  if (set.document_id.find_first_of("\n\r") != std::string::npos) {
    throw IntegrityError("document id contains a line break");
  }
  std::string out;
  out += "# " + std::string(kAnnotationSchema) + "\n";
  out += "# doc_id = " + set.document_id + "\n";
  out += std::string(kColumns) + "\n";
  for (const RoleAnnotation &a : set.annotations) {
    if (!CleanField(a.provenance)) {
      throw IntegrityError("annotation " + std::to_string(a.id) +
                           ": provenance must be non-empty and tab-free");
    }
    out += std::to_string(a.id);
    out += '\t';
    out += RoleName(a.role);
    out += '\t';
    out += FormatSpan(a.span);
    out += '\t';
    out += a.emotion ? std::string(EmotionName(*a.emotion)) : std::string(kAbsent);
    out += '\t';
    out += a.role == RoleLabel::kCue ? (a.negated ? "true" : "false") : std::string(kAbsent);
    out += '\t';
    out += a.cue_link ? std::to_string(*a.cue_link) : std::string(kAbsent);
    out += '\t';
    out += a.provenance;
    out += '\t';
    out += a.intensity_span ? FormatSpan(*a.intensity_span) : std::string(kAbsent);
    out += '\n';
  }
  out += "# end " + std::to_string(set.annotations.size()) + "\n";
  return out;
}

AnnotationSet ReadAnnotations(std::string_view text) {
  AnnotationSet set;
  std::size_t line_no = 0;
  std::size_t offset = 0;
  bool saw_schema = false, saw_end = false;
  auto fail = [&](const std::string &message) -> ParseError {
    return ParseError(line_no, message + " (byte offset " + std::to_string(offset) + ")");
  };
  while (offset < text.size()) {
    std::size_t nl = text.find('\n', offset);
    if (nl == std::string_view::npos) {
      ++line_no;
      throw fail("unterminated final line");
    }
    std::string_view line = text.substr(offset, nl - offset);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    if (saw_end) {
      if (!Trim(line).empty()) throw fail("content after end marker");
      offset = nl + 1;
      continue;
    }
    if (line_no == 1) {
      if (line != "# " + std::string(kAnnotationSchema)) {
        throw fail("missing '# " + std::string(kAnnotationSchema) + "' header");
      }
      saw_schema = true;
    } else if (line.rfind("# doc_id =", 0) == 0) {
      set.document_id = std::string(Trim(line.substr(10)));
    } else if (line.rfind("# end ", 0) == 0) {
      auto count = ParseIndex(Trim(line.substr(6)));
      if (!count || *count != set.annotations.size()) {
        throw fail("record count does not match end marker");
      }
      saw_end = true;
    } else if (line.empty() || line[0] == '#') {
      // column header or comment
    } else {
      std::vector<std::string> cols = Split(line, '\t');
      if (cols.size() != 8) {
        throw fail("expected 8 columns, found " + std::to_string(cols.size()));
      }
      RoleAnnotation a;
      auto id = ParseIndex(cols[0]);
      if (!id) throw fail("bad id '" + cols[0] + "'");
      a.id = *id;
      auto role = ParseRole(cols[1]);
      if (!role) throw fail("unknown role '" + cols[1] + "'");
      a.role = *role;
      auto span = ParseSpanField(cols[2]);
      if (!span) throw fail("bad span '" + cols[2] + "'");
      a.span = *span;
      if (cols[3] != kAbsent) {
        auto emotion = ParseEmotion(cols[3]);
        if (!emotion) throw fail("unknown emotion '" + cols[3] + "'");
        a.emotion = emotion;
      }
      if (cols[4] == "true") {
        a.negated = true;
      } else if (cols[4] != "false" && cols[4] != kAbsent) {
        throw fail("bad negated flag '" + cols[4] + "'");
      }
      if (cols[5] != kAbsent) {
        auto link = ParseIndex(cols[5]);
        if (!link) throw fail("bad cue_link '" + cols[5] + "'");
        a.cue_link = link;
      }
      if (cols[6].empty()) throw fail("empty provenance");
      a.provenance = cols[6];
      if (cols[7] != kAbsent) {
        auto intensity = ParseSpanField(cols[7]);
        if (!intensity) throw fail("bad intensity span '" + cols[7] + "'");
        a.intensity_span = intensity;
      }
      set.annotations.push_back(std::move(a));
    }
    offset = nl + 1;
  }
  if (!saw_schema) throw ParseError(0, "empty annotation file");
  if (!saw_end) {
    ++line_no;
    throw fail("truncated file: missing end marker");
  }
  try {
    CheckIntegrity(set);
  } catch (const IntegrityError &e) {
    throw ParseError(0, e.what());
  }
  return set;
}

std::string AnnotationsToJson(const AnnotationSet &set) {
  json j;
  j["schema"] = kAnnotationSchema;
  j["doc_id"] = set.document_id;
  j["annotations"] = json::array();
  for (const RoleAnnotation &a : set.annotations) {
    json r{{"id", a.id},
           {"role", RoleName(a.role)},
           {"span", SpanJson(a.span)},
           {"provenance", a.provenance}};
    r["emotion"] = a.emotion ? json(EmotionName(*a.emotion)) : json(nullptr);
    r["negated"] = a.negated;
    r["cue_link"] = a.cue_link ? json(*a.cue_link) : json(nullptr);
    r["intensity"] = a.intensity_span ? SpanJson(*a.intensity_span) : json(nullptr);
    j["annotations"].push_back(std::move(r));
  }
  return j.dump(2) + "\n";
}

AnnotationSet AnnotationsFromJson(std::string_view json_text) {
  AnnotationSet set;
  try {
    json j = json::parse(json_text);
    if (j.value("schema", std::string()) != kAnnotationSchema) {
      throw ParseError(0, "annotations: expected schema " + std::string(kAnnotationSchema));
    }
    set.document_id = j.at("doc_id").get<std::string>();
    for (const json &r : j.at("annotations")) {
      RoleAnnotation a;
      a.id = r.at("id").get<std::size_t>();
      std::string role = r.at("role").get<std::string>();
      auto parsed = ParseRole(role);
      if (!parsed) throw ParseError(0, "annotations: unknown role '" + role + "'");
      a.role = *parsed;
      a.span = SpanFromJson(r.at("span"));
      a.provenance = r.value("provenance", std::string("manual"));
      if (r.contains("emotion") && !r.at("emotion").is_null()) {
        std::string e = r.at("emotion").get<std::string>();
        a.emotion = ParseEmotion(e);
        if (!a.emotion) throw ParseError(0, "annotations: unknown emotion '" + e + "'");
      }
      a.negated = r.value("negated", false);
      if (r.contains("cue_link") && !r.at("cue_link").is_null()) {
        a.cue_link = r.at("cue_link").get<std::size_t>();
      }
      if (r.contains("intensity") && !r.at("intensity").is_null()) {
        a.intensity_span = SpanFromJson(r.at("intensity"));
      }
      set.annotations.push_back(std::move(a));
    }
  } catch (const json::exception &e) {
    throw ParseError(0, std::string("annotations: ") + e.what());
  }
  return set;
}

std::string_view KindName(AnnotationKind kind) {
  return kind == AnnotationKind::kGold ? "gold" : "predicted";
}

std::optional<AnnotationKind> ParseKind(std::string_view name) {
  if (name == "gold") return AnnotationKind::kGold;
  if (name == "predicted") return AnnotationKind::kPredicted;
  return std::nullopt;
}

}  // namespace cae
