#include <sstream>

#include "cae/ingestion.h"
#include "cae/text.h"

namespace cae {
namespace {

constexpr std::string_view kEmpty = "_";

std::map<std::string, std::string> ParsePairs(std::string_view field) {
  std::map<std::string, std::string> out;
  if (field == kEmpty || field.empty()) return out;
  for (const std::string &item : Split(field, '|')) {
    std::size_t eq = item.find('=');
    if (eq == std::string::npos) {
      out[item] = "";
    } else {
      out[item.substr(0, eq)] = item.substr(eq + 1);
    }
  }
  return out;
}

std::string FormatPairs(const std::map<std::string, std::string> &pairs) {
  if (pairs.empty()) return std::string(kEmpty);
  std::string out;
  for (const auto &[key, value] : pairs) {
    if (!out.empty()) out += '|';
    out += key;
    if (!value.empty()) out += "=" + value;
  }
  return out;
}

std::string FieldOrEmpty(const std::string &value) {
  return value.empty() ? std::string(kEmpty) : value;
}

std::string EmptyToBlank(const std::string &field) {
  return field == kEmpty ? std::string() : field;
}

struct PendingSentence {
  std::vector<Token> tokens;
  std::vector<std::size_t> head_lines;  // source line per token
  std::vector<std::pair<std::string, std::string>> comments;
  std::vector<std::string> mwt_lines;
  std::size_t first_line = 0;
};

// Returns the 1-based line of a token on a head cycle, or 0 if acyclic.
std::size_t FindCycle(const PendingSentence &s) {
  const std::size_t n = s.tokens.size();
  // 0 = unvisited, 1 = on current path, 2 = known to reach the root.
  std::vector<int> state(n, 0);
  for (std::size_t start = 0; start < n; ++start) {
    std::vector<std::size_t> path;
    std::size_t cur = start;
    while (cur != kRoot && state[cur] == 0) {
      state[cur] = 1;
      path.push_back(cur);
      cur = s.tokens[cur].head;
    }
    if (cur != kRoot && state[cur] == 1) return s.head_lines[cur];
    for (std::size_t t : path) state[t] = 2;
  }
  return 0;
}

void FinishSentence(PendingSentence &pending, Document &doc) {
  if (pending.tokens.empty() && pending.comments.empty() &&
      pending.mwt_lines.empty()) {
    return;
  }
  if (pending.tokens.empty()) {
    // Comment-only block, e.g. a "# newdoc" header: not a sentence.
    pending = PendingSentence{};
    return;
  }
  const std::size_t n = pending.tokens.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t head = pending.tokens[i].head;
    if (head != kRoot && head >= n) {
      throw ParseError(pending.head_lines[i],
                       "head " + std::to_string(head + 1) +
                           " out of range for a " + std::to_string(n) +
                           "-token sentence");
    }
    if (head == i) {
      throw ParseError(pending.head_lines[i], "token is its own head");
    }
  }
  if (std::size_t line = FindCycle(pending); line != 0) {
    throw ParseError(line, "cyclic head graph");
  }

  Sentence sentence;
  sentence.index = doc.sentences.size();
  sentence.tokens = std::move(pending.tokens);
  std::string prefix = "sent." + std::to_string(sentence.index) + ".";
  std::size_t other = 0;
  for (const auto &[key, value] : pending.comments) {
    if (key == "text" || key == "sent_id") {
      doc.meta[prefix + key] = value;
    } else {
      doc.meta[prefix + "comment." + std::to_string(other++)] = value;
    }
  }
  for (std::size_t k = 0; k < pending.mwt_lines.size(); ++k) {
    doc.meta[prefix + "mwt." + std::to_string(k)] = pending.mwt_lines[k];
  }
  doc.sentences.push_back(std::move(sentence));
  pending = PendingSentence{};
}

}  // namespace

Document ParseConllu(std::istream &in) {
  Document doc;
  PendingSentence pending;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) {
      FinishSentence(pending, doc);
      continue;
    }
    if (pending.first_line == 0) pending.first_line = line_no;
    if (line[0] == '#') {
      std::string_view body = Trim(std::string_view(line).substr(1));
      std::size_t eq = body.find('=');
      if (eq != std::string_view::npos) {
        std::string key(Trim(body.substr(0, eq)));
        std::string value(Trim(body.substr(eq + 1)));
        if (key == "newdoc id") {
          doc.id = value;
          continue;
        }
        if (key == "text" || key == "sent_id") {
          pending.comments.emplace_back(key, value);
          continue;
        }
      }
      pending.comments.emplace_back("", line);
      continue;
    }

    std::vector<std::string> cols = Split(line, '\t');
    if (cols.size() != 10) {
      throw ParseError(line_no, "expected 10 tab-separated columns, found " +
                                    std::to_string(cols.size()));
    }
    const std::string &id = cols[0];
    if (id.find('-') != std::string::npos) {
      pending.mwt_lines.push_back(line);
      continue;
    }
    if (id.find('.') != std::string::npos) continue;  // empty node

    auto index = ParseIndex(id);
    if (!index || *index != pending.tokens.size() + 1) {
      throw ParseError(line_no, "token id '" + id + "' is not " +
                                    std::to_string(pending.tokens.size() + 1));
    }
    auto head = ParseIndex(cols[6]);
    if (!head) {
      throw ParseError(line_no, "non-numeric head '" + cols[6] + "'");
    }
    if (cols[1].empty()) {
      throw ParseError(line_no, "empty surface form");
    }

    Token token;
    token.index = *index - 1;
    token.surface = cols[1];
    token.lemma = EmptyToBlank(cols[2]);
    token.upos = EmptyToBlank(cols[3]);
    token.xpos = EmptyToBlank(cols[4]);
    token.feats = ParsePairs(cols[5]);
    token.head = *head == 0 ? kRoot : *head - 1;
    token.deprel = EmptyToBlank(cols[7]);
    token.deps = EmptyToBlank(cols[8]);
    token.misc = ParsePairs(cols[9]);
    pending.tokens.push_back(std::move(token));
    pending.head_lines.push_back(line_no);
  }
  FinishSentence(pending, doc);
  return doc;
}

Document ParseConllu(std::string_view text) {
  std::istringstream in{std::string(text)};
  return ParseConllu(in);
}

std::string SerializeConllu(const Document &doc) {
  std::ostringstream out;
  if (!doc.id.empty()) out << "# newdoc id = " << doc.id << '\n';
  for (const Sentence &s : doc.sentences) {
    std::string prefix = "sent." + std::to_string(s.index) + ".";
    auto meta = [&](const std::string &key) -> const std::string * {
      auto it = doc.meta.find(prefix + key);
      return it == doc.meta.end() ? nullptr : &it->second;
    };
    for (std::size_t k = 0;; ++k) {
      const std::string *comment = meta("comment." + std::to_string(k));
      if (!comment) break;
      out << *comment << '\n';
    }
    if (const std::string *v = meta("sent_id")) out << "# sent_id = " << *v << '\n';
    if (const std::string *v = meta("text")) out << "# text = " << *v << '\n';

    // Multiword ranges go right before the token that starts them.
    std::multimap<std::size_t, std::string> mwt;
    for (std::size_t k = 0;; ++k) {
      const std::string *raw = meta("mwt." + std::to_string(k));
      if (!raw) break;
      std::size_t dash = raw->find('-');
      auto first = ParseIndex(std::string_view(*raw).substr(0, dash));
      mwt.emplace(first.value_or(0), *raw);
    }
    for (const Token &t : s.tokens) {
      auto [lo, hi] = mwt.equal_range(t.index + 1);
      for (auto it = lo; it != hi; ++it) out << it->second << '\n';
      out << (t.index + 1) << '\t' << t.surface << '\t' << FieldOrEmpty(t.lemma)
          << '\t' << FieldOrEmpty(t.upos) << '\t' << FieldOrEmpty(t.xpos) << '\t'
          << FormatPairs(t.feats) << '\t'
          << (t.IsRoot() ? std::size_t{0} : t.head + 1) << '\t'
          << FieldOrEmpty(t.deprel) << '\t' << FieldOrEmpty(t.deps) << '\t'
          << FormatPairs(t.misc) << '\n';
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace cae
