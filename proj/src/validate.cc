#include "cae/ingestion.h"

namespace cae {
namespace {

std::string TokenWhere(std::size_t sent, std::size_t tok) {
  return "sentence " + std::to_string(sent) + " token " + std::to_string(tok);
}

}  // namespace

std::vector<Violation> Validate(const Document &doc) {
  std::vector<Violation> out;
  for (std::size_t si = 0; si < doc.sentences.size(); ++si) {
    const Sentence &s = doc.sentences[si];
    const std::string where = "sentence " + std::to_string(si);
    if (s.index != si) {
      out.push_back({where, "sentence index " + std::to_string(s.index) +
                                " is not contiguous"});
    }
    if (s.tokens.empty()) {
      out.push_back({where, "empty sentence"});
      continue;
    }
    std::size_t roots = 0;
    bool heads_ok = true;
    for (std::size_t ti = 0; ti < s.tokens.size(); ++ti) {
      const Token &t = s.tokens[ti];
      if (t.index != ti) {
        out.push_back({TokenWhere(si, ti), "token index " +
                                               std::to_string(t.index) +
                                               " does not match position"});
      }
      if (t.surface.empty()) out.push_back({TokenWhere(si, ti), "empty surface"});
      if (t.IsRoot()) {
        ++roots;
      } else if (t.head >= s.tokens.size() || t.head == ti) {
        out.push_back({TokenWhere(si, ti), "invalid head"});
        heads_ok = false;
      }
    }
    if (roots == 0) out.push_back({where, "no root"});
    if (roots > 1) out.push_back({where, "multiple roots"});
    if (heads_ok) {
      for (std::size_t ti = 0; ti < s.tokens.size(); ++ti) {
        std::size_t cur = ti;
        std::size_t steps = 0;
        while (cur != kRoot && steps <= s.tokens.size()) {
          cur = s.tokens[cur].head;
          ++steps;
        }
        if (cur != kRoot) {
          out.push_back({TokenWhere(si, ti), "cyclic head graph"});
          break;
        }
      }
    }
    for (const Span &c : s.chunks) {
      if (c.sentence != si || !doc.IsValidSpan(c)) {
        out.push_back({where, "chunk " + FormatSpan(c) + " out of range"});
      }
    }
  }
  for (const CorefChain &chain : doc.chains) {
    const std::string where = "chain " + chain.id;
    if (chain.mentions.size() < 2) {
      out.push_back({where, "fewer than two mentions"});
    }
    for (std::size_t k = 0; k < chain.mentions.size(); ++k) {
      const Span &m = chain.mentions[k];
      if (!doc.IsValidSpan(m)) {
        out.push_back({where, "mention " + FormatSpan(m) + " out of range"});
      }
      if (k > 0 && m < chain.mentions[k - 1]) {
        out.push_back({where, "mentions not sorted"});
      }
    }
  }
  return out;
}

}  // namespace cae
