// Reading dependency-parsed documents: the 10-column interchange format,
// the JSON sidecar carrying chunks / coreference / scene sections, and
// structural validation.

#ifndef CAE_INGESTION_H_
#define CAE_INGESTION_H_

#include <istream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cae/model.h"

namespace cae {

// Parses a CoNLL-U stream. Multiword-token ranges are skipped but kept in
// doc.meta ("sent.<i>.mwt.<k>") so SerializeConllu can restore them; empty
// nodes are dropped. "# text =" and "# sent_id =" become "sent.<i>.text"
// and "sent.<i>.sent_id"; "# newdoc id =" sets the document id.
//
// Throws ParseError (with the 1-based line number) on a wrong column count,
// a non-numeric or out-of-range head, non-consecutive ids, or a cyclic
// head graph.
Document ParseConllu(std::istream &in);
Document ParseConllu(std::string_view text);

std::string SerializeConllu(const Document &doc);

struct SectionRange {
  SceneSection label = SceneSection::kUnknown;
  std::size_t first_sentence = 0;
  std::size_t last_sentence = 0;  // inclusive

  bool operator==(const SectionRange &) const = default;
};

struct SidecarData {
  std::string document_id;
  std::string language;  // empty: leave the document's language alone
  std::vector<CorefChain> chains;
  std::vector<Span> chunks;
  std::vector<SectionRange> sections;
  std::map<std::string, std::string> meta;

  bool operator==(const SidecarData &) const = default;
};

// Throws ParseError on malformed JSON or missing fields.
SidecarData ParseSidecar(std::string_view json_text);
std::string SerializeSidecar(const SidecarData &sidecar);
// Extracts the sidecar view of a document (inverse of AttachSidecar).
SidecarData ExtractSidecar(const Document &doc);

// Merges chains, chunks and section labels into `doc`. Sentences outside
// every section range become Unknown. Chain mentions are sorted.
// Throws IntegrityError on an id mismatch, a span out of range, a chain
// with fewer than two mentions, or overlapping / unsorted section ranges.
Document AttachSidecar(Document doc, const SidecarData &sidecar);

struct Violation {
  std::string where;    // e.g. "sentence 0 token 3", "chain c1"
  std::string message;

  bool operator==(const Violation &) const = default;
};

// Checks every structural invariant of the text model. Never throws.
std::vector<Violation> Validate(const Document &doc);

}  // namespace cae

#endif  // CAE_INGESTION_H_
