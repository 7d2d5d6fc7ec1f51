// Standoff annotation files and the on-disk corpus store:
//
//   <store>/<doc_id>/source.conllu
//   <store>/<doc_id>/sidecar.json
//   <store>/<doc_id>/predicted.ann   (+ predicted.ann.bak)
//   <store>/<doc_id>/gold.ann        (+ gold.ann.bak)

#ifndef CAE_STORE_H_
#define CAE_STORE_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cae/ingestion.h"
#include "cae/model.h"

namespace cae {

inline constexpr std::string_view kAnnotationSchema = "cae-ann/1";

// One tab-separated record per annotation:
//   id role sent:start:end emotion negated cue_link provenance intensity
// with '_' for absent fields, framed by a schema header and an
// "# end <count>" trailer so truncation is detectable.
std::string WriteAnnotations(const AnnotationSet &set);
// Throws ParseError carrying line and byte offset.
AnnotationSet ReadAnnotations(std::string_view text);

// JSON form used in service payloads.
std::string AnnotationsToJson(const AnnotationSet &set);
AnnotationSet AnnotationsFromJson(std::string_view json_text);

enum class AnnotationKind { kPredicted, kGold };
std::string_view KindName(AnnotationKind kind);
std::optional<AnnotationKind> ParseKind(std::string_view name);

// Exclusive writer lock on one document, held as a lock file for the
// lifetime of the object.
class DocumentLock {
 public:
  // Throws ConflictError if the lock is already held.
  static DocumentLock Acquire(const std::filesystem::path &lock_file);

  DocumentLock(DocumentLock &&other) noexcept;
  DocumentLock &operator=(DocumentLock &&other) noexcept;
  DocumentLock(const DocumentLock &) = delete;
  DocumentLock &operator=(const DocumentLock &) = delete;
  ~DocumentLock();

 private:
  explicit DocumentLock(std::filesystem::path path) : path_(std::move(path)) {}
  std::filesystem::path path_;
};

struct SaveReceipt {
  std::filesystem::path file;
  std::optional<std::filesystem::path> backup;
  std::size_t count = 0;
};

class CorpusStore {
 public:
  explicit CorpusStore(std::filesystem::path root);

  const std::filesystem::path &root() const { return root_; }

  // Ids of directories holding a source.conllu, sorted.
  std::vector<std::string> ListDocuments() const;
  bool HasDocument(std::string_view id) const;

  // Source plus sidecar (when present). Throws NotFoundError.
  Document LoadDocument(std::string_view id) const;
  // Writes source.conllu and sidecar.json for `doc`.
  void SaveDocument(const Document &doc);

  // Validates, takes the document lock and atomically replaces
  // <kind>.ann, keeping the previous version as <kind>.ann.bak.
  // Throws IntegrityError (nothing written), ConflictError, IoError.
  SaveReceipt SaveAnnotations(std::string_view id, const AnnotationSet &set,
                              AnnotationKind kind);
  // Same, for a caller already holding the document lock.
  SaveReceipt SaveAnnotations(std::string_view id, const AnnotationSet &set,
                              AnnotationKind kind, const DocumentLock &held);
  // Throws NotFoundError, ParseError, IntegrityError.
  AnnotationSet LoadAnnotations(std::string_view id, AnnotationKind kind) const;

  DocumentLock Lock(std::string_view id) const;

  std::filesystem::path DocumentDir(std::string_view id) const;
  std::filesystem::path AnnotationPath(std::string_view id, AnnotationKind kind) const;

 private:
  std::filesystem::path root_;
};

// Writes `content` to a temporary sibling, fsyncs and renames over `path`.
void AtomicWrite(const std::filesystem::path &path, std::string_view content);

}  // namespace cae

#endif  // CAE_STORE_H_
