#include "cae/store.h"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

namespace cae {
namespace {

namespace fs = std::filesystem;

constexpr const char *kSourceFile = "source.conllu";
constexpr const char *kSidecarFile = "sidecar.json";
constexpr const char *kLockFile = ".lock";

std::string ReadWholeFile(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteAll(int fd, std::string_view content, const fs::path &path) {
  const char *p = content.data();
  std::size_t left = content.size();
  while (left > 0) {
    ssize_t n = ::write(fd, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw IoError("write " + path.string() + ": " + std::strerror(errno));
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
}

bool ValidDocumentId(std::string_view id) {
  if (id.empty() || id == "." || id == "..") return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
  });
}

void SyncDirectory(const fs::path &dir) {
  int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

}  // namespace

void AtomicWrite(const fs::path &path, std::string_view content) {
  static std::atomic<unsigned long> counter{0};
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) throw IoError("create " + tmp.string() + ": " + std::strerror(errno));
  try {
    WriteAll(fd, content, tmp);
    if (::fsync(fd) != 0) throw IoError("fsync " + tmp.string() + ": " + std::strerror(errno));
  } catch (...) {
    ::close(fd);
    ::unlink(tmp.c_str());
    throw;
  }
  ::close(fd);
  if (::rename(tmp.c_str(), path.c_str()) != 0) {
    int err = errno;
    ::unlink(tmp.c_str());
    throw IoError("rename " + tmp.string() + ": " + std::strerror(err));
  }
  SyncDirectory(path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

// ---------------------------------------------------------------------------

DocumentLock DocumentLock::Acquire(const fs::path &lock_file) {
  int fd = ::open(lock_file.c_str(), O_WRONLY | O_CREAT | O_EXCL, 0644);
  if (fd < 0) {
    if (errno == EEXIST) {
      throw ConflictError("document is locked by another writer (" + lock_file.string() + ")");
    }
    throw IoError("lock " + lock_file.string() + ": " + std::strerror(errno));
  }
  std::string pid = std::to_string(::getpid()) + "\n";
  (void)!::write(fd, pid.data(), pid.size());
  ::close(fd);
  return DocumentLock(lock_file);
}

DocumentLock::DocumentLock(DocumentLock &&other) noexcept : path_(std::move(other.path_)) {
  other.path_.clear();
}

DocumentLock &DocumentLock::operator=(DocumentLock &&other) noexcept {
  if (this != &other) {
    if (!path_.empty()) ::unlink(path_.c_str());
    path_ = std::move(other.path_);
    other.path_.clear();
  }
  return *this;
}

DocumentLock::~DocumentLock() {
  if (!path_.empty()) ::unlink(path_.c_str());
}

// ---------------------------------------------------------------------------

CorpusStore::CorpusStore(fs::path root) : root_(std::move(root)) {}

fs::path CorpusStore::DocumentDir(std::string_view id) const {
  if (!ValidDocumentId(id)) throw NotFoundError("invalid document id '" + std::string(id) + "'");
  return root_ / std::string(id);
}

fs::path CorpusStore::AnnotationPath(std::string_view id, AnnotationKind kind) const {
  return DocumentDir(id) / (std::string(KindName(kind)) + ".ann");
}

std::vector<std::string> CorpusStore::ListDocuments() const {
  std::vector<std::string> ids;
  std::error_code ec;
  if (!fs::is_directory(root_, ec)) return ids;
  for (const fs::directory_entry &e : fs::directory_iterator(root_, ec)) {
    if (e.is_directory() && fs::exists(e.path() / kSourceFile)) {
      ids.push_back(e.path().filename().string());
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

bool CorpusStore::HasDocument(std::string_view id) const {
  return ValidDocumentId(id) && fs::exists(root_ / std::string(id) / kSourceFile);
}

Document CorpusStore::LoadDocument(std::string_view id) const {
  if (!HasDocument(id)) throw NotFoundError("no document '" + std::string(id) + "'");
  fs::path dir = DocumentDir(id);
  Document doc = ParseConllu(ReadWholeFile(dir / kSourceFile));
  if (doc.id.empty()) doc.id = std::string(id);
  if (fs::exists(dir / kSidecarFile)) {
    SidecarData sidecar = ParseSidecar(ReadWholeFile(dir / kSidecarFile));
    if (sidecar.document_id.empty()) sidecar.document_id = doc.id;
    doc = AttachSidecar(std::move(doc), sidecar);
  }
  return doc;
}

void CorpusStore::SaveDocument(const Document &doc) {
  fs::path dir = DocumentDir(doc.id);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("create " + dir.string() + ": " + ec.message());
  AtomicWrite(dir / kSourceFile, SerializeConllu(doc));
  AtomicWrite(dir / kSidecarFile, SerializeSidecar(ExtractSidecar(doc)));
}

DocumentLock CorpusStore::Lock(std::string_view id) const {
  fs::path dir = DocumentDir(id);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("create " + dir.string() + ": " + ec.message());
  return DocumentLock::Acquire(dir / kLockFile);
}

SaveReceipt CorpusStore::SaveAnnotations(std::string_view id, const AnnotationSet &set,
                                         AnnotationKind kind) {
  DocumentLock lock = Lock(id);
  return SaveAnnotations(id, set, kind, lock);
}

SaveReceipt CorpusStore::SaveAnnotations(std::string_view id, const AnnotationSet &set,
                                         AnnotationKind kind, const DocumentLock &) {
  if (set.document_id != id) {
    throw IntegrityError("annotations are for document '" + set.document_id +
                         "', not '" + std::string(id) + "'");
  }
  CheckIntegrity(set);
  if (!(Canonicalize(set) == set)) {
    throw IntegrityError("annotations are not in canonical order");
  }
  if (HasDocument(id)) {
    std::vector<std::string> problems = CheckAgainstDocument(set, LoadDocument(id));
    if (!problems.empty()) throw IntegrityError(problems.front());
  }
  std::string content = WriteAnnotations(set);

  SaveReceipt receipt;
  receipt.file = AnnotationPath(id, kind);
  receipt.count = set.annotations.size();
  if (fs::exists(receipt.file)) {
    fs::path backup = receipt.file;
    backup += ".bak";
    AtomicWrite(backup, ReadWholeFile(receipt.file));
    receipt.backup = backup;
  }
  AtomicWrite(receipt.file, content);
  return receipt;
}

AnnotationSet CorpusStore::LoadAnnotations(std::string_view id, AnnotationKind kind) const {
  fs::path path = AnnotationPath(id, kind);
  if (!fs::exists(path)) {
    throw NotFoundError("no " + std::string(KindName(kind)) + " annotations for '" +
                        std::string(id) + "'");
  }
  AnnotationSet set;
  try {
    set = ReadAnnotations(ReadWholeFile(path));
  } catch (const ParseError &e) {
    throw ParseError(0, path.string() + ": " + e.what());
  }
  if (set.document_id != id) {
    throw IntegrityError(path.string() + ": header names document '" + set.document_id + "'");
  }
  if (HasDocument(id)) {
    std::vector<std::string> problems = CheckAgainstDocument(set, LoadDocument(id));
    if (!problems.empty()) throw IntegrityError(path.string() + ": " + problems.front());
  }
  return set;
}

}  // namespace cae
