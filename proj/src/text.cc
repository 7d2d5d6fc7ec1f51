#include "cae/text.h"

#include <charconv>
#include <cstdlib>

namespace cae {

std::string CaseFold(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (c < 0x80) {
      out.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c + 32)
                                         : static_cast<char>(c));
      continue;
    }
    if (i + 1 < text.size()) {
      unsigned char d = static_cast<unsigned char>(text[i + 1]);
      // U+00C0..U+00DE except U+00D7 (multiplication sign).
      if (c == 0xC3 && d >= 0x80 && d <= 0x9E && d != 0x97) {
        out.push_back(static_cast<char>(c));
        out.push_back(static_cast<char>(d + 0x20));
        ++i;
        continue;
      }
      // Latin Extended-A pairs upper/lower on even/odd code points
      // (U+0100..U+0137, U+014A..U+0177), e.g. Œ/œ at U+0152/U+0153.
      if (c == 0xC4 || c == 0xC5) {
        unsigned cp = ((c & 0x1Fu) << 6) | (d & 0x3Fu);
        bool paired = (cp >= 0x100 && cp <= 0x137) ||
                      (cp >= 0x14A && cp <= 0x177);
        if (paired && cp % 2 == 0) ++cp;
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        ++i;
        continue;
      }
    }
    out.push_back(static_cast<char>(c));
  }
  return out;
}

std::vector<std::string> Split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t begin = 0;
  while (true) {
    std::size_t pos = text.find(sep, begin);
    if (pos == std::string_view::npos) {
      parts.emplace_back(text.substr(begin));
      break;
    }
    parts.emplace_back(text.substr(begin, pos - begin));
    begin = pos + 1;
  }
  return parts;
}

std::string_view Trim(std::string_view text) {
  const char *ws = " \t\r\n";
  std::size_t b = text.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  std::size_t e = text.find_last_not_of(ws);
  return text.substr(b, e - b + 1);
}

std::string Join(const std::vector<std::string> &parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

std::optional<std::size_t> ParseIndex(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::optional<double> ParseDouble(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::string buf(text);
  char *end = nullptr;
  double value = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size()) return std::nullopt;
  return value;
}

}  // namespace cae
