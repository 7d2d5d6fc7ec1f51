// Small string helpers used by the file-format readers.

#ifndef CAE_TEXT_H_
#define CAE_TEXT_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cae {

// Lower-cases ASCII and the Latin-1 / Latin Extended-A letters used by
// French and English. Other code points pass through unchanged.
std::string CaseFold(std::string_view text);

std::vector<std::string> Split(std::string_view text, char sep);
std::string_view Trim(std::string_view text);
std::string Join(const std::vector<std::string> &parts, std::string_view sep);

// Strict unsigned decimal parse; nullopt on any non-digit.
std::optional<std::size_t> ParseIndex(std::string_view text);
// Strict floating point parse; nullopt unless the whole string is consumed.
std::optional<double> ParseDouble(std::string_view text);

}  // namespace cae

#endif  // CAE_TEXT_H_
