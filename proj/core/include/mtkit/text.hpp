#ifndef MTKIT_TEXT_HPP
#define MTKIT_TEXT_HPP

#include <string>
#include <string_view>
#include <vector>

namespace mtkit {

std::vector<std::string> split_ws(std::string_view line);
std::vector<std::string_view> split_ws_views(std::string_view line);
std::vector<std::string> split_char(std::string_view line, char sep);
std::string join(const std::vector<std::string>& tokens, std::string_view sep = " ");

// Lowercases ASCII plus the Latin-1 supplement (covers German/French input).
std::string lowercase(std::string_view s);

bool utf8_valid(std::string_view s);

// Subword continuation marker convention: non-final BPE pieces end in "@@".
inline constexpr std::string_view kSubwordMarker = "@@";

inline bool is_subword_continuation(std::string_view surface) {
  return surface.size() > 2 && surface.ends_with(kSubwordMarker);
}

inline std::string_view strip_subword_marker(std::string_view surface) {
  if (is_subword_continuation(surface)) surface.remove_suffix(2);
  return surface;
}

}  // namespace mtkit

#endif  // MTKIT_TEXT_HPP
