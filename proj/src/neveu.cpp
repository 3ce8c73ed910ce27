#include "mgw/neveu.hpp"

#include <cctype>

#include "mgw/errors.hpp"

namespace mgw {

std::string format_word(const NodeWord& word) {
  std::string out;
  for (std::size_t i = 0; i < word.path.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(word.path[i]);
  }
  return out;
}

NodeWord parse_word(const std::string& text) {
  NodeWord word;
  if (text.empty()) return word;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t dot = text.find('.', pos);
    std::string part = text.substr(pos, dot == std::string::npos
                                            ? std::string::npos
                                            : dot - pos);
    if (part.empty()) fail(Errc::parse, "empty component in word '" + text + "'");
    for (char c : part) {
      if (!std::isdigit(static_cast<unsigned char>(c))) {
        fail(Errc::parse, "bad node word '" + text + "'");
      }
    }
    unsigned long v = std::stoul(part);
    if (v == 0) fail(Errc::parse, "child indices are 1-based in '" + text + "'");
    word.path.push_back(static_cast<std::uint32_t>(v));
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  return word;
}

}  // namespace mgw
