#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace mgw {

// Address of a node in an ordered rooted tree: the path of 1-based child
// indices from the root. The empty path is the root. Every prefix of a
// valid address is itself a valid address.
struct NodeWord {
  std::vector<std::uint32_t> path;

  NodeWord() = default;
  explicit NodeWord(std::vector<std::uint32_t> p) : path(std::move(p)) {}

  std::size_t depth() const { return path.size(); }
  bool is_root() const { return path.empty(); }

  NodeWord parent() const {
    NodeWord up;
    up.path.assign(path.begin(), path.end() - 1);
    return up;
  }

  NodeWord child(std::uint32_t j) const {
    NodeWord down(*this);
    down.path.push_back(j);
    return down;
  }

  auto operator<=>(const NodeWord&) const = default;
};

// Depth-major ordering: all of generation n before generation n+1, each
// generation in lexicographic order.
inline bool depth_lex_less(const NodeWord& a, const NodeWord& b) {
  if (a.path.size() != b.path.size()) return a.path.size() < b.path.size();
  return a.path < b.path;
}

std::string format_word(const NodeWord& word);  // "2.1"; root -> ""
NodeWord parse_word(const std::string& text);

}  // namespace mgw
