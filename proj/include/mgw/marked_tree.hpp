#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mgw/neveu.hpp"
#include "mgw/rational.hpp"

namespace mgw {

struct TreeRecord {
  NodeWord word;
  std::uint32_t out_degree = 0;
  std::uint8_t mark = 0;
};

// A finite marked ordered tree truncated at a fixed horizon (its height).
// Nodes are stored depth-major; by the restriction convention every node
// at depth == height is a leaf with mark 0. Immutable after construction.
class MarkedTree {
 public:
  MarkedTree() = default;

  std::uint32_t height() const { return height_; }
  std::size_t size() const { return words_.size(); }

  std::span<const NodeWord> words() const { return words_; }
  const NodeWord& word(std::size_t i) const { return words_[i]; }
  std::uint32_t out_degree(std::size_t i) const { return out_degree_[i]; }
  bool marked(std::size_t i) const { return mark_[i] != 0; }
  std::uint8_t mark(std::size_t i) const { return mark_[i]; }
  // Index of the parent node; the root maps to itself.
  std::size_t parent_index(std::size_t i) const { return parent_[i]; }

  // Number of generations present is height+1 even if some are empty.
  // [first, last) index range of generation n.
  std::pair<std::size_t, std::size_t> generation_range(std::uint32_t n) const;
  std::uint64_t generation_size(std::uint32_t n) const;

  // Total marks strictly below depth n (M_n); M_0 = 0.
  std::uint64_t marks_below(std::uint32_t n) const;

  bool operator==(const MarkedTree& other) const {
    return height_ == other.height_ && words_ == other.words_ &&
           out_degree_ == other.out_degree_ && mark_ == other.mark_;
  }

  friend MarkedTree build_tree(std::vector<TreeRecord> records,
                               std::uint32_t height);

 private:
  std::vector<NodeWord> words_;          // depth-major sorted
  std::vector<std::uint32_t> out_degree_;
  std::vector<std::uint8_t> mark_;
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> gen_offsets_;  // size height+2
  std::uint32_t height_ = 0;
};

// Validates prefix closure, contiguity (ui present iff 1 <= i <= k_u) and
// the unmarked-horizon convention, then freezes the tree.
MarkedTree build_tree(std::vector<TreeRecord> records, std::uint32_t height);

// Restriction r_h: keep depth <= h, zero the marks at depth h.
MarkedTree restrict_tree(const MarkedTree& tree, std::uint32_t h);

struct GenerationStats {
  std::uint64_t z_n = 0;  // nodes at depth n
  std::uint64_t m_n = 0;  // marks strictly below depth n
  std::vector<NodeWord> nodes;
};

GenerationStats generation_stats(const MarkedTree& tree, std::uint32_t n);

// Exact per-node masses: zero at the root, then each node splits its mass
// (plus one if marked) evenly among its children while childless nodes
// spread theirs evenly over the whole next generation.
struct MassAssignment {
  std::vector<Rational> masses;  // parallel to tree node order

  const Rational& at(std::size_t node_index) const {
    return masses[node_index];
  }
};

MassAssignment compute_masses(const MarkedTree& tree);

// Sum of masses over generation n; equals marks_below(n) by construction.
Rational generation_mass_sum(const MarkedTree& tree, const MassAssignment& ma,
                             std::uint32_t n);

// One record per line, "word;out_degree;mark", depth-major order.
std::string serialize_tree(const MarkedTree& tree);
// Same with a per-node type suffix: "word;out_degree;mark:type".
std::string serialize_typed_tree(const MarkedTree& tree,
                                 std::span<const std::uint8_t> types);
std::string serialize_masses(const MarkedTree& tree, const MassAssignment& ma);

MarkedTree parse_tree(const std::string& text, std::uint32_t height);
// Accepts optional ":type" suffixes; absent types default to 0.
std::pair<MarkedTree, std::vector<std::uint8_t>> parse_typed_tree(
    const std::string& text, std::uint32_t height);

}  // namespace mgw
