#include "mgw/marked_tree.hpp"

#include <algorithm>
#include <sstream>

#include "mgw/errors.hpp"

namespace mgw {

namespace {

const char* errc_names[] = {
    "MissingParent",
    "ContiguityViolation",
    "MarkedLeafAtHorizon",
    "HorizonExceedsTree",
    "NotAProbability",
    "Degenerate",
    "NoMarkPossible",
    "UnsupportedInfiniteSupport",
    "OrderTooLarge",
    "NotSubcritical",
    "WrongCriticality",
    "RegimeMismatch",
    "InconsistentMasses",
    "TooManyTypeVectors",
    "NotNormalizable",
    "StateSpaceTooLarge",
    "NodeBudgetExceeded",
    "ParseError",
    "UsageError",
};

}  // namespace

const char* errc_name(Errc code) noexcept {
  return errc_names[static_cast<int>(code)];
}

std::pair<std::size_t, std::size_t> MarkedTree::generation_range(
    std::uint32_t n) const {
  if (n > height_) fail(Errc::horizon_exceeds_tree,
                        "generation " + std::to_string(n) + " beyond height " +
                            std::to_string(height_));
  return {gen_offsets_[n], gen_offsets_[n + 1]};
}

std::uint64_t MarkedTree::generation_size(std::uint32_t n) const {
  auto [first, last] = generation_range(n);
  return last - first;
}

std::uint64_t MarkedTree::marks_below(std::uint32_t n) const {
  if (n > height_) fail(Errc::horizon_exceeds_tree,
                        "generation " + std::to_string(n) + " beyond height " +
                            std::to_string(height_));
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < gen_offsets_[n]; ++i) total += mark_[i];
  return total;
}

MarkedTree build_tree(std::vector<TreeRecord> records, std::uint32_t height) {
  std::sort(records.begin(), records.end(),
            [](const TreeRecord& a, const TreeRecord& b) {
              return depth_lex_less(a.word, b.word);
            });
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].word == records[i - 1].word) {
      fail(Errc::contiguity_violation,
           "duplicate node " + format_word(records[i].word));
    }
  }
  if (records.empty() || !records.front().word.is_root()) {
    fail(Errc::missing_parent, "root record missing");
  }

  MarkedTree tree;
  tree.height_ = height;
  tree.words_.reserve(records.size());
  tree.out_degree_.reserve(records.size());
  tree.mark_.reserve(records.size());
  for (auto& rec : records) {
    if (rec.word.depth() > height) {
      fail(Errc::contiguity_violation,
           "node " + format_word(rec.word) + " deeper than height " +
               std::to_string(height));
    }
    if (rec.mark > 1) fail(Errc::parse, "mark must be 0 or 1");
    if (rec.word.depth() == height) {
      if (rec.mark != 0) {
        fail(Errc::marked_leaf_at_horizon,
             "node " + format_word(rec.word) + " marked at the horizon");
      }
      if (rec.out_degree != 0) {
        fail(Errc::contiguity_violation,
             "node " + format_word(rec.word) +
                 " claims children beyond the horizon");
      }
    }
    tree.words_.push_back(std::move(rec.word));
    tree.out_degree_.push_back(rec.out_degree);
    tree.mark_.push_back(rec.mark);
  }

  // Generation offsets.
  tree.gen_offsets_.assign(height + 2, 0);
  for (const auto& w : tree.words_) {
    tree.gen_offsets_[w.depth() + 1]++;
  }
  for (std::uint32_t n = 0; n <= height; ++n) {
    tree.gen_offsets_[n + 1] += tree.gen_offsets_[n];
  }

  // Parent links plus contiguity both ways: each child index must be within
  // its parent's out-degree, and each node must have exactly out_degree
  // children present.
  std::vector<std::uint32_t> seen_children(tree.size(), 0);
  tree.parent_.assign(tree.size(), 0);
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const NodeWord& w = tree.words_[i];
    if (w.is_root()) continue;
    NodeWord up = w.parent();
    auto depth = up.depth();
    auto first = tree.words_.begin() + tree.gen_offsets_[depth];
    auto last = tree.words_.begin() + tree.gen_offsets_[depth + 1];
    auto it = std::lower_bound(first, last, up);
    if (it == last || !(*it == up)) {
      fail(Errc::missing_parent,
           "node " + format_word(w) + " has no parent record");
    }
    std::size_t pi = static_cast<std::size_t>(it - tree.words_.begin());
    tree.parent_[i] = pi;
    std::uint32_t j = w.path.back();
    if (j > tree.out_degree_[pi]) {
      fail(Errc::contiguity_violation,
           "node " + format_word(w) + " exceeds parent's out-degree");
    }
    seen_children[pi]++;
  }
  for (std::size_t i = 0; i < tree.size(); ++i) {
    if (seen_children[i] != tree.out_degree_[i]) {
      fail(Errc::contiguity_violation,
           "node " + format_word(tree.words_[i]) + " has " +
               std::to_string(seen_children[i]) + " children, expected " +
               std::to_string(tree.out_degree_[i]));
    }
  }
  return tree;
}

MarkedTree restrict_tree(const MarkedTree& tree, std::uint32_t h) {
  if (h > tree.height()) {
    fail(Errc::horizon_exceeds_tree,
         "restriction level " + std::to_string(h) + " beyond height " +
             std::to_string(tree.height()));
  }
  std::vector<TreeRecord> records;
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const NodeWord& w = tree.word(i);
    if (w.depth() > h) break;  // depth-major order
    TreeRecord rec;
    rec.word = w;
    if (w.depth() == h) {
      rec.out_degree = 0;
      rec.mark = 0;
    } else {
      rec.out_degree = tree.out_degree(i);
      rec.mark = tree.mark(i);
    }
    records.push_back(std::move(rec));
  }
  return build_tree(std::move(records), h);
}

GenerationStats generation_stats(const MarkedTree& tree, std::uint32_t n) {
  GenerationStats stats;
  auto [first, last] = tree.generation_range(n);
  stats.z_n = last - first;
  stats.m_n = tree.marks_below(n);
  stats.nodes.reserve(stats.z_n);
  for (std::size_t i = first; i < last; ++i) {
    stats.nodes.push_back(tree.word(i));
  }
  return stats;
}

MassAssignment compute_masses(const MarkedTree& tree) {
  MassAssignment ma;
  ma.masses.assign(tree.size(), Rational(0));
  for (std::uint32_t n = 0; n < tree.height(); ++n) {
    auto [first, last] = tree.generation_range(n);
    auto [cfirst, clast] = tree.generation_range(n + 1);
    if (cfirst == clast) break;  // extinct: nothing left to receive mass
    Rational z_next(static_cast<long long>(clast - cfirst));
    Rational leak(0);
    for (std::size_t i = first; i < last; ++i) {
      if (tree.out_degree(i) == 0) {
        leak += ma.masses[i] + Rational(tree.mark(i));
      }
    }
    Rational shared = leak / z_next;
    for (std::size_t c = cfirst; c < clast; ++c) {
      std::size_t u = tree.parent_index(c);
      ma.masses[c] = (ma.masses[u] + Rational(tree.mark(u))) /
                         Rational(tree.out_degree(u)) +
                     shared;
    }
  }
  return ma;
}

Rational generation_mass_sum(const MarkedTree& tree, const MassAssignment& ma,
                             std::uint32_t n) {
  auto [first, last] = tree.generation_range(n);
  Rational total(0);
  for (std::size_t i = first; i < last; ++i) total += ma.masses[i];
  return total;
}

std::string serialize_tree(const MarkedTree& tree) {
  std::string out;
  for (std::size_t i = 0; i < tree.size(); ++i) {
    out += format_word(tree.word(i));
    out += ';';
    out += std::to_string(tree.out_degree(i));
    out += ';';
    out += std::to_string(static_cast<int>(tree.mark(i)));
    out += '\n';
  }
  return out;
}

std::string serialize_typed_tree(const MarkedTree& tree,
                                 std::span<const std::uint8_t> types) {
  std::string out;
  for (std::size_t i = 0; i < tree.size(); ++i) {
    out += format_word(tree.word(i));
    out += ';';
    out += std::to_string(tree.out_degree(i));
    out += ';';
    out += std::to_string(static_cast<int>(tree.mark(i)));
    out += ':';
    out += std::to_string(static_cast<int>(types[i]));
    out += '\n';
  }
  return out;
}

std::string serialize_masses(const MarkedTree& tree,
                             const MassAssignment& ma) {
  std::string out;
  for (std::size_t i = 0; i < tree.size(); ++i) {
    out += format_word(tree.word(i));
    out += ';';
    out += to_fraction_string(ma.masses[i]);
    out += '\n';
  }
  return out;
}

namespace {

std::pair<std::vector<TreeRecord>, std::vector<std::uint8_t>> parse_records(
    const std::string& text) {
  std::vector<TreeRecord> records;
  std::vector<std::uint8_t> types;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto semi1 = line.find(';');
    auto semi2 = line.find(';', semi1 == std::string::npos ? semi1
                                                           : semi1 + 1);
    if (semi1 == std::string::npos || semi2 == std::string::npos) {
      fail(Errc::parse, "bad tree record '" + line + "'");
    }
    TreeRecord rec;
    rec.word = parse_word(line.substr(0, semi1));
    rec.out_degree = static_cast<std::uint32_t>(
        std::stoul(line.substr(semi1 + 1, semi2 - semi1 - 1)));
    std::string tail = line.substr(semi2 + 1);
    std::uint8_t type = 0;
    auto colon = tail.find(':');
    if (colon != std::string::npos) {
      type = static_cast<std::uint8_t>(std::stoul(tail.substr(colon + 1)));
      tail = tail.substr(0, colon);
    }
    unsigned long mark = std::stoul(tail);
    if (mark > 1) fail(Errc::parse, "mark must be 0 or 1 in '" + line + "'");
    rec.mark = static_cast<std::uint8_t>(mark);
    records.push_back(std::move(rec));
    types.push_back(type);
  }
  return {std::move(records), std::move(types)};
}

}  // namespace

MarkedTree parse_tree(const std::string& text, std::uint32_t height) {
  auto [records, types] = parse_records(text);
  return build_tree(std::move(records), height);
}

std::pair<MarkedTree, std::vector<std::uint8_t>> parse_typed_tree(
    const std::string& text, std::uint32_t height) {
  auto [records, types] = parse_records(text);
  // build_tree sorts; re-associate types with the sorted order.
  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return depth_lex_less(records[a].word, records[b].word);
  });
  std::vector<std::uint8_t> sorted_types(types.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    sorted_types[i] = types[order[i]];
  }
  return {build_tree(std::move(records), height), std::move(sorted_types)};
}

}  // namespace mgw
