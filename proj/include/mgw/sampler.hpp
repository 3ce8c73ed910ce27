#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "mgw/law.hpp"
#include "mgw/marked_tree.hpp"
#include "mgw/moments.hpp"
#include "mgw/penalty.hpp"

namespace mgw {

inline constexpr std::uint64_t kNodeBudget = 10'000'000;

// Seeded deterministic stream: the same seed always yields the same draws,
// byte for byte, independent of platform or threading.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64() {
    ++counter_;
    return engine_();
  }

  double uniform01() {
    // 53-bit mantissa in [0,1); bit-stable across standard libraries.
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  std::size_t uniform_index(std::size_t n) {
    return static_cast<std::size_t>(next_u64() % n);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  std::mt19937_64 engine_;
};

// Marked tree plus a per-node type: the multitype weight for tau_ell trees
// (summing to ell per generation), or the spine flag for special trees.
struct TypedMarkedTree {
  MarkedTree tree;
  std::vector<std::uint8_t> types;  // parallel to tree node order
};

// Forward sampling of the base marked Galton-Watson law, truncated at
// `depth` (marks at the horizon are zero by the restriction convention).
MarkedTree sample_mgw(const MarkedGWLaw& law, std::uint32_t depth,
                      RngStream& rng, std::uint64_t budget = kNodeBudget);

// Total number of marks on a full (untruncated) subcritical tree.
std::uint64_t sample_total_marks(const MarkedGWLaw& law, RngStream& rng,
                                 std::uint64_t budget = kNodeBudget);

// The weighted multitype tree of order ell: generation-synchronous
// construction drawing each node's (k, eta) from the typed law given its
// mass, then the next generation's types from the gamma law.
TypedMarkedTree sample_tau_ell(const MarkedGWLaw& law, const XiTable& xi,
                               int ell, std::uint32_t depth, RngStream& rng,
                               std::uint64_t budget = kNodeBudget,
                               std::uint64_t type_cap = kDefaultTypeVectorCap);

// The special (spine) tree: normal nodes reproduce by p_{s,0}, the one
// special node per generation by p_{s,1}, and the next special node is
// chosen uniformly in the new generation. With s = nullopt the zero-mark
// variant runs on (p_{0,1}, p_{0,2}). Types mark the spine (1 = special).
TypedMarkedTree sample_spine_tree(const MarkedGWLaw& law,
                                  std::optional<double> s, std::uint32_t depth,
                                  RngStream& rng,
                                  std::uint64_t budget = kNodeBudget);

// Tilted MGW with reproduction-marking law p_{s,0} (all nodes normal).
MarkedTree sample_leafless_mgw(const MarkedGWLaw& law, double s,
                               std::uint32_t depth, RngStream& rng,
                               std::uint64_t budget = kNodeBudget);

// Tilted MGW with reproduction-marking law p_{0,1} (zero-mark conditioning).
MarkedTree sample_zero_mark_mgw(const MarkedGWLaw& law, std::uint32_t depth,
                                RngStream& rng,
                                std::uint64_t budget = kNodeBudget);

// Degenerate limits: for s in (0,1) and p(0) = 0, the regular r-ary tree
// with i.i.d. Bernoulli(s q(r)/(s q(r)+1-q(r))) marks; for s = 0, the
// unmarked regular r_tilde-ary tree.
MarkedTree sample_degenerate(const MarkedGWLaw& law, double s,
                             std::uint32_t depth, RngStream& rng,
                             std::uint64_t budget = kNodeBudget);

}  // namespace mgw
