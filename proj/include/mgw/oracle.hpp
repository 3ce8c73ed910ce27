#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mgw/law.hpp"
#include "mgw/marked_tree.hpp"
#include "mgw/penalty.hpp"

namespace mgw {

inline constexpr std::uint64_t kStateSpaceCap = 10'000'000;

enum class OracleMode { exact, floating };

// Every truncated marked tree of the given depth with its probability.
template <class S>
struct EnumeratedMeasureT {
  std::vector<MarkedTree> trees;
  std::vector<S> probs;
  std::uint32_t depth = 0;
  std::string law_fingerprint;
};
using ExactMeasure = EnumeratedMeasureT<Rational>;
using QuadMeasure = EnumeratedMeasureT<Quad>;

// Canonical one-line description of a law ("k:p/q;..."), used to tie an
// enumerated measure back to the law it was built from.
std::string law_fingerprint(const MarkedGWLaw& law);

template <class S>
EnumeratedMeasureT<S> enumerate_truncated(const MarkedGWLaw& law,
                                          std::uint32_t depth,
                                          std::uint64_t cap = kStateSpaceCap);

template <class S, class F>
S exact_expectation(const EnumeratedMeasureT<S>& measure, F&& functional) {
  S total(0);
  for (std::size_t i = 0; i < measure.trees.size(); ++i) {
    total += measure.probs[i] * functional(measure.trees[i]);
  }
  return total;
}

// Probability the tilted construction produces exactly this truncated tree:
// products over the tilted node laws plus the per-generation gamma or
// spine-choice factors. Only regimes with an explicit construction qualify
// (poly-sub, the exponential families, the zero-mark families).
template <class S>
S tilted_tree_probability(const MarkedGWLaw& law, const PenaltyRegime& regime,
                          const PenaltyTablesT<S>& tables,
                          const MarkedTree& tree);

struct CheckReport {
  std::string regime;
  std::string check;  // "change-of-measure" or "martingale"
  std::uint32_t depth = 0;
  std::uint64_t cases = 0;
  double max_gap = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::map<std::string, std::uint64_t> residuals_histogram;
};

// For every enumerated depth-n tree, |P(t) B_n(t) - Q(t)| where Q is the
// tilted construction's own probability.
CheckReport check_change_of_measure(const MarkedGWLaw& law,
                                    const PenaltyRegime& regime,
                                    std::uint32_t depth, OracleMode mode);

// For every depth-n history (n < depth), |E[B_{n+1} | history] - B_n| with
// the one-step expectation summed over all reproduction outcomes.
CheckReport check_martingale(const MarkedGWLaw& law,
                             const PenaltyRegime& regime, std::uint32_t depth,
                             OracleMode mode);

}  // namespace mgw

#include "mgw/oracle_inl.hpp"
