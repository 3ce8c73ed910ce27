#include "mgw/oracle.hpp"

#include <algorithm>

namespace mgw {

std::string law_fingerprint(const MarkedGWLaw& law) {
  std::string out;
  for (const auto& atom : law.support()) {
    out += std::to_string(atom.k);
    out += ':';
    out += to_fraction_string(atom.p);
    out += '/';
    out += to_fraction_string(atom.q);
    out += ';';
  }
  return out;
}

namespace {

std::string bucket_of(double gap) {
  if (gap == 0.0) return "0";
  if (gap <= 1e-15) return "<=1e-15";
  if (gap <= 1e-12) return "<=1e-12";
  if (gap <= 1e-10) return "<=1e-10";
  return ">1e-10";
}

void require_mode_supported(const PenaltyRegime& regime, OracleMode mode) {
  if (mode != OracleMode::exact) return;
  if (regime.kind == RegimeKind::expo_positive ||
      regime.kind == RegimeKind::zero_mark) {
    fail(Errc::usage,
         "exact mode is unavailable for kappa-based regimes (the fixed "
         "point is irrational); rerun in floating mode");
  }
}

template <class S>
S abs_diff(const S& a, const S& b) {
  S d = a - b;
  if (d < S(0)) d = -d;
  return d;
}

template <class S>
CheckReport change_of_measure_impl(const MarkedGWLaw& law,
                                   const PenaltyRegime& regime,
                                   std::uint32_t depth, double tolerance) {
  auto tables =
      build_penalty_tables<S>(law, regime, std::max(regime.ell, 1));
  auto measure = enumerate_truncated<S>(law, depth);
  CheckReport report;
  report.regime = regime.name();
  report.check = "change-of-measure";
  report.depth = depth;
  report.tolerance = tolerance;
  for (std::size_t i = 0; i < measure.trees.size(); ++i) {
    const MarkedTree& tree = measure.trees[i];
    S weight = girsanov_weight_value<S>(regime, tables, depth,
                                        tree.generation_size(depth),
                                        tree.marks_below(depth));
    S lhs = measure.probs[i] * weight;
    S rhs = tilted_tree_probability<S>(law, regime, tables, tree);
    double gap = ScalarOps<S>::to_double_value(abs_diff(lhs, rhs));
    report.max_gap = std::max(report.max_gap, gap);
    report.residuals_histogram[bucket_of(gap)]++;
    report.cases++;
  }
  report.pass = report.max_gap <= tolerance;
  return report;
}

template <class S>
CheckReport martingale_impl(const MarkedGWLaw& law,
                            const PenaltyRegime& regime, std::uint32_t depth,
                            double tolerance) {
  auto tables =
      build_penalty_tables<S>(law, regime, std::max(regime.ell, 1));
  auto node_law = base_node_law<S>(law);
  const std::uint32_t max_k = law.max_degree();

  CheckReport report;
  report.regime = regime.name();
  report.check = "martingale";
  report.depth = depth;
  report.tolerance = tolerance;

  for (std::uint32_t n = 0; n < depth; ++n) {
    auto measure = enumerate_truncated<S>(law, n);
    for (const auto& tree : measure.trees) {
      std::uint64_t z_n = tree.generation_size(n);
      std::uint64_t m_n = tree.marks_below(n);
      S b_n = girsanov_weight_value<S>(regime, tables, n, z_n, m_n);

      // joint law of (Z_{n+1}, new marks) over the generation's draws
      std::size_t k_states = static_cast<std::size_t>(z_n * max_k) + 1;
      std::size_t e_states = static_cast<std::size_t>(z_n) + 1;
      std::vector<std::vector<S>> dp(k_states,
                                     std::vector<S>(e_states, S(0)));
      dp[0][0] = S(1);
      for (std::uint64_t node = 0; node < z_n; ++node) {
        std::vector<std::vector<S>> next(k_states,
                                         std::vector<S>(e_states, S(0)));
        for (std::size_t sk = 0; sk < k_states; ++sk) {
          for (std::size_t se = 0; se < e_states; ++se) {
            if (dp[sk][se] == S(0)) continue;
            for (const auto& atom : node_law.atoms) {
              next[sk + atom.k][se + atom.eta] += dp[sk][se] * atom.prob;
            }
          }
        }
        dp = std::move(next);
      }

      S expected(0);
      for (std::size_t sk = 0; sk < k_states; ++sk) {
        for (std::size_t se = 0; se < e_states; ++se) {
          if (dp[sk][se] == S(0)) continue;
          expected += dp[sk][se] *
                      girsanov_weight_value<S>(regime, tables, n + 1, sk,
                                               m_n + se);
        }
      }
      double residual =
          ScalarOps<S>::to_double_value(abs_diff(expected, b_n));
      report.max_gap = std::max(report.max_gap, residual);
      report.residuals_histogram[bucket_of(residual)]++;
      report.cases++;
    }
  }
  report.pass = report.max_gap <= tolerance;
  return report;
}

}  // namespace

CheckReport check_change_of_measure(const MarkedGWLaw& law,
                                    const PenaltyRegime& regime,
                                    std::uint32_t depth, OracleMode mode) {
  require_admissible(law, regime);
  require_mode_supported(regime, mode);
  if (mode == OracleMode::exact) {
    return change_of_measure_impl<Rational>(law, regime, depth, 0.0);
  }
  return change_of_measure_impl<Quad>(law, regime, depth, 1e-12);
}

CheckReport check_martingale(const MarkedGWLaw& law,
                             const PenaltyRegime& regime, std::uint32_t depth,
                             OracleMode mode) {
  require_admissible(law, regime);
  require_mode_supported(regime, mode);
  if (mode == OracleMode::exact) {
    return martingale_impl<Rational>(law, regime, depth, 0.0);
  }
  return martingale_impl<Quad>(law, regime, depth, 1e-10);
}

}  // namespace mgw
