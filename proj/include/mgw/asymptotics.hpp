#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mgw/law.hpp"
#include "mgw/moments.hpp"

namespace mgw {

enum class Verdict { stabilized, diverged, inconclusive };

const char* verdict_name(Verdict v) noexcept;

struct ConvergencePoint {
  int p = 0;
  double value = 0.0;      // the normalized quantity being tracked
  double predicted = 0.0;  // NaN when no prediction is available
  double ratio = 0.0;      // value / predicted
};

// Convergence is judged on the value sequence itself: stabilized when the
// relative changes over the trailing window drop below the threshold.
struct ConvergenceReport {
  std::vector<ConvergencePoint> points;
  Verdict verdict = Verdict::inconclusive;
  double threshold = 1e-3;
  int window = 5;
  std::string description;
};

Verdict judge(const std::vector<ConvergencePoint>& points, double threshold,
              int window);

enum class GrowthTarget { auto_detect, critical, supercritical };

inline constexpr int kDefaultPMaxSupercritical = 25;
inline constexpr int kDefaultPMaxCritical = 500;
inline constexpr int kDefaultPMaxExponential = 60;
inline constexpr int kDefaultPMaxRary = 6;

// Tracks E[M_p^l]/mu^{lp} against omega_l (supercritical target) or
// E[M_p^l]/p^{2l-1} against omega_tilde_l (critical target). Feeding a law
// whose criticality does not match the target is allowed as a negative
// control: the prediction is then NaN and the verdict cannot stabilize.
ConvergenceReport check_moment_growth(const MarkedGWLaw& law, int ell,
                                      int p_max = 0,
                                      GrowthTarget target =
                                          GrowthTarget::auto_detect);

// Tracks the growth of (f_s^p)^{(l)}(t):
//   p(0) > 0:        value = jet / f_s'(kappa)^p      -> C_l(t)
//   p(0) = 0, r = 1: value = jet / f_s'(0)^p          -> limit function
//   p(0) = 0, r >= 2: value = ln jet - r^p b(t) - p l ln r, predicted
//                     -ln(alpha_r)/(r-1) when l = 0.
ConvergenceReport check_gf_asymptotics(const MarkedGWLaw& law, double s,
                                       double t, int ell, int p_max = 0);

}  // namespace mgw
