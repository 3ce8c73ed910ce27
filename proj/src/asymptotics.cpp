#include "mgw/asymptotics.hpp"

#include <cmath>
#include <limits>

#include "mgw/penalty.hpp"

namespace mgw {

const char* verdict_name(Verdict v) noexcept {
  switch (v) {
    case Verdict::stabilized: return "stabilized";
    case Verdict::diverged: return "diverged";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

Verdict judge(const std::vector<ConvergencePoint>& points, double threshold,
              int window) {
  if (static_cast<int>(points.size()) < window + 1) {
    return Verdict::inconclusive;
  }
  std::size_t first = points.size() - static_cast<std::size_t>(window);
  double max_change = 0.0;
  bool finite = true;
  for (std::size_t i = first; i < points.size(); ++i) {
    double prev = points[i - 1].value;
    double cur = points[i].value;
    if (!std::isfinite(cur) || !std::isfinite(prev)) {
      finite = false;
      break;
    }
    double scale = std::max(std::abs(cur), 1e-300);
    max_change = std::max(max_change, std::abs(cur - prev) / scale);
  }
  if (!finite) return Verdict::diverged;
  if (max_change < threshold) return Verdict::stabilized;
  double head = std::abs(points[first - 1].value);
  double tail = std::abs(points.back().value);
  return tail >= head ? Verdict::diverged : Verdict::inconclusive;
}

ConvergenceReport check_moment_growth(const MarkedGWLaw& law, int ell,
                                      int p_max, GrowthTarget target) {
  law.require_finite("check_moment_growth");
  auto crit = law.criticality();
  if (target == GrowthTarget::auto_detect) {
    switch (crit) {
      case Criticality::supercritical:
        target = GrowthTarget::supercritical;
        break;
      case Criticality::critical:
        target = GrowthTarget::critical;
        break;
      case Criticality::subcritical:
        fail(Errc::wrong_criticality,
             "moment growth tracks mu >= 1 laws; subcritical moments "
             "converge to xi_ell instead");
    }
  }
  bool matched =
      (target == GrowthTarget::supercritical &&
       crit == Criticality::supercritical) ||
      (target == GrowthTarget::critical && crit == Criticality::critical);

  if (p_max <= 0) {
    p_max = target == GrowthTarget::supercritical ? kDefaultPMaxSupercritical
                                                  : kDefaultPMaxCritical;
  }

  double predicted = std::numeric_limits<double>::quiet_NaN();
  if (matched) {
    if (target == GrowthTarget::supercritical) {
      auto table = omega_table<double>(law, ell);
      predicted = table.omega[static_cast<std::size_t>(ell)];
    } else {
      auto table = omega_tilde_table<double>(law, ell);
      predicted = table.omega[static_cast<std::size_t>(ell)];
    }
  }

  auto rows = moment_rows<double>(law, p_max, ell);
  double mu = law.mean();
  ConvergenceReport report;
  report.description =
      std::string("moment growth, target ") +
      (target == GrowthTarget::supercritical ? "supercritical" : "critical") +
      ", ell=" + std::to_string(ell);
  for (int p = 1; p <= p_max; ++p) {
    ConvergencePoint point;
    point.p = p;
    double raw = rows[static_cast<std::size_t>(p)][static_cast<std::size_t>(ell)];
    if (target == GrowthTarget::supercritical) {
      point.value = raw / std::pow(mu, static_cast<double>(ell) * p);
    } else {
      point.value = raw / std::pow(static_cast<double>(p), 2.0 * ell - 1.0);
    }
    point.predicted = predicted;
    point.ratio = point.value / predicted;
    report.points.push_back(point);
  }
  report.verdict = judge(report.points, report.threshold, report.window);
  return report;
}

ConvergenceReport check_gf_asymptotics(const MarkedGWLaw& law, double s,
                                       double t, int ell, int p_max) {
  law.require_finite("check_gf_asymptotics");
  if (ell > kDefaultMaxOrder) {
    fail(Errc::order_too_large, "gf asymptotics order above default max");
  }
  auto bounds = law.degree_bounds();
  ConvergenceReport report;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  if (bounds.r == 0) {
    // p(0) > 0: geometric decay at rate f_s'(kappa). For ell = 0 it is the
    // distance to the fixed point that decays, not the iterate itself.
    if (p_max <= 0) p_max = kDefaultPMaxExponential;
    double kappa = kappa_solve(law, s, false);
    double rate = gen_fn_derivative(law, s, kappa, false);
    report.description = "gf growth, rate f_s'(kappa)=" + std::to_string(rate);
    for (int p = 1; p <= p_max; ++p) {
      ConvergencePoint point;
      point.p = p;
      double jet = gen_fn_eval(law, s, t, p, ell);
      if (ell == 0) jet -= kappa;
      point.value = jet / std::pow(rate, p);
      point.predicted = nan;
      point.ratio = nan;
      report.points.push_back(point);
    }
  } else if (bounds.r == 1) {
    if (p_max <= 0) p_max = kDefaultPMaxExponential;
    double rate = gen_fn_derivative(law, s, 0.0, false);
    report.description = "gf growth, rate f_s'(0)=" + std::to_string(rate);
    for (int p = 1; p <= p_max; ++p) {
      ConvergencePoint point;
      point.p = p;
      double jet = gen_fn_eval(law, s, t, p, ell);
      point.value = jet / std::pow(rate, p);
      point.predicted = nan;
      point.ratio = nan;
      report.points.push_back(point);
    }
  } else {
    // r >= 2: compare logs; the raw values decay doubly exponentially
    if (p_max <= 0) p_max = kDefaultPMaxRary;
    double b = b_exponent(law, s, t);
    double log_r = std::log(static_cast<double>(bounds.r));
    double predicted = nan;
    if (ell == 0) {
      Rational q_r = law.q_of(bounds.r);
      double alpha_r = to_double(law.p_of(bounds.r) *
                                 (Rational(s) * q_r + (Rational(1) - q_r)));
      predicted = -std::log(alpha_r) / (bounds.r - 1.0);
    }
    report.description = "gf log-gap, b(t)=" + std::to_string(b);
    for (int p = 1; p <= p_max; ++p) {
      ConvergencePoint point;
      point.p = p;
      double log_jet;
      if (ell == 0) {
        log_jet = log_gen_fn_iterate(law, s, t, p);
      } else {
        double jet = gen_fn_eval(law, s, t, p, ell);
        log_jet = std::log(jet);
      }
      point.value = log_jet - std::pow(static_cast<double>(bounds.r), p) * b -
                    static_cast<double>(p) * ell * log_r;
      point.predicted = predicted;
      point.ratio = point.value / predicted;
      report.points.push_back(point);
    }
  }
  report.verdict = judge(report.points, report.threshold, report.window);
  return report;
}

}  // namespace mgw
