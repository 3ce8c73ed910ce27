#include "mgw/penalty.hpp"

#include <cmath>
#include <limits>

namespace mgw {

std::string PenaltyRegime::name() const {
  switch (kind) {
    case RegimeKind::poly_sub:
      return "poly-sub(ell=" + std::to_string(ell) + ")";
    case RegimeKind::poly_crit:
      return "poly-crit";
    case RegimeKind::poly_super:
      return "poly-super(ell=" + std::to_string(ell) + ")";
    case RegimeKind::expo_positive:
      return "expo-positive(s=" + std::to_string(s) +
             ",ell=" + std::to_string(ell) + ")";
    case RegimeKind::expo_rary:
      return "expo-rary(s=" + std::to_string(s) + ")";
    case RegimeKind::zero_mark:
      return "zero-mark(ell=" + std::to_string(ell) + ")";
    case RegimeKind::zero_mark_rary:
      return "zero-mark-rary";
  }
  return "?";
}

PenaltyRegime parse_regime(const std::string& tag, int ell, double s) {
  if (tag == "poly-sub") return PenaltyRegime::poly_sub(ell);
  if (tag == "poly-crit") return PenaltyRegime::poly_crit();
  if (tag == "poly-super") return PenaltyRegime::poly_super(ell);
  if (tag == "expo-positive") return PenaltyRegime::expo_positive(s, ell);
  if (tag == "expo-rary") return PenaltyRegime::expo_rary(s);
  if (tag == "zero-mark") return PenaltyRegime::zero_mark(ell);
  if (tag == "zero-mark-rary") return PenaltyRegime::zero_mark_rary();
  fail(Errc::usage, "unknown regime tag '" + tag + "'");
}

void require_admissible(const MarkedGWLaw& law, const PenaltyRegime& regime) {
  auto bounds = law.degree_bounds();
  auto crit = law.criticality();
  switch (regime.kind) {
    case RegimeKind::poly_sub:
      if (crit != Criticality::subcritical) {
        fail(Errc::regime_mismatch, "poly-sub needs mu < 1");
      }
      if (regime.ell < 1) fail(Errc::regime_mismatch, "poly-sub needs ell >= 1");
      return;
    case RegimeKind::poly_crit:
      if (crit != Criticality::critical) {
        fail(Errc::regime_mismatch, "poly-crit needs mu = 1");
      }
      return;
    case RegimeKind::poly_super:
      if (crit != Criticality::supercritical) {
        fail(Errc::regime_mismatch, "poly-super needs mu > 1");
      }
      if (regime.ell < 1) {
        fail(Errc::regime_mismatch, "poly-super needs ell >= 1");
      }
      return;
    case RegimeKind::expo_positive:
      if (bounds.r != 0) {
        fail(Errc::regime_mismatch, "expo-positive needs p(0) > 0");
      }
      if (!(regime.s > 0 && regime.s < 1)) {
        fail(Errc::regime_mismatch, "expo-positive needs s in (0,1)");
      }
      return;
    case RegimeKind::expo_rary:
      if (bounds.r == 0) {
        fail(Errc::regime_mismatch, "expo-rary needs p(0) = 0");
      }
      if (!(regime.s > 0 && regime.s < 1)) {
        fail(Errc::regime_mismatch, "expo-rary needs s in (0,1)");
      }
      return;
    case RegimeKind::zero_mark: {
      if (!bounds.r_tilde || *bounds.r_tilde != 0) {
        fail(Errc::regime_mismatch,
             "zero-mark needs an unmarked leaf: p(0)(1-q(0)) > 0");
      }
      if (regime.ell >= 1) {
        bool fertile_unmarked = false;
        for (const auto& atom : law.support()) {
          if (atom.k >= 1 && atom.p * (Rational(1) - atom.q) > 0) {
            fertile_unmarked = true;
            break;
          }
        }
        if (!fertile_unmarked) {
          fail(Errc::regime_mismatch,
               "zero-mark with ell >= 1 needs psi'(kappa_tilde) > 0; no "
               "unmarked node of this law can have children, so the "
               "penalization functional vanishes");
        }
      }
      return;
    }
    case RegimeKind::zero_mark_rary:
      if (!bounds.r_tilde || *bounds.r_tilde < 1) {
        fail(Errc::regime_mismatch,
             "zero-mark-rary needs min{k : p(k)(1-q(k)) > 0} >= 1");
      }
      return;
  }
  fail(Errc::regime_mismatch, "unknown regime");
}

double kappa_solve(const MarkedGWLaw& law, double s, bool zero_mark) {
  law.require_finite("kappa_solve");
  auto coeff = gen_fn_coefficients<double>(law, s, zero_mark);
  if (coeff[0] == 0.0) return 0.0;  // fixed point at the origin
  auto eval = [&](double t) {
    double acc = 0.0;
    for (std::size_t k = coeff.size(); k-- > 0;) acc = acc * t + coeff[k];
    return acc;
  };
  double lo = 0.0, hi = 1.0;
  double mid = 0.5;
  for (int iter = 0; iter < 200; ++iter) {
    mid = 0.5 * (lo + hi);
    double gap = eval(mid) - mid;
    if (std::abs(gap) <= 1e-14) return mid;
    if (gap > 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return mid;
}

double gen_fn_derivative(const MarkedGWLaw& law, double s, double t,
                         bool zero_mark) {
  auto coeff = gen_fn_coefficients<double>(law, s, zero_mark);
  double acc = 0.0;
  for (std::size_t k = coeff.size(); k-- > 1;) {
    acc = acc * t + coeff[k] * static_cast<double>(k);
  }
  return acc;
}

GirsanovWeight girsanov_weight(const PenaltyRegime& regime,
                               const MarkedGWLaw& law,
                               const PenaltyTables& tables, std::uint32_t n,
                               std::uint64_t z_n, std::uint64_t m_n) {
  require_admissible(law, regime);
  GirsanovWeight weight;
  weight.regime = regime;
  weight.n = n;
  const double neg_inf = -std::numeric_limits<double>::infinity();
  // The r-ary and exponential weights are products of n-fold powers, so the
  // log form is the primary representation; `value` may saturate.
  switch (regime.kind) {
    case RegimeKind::poly_sub:
    case RegimeKind::poly_crit: {
      double v = girsanov_weight_value<double>(regime, tables, n, z_n, m_n);
      weight.value = v;
      weight.log_value = std::log(v);
      return weight;
    }
    case RegimeKind::poly_super: {
      double p_val = p_ell_eval<double>(tables.omega, regime.ell, z_n);
      weight.log_value = std::log(p_val) -
                         static_cast<double>(regime.ell) * n *
                             std::log(tables.mu);
      weight.value = std::exp(weight.log_value);
      return weight;
    }
    case RegimeKind::expo_positive: {
      if (regime.ell >= 1 && z_n == 0) {
        weight.value = 0;
        weight.log_value = neg_inf;
        return weight;
      }
      double lg = static_cast<double>(m_n) * std::log(tables.s_param) +
                  (static_cast<double>(z_n) - 1.0) * std::log(tables.kappa);
      if (regime.ell >= 1) {
        lg += std::log(static_cast<double>(z_n)) -
              static_cast<double>(n) * std::log(tables.fprime_kappa);
      }
      weight.log_value = lg;
      weight.value = std::exp(lg);
      return weight;
    }
    case RegimeKind::expo_rary: {
      auto r_pow = detail::checked_pow_u64(tables.r, n);
      if (!r_pow || z_n != *r_pow) {
        weight.value = 0;
        weight.log_value = neg_inf;
        return weight;
      }
      double e_n = static_cast<double>(
          detail::rary_exponent(tables.r, n, *r_pow));
      weight.log_value = static_cast<double>(m_n) * std::log(tables.s_param) -
                         e_n * std::log(tables.alpha_r);
      weight.value = std::exp(weight.log_value);
      return weight;
    }
    case RegimeKind::zero_mark: {
      if (m_n != 0 || (regime.ell >= 1 && z_n == 0)) {
        weight.value = 0;
        weight.log_value = neg_inf;
        return weight;
      }
      double lg = (static_cast<double>(z_n) - 1.0) *
                  std::log(tables.kappa_tilde);
      if (regime.ell >= 1) {
        lg += std::log(static_cast<double>(z_n)) -
              static_cast<double>(n) * std::log(tables.psiprime_kappa_tilde);
      }
      weight.log_value = lg;
      weight.value = std::exp(lg);
      return weight;
    }
    case RegimeKind::zero_mark_rary: {
      auto r_pow = detail::checked_pow_u64(tables.r_tilde, n);
      if (m_n != 0 || !r_pow || z_n != *r_pow) {
        weight.value = 0;
        weight.log_value = neg_inf;
        return weight;
      }
      double e_n = static_cast<double>(
          detail::rary_exponent(tables.r_tilde, n, *r_pow));
      weight.log_value = -e_n * std::log(tables.p0_rt0);
      weight.value = std::exp(weight.log_value);
      return weight;
    }
  }
  fail(Errc::regime_mismatch, "unknown regime");
}

void detail_gamma_checks(int ell, int table_order, std::size_t z) {
  if (ell < 0 || ell > table_order) {
    fail(Errc::order_too_large,
         "gamma law order " + std::to_string(ell) + " exceeds xi table");
  }
  if (z == 0) {
    fail(Errc::usage, "gamma law needs a nonempty generation");
  }
}

namespace {

// ln f_s(e^x) for laws with p(0) = 0, stable for arbitrarily negative x.
double log_step(const std::vector<double>& coeff, std::uint32_t r, double x) {
  double tail = 0.0;
  for (std::size_t k = r + 1; k < coeff.size(); ++k) {
    if (coeff[k] == 0.0) continue;
    tail += coeff[k] / coeff[r] *
            std::exp(static_cast<double>(k - r) * x);
  }
  return std::log(coeff[r]) + static_cast<double>(r) * x + std::log1p(tail);
}

}  // namespace

double b_exponent(const MarkedGWLaw& law, double s, double t) {
  auto bounds = law.degree_bounds();
  if (bounds.r < 2) {
    fail(Errc::regime_mismatch, "b_exponent needs p(0)=p(1)=0 (r >= 2)");
  }
  if (!(s > 0 && s < 1)) {
    fail(Errc::regime_mismatch, "b_exponent needs s in (0,1)");
  }
  if (!(t > 0 && t <= 1)) {
    fail(Errc::usage, "b_exponent needs t in (0,1]");
  }
  auto coeff = gen_fn_coefficients<double>(law, s, false);
  double r = static_cast<double>(bounds.r);
  double x = std::log(t);
  double b = x;
  double scale = r;  // r^{j+1}
  for (int j = 0; j < 200; ++j) {
    double x_next = log_step(coeff, bounds.r, x);
    double increment = (x_next - r * x) / scale;
    b += increment;
    x = x_next;
    scale *= r;
    if (std::abs(increment) < 1e-14) break;
  }
  return b;
}

double log_gen_fn_iterate(const MarkedGWLaw& law, double s, double t, int p) {
  auto bounds = law.degree_bounds();
  if (bounds.r < 1) {
    fail(Errc::regime_mismatch, "log iteration needs p(0) = 0");
  }
  if (!(t > 0 && t <= 1)) {
    fail(Errc::usage, "log iteration needs t in (0,1]");
  }
  auto coeff = gen_fn_coefficients<double>(law, s, false);
  double x = std::log(t);
  for (int j = 0; j < p; ++j) x = log_step(coeff, bounds.r, x);
  return x;
}

}  // namespace mgw
