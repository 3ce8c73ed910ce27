#pragma once

// Template bodies for penalty.hpp; include that header instead.

#include <type_traits>

namespace mgw {

namespace detail {

// r^n if it fits in 64 bits; nullopt means "larger than any generation".
inline std::optional<std::uint64_t> checked_pow_u64(std::uint64_t base,
                                                    std::uint32_t exp) {
  std::uint64_t result = 1;
  for (std::uint32_t i = 0; i < exp; ++i) {
    if (base != 0 && result > (std::uint64_t(1) << 62) / base) {
      return std::nullopt;
    }
    result *= base;
  }
  return result;
}

// (r^n - 1)/(r - 1): number of ancestors of generation n in an r-ary tree.
inline std::uint64_t rary_exponent(std::uint32_t r, std::uint32_t n,
                                   std::uint64_t r_pow_n) {
  if (r == 1) return n;
  return (r_pow_n - 1) / (r - 1);
}

}  // namespace detail

template <class S>
PenaltyTablesT<S> build_penalty_tables(const MarkedGWLaw& law,
                                       const PenaltyRegime& regime,
                                       int max_ell) {
  constexpr bool kExactScalar = std::is_same_v<S, Rational>;
  require_admissible(law, regime);
  PenaltyTablesT<S> tables;
  tables.mu = ScalarOps<S>::from_rational(law.mean_exact());
  tables.s_param = ScalarOps<S>::from_double(regime.s);
  auto bounds = law.degree_bounds();
  tables.r = bounds.r;
  tables.r_tilde = bounds.r_tilde.value_or(0);
  int ell = std::max(regime.ell, 1);
  if (ell > max_ell) max_ell = ell;
  switch (regime.kind) {
    case RegimeKind::poly_sub:
      tables.xi = xi_table<S>(law, max_ell);
      break;
    case RegimeKind::poly_crit:
      break;
    case RegimeKind::poly_super:
      tables.omega = omega_table<S>(law, max_ell);
      break;
    case RegimeKind::expo_positive: {
      if constexpr (kExactScalar) {
        fail(Errc::usage,
             "exact tables are unavailable for kappa-based regimes");
      } else {
        double kappa = kappa_solve(law, regime.s, false);
        tables.kappa = ScalarOps<S>::from_double(kappa);
        tables.fprime_kappa = ScalarOps<S>::from_double(
            gen_fn_derivative(law, regime.s, kappa, false));
      }
      break;
    }
    case RegimeKind::expo_rary: {
      Rational s_exact = Rational(regime.s);  // the double's exact value
      Rational q_r = law.q_of(tables.r);
      tables.alpha_r = ScalarOps<S>::from_rational(
          law.p_of(tables.r) * (s_exact * q_r + (Rational(1) - q_r)));
      break;
    }
    case RegimeKind::zero_mark: {
      if constexpr (kExactScalar) {
        fail(Errc::usage,
             "exact tables are unavailable for kappa-based regimes");
      } else {
        double kt = kappa_solve(law, 0.0, true);
        tables.kappa_tilde = ScalarOps<S>::from_double(kt);
        tables.psiprime_kappa_tilde =
            ScalarOps<S>::from_double(gen_fn_derivative(law, 0.0, kt, true));
      }
      break;
    }
    case RegimeKind::zero_mark_rary:
      tables.p0_rt0 =
          ScalarOps<S>::from_rational(law.p0_exact(tables.r_tilde, 0));
      break;
  }
  return tables;
}

template <class S>
S girsanov_weight_value(const PenaltyRegime& regime,
                        const PenaltyTablesT<S>& tables, std::uint32_t n,
                        std::uint64_t z_n, std::uint64_t m_n) {
  switch (regime.kind) {
    case RegimeKind::poly_sub:
      return f_ell_eval<S>(tables.xi, regime.ell,
                           ScalarOps<S>::from_int(
                               static_cast<long long>(m_n)),
                           z_n);
    case RegimeKind::poly_crit:
      return ScalarOps<S>::from_int(static_cast<long long>(z_n));
    case RegimeKind::poly_super:
      return p_ell_eval<S>(tables.omega, regime.ell, z_n) /
             power_int<S>(tables.mu,
                          static_cast<long long>(regime.ell) * n);
    case RegimeKind::expo_positive: {
      S value = power_int<S>(tables.s_param,
                             static_cast<long long>(m_n)) *
                power_int<S>(tables.kappa,
                             static_cast<long long>(z_n) - 1);
      if (regime.ell >= 1) {
        if (z_n == 0) return S(0);
        value = value * ScalarOps<S>::from_int(static_cast<long long>(z_n)) /
                power_int<S>(tables.fprime_kappa, n);
      }
      return value;
    }
    case RegimeKind::expo_rary: {
      auto r_pow = detail::checked_pow_u64(tables.r, n);
      if (!r_pow || z_n != *r_pow) return S(0);
      std::uint64_t e_n = detail::rary_exponent(tables.r, n, *r_pow);
      return power_int<S>(tables.s_param, static_cast<long long>(m_n)) /
             power_int<S>(tables.alpha_r, static_cast<long long>(e_n));
    }
    case RegimeKind::zero_mark: {
      if (m_n != 0) return S(0);
      if (regime.ell >= 1 && z_n == 0) return S(0);
      S value = power_int<S>(tables.kappa_tilde,
                             static_cast<long long>(z_n) - 1);
      if (regime.ell >= 1) {
        value = value * ScalarOps<S>::from_int(static_cast<long long>(z_n)) /
                power_int<S>(tables.psiprime_kappa_tilde, n);
      }
      return value;
    }
    case RegimeKind::zero_mark_rary: {
      if (m_n != 0) return S(0);
      auto r_pow = detail::checked_pow_u64(tables.r_tilde, n);
      if (!r_pow || z_n != *r_pow) return S(0);
      std::uint64_t e_n = detail::rary_exponent(tables.r_tilde, n, *r_pow);
      return S(1) / power_int<S>(tables.p0_rt0,
                                 static_cast<long long>(e_n));
    }
  }
  fail(Errc::regime_mismatch, "unknown regime");
}

template <class S>
TypeVectorDistribution<S> gamma_type_distribution(const BasicXiTable<S>& xi,
                                                  int ell,
                                                  std::span<const S> masses,
                                                  const S& m_n,
                                                  std::uint64_t cap) {
  detail_gamma_checks(ell, xi.max_order(), masses.size());
  S total_mass(0);
  for (const auto& m : masses) total_mass += m;
  if (!close_enough<S>(total_mass, m_n)) {
    fail(Errc::inconsistent_masses, "generation masses do not sum to M_n");
  }
  std::size_t z = masses.size();

  // C(z + ell - 1, ell) candidate vectors.
  double estimate = 1.0;
  for (int i = 1; i <= ell; ++i) {
    estimate *= static_cast<double>(z + ell - i) / i;
    if (estimate > 2.0 * static_cast<double>(cap)) break;
  }
  if (estimate > static_cast<double>(cap)) {
    fail(Errc::too_many_type_vectors,
         "type-vector count exceeds cap " + std::to_string(cap));
  }

  // node/type weights f_t(m_u, 1) xi_t
  std::vector<std::vector<S>> node_weight(z);
  for (std::size_t u = 0; u < z; ++u) {
    node_weight[u].resize(static_cast<std::size_t>(ell) + 1);
    for (int t = 0; t <= ell; ++t) {
      node_weight[u][static_cast<std::size_t>(t)] =
          f_ell_eval<S>(xi, t, masses[u], 1) *
          xi.xi[static_cast<std::size_t>(t)];
    }
  }
  S denom = xi.xi[static_cast<std::size_t>(ell)] *
            f_ell_eval<S>(xi, ell,
                          m_n,
                          z);

  TypeVectorDistribution<S> dist;
  std::vector<std::uint8_t> current(z, 0);
  std::uint64_t ell_factorial = 1;
  for (int i = 2; i <= ell; ++i) ell_factorial *= static_cast<std::uint64_t>(i);

  auto recurse = [&](auto&& self, std::size_t u, int remaining, S weight,
                     std::uint64_t denom_fact) -> void {
    if (u + 1 == z) {
      current[u] = static_cast<std::uint8_t>(remaining);
      std::uint64_t fact = 1;
      for (int i = 2; i <= remaining; ++i) {
        fact *= static_cast<std::uint64_t>(i);
      }
      S prob = weight * node_weight[u][static_cast<std::size_t>(remaining)] *
               ScalarOps<S>::from_int(static_cast<long long>(
                   ell_factorial / (denom_fact * fact))) /
               denom;
      dist.vectors.push_back(current);
      dist.probs.push_back(prob);
      return;
    }
    for (int t = 0; t <= remaining; ++t) {
      current[u] = static_cast<std::uint8_t>(t);
      std::uint64_t fact = 1;
      for (int i = 2; i <= t; ++i) fact *= static_cast<std::uint64_t>(i);
      self(self, u + 1, remaining - t,
           weight * node_weight[u][static_cast<std::size_t>(t)],
           denom_fact * fact);
    }
  };
  recurse(recurse, 0, ell, S(1), 1);
  return dist;
}

namespace detail_node_law {

template <class S>
void verify_normalized(const TiltedNodeLawT<S>& law, const char* what) {
  S total(0);
  for (const auto& atom : law.atoms) total += atom.prob;
  if (!close_enough<S>(total, S(1))) {
    fail(Errc::not_normalizable, std::string(what) + " does not sum to 1");
  }
}

}  // namespace detail_node_law

template <class S>
TiltedNodeLawT<S> base_node_law(const MarkedGWLaw& law) {
  TiltedNodeLawT<S> out;
  out.kind = NodeLawKind::base;
  for (const auto& atom : law.support()) {
    for (int eta = 0; eta <= 1; ++eta) {
      Rational p = law.p0_exact(atom.k, eta);
      if (p == 0) continue;
      out.atoms.push_back(
          {atom.k, static_cast<std::uint8_t>(eta),
           ScalarOps<S>::from_rational(p)});
    }
  }
  detail_node_law::verify_normalized(out, "base law");
  return out;
}

template <class S>
TiltedNodeLawT<S> typed_node_law(const MarkedGWLaw& law,
                                 const BasicXiTable<S>& xi, int type,
                                 const S& mass) {
  if (type == 0) {
    auto out = base_node_law<S>(law);
    out.kind = NodeLawKind::typed;
    return out;
  }
  TiltedNodeLawT<S> out;
  out.kind = NodeLawKind::typed;
  S denom = f_ell_eval<S>(xi, type, mass, 1);
  for (const auto& atom : law.support()) {
    for (int eta = 0; eta <= 1; ++eta) {
      Rational p = law.p0_exact(atom.k, eta);
      if (p == 0) continue;
      S numer = f_ell_eval<S>(xi, type,
                              mass + ScalarOps<S>::from_int(eta), atom.k);
      S prob = ScalarOps<S>::from_rational(p) * numer / denom;
      if (prob == S(0)) continue;
      out.atoms.push_back({atom.k, static_cast<std::uint8_t>(eta), prob});
    }
  }
  detail_node_law::verify_normalized(out, "typed law");
  return out;
}

template <class S>
TiltedNodeLawT<S> leafless_node_law(const MarkedGWLaw& law, const S& s,
                                    const S& kappa) {
  if (kappa == S(0)) {
    fail(Errc::regime_mismatch, "p_{s,0} needs kappa > 0 (p(0) > 0)");
  }
  TiltedNodeLawT<S> out;
  out.kind = NodeLawKind::leafless;
  for (const auto& atom : law.support()) {
    for (int eta = 0; eta <= 1; ++eta) {
      Rational p = law.p0_exact(atom.k, eta);
      if (p == 0) continue;
      S prob = ScalarOps<S>::from_rational(p) *
               power_int<S>(s, eta) *
               power_int<S>(kappa, static_cast<long long>(atom.k) - 1);
      out.atoms.push_back({atom.k, static_cast<std::uint8_t>(eta), prob});
    }
  }
  detail_node_law::verify_normalized(out, "p_{s,0}");
  return out;
}

template <class S>
TiltedNodeLawT<S> spine_node_law(const MarkedGWLaw& law, const S& s,
                                 const S& kappa, const S& fprime) {
  auto base = leafless_node_law<S>(law, s, kappa);
  TiltedNodeLawT<S> out;
  out.kind = NodeLawKind::spine;
  for (const auto& atom : base.atoms) {
    if (atom.k == 0) continue;  // the size factor kills childless atoms
    out.atoms.push_back(
        {atom.k, atom.eta,
         atom.prob * ScalarOps<S>::from_int(atom.k) / fprime});
  }
  detail_node_law::verify_normalized(out, "p_{s,1}");
  return out;
}

template <class S>
TiltedNodeLawT<S> zero_mark_node_law(const MarkedGWLaw& law,
                                     const S& kappa_tilde) {
  if (kappa_tilde == S(0)) {
    fail(Errc::regime_mismatch, "p_{0,1} needs kappa_tilde > 0");
  }
  TiltedNodeLawT<S> out;
  out.kind = NodeLawKind::zero_mark;
  for (const auto& atom : law.support()) {
    Rational p = law.p0_exact(atom.k, 0);
    if (p == 0) continue;
    out.atoms.push_back(
        {atom.k, 0,
         ScalarOps<S>::from_rational(p) *
             power_int<S>(kappa_tilde, static_cast<long long>(atom.k) - 1)});
  }
  detail_node_law::verify_normalized(out, "p_{0,1}");
  return out;
}

template <class S>
TiltedNodeLawT<S> zero_mark_spine_node_law(const MarkedGWLaw& law,
                                           const S& kappa_tilde,
                                           const S& psiprime) {
  if (psiprime == S(0)) {
    fail(Errc::regime_mismatch,
         "p_{0,2} needs psi'(kappa_tilde) > 0: some unmarked node must be "
         "able to have children");
  }
  auto base = zero_mark_node_law<S>(law, kappa_tilde);
  TiltedNodeLawT<S> out;
  out.kind = NodeLawKind::zero_mark_spine;
  for (const auto& atom : base.atoms) {
    if (atom.k == 0) continue;
    out.atoms.push_back(
        {atom.k, atom.eta,
         atom.prob * ScalarOps<S>::from_int(atom.k) / psiprime});
  }
  detail_node_law::verify_normalized(out, "p_{0,2}");
  return out;
}

template <class S>
TiltedNodeLawT<S> rary_node_law(const MarkedGWLaw& law, const S& s,
                                std::uint32_t r) {
  S q = ScalarOps<S>::from_rational(law.q_of(r));
  S denom = s * q + (S(1) - q);
  S mark_p = s * q / denom;
  TiltedNodeLawT<S> out;
  out.kind = NodeLawKind::rary;
  if (mark_p != S(0)) out.atoms.push_back({r, 1, mark_p});
  if (mark_p != S(1)) out.atoms.push_back({r, 0, S(1) - mark_p});
  detail_node_law::verify_normalized(out, "r-ary mark law");
  return out;
}

}  // namespace mgw
