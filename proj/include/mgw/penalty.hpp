#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mgw/law.hpp"
#include "mgw/moments.hpp"
#include "mgw/rational.hpp"

namespace mgw {

// Which penalization family the weight comes from. poly_* weight trees by
// mark-count moments; expo_* and zero_mark_* by Hilbert-polynomial /
// geometric functionals that favour few marks.
enum class RegimeKind {
  poly_sub,
  poly_crit,
  poly_super,
  expo_positive,
  expo_rary,
  zero_mark,
  zero_mark_rary,
};

struct PenaltyRegime {
  RegimeKind kind = RegimeKind::poly_sub;
  int ell = 1;     // moment order, or 0 vs >=1 for the exponential families
  double s = 0.5;  // mark-weighting parameter of the exponential families

  static PenaltyRegime poly_sub(int ell) { return {RegimeKind::poly_sub, ell, 0}; }
  static PenaltyRegime poly_crit() { return {RegimeKind::poly_crit, 0, 0}; }
  static PenaltyRegime poly_super(int ell) {
    return {RegimeKind::poly_super, ell, 0};
  }
  static PenaltyRegime expo_positive(double s, int ell) {
    return {RegimeKind::expo_positive, ell, s};
  }
  static PenaltyRegime expo_rary(double s) {
    return {RegimeKind::expo_rary, 0, s};
  }
  static PenaltyRegime zero_mark(int ell) {
    return {RegimeKind::zero_mark, ell, 0};
  }
  static PenaltyRegime zero_mark_rary() {
    return {RegimeKind::zero_mark_rary, 0, 0};
  }

  std::string name() const;
};

// CLI tag <-> regime ("poly-sub", "expo-positive", ...).
PenaltyRegime parse_regime(const std::string& tag, int ell, double s);

// Throws RegimeMismatch unless the regime applies to this law.
void require_admissible(const MarkedGWLaw& law, const PenaltyRegime& regime);

// Unique fixed point in [0,1] of f_s (or, in zero-mark mode, the smallest
// positive fixed point of psi) found by bisection to |f(t)-t| <= 1e-14.
// Returns 0 immediately when the relevant k=0 weight vanishes.
double kappa_solve(const MarkedGWLaw& law, double s, bool zero_mark = false);

// d/dt of f_s (resp. psi) evaluated analytically from the support.
double gen_fn_derivative(const MarkedGWLaw& law, double s, double t,
                         bool zero_mark = false);

// Everything a weight evaluation can need, solved once per (law, regime).
template <class S>
struct PenaltyTablesT {
  BasicXiTable<S> xi;
  BasicOmegaTable<S> omega;
  S mu{};
  S s_param{};
  S kappa{};
  S fprime_kappa{};
  S kappa_tilde{};
  S psiprime_kappa_tilde{};
  S alpha_r{};   // p(r)(s q(r) + 1 - q(r))
  S p0_rt0{};    // p0(r_tilde, 0)
  std::uint32_t r = 0;
  std::uint32_t r_tilde = 0;
};
using PenaltyTables = PenaltyTablesT<double>;

// For S = Rational only the kappa-free regimes are buildable (poly_* and
// the two r-ary families); the solver-backed constants are irrational.
template <class S>
PenaltyTablesT<S> build_penalty_tables(const MarkedGWLaw& law,
                                       const PenaltyRegime& regime,
                                       int max_ell = kDefaultMaxOrder);

struct GirsanovWeight {
  PenaltyRegime regime;
  std::uint32_t n = 0;
  double value = 1.0;
  double log_value = 0.0;  // -inf where an indicator kills the weight
};

// The martingale density B_n evaluated at state (n, Z_n, M_n).
GirsanovWeight girsanov_weight(const PenaltyRegime& regime,
                               const MarkedGWLaw& law,
                               const PenaltyTables& tables, std::uint32_t n,
                               std::uint64_t z_n, std::uint64_t m_n);

// Scalar-generic value (used by the exact oracle with S = Rational).
template <class S>
S girsanov_weight_value(const PenaltyRegime& regime,
                        const PenaltyTablesT<S>& tables, std::uint32_t n,
                        std::uint64_t z_n, std::uint64_t m_n);

// ---- type assignment law of the weighted multitype tree ----

template <class S>
struct TypeVectorDistribution {
  std::vector<std::vector<std::uint8_t>> vectors;  // types per node, sum = ell
  std::vector<S> probs;
};

inline constexpr std::uint64_t kDefaultTypeVectorCap = 1'000'000;

// Joint law of the generation's type vector: probability proportional to
// multinomial(ell; t) * prod_u f_{t_u}(m_u, 1) xi_{t_u}, normalised by
// xi_ell f_ell(M_n, Z_n). Masses must sum to M_n.
template <class S>
TypeVectorDistribution<S> gamma_type_distribution(
    const BasicXiTable<S>& xi, int ell, std::span<const S> masses,
    const S& m_n, std::uint64_t cap = kDefaultTypeVectorCap);

// ---- tilted per-node reproduction-marking laws ----

enum class NodeLawKind {
  base,             // p_0
  typed,            // p_i(.|mass)
  leafless,         // p_{s,0}
  spine,            // p_{s,1}
  zero_mark,        // p_{0,1}
  zero_mark_spine,  // p_{0,2}
  rary,             // deterministic r children, Bernoulli mark
};

template <class S>
struct TiltedNodeLawT {
  NodeLawKind kind = NodeLawKind::base;
  struct Atom {
    std::uint32_t k = 0;
    std::uint8_t eta = 0;
    S prob{};
  };
  std::vector<Atom> atoms;  // nonzero probabilities, sorted by (k, eta)

  S prob_of(std::uint32_t k, int eta) const {
    for (const auto& atom : atoms) {
      if (atom.k == k && atom.eta == eta) return atom.prob;
    }
    return S(0);
  }
};
using TiltedNodeLaw = TiltedNodeLawT<double>;

template <class S>
TiltedNodeLawT<S> base_node_law(const MarkedGWLaw& law);

// p_i(k,eta) = p_0(k,eta) f_i(m+eta, k) / f_i(m, 1); i = 0 reduces to p_0.
template <class S>
TiltedNodeLawT<S> typed_node_law(const MarkedGWLaw& law,
                                 const BasicXiTable<S>& xi, int type,
                                 const S& mass);

// p_{s,0}(k,eta) = p_0(k,eta) s^eta kappa^{k-1}; requires kappa > 0.
template <class S>
TiltedNodeLawT<S> leafless_node_law(const MarkedGWLaw& law, const S& s,
                                    const S& kappa);

// p_{s,1} = p_{s,0} * k / f_s'(kappa).
template <class S>
TiltedNodeLawT<S> spine_node_law(const MarkedGWLaw& law, const S& s,
                                 const S& kappa, const S& fprime);

// p_{0,1}(k,eta) = p_0(k,0) kappa_tilde^{k-1} delta_{eta,0}.
template <class S>
TiltedNodeLawT<S> zero_mark_node_law(const MarkedGWLaw& law,
                                     const S& kappa_tilde);

// p_{0,2} = p_{0,1} * k / psi'(kappa_tilde).
template <class S>
TiltedNodeLawT<S> zero_mark_spine_node_law(const MarkedGWLaw& law,
                                           const S& kappa_tilde,
                                           const S& psiprime);

// Deterministic r children, mark Bernoulli(s q(r) / (s q(r) + 1 - q(r))).
template <class S>
TiltedNodeLawT<S> rary_node_law(const MarkedGWLaw& law, const S& s,
                                std::uint32_t r);

// ---- doubly-exponential decay exponent (p(0) = 0, r >= 2) ----

// b(t) = ln t + sum_j r^{-(j+1)} ln(f_s^{j+1}(t) / f_s^j(t)^r), accumulated
// in log space until increments fall below 1e-14. Always negative on (0,1).
double b_exponent(const MarkedGWLaw& law, double s, double t);

// ln f_s^p(t) via the same log-space iteration (safe for any p; needs
// p(0) = 0 so that the leading power is well defined).
double log_gen_fn_iterate(const MarkedGWLaw& law, double s, double t, int p);

void detail_gamma_checks(int ell, int table_order, std::size_t z);

}  // namespace mgw

#include "mgw/penalty_inl.hpp"
