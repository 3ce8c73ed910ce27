#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mgw/marked_tree.hpp"
#include "mgw/rational.hpp"
#include "mgw/series.hpp"

namespace mgw {

enum class Criticality { subcritical, critical, supercritical };

const char* criticality_name(Criticality c) noexcept;

struct DegreeBounds {
  std::uint32_t r = 0;                   // min{k : p(k) > 0}
  std::optional<std::uint32_t> r_tilde;  // min{k : p(k)(1-q(k)) > 0}
};

// Offspring distribution p plus mark function q, stored exactly. A node
// with k children carries a mark with probability q(k); the joint
// reproduction-marking law is p0(k,1) = p(k)q(k), p0(k,0) = p(k)(1-q(k)).
class MarkedGWLaw {
 public:
  struct Atom {
    std::uint32_t k = 0;
    Rational p;
    Rational q;
  };

  // Checks that p is a probability with p(0)+p(1) < 1 and that a mark is
  // possible (some p(k)q(k) > 0). Atoms with p(k) = 0 are dropped.
  static MarkedGWLaw validate(std::vector<Atom> atoms,
                              bool infinite_support = false);

  // {"p": {"0": "3/5", "2": "2/5"}, "q": {"0": "0", "2": "1"}}; values are
  // strings ("a/b" or decimals) or integral JSON numbers.
  static MarkedGWLaw from_json_text(const std::string& text);
  static MarkedGWLaw load_file(const std::string& path);

  const std::vector<Atom>& support() const { return atoms_; }
  std::uint32_t max_degree() const { return atoms_.back().k; }
  bool infinite_support() const { return infinite_support_; }
  // Throws UnsupportedInfiniteSupport; exact operations call this first.
  void require_finite(const char* op) const;

  const Rational& mean_exact() const { return mean_; }
  double mean() const { return to_double(mean_); }
  Criticality criticality() const;
  DegreeBounds degree_bounds() const { return bounds_; }

  Rational p_of(std::uint32_t k) const;
  Rational q_of(std::uint32_t k) const;
  Rational p0_exact(std::uint32_t k, int eta) const;
  double p0(std::uint32_t k, int eta) const {
    return to_double(p0_exact(k, eta));
  }

  // E[M_1] = sum_k p(k) q(k)
  const Rational& mean_marks_exact() const { return mean_marks_; }
  double mean_marks() const { return to_double(mean_marks_); }
  // E[Z_1 (Z_1 - 1) / 2]
  Rational mean_pairs_exact() const;

 private:
  std::vector<Atom> atoms_;  // sorted by k, p > 0
  Rational mean_;
  Rational mean_marks_;
  DegreeBounds bounds_;
  bool infinite_support_ = false;
};

// p0(k, eta): probability that a node has k children and mark eta.
double reproduction_mark_prob(const MarkedGWLaw& law, std::uint32_t k,
                              int eta);

// Probability of observing exactly this truncated tree under the MGW law:
// the product of p0(k_u, eta_u) over nodes of depth <= height-1.
template <class S>
S truncated_tree_probability_as(const MarkedGWLaw& law,
                                const MarkedTree& tree) {
  S prob(1);
  if (tree.height() == 0) return prob;
  auto [first, last] = tree.generation_range(tree.height() - 1);
  for (std::size_t i = 0; i < last; ++i) {
    prob = prob *
           ScalarOps<S>::from_rational(law.p0_exact(
               tree.out_degree(i), tree.mark(i)));
  }
  return prob;
}

double truncated_tree_probability(const MarkedGWLaw& law,
                                  const MarkedTree& tree);

// Coefficients of the one-step generating function: f_s(t) = sum_k c_k t^k
// with c_k = p(k)(s q(k) + 1 - q(k)), or psi(t) = sum_k p(k)(1-q(k)) t^k
// in zero-mark mode.
template <class S>
std::vector<S> gen_fn_coefficients(const MarkedGWLaw& law, const S& s,
                                   bool zero_mark) {
  std::vector<S> coeff(law.max_degree() + 1, S(0));
  for (const auto& atom : law.support()) {
    S q = ScalarOps<S>::from_rational(atom.q);
    S p = ScalarOps<S>::from_rational(atom.p);
    coeff[atom.k] = zero_mark ? p * (S(1) - q) : p * (s * q + (S(1) - q));
  }
  return coeff;
}

// Jet of the polynomial sum_k c_k x^k at x: derivatives 0..order.
template <class S>
Jet<S> polynomial_jet(std::span<const S> coeff, const S& x, int order) {
  Jet<S> jet(static_cast<std::size_t>(order) + 1, S(0));
  for (int d = 0; d <= order; ++d) {
    // falling-factorial weights k(k-1)...(k-d+1) c_k x^{k-d}, Horner style
    S acc(0);
    for (std::size_t k = coeff.size(); k-- > static_cast<std::size_t>(d);) {
      S weight = coeff[k];
      for (int j = 0; j < d; ++j) {
        weight = weight * ScalarOps<S>::from_int(static_cast<long long>(k) - j);
      }
      acc = acc * x + weight;
    }
    jet[static_cast<std::size_t>(d)] = acc;
  }
  return jet;
}

// (f_s^p)^{(order)}(t), iterating derivative jets with Faa di Bruno at each
// composition step; zero_mark evaluates psi^p instead.
double gen_fn_eval(const MarkedGWLaw& law, double s, double t, int iterate_p,
                   int order, bool zero_mark = false,
                   int max_order = kDefaultMaxOrder);

// Full jet of f_s^p at t (orders 0..order).
Jet<double> gen_fn_jet(const MarkedGWLaw& law, double s, double t,
                       int iterate_p, int order, bool zero_mark = false,
                       int max_order = kDefaultMaxOrder);

}  // namespace mgw
