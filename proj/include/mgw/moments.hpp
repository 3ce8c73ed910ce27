#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mgw/law.hpp"
#include "mgw/rational.hpp"
#include "mgw/series.hpp"

namespace mgw {

// xi[l] = l-th moment of the total number of marks on a subcritical tree.
template <class S>
struct BasicXiTable {
  std::vector<S> xi;  // xi[0] = 1
  int max_order() const { return static_cast<int>(xi.size()) - 1; }
};
using XiTable = BasicXiTable<double>;
using ExactXiTable = BasicXiTable<Rational>;

// Supercritical growth constants: E[M_p^l] ~ mu^{lp} omega[l].
template <class S>
struct BasicOmegaTable {
  std::vector<S> omega;    // omega[0] = 1
  std::vector<S> c_tilde;  // recursion numerators, c_tilde[l] for l >= 2
  int max_order() const { return static_cast<int>(omega.size()) - 1; }
};
using OmegaTable = BasicOmegaTable<double>;
using ExactOmegaTable = BasicOmegaTable<Rational>;

// Critical growth constants: E[M_p^l] ~ p^{2l-1} omega_tilde[l].
template <class S>
struct BasicOmegaTildeTable {
  std::vector<S> omega;    // omega[0] = 1
  std::vector<S> d_tilde;  // recursion numerators, d_tilde[l] for l >= 2
  int max_order() const { return static_cast<int>(omega.size()) - 1; }
};
using OmegaTildeTable = BasicOmegaTildeTable<double>;
using ExactOmegaTildeTable = BasicOmegaTildeTable<Rational>;

namespace detail {

template <class S>
void check_order(int ell, int have) {
  if (ell < 0 || ell > have) {
    fail(Errc::order_too_large, "moment order " + std::to_string(ell) +
                                     " exceeds table length " +
                                     std::to_string(have));
  }
}

}  // namespace detail

// Solves the mark-moment recursion
//   (1-mu) xi_l = sum_{j<l} C(l,j) E[M_1 T_j(Z_1)] + E[T_l^{parts<l}(Z_1)]
// where T_j(z) is the composition sum over z parts with xi coefficients.
template <class S>
BasicXiTable<S> xi_table(const MarkedGWLaw& law, int max_ell) {
  law.require_finite("xi_table");
  if (law.criticality() != Criticality::subcritical) {
    fail(Errc::not_subcritical, "xi_table needs mu < 1");
  }
  if (max_ell < 1) fail(Errc::order_too_large, "xi_table needs L >= 1");
  if (max_ell > kHardMaxOrder) {
    fail(Errc::order_too_large, "xi_table order above hard cap");
  }
  S one_minus_mu = S(1) - ScalarOps<S>::from_rational(law.mean_exact());
  BasicXiTable<S> table;
  table.xi.assign(static_cast<std::size_t>(max_ell) + 1, S(0));
  table.xi[0] = S(1);
  for (int ell = 1; ell <= max_ell; ++ell) {
    // Parts are < ell in both sums, so xi[0..ell-1] suffices everywhere.
    std::span<const S> coeff(table.xi.data(),
                             static_cast<std::size_t>(ell));
    S total(0);
    for (const auto& atom : law.support()) {
      auto sums = composition_sums<S>(coeff, atom.k, ell);
      S marked = ScalarOps<S>::from_rational(atom.p * atom.q);
      S any = ScalarOps<S>::from_rational(atom.p);
      for (int j = 0; j < ell; ++j) {
        total += marked * ScalarOps<S>::from_int(static_cast<long long>(
                     binomial_u64(ell, j))) *
                 sums[static_cast<std::size_t>(j)];
      }
      total += any * sums[static_cast<std::size_t>(ell)];
    }
    table.xi[static_cast<std::size_t>(ell)] = total / one_minus_mu;
  }
  return table;
}

// f_l(m, z) of the subcritical martingale:
//   (1/xi_l) sum_{i<=l} C(l,i) m^{l-i} sum_{t_1+..+t_z=i} mult * prod xi_{t_j}
// with f_l(m, 0) = m^l / xi_l and f_0 = 1.
template <class S>
S f_ell_eval(const BasicXiTable<S>& table, int ell, const S& m,
             std::uint64_t z) {
  detail::check_order<S>(ell, table.max_order());
  if (ell == 0) return S(1);
  std::span<const S> coeff(table.xi.data(),
                           static_cast<std::size_t>(ell) + 1);
  auto sums = composition_sums<S>(coeff, z, ell);
  S total(0);
  S m_power(1);  // m^{l-i} built from i = l downwards
  for (int i = ell; i >= 0; --i) {
    total += ScalarOps<S>::from_int(
                 static_cast<long long>(binomial_u64(ell, i))) *
             m_power * sums[static_cast<std::size_t>(i)];
    m_power = m_power * m;
  }
  return total / table.xi[static_cast<std::size_t>(ell)];
}

// E[M_p^l] for l = 0..max_ell and p = 0..p_max via the one-step recursion
// conditioning on (Z_1, M_1). Row p holds the moments at that horizon.
template <class S>
std::vector<std::vector<S>> moment_rows(const MarkedGWLaw& law, int p_max,
                                        int max_ell) {
  law.require_finite("moment_Mp_exact");
  if (max_ell > kHardMaxOrder) {
    fail(Errc::order_too_large, "moment order above hard cap");
  }
  std::vector<std::vector<S>> rows;
  rows.reserve(static_cast<std::size_t>(p_max) + 1);
  std::vector<S> cur(static_cast<std::size_t>(max_ell) + 1, S(0));
  cur[0] = S(1);
  rows.push_back(cur);
  for (int p = 1; p <= p_max; ++p) {
    std::vector<S> next(cur.size(), S(0));
    next[0] = S(1);
    for (const auto& atom : law.support()) {
      auto sums = composition_sums<S>(std::span<const S>(cur), atom.k,
                                      max_ell);
      S marked = ScalarOps<S>::from_rational(atom.p * atom.q);
      S unmarked =
          ScalarOps<S>::from_rational(atom.p * (Rational(1) - atom.q));
      for (int ell = 1; ell <= max_ell; ++ell) {
        S with_mark(0);
        for (int j = 0; j <= ell; ++j) {
          with_mark += ScalarOps<S>::from_int(static_cast<long long>(
                           binomial_u64(ell, j))) *
                       sums[static_cast<std::size_t>(j)];
        }
        next[static_cast<std::size_t>(ell)] +=
            marked * with_mark + unmarked * sums[static_cast<std::size_t>(ell)];
      }
    }
    rows.push_back(next);
    cur = std::move(next);
  }
  return rows;
}

template <class S>
S moment_mp_exact(const MarkedGWLaw& law, int p, int ell) {
  auto rows = moment_rows<S>(law, p, ell);
  return rows.back()[static_cast<std::size_t>(ell)];
}

inline double moment_Mp_exact(const MarkedGWLaw& law, int p, int ell) {
  return moment_mp_exact<double>(law, p, ell);
}

// E[M_{n+p}^l | F_n] evaluated at state (M_n, Z_n):
//   sum_j C(l,j) M_n^{l-j} sum_{t_1+..+t_{Z_n}=j} mult * prod E[M_p^{t_i}]
template <class S>
S conditional_moment(const MarkedGWLaw& law, const S& m_n, std::uint64_t z_n,
                     int p, int ell) {
  auto rows = moment_rows<S>(law, p, ell);
  std::span<const S> moments(rows.back());
  auto sums = composition_sums<S>(moments, z_n, ell);
  S total(0);
  S m_power(1);
  for (int j = ell; j >= 0; --j) {
    total += ScalarOps<S>::from_int(
                 static_cast<long long>(binomial_u64(ell, j))) *
             m_power * sums[static_cast<std::size_t>(j)];
    m_power = m_power * m_n;
  }
  return total;
}

// omega_1 = E[M_1]/(mu-1); for l >= 2,
//   c_tilde_l = E[ sum_{t_1+..+t_{Z_1}=l, t_i<l} mult * prod omega_{t_i} ]
//   omega_l = c_tilde_l / (mu^l - mu).
template <class S>
BasicOmegaTable<S> omega_table(const MarkedGWLaw& law, int max_ell) {
  law.require_finite("omega_table");
  if (law.criticality() != Criticality::supercritical) {
    fail(Errc::wrong_criticality, "omega_table needs mu > 1");
  }
  if (max_ell < 1 || max_ell > kHardMaxOrder) {
    fail(Errc::order_too_large, "omega_table order out of range");
  }
  S mu = ScalarOps<S>::from_rational(law.mean_exact());
  BasicOmegaTable<S> table;
  table.omega.assign(static_cast<std::size_t>(max_ell) + 1, S(0));
  table.c_tilde.assign(static_cast<std::size_t>(max_ell) + 1, S(0));
  table.omega[0] = S(1);
  table.omega[1] =
      ScalarOps<S>::from_rational(law.mean_marks_exact()) / (mu - S(1));
  for (int ell = 2; ell <= max_ell; ++ell) {
    std::span<const S> coeff(table.omega.data(),
                             static_cast<std::size_t>(ell));
    S c_tilde(0);
    for (const auto& atom : law.support()) {
      c_tilde += ScalarOps<S>::from_rational(atom.p) *
                 composition_sum<S>(coeff, atom.k, ell);
    }
    table.c_tilde[static_cast<std::size_t>(ell)] = c_tilde;
    table.omega[static_cast<std::size_t>(ell)] =
        c_tilde / (power_int<S>(mu, ell) - mu);
  }
  return table;
}

// omega_tilde_1 = E[M_1]; for l >= 2,
//   d_tilde_l = E[Z_1(Z_1-1)/2] * sum_{t1+t2=l, t_i>0} C(l,t1) w_t1 w_t2
//   omega_tilde_l = d_tilde_l / (2l - 1).
template <class S>
BasicOmegaTildeTable<S> omega_tilde_table(const MarkedGWLaw& law,
                                          int max_ell) {
  law.require_finite("omega_tilde_table");
  if (law.criticality() != Criticality::critical) {
    fail(Errc::wrong_criticality, "omega_tilde_table needs mu = 1");
  }
  if (max_ell < 1 || max_ell > kHardMaxOrder) {
    fail(Errc::order_too_large, "omega_tilde_table order out of range");
  }
  BasicOmegaTildeTable<S> table;
  table.omega.assign(static_cast<std::size_t>(max_ell) + 1, S(0));
  table.d_tilde.assign(static_cast<std::size_t>(max_ell) + 1, S(0));
  table.omega[0] = S(1);
  table.omega[1] = ScalarOps<S>::from_rational(law.mean_marks_exact());
  S pairs = ScalarOps<S>::from_rational(law.mean_pairs_exact());
  for (int ell = 2; ell <= max_ell; ++ell) {
    S split(0);
    for (int t1 = 1; t1 < ell; ++t1) {
      split += ScalarOps<S>::from_int(
                   static_cast<long long>(binomial_u64(ell, t1))) *
               table.omega[static_cast<std::size_t>(t1)] *
               table.omega[static_cast<std::size_t>(ell - t1)];
    }
    S d_tilde = pairs * split;
    table.d_tilde[static_cast<std::size_t>(ell)] = d_tilde;
    table.omega[static_cast<std::size_t>(ell)] =
        d_tilde / ScalarOps<S>::from_int(2 * ell - 1);
  }
  return table;
}

// P_l(z) = (1/omega_l) sum_{t_1+..+t_z=l} mult * prod omega_{t_i};
// P_l(1) = 1 and P_l(0) = 0 for l >= 1.
template <class S>
S p_ell_eval(const BasicOmegaTable<S>& table, int ell, std::uint64_t z) {
  detail::check_order<S>(ell, table.max_order());
  if (ell == 0) return S(1);
  std::span<const S> coeff(table.omega.data(),
                           static_cast<std::size_t>(ell) + 1);
  return composition_sum<S>(coeff, z, ell) /
         table.omega[static_cast<std::size_t>(ell)];
}

// Hilbert polynomial H_0 = 1, H_l(x) = (1/l!) prod_{j<l} (x - j).
template <class S>
S hilbert_eval_as(int ell, const S& x) {
  if (ell < 0) fail(Errc::order_too_large, "negative Hilbert index");
  S prod(1);
  for (int j = 0; j < ell; ++j) {
    prod = prod * (x - ScalarOps<S>::from_int(j));
  }
  return prod / factorial_of<S>(ell);
}

inline double hilbert_eval(int ell, double x) {
  return hilbert_eval_as<double>(ell, x);
}

}  // namespace mgw
