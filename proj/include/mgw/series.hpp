#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "mgw/errors.hpp"
#include "mgw/rational.hpp"

namespace mgw {

// Default cap on moment/derivative orders; the tables stay tiny there.
inline constexpr int kDefaultMaxOrder = 6;
// Hard ceiling so the partition coefficients stay inside 64 bits.
inline constexpr int kHardMaxOrder = 12;

// ---- truncated polynomial helpers (coefficient vectors, degree = index) ----

template <class S>
std::vector<S> truncated_product(std::span<const S> a, std::span<const S> b,
                                 int max_deg) {
  std::vector<S> out(static_cast<std::size_t>(max_deg) + 1, S(0));
  for (std::size_t i = 0; i < a.size() && i <= static_cast<std::size_t>(max_deg);
       ++i) {
    if (a[i] == S(0)) continue;
    std::size_t jmax = std::min(b.size(),
                                static_cast<std::size_t>(max_deg) + 1 - i);
    for (std::size_t j = 0; j < jmax; ++j) {
      out[i + j] += a[i] * b[j];
    }
  }
  return out;
}

template <class S>
std::vector<S> truncated_power(std::vector<S> base, std::uint64_t z,
                               int max_deg) {
  std::vector<S> result(static_cast<std::size_t>(max_deg) + 1, S(0));
  result[0] = S(1);
  base.resize(static_cast<std::size_t>(max_deg) + 1, S(0));
  while (z > 0) {
    if (z & 1) {
      result = truncated_product<S>(result, base, max_deg);
    }
    z >>= 1;
    if (z) base = truncated_product<S>(base, base, max_deg);
  }
  return result;
}

// Composition sum over ordered tuples:
//   sum_{t_1+...+t_z = i} multinomial(i; t_1..t_z) * prod_j c[t_j]
// evaluated as i! * [x^i] (sum_j c_j x^j / j!)^z. Parts are restricted to
// the indices present in `c`; truncate `c` before calling to impose an
// upper bound on individual parts.
template <class S>
S composition_sum(std::span<const S> c, std::uint64_t z, int i) {
  if (z == 0) return i == 0 ? S(1) : S(0);
  std::vector<S> egf(c.begin(), c.end());
  egf.resize(static_cast<std::size_t>(i) + 1, S(0));
  S fact(1);
  for (int j = 2; j <= i; ++j) {
    fact = fact * S(j);
    egf[j] = egf[j] / fact;
  }
  auto powed = truncated_power<S>(std::move(egf), z, i);
  return powed[static_cast<std::size_t>(i)] * factorial_of<S>(i);
}

// All composition sums for i = 0..max_i at once (single series power).
template <class S>
std::vector<S> composition_sums(std::span<const S> c, std::uint64_t z,
                                int max_i) {
  std::vector<S> out(static_cast<std::size_t>(max_i) + 1, S(0));
  if (z == 0) {
    out[0] = S(1);
    return out;
  }
  std::vector<S> egf(c.begin(), c.end());
  egf.resize(static_cast<std::size_t>(max_i) + 1, S(0));
  S fact(1);
  for (int j = 2; j <= max_i; ++j) {
    fact = fact * S(j);
    egf[j] = egf[j] / fact;
  }
  auto powed = truncated_power<S>(std::move(egf), z, max_i);
  fact = S(1);
  for (int i = 0; i <= max_i; ++i) {
    if (i >= 2) fact = fact * S(i);
    out[i] = powed[static_cast<std::size_t>(i)] * fact;
  }
  return out;
}

// ---- Faa di Bruno ----

// One partition of ell with part multiplicities mult[j] (part j repeated
// mult[j] times), blocks = sum of multiplicities, and the classical
// coefficient ell! / (prod_j mult[j]! * (j!)^mult[j]).
struct FaaDiBrunoTerm {
  int blocks = 0;
  std::array<std::uint8_t, kHardMaxOrder + 1> mult{};
  std::int64_t coeff = 0;
};

// Partition table for one derivative order.
const std::vector<FaaDiBrunoTerm>& faa_di_bruno_terms(int ell);

// Derivative jets: jet[i] = g^{(i)}(t) for i = 0..order.
template <class S>
using Jet = std::vector<S>;

// Jet of f∘g at t from the jet of f at g(t) and the jet of g at t.
template <class S>
Jet<S> compose_jets(const Jet<S>& f_at_g, const Jet<S>& g) {
  int order = static_cast<int>(g.size()) - 1;
  if (order > kHardMaxOrder) fail(Errc::order_too_large, "jet order too large");
  Jet<S> out(static_cast<std::size_t>(order) + 1, S(0));
  out[0] = f_at_g[0];
  for (int ell = 1; ell <= order; ++ell) {
    S total(0);
    for (const auto& term : faa_di_bruno_terms(ell)) {
      S prod = ScalarOps<S>::from_int(term.coeff) * f_at_g[term.blocks];
      for (int j = 1; j <= ell; ++j) {
        for (int rep = 0; rep < term.mult[j]; ++rep) {
          prod = prod * g[static_cast<std::size_t>(j)];
        }
      }
      total += prod;
    }
    out[static_cast<std::size_t>(ell)] = total;
  }
  return out;
}

}  // namespace mgw
