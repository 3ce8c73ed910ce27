#include "mgw/series.hpp"

#include <mutex>

namespace mgw {

namespace {

std::int64_t factorial_i64(int n) {
  std::int64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Enumerate partitions of ell as multiplicity vectors.
std::vector<FaaDiBrunoTerm> build_terms(int ell) {
  std::vector<FaaDiBrunoTerm> terms;
  std::array<std::uint8_t, kHardMaxOrder + 1> mult{};
  auto recurse = [&](auto&& self, int remaining, int max_part) -> void {
    if (remaining == 0) {
      FaaDiBrunoTerm term;
      term.mult = mult;
      std::int64_t denom = 1;
      for (int j = 1; j <= ell; ++j) {
        term.blocks += mult[j];
        for (int rep = 0; rep < mult[j]; ++rep) denom *= factorial_i64(j);
        denom *= factorial_i64(mult[j]);
      }
      term.coeff = factorial_i64(ell) / denom;
      terms.push_back(term);
      return;
    }
    for (int part = std::min(remaining, max_part); part >= 1; --part) {
      mult[part]++;
      self(self, remaining - part, part);
      mult[part]--;
    }
  };
  recurse(recurse, ell, ell);
  return terms;
}

}  // namespace

const std::vector<FaaDiBrunoTerm>& faa_di_bruno_terms(int ell) {
  if (ell < 1 || ell > kHardMaxOrder) {
    fail(Errc::order_too_large,
         "derivative order " + std::to_string(ell) + " outside [1, " +
             std::to_string(kHardMaxOrder) + "]");
  }
  static std::vector<std::vector<FaaDiBrunoTerm>> tables;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  if (tables.empty()) {
    tables.resize(kHardMaxOrder + 1);
    for (int l = 1; l <= kHardMaxOrder; ++l) tables[l] = build_terms(l);
  }
  return tables[static_cast<std::size_t>(ell)];
}

}  // namespace mgw
