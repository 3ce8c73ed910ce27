#include "doctest.h"

#include <cmath>
#include <set>

#include "mgw/oracle.hpp"
#include "mgw/sampler.hpp"
#include "test_util.hpp"

using namespace mgw;
using namespace mgw_test;

TEST_CASE("identical seeds reproduce byte-identical output") {
  MarkedGWLaw law = law_A();
  auto xi = xi_table<double>(law, 2);
  for (int variant = 0; variant < 4; ++variant) {
    auto draw = [&](std::uint64_t seed) -> std::string {
      RngStream rng(seed);
      switch (variant) {
        case 0:
          return serialize_tree(sample_mgw(law, 3, rng));
        case 1: {
          auto typed = sample_tau_ell(law, xi, 1, 3, rng);
          return serialize_typed_tree(typed.tree, typed.types);
        }
        case 2: {
          auto typed = sample_spine_tree(law, 0.5, 3, rng);
          return serialize_typed_tree(typed.tree, typed.types);
        }
        default:
          return serialize_tree(sample_degenerate(law_F(), 0.5, 3, rng));
      }
    };
    CHECK(draw(42) == draw(42));
    // a different seed should not reproduce the whole stream
    bool all_same = true;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
      if (draw(seed) != draw(seed + 100)) all_same = false;
    }
    CHECK(!all_same);
  }
}

TEST_CASE("base sampler matches the mean recursion") {
  MarkedGWLaw law = law_A();
  const int n = 20000;
  double sum_z2 = 0;
  for (int i = 0; i < n; ++i) {
    RngStream rng(1000 + i);
    MarkedTree tree = sample_mgw(law, 2, rng);
    sum_z2 += static_cast<double>(tree.generation_size(2));
  }
  double mean = sum_z2 / n;
  // E[Z_2] = mu^2 = 0.64, sd(Z_2) <= 2
  double se = 2.0 / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(mean - 0.64) < 3 * se + 0.02);
}

TEST_CASE("tau_ell: type sums, no unmarked extinction") {
  MarkedGWLaw law = law_A();
  auto xi = xi_table<double>(law, 2);
  for (int ell : {1, 2}) {
    for (int i = 0; i < 2000; ++i) {
      RngStream rng(5000 + i);
      auto typed = sample_tau_ell(law, xi, ell, 3, rng);
      const MarkedTree& tree = typed.tree;
      // per-generation type sums equal ell on every populated level
      for (std::uint32_t g = 0; g <= tree.height(); ++g) {
        auto [first, last] = tree.generation_range(g);
        if (first == last) {
          // the tree died: it must have accumulated at least one mark
          CHECK(tree.marks_below(g) >= 1);
          break;
        }
        int sum = 0;
        for (std::size_t u = first; u < last; ++u) sum += typed.types[u];
        CHECK(sum == ell);
      }
      CHECK(tree.generation_size(0) == 1);
      CHECK(typed.types[0] == ell);
    }
  }
}

TEST_CASE("spine trees keep exactly one special node per generation") {
  MarkedGWLaw law = law_A();
  for (int i = 0; i < 2000; ++i) {
    RngStream rng(9000 + i);
    auto typed = sample_spine_tree(law, 0.5, 3, rng);
    for (std::uint32_t g = 0; g <= 3; ++g) {
      auto [first, last] = typed.tree.generation_range(g);
      CHECK(last > first);  // the spine never dies
      int specials = 0;
      for (std::size_t u = first; u < last; ++u) {
        specials += typed.types[u] == 1;
      }
      CHECK(specials == 1);
    }
  }
}

TEST_CASE("zero-mark spine sampler emits unmarked trees only") {
  MarkedGWLaw law = law_A_halfmark();
  for (int i = 0; i < 500; ++i) {
    RngStream rng(777 + i);
    auto typed = sample_spine_tree(law, std::nullopt, 3, rng);
    CHECK(typed.tree.marks_below(3) == 0);
  }
}

TEST_CASE("degenerate samplers: regular trees") {
  MarkedGWLaw law = law_F();
  int marks = 0, internal = 0;
  for (int i = 0; i < 3000; ++i) {
    RngStream rng(31 + i);
    MarkedTree tree = sample_degenerate(law, 0.5, 3, rng);
    for (std::uint32_t g = 0; g <= 3; ++g) {
      CHECK(tree.generation_size(g) == (1u << g));
    }
    for (std::size_t u = 0; u < tree.size(); ++u) {
      if (tree.word(u).depth() < 3) {
        ++internal;
        marks += tree.marked(u);
      }
    }
  }
  // mark probability s q / (s q + 1 - q) = 1/3
  double freq = static_cast<double>(marks) / internal;
  double se = std::sqrt((1.0 / 3) * (2.0 / 3) / internal);
  CHECK(std::abs(freq - 1.0 / 3) < 4 * se);

  // s = 0: the unmarked r_tilde-ary tree with probability one
  RngStream rng_a(1), rng_b(999);
  CHECK(serialize_tree(sample_degenerate(law, 0.0, 3, rng_a)) ==
        serialize_tree(sample_degenerate(law, 0.0, 3, rng_b)));
}

TEST_CASE("importance-sampling identity: mean weight is one") {
  MarkedGWLaw law = law_A();
  auto regime = PenaltyRegime::poly_sub(1);
  auto tables = build_penalty_tables<double>(law, regime);
  const int n = 20000;
  double sum = 0, sum_sq = 0;
  for (int i = 0; i < n; ++i) {
    RngStream rng(40000 + i);
    MarkedTree tree = sample_mgw(law, 2, rng);
    double w = girsanov_weight(regime, law, tables, 2,
                               tree.generation_size(2), tree.marks_below(2))
                   .value;
    sum += w;
    sum_sq += w * w;
  }
  double mean = sum / n;
  double var = sum_sq / n - mean * mean;
  double se = std::sqrt(var / n);
  CHECK(std::abs(mean - 1.0) < 3 * se);
}

TEST_CASE("node budget guard trips on supercritical runaways") {
  // law F has no leaves, so a depth-15 tree holds at least 2^15 nodes
  MarkedGWLaw law = law_F();
  RngStream rng(5);
  CHECK_THROWS_AS(sample_mgw(law, 15, rng, 2000), Error);
}

TEST_CASE("total-mark sampler agrees with xi_1 in expectation") {
  MarkedGWLaw law = law_A();
  const int n = 20000;
  double sum = 0;
  for (int i = 0; i < n; ++i) {
    RngStream rng(123456 + i);
    sum += static_cast<double>(sample_total_marks(law, rng));
  }
  double mean = sum / n;
  // E[M_inf] = xi_1 = 2, Var = xi_2 - xi_1^2 = 30
  double se = std::sqrt(30.0 / n);
  CHECK(std::abs(mean - 2.0) < 4 * se);
}
