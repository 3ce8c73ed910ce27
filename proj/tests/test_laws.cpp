#include "doctest.h"

#include <cmath>

#include "mgw/law.hpp"
#include "mgw/penalty.hpp"
#include "test_util.hpp"

using namespace mgw;
using namespace mgw_test;

TEST_CASE("law A validates with the expected constants") {
  MarkedGWLaw law = law_A();
  CHECK(law.mean_exact() == Rational(4, 5));
  CHECK(law.criticality() == Criticality::subcritical);
  CHECK(law.mean_marks_exact() == Rational(2, 5));
  auto bounds = law.degree_bounds();
  CHECK(bounds.r == 0);
  REQUIRE(bounds.r_tilde.has_value());
  CHECK(*bounds.r_tilde == 0);
}

TEST_CASE("degenerate and unmarkable laws are rejected") {
  CHECK_THROWS_AS(MarkedGWLaw::from_json_text(
                      R"({"p": {"0": "1/2", "1": "1/2"}, "q": {"0": "1"}})"),
                  Error);
  try {
    MarkedGWLaw::from_json_text(
        R"({"p": {"0": "1/2", "1": "1/2"}, "q": {"0": "1"}})");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::degenerate);
  }
  try {
    MarkedGWLaw::from_json_text(
        R"({"p": {"0": "3/5", "2": "2/5"}, "q": {"0": "0", "2": "0"}})");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::no_mark_possible);
  }
  try {
    MarkedGWLaw::from_json_text(R"({"p": {"0": "3/5", "2": "3/5"}})");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::not_a_probability);
  }
}

TEST_CASE("reproduction-marking probabilities") {
  MarkedGWLaw law = law_A();
  CHECK(reproduction_mark_prob(law, 2, 1) == doctest::Approx(0.4));
  CHECK(reproduction_mark_prob(law, 0, 1) == 0.0);
  double total = 0;
  for (std::uint32_t k = 0; k <= law.max_degree(); ++k) {
    total += reproduction_mark_prob(law, k, 0) +
             reproduction_mark_prob(law, k, 1);
  }
  CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("truncated tree probabilities") {
  MarkedGWLaw law = law_A();
  MarkedTree root_only = build_tree({{NodeWord{}, 0, 0}}, 0);
  CHECK(truncated_tree_probability(law, root_only) == 1.0);

  std::vector<TreeRecord> records = {
      {parse_word(""), 2, 1},
      {parse_word("1"), 0, 0},
      {parse_word("2"), 0, 0},
  };
  MarkedTree pair_tree = build_tree(std::move(records), 1);
  CHECK(truncated_tree_probability(law, pair_tree) == doctest::Approx(0.4));
}

TEST_CASE("one-step generating function values") {
  MarkedGWLaw law = law_B();
  // identity iterate
  CHECK(gen_fn_eval(law, 0.5, 0.37, 0, 0) == doctest::Approx(0.37));
  // f_s(t) = (s/2)(1 + t^2)
  CHECK(gen_fn_eval(law, 0.5, 0.0, 1, 0) == doctest::Approx(0.25));
  CHECK(gen_fn_eval(law, 0.5, 0.8, 1, 0) == doctest::Approx(0.25 * 1.64));
  CHECK_THROWS_AS(gen_fn_eval(law, 0.5, 0.5, 1, 9), Error);
}

TEST_CASE("higher derivatives of iterates match finite differences") {
  MarkedGWLaw law = law_B();
  const double s = 0.5;
  const int p = 3;
  auto value = [&](double t) { return gen_fn_eval(law, s, t, p, 0); };
  for (double t : {0.2, 0.5, 0.8}) {
    double exact = gen_fn_eval(law, s, t, p, 2);
    double approx = central_difference(value, t, 2, 1e-4);
    CHECK(std::abs(exact - approx) / std::abs(exact) < 1e-4);
  }
}

TEST_CASE("first derivative of the iterate is the chain-rule product") {
  MarkedGWLaw law = law_A();
  const double s = 0.5;
  for (double t : {0.1, 0.5, 0.9}) {
    for (int p : {1, 2, 5}) {
      double jet = gen_fn_eval(law, s, t, p, 1);
      double product = 1.0;
      double x = t;
      for (int j = 0; j < p; ++j) {
        product *= gen_fn_derivative(law, s, x, false);
        x = gen_fn_eval(law, s, x, 1, 0);
      }
      CHECK(jet == doctest::Approx(product).epsilon(1e-12));
    }
  }
}

TEST_CASE("f_s is increasing and convex with f_s(1) < 1") {
  for (const auto& law : {law_A(), law_B(), law_F()}) {
    for (double s : {0.2, 0.5, 0.8}) {
      double prev = -1, prev_d = -1;
      for (int i = 0; i <= 20; ++i) {
        double t = i / 20.0;
        double v = gen_fn_eval(law, s, t, 1, 0);
        double d = gen_fn_derivative(law, s, t, false);
        CHECK(v >= prev);
        CHECK(d >= prev_d);
        prev = v;
        prev_d = d;
      }
      CHECK(gen_fn_eval(law, s, 1.0, 1, 0) < 1.0);
    }
  }
}

TEST_CASE("psi <= f_s <= f_1 pointwise, monotone in s") {
  MarkedGWLaw law = law_A_halfmark();
  for (int i = 0; i <= 10; ++i) {
    double t = i / 10.0;
    double psi = gen_fn_eval(law, 0.0, t, 1, 0, /*zero_mark=*/true);
    double prev = psi;
    for (double s : {0.25, 0.5, 0.75, 1.0}) {
      double v = gen_fn_eval(law, s, t, 1, 0);
      CHECK(v >= prev - 1e-15);
      prev = v;
    }
  }
}

TEST_CASE("infinite-support flag blocks exact operations") {
  MarkedGWLaw law = MarkedGWLaw::from_json_text(
      R"({"p": {"0": "3/5", "2": "2/5"}, "q": {"2": "1"},
          "infinite_support": true})");
  CHECK_THROWS_AS(gen_fn_eval(law, 0.5, 0.5, 1, 0), Error);
  try {
    gen_fn_eval(law, 0.5, 0.5, 1, 0);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unsupported_infinite_support);
  }
}

TEST_CASE("law JSON accepts integers and decimal strings") {
  MarkedGWLaw law = MarkedGWLaw::from_json_text(
      R"({"p": {"0": "0.6", "2": "0.4"}, "q": {"0": 0, "2": 1}})");
  CHECK(law.mean_exact() == Rational(4, 5));
  CHECK(law.p0_exact(2, 1) == Rational(2, 5));
}
