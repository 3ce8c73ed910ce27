#include "doctest.h"

#include <cmath>

#include "mgw/asymptotics.hpp"
#include "mgw/penalty.hpp"
#include "test_util.hpp"

using namespace mgw;
using namespace mgw_test;

TEST_CASE("supercritical moment growth stabilizes at omega") {
  auto report = check_moment_growth(law_C(), 1, 25);
  CHECK(report.verdict == Verdict::stabilized);
  const auto& last = report.points.back();
  CHECK(last.predicted == doctest::Approx(5.0 / 3.0));
  CHECK(std::abs(last.value - last.predicted) / last.predicted < 0.02);
}

TEST_CASE("critical moment growth: exact first moment, ell = 2 ratio") {
  // E[M_p]/p = E[M_1] for every p when mu = 1
  auto first = check_moment_growth(law_D(), 1, 50);
  for (const auto& point : first.points) {
    CHECK(point.value == doctest::Approx(0.5).epsilon(1e-12));
  }
  CHECK(first.verdict == Verdict::stabilized);

  auto second = check_moment_growth(law_D(), 2, 500);
  CHECK(second.verdict == Verdict::stabilized);
  const auto& last = second.points.back();
  CHECK(last.predicted == doctest::Approx(1.0 / 12.0));
  CHECK(std::abs(last.value - last.predicted) / last.predicted < 0.05);
}

TEST_CASE("negative control: wrong criticality never stabilizes") {
  auto report =
      check_moment_growth(law_C(), 1, 40, GrowthTarget::critical);
  CHECK(report.verdict != Verdict::stabilized);
  CHECK(std::isnan(report.points.back().predicted));

  auto reversed =
      check_moment_growth(law_D(), 1, 40, GrowthTarget::supercritical);
  CHECK(reversed.verdict != Verdict::stabilized);

  CHECK_THROWS_AS(check_moment_growth(law_A(), 1, 10), Error);
}

TEST_CASE("generating-function growth stabilizes for p(0) > 0") {
  auto report = check_gf_asymptotics(law_B(), 0.5, 0.9, 1, 60);
  CHECK(report.verdict == Verdict::stabilized);
  // trailing relative changes below 1e-3
  const auto& pts = report.points;
  for (std::size_t i = pts.size() - 5; i < pts.size(); ++i) {
    CHECK(std::abs(pts[i].value - pts[i - 1].value) /
              std::abs(pts[i].value) <
          1e-3);
  }
}

TEST_CASE("r-ary log-gap reaches the closed-form limit by p = 6") {
  auto report = check_gf_asymptotics(law_F(), 0.5, 0.9, 0, 6);
  const auto& last = report.points.back();
  double expected = -std::log(0.45);  // -ln(alpha_r)/(r-1), r = 2
  CHECK(last.predicted == doctest::Approx(expected));
  CHECK(std::abs(last.value - last.predicted) < 1e-3);
}

TEST_CASE("r-ary derivative orders stay finite at the default horizon") {
  for (int ell : {1, 2}) {
    auto report = check_gf_asymptotics(law_F(), 0.5, 0.9, ell, 6);
    for (const auto& point : report.points) {
      CHECK(std::isfinite(point.value));
    }
  }
}

TEST_CASE("r = 1 growth tracks f_s'(0)") {
  MarkedGWLaw law = MarkedGWLaw::from_json_text(
      R"({"p": {"1": "1/2", "2": "1/2"}, "q": {"1": "1/2", "2": "1/2"}})");
  CHECK(law.degree_bounds().r == 1);
  auto report = check_gf_asymptotics(law, 0.5, 0.7, 0, 40);
  CHECK(report.verdict == Verdict::stabilized);
}
