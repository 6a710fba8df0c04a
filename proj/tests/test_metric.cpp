#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "migrationlab/metric.hpp"
#include "testutil.hpp"

using namespace migrationlab;

namespace {

MetricSpace two_point(double d01, int D) {
  Eigen::MatrixXd m(2, 2);
  m << 0, d01, d01, 0;
  return MetricSpace({"a", "b"}, m, D);
}

}  // namespace

TEST_CASE("validate_metric accepts degenerate and simple spaces") {
  Eigen::MatrixXd one(1, 1);
  one << 0;
  CHECK(validate_metric(MetricSpace({"a"}, one, 1)).ok());
  CHECK(validate_metric(two_point(1.0, 4)).ok());
}

TEST_CASE("validate_metric reports a triangle violation with its magnitude") {
  Eigen::MatrixXd m(3, 3);
  m << 0, 1, 5,
       1, 0, 1,
       5, 1, 0;
  auto report = validate_metric(MetricSpace({"a", "b", "c"}, m, 1));
  REQUIRE_FALSE(report.ok());
  CHECK(report.worst == doctest::Approx(3.0));  // 5 vs 1+1
}

TEST_CASE("validate_metric flags asymmetry and nonzero diagonal") {
  Eigen::MatrixXd m(2, 2);
  m << 0.5, 1,
       2, 0;
  auto report = validate_metric(MetricSpace({"a", "b"}, m, 1));
  CHECK_FALSE(report.ok());
  CHECK(report.violations.size() >= 2);
}

TEST_CASE("metric space construction rejects structural errors") {
  Eigen::MatrixXd rect(2, 3);
  rect.setZero();
  CHECK_THROWS_AS(MetricSpace({"a", "b"}, rect, 1), std::invalid_argument);
  Eigen::MatrixXd ok(2, 2);
  ok.setZero();
  CHECK_THROWS_AS(MetricSpace({"a", "b"}, ok, 0), std::invalid_argument);
}

TEST_CASE("point bracket multiplies by D") {
  CHECK(bracket(two_point(1.0, 8), 0, 1) == doctest::Approx(8.0));
  CHECK(bracket(two_point(1.0, 8), 1, 1) == 0.0);
  CHECK(bracket(two_point(0.5, 4), 0, 1) == doctest::Approx(2.0));
  CHECK_THROWS_AS(bracket(two_point(1.0, 8), 0, 5), std::invalid_argument);
}

TEST_CASE("multiset bracket averages with multiplicities") {
  // 3-point line v - a - b with d(v,a)=1, d(v,b)=3.
  Eigen::MatrixXd m(3, 3);
  m << 0, 1, 3,
       1, 0, 2,
       3, 2, 0;
  MetricSpace space({"v", "a", "b"}, m, 4);

  RequestMultiset all_at_v;
  all_at_v.add(0, 3);
  CHECK(bracket(space, 0, all_at_v) == 0.0);

  RequestMultiset split;
  split.add(1);
  split.add(2);
  CHECK(bracket(space, 0, split) == doctest::Approx(8.0));  // 4*(1+3)/2

  CHECK_THROWS_AS(bracket(space, 0, RequestMultiset{}), std::invalid_argument);
}

TEST_CASE("multiset bracket equals brute-force expansion on random spaces") {
  std::mt19937_64 rng(7);
  for (int it = 0; it < 50; ++it) {
    MetricSpace space = testutil::random_space(rng, 2 + static_cast<int>(rng() % 6), 5);
    RequestMultiset s = testutil::random_multiset(rng, space);
    PointId v = testutil::random_point(rng, space);
    double sum = 0.0;
    long count = 0;
    for (const auto& [p, c] : s.counts()) {
      for (long i = 0; i < c; ++i) {
        sum += space.d(v, p);
        ++count;
      }
    }
    CHECK(bracket(space, v, s) ==
          doctest::Approx(space.file_size() * sum / count).epsilon(1e-12));
  }
}

TEST_CASE("path bracket sums consecutive pairs") {
  MetricSpace space = two_point(1.0, 4);
  RequestMultiset s;
  s.add(0);
  s.add(1);

  std::vector<PathElement> aba = {PointId{0}, PointId{1}, PointId{0}};
  CHECK(bracket_path(space, aba) == doctest::Approx(2.0 * bracket(space, 0, 1)));

  std::vector<PathElement> asb = {PointId{0}, s, PointId{1}};
  CHECK(bracket_path(space, asb) ==
        doctest::Approx(bracket(space, 0, s) + bracket(space, 1, s)));

  std::vector<PathElement> ss = {s, s};
  CHECK_THROWS_AS(bracket_path(space, ss), std::invalid_argument);
  CHECK(bracket_path(space, ss, true) == doctest::Approx(bracket_multiset_pair(space, s, s)));

  std::vector<PathElement> too_short = {PointId{0}};
  CHECK_THROWS_AS(bracket_path(space, too_short), std::invalid_argument);
}

TEST_CASE("path bracket matches a term-wise hand sum on a 5-point space") {
  std::mt19937_64 rng(13);
  MetricSpace space = testutil::random_space(rng, 5, 8);
  RequestMultiset r1 = testutil::random_multiset(rng, space);
  RequestMultiset r2 = testutil::random_multiset(rng, space);
  PointId dlm = 0, op = 1;
  std::vector<PathElement> path = {dlm, op, r1, op, r2};
  const double expected = bracket(space, dlm, op) + bracket(space, op, r1) +
                          bracket(space, op, r1) + bracket(space, op, r2);
  CHECK(bracket_path(space, path) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("multiset pair bracket") {
  MetricSpace space = two_point(1.0, 4);
  RequestMultiset at_a;
  at_a.add(0, 3);
  CHECK(bracket_multiset_pair(space, at_a, at_a) == 0.0);

  RequestMultiset at_b;
  at_b.add(1);
  CHECK(bracket_multiset_pair(space, at_a, at_b) == doctest::Approx(bracket(space, 0, 1)));

  std::mt19937_64 rng(23);
  for (int it = 0; it < 30; ++it) {
    MetricSpace s = testutil::random_space(rng, 2 + static_cast<int>(rng() % 5), 3);
    RequestMultiset u = testutil::random_multiset(rng, s);
    RequestMultiset w = testutil::random_multiset(rng, s);
    double sum = 0.0;
    for (const auto& [p, cp] : u.counts())
      for (const auto& [q, cq] : w.counts()) sum += double(cp) * double(cq) * s.d(p, q);
    CHECK(bracket_multiset_pair(s, u, w) ==
          doctest::Approx(s.file_size() * sum / (u.total() * w.total())).epsilon(1e-12));
  }
}

TEST_CASE("bracket triangle inequalities hold on random spaces") {
  std::mt19937_64 rng(101);
  for (int it = 0; it < 40; ++it) {
    MetricSpace space = testutil::random_space(rng, 2 + static_cast<int>(rng() % 6), 7);
    RequestMultiset s = testutil::random_multiset(rng, space);
    for (PointId v1 = 0; v1 < space.size(); ++v1) {
      for (PointId v2 = 0; v2 < space.size(); ++v2) {
        for (PointId v3 = 0; v3 < space.size(); ++v3) {
          CHECK(bracket(space, v1, v3) <=
                bracket(space, v1, v2) + bracket(space, v2, v3) + kDefaultTol);
        }
        // Multiset middle: [v1,v2] <= [v1,S] + [S,v2].
        CHECK(bracket(space, v1, v2) <=
              bracket(space, v1, s) + bracket(space, v2, s) + kDefaultTol);
        // Multiset endpoint: [v1,S] <= [v1,v2] + [v2,S].
        CHECK(bracket(space, v1, s) <=
              bracket(space, v1, v2) + bracket(space, v2, s) + kDefaultTol);
      }
    }
  }
}

TEST_CASE("multiset pair bracket satisfies mixed triangle inequalities") {
  std::mt19937_64 rng(555);
  for (int it = 0; it < 30; ++it) {
    MetricSpace space = testutil::random_space(rng, 2 + static_cast<int>(rng() % 5), 3);
    RequestMultiset s = testutil::random_multiset(rng, space);
    RequestMultiset t = testutil::random_multiset(rng, space);
    RequestMultiset u = testutil::random_multiset(rng, space);
    const double st = bracket_multiset_pair(space, s, t);
    for (PointId v = 0; v < space.size(); ++v) {
      CHECK(st <= bracket(space, v, s) + bracket(space, v, t) + kDefaultTol);
      CHECK(bracket(space, v, s) <= bracket_multiset_pair(space, t, s) +
                                        bracket(space, v, t) + kDefaultTol);
    }
    CHECK(st <= bracket_multiset_pair(space, s, u) + bracket_multiset_pair(space, u, t) +
                    kDefaultTol);
  }
}

TEST_CASE("multiset bracket is linear in multiset mixture") {
  std::mt19937_64 rng(77);
  for (int it = 0; it < 30; ++it) {
    MetricSpace space = testutil::random_space(rng, 2 + static_cast<int>(rng() % 5), 6);
    RequestMultiset s = testutil::random_multiset(rng, space);
    RequestMultiset t = testutil::random_multiset(rng, space);
    RequestMultiset both = s.merged_with(t);
    PointId v = testutil::random_point(rng, space);
    CHECK(bracket(space, v, both) * both.total() ==
          doctest::Approx(bracket(space, v, s) * s.total() + bracket(space, v, t) * t.total())
              .epsilon(1e-12));
  }
}

TEST_CASE("edge list to metric uses all-pairs shortest paths") {
  // Triangle with a shortcut: direct edge 5 beaten by the two-hop path 2.
  MetricSpace space =
      metric_from_edge_list(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 5.0}}, {}, 2);
  CHECK(space.d(0, 2) == doctest::Approx(2.0));
  CHECK(validate_metric(space).ok());
  CHECK_THROWS_AS(metric_from_edge_list(3, {{0, 1, 1.0}}, {}, 2), std::invalid_argument);
}
