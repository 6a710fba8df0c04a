#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "migrationlab/offline.hpp"
#include "migrationlab/policy.hpp"
#include "testutil.hpp"

using namespace migrationlab;

namespace {

// Exhaustive minimum over all n^T trajectories, for cross-checking opt_dp.
double brute_force_opt(const MetricSpace& space, PointId start,
                       std::span<const PointId> requests) {
  const int n = space.size();
  const int T = static_cast<int>(requests.size());
  double best = std::numeric_limits<double>::infinity();
  std::vector<PointId> traj(static_cast<size_t>(T), 0);
  while (true) {
    double cost = 0.0;
    PointId pos = start;
    for (int t = 0; t < T; ++t) {
      cost += space.d(pos, requests[static_cast<size_t>(t)]);
      cost += space.file_size() * space.d(pos, traj[static_cast<size_t>(t)]);
      pos = traj[static_cast<size_t>(t)];
    }
    best = std::min(best, cost);
    int idx = 0;
    while (idx < T && ++traj[static_cast<size_t>(idx)] == n) {
      traj[static_cast<size_t>(idx)] = 0;
      ++idx;
    }
    if (idx == T) break;
  }
  return best;
}

double trajectory_cost(const MetricSpace& space, std::span<const PointId> trajectory,
                       std::span<const PointId> requests) {
  double cost = 0.0;
  for (size_t i = 0; i < requests.size(); ++i) {
    cost += space.d(trajectory[i], requests[i]);
    cost += space.file_size() * space.d(trajectory[i], trajectory[i + 1]);
  }
  return cost;
}

}  // namespace

TEST_CASE("opt_dp trivial cases") {
  Eigen::MatrixXd m(2, 2);
  m << 0, 1, 1, 0;
  MetricSpace space({"a", "b"}, m, 4);

  std::vector<PointId> at_start(10, 0);
  OptResult stay = opt_dp(space, 0, at_start);
  CHECK(stay.cost == 0.0);
  for (PointId p : stay.trajectory) CHECK(p == 0);

  std::vector<PointId> none;
  OptResult empty = opt_dp(space, 0, none);
  CHECK(empty.cost == 0.0);
  CHECK(empty.trajectory == std::vector<PointId>{0});
}

TEST_CASE("opt_dp on the 2-point block: serve one then migrate") {
  Eigen::MatrixXd m(2, 2);
  m << 0, 1, 1, 0;
  MetricSpace space({"a", "b"}, m, 4);
  std::vector<PointId> at_b(8, 1);  // 2D requests at b
  OptResult opt = opt_dp(space, 0, at_b);
  CHECK(opt.cost == doctest::Approx(5.0));  // 1 serve + 4 migration
  CHECK(opt.cost == doctest::Approx(brute_force_opt(space, 0, at_b)));
  CHECK(opt.trajectory.front() == 0);
  CHECK(opt.trajectory.back() == 1);
  CHECK(trajectory_cost(space, opt.trajectory, at_b) == doctest::Approx(opt.cost));
}

TEST_CASE("opt_dp equals exhaustive enumeration on small instances") {
  std::mt19937_64 rng(97);
  for (int it = 0; it < 60; ++it) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const int T = 1 + static_cast<int>(rng() % 6);
    Instance inst = random_instance(n, 1 + static_cast<int>(rng() % 3), T, rng(),
                                    (it & 1) ? RandomMetricKind::kEuclideanSample
                                             : RandomMetricKind::kRandomGraphShortestPath);
    OptResult opt = opt_dp(inst);
    CHECK(opt.cost ==
          doctest::Approx(brute_force_opt(inst.space, inst.start, inst.requests)).epsilon(1e-12));
    CHECK(trajectory_cost(inst.space, opt.trajectory, inst.requests) ==
          doctest::Approx(opt.cost).epsilon(1e-12));
  }
}

TEST_CASE("opt_dp never exceeds any online policy") {
  std::mt19937_64 rng(131);
  for (int it = 0; it < 20; ++it) {
    Instance inst = random_instance(2 + static_cast<int>(rng() % 5), 4, 36, rng(),
                                    RandomMetricKind::kEuclideanSample);
    OptResult opt = opt_dp(inst);
    for (auto make : {mtm_policy, mtlm_policy, stay_policy}) {
      auto policy = make();
      CHECK(opt.cost <= run_online(*policy, inst).total_cost() + kDefaultTol);
    }
    auto dlm = dlm_policy();
    CHECK(opt.cost <= run_online(*dlm, inst).total_cost() + kDefaultTol);
  }
}

TEST_CASE("opt_dp is monotone in appended requests") {
  std::mt19937_64 rng(151);
  for (int it = 0; it < 15; ++it) {
    Instance inst = random_instance(4, 3, 20, rng(), RandomMetricKind::kEuclideanSample);
    double prev = 0.0;
    for (size_t take = 0; take <= inst.requests.size(); take += 4) {
      OptResult opt = opt_dp(inst.space, inst.start,
                             std::span<const PointId>(inst.requests).subspan(0, take));
      CHECK(opt.cost >= prev - kDefaultTol);
      prev = opt.cost;
    }
  }
}

TEST_CASE("free-start variant minimizes over initial positions") {
  Eigen::MatrixXd m(2, 2);
  m << 0, 1, 1, 0;
  MetricSpace space({"a", "b"}, m, 4);
  std::vector<PointId> at_b(8, 1);
  OptResult free = opt_dp(space, 0, at_b, true);
  CHECK(free.cost == 0.0);
  CHECK(free.trajectory.front() == 1);
}

TEST_CASE("offline lower bound slack is zero in the stationary cases") {
  Eigen::MatrixXd m(2, 2);
  m << 0, 0.7, 0.7, 0;
  MetricSpace space({"a", "b"}, m, 4);

  std::vector<PointId> seg(7, 0);  // 6 steps, stationary at a
  std::vector<PointId> reqs_here(6, 0);
  CHECK(check_opt_lower_bound(space, seg, reqs_here) == doctest::Approx(0.0));

  std::vector<PointId> reqs_there(6, 1);
  // LHS = 4 * 6 * 0.7; RHS = (2*6/4) * 2 * [a,R] = 3 * 2 * 4 * 0.7 = 16.8.
  CHECK(check_opt_lower_bound(space, seg, reqs_there) == doctest::Approx(0.0));
}

TEST_CASE("offline lower bound rejects segments longer than 2D") {
  Eigen::MatrixXd m(2, 2);
  m << 0, 1, 1, 0;
  MetricSpace space({"a", "b"}, m, 2);
  std::vector<PointId> seg(6, 0);
  std::vector<PointId> reqs(5, 1);
  CHECK_THROWS_AS(check_opt_lower_bound(space, seg, reqs), std::invalid_argument);
}

TEST_CASE("offline lower bound holds over a random sweep") {
  std::mt19937_64 rng(171);
  double min_slack = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 2000; ++it) {
    const int D = 1 + static_cast<int>(rng() % 6);
    MetricSpace space = testutil::random_space(rng, 2 + static_cast<int>(rng() % 5), D);
    std::uniform_int_distribution<int> node(0, space.size() - 1);
    const int R = 1 + static_cast<int>(rng() % (2 * D));
    std::vector<PointId> seg, reqs;
    for (int i = 0; i <= R; ++i) seg.push_back(node(rng));
    for (int i = 0; i < R; ++i) reqs.push_back(node(rng));
    min_slack = std::min(min_slack, check_opt_lower_bound(space, seg, reqs));
  }
  CHECK(min_slack >= -kDefaultTol);

  // Segments cut from real optimal trajectories.
  for (int it = 0; it < 100; ++it) {
    const int D = 2 + 2 * static_cast<int>(rng() % 3);
    Instance inst = random_instance(4, D, 3 * D, rng(), RandomMetricKind::kEuclideanSample);
    OptResult opt = opt_dp(inst);
    const int R = 1 + static_cast<int>(rng() % (2 * D));
    const int from = static_cast<int>(rng() % (inst.requests.size() - R + 1));
    std::span<const PointId> seg(opt.trajectory.data() + from, static_cast<size_t>(R) + 1);
    std::span<const PointId> reqs(inst.requests.data() + from, static_cast<size_t>(R));
    CHECK(check_opt_lower_bound(inst.space, seg, reqs) >= -kDefaultTol);
  }
}
