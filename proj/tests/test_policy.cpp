#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "migrationlab/constants.hpp"
#include "migrationlab/policy.hpp"
#include "testutil.hpp"

using namespace migrationlab;

namespace {

Instance two_point_instance(int D, std::vector<PointId> requests) {
  Eigen::MatrixXd m(2, 2);
  m << 0, 1, 1, 0;
  return Instance{MetricSpace({"a", "b"}, m, D), 0, std::move(requests), ""};
}

PointId exhaustive_argmin(const MetricSpace& space, PointId current,
                          const std::function<double(PointId)>& objective) {
  PointId best = current;
  double best_value = objective(current);
  for (PointId v = 0; v < space.size(); ++v) {
    if (objective(v) < best_value) {
      best = v;
      best_value = objective(v);
    }
  }
  return best;
}

}  // namespace

TEST_CASE("paper constants match the cubics and the stated decimals") {
  const auto& pc = paper_constants();
  CHECK(pc.c0_residual <= 1e-9);
  CHECK(pc.R0_residual <= 1e-9);
  CHECK(pc.R0 == doctest::Approx(4.086).epsilon(1e-3));
  CHECK(pc.c0 == doctest::Approx(1.841).epsilon(1e-3));
  CHECK(pc.alpha == doctest::Approx(0.324).epsilon(1e-3));
  CHECK(pc.cT == doctest::Approx(1.352).epsilon(1e-3));
  CHECK(pc.tLin == doctest::Approx(1.245).epsilon(1e-3));
  CHECK(pc.R0 > 4.0);
  CHECK(pc.R0 < 4.1);
  CHECK(pc.c0 > 1.8);
  CHECK(pc.c0 < 1.9);
}

TEST_CASE("never-move policy pays one per far request") {
  const int T = 12;
  Instance inst = two_point_instance(4, std::vector<PointId>(T, 1));
  auto policy = stay_policy();
  RunRecord run = run_online(*policy, inst);
  CHECK(run.total_cost() == doctest::Approx(T));
  CHECK(run.total_move() == 0.0);
  for (PointId p : run.positions) CHECK(p == 0);
}

TEST_CASE("all paper policies stay put when every request is at the start") {
  std::vector<PointId> at_start(18, 0);
  for (auto make : {mtm_policy, mtlm_policy, stay_policy}) {
    Instance inst = two_point_instance(4, at_start);
    auto policy = make();
    RunRecord run = run_online(*policy, inst);
    CHECK(run.total_cost() == 0.0);
  }
  Instance inst = two_point_instance(4, at_start);
  auto dlm = dlm_policy();
  CHECK(run_online(*dlm, inst).total_cost() == 0.0);
}

TEST_CASE("run costs re-account from positions alone") {
  std::mt19937_64 rng(5);
  for (int it = 0; it < 20; ++it) {
    Instance inst = random_instance(2 + static_cast<int>(rng() % 5), 4, 40, rng(),
                                    RandomMetricKind::kEuclideanSample);
    auto policy = (it % 2) ? mtm_policy() : dlm_policy();
    RunRecord run = run_online(*policy, inst);
    double serve = 0.0, move = 0.0;
    for (int t = 1; t <= run.steps(); ++t) {
      serve += inst.space.d(run.positions[t - 1], inst.requests[t - 1]);
      move += inst.space.file_size() *
              inst.space.d(run.positions[t - 1], run.positions[t]);
    }
    CHECK(run.total_serve() == doctest::Approx(serve).epsilon(1e-12));
    CHECK(run.total_move() == doctest::Approx(move).epsilon(1e-12));
  }
}

TEST_CASE("mtm move rule") {
  Eigen::MatrixXd m(2, 2);
  m << 0, 1, 1, 0;
  MetricSpace space({"a", "b"}, m, 6);

  RequestMultiset all_b;
  all_b.add(1, 6);
  CHECK(mtm_move(space, 0, all_b) == 1);

  RequestMultiset split;
  split.add(0, 3);
  split.add(1, 3);
  CHECK(mtm_move(space, 0, split) == 0);  // tie keeps the current position
  CHECK(mtm_move(space, 1, split) == 1);

  std::mt19937_64 rng(17);
  for (int it = 0; it < 40; ++it) {
    MetricSpace s = testutil::random_space(rng, 2 + static_cast<int>(rng() % 6), 4);
    RequestMultiset r = testutil::random_multiset(rng, s, 12);
    PointId pos = testutil::random_point(rng, s);
    auto objective = [&](PointId x) {
      double sum = 0.0;
      for (const auto& [p, c] : r.counts()) sum += double(c) * s.d(x, p);
      return sum;
    };
    CHECK(mtm_move(s, pos, r) == exhaustive_argmin(s, pos, objective));
  }
}

TEST_CASE("mtlm move rule") {
  const auto& pc = paper_constants();
  Eigen::MatrixXd m(2, 2);
  m << 0, 1, 1, 0;
  MetricSpace space({"a", "b"}, m, 16);

  RequestMultiset at_pos;
  at_pos.add(0, 29);
  CHECK(mtlm_move(space, 0, at_pos) == 0);

  // Whole phase at the far point: (c0+1) * D > D, so the rule crosses.
  RequestMultiset far;
  far.add(1, round_count(pc.c0 * 16));
  CHECK(mtlm_move(space, 0, far) == 1);

  std::mt19937_64 rng(19);
  for (int it = 0; it < 40; ++it) {
    MetricSpace s = testutil::random_space(rng, 2 + static_cast<int>(rng() % 6), 4);
    RequestMultiset r = testutil::random_multiset(rng, s, 12);
    PointId pos = testutil::random_point(rng, s);
    auto objective = [&](PointId x) {
      double sum = 0.0;
      for (const auto& [p, c] : r.counts()) sum += double(c) * s.d(x, p);
      return s.file_size() * s.d(pos, x) + (pc.c0 + 1.0) / pc.c0 * sum;
    };
    CHECK(mtlm_move(s, pos, r) == exhaustive_argmin(s, pos, objective));
  }
}

TEST_CASE("dlm phase classification") {
  Eigen::MatrixXd m(2, 2);
  m << 0, 1, 1, 0;
  MetricSpace space({"a", "b"}, m, 8);

  SUBCASE("all requests at the position give a zero-cost short phase") {
    std::vector<PointId> stream(14, 0);
    DlmPhaseResult r = dlm_phase(space, 0, stream);
    CHECK(r.complete);
    CHECK(r.kind == PhaseKind::kShort);
    CHECK(r.target == 0);
    CHECK(r.g_value == 0.0);
  }

  SUBCASE("all requests at a far point end short at that point") {
    std::vector<PointId> stream(14, 1);
    DlmPhaseResult r = dlm_phase(space, 0, stream);
    CHECK(r.complete);
    CHECK(r.kind == PhaseKind::kShort);
    CHECK(r.target == 1);
    CHECK(r.g_value == doctest::Approx(bracket(space, 0, 1)));
    CHECK(r.threshold == doctest::Approx(1.5 * bracket(space, 0, 1)));
  }

  SUBCASE("D must be divisible by 4") {
    Eigen::MatrixXd mm(2, 2);
    mm << 0, 1, 1, 0;
    MetricSpace odd({"a", "b"}, mm, 6);
    std::vector<PointId> stream(20, 1);
    CHECK_THROWS_AS(dlm_phase(odd, 0, stream), std::invalid_argument);
  }

  SUBCASE("short stream is flagged incomplete") {
    std::vector<PointId> stream(5, 1);
    DlmPhaseResult r = dlm_phase(space, 0, stream);
    CHECK_FALSE(r.complete);
    CHECK(r.target == 0);
  }
}

TEST_CASE("dlm phase matches a brute-force scan on the bipartite geometry") {
  Instance inst = bipartite_instance(3, 1.0, 2.25, 8);  // 18 = one long phase worth
  const MetricSpace& space = inst.space;
  DlmPhaseResult r = dlm_phase(space, 0, inst.requests);
  REQUIRE(r.complete);

  auto bf_bracket = [&](PointId v, std::span<const PointId> part) {
    double sum = 0.0;
    for (PointId p : part) sum += space.d(v, p);
    return space.file_size() * sum / static_cast<double>(part.size());
  };
  std::span<const PointId> all(inst.requests);
  auto g = [&](PointId v) {
    return bracket(space, 0, v) + 2.0 * bf_bracket(v, all.subspan(0, 8)) +
           bf_bracket(v, all.subspan(8, 6));
  };
  PointId vg = 0;
  for (PointId v = 0; v < space.size(); ++v)
    if (g(v) < g(vg)) vg = v;
  const double threshold = 1.5 * bf_bracket(0, all.subspan(8, 6));

  if (g(vg) <= threshold + kDefaultTol) {
    CHECK(r.kind == PhaseKind::kShort);
    CHECK(r.target == vg);
  } else {
    REQUIRE(r.kind == PhaseKind::kLong);
    auto h = [&](PointId v) {
      return bracket(space, 0, v) + bf_bracket(v, all.subspan(0, 8)) +
             1.25 * bf_bracket(v, all.subspan(8, 6)) + 0.75 * bf_bracket(v, all.subspan(14, 4));
    };
    PointId vh = 0;
    for (PointId v = 0; v < space.size(); ++v)
      if (h(v) < h(vh)) vh = v;
    CHECK(r.target == vh);
    CHECK(h(r.target) <= h(vh) + kDefaultTol);
  }
}

TEST_CASE("dlm run structure: phase lengths, move steps, argmin property") {
  std::mt19937_64 rng(31);
  for (int it = 0; it < 15; ++it) {
    const int D = 4 * (1 + static_cast<int>(rng() % 3));
    Instance inst = random_instance(2 + static_cast<int>(rng() % 5), D,
                                    5 * D + static_cast<int>(rng() % D), rng(),
                                    RandomMetricKind::kRandomGraphShortestPath);
    auto policy = dlm_policy();
    RunRecord run = run_online(*policy, inst);
    int prev = 0;
    for (const PhaseBoundary& b : run.phases) {
      const int len = b.end_step - prev;
      if (b.kind == PhaseKind::kShort) CHECK(len == 7 * D / 4);
      if (b.kind == PhaseKind::kLong) CHECK(len == 9 * D / 4);
      // Position constant within the phase, move only at the boundary.
      for (int t = prev + 1; t < b.end_step; ++t) {
        CHECK(run.positions[t] == run.positions[prev]);
      }
      prev = b.end_step;
    }
    // Tail after the last boundary serves without moving.
    for (int t = prev + 1; t <= run.steps(); ++t) {
      CHECK(run.positions[t] == run.positions[prev]);
      CHECK(run.move_costs[t - 1] == 0.0);
    }
    CHECK(run.partial_tail == (prev != run.steps()));
  }
}

TEST_CASE("fixed phase adapter reproduces MTLM step for step") {
  std::mt19937_64 rng(37);
  Instance inst = random_instance(5, 8, 64, rng(), RandomMetricKind::kEuclideanSample);
  auto direct = mtlm_policy();
  auto adapted = fixed_phase_policy("wrapped", mtlm_move, paper_constants().c0);
  RunRecord a = run_online(*direct, inst);
  RunRecord b = run_online(*adapted, inst);
  CHECK(a.positions == b.positions);
  CHECK(a.total_cost() == doctest::Approx(b.total_cost()));
}

TEST_CASE("fixed phase adapter is memoryless across phases") {
  // Same final phase, permuted earlier phase: decisions after the permuted
  // phase boundary are identical.
  Eigen::MatrixXd m(3, 3);
  m << 0, 1, 2,
       1, 0, 1,
       2, 1, 0;
  MetricSpace space({"a", "b", "c"}, m, 4);
  std::vector<PointId> first = {1, 2, 0, 1};
  std::vector<PointId> permuted = {1, 0, 2, 1};  // same multiset
  std::vector<PointId> second = {2, 2, 2, 2};

  auto run_two_phases = [&](std::vector<PointId> phase1) {
    std::vector<PointId> requests = std::move(phase1);
    requests.insert(requests.end(), second.begin(), second.end());
    Instance inst{space, 0, requests, ""};
    auto policy = fixed_phase_policy("mtm", mtm_move, 1.0);
    return run_online(*policy, inst).positions.back();
  };
  CHECK(run_two_phases(first) == run_two_phases(permuted));

  Instance inst = two_point_instance(4, std::vector<PointId>(12, 1));
  auto never = fixed_phase_policy("stay", stay_move, 1.0);
  RunRecord run = run_online(*never, inst);
  CHECK(run.total_move() == 0.0);
  CHECK(run.phases.size() == 3);
}

TEST_CASE("move cost sums to D times the trajectory path length") {
  std::mt19937_64 rng(41);
  for (int it = 0; it < 10; ++it) {
    Instance inst = random_instance(4, 4, 30, rng(), RandomMetricKind::kEuclideanSample);
    auto policy = mtm_policy();
    RunRecord run = run_online(*policy, inst);
    double path = 0.0;
    for (size_t t = 1; t < run.positions.size(); ++t) {
      path += inst.space.d(run.positions[t - 1], run.positions[t]);
    }
    CHECK(run.total_move() == doctest::Approx(inst.space.file_size() * path).epsilon(1e-12));
  }
}

TEST_CASE("policy moving to an invalid point is rejected") {
  Instance inst = two_point_instance(2, {1, 1});
  auto bad = fixed_phase_policy("bad", [](const MetricSpace&, PointId, const RequestMultiset&) {
    return PointId{99};
  }, 1.0);
  CHECK_THROWS_AS(run_online(*bad, inst), std::runtime_error);
}
