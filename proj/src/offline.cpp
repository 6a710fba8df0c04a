#include "migrationlab/offline.hpp"

#include <limits>
#include <stdexcept>

namespace migrationlab {

OptResult opt_dp(const MetricSpace& space, PointId start, std::span<const PointId> requests,
                 bool free_start) {
  space.require_id(start);
  const int n = space.size();
  const int T = static_cast<int>(requests.size());
  const double D = space.file_size();
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<double> cost(static_cast<size_t>(n), inf);
  if (free_start) {
    std::fill(cost.begin(), cost.end(), 0.0);
  } else {
    cost[static_cast<size_t>(start)] = 0.0;
  }
  // parent[t][v] = position before step t+1 on an optimal trajectory ending
  // at v after step t+1; ties prefer staying put, then the lowest index.
  std::vector<std::vector<PointId>> parent(static_cast<size_t>(T),
                                           std::vector<PointId>(static_cast<size_t>(n), 0));
  std::vector<double> next(static_cast<size_t>(n));
  for (int t = 0; t < T; ++t) {
    const PointId r = requests[static_cast<size_t>(t)];
    space.require_id(r);
    for (PointId v = 0; v < n; ++v) {
      double best = cost[static_cast<size_t>(v)] + space.d(v, r);  // u == v: no move
      PointId best_u = v;
      for (PointId u = 0; u < n; ++u) {
        if (u == v) continue;
        double candidate = cost[static_cast<size_t>(u)] + space.d(u, r) + D * space.d(u, v);
        if (candidate < best) {
          best = candidate;
          best_u = u;
        }
      }
      next[static_cast<size_t>(v)] = best;
      parent[static_cast<size_t>(t)][static_cast<size_t>(v)] = best_u;
    }
    cost.swap(next);
  }

  PointId end = 0;
  for (PointId v = 1; v < n; ++v) {
    if (cost[static_cast<size_t>(v)] < cost[static_cast<size_t>(end)]) end = v;
  }
  OptResult result;
  result.cost = cost[static_cast<size_t>(end)];
  result.trajectory.assign(static_cast<size_t>(T) + 1, 0);
  result.trajectory[static_cast<size_t>(T)] = end;
  for (int t = T - 1; t >= 0; --t) {
    result.trajectory[static_cast<size_t>(t)] =
        parent[static_cast<size_t>(t)][static_cast<size_t>(result.trajectory[static_cast<size_t>(t) + 1])];
  }
  if (!free_start) result.trajectory[0] = start;
  return result;
}

OptResult opt_dp(const Instance& instance, bool free_start) {
  return opt_dp(instance.space, instance.start, instance.requests, free_start);
}

double check_opt_lower_bound(const MetricSpace& space, std::span<const PointId> traj_segment,
                             std::span<const PointId> requests) {
  const long R = static_cast<long>(requests.size());
  const long D = space.file_size();
  if (R > 2 * D) throw std::invalid_argument("segment longer than 2D requests");
  if (R < 1) throw std::invalid_argument("empty request segment");
  if (traj_segment.size() != requests.size() + 1) {
    throw std::invalid_argument("trajectory segment must have |R|+1 positions");
  }
  double opt_cost = 0.0;
  for (long i = 0; i < R; ++i) {
    opt_cost += space.d(traj_segment[static_cast<size_t>(i)], requests[static_cast<size_t>(i)]);
    opt_cost += static_cast<double>(D) *
                space.d(traj_segment[static_cast<size_t>(i)], traj_segment[static_cast<size_t>(i) + 1]);
  }
  const RequestMultiset multiset = RequestMultiset::from_points(requests);
  const PointId front = traj_segment.front();
  const PointId back = traj_segment.back();
  const double ratio = 2.0 * static_cast<double>(R) / static_cast<double>(D);
  const double rhs = ratio * (bracket(space, front, multiset) + bracket(space, back, multiset)) +
                     (4.0 - ratio) * bracket(space, front, back);
  return 4.0 * opt_cost - rhs;
}

}  // namespace migrationlab
