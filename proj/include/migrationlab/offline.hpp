#pragma once

#include <span>
#include <vector>

#include "migrationlab/instance.hpp"
#include "migrationlab/metric.hpp"

namespace migrationlab {

/// Exact offline optimum and one optimal trajectory.
struct OptResult {
  double cost = 0.0;
  std::vector<PointId> trajectory;  ///< trajectory[t] = position after step t; [0] = start
};

/// Exact offline optimum by dynamic programming over the serve-then-move
/// recurrence C_t(v) = min_u C_{t-1}(u) + d(u, r_t) + D*d(u, v). O(T*n^2).
/// With `free_start` the minimum is also taken over the initial position.
OptResult opt_dp(const MetricSpace& space, PointId start, std::span<const PointId> requests,
                 bool free_start = false);
OptResult opt_dp(const Instance& instance, bool free_start = false);

/// Slack of the offline lower bound on a trajectory segment serving requests
/// R (at most 2D of them): returns
///   4*C_OPT(R) - (2|R|/D)*[op_0, R, op_|R|] - (4 - 2|R|/D)*[op_0, op_|R|]
/// where C_OPT(R) is the serve+move cost of the segment itself. The bound
/// asserts the slack is nonnegative for any trajectory.
double check_opt_lower_bound(const MetricSpace& space, std::span<const PointId> traj_segment,
                             std::span<const PointId> requests);

}  // namespace migrationlab
