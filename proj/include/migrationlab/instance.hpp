#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "migrationlab/metric.hpp"

namespace migrationlab {

/// A simulation input: a metric space, a common start position for the online
/// algorithm and OPT, and the request stream.
struct Instance {
  MetricSpace space;
  PointId start = 0;
  std::vector<PointId> requests;
  std::string note;  ///< rounding / generator metadata
};

/// Rounds x to the nearest integer count, ties away from zero upward.
long round_count(double x);

/// Cyclic repetition of `points`, `count` entries long. Per-point counts
/// differ by at most one.
std::vector<PointId> round_robin(std::span<const PointId> points, long count);

/// Two-point line of length 1; round((c-t)*D) requests at the start point
/// followed by the rest at the far point, c*D requests in total, where
/// t = 1 + 1/R0. Requires c > t.
Instance linear_instance(double c, int D);

/// The almost-complete bipartite geometry: a hub `a` joined to k nodes Q at
/// distance f, and k nodes S with q_i ~ s_j (length scale*f) iff i != j.
/// Distances are the shortest-path metric of that graph. Requests: c*D
/// requests round-robin over S, starting at `a`. Requires k >= 3 and
/// c*D >= k. `scale` defaults to alpha = 1/(R0-1).
Instance bipartite_instance(int k, double f, double c, int D,
                            std::optional<double> scale = std::nullopt);

enum class RandomMetricKind {
  kEuclideanSample,         ///< points in the unit square, straight-line distance
  kRandomGraphShortestPath  ///< random connected graph, uniform weights, APSP
};

/// Deterministic function of the seed; the generated metric always validates.
Instance random_instance(int n, int D, int T, std::uint64_t seed, RandomMetricKind kind);

/// JSON instance form:
///   { "D": int, "points": [string], "dist": [[real]], "start": int,
///     "requests": [int] }
/// The loader validates the metric and rejects invalid files.
Instance load_instance_json(std::istream& in, double tol = kDefaultTol);
Instance load_instance_file(const std::string& path, double tol = kDefaultTol);
void save_instance_json(const Instance& inst, std::ostream& out);

}  // namespace migrationlab
