#pragma once

#include <random>

#include "migrationlab/instance.hpp"
#include "migrationlab/metric.hpp"

namespace migrationlab::testutil {

inline MetricSpace random_space(std::mt19937_64& rng, int n, int D) {
  const RandomMetricKind kind = (rng() & 1) ? RandomMetricKind::kEuclideanSample
                                            : RandomMetricKind::kRandomGraphShortestPath;
  return random_instance(n, D, 1, rng(), kind).space;
}

inline RequestMultiset random_multiset(std::mt19937_64& rng, const MetricSpace& space,
                                       int max_total = 8) {
  std::uniform_int_distribution<int> size(1, max_total);
  std::uniform_int_distribution<int> node(0, space.size() - 1);
  RequestMultiset s;
  const int total = size(rng);
  for (int i = 0; i < total; ++i) s.add(node(rng));
  return s;
}

inline PointId random_point(std::mt19937_64& rng, const MetricSpace& space) {
  std::uniform_int_distribution<int> node(0, space.size() - 1);
  return node(rng);
}

}  // namespace migrationlab::testutil
