#include "migrationlab/metric.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace migrationlab {

std::string ValidationReport::summary() const {
  if (ok()) return "valid metric";
  std::ostringstream os;
  os << violations.size() << " violation(s), worst " << worst << ": " << violations.front().what;
  return os.str();
}

MetricSpace::MetricSpace(std::vector<std::string> names, Eigen::MatrixXd dist, int file_size)
    : names_(std::move(names)), dist_(std::move(dist)), file_size_(file_size) {
  if (dist_.rows() != dist_.cols()) {
    throw std::invalid_argument("distance matrix must be square");
  }
  if (dist_.rows() == 0) {
    throw std::invalid_argument("metric space needs at least one point");
  }
  if (static_cast<Eigen::Index>(names_.size()) != dist_.rows()) {
    throw std::invalid_argument("name list does not match matrix size");
  }
  if (file_size_ < 1) {
    throw std::invalid_argument("file size D must be >= 1");
  }
}

void MetricSpace::require_id(PointId p) const {
  if (!valid_id(p)) {
    throw std::invalid_argument("point id " + std::to_string(p) + " out of range [0," +
                                std::to_string(size()) + ")");
  }
}

void RequestMultiset::add(PointId p, long count) {
  if (count <= 0) throw std::invalid_argument("multiset counts must be positive");
  counts_[p] += count;
  total_ += count;
}

RequestMultiset RequestMultiset::from_points(std::span<const PointId> points) {
  RequestMultiset s;
  for (PointId p : points) s.add(p);
  return s;
}

RequestMultiset RequestMultiset::merged_with(const RequestMultiset& other) const {
  RequestMultiset out = *this;
  for (const auto& [p, c] : other.counts_) out.add(p, c);
  return out;
}

ValidationReport validate_metric(const MetricSpace& space, double tol) {
  ValidationReport report;
  const auto& m = space.distances();
  const int n = space.size();
  auto flag = [&](double magnitude, std::string what) {
    report.violations.push_back({std::move(what), magnitude});
    report.worst = std::max(report.worst, magnitude);
  };
  for (int i = 0; i < n; ++i) {
    if (std::abs(m(i, i)) > tol) {
      flag(std::abs(m(i, i)), "nonzero diagonal at " + std::to_string(i));
    }
    for (int j = 0; j < n; ++j) {
      if (m(i, j) < -tol) {
        flag(-m(i, j), "negative distance (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
      if (std::abs(m(i, j) - m(j, i)) > tol) {
        flag(std::abs(m(i, j) - m(j, i)),
             "asymmetry (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      // d(i,k) <= min_j d(i,j)+d(j,k), checked with tolerance tol.
      double best = std::numeric_limits<double>::infinity();
      for (int j = 0; j < n; ++j) {
        if (j == i || j == k) continue;
        best = std::min(best, m(i, j) + m(j, k));
      }
      if (m(i, k) > best + tol) {
        flag(m(i, k) - best, "triangle violation (" + std::to_string(i) + ",*," +
                                 std::to_string(k) + ")");
      }
    }
  }
  return report;
}

double bracket(const MetricSpace& space, PointId v1, PointId v2) {
  space.require_id(v1);
  space.require_id(v2);
  return space.file_size() * space.d(v1, v2);
}

double bracket(const MetricSpace& space, PointId v, const RequestMultiset& s) {
  space.require_id(v);
  if (s.empty()) throw std::invalid_argument("bracket of an empty multiset");
  double sum = 0.0;
  for (const auto& [p, c] : s.counts()) {
    space.require_id(p);
    sum += static_cast<double>(c) * space.d(v, p);
  }
  return space.file_size() * sum / static_cast<double>(s.total());
}

double bracket_multiset_pair(const MetricSpace& space, const RequestMultiset& s,
                             const RequestMultiset& t) {
  if (s.empty() || t.empty()) throw std::invalid_argument("bracket of an empty multiset");
  double sum = 0.0;
  for (const auto& [p, cp] : s.counts()) {
    space.require_id(p);
    for (const auto& [q, cq] : t.counts()) {
      space.require_id(q);
      sum += static_cast<double>(cp) * static_cast<double>(cq) * space.d(p, q);
    }
  }
  return space.file_size() * sum /
         (static_cast<double>(s.total()) * static_cast<double>(t.total()));
}

double bracket_path(const MetricSpace& space, std::span<const PathElement> path,
                    bool allow_multiset_pairs) {
  if (path.size() < 2) throw std::invalid_argument("bracket path needs at least two elements");
  double sum = 0.0;
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    const PathElement& a = path[i];
    const PathElement& b = path[i + 1];
    if (std::holds_alternative<PointId>(a)) {
      if (std::holds_alternative<PointId>(b)) {
        sum += bracket(space, std::get<PointId>(a), std::get<PointId>(b));
      } else {
        sum += bracket(space, std::get<PointId>(a), std::get<RequestMultiset>(b));
      }
    } else if (std::holds_alternative<PointId>(b)) {
      sum += bracket(space, std::get<PointId>(b), std::get<RequestMultiset>(a));
    } else {
      if (!allow_multiset_pairs) {
        throw std::invalid_argument(
            "path contains two consecutive multisets; enable the multiset-pair extension");
      }
      sum += bracket_multiset_pair(space, std::get<RequestMultiset>(a),
                                   std::get<RequestMultiset>(b));
    }
  }
  return sum;
}

MetricSpace metric_from_edge_list(int n, const std::vector<std::tuple<int, int, double>>& edges,
                                  std::vector<std::string> names, int file_size) {
  if (n < 1) throw std::invalid_argument("graph needs at least one node");
  const double inf = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(n, n, inf);
  for (int i = 0; i < n; ++i) d(i, i) = 0.0;
  for (const auto& [a, b, w] : edges) {
    if (a < 0 || a >= n || b < 0 || b >= n) throw std::invalid_argument("edge endpoint out of range");
    if (w < 0) throw std::invalid_argument("negative edge weight");
    d(a, b) = std::min(d(a, b), w);
    d(b, a) = std::min(d(b, a), w);
  }
  // Floyd-Warshall.
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (d(i, k) + d(k, j) < d(i, j)) d(i, j) = d(i, k) + d(k, j);
  if (!d.allFinite()) throw std::invalid_argument("graph is disconnected");
  if (names.empty()) {
    names.reserve(n);
    for (int i = 0; i < n; ++i) names.push_back("p" + std::to_string(i));
  }
  return MetricSpace(std::move(names), std::move(d), file_size);
}

}  // namespace migrationlab
