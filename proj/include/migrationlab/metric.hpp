#pragma once

#include <Eigen/Dense>

#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace migrationlab {

/// Index of a point in the owning metric space.
using PointId = int;

/// Absolute tolerance used for all metric / slack comparisons.
inline constexpr double kDefaultTol = 1e-9;

/// One violated metric axiom, with the size of the violation.
struct MetricViolation {
  std::string what;
  double magnitude = 0.0;
};

struct ValidationReport {
  std::vector<MetricViolation> violations;
  double worst = 0.0;

  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

/// A finite metric space together with the file size D.
///
/// Distances are stored as a dense symmetric matrix; point identity is the
/// index into that matrix, labels are cosmetic. Instances are immutable after
/// construction and safe to share across threads.
class MetricSpace {
 public:
  MetricSpace(std::vector<std::string> names, Eigen::MatrixXd dist, int file_size);

  int size() const { return static_cast<int>(dist_.rows()); }
  int file_size() const { return file_size_; }
  double d(PointId a, PointId b) const { return dist_(a, b); }
  const Eigen::MatrixXd& distances() const { return dist_; }
  const std::vector<std::string>& names() const { return names_; }

  bool valid_id(PointId p) const { return p >= 0 && p < size(); }
  void require_id(PointId p) const;

 private:
  std::vector<std::string> names_;
  Eigen::MatrixXd dist_;
  int file_size_;
};

/// A multiset of request points with positive multiplicities.
class RequestMultiset {
 public:
  RequestMultiset() = default;

  void add(PointId p, long count = 1);
  long total() const { return total_; }
  bool empty() const { return total_ == 0; }
  const std::map<PointId, long>& counts() const { return counts_; }

  static RequestMultiset from_points(std::span<const PointId> points);

  /// Disjoint union (multiplicities add).
  RequestMultiset merged_with(const RequestMultiset& other) const;

  bool operator==(const RequestMultiset& other) const = default;

 private:
  std::map<PointId, long> counts_;
  long total_ = 0;
};

/// Element of a bracket path: a point or a request multiset.
using PathElement = std::variant<PointId, RequestMultiset>;

/// Checks all metric axioms of `space` within absolute tolerance `tol`:
/// zero diagonal, symmetry, nonnegativity and the triangle inequality.
/// Returns an empty report iff the space is a valid metric.
ValidationReport validate_metric(const MetricSpace& space, double tol = kDefaultTol);

/// [v1,v2] = D * d(v1,v2).
double bracket(const MetricSpace& space, PointId v1, PointId v2);

/// [v,S] = D * (average distance from v to the points of S), multiplicities
/// respected. Throws on an empty multiset.
double bracket(const MetricSpace& space, PointId v, const RequestMultiset& s);
inline double bracket(const MetricSpace& space, const RequestMultiset& s, PointId v) {
  return bracket(space, v, s);
}

/// Mean pairwise distance times D. This extends the bracket notation to two
/// multisets; it satisfies every triangle inequality with point or multiset
/// middles. Gated separately in bracket_path because it is an extension of
/// the point/multiset brackets, not a consequence of them.
double bracket_multiset_pair(const MetricSpace& space, const RequestMultiset& s,
                             const RequestMultiset& t);

/// [e1,e2,...,ej] = [e1,e2] + [e2,e3] + ...; throws if the path contains two
/// consecutive multisets and `allow_multiset_pairs` is false.
double bracket_path(const MetricSpace& space, std::span<const PathElement> path,
                    bool allow_multiset_pairs = false);

/// Shortest-path metric of an undirected weighted graph on n nodes.
/// Throws if the graph is disconnected or an edge weight is negative.
MetricSpace metric_from_edge_list(int n, const std::vector<std::tuple<int, int, double>>& edges,
                                  std::vector<std::string> names, int file_size);

}  // namespace migrationlab
