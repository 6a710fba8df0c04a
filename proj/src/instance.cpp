#include "migrationlab/instance.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "migrationlab/constants.hpp"

namespace migrationlab {

long round_count(double x) { return static_cast<long>(std::floor(x + 0.5)); }

std::vector<PointId> round_robin(std::span<const PointId> points, long count) {
  if (points.empty()) throw std::invalid_argument("round_robin over an empty point list");
  if (count < 0) throw std::invalid_argument("negative request count");
  std::vector<PointId> out;
  out.reserve(static_cast<size_t>(count));
  for (long i = 0; i < count; ++i) out.push_back(points[static_cast<size_t>(i % points.size())]);
  return out;
}

Instance linear_instance(double c, int D) {
  const auto& pc = paper_constants();
  if (D < 1) throw std::invalid_argument("D must be >= 1");
  if (c <= pc.tLin) {
    throw std::invalid_argument("linear instance needs c > t = 1 + 1/R0");
  }
  const long total = round_count(c * D);
  const long at_a = round_count((c - pc.tLin) * D);
  const long at_b = total - at_a;
  if (at_b < 1) throw std::invalid_argument("linear instance rounding left no far requests");

  Eigen::MatrixXd d(2, 2);
  d << 0, 1, 1, 0;
  Instance inst{MetricSpace({"a", "b"}, d, D), 0, {}, ""};
  inst.requests.assign(static_cast<size_t>(at_a), 0);
  inst.requests.insert(inst.requests.end(), static_cast<size_t>(at_b), 1);
  std::ostringstream note;
  note << "linear c=" << c << " D=" << D << " requests=" << at_a << "@a+" << at_b << "@b";
  if (std::abs(c * D - static_cast<double>(total)) > 1e-9) note << " (c*D rounded)";
  inst.note = note.str();
  return inst;
}

Instance bipartite_instance(int k, double f, double c, int D, std::optional<double> scale) {
  if (k < 3) {
    throw std::invalid_argument("bipartite instance needs k >= 3 so that any two S-nodes share a "
                                "common neighbor");
  }
  if (f <= 0) throw std::invalid_argument("edge length f must be positive");
  if (D < 1) throw std::invalid_argument("D must be >= 1");
  const double a = scale.value_or(paper_constants().alpha);
  if (a <= 0 || a >= 1) {
    // The closed-form shortest paths below assume Q-S edges shorter than the
    // hub edges.
    throw std::invalid_argument("bipartite scale must lie in (0, 1)");
  }
  const long total = round_count(c * D);
  if (total < k) throw std::invalid_argument("bipartite instance needs c*D >= k");

  // Closed-form shortest-path metric of the hub / Q / S graph. Every pair of
  // Q-nodes and every pair of S-nodes shares a common neighbor (k >= 3), and
  // q_i reaches s_i in three hops.
  const int n = 1 + 2 * k;
  std::vector<std::string> names(static_cast<size_t>(n));
  names[0] = "a";
  for (int i = 0; i < k; ++i) {
    names[static_cast<size_t>(1 + i)] = "q" + std::to_string(i + 1);
    names[static_cast<size_t>(1 + k + i)] = "s" + std::to_string(i + 1);
  }
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  auto q = [&](int i) { return 1 + i; };
  auto s = [&](int i) { return 1 + k + i; };
  for (int i = 0; i < k; ++i) {
    d(0, q(i)) = d(q(i), 0) = f;
    d(0, s(i)) = d(s(i), 0) = (1.0 + a) * f;
    for (int j = 0; j < k; ++j) {
      if (i != j) {
        d(q(i), q(j)) = 2.0 * a * f;
        d(s(i), s(j)) = 2.0 * a * f;
        d(q(i), s(j)) = d(s(j), q(i)) = a * f;
      } else {
        d(q(i), s(i)) = d(s(i), q(i)) = 3.0 * a * f;
      }
    }
  }

  Instance inst{MetricSpace(std::move(names), std::move(d), D), 0, {}, ""};
  std::vector<PointId> s_nodes;
  s_nodes.reserve(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) s_nodes.push_back(s(i));
  inst.requests = round_robin(s_nodes, total);
  std::ostringstream note;
  note << "bipartite k=" << k << " f=" << f << " scale=" << a << " c=" << c << " D=" << D;
  if (std::abs(c * D - static_cast<double>(total)) > 1e-9) note << " (c*D rounded)";
  inst.note = note.str();
  return inst;
}

Instance random_instance(int n, int D, int T, std::uint64_t seed, RandomMetricKind kind) {
  if (n < 1 || T < 1 || D < 1) throw std::invalid_argument("random instance needs n,T,D >= 1");
  std::mt19937_64 rng(seed);

  MetricSpace space = [&]() -> MetricSpace {
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("p" + std::to_string(i));
    if (kind == RandomMetricKind::kEuclideanSample) {
      std::uniform_real_distribution<double> coord(0.0, 1.0);
      std::vector<std::pair<double, double>> pts;
      pts.reserve(static_cast<size_t>(n));
      for (int i = 0; i < n; ++i) pts.emplace_back(coord(rng), coord(rng));
      Eigen::MatrixXd d(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          d(i, j) = std::hypot(pts[i].first - pts[j].first, pts[i].second - pts[j].second);
      return MetricSpace(std::move(names), std::move(d), D);
    }
    // Random connected graph: a random spanning chain plus extra edges, then
    // all-pairs shortest paths.
    std::uniform_real_distribution<double> weight(0.1, 1.0);
    std::vector<std::tuple<int, int, double>> edges;
    std::vector<int> order(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
    std::shuffle(order.begin(), order.end(), rng);
    for (int i = 0; i + 1 < n; ++i) edges.emplace_back(order[i], order[i + 1], weight(rng));
    if (n >= 2) {
      std::uniform_int_distribution<int> node(0, n - 1);
      const int extra = n;
      for (int e = 0; e < extra; ++e) {
        int u = node(rng), v = node(rng);
        if (u != v) edges.emplace_back(u, v, weight(rng));
      }
    }
    return metric_from_edge_list(n, edges, std::move(names), D);
  }();

  std::uniform_int_distribution<int> node(0, n - 1);
  Instance inst{std::move(space), 0, {}, ""};
  inst.start = node(rng);
  inst.requests.reserve(static_cast<size_t>(T));
  for (int i = 0; i < T; ++i) inst.requests.push_back(node(rng));
  std::ostringstream note;
  note << "random n=" << n << " D=" << D << " T=" << T << " seed=" << seed << " kind="
       << (kind == RandomMetricKind::kEuclideanSample ? "euclidean-sample"
                                                      : "random-graph-shortest-path");
  inst.note = note.str();
  return inst;
}

Instance load_instance_json(std::istream& in, double tol) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed instance JSON: ") + e.what());
  }
  if (!j.contains("D") || !j.contains("dist") || !j.contains("start") || !j.contains("requests")) {
    throw std::invalid_argument("instance JSON needs D, dist, start and requests fields");
  }
  const int D = j.at("D").get<int>();
  const auto& dist = j.at("dist");
  const int n = static_cast<int>(dist.size());
  if (n == 0) throw std::invalid_argument("instance has no points");
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i) {
    const auto& row = dist.at(static_cast<size_t>(i));
    if (static_cast<int>(row.size()) != n) {
      throw std::invalid_argument("distance matrix is not square");
    }
    for (int jj = 0; jj < n; ++jj) d(i, jj) = row.at(static_cast<size_t>(jj)).get<double>();
  }
  std::vector<std::string> names;
  if (j.contains("points")) {
    names = j.at("points").get<std::vector<std::string>>();
    if (static_cast<int>(names.size()) != n) {
      throw std::invalid_argument("points list does not match matrix size");
    }
  } else {
    for (int i = 0; i < n; ++i) names.push_back("p" + std::to_string(i));
  }
  Instance inst{MetricSpace(std::move(names), std::move(d), D),
                j.at("start").get<PointId>(),
                j.at("requests").get<std::vector<PointId>>(),
                j.value("note", std::string())};
  auto report = validate_metric(inst.space, tol);
  if (!report.ok()) {
    throw std::invalid_argument("instance metric invalid: " + report.summary());
  }
  inst.space.require_id(inst.start);
  for (PointId r : inst.requests) inst.space.require_id(r);
  return inst;
}

Instance load_instance_file(const std::string& path, double tol) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open instance file: " + path);
  return load_instance_json(in, tol);
}

void save_instance_json(const Instance& inst, std::ostream& out) {
  nlohmann::ordered_json j;
  j["D"] = inst.space.file_size();
  j["points"] = inst.space.names();
  auto& dist = j["dist"] = nlohmann::ordered_json::array();
  for (int i = 0; i < inst.space.size(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (int k = 0; k < inst.space.size(); ++k) row.push_back(inst.space.d(i, k));
    dist.push_back(std::move(row));
  }
  j["start"] = inst.start;
  j["requests"] = inst.requests;
  if (!inst.note.empty()) j["note"] = inst.note;
  out << j.dump(2) << "\n";
}

}  // namespace migrationlab
