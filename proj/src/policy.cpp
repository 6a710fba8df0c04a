#include "migrationlab/policy.hpp"
#include "migrationlab/serialize.hpp"

#include <numeric>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "migrationlab/constants.hpp"

namespace migrationlab {

const char* phase_kind_name(PhaseKind kind) {
  switch (kind) {
    case PhaseKind::kShort: return "short";
    case PhaseKind::kLong: return "long";
    case PhaseKind::kFixed: return "fixed";
  }
  return "?";
}

double RunRecord::total_serve() const {
  return std::accumulate(serve_costs.begin(), serve_costs.end(), 0.0);
}

double RunRecord::total_move() const {
  return std::accumulate(move_costs.begin(), move_costs.end(), 0.0);
}

PointId argmin_point(const MetricSpace& space, PointId current,
                     const std::function<double(PointId)>& objective) {
  space.require_id(current);
  // Ties keep the current position; scanning by index makes the fallback the
  // lowest-index minimizer.
  PointId best = current;
  double best_value = objective(current);
  for (PointId v = 0; v < space.size(); ++v) {
    if (v == current) continue;
    double value = objective(v);
    if (value < best_value) {
      best = v;
      best_value = value;
    }
  }
  return best;
}

PointId mtm_move(const MetricSpace& space, PointId pos, const RequestMultiset& requests) {
  return argmin_point(space, pos, [&](PointId x) {
    double sum = 0.0;
    for (const auto& [p, c] : requests.counts()) sum += static_cast<double>(c) * space.d(x, p);
    return sum;
  });
}

PointId mtlm_move(const MetricSpace& space, PointId pos, const RequestMultiset& requests) {
  const double c0 = paper_constants().c0;
  const double coeff = (c0 + 1.0) / c0;
  const double D = space.file_size();
  return argmin_point(space, pos, [&](PointId x) {
    double sum = 0.0;
    for (const auto& [p, c] : requests.counts()) sum += static_cast<double>(c) * space.d(x, p);
    return D * space.d(pos, x) + coeff * sum;
  });
}

PointId stay_move(const MetricSpace&, PointId pos, const RequestMultiset&) { return pos; }

namespace {

class FixedPhasePolicy final : public OnlinePolicy {
 public:
  FixedPhasePolicy(std::string name, PhaseMoveRule rule, double c)
      : name_(std::move(name)), rule_(std::move(rule)), c_(c) {
    if (c_ <= 0) throw std::invalid_argument("phase factor c must be positive");
  }

  std::string name() const override { return name_; }

  void reset(const MetricSpace& space, PointId start) override {
    space_ = &space;
    pos_ = start;
    phase_length_ = round_count(c_ * space.file_size());
    if (phase_length_ < 1) throw std::invalid_argument("phase length rounds to zero");
    phase_ = RequestMultiset();
  }

  Decision on_request(PointId request) override {
    phase_.add(request);
    if (phase_.total() < phase_length_) return {pos_, std::nullopt};
    PointId next = rule_(*space_, pos_, phase_);
    phase_ = RequestMultiset();
    pos_ = next;
    return {pos_, PhaseKind::kFixed};
  }

 private:
  std::string name_;
  PhaseMoveRule rule_;
  double c_;
  const MetricSpace* space_ = nullptr;
  PointId pos_ = 0;
  long phase_length_ = 0;
  RequestMultiset phase_;
};

class DlmPolicy final : public OnlinePolicy {
 public:
  explicit DlmPolicy(double tol) : tol_(tol) {}

  std::string name() const override { return "dlm"; }

  void reset(const MetricSpace& space, PointId start) override {
    if (space.file_size() % 4 != 0) {
      throw std::invalid_argument("dynamic phases need D divisible by 4");
    }
    space_ = &space;
    pos_ = start;
    buffer_.clear();
  }

  Decision on_request(PointId request) override {
    const MetricSpace& space = *space_;
    const long D = space.file_size();
    buffer_.push_back(request);
    const long got = static_cast<long>(buffer_.size());
    if (got == 7 * D / 4) {
      DlmPhaseResult r = dlm_phase(space, pos_, buffer_, tol_);
      if (r.kind == PhaseKind::kShort) {
        pos_ = r.target;
        buffer_.clear();
        return {pos_, PhaseKind::kShort};
      }
      return {pos_, std::nullopt};  // keep collecting R3
    }
    if (got == 9 * D / 4) {
      DlmPhaseResult r = dlm_phase(space, pos_, buffer_, tol_);
      pos_ = r.target;
      buffer_.clear();
      return {pos_, PhaseKind::kLong};
    }
    return {pos_, std::nullopt};
  }

 private:
  double tol_;
  const MetricSpace* space_ = nullptr;
  PointId pos_ = 0;
  std::vector<PointId> buffer_;
};

}  // namespace

std::unique_ptr<OnlinePolicy> fixed_phase_policy(std::string name, PhaseMoveRule rule, double c) {
  return std::make_unique<FixedPhasePolicy>(std::move(name), std::move(rule), c);
}

std::unique_ptr<OnlinePolicy> mtm_policy() { return fixed_phase_policy("mtm", mtm_move, 1.0); }

std::unique_ptr<OnlinePolicy> mtlm_policy() {
  return fixed_phase_policy("mtlm", mtlm_move, paper_constants().c0);
}

std::unique_ptr<OnlinePolicy> stay_policy() { return fixed_phase_policy("stay", stay_move, 1.0); }

std::unique_ptr<OnlinePolicy> dlm_policy(double tol) { return std::make_unique<DlmPolicy>(tol); }

DlmPhaseResult dlm_phase(const MetricSpace& space, PointId pos, std::span<const PointId> stream,
                         double tol) {
  space.require_id(pos);
  const long D = space.file_size();
  if (D % 4 != 0) throw std::invalid_argument("dynamic phases need D divisible by 4");
  const long short_len = 7 * D / 4;
  const long long_len = 9 * D / 4;

  DlmPhaseResult result;
  if (static_cast<long>(stream.size()) < short_len) {
    result.target = pos;
    result.complete = false;
    result.length = static_cast<int>(stream.size());
    return result;
  }
  result.r1 = RequestMultiset::from_points(stream.subspan(0, static_cast<size_t>(D)));
  result.r2 = RequestMultiset::from_points(
      stream.subspan(static_cast<size_t>(D), static_cast<size_t>(short_len - D)));

  const PointId v_g = argmin_point(space, pos, [&](PointId v) {
    return bracket(space, pos, v) + 2.0 * bracket(space, v, result.r1) +
           bracket(space, v, result.r2);
  });
  result.g_minimizer = v_g;
  result.g_value = bracket(space, pos, v_g) + 2.0 * bracket(space, v_g, result.r1) +
                   bracket(space, v_g, result.r2);
  result.threshold = 1.5 * bracket(space, pos, result.r2);

  if (result.g_value <= result.threshold + tol) {
    result.target = v_g;
    result.kind = PhaseKind::kShort;
    result.complete = true;
    result.length = static_cast<int>(short_len);
    return result;
  }

  result.kind = PhaseKind::kLong;
  if (static_cast<long>(stream.size()) < long_len) {
    result.target = pos;
    result.complete = false;
    result.length = static_cast<int>(stream.size());
    return result;
  }
  result.r3 = RequestMultiset::from_points(
      stream.subspan(static_cast<size_t>(short_len), static_cast<size_t>(long_len - short_len)));
  result.target = argmin_point(space, pos, [&](PointId v) {
    return bracket(space, pos, v) + bracket(space, v, result.r1) +
           1.25 * bracket(space, v, result.r2) + 0.75 * bracket(space, v, result.r3);
  });
  result.complete = true;
  result.length = static_cast<int>(long_len);
  return result;
}

RunRecord run_online(OnlinePolicy& policy, const Instance& instance) {
  const MetricSpace& space = instance.space;
  space.require_id(instance.start);
  policy.reset(space, instance.start);

  RunRecord run;
  run.algorithm = policy.name();
  run.start = instance.start;
  run.requests = instance.requests;
  run.positions.reserve(instance.requests.size() + 1);
  run.positions.push_back(instance.start);
  PointId pos = instance.start;
  int step = 0;
  for (PointId r : instance.requests) {
    space.require_id(r);
    ++step;
    run.serve_costs.push_back(space.d(pos, r));
    OnlinePolicy::Decision decision = policy.on_request(r);
    if (!space.valid_id(decision.position)) {
      throw std::runtime_error("policy moved to an invalid point");
    }
    run.move_costs.push_back(space.file_size() * space.d(pos, decision.position));
    pos = decision.position;
    run.positions.push_back(pos);
    if (decision.phase_end) run.phases.push_back({step, *decision.phase_end});
  }
  run.partial_tail =
      !instance.requests.empty() && (run.phases.empty() || run.phases.back().end_step != step);
  return run;
}

nlohmann::ordered_json run_record_json(const RunRecord& run) {
  nlohmann::ordered_json j;
  j["algorithm"] = run.algorithm;
  j["start"] = run.start;
  j["requests"] = run.requests;
  j["positions"] = run.positions;
  j["serve_costs"] = run.serve_costs;
  j["move_costs"] = run.move_costs;
  auto& phases = j["phases"] = nlohmann::ordered_json::array();
  for (const auto& p : run.phases) {
    phases.push_back({{"end_step", p.end_step}, {"kind", phase_kind_name(p.kind)}});
  }
  j["partial_tail"] = run.partial_tail;
  j["total_serve"] = run.total_serve();
  j["total_move"] = run.total_move();
  j["total_cost"] = run.total_cost();
  return j;
}

void write_run_json(const RunRecord& run, std::ostream& out) {
  out << run_record_json(run).dump(2) << "\n";
}

void write_run_csv(const RunRecord& run, std::ostream& out) {
  out << "step,request,pos_before,pos_after,serve_cost,move_cost,phase_id,phase_kind\n";
  size_t phase_idx = 0;
  for (int t = 1; t <= run.steps(); ++t) {
    while (phase_idx < run.phases.size() && run.phases[phase_idx].end_step < t) ++phase_idx;
    const bool in_phase = phase_idx < run.phases.size();
    out << t << ',' << run.requests[t - 1] << ',' << run.positions[t - 1] << ','
        << run.positions[t] << ',' << run.serve_costs[t - 1] << ',' << run.move_costs[t - 1]
        << ',' << (in_phase ? static_cast<long>(phase_idx) : -1) << ','
        << (in_phase ? phase_kind_name(run.phases[phase_idx].kind) : "tail") << "\n";
  }
}

}  // namespace migrationlab
