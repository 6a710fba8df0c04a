#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "migrationlab/instance.hpp"
#include "migrationlab/metric.hpp"

namespace migrationlab {

enum class PhaseKind { kShort, kLong, kFixed };

const char* phase_kind_name(PhaseKind kind);

/// A phase that ended with the step `end_step` (1-based).
struct PhaseBoundary {
  int end_step = 0;
  PhaseKind kind = PhaseKind::kFixed;
};

/// Per-step trace of one online run under serve-then-move semantics:
/// in step t the request is served from positions[t-1], then the file may
/// move, so move_costs[t-1] = D * d(positions[t-1], positions[t]).
struct RunRecord {
  std::string algorithm;
  PointId start = 0;
  std::vector<PointId> requests;
  std::vector<PointId> positions;  ///< positions[t] = file position after step t; [0] = start
  std::vector<double> serve_costs;
  std::vector<double> move_costs;
  std::vector<PhaseBoundary> phases;
  bool partial_tail = false;  ///< trailing steps after the last phase boundary

  int steps() const { return static_cast<int>(requests.size()); }
  double total_serve() const;
  double total_move() const;
  double total_cost() const { return total_serve() + total_move(); }
};

/// Online policy driven one request at a time. After each request the policy
/// reports the end-of-step position and whether this step closed a phase.
class OnlinePolicy {
 public:
  struct Decision {
    PointId position;
    std::optional<PhaseKind> phase_end;
  };

  virtual ~OnlinePolicy() = default;
  virtual std::string name() const = 0;
  virtual void reset(const MetricSpace& space, PointId start) = 0;
  virtual Decision on_request(PointId request) = 0;
};

/// Runs the policy over the instance and accounts serve and move costs per
/// step. Deterministic; throws if the policy moves to an invalid point.
RunRecord run_online(OnlinePolicy& policy, const Instance& instance);

/// End-of-phase migration rule: given the space, the position held during the
/// phase and the phase's request multiset, pick the next position. Rules are
/// memoryless, which is exactly the fixed-phase contract.
using PhaseMoveRule =
    std::function<PointId(const MetricSpace&, PointId, const RequestMultiset&)>;

/// Argmin of sum of distances to the phase requests (phase length D).
PointId mtm_move(const MetricSpace& space, PointId pos, const RequestMultiset& requests);

/// Argmin of D*d(pos,x) + ((c0+1)/c0) * sum of distances to the requests
/// (phase length c0*D).
PointId mtlm_move(const MetricSpace& space, PointId pos, const RequestMultiset& requests);

/// Never moves.
PointId stay_move(const MetricSpace& space, PointId pos, const RequestMultiset& requests);

/// Wraps an end-of-phase move rule into an online policy with fixed phase
/// length round(c*D). The adapter buffers only the current phase, so the
/// policy cannot see past phases.
std::unique_ptr<OnlinePolicy> fixed_phase_policy(std::string name, PhaseMoveRule rule, double c);

std::unique_ptr<OnlinePolicy> mtm_policy();
std::unique_ptr<OnlinePolicy> mtlm_policy();
std::unique_ptr<OnlinePolicy> stay_policy();
std::unique_ptr<OnlinePolicy> dlm_policy(double tol = kDefaultTol);

/// Outcome of evaluating one dynamic phase on a request stream.
struct DlmPhaseResult {
  PointId target = 0;       ///< migration target (= pos when the stream ran out)
  PhaseKind kind = PhaseKind::kShort;
  bool complete = false;    ///< false when the stream ended mid-phase
  int length = 0;           ///< 1.75D or 2.25D when complete, else the consumed count
  RequestMultiset r1, r2, r3;
  PointId g_minimizer = 0;  ///< v_g, evaluated in both branches
  double g_value = 0.0;     ///< g(v_g)
  double threshold = 0.0;   ///< 1.5 * [pos, R2]
};

/// Evaluates one phase of the dynamic policy from `pos` over the stream
/// prefix: parts R1 (D requests), R2 (0.75D), and for a long phase R3 (0.5D).
/// Short iff g(v_g) <= 1.5*[pos,R2] + tol. D must be divisible by 4.
DlmPhaseResult dlm_phase(const MetricSpace& space, PointId pos, std::span<const PointId> stream,
                         double tol = kDefaultTol);

/// Argmin over all space points with the shared tie-break (current position
/// first, then lowest index).
PointId argmin_point(const MetricSpace& space, PointId current,
                     const std::function<double(PointId)>& objective);

void write_run_json(const RunRecord& run, std::ostream& out);
void write_run_csv(const RunRecord& run, std::ostream& out);

}  // namespace migrationlab
