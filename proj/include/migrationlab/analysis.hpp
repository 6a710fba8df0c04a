#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "migrationlab/metric.hpp"
#include "migrationlab/offline.hpp"
#include "migrationlab/policy.hpp"

namespace migrationlab {

/// One complete dynamic phase with everything the per-phase bound needs:
/// the request parts, the matching OPT marks, and the potential values
/// phi = 3 * [alg position, opt position] at both ends.
struct PhaseLedger {
  int phase_id = 0;
  PhaseKind kind = PhaseKind::kShort;
  int start_step = 0;  ///< phase covers steps (start_step, end_step]
  int end_step = 0;
  PointId dlm_start = 0;
  PointId dlm_end = 0;
  std::vector<PointId> opt_marks;  ///< op^0..op^2 (short) or op^0..op^3 (long)
  RequestMultiset r1, r2, r3;
  double c_alg = 0.0;
  double c_opt = 0.0;
  double c_opt_parts[3] = {0.0, 0.0, 0.0};
  double phi_start = 0.0;
  double phi_end = 0.0;
};

/// Tiles a dynamic-policy run into complete phase ledgers against the given
/// OPT trajectory. A trailing partial phase is excluded (reflected in the
/// run's partial_tail flag). Throws when the trajectory does not cover the
/// run or the run has fixed-length phases.
std::vector<PhaseLedger> phase_partition(const MetricSpace& space, const RunRecord& run,
                                         const OptResult& opt);

/// Per-phase bound slack: 4*c_opt + phi_start - c_alg - phi_end. The phase
/// bound asserts this is nonnegative against any OPT trajectory.
double verify_dlm_phase(const MetricSpace& space, const PhaseLedger& ledger);

struct ChainSlack {
  std::string name;
  double slack = 0.0;
  bool in_sum = false;  ///< part of the telescoping decomposition of the phase slack
};

/// Evaluates every displayed inequality of the per-phase proof (budget,
/// cost unfolding, triangle steps, minimizer steps and the phase-condition
/// steps) on the concrete ledger. All slacks must be >= -tol; the entries
/// flagged in_sum add up exactly to verify_dlm_phase.
std::vector<ChainSlack> verify_proof_chain(const MetricSpace& space, const PhaseLedger& ledger);

/// A run paired with its offline optimum and per-phase verification results.
struct AnalyzedRun {
  double alg_cost = 0.0;
  double opt_cost = 0.0;
  double phi_initial = 0.0;
  double phi_final = 0.0;
  double tail_cost = 0.0;  ///< policy cost after the last complete phase
  std::vector<PhaseLedger> ledgers;
  std::vector<double> phase_slacks;
};

AnalyzedRun analyze_dlm_run(const MetricSpace& space, const RunRecord& run, const OptResult& opt);

/// Cost totals over a plain run (no phase verification); used for policies
/// without per-phase ledgers.
AnalyzedRun analyze_plain_run(const MetricSpace& space, const RunRecord& run,
                              const OptResult& opt);

struct CompetitiveReport {
  double total_alg = 0.0;
  double total_opt = 0.0;
  bool ratio_defined = false;
  double ratio = 0.0;           ///< total_alg / total_opt when defined
  double additive_offset = 0.0; ///< sum over runs of (phi_initial - phi_final)
  double tail_cost = 0.0;
  double min_slack = 0.0;
  int negative_slack_phases = 0;
  std::vector<double> phase_slacks;
};

CompetitiveReport competitive_report(std::span<const AnalyzedRun> runs,
                                     double tol = kDefaultTol);

/// phase_id, kind, c_alg, c_opt, phi_start, phi_end, slack, min_chain_slack
void write_ledger_csv(const MetricSpace& space, std::span<const PhaseLedger> ledgers,
                      std::ostream& out);

void write_report_json(const CompetitiveReport& report, std::ostream& out);

}  // namespace migrationlab
