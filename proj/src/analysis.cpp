#include "migrationlab/analysis.hpp"
#include "migrationlab/serialize.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace migrationlab {

namespace {

double opt_cost_over(const MetricSpace& space, const RunRecord& run, const OptResult& opt,
                     int from_step, int to_step) {
  double cost = 0.0;
  for (int i = from_step + 1; i <= to_step; ++i) {
    const PointId before = opt.trajectory[static_cast<size_t>(i) - 1];
    const PointId after = opt.trajectory[static_cast<size_t>(i)];
    cost += space.d(before, run.requests[static_cast<size_t>(i) - 1]);
    cost += space.file_size() * space.d(before, after);
  }
  return cost;
}

double alg_cost_over(const RunRecord& run, int from_step, int to_step) {
  double cost = 0.0;
  for (int i = from_step + 1; i <= to_step; ++i) {
    cost += run.serve_costs[static_cast<size_t>(i) - 1];
    cost += run.move_costs[static_cast<size_t>(i) - 1];
  }
  return cost;
}

}  // namespace

std::vector<PhaseLedger> phase_partition(const MetricSpace& space, const RunRecord& run,
                                         const OptResult& opt) {
  if (opt.trajectory.size() != run.requests.size() + 1) {
    throw std::invalid_argument("OPT trajectory does not cover the run");
  }
  const int D = space.file_size();
  std::vector<PhaseLedger> ledgers;
  int t = 0;
  int id = 0;
  for (const PhaseBoundary& boundary : run.phases) {
    if (boundary.kind == PhaseKind::kFixed) {
      throw std::invalid_argument("phase partition expects a dynamic-policy run");
    }
    const bool is_short = boundary.kind == PhaseKind::kShort;
    const int len = is_short ? 7 * D / 4 : 9 * D / 4;
    if (boundary.end_step - t != len) {
      throw std::invalid_argument("phase boundary does not match the phase length");
    }
    PhaseLedger ledger;
    ledger.phase_id = id++;
    ledger.kind = boundary.kind;
    ledger.start_step = t;
    ledger.end_step = boundary.end_step;
    ledger.dlm_start = run.positions[static_cast<size_t>(t)];
    ledger.dlm_end = run.positions[static_cast<size_t>(boundary.end_step)];

    auto part = [&](int from, int to) {
      return RequestMultiset::from_points(
          std::span<const PointId>(run.requests).subspan(static_cast<size_t>(from),
                                                         static_cast<size_t>(to - from)));
    };
    const int mark1 = t + D;
    const int mark2 = t + 7 * D / 4;
    ledger.r1 = part(t, mark1);
    ledger.r2 = part(mark1, mark2);
    ledger.opt_marks = {opt.trajectory[static_cast<size_t>(t)],
                        opt.trajectory[static_cast<size_t>(mark1)],
                        opt.trajectory[static_cast<size_t>(mark2)]};
    ledger.c_opt_parts[0] = opt_cost_over(space, run, opt, t, mark1);
    ledger.c_opt_parts[1] = opt_cost_over(space, run, opt, mark1, mark2);
    if (!is_short) {
      const int mark3 = t + 9 * D / 4;
      ledger.r3 = part(mark2, mark3);
      ledger.opt_marks.push_back(opt.trajectory[static_cast<size_t>(mark3)]);
      ledger.c_opt_parts[2] = opt_cost_over(space, run, opt, mark2, mark3);
    }
    ledger.c_alg = alg_cost_over(run, t, boundary.end_step);
    ledger.c_opt = ledger.c_opt_parts[0] + ledger.c_opt_parts[1] + ledger.c_opt_parts[2];
    ledger.phi_start =
        3.0 * bracket(space, ledger.dlm_start, ledger.opt_marks.front());
    ledger.phi_end = 3.0 * bracket(space, ledger.dlm_end, ledger.opt_marks.back());
    ledgers.push_back(std::move(ledger));
    t = boundary.end_step;
  }
  return ledgers;
}

double verify_dlm_phase(const MetricSpace&, const PhaseLedger& ledger) {
  return 4.0 * ledger.c_opt + ledger.phi_start - ledger.c_alg - ledger.phi_end;
}

std::vector<ChainSlack> verify_proof_chain(const MetricSpace& space, const PhaseLedger& ledger) {
  const PointId dlm = ledger.dlm_start;
  auto B = [&](PointId a, PointId b) { return bracket(space, a, b); };
  auto BM = [&](PointId a, const RequestMultiset& s) { return bracket(space, a, s); };

  std::vector<ChainSlack> slacks;
  auto push = [&](std::string name, double value, bool in_sum) {
    slacks.push_back({std::move(name), value, in_sum});
  };

  if (ledger.kind == PhaseKind::kShort) {
    const PointId vg = ledger.dlm_end;
    const PointId op0 = ledger.opt_marks[0];
    const PointId op1 = ledger.opt_marks[1];
    const PointId op2 = ledger.opt_marks[2];
    const RequestMultiset& R1 = ledger.r1;
    const RequestMultiset& R2 = ledger.r2;

    const double g_vg = B(dlm, vg) + 2.0 * BM(vg, R1) + BM(vg, R2);
    const double g_op0 = B(dlm, op0) + 2.0 * BM(op0, R1) + BM(op0, R2);

    // Budget from the offline lower bound applied to R1 and R2.
    const double budget = 3.0 * B(dlm, op0) + 2.0 * B(op0, op1) +
                          2.0 * (BM(op0, R1) + BM(op1, R1)) + 2.5 * B(op1, op2) +
                          1.5 * (BM(op1, R2) + BM(op2, R2));
    push("budget_lemma", 4.0 * ledger.c_opt + ledger.phi_start - budget, true);

    // Cost unfolding: serve costs, migration, and the potential against op^2.
    const double first_terms =
        BM(dlm, R1) + 0.75 * BM(dlm, R2) + 2.0 * BM(op2, R1) + BM(op2, R2);
    push("alg_unfold", first_terms + g_vg - (ledger.c_alg + ledger.phi_end), true);

    const double first_terms_bound = (B(dlm, op0) + BM(op0, R1)) +
                                     0.75 * (B(dlm, op0) + B(op0, op1) + BM(op1, R2)) +
                                     2.0 * (B(op2, op1) + BM(op1, R1)) + BM(op2, R2);
    push("first_terms_triangle", first_terms_bound - first_terms, true);

    const double g_mid = 0.5 * g_op0 + 0.75 * BM(dlm, R2);
    const double g_bound = 0.5 * (B(dlm, op0) + 2.0 * BM(op0, R1) + B(op0, op1) + B(op1, op2) +
                                  BM(op2, R2)) +
                           0.75 * (B(dlm, op0) + B(op0, op1) + BM(op1, R2));
    push("g_bound", g_bound - g_vg, true);
    push("g_min_and_condition", g_mid - g_vg, false);
    push("g_triangle", g_bound - g_mid, false);

    push("budget_closure", budget - (first_terms_bound + g_bound), true);
  } else {
    const PointId vh = ledger.dlm_end;
    const PointId op0 = ledger.opt_marks[0];
    const PointId op1 = ledger.opt_marks[1];
    const PointId op2 = ledger.opt_marks[2];
    const PointId op3 = ledger.opt_marks[3];
    const RequestMultiset& R1 = ledger.r1;
    const RequestMultiset& R2 = ledger.r2;
    const RequestMultiset& R3 = ledger.r3;

    const double h_vh =
        B(dlm, vh) + BM(vh, R1) + 1.25 * BM(vh, R2) + 0.75 * BM(vh, R3);
    const double h_op1 =
        B(dlm, op1) + BM(op1, R1) + 1.25 * BM(op1, R2) + 0.75 * BM(op1, R3);
    const double g_op0 = B(dlm, op0) + 2.0 * BM(op0, R1) + BM(op0, R2);

    const double budget = 3.0 * B(dlm, op0) + 2.0 * B(op0, op1) +
                          2.0 * (BM(op0, R1) + BM(op1, R1)) + 2.5 * B(op1, op2) +
                          1.5 * (BM(op1, R2) + BM(op2, R2)) + 3.0 * B(op2, op3) +
                          (BM(op2, R3) + BM(op3, R3));
    push("budget_lemma", 4.0 * ledger.c_opt + ledger.phi_start - budget, true);

    const double serve_terms = BM(dlm, R1) + 0.75 * BM(dlm, R2) + 0.5 * BM(dlm, R3);
    const double opt3_terms = BM(op3, R1) + 1.25 * BM(op3, R2) + 0.75 * BM(op3, R3);
    push("alg_unfold", serve_terms + opt3_terms + h_vh - (ledger.c_alg + ledger.phi_end), true);

    // The 0.75*[dlm,R2] summand routes through the long-phase condition
    // g(v) >= 1.5*[dlm,R2] evaluated at op^0.
    const double serve_bound = (B(dlm, op0) + BM(op0, R1)) +
                               0.5 * (B(dlm, op0) + 2.0 * BM(op0, R1) + B(op0, op1) + BM(op1, R2)) +
                               0.5 * (B(dlm, op0) + B(op0, op1) + B(op1, op2) + BM(op2, R3));
    push("serve_terms_bound", serve_bound - serve_terms, true);
    push("long_condition", 0.5 * g_op0 - 0.75 * BM(dlm, R2), false);

    const double opt3_bound = (B(op3, op2) + B(op2, op1) + BM(op1, R1)) +
                              1.25 * (B(op3, op2) + BM(op2, R2)) + 0.75 * BM(op3, R3);
    push("opt3_terms_triangle", opt3_bound - opt3_terms, true);

    const double h_split = (B(op1, op0) + B(op0, dlm)) + BM(op1, R1) + BM(op1, R2) +
                           0.25 * (B(op1, op2) + BM(op2, R2)) +
                           0.5 * (B(op1, op2) + BM(op2, R3)) +
                           0.25 * (B(op1, op2) + B(op2, op3) + BM(op3, R3));
    push("h_bound", h_split - h_vh, true);
    push("h_min", h_op1 - h_vh, false);
    push("h_split_triangle", h_split - h_op1, false);

    push("budget_closure", budget - (serve_bound + opt3_bound + h_split), true);
  }
  return slacks;
}

AnalyzedRun analyze_dlm_run(const MetricSpace& space, const RunRecord& run,
                            const OptResult& opt) {
  AnalyzedRun analyzed;
  analyzed.ledgers = phase_partition(space, run, opt);
  analyzed.alg_cost = run.total_cost();
  analyzed.opt_cost = opt.cost;
  const int last_boundary = analyzed.ledgers.empty() ? 0 : analyzed.ledgers.back().end_step;
  analyzed.tail_cost = alg_cost_over(run, last_boundary, run.steps());
  analyzed.phi_initial = analyzed.ledgers.empty()
                             ? 3.0 * bracket(space, run.start, opt.trajectory.front())
                             : analyzed.ledgers.front().phi_start;
  analyzed.phi_final = analyzed.ledgers.empty()
                           ? analyzed.phi_initial
                           : analyzed.ledgers.back().phi_end;
  for (const PhaseLedger& ledger : analyzed.ledgers) {
    analyzed.phase_slacks.push_back(verify_dlm_phase(space, ledger));
  }
  return analyzed;
}

AnalyzedRun analyze_plain_run(const MetricSpace& space, const RunRecord& run,
                              const OptResult& opt) {
  AnalyzedRun analyzed;
  analyzed.alg_cost = run.total_cost();
  analyzed.opt_cost = opt.cost;
  analyzed.phi_initial = 3.0 * bracket(space, run.start, opt.trajectory.front());
  analyzed.phi_final = 3.0 * bracket(space, run.positions.back(), opt.trajectory.back());
  return analyzed;
}

CompetitiveReport competitive_report(std::span<const AnalyzedRun> runs, double tol) {
  if (runs.empty()) throw std::invalid_argument("competitive report over no runs");
  CompetitiveReport report;
  report.min_slack = std::numeric_limits<double>::infinity();
  for (const AnalyzedRun& run : runs) {
    report.total_alg += run.alg_cost;
    report.total_opt += run.opt_cost;
    report.additive_offset += run.phi_initial - run.phi_final;
    report.tail_cost += run.tail_cost;
    for (double slack : run.phase_slacks) {
      report.phase_slacks.push_back(slack);
      report.min_slack = std::min(report.min_slack, slack);
      if (slack < -tol) ++report.negative_slack_phases;
    }
  }
  if (report.phase_slacks.empty()) report.min_slack = 0.0;
  report.ratio_defined = report.total_opt > 0.0;
  report.ratio = report.ratio_defined
                     ? report.total_alg / report.total_opt
                     : std::numeric_limits<double>::infinity();
  return report;
}

void write_ledger_csv(const MetricSpace& space, std::span<const PhaseLedger> ledgers,
                      std::ostream& out) {
  out << "phase_id,kind,c_alg,c_opt,phi_start,phi_end,slack,min_chain_slack\n";
  for (const PhaseLedger& ledger : ledgers) {
    double min_chain = std::numeric_limits<double>::infinity();
    for (const ChainSlack& cs : verify_proof_chain(space, ledger)) {
      min_chain = std::min(min_chain, cs.slack);
    }
    out << ledger.phase_id << ',' << phase_kind_name(ledger.kind) << ',' << ledger.c_alg << ','
        << ledger.c_opt << ',' << ledger.phi_start << ',' << ledger.phi_end << ','
        << verify_dlm_phase(space, ledger) << ',' << min_chain << "\n";
  }
}

nlohmann::ordered_json competitive_report_json(const CompetitiveReport& report) {
  nlohmann::ordered_json j;
  j["total_alg"] = report.total_alg;
  j["total_opt"] = report.total_opt;
  j["ratio_defined"] = report.ratio_defined;
  if (report.ratio_defined) {
    j["ratio"] = report.ratio;
  } else {
    j["ratio"] = "infinite";
    j["warning"] = "total OPT cost is zero";
  }
  j["additive_offset"] = report.additive_offset;
  j["tail_cost"] = report.tail_cost;
  j["min_slack"] = report.min_slack;
  j["negative_slack_phases"] = report.negative_slack_phases;
  j["phase_count"] = report.phase_slacks.size();
  return j;
}

void write_report_json(const CompetitiveReport& report, std::ostream& out) {
  out << competitive_report_json(report).dump(2) << "\n";
}

}  // namespace migrationlab
