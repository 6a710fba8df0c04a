#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace migrationlab {

enum class Relation { kLessEq, kGreaterEq, kEqual };

struct LinearTerm {
  int var = 0;
  double coef = 0.0;
};

struct LpConstraint {
  std::string name;
  std::vector<LinearTerm> terms;
  Relation rel = Relation::kLessEq;
  double rhs = 0.0;
};

struct LpVariable {
  std::string name;
  bool nonneg = true;  ///< default bound x >= 0; otherwise free
};

/// A maximization LP over named variables. Pairwise average-distance
/// variables come first in element order, cost scalars after them; the
/// objective is always a single variable.
struct LpModel {
  std::string name;
  std::vector<LpVariable> vars;
  std::vector<LpConstraint> constraints;
  int objective_var = 0;
  std::map<std::string, double> params;

  /// Element labels of the underlying point/multiset set, for witness
  /// extraction. pair_var(a, b) maps two element labels to the variable
  /// carrying their average distance; -1 when the pair has no variable.
  std::vector<std::string> elements;

  int var_index(const std::string& var_name) const;
  int pair_var(const std::string& a, const std::string& b) const;
};

struct LpSolution {
  enum class Status { kOptimal, kUnbounded, kInfeasible, kFailed };
  Status status = Status::kFailed;
  double objective = 0.0;
  std::vector<double> assignment;
  long iterations = 0;
  std::string message;
};

const char* lp_status_name(LpSolution::Status status);

/// Single-phase model of the fixed-phase algorithm that migrates to the
/// minimizer of f(x) = [A0,x] + beta*[x,R] after delta*D requests, with
/// potential coefficient phi. Objective: maximize the amortized phase cost
/// with OPT normalized to 1.
LpModel build_mtlm_lp(double delta, double beta, double phi);

struct DlmLpParams {
  double delta[3] = {1.0, 0.75, 0.5};
  double beta[3] = {1.0, 1.25, 0.75};
  double beta_prime[2] = {2.0, 1.0};
  double phi = 3.0;
  /// Per-part coefficient delta_i on the move term of the part-i offline
  /// bound (the value the offline lower bound yields). When false, a single
  /// supplied coefficient is used in all parts instead.
  bool per_part_delta = true;
  double global_delta = 2.25;
};

/// Single-phase model of the dynamic algorithm. The long phase is always
/// present; `include_short` adds the short-strategy block stating that the
/// early migration to the g-minimizer would already be 4-competitive.
/// `include_multiset_pairs` controls whether average distances between two
/// request parts exist as variables (with their triangle constraints).
LpModel build_dlm_lp(const DlmLpParams& params, bool include_short,
                     bool include_multiset_pairs);

/// Dense two-phase simplex (Dantzig pricing with Bland's rule for
/// anti-cycling). The returned assignment is re-checked against every
/// constraint within `feas_tol`; a wrong "optimal" is reported as kFailed.
LpSolution solve_lp(const LpModel& model, double feas_tol = 1e-7, long max_iterations = 200000);

/// Re-evaluates all constraints at the assignment; returns the largest
/// violation (0 when feasible).
double max_violation(const LpModel& model, const std::vector<double>& assignment);

/// Canonical LP text format (objective, constraint rows, bounds). Parsing
/// our own output reproduces the model, and export-parse-export is
/// byte-identical.
std::string export_lp(const LpModel& model);
LpModel parse_lp(const std::string& text);

struct WitnessReport {
  std::vector<std::string> elements;
  Eigen::MatrixXd distances;  ///< average-distance table over elements
  std::map<std::string, double> costs;
  std::vector<std::string> tight_constraints;
};

/// Reads the pairwise-distance table and cost breakdown out of an optimal
/// solution and lists the constraints that hold with equality (the
/// candidates for tight-instance geometry).
WitnessReport extract_witness(const LpModel& model, const LpSolution& solution,
                              double tol = 1e-7);

void write_solution_json(const LpModel& model, const LpSolution& solution, std::ostream& out);

}  // namespace migrationlab
